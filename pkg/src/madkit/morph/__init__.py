from .delaunay import TriangleMesh, delaunay
from .engine import DLIB68_GROUPS, MorphParams, demorph, interpolate_points, morph
from .landmarks import augment_landmarks, load_landmarks, save_landmarks
from .warp import affine_from_triangles, bilinear_sample, triangle_pixels, warp_triangle

__all__ = [
    "DLIB68_GROUPS", "MorphParams", "TriangleMesh", "affine_from_triangles",
    "augment_landmarks", "bilinear_sample", "delaunay", "demorph",
    "interpolate_points", "load_landmarks", "morph", "save_landmarks",
    "triangle_pixels", "warp_triangle",
]
