"""Procedural face-like images with known 68-point landmarks.

Good enough to exercise the morphing, degradation and texture pipelines
at desk scale: an elliptical head with per-identity proportions, skin
texture, eyes, brows, nose and mouth, all rendered from the same
parameters that generate the landmark set.
"""

import numpy as np

from madkit.core import LandmarkSet

W, H = 120, 160


def identity_params(rng):
    return {
        "cx": 60.0 + rng.uniform(-4, 4),
        "cy": 88.0 + rng.uniform(-4, 4),
        "rx": 38.0 + rng.uniform(-5, 5),
        "ry": 50.0 + rng.uniform(-4, 6),
        "eye_dx": 17.0 + rng.uniform(-2.5, 2.5),
        "eye_y": 70.0 + rng.uniform(-3, 3),
        "eye_rx": 6.5 + rng.uniform(-1, 1),
        "eye_ry": 3.2 + rng.uniform(-0.5, 0.8),
        "mouth_y": 118.0 + rng.uniform(-4, 4),
        "mouth_rx": 13.0 + rng.uniform(-2, 3),
        "mouth_ry": 5.0 + rng.uniform(-1, 2),
        "nose_len": 24.0 + rng.uniform(-3, 3),
        "skin": 165.0 + rng.uniform(-25, 25),
        "tex_amp": 5.0 + rng.uniform(0, 4),
        "tex_lx": 9.0 + rng.uniform(0, 6),
        "tex_ly": 11.0 + rng.uniform(0, 6),
        "tex_px": rng.uniform(0, 2 * np.pi),
        "tex_py": rng.uniform(0, 2 * np.pi),
    }


def _ellipse_arc(cx, cy, rx, ry, angles):
    return np.stack([cx + rx * np.cos(angles), cy + ry * np.sin(angles)], axis=1)


def face_landmarks(p, jitter=0.0, rng=None):
    """68 points in the customary group order; optional expression jitter."""
    pts = np.zeros((68, 2))
    theta = np.linspace(np.pi, 2 * np.pi, 17)
    jaw = _ellipse_arc(p["cx"], p["cy"], p["rx"], p["ry"], theta)
    jaw[:, 1] = p["cy"] + np.abs(jaw[:, 1] - p["cy"])  # lower arc only
    pts[0:17] = jaw[::-1]

    ex_r = p["cx"] - p["eye_dx"]
    ex_l = p["cx"] + p["eye_dx"]
    brow_y = p["eye_y"] - 11.0
    for base, ex in ((17, ex_r), (22, ex_l)):
        xs = np.linspace(ex - 8, ex + 8, 5)
        ys = brow_y - 2.5 * np.sin(np.linspace(0, np.pi, 5))
        pts[base:base + 5] = np.stack([xs, ys], axis=1)

    pts[27:31] = np.stack([np.full(4, p["cx"]),
                           np.linspace(p["eye_y"], p["eye_y"] + p["nose_len"], 4)],
                          axis=1)
    nose_y = p["eye_y"] + p["nose_len"] + 4.0
    pts[31:36] = np.stack([np.linspace(p["cx"] - 7, p["cx"] + 7, 5),
                           nose_y - 2.0 * np.sin(np.linspace(0, np.pi, 5))],
                          axis=1)

    eye_angles = np.deg2rad([180, 135, 45, 0, 315, 225])
    pts[36:42] = _ellipse_arc(ex_r, p["eye_y"], p["eye_rx"], p["eye_ry"], eye_angles)
    pts[42:48] = _ellipse_arc(ex_l, p["eye_y"], p["eye_rx"], p["eye_ry"], eye_angles)

    outer = np.deg2rad(np.linspace(0, 330, 12))
    inner = np.deg2rad(np.linspace(0, 315, 8))
    pts[48:60] = _ellipse_arc(p["cx"], p["mouth_y"], p["mouth_rx"],
                              p["mouth_ry"], outer)
    pts[60:68] = _ellipse_arc(p["cx"], p["mouth_y"], 0.6 * p["mouth_rx"],
                              0.6 * p["mouth_ry"], inner)

    if jitter > 0 and rng is not None:
        pts = pts + rng.uniform(-jitter, jitter, pts.shape)
    pts[:, 0] = np.clip(pts[:, 0], 1, W - 2)
    pts[:, 1] = np.clip(pts[:, 1], 1, H - 2)
    return pts


def _ellipse_mask(xx, yy, cx, cy, rx, ry):
    return ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0


def render_face(p, pts, noise_seed=0, brightness=0.0):
    rng = np.random.default_rng(noise_seed)
    yy, xx = np.mgrid[0:H, 0:W].astype(float)
    img = np.full((H, W), 208.0)

    head_cy = p["cy"] - 10.0
    head_ry = p["ry"] + 26.0
    head = _ellipse_mask(xx, yy, p["cx"], head_cy, p["rx"] + 2.0, head_ry)
    texture = (p["tex_amp"] * np.sin(2 * np.pi * xx / p["tex_lx"] + p["tex_px"])
               + p["tex_amp"] * 0.8 * np.sin(2 * np.pi * yy / p["tex_ly"] + p["tex_py"]))
    img[head] = p["skin"] + texture[head]

    hair = head & (yy < head_cy - 0.55 * head_ry)
    img[hair] = 62.0 + 0.4 * texture[hair]

    for sl in (slice(36, 42), slice(42, 48)):
        eye = pts[sl]
        c = eye.mean(axis=0)
        rx = (eye[:, 0].max() - eye[:, 0].min()) / 2.0 + 1.0
        ry = (eye[:, 1].max() - eye[:, 1].min()) / 2.0 + 1.0
        img[_ellipse_mask(xx, yy, c[0], c[1], rx, ry)] = 55.0

    for sl in (slice(17, 22), slice(22, 27)):
        brow = pts[sl]
        c = brow.mean(axis=0)
        rx = (brow[:, 0].max() - brow[:, 0].min()) / 2.0 + 1.0
        img[_ellipse_mask(xx, yy, c[0], c[1], rx, 2.0)] = 85.0

    bridge = (np.abs(xx - p["cx"]) <= 1.2) & (yy >= p["eye_y"]) \
        & (yy <= p["eye_y"] + p["nose_len"] + 2)
    img[bridge] -= 24.0
    nose = pts[31:36]
    img[_ellipse_mask(xx, yy, p["cx"], nose[:, 1].mean(), 7.0, 2.5)] -= 30.0

    img[_ellipse_mask(xx, yy, p["cx"], p["mouth_y"], p["mouth_rx"],
                      p["mouth_ry"])] = 105.0
    img[_ellipse_mask(xx, yy, p["cx"], p["mouth_y"], 0.6 * p["mouth_rx"],
                      0.6 * p["mouth_ry"])] = 128.0

    img += brightness + rng.normal(0.0, 3.0, img.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def make_identity(rng):
    """(reference, morph-input, probe) images with landmark sets."""
    p = identity_params(rng)
    out = {}
    for role, jitter, bright in (("ref", 0.0, 0.0), ("inp", 0.6, 0.0),
                                 ("probe", 1.4, rng.uniform(-10, 10))):
        pts = face_landmarks(p, jitter=jitter, rng=rng)
        img = render_face(p, pts, noise_seed=int(rng.integers(1 << 31)),
                          brightness=bright)
        out[role] = (img, LandmarkSet(pts, scheme="dlib68"))
    return out
