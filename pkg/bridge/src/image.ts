import { readFileSync } from 'fs';
import { PNG } from 'pngjs';

export interface GrayImage {
  width: number;
  height: number;
  /** row-major luma values in [0, 255] */
  data: Float64Array;
}

export type Point = [number, number];

/** Decode a PNG into a grayscale image (BT.601 luma). */
export function decodePngGray(path: string): GrayImage {
  const png = PNG.sync.read(readFileSync(path));
  const n = png.width * png.height;
  const data = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const r = png.data[4 * i];
    const g = png.data[4 * i + 1];
    const b = png.data[4 * i + 2];
    data[i] = 0.299 * r + 0.587 * g + 0.114 * b;
  }
  return { width: png.width, height: png.height, data };
}

/** Edge-clamped bilinear sample. */
export function bilinear(img: GrayImage, x: number, y: number): number {
  const cx = Math.min(Math.max(x, 0), img.width - 1);
  const cy = Math.min(Math.max(y, 0), img.height - 1);
  const x0 = Math.floor(cx);
  const y0 = Math.floor(cy);
  const x1 = Math.min(x0 + 1, img.width - 1);
  const y1 = Math.min(y0 + 1, img.height - 1);
  const fx = cx - x0;
  const fy = cy - y0;
  const at = (xx: number, yy: number) => img.data[yy * img.width + xx];
  const top = at(x0, y0) * (1 - fx) + at(x1, y0) * fx;
  const bot = at(x0, y1) * (1 - fx) + at(x1, y1) * fx;
  return top * (1 - fy) + bot * fy;
}

export interface Similarity {
  /** source -> canonical */
  map(p: Point): Point;
  /** canonical -> source */
  inv(p: Point): Point;
}

/** Canonical eye positions for a crop: eyes on one horizontal line,
 * centered, separated by the target inter-eye distance. */
export function canonicalEyes(cropSize: number, interEye: number): [Point, Point] {
  const y = 0.375 * cropSize;
  return [
    [(cropSize - interEye) / 2, y],
    [(cropSize + interEye) / 2, y],
  ];
}

/** Similarity transform taking the detected eye centers onto the
 * canonical positions (rotation + uniform scale + translation). */
export function similarityToCanonical(
  eyeA: Point,
  eyeB: Point,
  cropSize: number,
  interEye: number,
): Similarity {
  const [dstA, dstB] = canonicalEyes(cropSize, interEye);
  // complex ratio w = (dstB - dstA) / (eyeB - eyeA)
  const sx = eyeB[0] - eyeA[0];
  const sy = eyeB[1] - eyeA[1];
  const tx = dstB[0] - dstA[0];
  const ty = dstB[1] - dstA[1];
  const denom = sx * sx + sy * sy;
  if (denom === 0) {
    throw new Error('eye centers coincide; cannot align');
  }
  const wr = (tx * sx + ty * sy) / denom;
  const wi = (ty * sx - tx * sy) / denom;
  const wNorm = wr * wr + wi * wi;
  return {
    map([x, y]) {
      const dx = x - eyeA[0];
      const dy = y - eyeA[1];
      return [dstA[0] + wr * dx - wi * dy, dstA[1] + wi * dx + wr * dy];
    },
    inv([x, y]) {
      const dx = x - dstA[0];
      const dy = y - dstA[1];
      return [
        eyeA[0] + (wr * dx + wi * dy) / wNorm,
        eyeA[1] + (wr * dy - wi * dx) / wNorm,
      ];
    },
  };
}

/** Warp the source image onto the canonical crop. */
export function alignToEyes(
  img: GrayImage,
  eyeA: Point,
  eyeB: Point,
  cropSize: number,
  interEye: number,
): GrayImage {
  const sim = similarityToCanonical(eyeA, eyeB, cropSize, interEye);
  const data = new Float64Array(cropSize * cropSize);
  for (let y = 0; y < cropSize; y++) {
    for (let x = 0; x < cropSize; x++) {
      const [sx, sy] = sim.inv([x, y]);
      data[y * cropSize + x] = bilinear(img, sx, sy);
    }
  }
  return { width: cropSize, height: cropSize, data };
}

/** 2x2-average downsample to an exact divisor size. */
export function boxDownsample(img: GrayImage, outSize: number): GrayImage {
  if (img.width % outSize !== 0 || img.height % outSize !== 0) {
    throw new Error(`cannot box-downsample ${img.width}x${img.height} to ${outSize}`);
  }
  const bx = img.width / outSize;
  const by = img.height / outSize;
  const data = new Float64Array(outSize * outSize);
  for (let oy = 0; oy < outSize; oy++) {
    for (let ox = 0; ox < outSize; ox++) {
      let sum = 0;
      for (let dy = 0; dy < by; dy++) {
        for (let dx = 0; dx < bx; dx++) {
          sum += img.data[(oy * by + dy) * img.width + ox * bx + dx];
        }
      }
      data[oy * outSize + ox] = sum / (bx * by);
    }
  }
  return { width: outSize, height: outSize, data };
}
