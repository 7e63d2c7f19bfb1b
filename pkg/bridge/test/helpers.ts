import { mkdirSync, writeFileSync } from 'fs';
import { join } from 'path';
import { PNG } from 'pngjs';

/** Deterministic little PRNG so tests stay reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function writeTestPng(
  path: string,
  width: number,
  height: number,
  value: (x: number, y: number) => number,
): void {
  const png = new PNG({ width, height });
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const v = Math.max(0, Math.min(255, Math.round(value(x, y))));
      const i = 4 * (y * width + x);
      png.data[i] = v;
      png.data[i + 1] = v;
      png.data[i + 2] = v;
      png.data[i + 3] = 255;
    }
  }
  writeFileSync(path, PNG.sync.write(png));
}

/** A face-ish test pattern: bright oval on dark ground plus two dark eyes. */
export function facePattern(seed: number, width = 96, height = 128) {
  const rand = mulberry32(seed);
  const cx = width / 2 + (rand() - 0.5) * 8;
  const cy = height / 2 + (rand() - 0.5) * 8;
  const eyeY = cy - height * 0.1;
  const eyeDx = width * 0.18;
  return {
    eyes: {
      a: [cx - eyeDx, eyeY] as [number, number],
      b: [cx + eyeDx, eyeY] as [number, number],
    },
    value(x: number, y: number): number {
      const oval = ((x - cx) / (width * 0.35)) ** 2 + ((y - cy) / (height * 0.4)) ** 2;
      let v = oval <= 1 ? 190 : 70;
      for (const ex of [cx - eyeDx, cx + eyeDx]) {
        if ((x - ex) ** 2 + (y - eyeY) ** 2 < 20) v = 40;
      }
      return v + 12 * Math.sin(x / 5 + seed) * Math.cos(y / 7);
    },
  };
}

/** 68 plausible landmark points with exact eye centers at the pattern eyes. */
export function writeFaceLandmarks(
  dir: string,
  id: string,
  eyes: { a: [number, number]; b: [number, number] },
): void {
  mkdirSync(dir, { recursive: true });
  const pts: Array<[number, number]> = [];
  const [ax, ay] = eyes.a;
  const [bx, by] = eyes.b;
  const cx = (ax + bx) / 2;
  for (let i = 0; i < 68; i++) {
    pts.push([cx + 20 * Math.cos(i), ay + 30 + 20 * Math.sin(i)]);
  }
  const ring: Array<[number, number]> = [
    [-4, 0], [-2, -2], [2, -2], [4, 0], [2, 2], [-2, 2],
  ];
  for (let i = 0; i < 6; i++) {
    pts[36 + i] = [ax + ring[i][0], ay + ring[i][1]];
    pts[42 + i] = [bx + ring[i][0], by + ring[i][1]];
  }
  const lines = ['dlib68'];
  for (const [x, y] of pts) lines.push(`${x} ${y}`);
  writeFileSync(join(dir, `${id}.lm`), lines.join('\n') + '\n');
}
