import { readFileSync, writeFileSync } from 'fs';

import type { Point } from './image.js';

export interface LandmarkSet {
  scheme: string;
  points: Point[];
}

/** Read the toolkit landmark format: scheme header line, then "x y" lines.
 * Leading # comment lines are ignored. */
export function readLandmarks(path: string): LandmarkSet {
  const lines = readFileSync(path, 'utf-8')
    .split(/\r?\n/)
    .filter((l) => !l.startsWith('#'));
  if (!lines.length || !lines[0].trim()) {
    throw new Error(`${path}: missing scheme header line`);
  }
  const scheme = lines[0].trim();
  const points: Point[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    const parts = line.split(/\s+/);
    if (parts.length !== 2) {
      throw new Error(`${path}:${i + 1}: expected "x y"`);
    }
    const x = Number(parts[0]);
    const y = Number(parts[1]);
    if (!Number.isFinite(x) || !Number.isFinite(y)) {
      throw new Error(`${path}:${i + 1}: non-numeric coordinate`);
    }
    points.push([x, y]);
  }
  return { scheme, points };
}

export function writeLandmarks(lm: LandmarkSet, path: string): void {
  const lines = [lm.scheme];
  for (const [x, y] of lm.points) {
    lines.push(`${formatCoord(x)} ${formatCoord(y)}`);
  }
  writeFileSync(path, lines.join('\n') + '\n');
}

function formatCoord(v: number): string {
  return Number.isInteger(v) ? v.toString() : v.toPrecision(17);
}

/** Eye centers under the 68-point convention (right eye 36..41, left eye
 * 42..47); border-augmented sets use their first 68 points. */
export function eyeCenters(lm: LandmarkSet): { a: Point; b: Point } {
  const pts = lm.scheme.endsWith('+border')
    ? lm.points.slice(0, lm.points.length - 8)
    : lm.points;
  if (pts.length !== 68) {
    throw new Error(
      `eye centers need the 68-point scheme, got ${pts.length} points (${lm.scheme})`,
    );
  }
  const mean = (lo: number, hi: number): Point => {
    let sx = 0;
    let sy = 0;
    for (let i = lo; i < hi; i++) {
      sx += pts[i][0];
      sy += pts[i][1];
    }
    return [sx / (hi - lo), sy / (hi - lo)];
  };
  return { a: mean(36, 42), b: mean(42, 48) };
}

/** Fixed-fraction prior used when no landmarks are available: assumes a
 * roughly centered, upright passport-style face. */
export function priorEyes(width: number, height: number): { a: Point; b: Point } {
  return {
    a: [0.375 * width, 0.4 * height],
    b: [0.625 * width, 0.4 * height],
  };
}
