import { existsSync, mkdirSync, readdirSync, renameSync, writeFileSync } from 'fs';
import { basename, dirname, join } from 'path';

import { formatEmbeddings } from './embeddings.js';
import { alignToEyes, similarityToCanonical, type Point } from './image.js';
import { decodePngGray } from './image.js';
import { eyeCenters, priorEyes, readLandmarks, writeLandmarks } from './landmarks.js';
import { createModel, MODEL_ALLOWLIST } from './models.js';

export interface BridgeConfig {
  modelTag: string;
  imagesDir: string;
  outPath: string;
  landmarksDir?: string;
  /** without landmarks: skip the image instead of using the eye prior */
  requireLandmarks?: boolean;
  interEyeDistance?: number; // default 180 px in the aligned crop
  cropSize?: number; // default 448 px
  modelDir?: string;
  exportLandmarksDir?: string;
}

export interface SkipEntry {
  id: string;
  reason: string;
}

export interface ExtractResult {
  count: number;
  dim: number;
  extractor: string;
  skipped: SkipEntry[];
}

/** Run the embedding model over every PNG in the directory and write the
 * toolkit embedding file. Failures (undecodable image, missing landmarks
 * under requireLandmarks) land in the skip report, never crash the batch.
 * The output is written atomically once the whole batch succeeded. */
export async function extract(cfg: BridgeConfig): Promise<ExtractResult> {
  if (!(MODEL_ALLOWLIST as readonly string[]).includes(cfg.modelTag)) {
    throw new Error(
      `model tag '${cfg.modelTag}' is not in the allowlist: ${MODEL_ALLOWLIST.join(', ')}`,
    );
  }
  const interEye = cfg.interEyeDistance ?? 180;
  const crop = cfg.cropSize ?? 448;
  if (interEye <= 0 || crop <= interEye) {
    throw new Error(`crop size ${crop} must exceed inter-eye distance ${interEye}`);
  }
  const model = await createModel(cfg.modelTag, {
    modelDir: cfg.modelDir,
  });

  const files = readdirSync(cfg.imagesDir)
    .filter((f) => f.toLowerCase().endsWith('.png'))
    .sort();
  if (!files.length) {
    throw new Error(`no .png images in ${cfg.imagesDir}`);
  }
  if (cfg.exportLandmarksDir) {
    mkdirSync(cfg.exportLandmarksDir, { recursive: true });
  }

  const entries = new Map<string, Float64Array>();
  const skipped: SkipEntry[] = [];
  for (const file of files) {
    const id = basename(file, '.png');
    try {
      const img = decodePngGray(join(cfg.imagesDir, file));
      let eyes: { a: Point; b: Point };
      let landmarks = null;
      const lmPath = cfg.landmarksDir ? join(cfg.landmarksDir, `${id}.lm`) : null;
      if (lmPath && existsSync(lmPath)) {
        landmarks = readLandmarks(lmPath);
        eyes = eyeCenters(landmarks);
      } else if (cfg.requireLandmarks) {
        skipped.push({ id, reason: 'no landmarks (face position unknown)' });
        continue;
      } else {
        eyes = priorEyes(img.width, img.height);
      }
      const aligned = alignToEyes(img, eyes.a, eyes.b, crop, interEye);
      const vec = await model.embed(aligned);
      if (vec.length !== model.dim || vec.some((v) => !Number.isFinite(v))) {
        skipped.push({ id, reason: 'model produced an invalid vector' });
        continue;
      }
      entries.set(id, vec);
      if (cfg.exportLandmarksDir && landmarks) {
        const sim = similarityToCanonical(eyes.a, eyes.b, crop, interEye);
        writeLandmarks(
          { scheme: landmarks.scheme, points: landmarks.points.map(sim.map) },
          join(cfg.exportLandmarksDir, `${id}.lm`),
        );
      }
    } catch (err) {
      skipped.push({ id, reason: err instanceof Error ? err.message : String(err) });
    }
  }
  if (!entries.size) {
    throw new Error('every image was skipped; nothing to write');
  }

  mkdirSync(dirname(cfg.outPath) || '.', { recursive: true });
  const tmp = `${cfg.outPath}.tmp`;
  writeFileSync(tmp, formatEmbeddings(model.dim, model.tag, entries));
  renameSync(tmp, cfg.outPath);
  const report = skipped.map((s) => `${s.id}\t${s.reason}`).join('\n');
  writeFileSync(`${cfg.outPath}.skips.txt`, report ? report + '\n' : '');
  return {
    count: entries.size,
    dim: model.dim,
    extractor: model.tag,
    skipped,
  };
}
