import { boxDownsample, type GrayImage } from './image.js';

export interface EmbeddingModel {
  tag: string;
  dim: number;
  embed(aligned: GrayImage): Promise<Float64Array> | Float64Array;
}

export const MODEL_ALLOWLIST = ['grid-dct-v1', 'tfjs-graph'] as const;

export interface ModelOptions {
  /** directory containing model.json for tfjs-graph models */
  modelDir?: string;
  /** expected embedding dimension for tfjs-graph models */
  dim?: number;
}

export async function createModel(
  tag: string,
  opts: ModelOptions = {},
): Promise<EmbeddingModel> {
  switch (tag) {
    case 'grid-dct-v1':
      return gridDctModel();
    case 'tfjs-graph':
      return tfjsGraphModel(opts);
    default:
      throw new Error(
        `model tag '${tag}' is not in the allowlist: ${MODEL_ALLOWLIST.join(', ')}`,
      );
  }
}

const GRID = 32;
const KEEP = 16; // low-frequency block kept from the DCT

/**
 * Dependency-free deterministic embedder: the aligned crop is box-averaged
 * to a 32x32 grid, transformed with an orthonormal 2-D DCT, and the
 * low-frequency 16x16 coefficient block (DC zeroed for illumination
 * robustness) is L2-normalized into a 256-dim vector. A stand-in with the
 * same interface and file contract as a pretrained face network, useful
 * for tests and plumbing runs; it is not a recognition-grade extractor.
 */
function gridDctModel(): EmbeddingModel {
  const basis = dctBasis(GRID);
  return {
    tag: 'grid-dct-v1',
    dim: KEEP * KEEP,
    embed(aligned: GrayImage): Float64Array {
      const small = boxDownsample(aligned, GRID);
      const coeffs = dct2(small.data, GRID, basis);
      const out = new Float64Array(KEEP * KEEP);
      for (let v = 0; v < KEEP; v++) {
        for (let u = 0; u < KEEP; u++) {
          out[v * KEEP + u] = coeffs[v * GRID + u];
        }
      }
      out[0] = 0; // drop DC
      let norm = 0;
      for (const c of out) norm += c * c;
      norm = Math.sqrt(norm);
      if (norm > 0) {
        for (let i = 0; i < out.length; i++) out[i] /= norm;
      }
      return out;
    },
  };
}

function dctBasis(n: number): Float64Array {
  const basis = new Float64Array(n * n);
  for (let k = 0; k < n; k++) {
    const scale = Math.sqrt((k === 0 ? 1 : 2) / n);
    for (let i = 0; i < n; i++) {
      basis[k * n + i] = scale * Math.cos((Math.PI * (2 * i + 1) * k) / (2 * n));
    }
  }
  return basis;
}

function dct2(data: Float64Array, n: number, basis: Float64Array): Float64Array {
  const tmp = new Float64Array(n * n);
  // rows
  for (let y = 0; y < n; y++) {
    for (let k = 0; k < n; k++) {
      let sum = 0;
      for (let i = 0; i < n; i++) sum += basis[k * n + i] * data[y * n + i];
      tmp[y * n + k] = sum;
    }
  }
  const out = new Float64Array(n * n);
  // columns
  for (let x = 0; x < n; x++) {
    for (let k = 0; k < n; k++) {
      let sum = 0;
      for (let i = 0; i < n; i++) sum += basis[k * n + i] * tmp[i * n + x];
      out[k * n + x] = sum;
    }
  }
  return out;
}

/**
 * Adapter for a locally stored TensorFlow.js graph model (for example a
 * converted open-source face recognition network). Loaded lazily so the
 * heavyweight runtime stays an optional install.
 */
async function tfjsGraphModel(opts: ModelOptions): Promise<EmbeddingModel> {
  if (!opts.modelDir) {
    throw new Error("model tag 'tfjs-graph' requires --model-dir");
  }
  let tf: any;
  try {
    const moduleName = '@tensorflow/tfjs'; // optional, resolved at runtime
    tf = await import(moduleName);
  } catch {
    throw new Error(
      "model tag 'tfjs-graph' needs the optional @tensorflow/tfjs package",
    );
  }
  const model = await tf.loadGraphModel(`file://${opts.modelDir}/model.json`);
  const shape: number[] = model.inputs[0]?.shape ?? [1, 112, 112, 3];
  const side = shape[1] && shape[1] > 0 ? shape[1] : 112;
  return {
    tag: 'tfjs-graph',
    dim: opts.dim ?? 512,
    async embed(aligned: GrayImage): Promise<Float64Array> {
      const out = tf.tidy(() => {
        const gray = tf
          .tensor(aligned.data, [aligned.height, aligned.width, 1])
          .div(255.0);
        const resized = tf.image.resizeBilinear(gray, [side, side]);
        const rgb = tf.concat([resized, resized, resized], 2).expandDims(0);
        const raw = model.predict(rgb);
        return tf.div(raw, tf.norm(raw));
      });
      const values = Float64Array.from(await out.data());
      out.dispose();
      return values;
    },
  };
}
