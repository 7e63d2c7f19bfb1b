export { formatEmbeddings, formatFloat, parseEmbeddings } from './embeddings.js';
export { extract } from './extract.js';
export type { BridgeConfig, ExtractResult, SkipEntry } from './extract.js';
export {
  alignToEyes,
  bilinear,
  boxDownsample,
  canonicalEyes,
  decodePngGray,
  similarityToCanonical,
} from './image.js';
export type { GrayImage, Point, Similarity } from './image.js';
export { eyeCenters, priorEyes, readLandmarks, writeLandmarks } from './landmarks.js';
export type { LandmarkSet } from './landmarks.js';
export { createModel, MODEL_ALLOWLIST } from './models.js';
export type { EmbeddingModel, ModelOptions } from './models.js';
