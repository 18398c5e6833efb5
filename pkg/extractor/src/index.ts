export {
  FORMAT_VERSION,
  HEADER_BYTES,
  MAGIC,
  decodeMatrix,
  encodeMatrix,
  matrixFromRows,
  readMatrixFile,
  writeMatrixFile,
} from './aleb.js';
export type { Matrix } from './aleb.js';
export {
  ATTRIBUTE_VOCAB,
  createClipBackend,
  createHistogramBackend,
  meanPool,
} from './backend.js';
export type { EmbedBackend } from './backend.js';
export { BackendSchema, ExtractConfigSchema, loadConfig, parseConfig } from './config.js';
export type { BackendConfig, ExtractConfig } from './config.js';
export { embedTexts } from './embed.js';
export {
  ConfigError,
  DecodeError,
  EmbedError,
  ExtractorError,
  ModelLoadError,
} from './errors.js';
export {
  ATTRIBUTE_MATRIX,
  LABEL_MATRIX,
  MANIFEST_NAME,
  VIDEO_MATRIX,
  createBackend,
  extractBundle,
  scanDomain,
} from './extract.js';
export type { ExtractResult, ScannedVideo, SkippedVideo } from './extract.js';
export { MIN_VIDEO_BYTES, VIDEO_EXTENSIONS, frameWindows } from './frames.js';
export { SplitMix64 } from './rng.js';
