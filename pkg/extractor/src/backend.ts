import { existsSync } from 'node:fs';

import { EmbedError, ModelLoadError } from './errors.js';
import { SplitMix64 } from './rng.js';

/**
 * An embedding backend maps raw frame bytes and text strings into one
 * shared d-dimensional space and names what it sees in a frame as
 * confidence-ordered attribute tokens from a fixed vocabulary.
 */
export interface EmbedBackend {
  readonly dim: number;
  readonly vocab: readonly string[];
  /** Unit-norm embedding of one frame's bytes. */
  embedBytes(bytes: Uint8Array): Float64Array;
  /** Unit-norm embedding of a text string. */
  embedText(text: string): Float64Array;
  /** Up to m distinct vocab indices for a frame, most confident first. */
  frameAttributes(bytes: Uint8Array, m: number): number[];
}

export const ATTRIBUTE_VOCAB: readonly string[] = [
  'person', 'grass', 'ball', 'water', 'horse', 'street', 'tree', 'door',
  'table', 'chair', 'window', 'car', 'dog', 'cat', 'hand', 'face',
  'sky', 'field', 'wall', 'floor', 'rope', 'bike', 'stair', 'light',
  'shadow', 'crowd', 'sand', 'snow', 'river', 'fence', 'board', 'glove',
];

const HISTOGRAM_BINS = 256;

function byteHistogram(bytes: Uint8Array): Float64Array {
  const counts = new Float64Array(HISTOGRAM_BINS);
  for (const b of bytes) {
    counts[b] += 1;
  }
  return counts;
}

function normalized(v: Float64Array, what: string): Float64Array {
  let sq = 0;
  for (const x of v) {
    sq += x * x;
  }
  const norm = Math.sqrt(sq);
  if (norm <= 1e-12) {
    throw new EmbedError(`${what} produced a degenerate embedding (norm ${norm})`);
  }
  return v.map((x) => x / norm);
}

/**
 * Deterministic stand-in for a pretrained vision-language encoder: the
 * byte histogram of the content is pushed through a fixed random
 * projection seeded by SplitMix64, then unit-normalized. Text goes
 * through the same path via its UTF-8 bytes, so frames and strings land
 * in one space. Attributes are the frame's dominant histogram bins
 * mapped onto the vocabulary.
 */
export function createHistogramBackend(dim = 64, seed = 0): EmbedBackend {
  if (!Number.isInteger(dim) || dim < 2) {
    throw new EmbedError(`histogram backend dim must be an integer >= 2, got ${dim}`);
  }
  const rng = new SplitMix64(seed);
  // row-major dim x 256 projection, generation order fixed by the seed
  const projection = new Float64Array(dim * HISTOGRAM_BINS);
  for (let i = 0; i < projection.length; i++) {
    projection[i] = rng.nextSymmetric();
  }

  function project(counts: Float64Array, what: string): Float64Array {
    let total = 0;
    for (const c of counts) {
      total += c;
    }
    if (total <= 0) {
      throw new EmbedError(`${what} has no content to embed`);
    }
    const out = new Float64Array(dim);
    for (let bin = 0; bin < HISTOGRAM_BINS; bin++) {
      const f = counts[bin] / total;
      if (f === 0) {
        continue;
      }
      for (let row = 0; row < dim; row++) {
        out[row] += projection[row * HISTOGRAM_BINS + bin] * f;
      }
    }
    return normalized(out, what);
  }

  return {
    dim,
    vocab: ATTRIBUTE_VOCAB,
    embedBytes(bytes) {
      return project(byteHistogram(bytes), 'frame');
    },
    embedText(text) {
      if (text.length === 0) {
        throw new EmbedError('cannot embed an empty string');
      }
      return project(byteHistogram(Buffer.from(text, 'utf8')), `text ${JSON.stringify(text)}`);
    },
    frameAttributes(bytes, m) {
      if (m < 1) {
        throw new EmbedError(`attributes per frame must be >= 1, got ${m}`);
      }
      const counts = byteHistogram(bytes);
      const bins: number[] = [];
      for (let bin = 0; bin < HISTOGRAM_BINS; bin++) {
        if (counts[bin] > 0) {
          bins.push(bin);
        }
      }
      if (bins.length === 0) {
        throw new EmbedError('frame has no content');
      }
      bins.sort((a, b) => counts[b] - counts[a] || a - b);
      const picked: number[] = [];
      for (const bin of bins) {
        const token = bin % ATTRIBUTE_VOCAB.length;
        if (!picked.includes(token)) {
          picked.push(token);
          if (picked.length === m) {
            break;
          }
        }
      }
      return picked;
    },
  };
}

/**
 * Real vision-language backend. Weights are never bundled with this
 * repo and no inference runtime ships in the sandbox, so construction
 * aborts with ModelLoadError either way; the error says which half is
 * missing.
 */
export function createClipBackend(weightsPath: string): EmbedBackend {
  if (!existsSync(weightsPath)) {
    throw new ModelLoadError(`clip weights not found at ${weightsPath}`);
  }
  throw new ModelLoadError(
    `clip weights found at ${weightsPath} but no inference runtime is configured`,
  );
}

function compareVectors(a: Float64Array, b: Float64Array): number {
  for (let i = 0; i < a.length; i++) {
    if (a[i] !== b[i]) {
      return a[i] < b[i] ? -1 : 1;
    }
  }
  return 0;
}

/**
 * Mean temporal pooling. Frames are summed in a canonical order so the
 * result is bit-identical under any permutation of the input, not just
 * equal up to float reordering error.
 */
export function meanPool(frames: readonly Float64Array[]): Float64Array {
  if (frames.length === 0) {
    throw new EmbedError('cannot pool zero frames');
  }
  const dim = frames[0].length;
  for (const frame of frames) {
    if (frame.length !== dim) {
      throw new EmbedError(`frame embedding has ${frame.length} dims, expected ${dim}`);
    }
  }
  const ordered = [...frames].sort(compareVectors);
  const out = new Float64Array(dim);
  for (const frame of ordered) {
    for (let i = 0; i < dim; i++) {
      out[i] += frame[i];
    }
  }
  for (let i = 0; i < dim; i++) {
    out[i] /= frames.length;
  }
  return out;
}
