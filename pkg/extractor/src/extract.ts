import { mkdirSync, readFileSync, readdirSync, statSync, writeFileSync } from 'node:fs';
import * as path from 'node:path';

import { matrixFromRows, writeMatrixFile } from './aleb.js';
import { EmbedBackend, createClipBackend, createHistogramBackend, meanPool } from './backend.js';
import { BackendConfig, ExtractConfig } from './config.js';
import { DecodeError, EmbedError, ExtractorError } from './errors.js';
import { VIDEO_EXTENSIONS, frameWindows } from './frames.js';

export const MANIFEST_NAME = 'manifest.json';
export const VIDEO_MATRIX = 'video_embeddings.bin';
export const LABEL_MATRIX = 'label_embeddings.bin';
export const ATTRIBUTE_MATRIX = 'attribute_embeddings.bin';

export interface ScannedVideo {
  /** Bundle-wide unique id, e.g. "source/walk/a.mp4". */
  id: string;
  domain: 'source' | 'target';
  path: string;
  /** Class-directory name; null for files directly under the root. */
  label: string | null;
}

export interface SkippedVideo {
  path: string;
  reason: string;
}

export interface ExtractResult {
  outDir: string;
  sharedLabels: string[];
  videosKept: number;
  skipped: SkippedVideo[];
  warnings: string[];
}

export function createBackend(config: BackendConfig): EmbedBackend {
  if (config.kind === 'histogram') {
    return createHistogramBackend(config.dim, config.seed);
  }
  return createClipBackend(config.weights);
}

function isVideoFile(name: string): boolean {
  return VIDEO_EXTENSIONS.has(path.extname(name).toLowerCase());
}

function listSorted(dir: string): string[] {
  return readdirSync(dir).sort();
}

/**
 * Walk one domain root. Videos directly under the root carry no label;
 * videos one level down are labelled with their directory name. Deeper
 * nesting is not scanned. Order is lexicographic by relative path so
 * repeated runs see identical input sequences.
 */
export function scanDomain(root: string, domain: 'source' | 'target'): ScannedVideo[] {
  let entries: string[];
  try {
    entries = listSorted(root);
  } catch (err) {
    throw new ExtractorError(`cannot list ${domain} root ${root}: ${(err as Error).message}`);
  }
  const found: ScannedVideo[] = [];
  for (const entry of entries) {
    const full = path.join(root, entry);
    const stats = statSync(full);
    if (stats.isDirectory()) {
      for (const inner of listSorted(full)) {
        const file = path.join(full, inner);
        if (statSync(file).isFile() && isVideoFile(inner)) {
          found.push({
            id: `${domain}/${entry}/${inner}`,
            domain,
            path: file,
            label: entry,
          });
        }
      }
    } else if (stats.isFile() && isVideoFile(entry)) {
      found.push({ id: `${domain}/${entry}`, domain, path: full, label: null });
    }
  }
  return found;
}

interface EmbeddedVideo {
  video: ScannedVideo;
  embedding: Float64Array;
  frames: number[][];
}

function embedVideo(
  video: ScannedVideo,
  backend: EmbedBackend,
  r: number,
  m: number,
): EmbeddedVideo {
  let bytes: Buffer;
  try {
    bytes = readFileSync(video.path);
  } catch (err) {
    throw new DecodeError(`cannot read: ${(err as Error).message}`);
  }
  const windows = frameWindows(bytes, r);
  const frames = windows.map((w) => backend.frameAttributes(w, m));
  const embedding = meanPool(windows.map((w) => backend.embedBytes(w)));
  return { video, embedding, frames };
}

/**
 * Extract one bundle directory from the configured video roots. Videos
 * that fail to decode are skipped and logged; a run with zero usable
 * source or target videos aborts.
 */
export function extractBundle(config: ExtractConfig): ExtractResult {
  const backend = createBackend(config.backend);
  const warnings: string[] = [];
  const skipped: SkippedVideo[] = [];

  const sources = scanDomain(config.source.root, 'source');
  const targets = scanDomain(config.target.root, 'target');

  const embedded: EmbeddedVideo[] = [];
  const keptByLabel = new Map<string, number>();
  for (const video of [...sources, ...targets]) {
    if (video.domain === 'source') {
      if (video.label === null) {
        warnings.push(`${video.path}: source video outside a class directory; skipped`);
        continue;
      }
      if (config.sharedLabels && !config.sharedLabels.includes(video.label)) {
        warnings.push(`${video.path}: label ${video.label} not in sharedLabels; skipped`);
        continue;
      }
    }
    try {
      const result = embedVideo(video, backend, config.frames, config.attributesPerFrame);
      embedded.push(result);
      if (video.domain === 'source' && video.label !== null) {
        keptByLabel.set(video.label, (keptByLabel.get(video.label) ?? 0) + 1);
      }
    } catch (err) {
      if (err instanceof DecodeError || err instanceof EmbedError) {
        skipped.push({ path: video.path, reason: err.message });
        console.error(`skip ${video.path}: ${err.message}`);
        continue;
      }
      throw err;
    }
  }

  const sharedLabels = config.sharedLabels ?? [...keptByLabel.keys()].sort();
  for (const label of sharedLabels) {
    if (!keptByLabel.has(label)) {
      warnings.push(`shared label ${label} has no usable source videos`);
    }
  }
  const keptSources = embedded.filter((e) => e.video.domain === 'source');
  const keptTargets = embedded.filter((e) => e.video.domain === 'target');
  if (sharedLabels.length === 0 || keptSources.length === 0) {
    throw new ExtractorError(`no usable source videos under ${config.source.root}`);
  }
  if (keptTargets.length === 0) {
    throw new ExtractorError(`no usable target videos under ${config.target.root}`);
  }

  const labelRows = sharedLabels.map((label) =>
    backend.embedText(config.promptTemplate.replaceAll('{label}', label)),
  );
  const attributeRows = backend.vocab.map((token) => backend.embedText(token));

  const manifest = {
    version: 1,
    dim: backend.dim,
    shared_labels: sharedLabels.map((name, i) => ({ name, embedding_index: i })),
    attribute_vocab: [...backend.vocab],
    videos: embedded.map((e, i) => {
      const record: Record<string, unknown> = {
        id: e.video.id,
        domain: e.video.domain,
        embedding_index: i,
        frames: e.frames,
      };
      if (e.video.label !== null) {
        record.label = e.video.label;
      }
      return record;
    }),
  };

  mkdirSync(config.out, { recursive: true });
  writeFileSync(path.join(config.out, MANIFEST_NAME), JSON.stringify(manifest, null, 2) + '\n');
  writeMatrixFile(
    path.join(config.out, VIDEO_MATRIX),
    matrixFromRows(embedded.map((e) => e.embedding), backend.dim),
  );
  writeMatrixFile(path.join(config.out, LABEL_MATRIX), matrixFromRows(labelRows, backend.dim));
  writeMatrixFile(
    path.join(config.out, ATTRIBUTE_MATRIX),
    matrixFromRows(attributeRows, backend.dim),
  );

  return {
    outDir: config.out,
    sharedLabels,
    videosKept: embedded.length,
    skipped,
    warnings,
  };
}
