import { DecodeError } from './errors.js';

export const VIDEO_EXTENSIONS = new Set(['.mp4', '.avi', '.mkv', '.mov', '.webm']);

// anything smaller cannot plausibly hold r distinct frames of signal
export const MIN_VIDEO_BYTES = 64;

/**
 * Split a video's bytes into r contiguous windows at uniform stride,
 * one window per sampled frame. Deterministic by construction: window i
 * covers [floor(i*n/r), floor((i+1)*n/r)).
 */
export function frameWindows(bytes: Uint8Array, r: number): Uint8Array[] {
  if (r < 1) {
    throw new DecodeError(`frame count must be >= 1, got ${r}`);
  }
  if (bytes.length < MIN_VIDEO_BYTES) {
    throw new DecodeError(
      `only ${bytes.length} bytes, need at least ${MIN_VIDEO_BYTES} to decode`,
    );
  }
  if (bytes.length < r) {
    throw new DecodeError(`cannot sample ${r} frames from ${bytes.length} bytes`);
  }
  const windows: Uint8Array[] = [];
  for (let i = 0; i < r; i++) {
    const start = Math.floor((i * bytes.length) / r);
    const end = Math.floor(((i + 1) * bytes.length) / r);
    windows.push(bytes.subarray(start, end));
  }
  return windows;
}
