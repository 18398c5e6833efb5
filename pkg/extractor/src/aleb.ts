/**
 * Binary matrix files shared with the engine:
 *
 *   bytes 0..4   magic "ALEB"
 *   u32 LE       format version (1)
 *   u32 LE       rows
 *   u32 LE       cols
 *   rows*cols    float32 LE, row-major, no padding, no trailer
 */

import { readFileSync, writeFileSync } from 'node:fs';

import { ExtractorError } from './errors.js';

export const MAGIC = 'ALEB';
export const FORMAT_VERSION = 1;
export const HEADER_BYTES = 16;

export interface Matrix {
  rows: number;
  cols: number;
  /** Row-major values, length rows*cols. */
  data: Float32Array;
}

export function matrixFromRows(rows: Float64Array[], cols: number): Matrix {
  const data = new Float32Array(rows.length * cols);
  rows.forEach((row, i) => {
    if (row.length !== cols) {
      throw new ExtractorError(`row ${i} has ${row.length} values, expected ${cols}`);
    }
    data.set(Float32Array.from(row), i * cols);
  });
  return { rows: rows.length, cols, data };
}

export function encodeMatrix(m: Matrix): Buffer {
  if (m.data.length !== m.rows * m.cols) {
    throw new ExtractorError(
      `matrix declares ${m.rows}x${m.cols} but holds ${m.data.length} values`,
    );
  }
  const buf = Buffer.alloc(HEADER_BYTES + 4 * m.data.length);
  buf.write(MAGIC, 0, 'ascii');
  buf.writeUInt32LE(FORMAT_VERSION, 4);
  buf.writeUInt32LE(m.rows, 8);
  buf.writeUInt32LE(m.cols, 12);
  const view = new DataView(buf.buffer, buf.byteOffset + HEADER_BYTES);
  for (let i = 0; i < m.data.length; i++) {
    view.setFloat32(4 * i, m.data[i], true);
  }
  return buf;
}

export function decodeMatrix(buf: Buffer, where = 'matrix'): Matrix {
  if (buf.length < HEADER_BYTES) {
    throw new ExtractorError(`${where}: shorter than the 16-byte header`);
  }
  if (buf.toString('ascii', 0, 4) !== MAGIC) {
    throw new ExtractorError(`${where}: bad magic ${JSON.stringify(buf.toString('ascii', 0, 4))}`);
  }
  const version = buf.readUInt32LE(4);
  if (version !== FORMAT_VERSION) {
    throw new ExtractorError(`${where}: unsupported format version ${version}`);
  }
  const rows = buf.readUInt32LE(8);
  const cols = buf.readUInt32LE(12);
  if (buf.length !== HEADER_BYTES + 4 * rows * cols) {
    throw new ExtractorError(
      `${where}: declares ${rows}x${cols} but holds ${buf.length - HEADER_BYTES} value bytes`,
    );
  }
  const data = new Float32Array(rows * cols);
  const view = new DataView(buf.buffer, buf.byteOffset + HEADER_BYTES);
  for (let i = 0; i < data.length; i++) {
    data[i] = view.getFloat32(4 * i, true);
  }
  return { rows, cols, data };
}

export function writeMatrixFile(path: string, m: Matrix): void {
  writeFileSync(path, encodeMatrix(m));
}

export function readMatrixFile(path: string): Matrix {
  return decodeMatrix(readFileSync(path), path);
}
