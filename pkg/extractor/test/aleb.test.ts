import { readFileSync, writeFileSync } from 'node:fs';
import * as path from 'node:path';

import { describe, expect, it } from 'vitest';

import {
  HEADER_BYTES,
  decodeMatrix,
  encodeMatrix,
  matrixFromRows,
  readMatrixFile,
  writeMatrixFile,
} from '../src/aleb.js';
import { ExtractorError } from '../src/errors.js';
import { runPython, tempDir } from './helpers.js';

describe('encode/decode', () => {
  it('round-trips values and shape', () => {
    const m = matrixFromRows(
      [Float64Array.from([1, 2, 3]), Float64Array.from([-0.5, 0.25, 1e-7])],
      3,
    );
    const back = decodeMatrix(encodeMatrix(m));
    expect(back.rows).toBe(2);
    expect(back.cols).toBe(3);
    expect([...back.data]).toEqual([...m.data]);
  });

  it('writes the documented header layout', () => {
    const buf = encodeMatrix(matrixFromRows([Float64Array.from([1, 2])], 2));
    expect(buf.toString('ascii', 0, 4)).toBe('ALEB');
    expect(buf.readUInt32LE(4)).toBe(1);
    expect(buf.readUInt32LE(8)).toBe(1);
    expect(buf.readUInt32LE(12)).toBe(2);
    expect(buf.length).toBe(HEADER_BYTES + 8);
  });

  it('supports a 0-row matrix', () => {
    const m = decodeMatrix(encodeMatrix({ rows: 0, cols: 5, data: new Float32Array(0) }));
    expect(m.rows).toBe(0);
    expect(m.cols).toBe(5);
  });

  it('rejects bad magic, bad version, and truncation', () => {
    const good = encodeMatrix(matrixFromRows([Float64Array.from([1, 2])], 2));
    const badMagic = Buffer.from(good);
    badMagic.write('XXXX', 0, 'ascii');
    expect(() => decodeMatrix(badMagic)).toThrow(ExtractorError);
    const badVersion = Buffer.from(good);
    badVersion.writeUInt32LE(9, 4);
    expect(() => decodeMatrix(badVersion)).toThrow(/version/);
    expect(() => decodeMatrix(good.subarray(0, good.length - 1))).toThrow(/holds/);
    expect(() => decodeMatrix(good.subarray(0, 8))).toThrow(/header/);
  });

  it('rejects rows of the wrong width', () => {
    expect(() => matrixFromRows([Float64Array.from([1, 2, 3])], 2)).toThrow(/expected 2/);
  });
});

describe('engine interop', () => {
  it('files read back identically through the engine loader', () => {
    const dir = tempDir();
    const file = path.join(dir, 'm.bin');
    const values = [0.1, -2.5, 3.25, 1e-3, 7, -0.0625];
    writeMatrixFile(file, matrixFromRows([
      Float64Array.from(values.slice(0, 3)),
      Float64Array.from(values.slice(3)),
    ], 3));
    const out = runPython(
      `
import json, sys
from openlabel.bundle import read_matrix
m = read_matrix(sys.argv[1])
print(json.dumps({"shape": list(m.shape), "values": [float(x) for x in m.ravel()]}))
`,
      [file],
    );
    const parsed = JSON.parse(out) as { shape: number[]; values: number[] };
    expect(parsed.shape).toEqual([2, 3]);
    const local = readMatrixFile(file);
    expect(parsed.values).toEqual([...local.data]);
  });

  it('reads files written by the engine', () => {
    const dir = tempDir();
    const file = path.join(dir, 'py.bin');
    runPython(
      `
import sys
import numpy as np
from openlabel.bundle import write_matrix
from pathlib import Path
write_matrix(Path(sys.argv[1]), np.asarray([[1.5, -2.0], [0.125, 9.0]]))
`,
      [file],
    );
    const m = readMatrixFile(file);
    expect(m.rows).toBe(2);
    expect(m.cols).toBe(2);
    expect([...m.data]).toEqual([1.5, -2, 0.125, 9]);
    writeFileSync(path.join(dir, 'copy.bin'), encodeMatrix(m));
    expect(readFileSync(path.join(dir, 'copy.bin')).equals(readFileSync(file))).toBe(true);
  });
});
