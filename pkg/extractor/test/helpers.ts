import { execFileSync } from 'node:child_process';
import { mkdirSync, mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import * as path from 'node:path';

import { SplitMix64 } from '../src/rng.js';

export function tempDir(prefix = 'extractor-test-'): string {
  return mkdtempSync(path.join(tmpdir(), prefix));
}

/** Deterministic pseudo-video payload: seeded bytes, default 2 KiB. */
export function videoBytes(seed: number, size = 2048): Buffer {
  const rng = new SplitMix64(seed);
  const buf = Buffer.alloc(size);
  for (let i = 0; i < size; i++) {
    buf[i] = Number(rng.nextU64() & 0xffn);
  }
  return buf;
}

/**
 * Lay out a domain root from {className: fileCount} and return it.
 * Files are named v0.mp4, v1.mp4, ... inside each class directory;
 * seeds derive from the salt so different trees get different bytes.
 */
export function writeVideoTree(
  root: string,
  classes: Record<string, number>,
  salt: number,
): string {
  mkdirSync(root, { recursive: true });
  let n = 0;
  for (const [name, count] of Object.entries(classes)) {
    const dir = path.join(root, name);
    mkdirSync(dir, { recursive: true });
    for (let i = 0; i < count; i++) {
      writeFileSync(path.join(dir, `v${i}.mp4`), videoBytes(salt * 1000 + n));
      n += 1;
    }
  }
  return root;
}

/** Run a python3 snippet, returning stdout; throws on nonzero exit. */
export function runPython(code: string, args: string[] = []): string {
  return execFileSync('python3', ['-c', code, ...args], { encoding: 'utf8' });
}

export interface CommandResult {
  status: number;
  stdout: string;
  stderr: string;
}

/** Spawn a command and capture exit code plus both streams. */
export function runCommand(command: string, args: string[]): CommandResult {
  try {
    const stdout = execFileSync(command, args, { encoding: 'utf8', stdio: 'pipe' });
    return { status: 0, stdout, stderr: '' };
  } catch (err) {
    const e = err as { status?: number; stdout?: string; stderr?: string };
    return {
      status: e.status ?? -1,
      stdout: e.stdout?.toString() ?? '',
      stderr: e.stderr?.toString() ?? '',
    };
  }
}
