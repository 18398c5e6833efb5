import { readFileSync } from 'node:fs';

import { z } from 'zod';

import { ConfigError } from './errors.js';

const HistogramBackendSchema = z.object({
  kind: z.literal('histogram'),
  dim: z.number().int().min(2).max(4096).default(64),
  seed: z.number().int().min(0).default(0),
});

const ClipBackendSchema = z.object({
  kind: z.literal('clip'),
  weights: z.string().min(1),
});

export const BackendSchema = z.discriminatedUnion('kind', [
  HistogramBackendSchema,
  ClipBackendSchema,
]);

export const ExtractConfigSchema = z.object({
  source: z.object({ root: z.string().min(1) }),
  target: z.object({ root: z.string().min(1) }),
  // omit to derive from the source root's class directories
  sharedLabels: z.array(z.string().min(1)).min(1).optional(),
  promptTemplate: z
    .string()
    .refine((t) => t.includes('{label}'), {
      message: 'promptTemplate must contain the {label} placeholder',
    })
    .default('A video of {label}'),
  frames: z.number().int().min(1).default(8),
  attributesPerFrame: z.number().int().min(1).default(5),
  out: z.string().min(1),
  backend: BackendSchema.default({ kind: 'histogram', dim: 64, seed: 0 }),
});

export type ExtractConfig = z.infer<typeof ExtractConfigSchema>;
export type BackendConfig = z.infer<typeof BackendSchema>;

export function parseConfig(raw: unknown, where = 'config'): ExtractConfig {
  const result = ExtractConfigSchema.safeParse(raw);
  if (!result.success) {
    const detail = result.error.issues
      .map((issue) => `${issue.path.join('.') || '(root)'}: ${issue.message}`)
      .join('; ');
    throw new ConfigError(`${where}: ${detail}`);
  }
  return result.data;
}

export function loadConfig(path: string): ExtractConfig {
  let text: string;
  try {
    text = readFileSync(path, 'utf8');
  } catch (err) {
    throw new ConfigError(`cannot read ${path}: ${(err as Error).message}`);
  }
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new ConfigError(`${path} is not valid JSON: ${(err as Error).message}`);
  }
  return parseConfig(raw, path);
}
