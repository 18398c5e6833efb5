import { Matrix, matrixFromRows } from './aleb.js';
import { EmbedBackend } from './backend.js';

/**
 * Embed a list of strings into one matrix, one unit-norm row per string
 * in input order. With a template, each string replaces the {label}
 * placeholder before encoding; duplicates produce identical rows. An
 * empty list yields a valid 0-row matrix.
 */
export function embedTexts(
  strings: readonly string[],
  template: string | null,
  backend: EmbedBackend,
): Matrix {
  const rows = strings.map((s) =>
    backend.embedText(template ? template.replaceAll('{label}', s) : s),
  );
  return matrixFromRows(rows, backend.dim);
}
