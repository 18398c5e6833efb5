#!/usr/bin/env node

/**
 * Bundle extraction CLI.
 *
 *   extract      --config extract.json
 *   embed-texts  --out file.bin [--config extract.json] [--template T]
 *                [--from list.txt] [strings...]
 *
 * Exit codes: 0 success, 1 usage/config/extraction failure, 2 model
 * loading failure.
 */

import { readFileSync } from 'node:fs';
import { parseArgs } from 'node:util';

import { writeMatrixFile } from './aleb.js';
import { createHistogramBackend } from './backend.js';
import { loadConfig } from './config.js';
import { embedTexts } from './embed.js';
import { ConfigError, ModelLoadError } from './errors.js';
import { createBackend, extractBundle } from './extract.js';

const USAGE = `usage:
  extract      --config extract.json
  embed-texts  --out file.bin [--config extract.json] [--template T] [--from list.txt] [strings...]`;

function runExtract(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: { config: { type: 'string' } },
  });
  if (!values.config) {
    throw new ConfigError(`extract needs --config\n${USAGE}`);
  }
  const config = loadConfig(values.config);
  console.time('extract');
  const result = extractBundle(config);
  console.timeEnd('extract');
  for (const warning of result.warnings) {
    console.error(`warning: ${warning}`);
  }
  console.log(
    `wrote ${result.videosKept} videos, ${result.sharedLabels.length} shared labels ` +
      `to ${result.outDir} (${result.skipped.length} skipped)`,
  );
}

function runEmbedTexts(argv: string[]): void {
  const { values, positionals } = parseArgs({
    args: argv,
    options: {
      out: { type: 'string' },
      config: { type: 'string' },
      template: { type: 'string' },
      from: { type: 'string' },
    },
    allowPositionals: true,
  });
  if (!values.out) {
    throw new ConfigError(`embed-texts needs --out\n${USAGE}`);
  }
  const backend = values.config
    ? createBackend(loadConfig(values.config).backend)
    : createHistogramBackend();
  const strings: string[] = [];
  if (values.from) {
    let text: string;
    try {
      text = readFileSync(values.from, 'utf8');
    } catch (err) {
      throw new ConfigError(`cannot read ${values.from}: ${(err as Error).message}`);
    }
    strings.push(...text.split('\n').filter((line) => line.length > 0));
  }
  strings.push(...positionals);
  writeMatrixFile(values.out, embedTexts(strings, values.template ?? null, backend));
  console.log(`wrote ${strings.length} rows to ${values.out}`);
}

function main(): void {
  const [command, ...rest] = process.argv.slice(2);
  if (command === 'extract') {
    runExtract(rest);
  } else if (command === 'embed-texts') {
    runEmbedTexts(rest);
  } else if (command === '--help' || command === '-h' || command === 'help') {
    console.log(USAGE);
  } else {
    throw new ConfigError(`unknown command ${command ?? '(none)'}\n${USAGE}`);
  }
}

try {
  main();
} catch (err) {
  console.error((err as Error).message);
  process.exit(err instanceof ModelLoadError ? 2 : 1);
}
