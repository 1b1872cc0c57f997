// Offline vector-store export: read labels from a dataset TSV, embed them
// with the configured models, write the binary store. Usage:
//
//   node dist/export.js <labels.tsv> <out.bin> \
//     [--sentence-models sentence-a,sentence-b] [--subword-models subword-a]

import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";
import { backendFromEnv } from "./backend.js";
import { serializeStore, type StoreEntry } from "./store.js";
import { embeddingKey } from "./text.js";

export function labelsFromDatasetTsv(path: string): string[] {
  const keys = new Set<string>();
  for (const line of readFileSync(path, "utf8").split("\n")) {
    if (line === "" || line.startsWith("#") || line.startsWith("entity_id\t")) {
      continue;
    }
    const fields = line.split("\t");
    if (fields.length !== 7) {
      throw new Error(`${path}: expected 7 tab-separated fields, got ${fields.length}`);
    }
    for (const label of [fields[3], fields[4]]) {
      const key = embeddingKey(label);
      if (key !== "") keys.add(key);
    }
  }
  if (keys.size === 0) {
    throw new Error(`${path}: no labels found`);
  }
  return [...keys];
}

export function runExport(argv: string[]): number {
  const { values, positionals } = parseArgs({
    args: argv,
    options: {
      "sentence-models": { type: "string", default: "sentence-a,sentence-b" },
      "subword-models": { type: "string", default: "subword-a" },
    },
    allowPositionals: true,
  });
  if (positionals.length !== 2) {
    console.error("usage: export.js <labels.tsv> <out.bin> [--sentence-models ...] [--subword-models ...]");
    return 1;
  }
  const [labelsPath, outPath] = positionals;
  const backend = backendFromEnv();
  const labels = labelsFromDatasetTsv(labelsPath);

  const entries: StoreEntry[] = [];
  for (const tag of values["sentence-models"]!.split(",").filter(Boolean)) {
    const spec = backend.resolve(tag, "sentence");
    for (const key of labels) {
      entries.push({
        key,
        granularity: "sentence",
        model: spec.tag,
        vectors: [backend.sentenceVector(spec, key)],
        tokens: [],
      });
    }
  }
  for (const tag of values["subword-models"]!.split(",").filter(Boolean)) {
    const spec = backend.resolve(tag, "subwords");
    for (const key of labels) {
      const { tokens, vectors } = backend.subwordVectors(spec, key);
      entries.push({ key, granularity: "subwords", model: spec.tag, vectors, tokens });
    }
  }

  writeFileSync(outPath, serializeStore(entries));
  console.log(`exported ${labels.length} labels -> ${outPath} (${entries.length} entries)`);
  return 0;
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  try {
    process.exit(runExport(process.argv.slice(2)));
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    process.exit(1);
  }
}
