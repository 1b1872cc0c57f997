// Binary vector-store writer (format "LBVS" version 1). Layout:
//
//   bytes 0-3   magic "LBVS"
//   byte  4     format version 0x01
//   bytes 5-12  u64 LE byte offset of the text index
//   ...         concatenated little-endian float32 vectors
//   index       UTF-8 lines: key, granularity, model, dim, offset (in
//               float32 elements), vector count, tokens as JSON — tab-separated
//
// The scoring pipeline reads these files directly, so the layout is shared
// and must not drift.

const MAGIC = "LBVS";
const VERSION = 1;

export interface StoreEntry {
  key: string;
  granularity: "sentence" | "subwords";
  model: string;
  vectors: Float32Array[];
  tokens: string[];
}

function codePointCompare(a: string, b: string): number {
  const pa = [...a].map((c) => c.codePointAt(0)!);
  const pb = [...b].map((c) => c.codePointAt(0)!);
  for (let i = 0; i < Math.min(pa.length, pb.length); i++) {
    if (pa[i] !== pb[i]) return pa[i] - pb[i];
  }
  return pa.length - pb.length;
}

export function serializeStore(entries: StoreEntry[]): Buffer {
  const ordered = [...entries].sort(
    (a, b) =>
      codePointCompare(a.key, b.key) ||
      codePointCompare(a.granularity, b.granularity) ||
      codePointCompare(a.model, b.model),
  );
  let floatCount = 0;
  const indexLines: string[] = [];
  for (const entry of ordered) {
    const dim = entry.vectors[0]?.length ?? 0;
    for (const vector of entry.vectors) {
      if (vector.length !== dim) {
        throw new Error(`entry ${entry.key}: inconsistent vector dimensions`);
      }
    }
    indexLines.push(
      `${entry.key}\t${entry.granularity}\t${entry.model}\t${dim}\t${floatCount}` +
        `\t${entry.vectors.length}\t${JSON.stringify(entry.tokens)}\n`,
    );
    floatCount += entry.vectors.length * dim;
  }

  const blob = Buffer.alloc(floatCount * 4);
  const view = new DataView(blob.buffer, blob.byteOffset, blob.byteLength);
  let position = 0;
  for (const entry of ordered) {
    for (const vector of entry.vectors) {
      for (const value of vector) {
        view.setFloat32(position, value, true);
        position += 4;
      }
    }
  }

  const header = Buffer.alloc(13);
  header.write(MAGIC, 0, "ascii");
  header.writeUInt8(VERSION, 4);
  header.writeBigUInt64LE(BigInt(13 + blob.length), 5);
  return Buffer.concat([header, blob, Buffer.from(indexLines.join(""), "utf8")]);
}
