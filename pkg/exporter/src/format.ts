/**
 * Writer for the embedding binary format consumed by the toponav core.
 *
 * Layout:
 *   bytes 0..3   magic "PNAV" (ascii)
 *   bytes 4..7   format version, uint32 little-endian
 *   bytes 8..11  vector dimension, uint32 little-endian
 *   bytes 12..19 row count, uint64 little-endian
 *   bytes 20..   float32 little-endian row-major vector data
 *
 * A JSON sidecar at <path>.meta.json carries one entry per row plus
 * free-form provenance fields.  The core reader accepts either a bare
 * array of rows or an object whose "rows" key holds that array; we
 * always write the object form so provenance can ride along.
 */

import { writeFileSync, readFileSync } from "fs";

export const MAGIC = "PNAV";
export const FORMAT_VERSION = 1;
export const HEADER_SIZE = 20;

export interface SidecarRow {
  image: string;
  position?: [number, number];
}

export interface EmbeddingHeader {
  version: number;
  dim: number;
  count: number;
}

/** Pack the 20-byte header. */
export function packHeader(dim: number, count: number): Buffer {
  const header = Buffer.alloc(HEADER_SIZE);
  header.write(MAGIC, 0, "ascii");
  header.writeUInt32LE(FORMAT_VERSION, 4);
  header.writeUInt32LE(dim, 8);
  header.writeBigUInt64LE(BigInt(count), 12);
  return header;
}

/** Parse the header of an embedding file, validating magic and version. */
export function readHeader(path: string): EmbeddingHeader {
  const bytes = readFileSync(path);
  if (bytes.length < HEADER_SIZE) {
    throw new Error(`embedding file ${path} is shorter than its header`);
  }
  const magic = bytes.toString("ascii", 0, 4);
  if (magic !== MAGIC) {
    throw new Error(`bad magic ${JSON.stringify(magic)} in ${path}`);
  }
  const version = bytes.readUInt32LE(4);
  if (version !== FORMAT_VERSION) {
    throw new Error(`unsupported format version ${version} in ${path}`);
  }
  const dim = bytes.readUInt32LE(8);
  const count = Number(bytes.readBigUInt64LE(12));
  return { version, dim, count };
}

/**
 * Write vectors plus sidecar.  Vectors are quantized to float32 on the
 * way out; the sidecar is written next to the binary as
 * <basePath>.meta.json.  Both writes are fully deterministic for a
 * given input, which is what makes repeated exports byte-identical.
 */
export function writeEmbeddingFile(
  basePath: string,
  vectors: Float64Array[],
  rows: SidecarRow[],
  provenance: Record<string, unknown>
): void {
  if (vectors.length !== rows.length) {
    throw new Error(
      `vector count ${vectors.length} does not match sidecar row count ${rows.length}`
    );
  }
  if (vectors.length === 0) {
    throw new Error("refusing to write an embedding file with zero rows");
  }
  const dim = vectors[0].length;
  for (const vec of vectors) {
    if (vec.length !== dim) {
      throw new Error(
        `inconsistent vector lengths: expected ${dim}, found ${vec.length}`
      );
    }
  }

  const body = new Float32Array(vectors.length * dim);
  vectors.forEach((vec, i) => body.set(vec, i * dim));
  const bodyBuffer = Buffer.from(body.buffer, body.byteOffset, body.byteLength);

  writeFileSync(basePath, Buffer.concat([packHeader(dim, vectors.length), bodyBuffer]));

  const sidecar = { rows, ...provenance };
  writeFileSync(`${basePath}.meta.json`, JSON.stringify(sidecar, null, 2) + "\n");
}
