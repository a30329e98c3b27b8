/**
 * Directory-to-embedding-file export pipeline.
 *
 * Scans a directory for PNG/JPEG images, encodes them with a backbone,
 * and writes the binary + sidecar pair the toponav core reads, plus a
 * manifest describing exactly what went into the file.  Row order is
 * always the lexicographic order of the surviving image names, so an
 * export is reproducible from the directory contents alone.
 */

import { readdirSync, readFileSync, writeFileSync } from "fs";
import { join, basename } from "path";
import { Backbone, backboneFromId, DEFAULT_BACKBONE_ID } from "./backbone";
import { decodeImage, isSupportedImage, toGrayResized, RawImage } from "./image";
import { writeEmbeddingFile, SidecarRow } from "./format";

export interface ResizeSpec {
  width: number;
  height: number;
}

export const DEFAULT_RESIZE: ResizeSpec = { width: 85, height: 64 };

export interface ExportOptions {
  /** Directory scanned (non-recursively) for .png/.jpg/.jpeg files. */
  imageDir: string;
  /** Output basename; writes <out>, <out>.meta.json, <out>.manifest.json. */
  outBasename: string;
  /** Target size images are reduced to before encoding. */
  resize?: ResizeSpec;
  /** Optional CSV of "filename,x,y" rows attaching a position to each image. */
  positionsCsv?: string;
  /** Backbone identifier; defaults to the seeded pixel projection. */
  backboneId?: string;
}

export interface ExportManifest {
  /** Surviving image names, sorted lexicographically; equals row order. */
  images: string[];
  backbone: string;
  dim: number;
  resize: string;
  positionsFile: string | null;
  /** Images present in the directory that failed to decode. */
  skipped: string[];
}

/** Parse "85x64" into a resize spec. */
export function parseResize(flag: string): ResizeSpec {
  const match = /^(\d+)x(\d+)$/.exec(flag);
  if (match === null) {
    throw new Error(`resize must look like 85x64, got ${JSON.stringify(flag)}`);
  }
  const spec = { width: Number(match[1]), height: Number(match[2]) };
  if (spec.width < 1 || spec.height < 1) {
    throw new Error(`resize dimensions must be positive, got ${flag}`);
  }
  return spec;
}

/**
 * Read a positions CSV mapping image filename to (x, y).  A header row
 * of "filename,x,y" is tolerated.  Every exported image must have an
 * entry; the error for a missing one names the image so the fix is
 * obvious.
 */
export function readPositions(csvPath: string): Map<string, [number, number]> {
  const text = readFileSync(csvPath, "utf-8");
  const positions = new Map<string, [number, number]>();
  for (const rawLine of text.split("\n")) {
    const line = rawLine.trim();
    if (line === "") {
      continue;
    }
    const parts = line.split(",").map((part) => part.trim());
    if (parts.length !== 3) {
      throw new Error(`malformed positions row ${JSON.stringify(line)} in ${csvPath}`);
    }
    if (parts[0] === "filename" && parts[1] === "x" && parts[2] === "y") {
      continue;
    }
    const x = Number(parts[1]);
    const y = Number(parts[2]);
    if (!Number.isFinite(x) || !Number.isFinite(y)) {
      throw new Error(`non-numeric position for ${parts[0]} in ${csvPath}`);
    }
    positions.set(parts[0], [x, y]);
  }
  return positions;
}

/**
 * Run the full export.  Returns the manifest that was also written to
 * <outBasename>.manifest.json.
 */
export function exportEmbeddings(options: ExportOptions): ExportManifest {
  const resize = options.resize ?? DEFAULT_RESIZE;
  const backbone: Backbone = backboneFromId(options.backboneId ?? DEFAULT_BACKBONE_ID);

  const candidates = readdirSync(options.imageDir)
    .filter(isSupportedImage)
    .sort();
  if (candidates.length === 0) {
    throw new Error(`no PNG or JPEG images found in ${options.imageDir}`);
  }

  const survivors: string[] = [];
  const skipped: string[] = [];
  const frames: RawImage[] = [];
  for (const name of candidates) {
    const bytes = readFileSync(join(options.imageDir, name));
    try {
      frames.push(decodeImage(name, bytes));
      survivors.push(name);
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      console.warn(`warning: skipping undecodable image ${name}: ${reason}`);
      skipped.push(name);
    }
  }
  if (survivors.length === 0) {
    throw new Error(`every image in ${options.imageDir} failed to decode`);
  }

  let positions: Map<string, [number, number]> | null = null;
  if (options.positionsCsv !== undefined) {
    positions = readPositions(options.positionsCsv);
    for (const name of survivors) {
      if (!positions.has(name)) {
        throw new Error(`positions file ${options.positionsCsv} has no row for ${name}`);
      }
    }
  }

  const batch = frames.map((frame) => toGrayResized(frame, resize.width, resize.height));
  const vectors = backbone.encode(batch);
  for (const vec of vectors) {
    if (vec.length !== backbone.dim) {
      throw new Error(
        `backbone ${backbone.id} produced length ${vec.length}, declared ${backbone.dim}`
      );
    }
  }

  const rows: SidecarRow[] = survivors.map((name) => {
    const row: SidecarRow = { image: name };
    if (positions !== null) {
      row.position = positions.get(name)!;
    }
    return row;
  });

  const resizeFlag = `${resize.width}x${resize.height}`;
  writeEmbeddingFile(options.outBasename, vectors, rows, {
    tool: "toponav-export",
    backbone: backbone.id,
    resize: resizeFlag,
    image_dir: basename(options.imageDir),
    skipped,
  });

  const manifest: ExportManifest = {
    images: survivors,
    backbone: backbone.id,
    dim: backbone.dim,
    resize: resizeFlag,
    positionsFile: options.positionsCsv ?? null,
    skipped,
  };
  writeFileSync(
    `${options.outBasename}.manifest.json`,
    JSON.stringify(manifest, null, 2) + "\n"
  );
  return manifest;
}
