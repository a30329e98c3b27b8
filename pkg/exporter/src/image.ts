/**
 * Image decoding and preprocessing.
 *
 * PNG goes through pngjs, JPEG through jpeg-js; both are pure-JS
 * decoders, so the whole pipeline stays free of native dependencies.
 * Decoded frames are reduced to grayscale and resized with bilinear
 * sampling before they reach a backbone.
 */

import { PNG } from "pngjs";
import jpeg from "jpeg-js";
import { extname } from "path";

export interface RawImage {
  width: number;
  height: number;
  /** RGBA interleaved, 4 bytes per pixel. */
  data: Uint8Array;
}

const PNG_EXTENSIONS = new Set([".png"]);
const JPEG_EXTENSIONS = new Set([".jpg", ".jpeg"]);

export function isSupportedImage(name: string): boolean {
  const ext = extname(name).toLowerCase();
  return PNG_EXTENSIONS.has(ext) || JPEG_EXTENSIONS.has(ext);
}

/**
 * Decode a PNG or JPEG buffer to RGBA pixels.  Throws on anything the
 * decoders refuse; callers decide whether that is fatal or a skip.
 */
export function decodeImage(name: string, bytes: Buffer): RawImage {
  const ext = extname(name).toLowerCase();
  if (PNG_EXTENSIONS.has(ext)) {
    const png = PNG.sync.read(bytes);
    return { width: png.width, height: png.height, data: png.data };
  }
  if (JPEG_EXTENSIONS.has(ext)) {
    const frame = jpeg.decode(bytes, { useTArray: true });
    return { width: frame.width, height: frame.height, data: frame.data };
  }
  throw new Error(`unsupported image extension on ${name}`);
}

/**
 * Grayscale + bilinear resize to width x height.  Returns luma values
 * scaled to [0, 1] in row-major order.  Plain float arithmetic on
 * fixed inputs, so results are reproducible bit for bit.
 */
export function toGrayResized(
  image: RawImage,
  width: number,
  height: number
): Float64Array {
  if (width < 1 || height < 1) {
    throw new Error(`resize target ${width}x${height} must be at least 1x1`);
  }
  const luma = new Float64Array(image.width * image.height);
  for (let i = 0; i < luma.length; i++) {
    const r = image.data[4 * i];
    const g = image.data[4 * i + 1];
    const b = image.data[4 * i + 2];
    luma[i] = (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
  }

  const out = new Float64Array(width * height);
  const xScale = image.width / width;
  const yScale = image.height / height;
  for (let y = 0; y < height; y++) {
    // Sample at pixel centers so a same-size "resize" is the identity.
    const srcY = Math.min(Math.max((y + 0.5) * yScale - 0.5, 0), image.height - 1);
    const y0 = Math.floor(srcY);
    const y1 = Math.min(y0 + 1, image.height - 1);
    const fy = srcY - y0;
    for (let x = 0; x < width; x++) {
      const srcX = Math.min(Math.max((x + 0.5) * xScale - 0.5, 0), image.width - 1);
      const x0 = Math.floor(srcX);
      const x1 = Math.min(x0 + 1, image.width - 1);
      const fx = srcX - x0;
      const top = luma[y0 * image.width + x0] * (1 - fx) + luma[y0 * image.width + x1] * fx;
      const bottom = luma[y1 * image.width + x0] * (1 - fx) + luma[y1 * image.width + x1] * fx;
      out[y * width + x] = top * (1 - fy) + bottom * fy;
    }
  }
  return out;
}
