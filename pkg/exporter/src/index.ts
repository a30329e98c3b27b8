export {
  MAGIC,
  FORMAT_VERSION,
  HEADER_SIZE,
  packHeader,
  readHeader,
  writeEmbeddingFile,
} from "./format";
export type { SidecarRow, EmbeddingHeader } from "./format";
export { decodeImage, isSupportedImage, toGrayResized } from "./image";
export type { RawImage } from "./image";
export {
  projectionBackbone,
  backboneFromId,
  DEFAULT_BACKBONE_ID,
} from "./backbone";
export type { Backbone } from "./backbone";
export {
  exportEmbeddings,
  parseResize,
  readPositions,
  DEFAULT_RESIZE,
} from "./export";
export type { ExportOptions, ExportManifest, ResizeSpec } from "./export";
