#!/usr/bin/env node
/**
 * Command line front end for the exporter.
 *
 *   toponav-export export --images route_frames/ --out route.bin \
 *       [--resize 85x64] [--positions positions.csv] [--backbone pixel-projection-64]
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { DEFAULT_BACKBONE_ID } from "./backbone";
import { exportEmbeddings, parseResize } from "./export";

export function main(argv: string[]): number {
  let failed = false;
  yargs(argv)
    .command(
      "export",
      "encode a directory of images into an embedding file",
      (cmd) =>
        cmd
          .option("images", {
            type: "string",
            demandOption: true,
            describe: "directory containing .png/.jpg/.jpeg frames",
          })
          .option("out", {
            type: "string",
            demandOption: true,
            describe: "output basename for the binary, sidecar, and manifest",
          })
          .option("resize", {
            type: "string",
            default: "85x64",
            describe: "target size images are reduced to, as WxH",
          })
          .option("positions", {
            type: "string",
            describe: "CSV of filename,x,y rows to attach positions",
          })
          .option("backbone", {
            type: "string",
            default: DEFAULT_BACKBONE_ID,
            describe: "backbone identifier",
          }),
      (args) => {
        try {
          const manifest = exportEmbeddings({
            imageDir: args.images,
            outBasename: args.out,
            resize: parseResize(args.resize),
            positionsCsv: args.positions,
            backboneId: args.backbone,
          });
          console.log(
            `wrote ${manifest.images.length} x ${manifest.dim} embeddings to ${args.out}`
          );
          if (manifest.skipped.length > 0) {
            console.log(`skipped ${manifest.skipped.length} undecodable image(s)`);
          }
        } catch (err) {
          const reason = err instanceof Error ? err.message : String(err);
          console.error(`error: ${reason}`);
          failed = true;
        }
      }
    )
    .demandCommand(1, "specify a command, e.g. export")
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      console.error(`error: ${msg ?? err?.message}`);
      failed = true;
    })
    .parseSync();
  return failed ? 1 : 0;
}

if (require.main === module) {
  process.exit(main(hideBin(process.argv)));
}
