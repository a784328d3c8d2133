/**
 * convert <src> <dst> [--scale auto|<float>]
 *
 * One HDSR v1 file per source MAT-file. A directory source converts every
 * *.mat inside it into the destination directory, independently.
 */

import { existsSync, mkdirSync, readFileSync, readdirSync, statSync, writeFileSync } from "node:fs";
import { basename, join } from "node:path";
import { parseArgs } from "node:util";

import { ConversionError, convertMat } from "./convert.js";

function usage(): number {
  console.error("usage: convert <src.mat|src-dir> <dst.hdsr|dst-dir> [--scale auto|<float>]");
  return 1;
}

function convertFile(src: string, dst: string, scale: "auto" | number): void {
  const out = convertMat(new Uint8Array(readFileSync(src)), {
    scale,
    defaultPatientId: basename(src).replace(/\.mat$/i, ""),
  });
  writeFileSync(dst, out);
  console.log(`${src} -> ${dst} (${out.length} bytes)`);
}

export function main(argv: string[]): number {
  let positionals: string[];
  let values: { scale?: string };
  try {
    ({ values, positionals } = parseArgs({
      args: argv,
      options: { scale: { type: "string", default: "auto" } },
      allowPositionals: true,
    }));
  } catch {
    return usage();
  }
  if (positionals.length !== 2) return usage();
  const [src, dst] = positionals;

  let scale: "auto" | number = "auto";
  if (values.scale !== undefined && values.scale !== "auto") {
    scale = Number(values.scale);
    if (!Number.isFinite(scale) || scale <= 0) {
      console.error(`error: invalid --scale '${values.scale}'`);
      return 1;
    }
  }

  try {
    if (!existsSync(src)) {
      console.error(`error: source not found: ${src}`);
      return 2;
    }
    if (statSync(src).isDirectory()) {
      const files = readdirSync(src).filter((f) => f.toLowerCase().endsWith(".mat"));
      if (!files.length) {
        console.error(`error: no .mat files under ${src}`);
        return 2;
      }
      mkdirSync(dst, { recursive: true });
      for (const f of files.sort()) {
        convertFile(join(src, f), join(dst, f.replace(/\.mat$/i, ".hdsr")), scale);
      }
    } else {
      convertFile(src, dst, scale);
    }
  } catch (e) {
    if (e instanceof ConversionError) {
      console.error(`error: ${e.message}`);
      return 2;
    }
    throw e;
  }
  return 0;
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
