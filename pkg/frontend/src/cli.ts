#!/usr/bin/env node
/**
 * CSV -> SVG figure generation for the optimizer harness outputs.
 *
 *   lracma-figures --kind ecdf    --input ecdf.csv    --output ecdf.svg
 *   lracma-figures --kind success --input sweep.csv   --output rate.svg
 *   lracma-figures --kind sp1     --input sweep.csv   --output sp1.svg [--log-x]
 *   lracma-figures --kind history --input history.csv --output eta.svg
 *   lracma-figures --kind ode     --input ode.csv     --output phase.svg
 *
 * Exit codes: 0 written, 1 bad input (missing file/column, empty data).
 */

import { writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { loadCsv } from "./csv.js";
import {
  renderEcdf,
  renderEtaHistory,
  renderOdePhase,
  renderSp1,
  renderSuccessRate,
} from "./plots.js";

const KINDS = ["ecdf", "success", "sp1", "history", "ode"] as const;
type Kind = (typeof KINDS)[number];

export function renderKind(kind: Kind, inputPath: string, logX: boolean): string {
  const table = loadCsv(inputPath);
  switch (kind) {
    case "ecdf":
      return renderEcdf(table);
    case "success":
      return renderSuccessRate(table, logX);
    case "sp1":
      return renderSp1(table, logX);
    case "history":
      return renderEtaHistory(table);
    case "ode":
      return renderOdePhase(table);
  }
}

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .option("kind", { choices: KINDS, demandOption: true })
    .option("input", { type: "string", demandOption: true })
    .option("output", { type: "string", demandOption: true })
    .option("log-x", { type: "boolean", default: false })
    .strict()
    .parse();
  try {
    const svg = renderKind(args.kind as Kind, args.input, args["log-x"]);
    writeFileSync(args.output, svg);
    console.log(`wrote ${args.output}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
