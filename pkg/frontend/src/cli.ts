#!/usr/bin/env node
/** report-plots --in results.csv --kind {disorder,correlator,milro,strange}
 *  --out fig.svg
 *
 * Exit codes: 0 success, 2 invalid input (schema mismatch, empty selection,
 * bad flags), 4 I/O failure.  On error nothing is written to --out.
 */

import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { render, type PlotKind } from "./render.js";
import { CsvError } from "./schema.js";

function fail(kind: string, message: string, code: number): never {
  process.stderr.write(JSON.stringify({ error: { type: kind, message } }) + "\n");
  process.exit(code);
}

export function main(argv: string[]): void {
  const args = yargs(argv)
    .scriptName("report-plots")
    .option("in", { type: "string", demandOption: true, describe: "input CSV" })
    .option("kind", {
      choices: ["disorder", "correlator", "milro", "strange"] as const,
      demandOption: true,
    })
    .option("out", { type: "string", demandOption: true, describe: "output SVG" })
    .strict()
    .fail((msg) => fail("UsageError", msg, 2))
    .parseSync();

  let csvText: string;
  try {
    csvText = readFileSync(args.in, "utf-8");
  } catch (err) {
    fail("IoError", String(err), 4);
  }

  let svg: string;
  try {
    svg = render({ csvText, kind: args.kind as PlotKind });
  } catch (err) {
    if (err instanceof CsvError) {
      fail(err.kind, err.message, 2);
    }
    fail("RenderError", String(err), 2);
  }

  try {
    writeFileSync(args.out, svg, "utf-8");
  } catch (err) {
    fail("IoError", String(err), 4);
  }
}

main(hideBin(process.argv));
