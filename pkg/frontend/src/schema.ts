/** CSV contract: column schema and parsing for probe result files. */

import Papa from "papaparse";
import { z } from "zod";

export const CSV_COLUMNS = [
  "run_id", "probe", "model", "N", "Lx", "Ly", "beta", "param1", "param2",
  "shots", "seed", "mean", "stderr", "oracle", "sigma_dist",
] as const;

const optionalNumber = z
  .string()
  .transform((s) => (s === "" ? null : Number(s)))
  .refine((v) => v === null || Number.isFinite(v) || v === Infinity, {
    message: "not a number",
  });

const requiredNumber = z
  .string()
  .refine((s) => s !== "" && Number.isFinite(Number(s)), {
    message: "required numeric column",
  })
  .transform(Number);

export const rowSchema = z.object({
  run_id: z.string().min(1),
  probe: z.string().min(1),
  model: z.string().min(1),
  N: optionalNumber,
  Lx: optionalNumber,
  Ly: optionalNumber,
  beta: optionalNumber,
  param1: optionalNumber,
  param2: optionalNumber,
  shots: requiredNumber,
  seed: requiredNumber,
  mean: requiredNumber,
  stderr: requiredNumber,
  oracle: optionalNumber,
  sigma_dist: optionalNumber,
});

export type ResultRow = z.infer<typeof rowSchema>;

export class CsvError extends Error {
  constructor(
    public readonly kind: "SchemaMismatch" | "EmptySelection",
    message: string,
  ) {
    super(message);
    this.name = "CsvError";
  }
}

/** Parse a probe CSV; throws CsvError on schema mismatch or no data rows. */
export function parseResultsCsv(text: string): ResultRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  if (fields.length === 0 || parsed.data.length === 0) {
    throw new CsvError("EmptySelection", "CSV contains no data rows");
  }
  const missing = CSV_COLUMNS.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new CsvError(
      "SchemaMismatch",
      `CSV is missing required columns: ${missing.join(", ")}`,
    );
  }
  return parsed.data.map((raw, i) => {
    const check = rowSchema.safeParse(raw);
    if (!check.success) {
      throw new CsvError(
        "SchemaMismatch",
        `row ${i + 1}: ${check.error.issues[0].message}`,
      );
    }
    return check.data;
  });
}

/** Rows of one probe kind; throws EmptySelection when none match. */
export function selectProbe(rows: ResultRow[], probes: string[]): ResultRow[] {
  const picked = rows.filter((r) => probes.includes(r.probe));
  if (picked.length === 0) {
    throw new CsvError(
      "EmptySelection",
      `no rows with probe in {${probes.join(", ")}}`,
    );
  }
  return picked;
}
