#!/usr/bin/env node
import { writeFileSync } from "fs";

import { CsvSchemaError, readAggregateCsv } from "./csv";
import { PlotDataError, renderRegretPlot } from "./svg";

const USAGE =
  "usage: plot_regret <aggregate.csv> <out-image> [--logx]" +
  " [--policies a,b,c] [--title text]";

export interface CliArgs {
  input: string;
  output: string;
  logX: boolean;
  policies: string[] | null;
  title: string | null;
}

export function parseArgs(argv: string[]): CliArgs {
  const positional: string[] = [];
  let logX = false;
  let policies: string[] | null = null;
  let title: string | null = null;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--logx") {
      logX = true;
    } else if (arg === "--policies") {
      const value = argv[++i];
      if (value === undefined) throw new Error("--policies needs a value");
      policies = value.split(",").map((s) => s.trim()).filter((s) => s !== "");
      if (policies.length === 0) throw new Error("--policies list is empty");
    } else if (arg === "--title") {
      const value = argv[++i];
      if (value === undefined) throw new Error("--title needs a value");
      title = value;
    } else if (arg.startsWith("-")) {
      throw new Error(`unknown option ${arg}`);
    } else {
      positional.push(arg);
    }
  }
  if (positional.length !== 2) throw new Error(USAGE);
  const [input, output] = positional;
  if (!output.endsWith(".svg")) {
    throw new Error(`output must be an .svg file, got "${output}"`);
  }
  return { input, output, logX, policies, title };
}

export function main(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`plot_regret: ${(err as Error).message}\n`);
    return 2;
  }
  try {
    const table = readAggregateCsv(args.input);
    const svg = renderRegretPlot(table, {
      policies: args.policies,
      logX: args.logX,
      title: args.title,
    });
    writeFileSync(args.output, svg + "\n");
  } catch (err) {
    if (err instanceof CsvSchemaError) {
      process.stderr.write(`plot_regret: bad CSV: ${err.message}\n`);
    } else if (err instanceof PlotDataError) {
      process.stderr.write(`plot_regret: ${err.message}\n`);
    } else if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      process.stderr.write(
        `plot_regret: no such file: ${(err as NodeJS.ErrnoException).path}\n`,
      );
    } else {
      process.stderr.write(`plot_regret: ${(err as Error).message}\n`);
    }
    return 1;
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
