import { readFileSync } from "fs";
import { join } from "path";

import { describe, expect, it } from "vitest";

import { parseAggregateCsv } from "../src/csv";
import { PlotDataError, renderRegretPlot } from "../src/svg";

const FIXTURE = join(__dirname, "..", "testdata", "aggregate.csv");
const fixtureText = readFileSync(FIXTURE, "utf8");

function legendLabels(svg: string): string[] {
  return [...svg.matchAll(/class="legend-label"[^>]*>([^<]*)<\/text>/g)].map(
    (m) => m[1],
  );
}

function meanLines(svg: string) {
  return [
    ...svg.matchAll(
      /<polyline class="mean" data-policy="([^"]*)" data-final-round="([^"]*)" data-final-mean="([^"]*)" points="([^"]*)"/g,
    ),
  ].map((m) => ({
    policy: m[1],
    finalRound: Number(m[2]),
    finalMean: Number(m[3]),
    points: m[4].split(" ").map((p) => p.split(",").map(Number)),
  }));
}

// final mean per policy straight off the CSV text, independent of the parser
function csvFinalMeans(text: string): Map<string, number> {
  const out = new Map<string, { round: number; mean: number }>();
  for (const line of text.split("\n")) {
    if (line === "" || line.startsWith("#") || line.startsWith("policy,")) {
      continue;
    }
    const f = line.split(",");
    const cur = out.get(f[0]);
    if (!cur || Number(f[1]) > cur.round) {
      out.set(f[0], { round: Number(f[1]), mean: Number(f[2]) });
    }
  }
  return new Map([...out].map(([k, v]) => [k, v.mean]));
}

describe("renderRegretPlot on the experiment fixture", () => {
  const table = parseAggregateCsv(fixtureText);
  const svg = renderRegretPlot(table);

  it("legend lists every policy in the CSV", () => {
    expect(legendLabels(svg)).toEqual(["ossb", "lin_thompson", "glm_ucb"]);
  });

  it("final means in the plot equal the CSV values exactly", () => {
    const expected = csvFinalMeans(fixtureText);
    const lines = meanLines(svg);
    expect(lines).toHaveLength(3);
    for (const line of lines) {
      expect(line.finalMean).toBe(expected.get(line.policy));
    }
  });

  it("final plotted y-coordinate inverts back to the CSV mean", () => {
    const root = svg.match(
      /data-x0="([^"]*)" data-x1="([^"]*)" data-y0="([^"]*)" data-y1="([^"]*)" data-log-x="[^"]*" data-area="([^"]*)"/,
    )!;
    const y0 = Number(root[3]);
    const y1 = Number(root[4]);
    const [, top, , innerH] = root[5].split(",").map(Number);
    const expected = csvFinalMeans(fixtureText);
    for (const line of meanLines(svg)) {
      const [, y] = line.points[line.points.length - 1];
      const mean = y0 + ((top + innerH - y) / innerH) * (y1 - y0);
      const want = expected.get(line.policy)!;
      expect(Math.abs(mean - want)).toBeLessThanOrEqual(
        1e-9 * Math.max(1, Math.abs(want)),
      );
    }
  });

  it("draws one unsmoothed point per checkpoint and one band per policy", () => {
    const rounds = new Set(
      table.rows.filter((r) => r.policy === "ossb").map((r) => r.round),
    );
    for (const line of meanLines(svg)) {
      expect(line.points).toHaveLength(rounds.size);
    }
    const bands = [...svg.matchAll(/<path class="band" data-policy="([^"]*)"/g)]
      .map((m) => m[1]);
    expect(bands).toEqual(["ossb", "lin_thompson", "glm_ucb"]);
  });

  it("log-x keeps the final point and legend intact", () => {
    const logSvg = renderRegretPlot(table, { logX: true });
    expect(legendLabels(logSvg)).toEqual(["ossb", "lin_thompson", "glm_ucb"]);
    const expected = csvFinalMeans(fixtureText);
    for (const line of meanLines(logSvg)) {
      expect(line.finalMean).toBe(expected.get(line.policy));
    }
  });

  it("policy filter narrows curves and legend", () => {
    const one = renderRegretPlot(table, { policies: ["glm_ucb"] });
    expect(legendLabels(one)).toEqual(["glm_ucb"]);
    expect(meanLines(one)).toHaveLength(1);
    expect(one.match(/class="band"/g)).toHaveLength(1);
  });

  it("unknown policy in the filter is an error", () => {
    expect(() => renderRegretPlot(table, { policies: ["nope"] })).toThrowError(
      PlotDataError,
    );
  });
});

describe("renderRegretPlot validation", () => {
  it("needs at least two checkpoints per policy", () => {
    const table = parseAggregateCsv(
      "policy,round,mean,stderr,ci95,n\na,5,1.0,0.1,0.2,3\n",
    );
    expect(() => renderRegretPlot(table)).toThrowError(/at least 2/);
  });

  it("rejects log-x with nonpositive rounds", () => {
    const table = parseAggregateCsv(
      "policy,round,mean,stderr,ci95,n\na,0,1.0,0.1,0.2,3\na,9,2.0,0.1,0.2,3\n",
    );
    expect(() => renderRegretPlot(table, { logX: true })).toThrowError(
      /log-x/,
    );
  });

  it("single-policy CSV gives one curve and one band", () => {
    const table = parseAggregateCsv(
      "policy,round,mean,stderr,ci95,n\n" +
        "solo,1,0.5,0.1,0.2,8\nsolo,100,3.5,0.1,0.2,8\n",
    );
    const svg = renderRegretPlot(table, { title: "one policy" });
    expect(meanLines(svg)).toHaveLength(1);
    expect(svg.match(/class="band"/g)).toHaveLength(1);
    expect(svg).toContain("one policy");
  });
});
