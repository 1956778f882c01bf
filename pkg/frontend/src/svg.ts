import { AggregateRow, AggregateTable, seriesFor } from "./csv";

export interface RenderOptions {
  policies?: string[] | null;
  logX?: boolean;
  title?: string | null;
}

export class PlotDataError extends Error {}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 40, right: 24, bottom: 52, left: 72 };

const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
];

function niceTicks(lo: number, hi: number, count: number): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const rawStep = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    if (mag * mult >= rawStep) {
      step = mag * mult;
      break;
    }
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (
    let e = Math.ceil(Math.log10(lo) - 1e-9);
    e <= Math.floor(Math.log10(hi) + 1e-9);
    e++
  ) {
    ticks.push(Math.pow(10, e));
  }
  if (ticks.length < 2) return [lo, hi];
  return ticks;
}

function formatTick(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e5 || Math.abs(v) < 1e-3)) {
    return v.toExponential(0).replace("+", "");
  }
  return String(Number(v.toPrecision(6)));
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderRegretPlot(
  table: AggregateTable,
  options: RenderOptions = {},
): string {
  const shown = options.policies?.length ? options.policies : table.policies;
  for (const policy of shown) {
    if (!table.policies.includes(policy)) {
      throw new PlotDataError(`policy "${policy}" is not in the CSV`);
    }
  }
  const logX = options.logX ?? false;

  const series = new Map<string, AggregateRow[]>();
  for (const policy of shown) {
    const rows = seriesFor(table, policy);
    if (rows.length < 2) {
      throw new PlotDataError(
        `policy "${policy}" has ${rows.length} checkpoint(s), need at least 2`,
      );
    }
    if (logX && rows.some((r) => r.round <= 0)) {
      throw new PlotDataError(
        `policy "${policy}" has a round <= 0; log-x needs positive rounds`,
      );
    }
    series.set(policy, rows);
  }

  const allRows = shown.flatMap((p) => series.get(p)!);
  const x0 = Math.min(...allRows.map((r) => r.round));
  const x1 = Math.max(...allRows.map((r) => r.round));
  const y0 = Math.min(0, ...allRows.map((r) => r.mean - r.ci95));
  const y1 = Math.max(...allRows.map((r) => r.mean + r.ci95)) * 1.05 || 1;
  if (x1 <= x0) {
    throw new PlotDataError("all rounds are identical; nothing to plot");
  }

  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const tx = (r: number) => (logX ? Math.log10(r) : r);
  const sx = (r: number) =>
    MARGIN.left + ((tx(r) - tx(x0)) / (tx(x1) - tx(x0))) * innerW;
  const sy = (v: number) =>
    MARGIN.top + innerH - ((v - y0) / (y1 - y0)) * innerH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${WIDTH} ${HEIGHT}"` +
      ` width="${WIDTH}" height="${HEIGHT}" font-family="sans-serif"` +
      ` data-x0="${x0}" data-x1="${x1}" data-y0="${y0}" data-y1="${y1}"` +
      ` data-log-x="${logX}"` +
      ` data-area="${MARGIN.left},${MARGIN.top},${innerW},${innerH}">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  const xTicks = logX ? logTicks(x0, x1) : niceTicks(x0, x1, 6);
  const yTicks = niceTicks(y0, y1, 6);
  const axisColor = "#333";
  for (const t of xTicks) {
    if (t < x0 - 1e-9 || t > x1 + 1e-9) continue;
    const x = sx(t);
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}"` +
        ` y2="${MARGIN.top + innerH}" stroke="#ddd"/>`,
    );
    parts.push(
      `<text x="${x}" y="${MARGIN.top + innerH + 18}" text-anchor="middle"` +
        ` font-size="12" fill="${axisColor}">${formatTick(t)}</text>`,
    );
  }
  for (const t of yTicks) {
    const y = sy(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + innerW}"` +
        ` y2="${y}" stroke="#ddd"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${y + 4}" text-anchor="end"` +
        ` font-size="12" fill="${axisColor}">${formatTick(t)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${innerW}"` +
      ` height="${innerH}" fill="none" stroke="${axisColor}"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${HEIGHT - 12}"` +
      ` text-anchor="middle" font-size="13" fill="${axisColor}">round</text>`,
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + innerH / 2}" text-anchor="middle"` +
      ` font-size="13" fill="${axisColor}"` +
      ` transform="rotate(-90 18 ${MARGIN.top + innerH / 2})">` +
      `mean cumulative regret</text>`,
  );
  if (options.title) {
    parts.push(
      `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="15"` +
        ` fill="${axisColor}">${escapeXml(options.title)}</text>`,
    );
  }

  shown.forEach((policy, idx) => {
    const rows = series.get(policy)!;
    const color = PALETTE[idx % PALETTE.length];
    const upper = rows.map((r) => `${sx(r.round)},${sy(r.mean + r.ci95)}`);
    const lower = rows
      .slice()
      .reverse()
      .map((r) => `${sx(r.round)},${sy(r.mean - r.ci95)}`);
    parts.push(
      `<path class="band" data-policy="${escapeXml(policy)}"` +
        ` d="M ${upper.join(" L ")} L ${lower.join(" L ")} Z"` +
        ` fill="${color}" opacity="0.18" stroke="none"/>`,
    );
    const points = rows.map((r) => `${sx(r.round)},${sy(r.mean)}`).join(" ");
    const last = rows[rows.length - 1];
    parts.push(
      `<polyline class="mean" data-policy="${escapeXml(policy)}"` +
        ` data-final-round="${last.round}" data-final-mean="${last.mean}"` +
        ` points="${points}" fill="none" stroke="${color}"` +
        ` stroke-width="1.8"/>`,
    );
  });

  const legendX = MARGIN.left + 12;
  let legendY = MARGIN.top + 14;
  parts.push(`<g class="legend">`);
  shown.forEach((policy, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    parts.push(
      `<rect x="${legendX}" y="${legendY - 9}" width="14" height="10"` +
        ` fill="${color}"/>`,
    );
    parts.push(
      `<text class="legend-label" x="${legendX + 20}" y="${legendY}"` +
        ` font-size="12" fill="${axisColor}">${escapeXml(policy)}</text>`,
    );
    legendY += 18;
  });
  parts.push(`</g>`);
  parts.push(`</svg>`);
  return parts.join("\n");
}
