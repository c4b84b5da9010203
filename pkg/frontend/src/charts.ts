/**
 * Minimal SVG line charts for the rule-count and feature-weight traces.
 * Pure string generation: renderable in the browser, assertable in tests.
 */

import type { StructuralEvent } from "./api.js";

export interface Series {
  label: string;
  points: Array<[number, number]>;
  color: string;
}

const WIDTH = 640;
const HEIGHT = 180;
const PAD = 28;

export const EVENT_COLORS: Record<string, string> = {
  grow: "#2e7d32",
  prune: "#c62828",
  merge: "#6a1b9a",
  split: "#ef6c00",
  recall: "#1565c0",
};

function scale(
  points: Array<[number, number]>,
): { x: (v: number) => number; y: (v: number) => number; yMax: number } {
  let xMax = 1;
  let yMax = 1;
  for (const [x, y] of points) {
    xMax = Math.max(xMax, x);
    yMax = Math.max(yMax, y);
  }
  return {
    x: (v) => PAD + (v / xMax) * (WIDTH - 2 * PAD),
    y: (v) => HEIGHT - PAD - (v / yMax) * (HEIGHT - 2 * PAD),
    yMax,
  };
}

function polyline(points: Array<[number, number]>, sx: (v: number) => number,
                  sy: (v: number) => number, color: string): string {
  if (points.length === 0) return "";
  const path = points.map(([x, y]) => `${sx(x).toFixed(1)},${sy(y).toFixed(1)}`).join(" ");
  return `<polyline fill="none" stroke="${color}" stroke-width="1.5" points="${path}"/>`;
}

export function renderChart(
  series: Series[],
  markers: StructuralEvent[] = [],
  title = "",
): string {
  const all = series.flatMap((s) => s.points);
  const { x: sx, y: sy, yMax } = scale(all);
  const parts: string[] = [
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" xmlns="http://www.w3.org/2000/svg" role="img">`,
    `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="#fafafa"/>`,
    `<line x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - PAD}" y2="${HEIGHT - PAD}" stroke="#999"/>`,
    `<line x1="${PAD}" y1="${PAD}" x2="${PAD}" y2="${HEIGHT - PAD}" stroke="#999"/>`,
  ];
  if (title) {
    parts.push(`<text x="${PAD}" y="16" font-size="12" fill="#333">${title}</text>`);
  }
  parts.push(
    `<text x="6" y="${PAD}" font-size="10" fill="#666">${yMax.toFixed(yMax >= 10 ? 0 : 2)}</text>`,
  );
  for (const s of series) {
    parts.push(polyline(s.points, sx, sy, s.color));
  }
  for (const event of markers) {
    const color = EVENT_COLORS[event.type] ?? "#555";
    parts.push(
      `<circle cx="${sx(event.index).toFixed(1)}" cy="${sy(event.rules).toFixed(1)}" r="3" ` +
      `fill="${color}" data-event="${event.type}" data-index="${event.index}"/>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

export function ruleChart(trace: Array<[number, number]>,
                          events: StructuralEvent[]): string {
  return renderChart(
    [{ label: "rules", points: trace, color: "#1565c0" }],
    events.filter((e) => e.type in EVENT_COLORS),
    "fuzzy rules over the stream",
  );
}

const WEIGHT_COLORS = ["#1565c0", "#2e7d32", "#ef6c00", "#6a1b9a", "#c62828",
                       "#00838f", "#9e9d24", "#4e342e", "#283593", "#d81b60",
                       "#00695c", "#f9a825"];

export function weightChart(trace: number[][], names: string[]): string {
  const series: Series[] = names.map((name, j) => ({
    label: name,
    color: WEIGHT_COLORS[j % WEIGHT_COLORS.length],
    points: trace.map((row) => [row[0], row[j + 1]] as [number, number]),
  }));
  return renderChart(series, [], "feature weights over the stream");
}
