// Hand-rolled SVG renderer for the four chart-spec marks: bar, point, tick,
// and histogram. Pure string output so it can run (and be tested) without a
// DOM; the view layer injects the strings with innerHTML.

import type { ChartSpec, DataRow, Highlight } from './types.js';

export interface ChartOptions {
  width?: number;
  height?: number;
  // mini charts (tree hover previews) drop the title, axis labels, and ticks
  mini?: boolean;
}

const BASE_COLOR = '#4e79a7';
const ACCENT_COLOR = '#e15759';
const BAND_COLOR = '#f6c85f';
const AXIS_COLOR = '#6b7280';
const GRID_COLOR = '#e5e7eb';

export function esc(s: string): string {
  return s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function fmt(v: number): string {
  if (!Number.isFinite(v)) return String(v);
  const r = Math.abs(v) >= 100 ? Math.round(v) : Math.round(v * 100) / 100;
  return String(r);
}

// ── Scales ────────────────────────────────────────────────────────────────

interface Linear {
  (v: number): number;
  domain: [number, number];
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Linear {
  const span = d1 - d0 || 1;
  const scale = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Linear;
  scale.domain = [d0, d1];
  return scale;
}

/** Round tick positions covering [lo, hi]; classic nice-number stepping. */
export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (lo === hi) return [lo];
  const rawStep = (hi - lo) / Math.max(1, count);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const norm = rawStep / mag;
  const step = (norm >= 7 ? 10 : norm >= 3 ? 5 : norm >= 1.5 ? 2 : 1) * mag;
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return out;
}

function pad(lo: number, hi: number): [number, number] {
  if (lo === hi) return [lo - 1, hi + 1];
  const p = (hi - lo) * 0.05;
  return [lo - p, hi + p];
}

// ── Geometry shared by all marks ─────────────────────────────────────────

interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
  mini: boolean;
  parts: string[];
}

function makeFrame(spec: ChartSpec, opts: ChartOptions): Frame {
  const mini = opts.mini === true;
  const width = opts.width ?? (mini ? 190 : 460);
  const height = opts.height ?? (mini ? 120 : 280);
  const frame: Frame = {
    width,
    height,
    left: mini ? 8 : 52,
    right: width - (mini ? 8 : 14),
    top: mini ? 8 : 34,
    bottom: height - (mini ? 8 : 36),
    mini,
    parts: [],
  };
  if (!mini && spec.title) {
    frame.parts.push(
      `<text class="chart-title" x="${width / 2}" y="18" text-anchor="middle">${esc(spec.title)}</text>`,
    );
  }
  return frame;
}

function closeFrame(f: Frame): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${f.width} ${f.height}"` +
    ` width="${f.width}" height="${f.height}" class="chart${f.mini ? ' chart-mini' : ''}">` +
    f.parts.join('') +
    `</svg>`
  );
}

function emptyChart(spec: ChartSpec, opts: ChartOptions): string {
  const f = makeFrame(spec, opts);
  f.parts.push(
    `<text class="chart-empty" x="${f.width / 2}" y="${f.height / 2}" text-anchor="middle">no data</text>`,
  );
  return closeFrame(f);
}

function xAxis(f: Frame, scale: Linear): void {
  f.parts.push(
    `<line class="axis" x1="${f.left}" y1="${f.bottom}" x2="${f.right}" y2="${f.bottom}" stroke="${AXIS_COLOR}"/>`,
  );
  if (f.mini) return;
  for (const t of niceTicks(scale.domain[0], scale.domain[1])) {
    const x = scale(t);
    f.parts.push(
      `<line class="axis-tick" x1="${x}" y1="${f.bottom}" x2="${x}" y2="${f.bottom + 4}" stroke="${AXIS_COLOR}"/>`,
      `<text class="axis-label" x="${x}" y="${f.bottom + 16}" text-anchor="middle">${fmt(t)}</text>`,
    );
  }
}

function yAxis(f: Frame, scale: Linear): void {
  f.parts.push(
    `<line class="axis" x1="${f.left}" y1="${f.top}" x2="${f.left}" y2="${f.bottom}" stroke="${AXIS_COLOR}"/>`,
  );
  if (f.mini) return;
  for (const t of niceTicks(scale.domain[0], scale.domain[1])) {
    const y = scale(t);
    f.parts.push(
      `<line class="grid" x1="${f.left}" y1="${y}" x2="${f.right}" y2="${y}" stroke="${GRID_COLOR}"/>`,
      `<text class="axis-label" x="${f.left - 6}" y="${y + 3}" text-anchor="end">${fmt(t)}</text>`,
    );
  }
}

function rangeOf(highlight: Highlight | null, op: string): [number, number] | null {
  if (!highlight || highlight.op !== op || !Array.isArray(highlight.value)) return null;
  return highlight.value;
}

// ── Marks ─────────────────────────────────────────────────────────────────

function renderBars(spec: ChartSpec, rows: DataRow[], opts: ChartOptions): string {
  const f = makeFrame(spec, opts);
  const ys = rows.map((r) => r.y ?? 0);
  const y = linearScale(Math.min(0, ...ys), Math.max(0, ...ys), f.bottom, f.top);
  yAxis(f, y);
  f.parts.push(
    `<line class="axis" x1="${f.left}" y1="${f.bottom}" x2="${f.right}" y2="${f.bottom}" stroke="${AXIS_COLOR}"/>`,
  );

  const slot = (f.right - f.left) / rows.length;
  const barWidth = Math.max(1, slot * 0.72);
  const winner = spec.highlight && spec.highlight.op === 'eq' ? String(spec.highlight.value) : null;
  const labelEvery = Math.ceil(rows.length / 14);

  rows.forEach((row, i) => {
    const label = String(row.x ?? '');
    const value = row.y ?? 0;
    const xPos = f.left + slot * i + (slot - barWidth) / 2;
    const y0 = y(Math.max(0, value));
    const h = Math.abs(y(value) - y(0));
    const hit = winner !== null && label === winner;
    f.parts.push(
      `<rect class="bar${hit ? ' highlight' : ''}" data-x="${esc(label)}"` +
        ` x="${xPos.toFixed(2)}" y="${y0.toFixed(2)}" width="${barWidth.toFixed(2)}"` +
        ` height="${h.toFixed(2)}" fill="${hit ? ACCENT_COLOR : BASE_COLOR}"/>`,
    );
    if (!f.mini && i % labelEvery === 0) {
      const text = label.length > 11 ? label.slice(0, 10) + '…' : label;
      f.parts.push(
        `<text class="axis-label" x="${xPos + barWidth / 2}" y="${f.bottom + 16}" text-anchor="middle">${esc(text)}</text>`,
      );
    }
  });
  return closeFrame(f);
}

function renderPoints(spec: ChartSpec, rows: DataRow[], opts: ChartOptions): string {
  const f = makeFrame(spec, opts);
  const xs = rows.map((r) => Number(r.x));
  const ys = rows.map((r) => r.y ?? 0);
  const [x0, x1] = pad(Math.min(...xs), Math.max(...xs));
  const [y0, y1] = pad(Math.min(...ys), Math.max(...ys));
  const x = linearScale(x0, x1, f.left, f.right);
  const y = linearScale(y0, y1, f.bottom, f.top);
  yAxis(f, y);
  xAxis(f, x);
  const r = f.mini ? 1.4 : 2.6;
  for (const row of rows) {
    f.parts.push(
      `<circle class="point" cx="${x(Number(row.x)).toFixed(2)}" cy="${y(row.y ?? 0).toFixed(2)}"` +
        ` r="${r}" fill="${BASE_COLOR}" fill-opacity="0.55"/>`,
    );
  }
  return closeFrame(f);
}

function renderTicks(spec: ChartSpec, rows: DataRow[], opts: ChartOptions): string {
  const f = makeFrame(spec, opts);
  const values = rows.map((r) => Number(r.x));
  const fences = rangeOf(spec.highlight, 'outside-range');
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (fences) {
    lo = Math.min(lo, fences[0]);
    hi = Math.max(hi, fences[1]);
  }
  const [d0, d1] = pad(lo, hi);
  const x = linearScale(d0, d1, f.left, f.right);
  xAxis(f, x);

  const yTop = f.top + (f.bottom - f.top) * 0.3;
  const yBot = f.top + (f.bottom - f.top) * 0.7;
  if (fences) {
    for (const fence of fences) {
      f.parts.push(
        `<line class="fence" x1="${x(fence).toFixed(2)}" y1="${f.top}" x2="${x(fence).toFixed(2)}"` +
          ` y2="${f.bottom}" stroke="${AXIS_COLOR}" stroke-dasharray="4 3"/>`,
      );
    }
  }
  for (const v of values) {
    const outlier = fences !== null && (v < fences[0] || v > fences[1]);
    f.parts.push(
      `<line class="tick${outlier ? ' highlight' : ''}" x1="${x(v).toFixed(2)}" y1="${yTop.toFixed(2)}"` +
        ` x2="${x(v).toFixed(2)}" y2="${yBot.toFixed(2)}"` +
        ` stroke="${outlier ? ACCENT_COLOR : BASE_COLOR}" stroke-opacity="0.75"/>`,
    );
  }
  return closeFrame(f);
}

function renderHistogram(spec: ChartSpec, rows: DataRow[], opts: ChartOptions): string {
  const f = makeFrame(spec, opts);
  const degenerate = rows.every((r) => r.x0 === r.x1);
  const first = rows[0] as DataRow;
  const last = rows[rows.length - 1] as DataRow;
  let d0 = first.x0 ?? 0;
  let d1 = last.x1 ?? 0;
  if (degenerate) [d0, d1] = pad(d0, d1);
  const band = rangeOf(spec.highlight, 'inside-range');
  const x = linearScale(d0, d1, f.left, f.right);
  const counts = rows.map((r) => r.y ?? 0);
  const y = linearScale(0, Math.max(...counts), f.bottom, f.top);
  yAxis(f, y);

  if (band) {
    const bx0 = x(band[0]);
    const bx1 = x(band[1]);
    f.parts.push(
      band[0] === band[1]
        ? `<line class="band" x1="${bx0.toFixed(2)}" y1="${f.top}" x2="${bx0.toFixed(2)}" y2="${f.bottom}" stroke="${BAND_COLOR}" stroke-width="3"/>`
        : `<rect class="band" x="${bx0.toFixed(2)}" y="${f.top}" width="${(bx1 - bx0).toFixed(2)}"` +
            ` height="${f.bottom - f.top}" fill="${BAND_COLOR}" fill-opacity="0.35"/>`,
    );
  }
  rows.forEach((row) => {
    const x0 = row.x0 ?? 0;
    const x1 = row.x1 ?? 0;
    const left = degenerate ? x(x0) - 12 : x(x0);
    const width = degenerate ? 24 : Math.max(0.5, x(x1) - x(x0) - 0.5);
    const inBand = band !== null && x0 >= band[0] - 1e-9 && (degenerate ? x0 : x1) <= band[1] + 1e-9;
    f.parts.push(
      `<rect class="bin${inBand ? ' highlight' : ''}" x="${left.toFixed(2)}" y="${y(row.y ?? 0).toFixed(2)}"` +
        ` width="${width.toFixed(2)}" height="${(f.bottom - y(row.y ?? 0)).toFixed(2)}"` +
        ` fill="${inBand ? ACCENT_COLOR : BASE_COLOR}"/>`,
    );
  });
  xAxis(f, x);
  return closeFrame(f);
}

// ── Entry point ───────────────────────────────────────────────────────────

export function renderChart(spec: ChartSpec, rows: DataRow[], opts: ChartOptions = {}): string {
  if (rows.length === 0) return emptyChart(spec, opts);
  switch (spec.mark) {
    case 'bar':
      return renderBars(spec, rows, opts);
    case 'point':
      return renderPoints(spec, rows, opts);
    case 'tick':
      return renderTicks(spec, rows, opts);
    case 'histogram':
      return renderHistogram(spec, rows, opts);
    default:
      return emptyChart(spec, opts);
  }
}
