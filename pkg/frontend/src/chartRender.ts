/**
 * Renders a chart spec document into an inline SVG element.
 *
 * Deliberately small: one coordinate mapper plus a shape routine per chart
 * type. Invalid specs never throw out of here; the caller gets an error
 * placeholder instead so one bad card cannot take down the belt.
 */

import type { Box, ChartSpec, HistogramBin, Series } from "./protocol.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const COLORS = ["#2563eb", "#059669", "#d97706", "#dc2626", "#7c3aed", "#0d9488", "#f59e0b", "#6366f1"];

function el(name: string, attrs: Record<string, string | number> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, String(value));
  return node;
}

interface Frame {
  width: number;
  height: number;
  padLeft: number;
  padBottom: number;
  padTop: number;
  padRight: number;
}

const FRAME: Frame = { width: 320, height: 200, padLeft: 42, padBottom: 26, padTop: 10, padRight: 10 };

function plotArea(frame: Frame) {
  return {
    x0: frame.padLeft,
    y0: frame.padTop,
    w: frame.width - frame.padLeft - frame.padRight,
    h: frame.height - frame.padTop - frame.padBottom,
  };
}

function extent(values: number[]): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) [lo, hi] = [0, 1];
  if (lo === hi) [lo, hi] = [lo - 1, hi + 1];
  return [lo, hi];
}

function isInvalid(spec: Partial<ChartSpec> | null | undefined): boolean {
  return (
    !spec ||
    typeof spec.spec_id !== "string" ||
    typeof spec.title !== "string" ||
    !["line", "bar", "scatter", "histogram", "boxplot"].includes(String(spec.chart_type))
  );
}

export function renderChart(spec: ChartSpec): SVGSVGElement {
  const svg = el("svg", {
    viewBox: `0 0 ${FRAME.width} ${FRAME.height}`,
    width: "100%",
    height: "100%",
    role: "img",
  }) as SVGSVGElement;
  svg.dataset.chartType = spec.chart_type;

  if (spec.empty) {
    const note = el("text", { x: FRAME.width / 2, y: FRAME.height / 2, "text-anchor": "middle", class: "empty-note" });
    note.textContent = "no matching data";
    svg.appendChild(note);
    return svg;
  }

  switch (spec.chart_type) {
    case "line":
      drawLine(svg, spec.series);
      break;
    case "scatter":
      drawScatter(svg, spec.series);
      break;
    case "bar":
      drawBars(svg, spec.series);
      break;
    case "histogram":
      drawHistogram(svg, spec.bins);
      break;
    case "boxplot":
      drawBoxes(svg, spec.boxes);
      break;
  }
  const xLabel = el("text", { x: FRAME.width / 2, y: FRAME.height - 4, "text-anchor": "middle", class: "axis-label" });
  xLabel.textContent = spec.x_axis.label;
  svg.appendChild(xLabel);
  return svg;
}

/** Error placeholder card body for specs that do not parse as charts. */
export function renderInvalid(reason: string): HTMLElement {
  const div = document.createElement("div");
  div.className = "chart-invalid";
  const badge = document.createElement("span");
  badge.className = "badge badge-error";
  badge.textContent = "invalid spec";
  const note = document.createElement("p");
  note.textContent = reason;
  div.append(badge, note);
  return div;
}

export function renderChartSafe(spec: ChartSpec): Element {
  if (isInvalid(spec)) return renderInvalid("unrenderable chart document");
  try {
    return renderChart(spec);
  } catch (err) {
    return renderInvalid(String(err));
  }
}

function drawLine(svg: SVGSVGElement, series: Series[]): void {
  const area = plotArea(FRAME);
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  const [lo, hi] = extent(ys);
  const count = Math.max(...series.map((s) => s.points.length), 2);
  series.forEach((s, idx) => {
    const coords = s.points
      .map((p, i) => {
        const x = area.x0 + (i / (count - 1)) * area.w;
        const y = area.y0 + area.h - ((p[1] - lo) / (hi - lo)) * area.h;
        return `${x.toFixed(1)},${y.toFixed(1)}`;
      })
      .join(" ");
    svg.appendChild(
      el("polyline", { points: coords, fill: "none", stroke: COLORS[idx % COLORS.length]!, "stroke-width": 1.4 })
    );
  });
}

function drawScatter(svg: SVGSVGElement, series: Series[]): void {
  const area = plotArea(FRAME);
  const xs = series.flatMap((s) => s.points.map((p) => Number(p[0])));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  const [xlo, xhi] = extent(xs);
  const [ylo, yhi] = extent(ys);
  series.forEach((s, idx) => {
    for (const [xr, yr] of s.points) {
      svg.appendChild(
        el("circle", {
          cx: area.x0 + ((Number(xr) - xlo) / (xhi - xlo)) * area.w,
          cy: area.y0 + area.h - ((yr - ylo) / (yhi - ylo)) * area.h,
          r: 2,
          fill: COLORS[idx % COLORS.length]!,
          "fill-opacity": 0.6,
        })
      );
    }
  });
}

function drawBars(svg: SVGSVGElement, series: Series[]): void {
  const area = plotArea(FRAME);
  const points = series[0]?.points ?? [];
  const [lo, hi] = extent([0, ...points.map((p) => p[1])]);
  const band = area.w / Math.max(points.length, 1);
  points.forEach((p, i) => {
    const height = ((p[1] - lo) / (hi - lo)) * area.h;
    svg.appendChild(
      el("rect", {
        x: area.x0 + i * band + band * 0.12,
        y: area.y0 + area.h - height,
        width: band * 0.76,
        height,
        fill: COLORS[0]!,
        "data-key": String(p[0]),
      })
    );
  });
}

function drawHistogram(svg: SVGSVGElement, bins: HistogramBin[]): void {
  const area = plotArea(FRAME);
  const [, hi] = extent([0, ...bins.map((b) => b.count)]);
  const band = area.w / Math.max(bins.length, 1);
  bins.forEach((bin, i) => {
    const height = (bin.count / hi) * area.h;
    svg.appendChild(
      el("rect", {
        x: area.x0 + i * band,
        y: area.y0 + area.h - height,
        width: Math.max(band - 1, 1),
        height,
        fill: COLORS[1]!,
      })
    );
  });
}

function drawBoxes(svg: SVGSVGElement, boxes: Box[]): void {
  const area = plotArea(FRAME);
  const [lo, hi] = extent(boxes.flatMap((b) => [b.min, b.max]));
  const scale = (v: number) => area.y0 + area.h - ((v - lo) / (hi - lo)) * area.h;
  const band = area.w / Math.max(boxes.length, 1);
  boxes.forEach((box, i) => {
    const cx = area.x0 + i * band + band / 2;
    const half = band * 0.3;
    svg.appendChild(el("line", { x1: cx, x2: cx, y1: scale(box.min), y2: scale(box.max), stroke: "#475569" }));
    svg.appendChild(
      el("rect", {
        x: cx - half,
        y: scale(box.q3),
        width: half * 2,
        height: Math.max(scale(box.q1) - scale(box.q3), 1),
        fill: "#bfdbfe",
        stroke: "#2563eb",
        "data-group": box.name,
      })
    );
    svg.appendChild(
      el("line", { x1: cx - half, x2: cx + half, y1: scale(box.median), y2: scale(box.median), stroke: "#1d4ed8", "stroke-width": 1.5 })
    );
  });
}
