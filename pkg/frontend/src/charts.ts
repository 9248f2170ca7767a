/** Grouped bar charts and the score histogram, rendered as plain SVG.
 * Axes are always drawn, so all-zero data still shows an intact frame. */

import { svg, svgText } from "./dom.js";

export interface Series {
  label: string;
  color: string;
  values: number[];
}

export interface ChartOptions {
  width?: number;
  height?: number;
  yLabel?: string;
}

const MARGIN = { top: 18, right: 10, bottom: 52, left: 34 };

function frame(width: number, height: number, yMax: number): SVGElement {
  const root = svg("svg", {
    viewBox: `0 0 ${width} ${height}`,
    width,
    height,
    class: "chart",
    role: "img",
  });
  const baseline = height - MARGIN.bottom;
  root.append(svg("line", {
    x1: MARGIN.left, y1: baseline, x2: width - MARGIN.right, y2: baseline,
    stroke: "#444444", class: "axis-x",
  }));
  root.append(svg("line", {
    x1: MARGIN.left, y1: MARGIN.top, x2: MARGIN.left, y2: baseline,
    stroke: "#444444", class: "axis-y",
  }));
  for (const frac of [0.5, 1]) {
    const value = yMax * frac;
    const y = baseline - (height - MARGIN.top - MARGIN.bottom) * frac;
    root.append(svgText(String(Math.round(value)), {
      x: MARGIN.left - 6, y: y + 3, "text-anchor": "end", "font-size": 9, fill: "#666666",
    }));
    root.append(svg("line", {
      x1: MARGIN.left, y1: y, x2: width - MARGIN.right, y2: y,
      stroke: "#EEEEEE", class: "gridline",
    }));
  }
  return root;
}

export function groupedBarChart(
  categories: string[],
  series: Series[],
  options: ChartOptions = {},
): SVGElement {
  const width = options.width ?? Math.max(360, categories.length * 86);
  const height = options.height ?? 220;
  const yMax = Math.max(1, ...series.flatMap((s) => s.values));
  const root = frame(width, height, yMax);
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const baseline = height - MARGIN.bottom;

  const slot = categories.length > 0 ? plotW / categories.length : plotW;
  const barW = series.length > 0 ? Math.min(26, (slot * 0.7) / series.length) : slot;

  categories.forEach((category, ci) => {
    const groupLeft = MARGIN.left + ci * slot + (slot - barW * series.length) / 2;
    series.forEach((s, si) => {
      const value = s.values[ci] ?? 0;
      const h = (value / yMax) * plotH;
      root.append(svg("rect", {
        class: "bar",
        "data-category": category,
        "data-series": s.label,
        "data-value": value,
        x: groupLeft + si * barW,
        y: baseline - h,
        width: Math.max(1, barW - 2),
        height: h,
        fill: s.color,
      }));
    });
    const cx = MARGIN.left + ci * slot + slot / 2;
    root.append(svgText(category, {
      x: cx, y: baseline + 12, "text-anchor": "end", "font-size": 9,
      transform: `rotate(-30 ${cx} ${baseline + 12})`, fill: "#333333",
    }));
  });

  series.forEach((s, si) => {
    const lx = MARGIN.left + si * 110;
    root.append(svg("rect", { x: lx, y: 4, width: 10, height: 10, fill: s.color, class: "legend-swatch" }));
    root.append(svgText(s.label, { x: lx + 14, y: 13, "font-size": 10, fill: "#333333" }));
  });
  return root;
}

export function histogramChart(
  bins: number[],
  edges: number[],
  options: ChartOptions = {},
): SVGElement {
  const width = options.width ?? 420;
  const height = options.height ?? 220;
  const yMax = Math.max(1, ...bins);
  const root = frame(width, height, yMax);
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const baseline = height - MARGIN.bottom;
  const slot = bins.length > 0 ? plotW / bins.length : plotW;

  bins.forEach((count, i) => {
    const h = (count / yMax) * plotH;
    root.append(svg("rect", {
      class: "hist-bar",
      "data-bin": i,
      "data-count": count,
      x: MARGIN.left + i * slot + 1,
      y: baseline - h,
      width: Math.max(1, slot - 2),
      height: h,
      fill: "#0072B2",
    }));
    root.append(svgText(`${edges[i]}`, {
      x: MARGIN.left + i * slot, y: baseline + 12, "font-size": 9, fill: "#333333",
    }));
  });
  root.append(svgText("100", {
    x: MARGIN.left + bins.length * slot, y: baseline + 12,
    "text-anchor": "end", "font-size": 9, fill: "#333333",
  }));
  return root;
}
