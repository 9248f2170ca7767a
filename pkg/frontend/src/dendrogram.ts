/** Client-side dendrogram: drawn from the merge-tree wire form so subtree
 * clicks can drive cluster selection. Heights run up the vertical axis;
 * leaves sit on the baseline labeled by student name. Edges fully inside one
 * flat cluster take that cluster's color; edges above the cut stay neutral.
 */

import { clear, svg, svgText } from "./dom.js";
import { clusterColor, NEUTRAL_EDGE } from "./palette.js";
import { isLeaf } from "./types.js";
import type { AssignmentWire, DendrogramWire, TreeNodeWire } from "./types.js";

export interface DendrogramView {
  width?: number;
  height?: number;
  assignment?: AssignmentWire;
  selected?: number | null;
  onSelect?: (cluster: number) => void;
}

interface Placed {
  x: number;
  y: number;
  node: TreeNodeWire;
  leafIds: number[];
  cluster: number | null; // uniform flat cluster of the subtree, if any
}

const MARGIN = { top: 16, right: 12, bottom: 78, left: 36 };

function maxHeight(node: TreeNodeWire): number {
  if (isLeaf(node)) return 0;
  return Math.max(node.height, ...node.children.map(maxHeight));
}

export function renderDendrogram(wire: DendrogramWire, view: DendrogramView = {}): SVGElement {
  const width = view.width ?? Math.max(420, wire.n * 34);
  const height = view.height ?? 320;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const baseline = MARGIN.top + plotH;

  const root = svg("svg", {
    class: "dendrogram",
    viewBox: `0 0 ${width} ${height}`,
    width,
    height,
    role: "img",
  });

  const topHeight = maxHeight(wire.tree);
  const yOf = (h: number) => (topHeight <= 0 ? baseline : baseline - (h / topHeight) * plotH);

  const memberOf = view.assignment?.member_of ?? [];
  const clusterOfLeaf = (id: number): number | null =>
    id < memberOf.length ? memberOf[id] : null;

  // assign x positions to leaves in tree order
  let nextLeafSlot = 0;
  const step = wire.n > 0 ? plotW / wire.n : plotW;

  const place = (node: TreeNodeWire): Placed => {
    if (isLeaf(node)) {
      const x = MARGIN.left + (nextLeafSlot + 0.5) * step;
      nextLeafSlot += 1;
      const cluster = clusterOfLeaf(node.id);
      return { x, y: baseline, node, leafIds: [node.id], cluster };
    }
    const children = node.children.map(place);
    const y = yOf(node.height);
    const x = (children[0].x + children[children.length - 1].x) / 2;
    const leafIds = children.flatMap((c) => c.leafIds);
    const clusters = new Set(children.map((c) => c.cluster));
    const cluster = clusters.size === 1 ? children[0].cluster : null;

    const stroke = cluster !== null ? clusterColor(cluster) : NEUTRAL_EDGE;
    const selected = view.selected !== null && view.selected !== undefined && cluster === view.selected;
    const group = svg("g", {
      class: `dendro-joint${selected ? " dendro-selected" : ""}`,
      "data-height": node.height,
    });
    if (cluster !== null) group.setAttribute("data-cluster", String(cluster));
    const strokeWidth = selected ? 3 : 1.5;
    // elbow: horizontal bar at the merge height, verticals down to children
    group.append(
      svg("line", {
        x1: children[0].x, y1: y, x2: children[children.length - 1].x, y2: y,
        stroke, "stroke-width": strokeWidth,
      }),
    );
    for (const child of children) {
      group.append(
        svg("line", {
          x1: child.x, y1: y, x2: child.x, y2: child.y,
          stroke: child.cluster !== null ? clusterColor(child.cluster) : stroke,
          "stroke-width": strokeWidth,
        }),
      );
    }
    // generous invisible hit area so subtrees are clickable
    const hit = svg("rect", {
      class: "dendro-hit",
      x: children[0].x, y: y - 6,
      width: Math.max(children[children.length - 1].x - children[0].x, 12), height: 12,
      fill: "transparent",
    });
    group.append(hit);
    if (view.onSelect) {
      const target = cluster ?? clusterOfLeaf(Math.min(...leafIds));
      if (target !== null) {
        group.addEventListener("click", () => view.onSelect!(target));
        (group as SVGElement & { style: CSSStyleDeclaration }).style.cursor = "pointer";
      }
    }
    root.append(group);
    return { x, y, node, leafIds, cluster };
  };

  place(wire.tree);

  // leaf labels, colored by their flat cluster
  nextLeafSlot = 0;
  const labelLeaves = (node: TreeNodeWire): void => {
    if (isLeaf(node)) {
      const x = MARGIN.left + (nextLeafSlot + 0.5) * step;
      nextLeafSlot += 1;
      const cluster = clusterOfLeaf(node.id);
      const label = svgText(node.label, {
        class: "dendro-leaf",
        x,
        y: baseline + 10,
        "data-leaf-id": node.id,
        "text-anchor": "end",
        transform: `rotate(-55 ${x} ${baseline + 10})`,
        fill: cluster !== null ? clusterColor(cluster) : "#333333",
        "font-size": 10,
      });
      if (cluster !== null) {
        label.setAttribute("data-cluster", String(cluster));
        if (view.onSelect) {
          label.addEventListener("click", () => view.onSelect!(cluster));
          (label as SVGElement & { style: CSSStyleDeclaration }).style.cursor = "pointer";
        }
      }
      root.append(label);
      return;
    }
    node.children.forEach(labelLeaves);
  };
  labelLeaves(wire.tree);

  // vertical axis: top height and midpoint ticks
  const axis = svg("g", { class: "dendro-axis" });
  axis.append(svg("line", {
    x1: MARGIN.left - 8, y1: MARGIN.top, x2: MARGIN.left - 8, y2: baseline,
    stroke: "#999999", "stroke-width": 1,
  }));
  for (const frac of [0, 0.5, 1]) {
    const h = topHeight * frac;
    axis.append(svgText(h.toFixed(2), {
      x: MARGIN.left - 12, y: yOf(h) + 3, "text-anchor": "end", "font-size": 9, fill: "#666666",
    }));
  }
  root.append(axis);
  return root;
}

export function mountDendrogram(container: Element, wire: DendrogramWire, view: DendrogramView = {}): void {
  clear(container);
  container.append(renderDendrogram(wire, view));
}
