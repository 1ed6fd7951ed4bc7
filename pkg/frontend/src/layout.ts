/**
 * Deterministic force layout for the trace graph, reading left to right:
 * seeds pinned at the left edge, terminal services pinned at the right,
 * interiors settle by depth with spring/repulsion passes. Nodes that
 * already have a position keep it; only newcomers are simulated, so an
 * expansion never re-layouts the existing picture.
 */

import type { GraphEdge, GraphNode } from "./types.js";

export interface Point {
  x: number;
  y: number;
  pinned: boolean;
}

export type Layout = Map<string, Point>;

/** Derive a stable pseudo-random unit float from an address string. */
function addressNoise(address: string, salt: number): number {
  let h = 2166136261 ^ salt;
  for (let i = 0; i < address.length; i++) {
    h = Math.imul(h ^ address.charCodeAt(i), 16777619);
  }
  return ((h >>> 0) % 10_000) / 10_000;
}

export function layoutGraph(
  nodes: GraphNode[],
  edges: GraphEdge[],
  previous: Layout,
  width = 960,
  height = 600,
): Layout {
  const margin = 70;
  const result: Layout = new Map();
  for (const [address, point] of previous) {
    result.set(address, { ...point, pinned: true });
  }

  const maxDepth = Math.max(1, ...nodes.map((n) => n.depth));
  const fresh: GraphNode[] = [];
  for (const node of nodes) {
    if (result.has(node.address)) continue;
    const noiseY = addressNoise(node.address, 7);
    let x: number;
    if (node.seed) {
      x = margin;
    } else if (node.terminal) {
      x = width - margin;
    } else {
      x = margin + ((width - 2 * margin) * node.depth) / (maxDepth + 1);
    }
    result.set(node.address, {
      x,
      y: margin + (height - 2 * margin) * noiseY,
      pinned: node.seed || node.terminal,
    });
    fresh.push(node);
  }

  if (fresh.length === 0) return result;

  const freshSet = new Set(fresh.map((n) => n.address));
  const neighbours = new Map<string, string[]>();
  for (const edge of edges) {
    if (!result.has(edge.from) || !result.has(edge.to)) continue;
    (neighbours.get(edge.from) ?? neighbours.set(edge.from, []).get(edge.from)!).push(edge.to);
    (neighbours.get(edge.to) ?? neighbours.set(edge.to, []).get(edge.to)!).push(edge.from);
  }

  // relax only the fresh, unpinned nodes
  for (let iteration = 0; iteration < 60; iteration++) {
    for (const node of fresh) {
      const point = result.get(node.address)!;
      if (point.pinned) continue;
      let fx = 0;
      let fy = 0;
      // springs toward neighbours
      for (const other of neighbours.get(node.address) ?? []) {
        const peer = result.get(other)!;
        fx += (peer.x - point.x) * 0.04;
        fy += (peer.y - point.y) * 0.04;
      }
      // repulsion from everyone nearby
      for (const [address, peer] of result) {
        if (address === node.address) continue;
        const dx = point.x - peer.x;
        const dy = point.y - peer.y;
        const sq = Math.max(400, dx * dx + dy * dy);
        if (sq < 90_000) {
          fx += (dx / sq) * 2200;
          fy += (dy / sq) * 2200;
        }
      }
      // gentle anchor to the depth column
      const anchorX =
        margin + ((width - 2 * margin) * node.depth) / (maxDepth + 1);
      fx += (anchorX - point.x) * 0.02;
      point.x = Math.min(width - margin, Math.max(margin, point.x + fx));
      point.y = Math.min(height - margin, Math.max(margin, point.y + fy));
    }
  }
  // freshly placed nodes become part of the stable picture
  for (const address of freshSet) {
    result.get(address)!.pinned = true;
  }
  return result;
}

/** Node fill colour by what the server says the node is. */
export function nodeColor(node: GraphNode): string {
  if (node.seed) return "#e4572e"; // seed: hot orange
  switch (node.tag_category) {
    case "exchange":
      return "#2e86ab"; // exchanges: blue
    case "mixer":
      return "#5d3a9b"; // mixers: purple
    case "bridge":
      return "#0f8b8d"; // bridges: teal
    case "gambling":
      return "#c84b8c"; // gambling: magenta
    case "blocklist":
      return "#8c2f39";
    default:
      break;
  }
  if (node.burner) return "#6b7280"; // burners: grey
  return "#d9a21b"; // untagged flow: amber
}

export function edgeWidth(valueWei: string): number {
  const digits = valueWei.replace("-", "").length;
  // log-ish scale: dust 1px, whale flows up to 7px
  return Math.max(1, Math.min(7, digits - 16));
}
