import { describe, expect, it } from "vitest";

import { edgeWidth, layoutGraph, nodeColor } from "../src/layout.js";
import { A, B, C, D, edge, node } from "./helpers.js";

describe("layoutGraph", () => {
  it("pins seeds to the left and terminals to the right", () => {
    const layout = layoutGraph(
      [node(A, { seed: true, depth: 0 }), node(B, { depth: 2 }),
       node(C, { terminal: true, tag_category: "exchange", depth: 3 })],
      [edge(A, B), edge(B, C)],
      new Map(),
    );
    expect(layout.get(A)!.x).toBeLessThan(layout.get(B)!.x);
    expect(layout.get(B)!.x).toBeLessThan(layout.get(C)!.x);
    expect(layout.get(A)!.x).toBe(70);
    expect(layout.get(C)!.x).toBe(960 - 70);
  });

  it("keeps existing node positions when new nodes arrive", () => {
    const first = layoutGraph(
      [node(A, { seed: true, depth: 0 }), node(B, { depth: 1 })],
      [edge(A, B)],
      new Map(),
    );
    const before = { ...first.get(B)! };
    const second = layoutGraph(
      [node(A, { seed: true, depth: 0 }), node(B, { depth: 1 }),
       node(C, { depth: 2 }), node(D, { depth: 2 })],
      [edge(A, B), edge(B, C), edge(B, D)],
      first,
    );
    expect(second.get(B)!.x).toBe(before.x);
    expect(second.get(B)!.y).toBe(before.y);
    expect(second.has(C)).toBe(true);
    expect(second.has(D)).toBe(true);
  });

  it("is deterministic for the same input", () => {
    const inputs = () => [
      [node(A, { seed: true, depth: 0 }), node(B, { depth: 1 }), node(C, { depth: 2 })],
      [edge(A, B), edge(B, C)],
    ] as const;
    const one = layoutGraph(...inputs(), new Map());
    const two = layoutGraph(...inputs(), new Map());
    for (const key of [A, B, C]) {
      expect(one.get(key)).toEqual(two.get(key));
    }
  });
});

describe("visual encoding", () => {
  it("colors nodes by role and tag category", () => {
    expect(nodeColor(node(A, { seed: true }))).toBe("#e4572e");
    expect(nodeColor(node(A, { burner: true }))).toBe("#6b7280");
    expect(nodeColor(node(A, { tag_category: "exchange" }))).toBe("#2e86ab");
    expect(nodeColor(node(A, { tag_category: "mixer" }))).toBe("#5d3a9b");
    expect(nodeColor(node(A, { tag_category: "bridge" }))).toBe("#0f8b8d");
    expect(nodeColor(node(A, { tag_category: "gambling" }))).toBe("#c84b8c");
    expect(nodeColor(node(A))).toBe("#d9a21b");
    // every category is visually distinct
    const palette = new Set([
      nodeColor(node(A, { seed: true })),
      nodeColor(node(A, { burner: true })),
      nodeColor(node(A, { tag_category: "exchange" })),
      nodeColor(node(A, { tag_category: "mixer" })),
      nodeColor(node(A, { tag_category: "bridge" })),
      nodeColor(node(A, { tag_category: "gambling" })),
      nodeColor(node(A)),
    ]);
    expect(palette.size).toBe(7);
  });

  it("weights edges by value", () => {
    expect(edgeWidth("1000000000000000")).toBe(1); // dust
    expect(edgeWidth("2000000000000000000")).toBeGreaterThan(1); // 2 ETH
    expect(edgeWidth("90000000000000000000000")).toBe(7); // whale, capped
  });
});
