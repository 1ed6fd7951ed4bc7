import type { GraphEdge, GraphNode } from "../src/types.js";

export function node(address: string, extra: Partial<GraphNode> = {}): GraphNode {
  return {
    address,
    depth: 1,
    seed: false,
    terminal: false,
    expanded: false,
    expandable: true,
    data_missing: false,
    tag_category: null,
    tag_label: null,
    roles: [],
    burner: false,
    tx_count: 2,
    first_seen: null,
    last_seen: null,
    total_in_wei: "0",
    total_out_wei: "0",
    ...extra,
  };
}

export function edge(from: string, to: string, valueWei = "2000000000000000000"): GraphEdge {
  return {
    from,
    to,
    value_wei: valueWei,
    value_eth: "2",
    tx_count: 1,
    first_time: null,
    last_time: null,
    citations: [],
  };
}

export const A = "0x" + "a1".repeat(20);
export const B = "0x" + "b2".repeat(20);
export const C = "0x" + "c3".repeat(20);
export const D = "0x" + "d4".repeat(20);
