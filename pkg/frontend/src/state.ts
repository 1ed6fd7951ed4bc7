/**
 * View state for one investigation: the graph snapshot, the revision
 * cursor, in-flight expansions (for debouncing), and reconciliation of
 * optimistic deltas against the server revision.
 */

import type { ExpandResponse, GraphEdge, GraphNode, GraphPayload } from "./types.js";

export type Reconciliation = "merged" | "noop" | "refetch";

export class ViewState {
  investigationId: string | null = null;
  revision = -1;
  nodes = new Map<string, GraphNode>();
  edges = new Map<string, GraphEdge>();
  annotations: Record<string, { category: string; label: string }> = {};
  selected: string | null = null;
  pending = new Set<string>();

  static edgeKey(from: string, to: string): string {
    return `${from}->${to}`;
  }

  /** Replace the snapshot wholesale (initial load or post-conflict refetch). */
  applyGraph(payload: GraphPayload): void {
    this.revision = payload.revision;
    this.nodes = new Map(payload.nodes.map((n) => [n.address, n]));
    this.edges = new Map(
      payload.edges.map((e) => [ViewState.edgeKey(e.from, e.to), e]),
    );
    this.annotations = payload.annotations ?? {};
  }

  /**
   * True if a click on this node should fire a request. A node with a
   * request already in flight, or one the server will refuse, never
   * produces a second call: that is the debounce.
   */
  canExpand(address: string): boolean {
    const node = this.nodes.get(address);
    if (!node) return false;
    if (this.pending.has(address)) return false;
    return !node.terminal && !node.expanded && !node.data_missing;
  }

  beginExpand(address: string): boolean {
    if (!this.canExpand(address)) return false;
    this.pending.add(address);
    return true;
  }

  /**
   * Merge an expansion result. If the server is exactly one revision
   * ahead (or the call was a no-op at our revision), the delta merges
   * in place; anything else means we raced another mutation and the
   * optimistic state must be thrown away in favour of a full refetch.
   */
  reconcileExpand(address: string, response: ExpandResponse): Reconciliation {
    this.pending.delete(address);
    if (response.status !== "expanded") {
      if (response.revision !== this.revision) return "refetch";
      return "noop";
    }
    if (response.revision !== this.revision + 1) {
      return "refetch";
    }
    this.revision = response.revision;
    const node = this.nodes.get(address);
    if (node) {
      node.expanded = true;
      node.expandable = false;
    }
    for (const added of response.delta.nodes) {
      this.nodes.set(added.address, added);
    }
    for (const edge of response.delta.edges) {
      const key = ViewState.edgeKey(edge.from, edge.to);
      const existing = this.edges.get(key);
      if (existing) {
        existing.value_wei = edge.value_wei;
        existing.tx_count = edge.tx_count;
      } else {
        this.edges.set(key, {
          from: edge.from,
          to: edge.to,
          value_wei: edge.value_wei,
          value_eth: "",
          tx_count: edge.tx_count,
          first_time: null,
          last_time: null,
          citations: [],
        });
      }
    }
    return "merged";
  }

  /** Tooltip copy for a click that cannot expand anything. */
  expansionRefusal(address: string): string | null {
    const node = this.nodes.get(address);
    if (!node) return null;
    if (node.terminal) {
      const label = node.tag_label ?? this.annotations[address]?.label ?? "a service";
      const category = node.tag_category ?? this.annotations[address]?.category ?? "terminal";
      return `Expansion stops here: ${label} (${category}). Funds cannot be traced further on this chain.`;
    }
    if (node.expanded) return "Already expanded: nothing new behind this node.";
    if (node.data_missing) return "No history available offline for this address.";
    return null;
  }
}
