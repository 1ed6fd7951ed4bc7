/**
 * SVG rendering of the trace graph plus the expand/tag interactions.
 * All classification comes from the server payloads; this file only
 * draws and relays clicks.
 */

import { ServiceClient } from "./api.js";
import { edgeWidth, Layout, layoutGraph, nodeColor } from "./layout.js";
import { ViewState } from "./state.js";
import type { GraphNode } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export class GraphView {
  private layout: Layout = new Map();
  onChanged: (() => void) | null = null;

  constructor(
    private svg: SVGSVGElement,
    private state: ViewState,
    private client: ServiceClient,
    private tooltip: HTMLElement,
  ) {}

  private el<K extends keyof SVGElementTagNameMap>(
    name: K,
    attrs: Record<string, string>,
  ): SVGElementTagNameMap[K] {
    const node = document.createElementNS(SVG_NS, name);
    for (const [key, value] of Object.entries(attrs)) {
      node.setAttribute(key, value);
    }
    return node;
  }

  showTooltip(text: string, x: number, y: number): void {
    this.tooltip.textContent = text;
    this.tooltip.style.left = `${x + 14}px`;
    this.tooltip.style.top = `${y + 14}px`;
    this.tooltip.classList.add("visible");
    window.setTimeout(() => this.tooltip.classList.remove("visible"), 2600);
  }

  async handleNodeClick(node: GraphNode, x: number, y: number): Promise<void> {
    this.state.selected = node.address;
    const refusal = this.state.expansionRefusal(node.address);
    if (!this.state.canExpand(node.address)) {
      if (refusal) this.showTooltip(refusal, x, y);
      this.render();
      return;
    }
    if (!this.state.beginExpand(node.address)) return; // debounced
    this.render();
    try {
      const response = await this.client.expand(
        this.state.investigationId!,
        node.address,
        `ui-${node.address}-${this.state.revision}`,
      );
      const outcome = this.state.reconcileExpand(node.address, response);
      if (outcome === "refetch") {
        const fresh = await this.client.getGraph(this.state.investigationId!);
        this.state.applyGraph(fresh);
      }
      if (response.status !== "expanded") {
        const refusalNow = this.state.expansionRefusal(node.address);
        if (refusalNow) this.showTooltip(refusalNow, x, y);
      }
    } catch (error) {
      this.state.pending.delete(node.address);
      this.showTooltip(`expand failed: ${(error as Error).message}`, x, y);
    }
    this.render();
    this.onChanged?.();
  }

  render(): void {
    const nodes = [...this.state.nodes.values()];
    const edges = [...this.state.edges.values()];
    this.layout = layoutGraph(nodes, edges, this.layout);

    this.svg.replaceChildren();
    const marker = this.el("defs", {});
    marker.innerHTML =
      '<marker id="arrow" viewBox="0 0 8 8" refX="7" refY="4" markerWidth="7" ' +
      'markerHeight="7" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="#9aa3ad"/></marker>';
    this.svg.appendChild(marker);

    for (const edge of edges) {
      const a = this.layout.get(edge.from);
      const b = this.layout.get(edge.to);
      if (!a || !b) continue;
      const line = this.el("line", {
        x1: String(a.x),
        y1: String(a.y),
        x2: String(b.x),
        y2: String(b.y),
        stroke: "#9aa3ad",
        "stroke-width": String(edgeWidth(edge.value_wei)),
        "marker-end": "url(#arrow)",
        opacity: "0.75",
      });
      const title = this.el("title", {});
      title.textContent = `${edge.value_eth || edge.value_wei + " wei"} ETH over ${edge.tx_count} tx`;
      line.appendChild(title);
      this.svg.appendChild(line);
    }

    for (const node of nodes) {
      const point = this.layout.get(node.address);
      if (!point) continue;
      const group = this.el("g", {
        transform: `translate(${point.x},${point.y})`,
        cursor: "pointer",
      });
      group.setAttribute("data-address", node.address);
      const radius = node.seed ? 16 : 11;
      if (node.terminal) {
        // terminal nodes are visually locked: double ring
        group.appendChild(this.el("circle", {
          r: String(radius + 4),
          fill: "none",
          stroke: "#30343a",
          "stroke-width": "2",
        }));
      }
      const circle = this.el("circle", {
        r: String(radius),
        fill: nodeColor(node),
        stroke: this.state.selected === node.address ? "#111" : "#fff",
        "stroke-width": this.state.selected === node.address ? "3" : "1.5",
        opacity: this.state.pending.has(node.address) ? "0.45" : "1",
      });
      group.appendChild(circle);
      if (node.terminal) {
        const lock = this.el("text", {
          y: "4",
          "text-anchor": "middle",
          "font-size": "10",
          fill: "#fff",
        });
        lock.textContent = "⚿"; // squared key: locked endpoint
        group.appendChild(lock);
      }
      const label = this.el("text", {
        y: String(radius + 13),
        "text-anchor": "middle",
        "font-size": "10",
        fill: "#30343a",
      });
      const short = `${node.address.slice(0, 6)}..${node.address.slice(-4)}`;
      label.textContent = node.tag_label ?? (node.burner ? `burner ${short}` : short);
      group.appendChild(label);

      group.addEventListener("click", (event: MouseEvent) => {
        void this.handleNodeClick(node, event.clientX, event.clientY);
      });
      this.svg.appendChild(group);
    }
  }
}
