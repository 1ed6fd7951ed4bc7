/** App bootstrap: open an investigation, wire the panels together. */

import { ApiError, ServiceClient } from "./api.js";
import { GraphView } from "./graphview.js";
import { ViewState } from "./state.js";
import { describeEvent, priceChartModel, victimPanelModel } from "./timeline.js";
import type { Verdict } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const client = new ServiceClient("");
const state = new ViewState();
let graphView: GraphView | null = null;

function renderPricePanel(verdict: Verdict): void {
  const host = byId<HTMLDivElement>("price-panel");
  const model = priceChartModel(
    verdict.price_series,
    verdict.scam_window,
    verdict.classification.pump?.peak_tx ?? null,
  );
  host.replaceChildren();
  if (model.empty) {
    const empty = document.createElement("p");
    empty.className = "placeholder";
    empty.textContent = "No trades: nothing to chart.";
    host.appendChild(empty);
    return;
  }
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${model.width} ${model.height}`);
  svg.setAttribute("class", "price-chart");
  if (model.windowRect) {
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(model.windowRect.x0));
    rect.setAttribute("width", String(model.windowRect.x1 - model.windowRect.x0));
    rect.setAttribute("y", "0");
    rect.setAttribute("height", String(model.height));
    rect.setAttribute("class", "scam-window-shade");
    svg.appendChild(rect);
  }
  const path = document.createElementNS(SVG_NS, "polyline");
  path.setAttribute(
    "points",
    model.points.map((p) => `${p.x.toFixed(1)},${p.y.toFixed(1)}`).join(" "),
  );
  path.setAttribute("fill", "none");
  path.setAttribute("stroke", "#2e86ab");
  path.setAttribute("stroke-width", "1.5");
  svg.appendChild(path);
  for (const p of model.points) {
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", p.x.toFixed(1));
    dot.setAttribute("cy", p.y.toFixed(1));
    dot.setAttribute("r", p.isPeak ? "6" : "2.5");
    dot.setAttribute("fill", p.kind === "buy" ? "#2f9e44" : "#e03131");
    if (p.isPeak) dot.setAttribute("class", "peak-marker");
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${p.kind} @ ${p.price} ETH/token (${p.tx.slice(0, 12)}…)`;
    dot.appendChild(title);
    svg.appendChild(dot);
  }
  host.appendChild(svg);
  const caption = document.createElement("p");
  caption.className = "caption";
  const windowText = verdict.scam_window
    ? `scam window ${verdict.scam_window.start_time} – ${verdict.scam_window.end_time} shaded`
    : "no scam window detected";
  caption.textContent = `${model.points.length} trades; ${windowText}.`;
  host.appendChild(caption);
}

function renderVictims(verdict: Verdict): void {
  const host = byId<HTMLDivElement>("victims-panel");
  const model = victimPanelModel(verdict);
  host.replaceChildren();
  const heading = document.createElement("p");
  heading.innerHTML = `<strong>${model.count}</strong> victims left holding the token` +
    (model.degenCount ? ` (${model.degenCount} annotated degen)` : "");
  host.appendChild(heading);
  const list = document.createElement("ul");
  for (const row of model.rows.slice(0, 40)) {
    const item = document.createElement("li");
    item.textContent = row.address + (row.degen ? " [degen]" : "");
    list.appendChild(item);
  }
  host.appendChild(list);
}

async function renderTimelineList(id: string): Promise<void> {
  const host = byId<HTMLDivElement>("events-panel");
  const timeline = await client.getTimeline(id);
  host.replaceChildren();
  const list = document.createElement("ol");
  for (const event of timeline.events) {
    const item = document.createElement("li");
    item.textContent = `${event.time} — ${describeEvent(event)} `;
    const cite = document.createElement("code");
    cite.textContent = String(event.tx).slice(0, 14) + "…";
    cite.title = String(event.tx);
    item.appendChild(cite);
    list.appendChild(item);
  }
  host.appendChild(list);
}

async function refreshSidebar(): Promise<void> {
  if (!state.investigationId) return;
  const verdict = await client.getVerdict(state.investigationId);
  renderPricePanel(verdict);
  renderVictims(verdict);
}

async function openInvestigation(id: string): Promise<void> {
  state.investigationId = id;
  const summary = await client.getInvestigation(id);
  byId<HTMLSpanElement>("verdict-badge").textContent =
    `${summary.verdict} (${summary.confidence})` +
    (summary.pump_and_dump ? " + pump-and-dump" : "");
  byId<HTMLAnchorElement>("report-link").setAttribute(
    "href", client.reportUrl(id, "human"));
  const graph = await client.getGraph(id);
  state.applyGraph(graph);
  graphView = new GraphView(
    byId("graph") as unknown as SVGSVGElement,
    state,
    client,
    byId("tooltip"),
  );
  graphView.onChanged = () => {
    byId<HTMLSpanElement>("revision-badge").textContent = `rev ${state.revision}`;
  };
  graphView.render();
  byId<HTMLSpanElement>("revision-badge").textContent = `rev ${state.revision}`;
  await refreshSidebar();
  await renderTimelineList(id);
}

function wireTagForm(): void {
  byId<HTMLFormElement>("tag-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      if (!state.investigationId || !state.selected) return;
      const category = byId<HTMLSelectElement>("tag-category").value;
      const label = byId<HTMLInputElement>("tag-label").value;
      try {
        await client.tag(state.investigationId, state.selected, category, label);
        const fresh = await client.getGraph(state.investigationId);
        state.applyGraph(fresh);
        graphView?.render();
        byId<HTMLSpanElement>("revision-badge").textContent = `rev ${state.revision}`;
      } catch (error) {
        alert((error as ApiError).message);
      }
    })();
  });
}

function wireOpenForm(): void {
  byId<HTMLFormElement>("open-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      const fixtures = byId<HTMLInputElement>("fixtures-input").value;
      const token = byId<HTMLInputElement>("token-input").value;
      try {
        const created = await client.createInvestigation(fixtures, token);
        await openInvestigation(created.id);
      } catch (error) {
        alert((error as ApiError).message);
      }
    })();
  });
}

if (typeof document !== "undefined" && document.getElementById("open-form")) {
  wireOpenForm();
  wireTagForm();
  const params = new URLSearchParams(window.location.search);
  const existing = params.get("id");
  if (existing) void openInvestigation(existing);
}
