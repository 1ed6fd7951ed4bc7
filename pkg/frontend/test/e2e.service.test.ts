/**
 * The full investigator loop against a live service instance, driven
 * through the UI's own client/state/view-model modules and only the
 * documented endpoints: open an investigation, follow the money from the
 * seed through a burner to the exchange, tag an address and watch it
 * become terminal, and check the price panel shades the scam window.
 *
 * Run via `./run-e2e.sh` (boots the service and sets the env), or set
 * SERVICE_URL / FIXTURES_DIR / TOKEN_ADDRESS yourself.
 */

import { beforeAll, describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import { layoutGraph } from "../src/layout.js";
import { ViewState } from "../src/state.js";
import { priceChartModel, victimPanelModel } from "../src/timeline.js";

const SERVICE_URL = process.env.SERVICE_URL ?? "";
const FIXTURES_DIR = process.env.FIXTURES_DIR ?? "";
const TOKEN_ADDRESS = process.env.TOKEN_ADDRESS ?? "";

describe.skipIf(!SERVICE_URL)("investigation loop against the live service", () => {
  const client = new ServiceClient(SERVICE_URL);
  const state = new ViewState();
  let investigationId = "";

  beforeAll(async () => {
    const created = await client.createInvestigation(FIXTURES_DIR, TOKEN_ADDRESS);
    investigationId = created.id;
    state.investigationId = created.id;
    expect(created.verdict).toBe("sell_rug_pull");
  });

  it("starts from the seeded depth-one graph", async () => {
    const graph = await client.getGraph(investigationId);
    state.applyGraph(graph);
    expect(state.revision).toBe(0);
    const seeds = [...state.nodes.values()].filter((n) => n.seed);
    expect(seeds.length).toBeGreaterThan(0);
    // the burner one hop out is already visible and expandable
    const burners = [...state.nodes.values()].filter((n) => n.burner);
    expect(burners.length).toBeGreaterThan(0);
    expect(state.canExpand(burners[0].address)).toBe(true);
  });

  it("expands seed -> burner -> exchange, which arrives terminal", async () => {
    const burner = [...state.nodes.values()].find((n) => n.burner)!;
    expect(state.beginExpand(burner.address)).toBe(true);
    // double-click while pending: debounced to a single request
    expect(state.beginExpand(burner.address)).toBe(false);

    const response = await client.expand(
      investigationId, burner.address, `e2e-${burner.address}`);
    expect(response.status).toBe("expanded");
    const outcome = state.reconcileExpand(burner.address, response);
    expect(outcome).toBe("merged");

    const exchange = [...state.nodes.values()].find(
      (n) => n.tag_category === "exchange");
    expect(exchange).toBeDefined();
    expect(exchange!.terminal).toBe(true);
    // terminal endpoints refuse further expansion, with an explanation
    expect(state.canExpand(exchange!.address)).toBe(false);
    expect(state.expansionRefusal(exchange!.address)).toMatch(/stops here/);
    const refused = await client.expand(investigationId, exchange!.address);
    expect(refused.status).toBe("terminal");

    // layout keeps every pre-expansion node exactly where it was
    const before = layoutGraph(
      [...state.nodes.values()].filter((n) => !n.terminal || n.seed),
      [],
      new Map(),
    );
    const after = layoutGraph(
      [...state.nodes.values()],
      [...state.edges.values()],
      before,
    );
    for (const [address, point] of before) {
      expect(after.get(address)!.x).toBe(point.x);
      expect(after.get(address)!.y).toBe(point.y);
    }
  });

  it("tags an address as exchange and sees it become terminal", async () => {
    const target = [...state.nodes.values()].find(
      (n) => !n.seed && n.tag_category === null)!;
    const tagged = await client.tag(
      investigationId, target.address, "exchange", "E2E Exchange");
    expect(tagged.revision).toBeGreaterThan(state.revision);

    const graph = await client.getGraph(investigationId);
    state.applyGraph(graph);
    const updated = state.nodes.get(target.address)!;
    expect(updated.terminal).toBe(true);
    expect(updated.tag_label).toBe("E2E Exchange");
    expect(state.annotations[target.address].label).toBe("E2E Exchange");
    // and the previous revision is still immutable on the server
    const old = await client.getGraph(investigationId, 0);
    expect(old.nodes.find((n) => n.address === target.address)!.terminal).toBe(false);
  });

  it("price panel shades the scam window and lists victims", async () => {
    const verdict = await client.getVerdict(investigationId);
    expect(verdict.scam_window).not.toBeNull();
    const model = priceChartModel(
      verdict.price_series,
      verdict.scam_window,
      verdict.classification.pump?.peak_tx ?? null,
    );
    expect(model.empty).toBe(false);
    expect(model.windowRect).not.toBeNull();
    expect(model.windowRect!.x1).toBeGreaterThan(model.windowRect!.x0);
    // every trade inside the scam window falls inside the shaded band
    const w = verdict.scam_window!;
    verdict.price_series.forEach((p, i) => {
      if (p.timestamp >= w.start_timestamp && p.timestamp <= w.end_timestamp) {
        expect(model.points[i].x).toBeGreaterThanOrEqual(model.windowRect!.x0 - 1e-6);
        expect(model.points[i].x).toBeLessThanOrEqual(model.windowRect!.x1 + 1e-6);
      }
    });
    expect(model.peak).not.toBeNull();

    const victims = victimPanelModel(verdict);
    expect(victims.count).toBeGreaterThan(0);
    expect(victims.rows).toHaveLength(victims.count);
  });
});
