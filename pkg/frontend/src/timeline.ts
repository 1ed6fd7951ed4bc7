/**
 * Price panel view-model: chart geometry for the execution-price series
 * with the scam window shaded and the peak marked. Pure functions so the
 * geometry is testable without a DOM; the DOM layer only draws what
 * these return.
 */

import type { PricePoint, ScamWindow, Verdict } from "./types.js";

export interface ChartPoint {
  x: number;
  y: number;
  kind: "buy" | "sell";
  price: string;
  tx: string;
  isPeak: boolean;
}

export interface ChartModel {
  width: number;
  height: number;
  points: ChartPoint[];
  /** shaded region covering exactly the scam window, in pixels */
  windowRect: { x0: number; x1: number } | null;
  peak: ChartPoint | null;
  empty: boolean;
  lowConfidence: boolean;
}

function logPrice(text: string): number {
  const value = Number.parseFloat(text);
  return Math.log10(value > 0 ? value : Number.MIN_VALUE);
}

export function priceChartModel(
  series: PricePoint[],
  window: ScamWindow | null,
  peakTx: string | null,
  width = 760,
  height = 220,
): ChartModel {
  if (series.length === 0) {
    return {
      width,
      height,
      points: [],
      windowRect: null,
      peak: null,
      empty: true,
      lowConfidence: window?.low_confidence ?? false,
    };
  }
  const pad = 30;
  const t0 = series[0].timestamp;
  const t1 = series[series.length - 1].timestamp;
  const span = Math.max(1, t1 - t0);
  const logs = series.map((p) => logPrice(p.price_eth_per_token));
  const lo = Math.min(...logs);
  const hi = Math.max(...logs);
  const range = Math.max(1e-9, hi - lo);

  const toX = (timestamp: number) =>
    pad + ((width - 2 * pad) * (timestamp - t0)) / span;
  const toY = (logValue: number) =>
    height - pad - ((height - 2 * pad) * (logValue - lo)) / range;

  const points: ChartPoint[] = series.map((p, i) => ({
    x: toX(p.timestamp),
    y: toY(logs[i]),
    kind: p.kind,
    price: p.price_eth_per_token,
    tx: p.tx,
    isPeak: peakTx !== null && p.tx === peakTx && logs[i] === hi,
  }));

  let windowRect: ChartModel["windowRect"] = null;
  if (window) {
    const x0 = Math.max(pad, toX(window.start_timestamp));
    const x1 = Math.min(width - pad, toX(window.end_timestamp));
    windowRect = { x0, x1: Math.max(x1, x0) };
  }

  return {
    width,
    height,
    points,
    windowRect,
    peak: points.find((p) => p.isPeak) ?? null,
    empty: false,
    lowConfidence: window?.low_confidence ?? false,
  };
}

export interface VictimRow {
  address: string;
  degen: boolean;
}

export function victimPanelModel(verdict: Verdict): {
  count: number;
  rows: VictimRow[];
  degenCount: number;
} {
  const rows = verdict.victims.addresses.map((v) => ({
    address: v.address,
    degen: v.degen_candidate,
  }));
  return {
    count: verdict.victims.count,
    rows,
    degenCount: rows.filter((r) => r.degen).length,
  };
}

/** One-line human string per timeline event for the event list. */
export function describeEvent(event: { kind: string; [key: string]: unknown }): string {
  switch (event.kind) {
    case "created":
      return `token created by ${event.creator}`;
    case "minted":
      return `minted ${event.amount_tokens} to ${event.to}`;
    case "liquidity_added":
      return `liquidity added: ${event.eth_in} ETH by ${event.provider}`;
    case "buy":
      return `buy: ${event.eth_in} ETH in by ${event.buyer}`;
    case "sell":
      return `sell: ${event.eth_out} ETH out by ${event.seller}`;
    case "liquidity_removed":
      return `liquidity removed: ${event.eth_out} ETH to ${event.recipient}`;
    case "transfer":
      return `transfer ${event.amount_tokens} from ${event.sender} to ${event.recipient}`;
    default:
      return event.kind;
  }
}
