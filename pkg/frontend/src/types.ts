/** Wire types for the investigation service (canonical JSON schemas). */

export interface GraphNode {
  address: string;
  depth: number;
  seed: boolean;
  terminal: boolean;
  expanded: boolean;
  expandable: boolean;
  data_missing: boolean;
  tag_category: string | null;
  tag_label: string | null;
  roles: string[];
  burner: boolean;
  tx_count: number;
  first_seen: string | null;
  last_seen: string | null;
  total_in_wei: string;
  total_out_wei: string;
}

export interface GraphEdge {
  from: string;
  to: string;
  value_wei: string;
  value_eth: string;
  tx_count: number;
  first_time: string | null;
  last_time: string | null;
  citations: string[];
}

export interface GraphPayload {
  revision: number;
  seeds: string[];
  frontier: string[];
  nodes: GraphNode[];
  edges: GraphEdge[];
  annotations: Record<string, { category: string; label: string }>;
}

export interface ExpandResponse {
  revision: number;
  status: "expanded" | "terminal" | "already_expanded" | "unknown" | "no_data" | "depth_limit";
  delta: { nodes: GraphNode[]; edges: { from: string; to: string; value_wei: string; tx_count: number }[] };
}

export interface TagResponse {
  revision: number;
  superseded: { category: string; label: string } | null;
}

export interface ScamWindow {
  start_position: number[];
  end_position: number[];
  start_time: string;
  end_time: string;
  start_timestamp: number;
  end_timestamp: number;
  duration_seconds: number;
  end_reason: string;
  low_confidence: boolean;
}

export interface PricePoint {
  position: number[];
  timestamp: number;
  time: string;
  kind: "buy" | "sell";
  price_eth_per_token: string;
  price_exact: string;
  tx: string;
}

export interface Verdict {
  schema_version: number;
  token: { address: string; pair: string | null; decimals: number };
  scam_window: ScamWindow | null;
  classification: {
    verdict: string;
    confidence: string;
    pump_and_dump: boolean;
    pump: { peak_position: number[]; peak_price_eth_per_token: string; peak_tx: string } | null;
    evidence: { text: string; citations: string[] }[];
  };
  economics: Record<string, unknown>;
  victims: {
    count: number;
    addresses: { address: string; final_balance: string; degen_candidate: boolean }[];
    excluded: { address: string; reason: string }[];
  };
  price_series: PricePoint[];
}

export interface TimelineEvent {
  kind: string;
  position: number[];
  timestamp: number;
  time: string;
  tx: string;
  [key: string]: unknown;
}

export interface TimelinePayload {
  token: string;
  transfer_count: number;
  distinct_addresses: number;
  events: TimelineEvent[];
}

export interface InvestigationSummary {
  id: string;
  token: string;
  revision: number;
  verdict: string;
  confidence: string;
  pump_and_dump: boolean;
  scam_window: ScamWindow | null;
  audit: unknown[];
}
