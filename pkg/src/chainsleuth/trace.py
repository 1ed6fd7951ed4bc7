"""Follow the money: value-flow graph expansion and laundering typologies.

Expansion walks outgoing ETH value transfers breadth-first from seed
addresses until it reaches a terminal service (exchange, mixer, bridge,
gambling), the depth bound, or flows below the dust threshold. Very
active wallets are only followed within a time window after the traced
funds arrive, because their other traffic is co-mingled noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from chainsleuth.chaindata.address import Address
from chainsleuth.chaindata.models import TagCategory, Transaction
from chainsleuth.chaindata.store import ChainStore
from chainsleuth.config import TraceConfig
from chainsleuth.heuristics import AttributionMap

TERMINAL_CATEGORIES = {
    TagCategory.EXCHANGE,
    TagCategory.MIXER,
    TagCategory.BRIDGE,
    TagCategory.GAMBLING,
}

STRATEGY_KINDS = ("peel_chain", "chain_hop", "mixer_deposit", "gambling")


@dataclass
class TraceNode:
    address: Address
    depth: int
    tag_category: Optional[str] = None
    tag_label: Optional[str] = None
    roles: tuple[str, ...] = ()
    terminal: bool = False
    expanded: bool = False
    data_missing: bool = False
    is_seed: bool = False
    # lifetime activity metrics from the store
    tx_count: int = 0
    first_seen: Optional[int] = None
    last_seen: Optional[int] = None
    total_in_wei: int = 0
    total_out_wei: int = 0
    # when the traced funds first reached this node
    reached_at: Optional[int] = None


@dataclass
class TraceEdge:
    src: Address
    dst: Address
    value_wei: int = 0
    tx_count: int = 0
    first_position: Optional[tuple] = None
    last_position: Optional[tuple] = None
    first_timestamp: Optional[int] = None
    last_timestamp: Optional[int] = None
    citations: list[bytes] = field(default_factory=list)

    def absorb(self, tx: Transaction) -> None:
        pos = (tx.block_number, tx.tx_index, 0)
        self.value_wei += tx.value_wei
        self.tx_count += 1
        if self.first_position is None or pos < self.first_position:
            self.first_position = pos
            self.first_timestamp = tx.timestamp
        if self.last_position is None or pos > self.last_position:
            self.last_position = pos
            self.last_timestamp = tx.timestamp
        self.citations.append(tx.hash)


@dataclass
class TraceGraph:
    seeds: set[Address]
    nodes: dict[Address, TraceNode] = field(default_factory=dict)
    edges: dict[tuple[Address, Address], TraceEdge] = field(default_factory=dict)
    config: TraceConfig = field(default_factory=TraceConfig)

    @property
    def frontier(self) -> set[Address]:
        return {
            a for a, n in self.nodes.items()
            if not n.terminal and not n.expanded and not n.data_missing
            and n.depth < self.config.max_depth
        }

    def out_edges(self, address: Address) -> list[TraceEdge]:
        return [e for (s, _), e in sorted(self.edges.items()) if s == address]

    def in_edges(self, address: Address) -> list[TraceEdge]:
        return [e for (_, d), e in sorted(self.edges.items()) if d == address]


def _make_node(
    store: ChainStore,
    address: Address,
    depth: int,
    config: TraceConfig,
    attribution: Optional[AttributionMap],
    is_seed: bool = False,
) -> TraceNode:
    tag = store.lookup_tag(address)
    activity = store.activity(address)
    roles: tuple[str, ...] = ()
    if attribution and address in attribution:
        roles = tuple(sorted(attribution[address].roles))
    terminal = tag is not None and tag.category in TERMINAL_CATEGORIES
    return TraceNode(
        address=address,
        depth=depth,
        tag_category=tag.category.value if tag else None,
        tag_label=tag.label if tag else None,
        roles=roles,
        terminal=terminal,
        is_seed=is_seed,
        tx_count=activity["tx_count"],
        first_seen=activity["first_seen"],
        last_seen=activity["last_seen"],
        total_in_wei=activity["total_in_wei"],
        total_out_wei=activity["total_out_wei"],
    )


def _outgoing_value_txs(
    store: ChainStore, node: TraceNode, config: TraceConfig
) -> list[Transaction]:
    txs = [
        t for t in store.transactions_for(node.address)
        if t.sender == node.address and t.to is not None and t.value_wei > 0
    ]
    if node.tx_count >= config.activity_txcount_cutoff and node.reached_at is not None:
        lo = node.reached_at
        hi = node.reached_at + config.time_window_seconds
        txs = [t for t in txs if lo <= t.timestamp <= hi]
    return txs


def expand_node(
    graph: TraceGraph,
    store: ChainStore,
    address: Address,
    attribution: Optional[AttributionMap] = None,
) -> tuple[list[Address], list[tuple[Address, Address]], str]:
    """One-hop expansion. Returns (new nodes, new/updated edges, status).

    Status is "expanded", "terminal", "unknown", "already_expanded" or
    "no_data". Terminal and repeated expansions are no-ops by design.
    """
    config = graph.config
    node = graph.nodes.get(address)
    if node is None:
        return [], [], "unknown"
    if node.terminal:
        return [], [], "terminal"
    if node.expanded:
        return [], [], "already_expanded"
    if node.depth >= config.max_depth:
        return [], [], "depth_limit"

    txs = [t for t in store.transactions_for(address) if t.sender == address]
    if not txs and not node.is_seed:
        # offline mode without this address's history: flagged, not an error
        node.data_missing = True
        return [], [], "no_data"

    new_nodes: list[Address] = []
    touched_edges: list[tuple[Address, Address]] = []
    for tx in sorted(_outgoing_value_txs(store, node, config),
                     key=lambda t: (t.block_number, t.tx_index)):
        if tx.value_wei < config.dust_threshold_wei:
            continue
        dst = tx.to
        if dst == address:
            continue
        if dst not in graph.nodes:
            child = _make_node(store, dst, node.depth + 1, config, attribution)
            child.reached_at = tx.timestamp
            graph.nodes[dst] = child
            new_nodes.append(dst)
        else:
            child = graph.nodes[dst]
            child.depth = min(child.depth, node.depth + 1)
            if child.reached_at is None or tx.timestamp < child.reached_at:
                child.reached_at = tx.timestamp
        key = (address, dst)
        if key not in graph.edges:
            graph.edges[key] = TraceEdge(src=address, dst=dst)
        graph.edges[key].absorb(tx)
        touched_edges.append(key)

    node.expanded = True
    return new_nodes, touched_edges, "expanded"


def trace_funds(
    seeds: set[Address],
    store: ChainStore,
    config: TraceConfig = TraceConfig(),
    attribution: Optional[AttributionMap] = None,
    max_depth: Optional[int] = None,
) -> TraceGraph:
    """Breadth-first value-flow expansion from the seed set."""
    if not seeds:
        raise ValueError("trace requires at least one seed address")
    if max_depth is not None:
        import dataclasses

        config = dataclasses.replace(config, max_depth=max_depth)

    graph = TraceGraph(seeds=set(seeds), config=config)
    for seed in sorted(seeds):
        node = _make_node(store, seed, 0, config, attribution, is_seed=True)
        node.terminal = False  # seeds always expand, tagged or not
        node.reached_at = node.first_seen
        graph.nodes[seed] = node

    frontier = sorted(seeds)
    while frontier:
        next_frontier: list[Address] = []
        for address in frontier:
            new_nodes, _, status = expand_node(graph, store, address, attribution)
            if status == "expanded":
                next_frontier.extend(new_nodes)
        # deterministic order regardless of expansion parallelism
        frontier = sorted({
            a for a in next_frontier
            if a in graph.frontier
        })
    return graph


def apply_tag(graph: TraceGraph, address: Address, category: str, label: str) -> bool:
    """Annotation layer over the registry: may convert a node to terminal.

    Never drops discovered edges; returns True if the node newly became
    terminal.
    """
    node = graph.nodes.get(address)
    if node is None:
        return False
    node.tag_category = category
    node.tag_label = label
    became_terminal = False
    try:
        cat = TagCategory(category)
    except ValueError:
        cat = TagCategory.OTHER
    if cat in TERMINAL_CATEGORIES and not node.terminal and not node.is_seed:
        node.terminal = True
        became_terminal = True
    return became_terminal


# -- detectors ---------------------------------------------------------


def is_forwarder(graph: TraceGraph, address: Address, config: TraceConfig) -> bool:
    """Node-level peel-hop predicate: thin wallet that promptly forwards
    most of what it receives."""
    node = graph.nodes.get(address)
    if node is None:
        return False
    if node.tx_count > config.peel_max_hop_txcount:
        return False
    ins = graph.in_edges(address)
    outs = graph.out_edges(address)
    if not ins or not outs:
        return False
    received = sum(e.value_wei for e in ins)
    forwarded = sum(e.value_wei for e in outs)
    if received == 0 or forwarded * 10**6 < received * int(config.peel_forward_share * 10**6):
        return False
    first_in = min(e.first_timestamp for e in ins)
    last_out = max(e.last_timestamp for e in outs)
    return last_out - first_in <= config.peel_max_hop_delay_seconds


def drop_contained_paths(paths: list[tuple]) -> list[list]:
    """Keep only paths that are not a contiguous slice of a longer path."""
    normalized = sorted(set(paths))
    results: list[list] = []
    for path in normalized:
        contained = False
        for other in normalized:
            if other == path or len(other) < len(path):
                continue
            for i in range(len(other) - len(path) + 1):
                if tuple(other[i:i + len(path)]) == path:
                    contained = True
                    break
            if contained:
                break
        if not contained:
            results.append(list(path))
    return results


def detect_peel_chain(
    graph: TraceGraph, config: Optional[TraceConfig] = None
) -> list[list[Address]]:
    """Maximal simple paths of >= min_hops edges whose interior nodes all
    satisfy the forwarder predicate.

    Searches only through forwarder interiors, so it stays cheap on big
    graphs; results equal a full all-paths scan filtered by the same rule.
    """
    config = config or graph.config
    forwarders = {a for a in graph.nodes if is_forwarder(graph, a, config)}
    adjacency: dict[Address, list[Address]] = {}
    for (src, dst), edge in sorted(graph.edges.items()):
        if edge.value_wei >= config.dust_threshold_wei:
            adjacency.setdefault(src, []).append(dst)

    qualifying: list[tuple[Address, ...]] = []

    def extend(path: list[Address]) -> None:
        if len(path) - 1 >= config.peel_min_hops:
            qualifying.append(tuple(path))
        tail = path[-1]
        if tail not in forwarders:
            return  # tail must stay an endpoint: cannot become interior
        for nxt in adjacency.get(tail, []):
            if nxt not in path:
                extend(path + [nxt])

    for start in sorted(adjacency):
        for nxt in adjacency[start]:
            extend([start, nxt])

    return drop_contained_paths(qualifying)


def detect_burners(graph: TraceGraph, config: Optional[TraceConfig] = None) -> set[Address]:
    """Thin, now-dormant intermediaries created for a discrete purpose."""
    config = config or graph.config
    out = set()
    for address, node in graph.nodes.items():
        if node.is_seed:
            continue
        if node.tag_category is not None:
            continue
        if node.tx_count == 0 or node.tx_count > config.burner_max_lifetime_tx:
            continue
        relevant = [
            e.last_timestamp for e in graph.in_edges(address) + graph.out_edges(address)
            if e.last_timestamp is not None
        ]
        if not relevant or node.last_seen is None:
            continue
        if node.last_seen <= max(relevant) + config.burner_inactivity_horizon_seconds:
            out.add(address)
    return out


@dataclass(frozen=True)
class LaunderingFinding:
    kind: str  # peel_chain | chain_hop | mixer_deposit | cex_deposit | burner | gambling | none
    label: Optional[str] = None
    address: Optional[Address] = None
    amount_wei: Optional[int] = None
    kyc_flag: Optional[bool] = None
    path: tuple[Address, ...] = ()
    citations: tuple[bytes, ...] = ()
    attributable: bool = True


@dataclass
class FundingInfo:
    immediate_funder: Optional[Address]
    source: Optional[Address]
    source_tag: Optional[str]
    via_chain: tuple[Address, ...]
    description: str
    citations: tuple[bytes, ...] = ()


@dataclass
class LaunderingSummary:
    findings: list[LaunderingFinding]
    strategies: list[str]
    cashout: list[LaunderingFinding]
    cashout_candidates: list[LaunderingFinding]
    funding: FundingInfo


def _deposit_path_comingled(
    graph: TraceGraph, dst: Address, config: TraceConfig
) -> bool:
    """True if every route from a seed to dst passes a high-activity wallet."""
    # BFS from seeds avoiding high-activity interiors; reachable => clean route
    cutoff = config.activity_txcount_cutoff
    frontier = [a for a in graph.seeds]
    seen = set(frontier)
    while frontier:
        nxt = []
        for node in frontier:
            for (src, d), edge in graph.edges.items():
                if src != node or d in seen:
                    continue
                if d == dst:
                    return False
                child = graph.nodes.get(d)
                if child is None or child.terminal:
                    continue
                if child.tx_count >= cutoff and not child.is_seed:
                    continue  # co-mingling interior
                seen.add(d)
                nxt.append(d)
        frontier = nxt
    return True


def analyze_funding(
    store: ChainStore,
    seed: Address,
    before_timestamp: Optional[int],
    config: TraceConfig,
) -> FundingInfo:
    """Reverse incoming analysis: who put money into the seed, walking back
    through thin pass-through wallets."""
    node = seed
    chain: list[Address] = []
    citations: list[bytes] = []
    for _ in range(config.max_depth):
        incoming = [
            t for t in store.transactions_for(node)
            if t.to == node and t.value_wei > 0
            and (before_timestamp is None or t.timestamp <= before_timestamp)
        ]
        if not incoming:
            break
        totals: dict[Address, int] = {}
        for t in incoming:
            totals[t.sender] = totals.get(t.sender, 0) + t.value_wei
        funder = max(sorted(totals), key=lambda a: totals[a])
        if funder in chain or funder == seed:
            break
        chain.append(funder)
        citations.extend(t.hash for t in incoming if t.sender == funder)
        tag = store.lookup_tag(funder)
        activity = store.activity(funder)
        if tag is not None:
            return FundingInfo(
                immediate_funder=chain[0],
                source=funder,
                source_tag=tag.label,
                via_chain=tuple(chain),
                description=f"funded by {tag.label} ({tag.category.value})",
                citations=tuple(citations),
            )
        if activity["tx_count"] > config.burner_max_lifetime_tx:
            # active wallet: report it plus any tagged service behind it
            behind = sorted({
                store.lookup_tag(t.sender).label
                for t in store.transactions_for(funder)
                if t.to == funder and t.value_wei > 0 and store.lookup_tag(t.sender)
            })
            desc = "funded by an active wallet"
            if behind:
                desc += f" linked to {', '.join(behind)}"
            return FundingInfo(
                immediate_funder=chain[0],
                source=funder,
                source_tag=behind[0] if behind else None,
                via_chain=tuple(chain),
                description=desc,
                citations=tuple(citations),
            )
        node = funder

    if chain:
        return FundingInfo(
            immediate_funder=chain[0],
            source=chain[-1],
            source_tag=None,
            via_chain=tuple(chain),
            description="funded through untagged thin wallets",
            citations=tuple(citations),
        )
    return FundingInfo(
        immediate_funder=None,
        source=None,
        source_tag=None,
        via_chain=(),
        description="funding source not determined",
    )


def summarize_laundering(
    graph: TraceGraph,
    store: ChainStore,
    config: Optional[TraceConfig] = None,
    p_max_wei: Optional[int] = None,
    funding_before: Optional[int] = None,
    primary_seed: Optional[Address] = None,
) -> LaunderingSummary:
    """Consolidated laundering picture: strategies, cash-out endpoints with
    KYC flags, and how the seed wallet was funded."""
    config = config or graph.config
    findings: list[LaunderingFinding] = []

    for chain in detect_peel_chain(graph, config):
        edge_cites = []
        for a, b in zip(chain, chain[1:]):
            edge = graph.edges.get((a, b))
            if edge:
                edge_cites.extend(edge.citations)
        findings.append(LaunderingFinding(
            kind="peel_chain", path=tuple(chain), citations=tuple(edge_cites),
        ))

    burners = detect_burners(graph, config)
    for address in sorted(burners):
        cites = []
        for e in graph.in_edges(address) + graph.out_edges(address):
            cites.extend(e.citations)
        findings.append(LaunderingFinding(
            kind="burner", address=address, citations=tuple(cites),
        ))

    cashout: list[LaunderingFinding] = []
    candidates: list[LaunderingFinding] = []
    for address in sorted(graph.nodes):
        node = graph.nodes[address]
        if node.tag_category is None:
            continue
        deposits = graph.in_edges(address)
        if not deposits:
            continue
        amount = sum(e.value_wei for e in deposits)
        cites = tuple(h for e in deposits for h in e.citations)
        if node.tag_category == TagCategory.BRIDGE.value:
            findings.append(LaunderingFinding(
                kind="chain_hop", label=node.tag_label, address=address,
                amount_wei=amount, citations=cites,
            ))
        elif node.tag_category == TagCategory.MIXER.value:
            findings.append(LaunderingFinding(
                kind="mixer_deposit", label=node.tag_label, address=address,
                amount_wei=amount, citations=cites,
            ))
        elif node.tag_category == TagCategory.GAMBLING.value:
            findings.append(LaunderingFinding(
                kind="gambling", label=node.tag_label, address=address,
                amount_wei=amount, kyc_flag=amount >= config.kyc_threshold_wei,
                citations=cites,
            ))
        elif node.tag_category == TagCategory.EXCHANGE.value:
            comingled = _deposit_path_comingled(graph, address, config)
            depositor_attributed = any(
                bool(set(graph.nodes[e.src].roles) - {"degen_candidate", "victim_candidate"})
                or graph.nodes[e.src].is_seed
                for e in deposits
                if e.src in graph.nodes
            )
            finding = LaunderingFinding(
                kind="cex_deposit", label=node.tag_label, address=address,
                amount_wei=amount, kyc_flag=amount >= config.kyc_threshold_wei,
                citations=cites,
                attributable=not comingled or depositor_attributed,
            )
            plausible = (
                p_max_wei is None
                or amount <= int(p_max_wei * config.cashout_plausibility)
            )
            if finding.attributable:
                findings.append(finding)
                cashout.append(finding)
            elif plausible:
                findings.append(finding)
                cashout.append(finding)
            else:
                candidates.append(finding)

    seed = primary_seed if primary_seed is not None else sorted(graph.seeds)[0]
    funding = analyze_funding(store, seed, funding_before, config)

    strategies = sorted({f.kind for f in findings if f.kind in STRATEGY_KINDS})
    if not strategies:
        strategies = ["none"]

    if not findings:
        findings = [LaunderingFinding(kind="none")]

    return LaunderingSummary(
        findings=findings,
        strategies=strategies,
        cashout=cashout,
        cashout_candidates=candidates,
        funding=funding,
    )


def flow_conservation(graph: TraceGraph, store: ChainStore) -> dict[Address, dict]:
    """Per interior node: traced inflow-outflow vs. the node's stored net
    balance change over the traced span. Exact on fixtures."""
    report = {}
    for address, node in graph.nodes.items():
        if node.terminal or node.is_seed:
            continue
        ins = graph.in_edges(address)
        outs = graph.out_edges(address)
        if not ins:
            continue
        lo = min(e.first_timestamp for e in ins)
        hi = max(
            [e.last_timestamp for e in outs] + [e.last_timestamp for e in ins]
        )
        stored_in = stored_out = 0
        for tx in store.transactions_for(address):
            if not (lo <= tx.timestamp <= hi) or tx.value_wei == 0:
                continue
            if tx.to == address:
                stored_in += tx.value_wei
            elif tx.sender == address:
                stored_out += tx.value_wei
        report[address] = {
            "traced_in": sum(e.value_wei for e in ins),
            "traced_out": sum(e.value_wei for e in outs),
            "stored_net": stored_in - stored_out,
        }
    return report
