"""End-to-end investigation orchestration.

Attribution runs in two passes: the first pass (creation and liquidity
roles only) prices the scheme, and its max-profit bound feeds the
balance-spike heuristic in the second pass, which then fixes the final
economics. Two passes are always enough because the certain set never
changes between them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from chainsleuth.chaindata.address import Address
from chainsleuth.chaindata.store import ChainStore
from chainsleuth.config import InvestigationConfig
from chainsleuth.contractcheck import ScanResult, scan_source
from chainsleuth.frauddetect import (
    AdvanceFeeFinding,
    ProfitEstimate,
    PumpFinding,
    ScamClassification,
    VictimSet,
    classify_rug_pull,
    compute_rsl,
    detect_advance_fee,
    detect_pump_and_dump,
    identify_victims,
    profit_bounds,
)
from chainsleuth.heuristics import (
    AttributionMap,
    attribute_scammer_addresses,
    certain_set,
)
from chainsleuth.lifecycle import (
    PricePoint,
    ScamWindow,
    TokenTimeline,
    build_timeline,
    detect_scam_window,
    price_series,
)
from chainsleuth.trace import (
    LaunderingSummary,
    TraceGraph,
    summarize_laundering,
    trace_funds,
)


@dataclass
class InvestigationResult:
    token: Address
    store: ChainStore
    config: InvestigationConfig
    timeline: TokenTimeline
    series: list[PricePoint]
    window: Optional[ScamWindow]
    attribution: AttributionMap
    classification: ScamClassification
    victims: VictimSet
    estimate: ProfitEstimate
    pump: Optional[PumpFinding]
    advance_fee: Optional[AdvanceFeeFinding]
    graph: Optional[TraceGraph] = None
    laundering: Optional[LaunderingSummary] = None
    contract_scan: Optional[ScanResult] = None
    rsl_warnings: list[str] = field(default_factory=list)

    @property
    def primary_seed(self) -> Optional[Address]:
        created = [e for e in self.timeline.events if type(e).__name__ == "Created"]
        return created[0].creator if created else None


def analyze_token(
    store: ChainStore,
    token: Address,
    config: InvestigationConfig = InvestigationConfig(),
) -> InvestigationResult:
    """Detection stage: timeline, attribution, classification, economics."""
    timeline = build_timeline(token, store)
    series = price_series(timeline)
    window = (
        detect_scam_window(timeline, config.detection.drain_threshold)
        if not timeline.is_empty
        else None
    )

    attribution = attribute_scammer_addresses(
        timeline, store, series, window, None, config.attribution
    )
    r, s, dl, warnings = compute_rsl(timeline, attribution, window, config.detection)
    first_pass = profit_bounds(r, s, dl)

    attribution = attribute_scammer_addresses(
        timeline, store, series, window, first_pass.p_max_wei, config.attribution
    )
    r, s, dl, warnings = compute_rsl(timeline, attribution, window, config.detection)

    rate = None
    rate_date = None
    if window is not None:
        rate = store.usd_rate_for(window.start_timestamp)
        if rate is not None:
            import datetime as _dt

            rate_date = (
                _dt.datetime.fromtimestamp(window.start_timestamp, _dt.timezone.utc)
                .date()
                .isoformat()
            )
    estimate = profit_bounds(r, s, dl, usd_rate=rate, rate_date=rate_date,
                             warnings=warnings)

    classification = classify_rug_pull(
        timeline, attribution, series, window, config.detection
    )
    victims = identify_victims(timeline, attribution, window)
    pump = detect_pump_and_dump(series, config.detection, window) if series else None
    advance_fee = detect_advance_fee(timeline)

    return InvestigationResult(
        token=token,
        store=store,
        config=config,
        timeline=timeline,
        series=series,
        window=window,
        attribution=attribution,
        classification=classification,
        victims=victims,
        estimate=estimate,
        pump=pump,
        advance_fee=advance_fee,
        rsl_warnings=warnings,
    )


def run_trace(
    result: InvestigationResult,
    seeds: Optional[set[Address]] = None,
    max_depth: Optional[int] = None,
) -> InvestigationResult:
    """Tracing stage: expand the value-flow graph and summarize laundering."""
    if seeds is None:
        seeds = certain_set(result.attribution)
        if not seeds and result.primary_seed is not None:
            seeds = {result.primary_seed}
    if not seeds:
        return result

    result.graph = trace_funds(
        seeds, result.store, result.config.trace, result.attribution,
        max_depth=max_depth,
    )
    result.laundering = summarize_laundering(
        result.graph,
        result.store,
        result.config.trace,
        p_max_wei=result.estimate.p_max_wei,
        funding_before=result.window.start_timestamp if result.window else None,
        primary_seed=result.primary_seed,
    )
    return result


def run_contract_scan(
    result: InvestigationResult, source_text: Optional[str], verified: bool = True
) -> InvestigationResult:
    if source_text:
        result.contract_scan = scan_source(source_text, verified)
    return result


def investigate(
    store: ChainStore,
    token: Address,
    config: InvestigationConfig = InvestigationConfig(),
    contract_source: Optional[str] = None,
    trace_seeds: Optional[set[Address]] = None,
    trace_depth: Optional[int] = None,
) -> InvestigationResult:
    """Full pipeline: detect, attribute, trace, scan."""
    result = analyze_token(store, token, config)
    result = run_trace(result, trace_seeds, trace_depth)
    result = run_contract_scan(result, contract_source)
    return result
