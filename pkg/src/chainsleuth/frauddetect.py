"""Rug-pull classification, victim identification and profit bounds.

Profit arithmetic is exact on integers in wei:

    minimum potential profit = (revenue - spend) + liquidity_delta
    maximum potential profit =  revenue          + liquidity_delta

where revenue is ETH received selling the token, spend is ETH paid buying
it (both over scammer-attributed addresses unless configured otherwise),
and liquidity_delta is ETH taken out of the pool minus ETH put in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Optional

from chainsleuth.chaindata.address import Address
from chainsleuth.chaindata.store import ChainStore
from chainsleuth.config import DetectionConfig
from chainsleuth.heuristics import AttributionMap, certain_set, economics_set
from chainsleuth.lifecycle import (
    Buy,
    LiquidityAdded,
    LiquidityRemoved,
    PricePoint,
    ScamWindow,
    Sell,
    TokenTimeline,
    detect_scam_window,
)
from chainsleuth.units import eth_to_wei


@dataclass(frozen=True)
class Evidence:
    claim: str
    tx_hashes: tuple[bytes, ...]


@dataclass
class ScamClassification:
    verdict: str  # "simple_rug_pull" | "sell_rug_pull" | "none"
    pump_and_dump: bool
    confidence: str  # "low" | "medium" | "high"
    evidence: list[Evidence] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.verdict not in ("simple_rug_pull", "sell_rug_pull", "none"):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict != "none" and not self.evidence:
            raise ValueError("a positive verdict requires evidence")


@dataclass(frozen=True)
class PumpFinding:
    peak_position: tuple
    peak_price: Fraction
    rise_factor: Fraction
    collapse_factor: Fraction  # share of peak lost by the last trade
    peak_tx: bytes
    secondary_peaks: tuple[tuple, ...] = ()


@dataclass(frozen=True)
class AdvanceFeeFinding:
    kind: str  # "transfer_fee" | "auto_liquidity" | "both"
    fee_share: Optional[Fraction]  # debited amount withheld from the pool
    sell_count: int
    tx_hashes: tuple[bytes, ...]


@dataclass
class VictimSet:
    victims: set[Address]
    excluded: dict[Address, str]

    def __post_init__(self) -> None:
        overlap = self.victims & set(self.excluded)
        if overlap:
            raise ValueError(f"victims and excluded overlap: {overlap}")


@dataclass
class ProfitEstimate:
    revenue_wei: int  # R
    spend_wei: int  # S
    liquidity_delta_wei: int  # removed - provided, signed
    p_min_wei: int
    p_max_wei: int
    usd_rate: Optional[Decimal] = None
    rate_date: Optional[str] = None
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        assert self.p_min_wei == (self.revenue_wei - self.spend_wei) + self.liquidity_delta_wei
        assert self.p_max_wei == self.revenue_wei + self.liquidity_delta_wei
        assert self.p_min_wei == self.p_max_wei - self.spend_wei


def profit_bounds(
    revenue_wei: int,
    spend_wei: int,
    liquidity_delta_wei: int,
    usd_rate: Optional[Decimal] = None,
    rate_date: Optional[str] = None,
    warnings: Optional[list[str]] = None,
) -> ProfitEstimate:
    return ProfitEstimate(
        revenue_wei=revenue_wei,
        spend_wei=spend_wei,
        liquidity_delta_wei=liquidity_delta_wei,
        p_min_wei=(revenue_wei - spend_wei) + liquidity_delta_wei,
        p_max_wei=revenue_wei + liquidity_delta_wei,
        usd_rate=usd_rate,
        rate_date=rate_date,
        warnings=list(warnings or []),
    )


@dataclass(frozen=True)
class ReportedFigureCheck:
    """Comparison of computed profit bounds against externally reported figures."""

    reported_p_min_wei: int
    reported_p_max_wei: int
    p_min_discrepancy: bool
    p_max_discrepancy: bool

    @property
    def any_discrepancy(self) -> bool:
        return self.p_min_discrepancy or self.p_max_discrepancy


# reported figures are rounded to 2 decimals, so differences up to half a
# cent of ETH are rounding, not discrepancies
ROUNDING_TOLERANCE_WEI = eth_to_wei("0.005")


def check_reported_figures(
    estimate: ProfitEstimate,
    reported_p_min_eth: str,
    reported_p_max_eth: str,
) -> ReportedFigureCheck:
    rep_min = eth_to_wei(reported_p_min_eth)
    rep_max = eth_to_wei(reported_p_max_eth)
    return ReportedFigureCheck(
        reported_p_min_wei=rep_min,
        reported_p_max_wei=rep_max,
        p_min_discrepancy=abs(estimate.p_min_wei - rep_min) > ROUNDING_TOLERANCE_WEI,
        p_max_discrepancy=abs(estimate.p_max_wei - rep_max) > ROUNDING_TOLERANCE_WEI,
    )


def detect_pump_and_dump(
    series: list[PricePoint],
    config: DetectionConfig = DetectionConfig(),
    window: Optional[ScamWindow] = None,
) -> Optional[PumpFinding]:
    """Price rose >= rise factor to a peak, then lost >= collapse share by the last trade."""
    points = series
    if window is not None:
        points = [p for p in series if window.start <= p.position <= window.end]
    if len(points) < 3:
        return None

    first = points[0]
    peak = max(points, key=lambda p: (p.price, [-c for c in p.position]))
    last = points[-1]
    if first.price <= 0 or peak.price <= 0:
        return None

    rise = peak.price / first.price
    collapse = 1 - last.price / peak.price
    rise_needed = Fraction(config.pump_rise_factor).limit_denominator(10**6)
    collapse_needed = Fraction(config.pump_collapse).limit_denominator(10**6)
    if rise < rise_needed or collapse < collapse_needed:
        return None

    secondary = []
    for i in range(1, len(points) - 1):
        p = points[i]
        if p.position == peak.position:
            continue
        if points[i - 1].price < p.price and p.price >= points[i + 1].price:
            if p.price >= first.price * rise_needed:
                secondary.append(p.position)

    return PumpFinding(
        peak_position=peak.position,
        peak_price=peak.price,
        rise_factor=rise,
        collapse_factor=collapse,
        peak_tx=peak.tx_hash,
        secondary_peaks=tuple(secondary),
    )


def _drain_sell(timeline: TokenTimeline, window: ScamWindow) -> Optional[Sell]:
    """The final sell that emptied the pool, when no remove-liquidity call exists."""
    if window.end_reason != "drain_swap":
        return None
    for ev in timeline.events_of(Sell):
        if ev.position == window.end:
            return ev
    return None


def compute_rsl(
    timeline: TokenTimeline,
    attribution: AttributionMap,
    window: Optional[ScamWindow] = None,
    config: DetectionConfig = DetectionConfig(),
) -> tuple[int, int, int, list[str]]:
    """(revenue, spend, liquidity_delta) in wei, plus computation warnings.

    When the pool was emptied by a final swap instead of a remove-liquidity
    call, that drain swap is counted on the liquidity side, not as revenue.
    """
    warnings: list[str] = []
    if window is None and not timeline.is_empty:
        window = detect_scam_window(timeline, config.drain_threshold)

    counted = None if config.economics_all_addresses else economics_set(attribution)
    drain = _drain_sell(timeline, window) if window is not None else None
    if drain is not None and counted is not None and drain.seller not in counted:
        drain = None  # someone else's swap emptied the pool: not a disguised exit

    revenue = 0
    spend = 0
    for ev in timeline.events:
        if isinstance(ev, Sell):
            if drain is not None and ev.position == drain.position:
                continue
            if counted is None or ev.seller in counted:
                revenue += ev.eth_out
        elif isinstance(ev, Buy):
            if counted is None or ev.buyer in counted:
                spend += ev.eth_in

    provided = sum(e.eth_in for e in timeline.events_of(LiquidityAdded))
    removed = sum(e.eth_out for e in timeline.events_of(LiquidityRemoved))
    if drain is not None:
        removed += drain.eth_out
        warnings.append(
            "no remove-liquidity call: the final drain swap is counted as the exit "
            f"(tx 0x{drain.tx_hash.hex()})"
        )
    if provided == 0 and removed == 0:
        warnings.append("no liquidity events: liquidity delta is zero")
    return revenue, spend, removed - provided, warnings


def classify_rug_pull(
    timeline: TokenTimeline,
    attribution: AttributionMap,
    series: Optional[list[PricePoint]] = None,
    window: Optional[ScamWindow] = None,
    config: DetectionConfig = DetectionConfig(),
) -> ScamClassification:
    if timeline.is_empty or timeline.pair is None or not timeline.reserve_checkpoints:
        return ScamClassification(
            verdict="none", pump_and_dump=False, confidence="low", evidence=[]
        )

    if window is None:
        window = detect_scam_window(timeline, config.drain_threshold)
    if series is None:
        from chainsleuth.lifecycle import price_series

        series = price_series(timeline)

    cluster = economics_set(attribution)
    sells = timeline.events_of(Sell)
    scammer_sells = [s for s in sells if s.seller in cluster]
    scammer_sell_eth = sum(s.eth_out for s in scammer_sells)
    has_sell_cluster = (
        scammer_sell_eth > config.min_scammer_sell_wei and len(scammer_sells) > 0
    )

    removes = timeline.events_of(LiquidityRemoved)
    max_reserve = max((c.reserve_eth for c in timeline.reserve_checkpoints), default=0)
    final_reserve = timeline.reserve_checkpoints[-1].reserve_eth

    full_remove = False
    for removal in removes:
        # the sync inside the remove tx already reflects post-burn reserves,
        # so "before" means strictly earlier transactions
        before = [
            c.reserve_eth
            for c in timeline.reserve_checkpoints
            if c.position[:2] < removal.position[:2]
        ]
        reserve_before = before[-1] if before else 0
        if reserve_before > 0 and Fraction(removal.eth_out, reserve_before) >= Fraction(
            config.remove_share
        ).limit_denominator(10**6):
            full_remove = True

    drained = (
        max_reserve > 0
        and Fraction(final_reserve, max_reserve)
        <= 1 - Fraction(config.drain_threshold).limit_denominator(10**6)
    )

    pump = detect_pump_and_dump(series, config, window) if series else None

    evidence: list[Evidence] = []
    adds = timeline.events_of(LiquidityAdded)
    if adds:
        evidence.append(Evidence(
            claim="liquidity was provided to open trading",
            tx_hashes=tuple(e.tx_hash for e in adds),
        ))
    buys = timeline.events_of(Buy)
    cluster_buys = [b for b in buys if b.buyer in cluster]
    if cluster_buys:
        evidence.append(Evidence(
            claim="scammer-attributed addresses bought the token, inflating demand",
            tx_hashes=tuple(b.tx_hash for b in cluster_buys),
        ))
    if scammer_sells:
        evidence.append(Evidence(
            claim="scammer-attributed addresses sold the token for ETH",
            tx_hashes=tuple(s.tx_hash for s in scammer_sells),
        ))
    if removes:
        evidence.append(Evidence(
            claim="liquidity was removed, halting trading",
            tx_hashes=tuple(e.tx_hash for e in removes),
        ))
    if drained and not removes:
        drain = _drain_sell(timeline, window)
        if drain is not None:
            evidence.append(Evidence(
                claim="final swaps emptied the pool without a remove-liquidity call",
                tx_hashes=(drain.tx_hash,),
            ))

    if has_sell_cluster and (full_remove or drained):
        verdict = "sell_rug_pull"
    elif full_remove and not has_sell_cluster:
        verdict = "simple_rug_pull"
    else:
        verdict = "none"
        evidence = []

    certain = certain_set(attribution)
    if verdict == "none":
        confidence = "low"
    elif not adds:
        confidence = "low"
    else:
        one_cluster = (
            bool(certain)
            and adds[0].provider in certain
            and (not removes or all(r.recipient in certain for r in removes))
            and (not scammer_sells or any(s.seller in cluster for s in scammer_sells))
        )
        confidence = "high" if one_cluster else "medium"

    return ScamClassification(
        verdict=verdict,
        pump_and_dump=pump is not None,
        confidence=confidence,
        evidence=evidence,
    )


def identify_victims(
    timeline: TokenTimeline,
    attribution: AttributionMap,
    window: Optional[ScamWindow] = None,
) -> VictimSet:
    """Holders left with the token: positive final balance, never cashed out."""
    holders = {a for a, b in timeline.holders_final.items() if b > 0}
    contracts = {timeline.token, timeline.pair} | set(timeline.secondary_pairs)
    sellers = {e.seller for e in timeline.events_of(Sell)}
    removers = {e.recipient for e in timeline.events_of(LiquidityRemoved)}
    attributed = {
        a for a, r in attribution.items()
        if r.certainty == "certain" or "suspected_collusion" in r.roles or "top_seller" in r.roles
    }

    victims: set[Address] = set()
    excluded: dict[Address, str] = {}
    for holder in holders:
        if holder.is_zero:
            excluded[holder] = "zero address"
        elif holder in contracts:
            excluded[holder] = "contract (pool or token)"
        elif holder in removers:
            excluded[holder] = "liquidity remover"
        elif holder in attributed:
            excluded[holder] = "scammer-attributed"
        elif holder in sellers:
            excluded[holder] = "exchanged the token for ETH"
        else:
            victims.add(holder)
    return VictimSet(victims=victims, excluded=excluded)


def detect_advance_fee(timeline: TokenTimeline) -> Optional[AdvanceFeeFinding]:
    """Sells that skim value: pool credited less than debited, or sells that
    also mint liquidity in the same transaction."""
    sells = timeline.events_of(Sell)
    if not sells:
        return None

    skimmed = [s for s in sells if s.tokens_debited > s.tokens_in]
    adds_by_tx = {e.tx_hash for e in timeline.events_of(LiquidityAdded)}
    auto_liq = [s for s in sells if s.tx_hash in adds_by_tx]

    fee_systematic = len(skimmed) == len(sells) and len(skimmed) > 0
    liq_systematic = len(auto_liq) == len(sells) and len(auto_liq) > 0
    if not fee_systematic and not liq_systematic:
        return None

    fee_share = None
    if fee_systematic:
        total_debited = sum(s.tokens_debited for s in sells)
        total_pooled = sum(s.tokens_in for s in sells)
        if total_debited > 0:
            fee_share = Fraction(total_debited - total_pooled, total_debited)

    kind = "both" if fee_systematic and liq_systematic else (
        "transfer_fee" if fee_systematic else "auto_liquidity"
    )
    cited = skimmed if fee_systematic else auto_liq
    return AdvanceFeeFinding(
        kind=kind,
        fee_share=fee_share,
        sell_count=len(sells),
        tx_hashes=tuple(s.tx_hash for s in cited),
    )


def verify_evidence_citations(
    classification: ScamClassification, store: ChainStore
) -> list[str]:
    """Every cited transaction must resolve in the store."""
    missing = []
    for item in classification.evidence:
        for h in item.tx_hashes:
            if not store.has_tx(h):
                missing.append(f"0x{h.hex()}")
    return missing
