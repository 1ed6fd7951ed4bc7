"""Scammer-address attribution and role assignment.

Certain roles come only from creation and liquidity events: the deployer,
the wallets that funded the deployer before creation, the initial
liquidity provider and the liquidity remover. Everything else (selling at
the peak, balance spikes during the scam) stays permanently suspected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from chainsleuth.chaindata.address import Address
from chainsleuth.chaindata.store import ChainStore
from chainsleuth.config import AttributionConfig
from chainsleuth.lifecycle import (
    Buy,
    Created,
    LiquidityAdded,
    LiquidityRemoved,
    PricePoint,
    ScamWindow,
    Sell,
    TokenTimeline,
)

CERTAIN_ROLES = {"deployer", "deployer_funder", "liquidity_provider", "liquidity_remover"}
SUSPECTED_ROLES = {"top_seller", "suspected_collusion", "victim_candidate", "degen_candidate"}


@dataclass
class AddressRole:
    address: Address
    roles: set[str] = field(default_factory=set)
    certainty: str = "suspected"  # "certain" | "suspected"
    rationale: list[str] = field(default_factory=list)
    citations: list[bytes] = field(default_factory=list)

    def add(self, role: str, why: str, tx_hash: Optional[bytes] = None) -> None:
        self.roles.add(role)
        self.rationale.append(why)
        if tx_hash is not None and tx_hash not in self.citations:
            self.citations.append(tx_hash)
        if role in CERTAIN_ROLES:
            self.certainty = "certain"


AttributionMap = dict[Address, AddressRole]


def certain_set(attribution: AttributionMap) -> set[Address]:
    return {a for a, r in attribution.items() if r.certainty == "certain"}


def economics_set(attribution: AttributionMap) -> set[Address]:
    """Addresses whose trades count toward scammer revenue/spend.

    Certain roles plus collusion-suspected wallets (funded from the scam
    cluster during the window). Peak sellers alone stay out: they may just
    be lucky participants.
    """
    out = set()
    for addr, role in attribution.items():
        if role.certainty == "certain" or "suspected_collusion" in role.roles:
            out.add(addr)
    return out


def find_top_sellers(
    timeline: TokenTimeline,
    series: list[PricePoint],
    epsilon: float = 0.05,
) -> set[Address]:
    """Sellers whose execution price reached at least (1 - epsilon) x peak."""
    if not series:
        return set()
    peak = max(p.price for p in series)
    eps = Fraction(epsilon).limit_denominator(10**6)
    cutoff = peak * (1 - eps)
    sells_by_pos = {e.position: e for e in timeline.events_of(Sell)}
    out = set()
    for point in series:
        if point.kind == "sell" and point.price >= cutoff:
            sell = sells_by_pos.get(point.position)
            if sell is not None:
                out.add(sell.seller)
    return out


THIN_WALLET_TXCOUNT = 10


def _funding_chain(
    store: ChainStore,
    deployer: Address,
    before_timestamp: int,
    max_depth: int,
) -> dict[Address, bytes]:
    """Wallets that funded the deployer (transitively) before creation.

    Walkback stops at tagged services (an exchange paying out to the
    future deployer is an on-ramp, not an accomplice) and recurses only
    through thin pass-through wallets, so one active funder does not pull
    its whole payment history into the scammer set.
    """
    found: dict[Address, bytes] = {}
    frontier = [deployer]
    seen = {deployer}
    for _ in range(max_depth):
        next_frontier = []
        for node in frontier:
            for tx in store.transactions_for(node):
                if tx.to != node or tx.value_wei == 0 or tx.timestamp > before_timestamp:
                    continue
                funder = tx.sender
                if funder in seen or funder.is_zero:
                    continue
                seen.add(funder)
                if store.lookup_tag(funder) is not None:
                    continue
                found[funder] = tx.hash
                if store.activity(funder)["tx_count"] <= THIN_WALLET_TXCOUNT:
                    next_frontier.append(funder)
        frontier = next_frontier
        if not frontier:
            break
    return found


def attribute_scammer_addresses(
    timeline: TokenTimeline,
    store: ChainStore,
    series: Optional[list[PricePoint]] = None,
    window: Optional[ScamWindow] = None,
    p_max_wei: Optional[int] = None,
    config: AttributionConfig = AttributionConfig(),
) -> AttributionMap:
    """Assign scammer roles to addresses around one token's lifecycle."""
    attribution: AttributionMap = {}

    def role_for(addr: Address) -> AddressRole:
        if addr not in attribution:
            attribution[addr] = AddressRole(address=addr)
        return attribution[addr]

    created = timeline.events_of(Created)
    if created:
        creation = created[0]
        role_for(creation.creator).add(
            "deployer", "sent the contract-creation transaction", creation.tx_hash
        )
        funders = _funding_chain(
            store, creation.creator, creation.timestamp, config.funder_max_depth
        )
        for funder, tx_hash in funders.items():
            role_for(funder).add(
                "deployer_funder", "funded the deployer before contract creation", tx_hash
            )
    # no creation event: deployer stays unknown; report layer flags the gap

    adds = timeline.events_of(LiquidityAdded)
    if adds:
        first = adds[0]
        role_for(first.provider).add(
            "liquidity_provider", "provided the initial liquidity", first.tx_hash
        )
    for removal in timeline.events_of(LiquidityRemoved):
        role_for(removal.recipient).add(
            "liquidity_remover", "received the removed liquidity", removal.tx_hash
        )

    if series:
        sells_by_pos = {e.position: e for e in timeline.events_of(Sell)}
        for seller in find_top_sellers(timeline, series, config.top_seller_epsilon):
            if seller in attribution and attribution[seller].certainty == "certain":
                continue
            cite = next(
                (s.tx_hash for p, s in sorted(sells_by_pos.items()) if s.seller == seller),
                None,
            )
            role_for(seller).add(
                "top_seller",
                "exchanged the token for ETH at the token's highest value "
                "(possibly just a lucky participant)",
                cite,
            )

    if window is not None and p_max_wei is not None and p_max_wei > 0:
        spike_cutoff = int(p_max_wei * config.spike_share)
        cluster = certain_set(attribution)
        skip = {timeline.token, timeline.pair} | set(timeline.secondary_pairs)
        received: dict[Address, tuple[int, bytes]] = {}
        for tx in store.transactions_ordered():
            if tx.to is None or tx.value_wei == 0 or tx.sender not in cluster:
                continue
            if not (window.start_timestamp <= tx.timestamp <= window.end_timestamp):
                continue
            if tx.to in skip or store.lookup_tag(tx.to) is not None:
                continue
            total, _ = received.get(tx.to, (0, b""))
            received[tx.to] = (total + tx.value_wei, tx.hash)
        for addr, (total, tx_hash) in received.items():
            if total >= spike_cutoff and addr not in cluster:
                role_for(addr).add(
                    "suspected_collusion",
                    "balance spiked during the scam window, funded from the scam cluster",
                    tx_hash,
                )

    _annotate_degens(attribution, timeline, store, config)
    return attribution


def _annotate_degens(
    attribution: AttributionMap,
    timeline: TokenTimeline,
    store: ChainStore,
    config: AttributionConfig,
) -> None:
    """Annotation only: holding many thin tokens never attributes anyone."""
    traders = {e.buyer for e in timeline.events_of(Buy)}
    traders |= {e.seller for e in timeline.events_of(Sell)}
    for addr in traders:
        held_tokens = {
            t.token for t in store.transfers_involving(addr) if t.recipient == addr
        }
        held_tokens.discard(timeline.token)
        if len(held_tokens) >= config.degen_token_count:
            role = attribution.get(addr)
            if role is None:
                role = AddressRole(address=addr)
                attribution[addr] = role
            role.roles.add("degen_candidate")
            role.rationale.append(
                f"holds {len(held_tokens)} distinct thin tokens (annotation only)"
            )
