"""Per-token event timeline and price series reconstruction.

Turns decoded transfers and pair events into an ordered lifecycle:
creation, mints, liquidity adds/removes, buys, sells and plain
transfers, with final holder balances and pool-reserve checkpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from chainsleuth.chaindata.address import Address, ZERO_ADDRESS
from chainsleuth.chaindata.models import (
    Erc20Transfer,
    PairBurn,
    PairCreated,
    PairMint,
    PairSwap,
    PairSync,
    Position,
    Warning_,
)
from chainsleuth.chaindata.store import ChainStore
from chainsleuth.errors import IntegrityError
from chainsleuth.units import WEI_PER_ETH


@dataclass(frozen=True)
class Created:
    creator: Address
    position: Position
    timestamp: int
    tx_hash: bytes


@dataclass(frozen=True)
class Minted:
    to: Address
    amount: int
    position: Position
    timestamp: int
    tx_hash: bytes


@dataclass(frozen=True)
class LiquidityAdded:
    eth_in: int
    tokens_in: int
    provider: Address
    position: Position
    timestamp: int
    tx_hash: bytes


@dataclass(frozen=True)
class Buy:
    buyer: Address
    eth_in: int
    tokens_out: int
    position: Position
    timestamp: int
    tx_hash: bytes


@dataclass(frozen=True)
class Sell:
    seller: Address
    tokens_in: int
    eth_out: int
    position: Position
    timestamp: int
    tx_hash: bytes
    # total amount the seller was debited in the same tx; exceeds tokens_in
    # for fee-skimming tokens
    tokens_debited: int = 0


@dataclass(frozen=True)
class LiquidityRemoved:
    eth_out: int
    tokens_out: int
    recipient: Address
    position: Position
    timestamp: int
    tx_hash: bytes


@dataclass(frozen=True)
class PlainTransfer:
    sender: Address
    recipient: Address
    amount: int
    position: Position
    timestamp: int
    tx_hash: bytes


TokenEvent = Union[Created, Minted, LiquidityAdded, Buy, Sell, LiquidityRemoved, PlainTransfer]

EVENT_KIND_NAMES = {
    Created: "created",
    Minted: "minted",
    LiquidityAdded: "liquidity_added",
    Buy: "buy",
    Sell: "sell",
    LiquidityRemoved: "liquidity_removed",
    PlainTransfer: "transfer",
}


@dataclass(frozen=True)
class ReserveCheckpoint:
    position: Position
    reserve_token: int
    reserve_eth: int
    had_swap: bool  # tx containing this sync also contained a swap


@dataclass
class TokenTimeline:
    token: Address
    decimals: int
    pair: Optional[Address]
    token_slot: Optional[int]  # 0 or 1: the token's side in the pair
    events: list[TokenEvent]
    holders_final: dict[Address, int]
    reserve_checkpoints: list[ReserveCheckpoint]
    warnings: list[Warning_] = field(default_factory=list)
    transfer_count: int = 0
    distinct_addresses: int = 0
    burned_total: int = 0
    secondary_pairs: list[Address] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not self.events

    def events_of(self, *kinds) -> list[TokenEvent]:
        return [e for e in self.events if isinstance(e, kinds)]


@dataclass(frozen=True)
class PricePoint:
    position: Position
    timestamp: int
    price: Fraction  # ETH per display-unit token, exact
    kind: str  # "buy" | "sell"
    tx_hash: bytes


@dataclass(frozen=True)
class ScamWindow:
    start: Position
    end: Position
    start_timestamp: int
    end_timestamp: int
    low_confidence: bool
    end_reason: str  # liquidity_removed | drain_swap | all_events


def _eth_volume_of_pair(store: ChainStore, pair: Address, eth_slot: int) -> int:
    total = 0
    for ev in store.pair_events(pair):
        if isinstance(ev, PairSwap):
            total += (ev.amount0_in + ev.amount0_out) if eth_slot == 0 else (
                ev.amount1_in + ev.amount1_out
            )
        elif isinstance(ev, (PairMint, PairBurn)):
            total += ev.amount0 if eth_slot == 0 else ev.amount1
    return total


def canonical_pair(store: ChainStore, token: Address) -> tuple[Optional[Address], list[Address]]:
    """The pair with the largest cumulative ETH-side volume, plus any others."""
    pairs = store.pairs_for_token(token)
    if not pairs:
        return None, []
    scored = []
    for p in pairs:
        info = store.pair_info(p)
        eth_slot = 1 if info.token0 == token else 0
        scored.append((_eth_volume_of_pair(store, p, eth_slot), p))
    scored.sort(key=lambda s: (-s[0], s[1]))
    return scored[0][1], [p for _, p in scored[1:]]


def build_timeline(token: Address, store: ChainStore) -> TokenTimeline:
    meta = store.tokens.get(token)
    if meta is None:
        raise IntegrityError(f"token {token} not registered in store (unknown decimals)")

    warnings: list[Warning_] = []
    pair, other_pairs = canonical_pair(store, token)
    if other_pairs:
        warnings.append(Warning_(
            code="multiple_pairs",
            message=f"token trades in {len(other_pairs) + 1} pairs; "
                    f"using highest-volume pair {pair}",
        ))

    token_slot: Optional[int] = None
    pair_events = []
    if pair is not None:
        info = store.pair_info(pair)
        token_slot = 0 if info.token0 == token else 1
        pair_events = [e for e in store.pair_events(pair) if not isinstance(e, PairCreated)]

    transfers = store.token_transfers(token)

    # group everything by transaction, then walk transactions in order
    by_tx: dict[bytes, dict] = {}
    for t in transfers:
        by_tx.setdefault(t.tx_hash, {"transfers": [], "pair": []})["transfers"].append(t)
    for ev in pair_events:
        by_tx.setdefault(ev.tx_hash, {"transfers": [], "pair": []})["pair"].append(ev)

    # a transfer counterparty emitting pair events without a PairCreated
    # record is an unlinkable pool: keep it visible as an integrity warning
    counterparties = {t.sender for t in transfers} | {t.recipient for t in transfers}
    for cp in sorted(counterparties):
        if cp != pair and store.pair_events(cp) and store.pair_info(cp) is None:
            warnings.append(Warning_(
                code="missing_pair_created",
                message=f"address {cp} emits pair events but has no PairCreated record",
            ))

    events: list[TokenEvent] = []
    checkpoints: list[ReserveCheckpoint] = []
    eth_slot = 1 - token_slot if token_slot is not None else None

    if meta.creation_tx is not None:
        tx = store.tx(meta.creation_tx)
        events.append(Created(
            creator=meta.creator,
            position=(tx.block_number, tx.tx_index, -1),
            timestamp=tx.timestamp,
            tx_hash=tx.hash,
        ))

    prev_product: Optional[int] = None

    for tx_hash in sorted(by_tx, key=lambda h: store.position_of(h)):
        tx = store.tx(tx_hash)
        group = by_tx[tx_hash]
        tx_transfers: list[Erc20Transfer] = sorted(group["transfers"], key=lambda t: t.log_index)
        tx_pair = sorted(group["pair"], key=lambda e: e.log_index)
        consumed: set[int] = set()

        def take_transfer(pred) -> Optional[Erc20Transfer]:
            for t in tx_transfers:
                if t.log_index not in consumed and pred(t):
                    consumed.add(t.log_index)
                    return t
            return None

        def pos(log_index: int) -> Position:
            return (tx.block_number, tx.tx_index, log_index)

        had_swap = any(isinstance(e, PairSwap) for e in tx_pair)

        for ev in tx_pair:
            if isinstance(ev, PairSwap):
                tok_in = ev.amount0_in if token_slot == 0 else ev.amount1_in
                tok_out = ev.amount0_out if token_slot == 0 else ev.amount1_out
                eth_in = ev.amount0_in if eth_slot == 0 else ev.amount1_in
                eth_out = ev.amount0_out if eth_slot == 0 else ev.amount1_out
                if tok_out > 0 and eth_in > 0 and tok_in == 0:
                    t = take_transfer(
                        lambda t: t.sender == pair and t.amount == tok_out
                    ) or take_transfer(lambda t: t.sender == pair)
                    buyer = t.recipient if t is not None else ev.to
                    events.append(Buy(
                        buyer=buyer, eth_in=eth_in, tokens_out=tok_out,
                        position=pos(ev.log_index), timestamp=tx.timestamp, tx_hash=tx_hash,
                    ))
                elif tok_in > 0 and eth_out > 0 and tok_out == 0:
                    t = take_transfer(
                        lambda t: t.recipient == pair and t.amount == tok_in
                    ) or take_transfer(lambda t: t.recipient == pair)
                    seller = t.sender if t is not None else tx.sender
                    debited = sum(
                        x.amount for x in tx_transfers if x.sender == seller
                    ) if t is not None else tok_in
                    events.append(Sell(
                        seller=seller, tokens_in=tok_in, eth_out=eth_out,
                        position=pos(ev.log_index), timestamp=tx.timestamp, tx_hash=tx_hash,
                        tokens_debited=max(debited, tok_in),
                    ))
                else:
                    warnings.append(Warning_(
                        code="ambiguous_swap",
                        message=f"swap in tx {tx.hash_hex} moves the token on both sides",
                        tx_hashes=(tx_hash,),
                    ))
            elif isinstance(ev, PairMint):
                tok_amt = ev.amount0 if token_slot == 0 else ev.amount1
                eth_amt = ev.amount0 if eth_slot == 0 else ev.amount1
                t = take_transfer(
                    lambda t: t.recipient == pair and t.amount == tok_amt
                ) or take_transfer(lambda t: t.recipient == pair)
                provider = t.sender if t is not None else tx.sender
                events.append(LiquidityAdded(
                    eth_in=eth_amt, tokens_in=tok_amt, provider=provider,
                    position=pos(ev.log_index), timestamp=tx.timestamp, tx_hash=tx_hash,
                ))
            elif isinstance(ev, PairBurn):
                tok_amt = ev.amount0 if token_slot == 0 else ev.amount1
                eth_amt = ev.amount0 if eth_slot == 0 else ev.amount1
                take_transfer(lambda t: t.sender == pair and t.amount == tok_amt)
                events.append(LiquidityRemoved(
                    eth_out=eth_amt, tokens_out=tok_amt, recipient=ev.to,
                    position=pos(ev.log_index), timestamp=tx.timestamp, tx_hash=tx_hash,
                ))
            elif isinstance(ev, PairSync):
                r_tok = ev.reserve0 if token_slot == 0 else ev.reserve1
                r_eth = ev.reserve0 if eth_slot == 0 else ev.reserve1
                product = r_tok * r_eth
                if had_swap and prev_product is not None and product < prev_product:
                    warnings.append(Warning_(
                        code="constant_product_violation",
                        message=f"reserve product decreased across swap in tx {tx.hash_hex}",
                        tx_hashes=(tx_hash,),
                    ))
                prev_product = product
                checkpoints.append(ReserveCheckpoint(
                    position=pos(ev.log_index), reserve_token=r_tok,
                    reserve_eth=r_eth, had_swap=had_swap,
                ))

        for t in tx_transfers:
            if t.log_index in consumed:
                continue
            if t.is_mint:
                events.append(Minted(
                    to=t.recipient, amount=t.amount,
                    position=pos(t.log_index), timestamp=tx.timestamp, tx_hash=tx_hash,
                ))
            else:
                events.append(PlainTransfer(
                    sender=t.sender, recipient=t.recipient, amount=t.amount,
                    position=pos(t.log_index), timestamp=tx.timestamp, tx_hash=tx_hash,
                ))

    events.sort(key=lambda e: e.position)

    holders = store.token_balances(token)
    negative = {a: b for a, b in holders.items() if b < 0}
    if negative:
        warnings.append(Warning_(
            code="negative_balance",
            message=f"{len(negative)} addresses replay to negative balances",
        ))

    participants = set()
    for t in transfers:
        if not t.sender.is_zero:
            participants.add(t.sender)
        if not t.recipient.is_zero:
            participants.add(t.recipient)
    burned = sum(t.amount for t in transfers if t.is_burn)

    return TokenTimeline(
        token=token,
        decimals=meta.decimals,
        pair=pair,
        token_slot=token_slot,
        events=events,
        holders_final=holders,
        reserve_checkpoints=checkpoints,
        warnings=warnings,
        transfer_count=len(transfers),
        distinct_addresses=len(participants),
        burned_total=burned,
        secondary_pairs=other_pairs,
    )


def price_series(timeline: TokenTimeline) -> list[PricePoint]:
    """Execution price (ETH per token) for every buy/sell, in event order."""
    points: list[PricePoint] = []
    scale = Fraction(10**timeline.decimals, WEI_PER_ETH)
    for ev in timeline.events:
        if isinstance(ev, Buy):
            eth, tokens, kind = ev.eth_in, ev.tokens_out, "buy"
        elif isinstance(ev, Sell):
            eth, tokens, kind = ev.eth_out, ev.tokens_in, "sell"
        else:
            continue
        if tokens == 0:
            timeline.warnings.append(Warning_(
                code="zero_token_swap",
                message=f"swap with zero token amount in tx 0x{ev.tx_hash.hex()} skipped",
                tx_hashes=(ev.tx_hash,),
            ))
            continue
        points.append(PricePoint(
            position=ev.position,
            timestamp=ev.timestamp,
            price=Fraction(eth, tokens) * scale,
            kind=kind,
            tx_hash=ev.tx_hash,
        ))
    return points


def detect_scam_window(timeline: TokenTimeline, drain_threshold: float = 0.9) -> ScamWindow:
    """Bound the active scam period: liquidity-add start, drain/remove end."""
    if timeline.is_empty:
        raise IntegrityError("cannot window an empty timeline")

    events = timeline.events
    adds = timeline.events_of(LiquidityAdded)
    removes = timeline.events_of(LiquidityRemoved)
    sells = timeline.events_of(Sell)

    start_ev = adds[0] if adds else events[0]

    end_ev = None
    end_reason = "all_events"
    low_confidence = False

    if removes:
        end_ev = removes[-1]
        end_reason = "liquidity_removed"
    elif sells and timeline.reserve_checkpoints:
        drain_frac = Fraction(drain_threshold).limit_denominator(10**6)
        max_reserve = 0
        drained_at: Optional[Position] = None
        for cp in timeline.reserve_checkpoints:
            max_reserve = max(max_reserve, cp.reserve_eth)
            if max_reserve > 0 and Fraction(cp.reserve_eth, max_reserve) <= 1 - drain_frac:
                drained_at = cp.position
        if drained_at is not None:
            # checkpoints precede the swap event within a tx, so compare by tx
            eligible = [
                s for s in sells if (s.position[0], s.position[1]) <= drained_at[:2]
            ] or sells
            end_ev = eligible[-1]
            end_reason = "drain_swap"

    if end_ev is None:
        end_ev = events[-1]
        low_confidence = not adds and not sells and not timeline.events_of(Buy)

    start, end = start_ev.position, end_ev.position
    start_ts, end_ts = start_ev.timestamp, end_ev.timestamp
    if end < start:
        end, end_ts = start, start_ts
        low_confidence = True

    if len(events) == 1:
        low_confidence = True

    return ScamWindow(
        start=start,
        end=end,
        start_timestamp=start_ts,
        end_timestamp=end_ts,
        low_confidence=low_confidence,
        end_reason=end_reason,
    )
