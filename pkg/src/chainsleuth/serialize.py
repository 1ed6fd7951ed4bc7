"""Canonical JSON serialization for every exported artifact.

Field order is fixed, amounts are decimal strings, no floats survive to
disk: identical inputs and config produce byte-identical output.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional

from chainsleuth.chaindata.address import Address
from chainsleuth.errors import ChainsleuthError
from chainsleuth.lifecycle import (
    Buy,
    Created,
    EVENT_KIND_NAMES,
    LiquidityAdded,
    LiquidityRemoved,
    Minted,
    PlainTransfer,
    ScamWindow,
    Sell,
    TokenTimeline,
)
from chainsleuth.trace import LaunderingSummary, TraceGraph
from chainsleuth.units import price_to_sci, token_units_to_str, wei_to_eth_str


def _no_floats(value: Any) -> Any:
    if isinstance(value, float):
        raise ChainsleuthError(f"float {value!r} reached the canonical serializer")
    raise TypeError(f"not JSON-serializable: {value!r}")


def canonical_json_bytes(obj: Any) -> bytes:
    return (json.dumps(obj, indent=2, ensure_ascii=False, default=_no_floats) + "\n").encode()


def iso_utc(timestamp: Optional[int]) -> Optional[str]:
    import datetime as dt

    if timestamp is None:
        return None
    return dt.datetime.fromtimestamp(timestamp, dt.timezone.utc).strftime(
        "%Y-%m-%d %H:%M:%S UTC"
    )


class AddressText:
    """Address rendering, full or anonymized, applied uniformly."""

    def __init__(self, anonymize: bool = False):
        self.anonymize = anonymize

    def __call__(self, address: Optional[Address]) -> Optional[str]:
        if address is None:
            return None
        return address.short() if self.anonymize else address.hex


def timeline_event_to_dict(ev, decimals: int, addr: AddressText) -> dict:
    base = {
        "kind": EVENT_KIND_NAMES[type(ev)],
        "position": list(ev.position),
        "timestamp": ev.timestamp,
        "time": iso_utc(ev.timestamp),
        "tx": "0x" + ev.tx_hash.hex(),
    }
    if isinstance(ev, Created):
        base["creator"] = addr(ev.creator)
    elif isinstance(ev, Minted):
        base.update(to=addr(ev.to), amount=str(ev.amount),
                    amount_tokens=token_units_to_str(ev.amount, decimals))
    elif isinstance(ev, LiquidityAdded):
        base.update(provider=addr(ev.provider), eth_in_wei=str(ev.eth_in),
                    eth_in=wei_to_eth_str(ev.eth_in), tokens_in=str(ev.tokens_in))
    elif isinstance(ev, Buy):
        base.update(buyer=addr(ev.buyer), eth_in_wei=str(ev.eth_in),
                    eth_in=wei_to_eth_str(ev.eth_in), tokens_out=str(ev.tokens_out))
    elif isinstance(ev, Sell):
        base.update(seller=addr(ev.seller), tokens_in=str(ev.tokens_in),
                    eth_out_wei=str(ev.eth_out), eth_out=wei_to_eth_str(ev.eth_out),
                    tokens_debited=str(ev.tokens_debited))
    elif isinstance(ev, LiquidityRemoved):
        base.update(recipient=addr(ev.recipient), eth_out_wei=str(ev.eth_out),
                    eth_out=wei_to_eth_str(ev.eth_out), tokens_out=str(ev.tokens_out))
    elif isinstance(ev, PlainTransfer):
        base.update(sender=addr(ev.sender), recipient=addr(ev.recipient),
                    amount=str(ev.amount),
                    amount_tokens=token_units_to_str(ev.amount, decimals))
    return base


def timeline_to_dict(timeline: TokenTimeline, anonymize: bool = False) -> dict:
    addr = AddressText(anonymize)
    return {
        "token": addr(timeline.token),
        "decimals": timeline.decimals,
        "pair": addr(timeline.pair),
        "token_slot": timeline.token_slot,
        "transfer_count": timeline.transfer_count,
        "distinct_addresses": timeline.distinct_addresses,
        "burned_total": str(timeline.burned_total),
        "events": [
            timeline_event_to_dict(e, timeline.decimals, addr) for e in timeline.events
        ],
        "holders_final": {
            addr(a): str(b) for a, b in sorted(timeline.holders_final.items())
        },
        "warnings": [
            {"code": w.code, "message": w.message,
             "txs": ["0x" + h.hex() for h in w.tx_hashes]}
            for w in timeline.warnings
        ],
    }


def series_to_list(series, anonymize: bool = False) -> list[dict]:
    return [
        {
            "position": list(p.position),
            "timestamp": p.timestamp,
            "time": iso_utc(p.timestamp),
            "kind": p.kind,
            "price_eth_per_token": price_to_sci(p.price),
            "price_exact": f"{p.price.numerator}/{p.price.denominator}",
            "tx": "0x" + p.tx_hash.hex(),
        }
        for p in series
    ]


def window_to_dict(window: Optional[ScamWindow]) -> Optional[dict]:
    if window is None:
        return None
    return {
        "start_position": list(window.start),
        "end_position": list(window.end),
        "start_time": iso_utc(window.start_timestamp),
        "end_time": iso_utc(window.end_timestamp),
        "start_timestamp": window.start_timestamp,
        "end_timestamp": window.end_timestamp,
        "duration_seconds": window.end_timestamp - window.start_timestamp,
        "end_reason": window.end_reason,
        "low_confidence": window.low_confidence,
    }


def attribution_to_list(attribution, anonymize: bool = False) -> list[dict]:
    addr = AddressText(anonymize)
    out = []
    for address in sorted(attribution):
        role = attribution[address]
        out.append({
            "address": addr(address),
            "roles": sorted(role.roles),
            "certainty": role.certainty,
            "rationale": role.rationale,
            "citations": ["0x" + h.hex() for h in role.citations],
        })
    return out


def graph_to_dict(graph: Optional[TraceGraph], anonymize: bool = False) -> Optional[dict]:
    if graph is None:
        return None
    from chainsleuth.trace import detect_burners

    burners = detect_burners(graph)
    addr = AddressText(anonymize)
    nodes = []
    for address in sorted(graph.nodes):
        n = graph.nodes[address]
        nodes.append({
            "address": addr(address),
            "depth": n.depth,
            "seed": n.is_seed,
            "terminal": n.terminal,
            "expanded": n.expanded,
            "expandable": address in graph.frontier,
            "data_missing": n.data_missing,
            "tag_category": n.tag_category,
            "tag_label": n.tag_label,
            "roles": list(n.roles),
            "burner": address in burners,
            "tx_count": n.tx_count,
            "first_seen": iso_utc(n.first_seen),
            "last_seen": iso_utc(n.last_seen),
            "total_in_wei": str(n.total_in_wei),
            "total_out_wei": str(n.total_out_wei),
        })
    edges = []
    for (src, dst) in sorted(graph.edges):
        e = graph.edges[(src, dst)]
        edges.append({
            "from": addr(src),
            "to": addr(dst),
            "value_wei": str(e.value_wei),
            "value_eth": wei_to_eth_str(e.value_wei),
            "tx_count": e.tx_count,
            "first_time": iso_utc(e.first_timestamp),
            "last_time": iso_utc(e.last_timestamp),
            "citations": ["0x" + h.hex() for h in e.citations],
        })
    return {
        "seeds": [addr(s) for s in sorted(graph.seeds)],
        "frontier": [addr(a) for a in sorted(graph.frontier)],
        "nodes": nodes,
        "edges": edges,
    }


def finding_to_dict(f, anonymize: bool = False) -> dict:
    addr = AddressText(anonymize)
    return {
        "kind": f.kind,
        "label": f.label,
        "address": addr(f.address),
        "amount_wei": str(f.amount_wei) if f.amount_wei is not None else None,
        "amount_eth": wei_to_eth_str(f.amount_wei) if f.amount_wei is not None else None,
        "kyc_flag": f.kyc_flag,
        "path": [addr(a) for a in f.path],
        "attributable": f.attributable,
        "citations": ["0x" + h.hex() for h in f.citations],
    }


def laundering_to_dict(
    summary: Optional[LaunderingSummary], anonymize: bool = False
) -> Optional[dict]:
    if summary is None:
        return None
    addr = AddressText(anonymize)
    return {
        "strategies": summary.strategies,
        "findings": [finding_to_dict(f, anonymize) for f in summary.findings],
        "cashout": [finding_to_dict(f, anonymize) for f in summary.cashout],
        "cashout_candidates": [
            finding_to_dict(f, anonymize) for f in summary.cashout_candidates
        ],
        "funding": {
            "immediate_funder": addr(summary.funding.immediate_funder),
            "source": addr(summary.funding.source),
            "source_tag": summary.funding.source_tag,
            "via": [addr(a) for a in summary.funding.via_chain],
            "description": summary.funding.description,
            "citations": ["0x" + h.hex() for h in summary.funding.citations],
        },
    }
