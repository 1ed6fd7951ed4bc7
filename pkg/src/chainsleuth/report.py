"""Evidence dossier assembly and rendering.

The machine form (report.json) is the canonical artifact: stable field
order, decimal-string amounts, every quantitative claim tied to
transaction citations, full threshold provenance. The human form is a
deterministic markdown rendering of the same model; a gap in an upstream
stage renders as NOT DETERMINED, never as a fabricated value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Optional

import chainsleuth
from chainsleuth.chaindata.store import ChainStore
from chainsleuth.errors import ChainsleuthError
from chainsleuth.frauddetect import verify_evidence_citations
from chainsleuth.lifecycle import Buy, LiquidityAdded, LiquidityRemoved, Sell
from chainsleuth.pipeline import InvestigationResult
from chainsleuth.serialize import (
    AddressText,
    attribution_to_list,
    canonical_json_bytes,
    graph_to_dict,
    iso_utc,
    laundering_to_dict,
    series_to_list,
    timeline_to_dict,
    window_to_dict,
)
from chainsleuth.units import (
    price_to_sci,
    wei_to_eth_2dp,
    wei_to_eth_str,
    wei_to_usd_str,
)

SCHEMA_VERSION = 1

NOT_DETERMINED = "NOT DETERMINED"


@dataclass
class EvidenceReport:
    model: dict

    def tx_citations(self) -> set[str]:
        """Every 0x tx hash anywhere in the model."""
        found: set[str] = set()

        def walk(value: Any) -> None:
            if isinstance(value, str):
                for m in re.finditer(r"0x[0-9a-f]{64}", value):
                    found.add(m.group(0))
            elif isinstance(value, dict):
                for v in value.values():
                    walk(v)
            elif isinstance(value, (list, tuple)):
                for v in value:
                    walk(v)

        walk(self.model)
        return found


def _usd(wei: Optional[int], estimate) -> Optional[str]:
    if wei is None or estimate.usd_rate is None:
        return None
    return wei_to_usd_str(wei, estimate.usd_rate)


def _claim(text: str, citations: list[str]) -> dict:
    return {"text": text, "citations": sorted(set(citations))}


def build_evidence_report(
    result: InvestigationResult,
    source_label: str = "unspecified",
) -> EvidenceReport:
    """Assemble the dossier from pipeline outputs; absent stages leave
    explicit gaps."""
    cfg = result.config
    anonymize = cfg.anonymize
    addr = AddressText(anonymize)
    store = result.store
    timeline = result.timeline
    est = result.estimate

    missing_citations = verify_evidence_citations(result.classification, store)
    if missing_citations:
        raise ChainsleuthError(
            f"evidence cites transactions missing from the store: {missing_citations}"
        )

    meta = store.tokens.get(result.token)

    def tx_hex(h: Optional[bytes]) -> Optional[str]:
        return "0x" + h.hex() if h else None

    # citation pools for the quantitative claims
    sells = timeline.events_of(Sell)
    buys = timeline.events_of(Buy)
    adds = timeline.events_of(LiquidityAdded)
    removes = timeline.events_of(LiquidityRemoved)
    economics_set_ = {
        a for a, r in result.attribution.items()
        if r.certainty == "certain" or "suspected_collusion" in r.roles
    }
    revenue_cites = [tx_hex(s.tx_hash) for s in sells if s.seller in economics_set_]
    spend_cites = [tx_hex(b.tx_hash) for b in buys if b.buyer in economics_set_]
    liquidity_cites = [tx_hex(e.tx_hash) for e in adds + removes]
    transfer_cites = []
    if timeline.events:
        transfer_cites = [tx_hex(timeline.events[0].tx_hash),
                          tx_hex(timeline.events[-1].tx_hash)]

    peak_tx = None
    peak_price = None
    if result.series:
        peak = max(result.series, key=lambda p: (p.price, [-c for c in p.position]))
        peak_tx = tx_hex(peak.tx_hash)
        peak_price = peak.price

    holders_positive = {a for a, b in timeline.holders_final.items() if b > 0}
    contracts = {timeline.token, timeline.pair} | set(timeline.secondary_pairs)
    holders_excl = holders_positive - contracts
    includes_null = timeline.burned_total > 0
    remaining_holders = len(holders_excl) + (1 if includes_null else 0)

    degens = {
        a for a, r in result.attribution.items() if "degen_candidate" in r.roles
    }

    window_end_cite = None
    if result.window is not None:
        enders = [e for e in timeline.events if e.position == result.window.end]
        if enders:
            window_end_cite = tx_hex(enders[0].tx_hash)

    pump_dict = None
    if result.pump is not None:
        pump_dict = {
            "peak_position": list(result.pump.peak_position),
            "peak_price_eth_per_token": price_to_sci(result.pump.peak_price),
            "rise_factor": f"{float(result.pump.rise_factor):.2f}",
            "collapse_share": f"{float(result.pump.collapse_factor):.4f}",
            "peak_tx": tx_hex(result.pump.peak_tx),
            "secondary_peaks": [list(p) for p in result.pump.secondary_peaks],
        }

    advance_fee_dict = None
    if result.advance_fee is not None:
        advance_fee_dict = {
            "kind": result.advance_fee.kind,
            "fee_share": (
                f"{float(result.advance_fee.fee_share):.4f}"
                if result.advance_fee.fee_share is not None
                else None
            ),
            "sell_count": result.advance_fee.sell_count,
            "citations": [tx_hex(h) for h in result.advance_fee.tx_hashes],
        }

    contract_dict = None
    if result.contract_scan is not None:
        contract_dict = {
            "degraded": result.contract_scan.degraded,
            "warnings": result.contract_scan.warnings,
            "disclaimer": (
                "heuristic screening only: absence of findings never means "
                "the contract is safe"
            ),
            "findings": [
                {
                    "kind": f.kind,
                    "lines": [f.line_start, f.line_end],
                    "excerpt": f.excerpt,
                    "detail": f.detail,
                }
                for f in result.contract_scan.findings
            ],
        }

    # scammer wallet profile (primary seed)
    wallet_profile = None
    seed = result.primary_seed
    if seed is not None:
        activity = store.activity(seed)
        wallet_profile = {
            "address": addr(seed),
            "active_from": iso_utc(activity["first_seen"]),
            "active_to": iso_utc(activity["last_seen"]),
            "tx_count": activity["tx_count"],
        }

    narrative = _build_narrative(result, addr, tx_hex, revenue_cites, spend_cites,
                                 liquidity_cites, window_end_cite, peak_tx)

    model = {
        "schema_version": SCHEMA_VERSION,
        "report_kind": "token_investigation",
        "software": {"name": "chainsleuth", "version": chainsleuth.__version__},
        "token": {
            "address": addr(result.token),
            "name": meta.name if meta else None,
            "symbol": meta.symbol if meta else None,
            "decimals": timeline.decimals,
            "creator": addr(meta.creator) if meta and meta.creator else None,
            "creation_tx": tx_hex(meta.creation_tx) if meta else None,
            "total_supply": str(meta.total_supply) if meta else None,
            "pair": addr(timeline.pair),
        },
        "scam_window": window_to_dict(result.window),
        "classification": {
            "verdict": result.classification.verdict,
            "confidence": result.classification.confidence,
            "pump_and_dump": result.classification.pump_and_dump,
            "pump": pump_dict,
            "advance_fee": advance_fee_dict,
            "evidence": [
                _claim(e.claim, [tx_hex(h) for h in e.tx_hashes])
                for e in result.classification.evidence
            ],
        },
        "economics": {
            "scope": "all_addresses" if cfg.detection.economics_all_addresses
                     else "scammer_attributed",
            "revenue_wei": str(est.revenue_wei),
            "revenue_eth": wei_to_eth_str(est.revenue_wei),
            "revenue_usd": _usd(est.revenue_wei, est),
            "spend_wei": str(est.spend_wei),
            "spend_eth": wei_to_eth_str(est.spend_wei),
            "spend_usd": _usd(est.spend_wei, est),
            "liquidity_delta_wei": str(est.liquidity_delta_wei),
            "liquidity_delta_eth": wei_to_eth_str(est.liquidity_delta_wei),
            "liquidity_delta_usd": _usd(est.liquidity_delta_wei, est),
            "min_potential_profit_wei": str(est.p_min_wei),
            "min_potential_profit_eth": wei_to_eth_2dp(est.p_min_wei),
            "min_potential_profit_eth_exact": wei_to_eth_str(est.p_min_wei),
            "min_potential_profit_usd": _usd(est.p_min_wei, est),
            "max_potential_profit_wei": str(est.p_max_wei),
            "max_potential_profit_eth": wei_to_eth_2dp(est.p_max_wei),
            "max_potential_profit_eth_exact": wei_to_eth_str(est.p_max_wei),
            "max_potential_profit_usd": _usd(est.p_max_wei, est),
            "usd_rate": str(est.usd_rate) if est.usd_rate is not None else None,
            "usd_rate_date": est.rate_date,
            "warnings": est.warnings,
            "citations": {
                "revenue": sorted(set(revenue_cites)),
                "spend": sorted(set(spend_cites)),
                "liquidity": sorted(set(liquidity_cites)),
            },
        },
        "market": {
            "transfer_count": timeline.transfer_count,
            "distinct_addresses": timeline.distinct_addresses,
            "remaining_holders": remaining_holders,
            "includes_null_address": includes_null,
            "max_price_eth_per_token": (
                price_to_sci(peak_price) if peak_price is not None else None
            ),
            "peak_tx": peak_tx,
            "citations": sorted(set(c for c in transfer_cites if c)),
        },
        "victims": {
            "count": len(result.victims.victims),
            "addresses": [
                {
                    "address": addr(v),
                    "final_balance": str(timeline.holders_final.get(v, 0)),
                    "degen_candidate": v in degens,
                }
                for v in sorted(result.victims.victims)
            ],
            "excluded": [
                {"address": addr(a), "reason": reason}
                for a, reason in sorted(result.victims.excluded.items())
            ],
            "citations": [c for c in [window_end_cite] if c],
        },
        "attribution": attribution_to_list(result.attribution, anonymize),
        "contract_analysis": contract_dict,
        "trace": graph_to_dict(result.graph, anonymize),
        "laundering": laundering_to_dict(result.laundering, anonymize),
        "wallet_profile": wallet_profile,
        "price_series": series_to_list(result.series, anonymize),
        "narrative": narrative,
        "provenance": {
            "source": source_label,
            "anonymized": anonymize,
            "config": {
                k: (str(v) if isinstance(v, float) else v)
                for k, v in sorted(cfg.snapshot().items())
            },
            "timeline_warnings": [
                {"code": w.code, "message": w.message} for w in timeline.warnings
            ],
        },
    }
    return EvidenceReport(model=model)


def _build_narrative(result, addr, tx_hex, revenue_cites, spend_cites,
                     liquidity_cites, window_end_cite, peak_tx) -> list[dict]:
    est = result.estimate
    timeline = result.timeline
    claims_scheme = []
    created = [e for e in timeline.events if type(e).__name__ == "Created"]
    if created:
        claims_scheme.append(_claim(
            f"The token was created by {addr(created[0].creator)}.",
            [tx_hex(created[0].tx_hash)],
        ))
    for e in result.classification.evidence:
        claims_scheme.append(_claim(e.claim, [tx_hex(h) for h in e.tx_hashes]))
    if result.window is not None and window_end_cite:
        claims_scheme.append(_claim(
            f"The scheme ran from {iso_utc(result.window.start_timestamp)} to "
            f"{iso_utc(result.window.end_timestamp)} ({result.window.end_reason}).",
            [window_end_cite],
        ))

    claims_econ = []
    if revenue_cites:
        claims_econ.append(_claim(
            f"Scammer-attributed addresses earned {wei_to_eth_str(est.revenue_wei)} ETH "
            "selling the token.", revenue_cites))
    if spend_cites:
        claims_econ.append(_claim(
            f"Scammer-attributed addresses spent {wei_to_eth_str(est.spend_wei)} ETH "
            "buying the token.", spend_cites))
    if liquidity_cites:
        claims_econ.append(_claim(
            f"Liquidity taken out exceeded liquidity provided by "
            f"{wei_to_eth_str(est.liquidity_delta_wei)} ETH.", liquidity_cites))
    if peak_tx and result.series:
        peak = max(p.price for p in result.series)
        claims_econ.append(_claim(
            f"The token peaked at {price_to_sci(peak)} ETH per token.", [peak_tx]))

    claims_laundering = []
    if result.laundering is not None:
        for f in result.laundering.findings:
            if f.kind == "none":
                continue
            cites = [("0x" + h.hex()) for h in f.citations]
            if not cites:
                continue
            label = f" via {f.label}" if f.label else ""
            claims_laundering.append(_claim(f"Laundering signal: {f.kind}{label}.", cites))
        if result.laundering.funding.citations:
            claims_laundering.append(_claim(
                f"Seed wallet funding: {result.laundering.funding.description}.",
                ["0x" + h.hex() for h in result.laundering.funding.citations],
            ))

    sections = []
    if claims_scheme:
        sections.append({"section": "scheme", "claims": claims_scheme})
    if claims_econ:
        sections.append({"section": "economics", "claims": claims_econ})
    if claims_laundering:
        sections.append({"section": "laundering", "claims": claims_laundering})
    return sections


def render(report: EvidenceReport, format: str) -> bytes:
    """Render the dossier. 'machine' is canonical JSON; 'human' is markdown."""
    if format == "machine":
        return canonical_json_bytes(report.model)
    if format == "human":
        return _render_markdown(report).encode()
    raise ChainsleuthError(f"unknown report format {format!r} (use machine or human)")


def _nd(value) -> str:
    return str(value) if value is not None else NOT_DETERMINED


def _render_markdown(report: EvidenceReport) -> str:
    m = report.model
    lines: list[str] = []
    add = lines.append

    token = m["token"]
    add(f"# Investigation dossier: token {token['address']}")
    add("")
    add(f"Produced by {m['software']['name']} {m['software']['version']} "
        f"(schema v{m['schema_version']}). Source: {m['provenance']['source']}.")
    add("")

    add("## Verdict")
    add("")
    c = m["classification"]
    add(f"- Classification: **{c['verdict']}** (confidence: {c['confidence']})")
    add(f"- Pump and dump: {'yes' if c['pump_and_dump'] else 'no'}")
    if c["pump"]:
        add(f"  - peak {c['pump']['peak_price_eth_per_token']} ETH/token "
            f"(rise x{c['pump']['rise_factor']}, collapse "
            f"{c['pump']['collapse_share']}), tx {c['pump']['peak_tx']}")
    if c["advance_fee"]:
        add(f"- Advance-fee behaviour: {c['advance_fee']['kind']} across "
            f"{c['advance_fee']['sell_count']} sells")
    add("")

    w = m["scam_window"]
    add("## Active period")
    add("")
    if w is None:
        add(NOT_DETERMINED)
    else:
        add(f"- {w['start_time']} to {w['end_time']} "
            f"({w['duration_seconds']} seconds, end reason: {w['end_reason']})")
        add(f"- block positions {w['start_position']} to {w['end_position']}")
        if w["low_confidence"]:
            add("- LOW CONFIDENCE: no liquidity events or trades anchor this window")
    add("")

    e = m["economics"]
    add("## Economics (scope: " + e["scope"] + ")")
    add("")
    add("| Figure | ETH | USD |")
    add("| --- | --- | --- |")

    def usd_cell(v):
        return f"${v}" if v else NOT_DETERMINED

    add(f"| Revenue from selling the token | {e['revenue_eth']} | {usd_cell(e['revenue_usd'])} |")
    add(f"| ETH spent buying the token | {e['spend_eth']} | {usd_cell(e['spend_usd'])} |")
    add(f"| Liquidity removed minus provided | {e['liquidity_delta_eth']} | {usd_cell(e['liquidity_delta_usd'])} |")
    add(f"| Minimum potential profit | {e['min_potential_profit_eth']} | {usd_cell(e['min_potential_profit_usd'])} |")
    add(f"| Maximum potential profit | {e['max_potential_profit_eth']} | {usd_cell(e['max_potential_profit_usd'])} |")
    add("")
    if e["usd_rate"]:
        add(f"USD at {e['usd_rate']} USD/ETH (opening rate, {e['usd_rate_date']}).")
    else:
        add(f"USD conversion: {NOT_DETERMINED} (no rate for the scam date).")
    for warning in e["warnings"]:
        add(f"- note: {warning}")
    add("")

    mk = m["market"]
    add("## Market footprint")
    add("")
    add(f"- Token transfers: {mk['transfer_count']}")
    add(f"- Distinct addresses in transfers: {mk['distinct_addresses']}")
    holders = str(mk["remaining_holders"])
    if mk["includes_null_address"]:
        holders += " (includes the null address)"
    add(f"- Remaining holders after the scam (excluding contracts): {holders}")
    add(f"- Maximum price during the scam: {_nd(mk['max_price_eth_per_token'])} ETH/token")
    add("")

    v = m["victims"]
    add("## Victims")
    add("")
    add(f"{v['count']} addresses bought the token and could never exchange it back.")
    degen_count = sum(1 for x in v["addresses"] if x["degen_candidate"])
    if degen_count:
        add(f"{degen_count} of them are annotated as likely degen traders "
            "(they still count as victims).")
    add("")

    add("## Scammer wallet profile")
    add("")
    wp = m["wallet_profile"]
    if wp is None:
        add(NOT_DETERMINED)
    else:
        add(f"- Wallet: {wp['address']}")
        add(f"- Active: {_nd(wp['active_from'])} to {_nd(wp['active_to'])}")
        add(f"- Transactions on record: {wp['tx_count']}")
    add("")

    add("## Money laundering")
    add("")
    laundering = m["laundering"]
    if laundering is None:
        add(NOT_DETERMINED)
    else:
        add(f"- Strategies: {', '.join(laundering['strategies'])}")
        cashout = ", ".join(
            f"{f['label']} ({f['amount_eth']} ETH"
            + (", KYC-scale" if f["kyc_flag"] else "") + ")"
            for f in laundering["cashout"]
        )
        add(f"- Cash-out: {cashout if cashout else 'unknown'}")
        if laundering["cashout_candidates"]:
            cands = ", ".join(f["label"] for f in laundering["cashout_candidates"])
            add(f"- Co-mingled candidate endpoints (not attributable): {cands}")
        add(f"- Funding: {laundering['funding']['description']}")
    add("")

    ca = m["contract_analysis"]
    add("## Contract screening")
    add("")
    if ca is None:
        add(f"{NOT_DETERMINED} (no verified source supplied)")
    else:
        add(ca["disclaimer"] + ".")
        if ca["findings"]:
            for f in ca["findings"]:
                add(f"- {f['kind']} at lines {f['lines'][0]}-{f['lines'][1]}: "
                    f"`{f['excerpt']}`")
        else:
            add("- no trapdoor patterns matched")
    add("")

    add("## Narrative")
    add("")
    for section in m["narrative"]:
        add(f"### {section['section'].capitalize()}")
        add("")
        for claim in section["claims"]:
            cites = ", ".join(claim["citations"])
            add(f"- {claim['text']} [{cites}]")
        add("")

    add("## Cited transactions")
    add("")
    for h in sorted(report.tx_citations()):
        add(f"- {h}")
    add("")

    add("## Provenance")
    add("")
    add(f"- anonymized addresses: {m['provenance']['anonymized']}")
    for key, value in m["provenance"]["config"].items():
        add(f"- {key}: {value}")
    add("")
    return "\n".join(lines)
