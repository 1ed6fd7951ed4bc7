"""Batch command-line driver for the full investigation pipeline.

Subcommands mirror the pipeline stages: ingest (validate/load a bundle),
detect, attribute, trace, report, and serve. Outputs are canonical JSON
artifacts; two runs over the same inputs produce identical bytes, and
the HTTP service returns these same bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from chainsleuth.chaindata.address import Address
from chainsleuth.chaindata.client import ClientConfig, EtherscanLikeClient
from chainsleuth.chaindata.models import PairCreated
from chainsleuth.chaindata.store import ChainStore, load_fixture
from chainsleuth.config import InvestigationConfig
from chainsleuth.errors import ChainsleuthError, ConfigError
from chainsleuth.pipeline import investigate
from chainsleuth.report import build_evidence_report, render
from chainsleuth.serialize import (
    attribution_to_list,
    canonical_json_bytes,
    graph_to_dict,
    laundering_to_dict,
    timeline_to_dict,
)
from chainsleuth.units import eth_to_wei


def _add_source_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--fixtures", metavar="DIR", help="fixture bundle directory")
    source.add_argument("--live", metavar="URL",
                        help="Etherscan-compatible API base URL "
                             "(key from $CHAINSLEUTH_API_KEY)")


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--token", metavar="ADDR", required=True,
                        help="token contract address under investigation")
    parser.add_argument("--out", metavar="DIR", default="out",
                        help="output directory for artifacts")
    parser.add_argument("--format", choices=["json", "md"], default="json",
                        help="report format emphasis (report always writes both)")
    thresholds = parser.add_argument_group("threshold overrides")
    thresholds.add_argument("--max-depth", type=int, default=None,
                            help="trace expansion depth bound (default 6)")
    thresholds.add_argument("--dust-wei", type=int, default=None,
                            help="ignore value flows below this (default 0.01 ETH)")
    thresholds.add_argument("--pump-rise", type=float, default=None,
                            help="pump detection rise factor (default 5.0)")
    thresholds.add_argument("--pump-collapse", type=float, default=None,
                            help="pump detection collapse share (default 0.9)")
    thresholds.add_argument("--kyc-eth", type=str, default=None,
                            help="KYC flag threshold in ETH (default 1)")
    thresholds.add_argument("--drain-threshold", type=float, default=None,
                            help="reserve-fall share that counts as a drain (default 0.9)")
    thresholds.add_argument("--peel-min-hops", type=int, default=None,
                            help="minimum peel chain hops (default 3)")
    thresholds.add_argument("--burner-max-tx", type=int, default=None,
                            help="burner lifetime transaction cap (default 10)")
    thresholds.add_argument("--top-seller-epsilon", type=float, default=None,
                            help="peak-price tolerance for top sellers (default 0.05)")
    thresholds.add_argument("--all-addresses", action="store_true",
                            help="count every address in revenue/spend, not only "
                                 "attributed ones")
    parser.add_argument("--anonymize", action="store_true",
                        help="truncate addresses in rendered output")


def _config_from_args(args: argparse.Namespace) -> InvestigationConfig:
    return InvestigationConfig.from_overrides(
        max_depth=getattr(args, "max_depth", None),
        dust_threshold_wei=getattr(args, "dust_wei", None),
        pump_rise_factor=getattr(args, "pump_rise", None),
        pump_collapse=getattr(args, "pump_collapse", None),
        kyc_threshold_wei=(
            eth_to_wei(args.kyc_eth) if getattr(args, "kyc_eth", None) else None
        ),
        drain_threshold=getattr(args, "drain_threshold", None),
        peel_min_hops=getattr(args, "peel_min_hops", None),
        burner_max_lifetime_tx=getattr(args, "burner_max_tx", None),
        top_seller_epsilon=getattr(args, "top_seller_epsilon", None),
        economics_all_addresses=getattr(args, "all_addresses", False) or None,
        anonymize=getattr(args, "anonymize", False) or None,
    )


def _load_store(args: argparse.Namespace) -> tuple[ChainStore, str]:
    if args.fixtures:
        return load_fixture(args.fixtures), os.path.abspath(args.fixtures)
    if not args.token:
        raise ConfigError("--live mode requires --token")
    token = Address.from_hex(args.token)
    cache_dir = os.path.join(args.out, "cache")
    client = EtherscanLikeClient(ClientConfig(base_url=args.live, cache_dir=cache_dir))
    store = ChainStore()

    from chainsleuth.chaindata.models import TokenMeta

    info = client.fetch_token_info(token) or {}
    store.add_token(TokenMeta(
        address=token,
        decimals=info.get("decimals", 18),
        name=info.get("name"),
        symbol=info.get("symbol"),
    ))
    client.fetch_address_history(token, store)
    # pool discovery: creation events are factory-emitted, so they need a
    # topic-filtered query; then the pool's own history completes the picture
    for log_event in client.fetch_pair_created_logs(token):
        if log_event.tx_hash not in store.transactions:
            parent = client.fetch_transaction(log_event.tx_hash)
            if parent is not None:
                store.add_transaction(parent)
        if log_event.tx_hash in store.transactions:
            store.add_log(log_event)
    store.reindex()
    for pair in store.pairs_for_token(token):
        client.fetch_address_history(pair, store)
    return store, args.live


def _contract_source(args: argparse.Namespace, token: Address) -> Optional[str]:
    if not args.fixtures:
        return None
    path = os.path.join(args.fixtures, "contracts", f"{token.hex}.sol")
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    return None


def _write(out_dir: str, name: str, payload: bytes) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "wb") as fh:
        fh.write(payload)
    return path


def _verdict_model(report_model: dict) -> dict:
    return {
        "schema_version": report_model["schema_version"],
        "token": report_model["token"],
        "scam_window": report_model["scam_window"],
        "classification": report_model["classification"],
        "economics": report_model["economics"],
        "victims": report_model["victims"],
        "contract_analysis": report_model["contract_analysis"],
    }


def _run_pipeline(args: argparse.Namespace):
    config = _config_from_args(args)
    store, source = _load_store(args)
    token = Address.from_hex(args.token)
    if token not in store.tokens:
        raise ConfigError(
            f"token {token} is not registered in the data source (tokens.json)"
        )
    result = investigate(
        store, token, config,
        contract_source=_contract_source(args, token),
        trace_depth=config.trace.max_depth,
    )
    report = build_evidence_report(result, source_label=source)
    return result, report


def cmd_ingest(args: argparse.Namespace) -> int:
    store, source = _load_store(args)
    print(f"loaded {source}: {len(store.transactions)} transactions, "
          f"{len(store.logs)} logs, {len(store.tokens)} tokens, "
          f"{len(store.tags)} tags")
    for errmsg in store.decode_errors():
        print(f"decode warning: {errmsg}")
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    result, report = _run_pipeline(args)
    _write(args.out, "timeline.json",
           canonical_json_bytes(timeline_to_dict(result.timeline, result.config.anonymize)))
    _write(args.out, "verdict.json", canonical_json_bytes(_verdict_model(report.model)))
    print(f"verdict: {result.classification.verdict} "
          f"(confidence {result.classification.confidence}, "
          f"pump_and_dump={result.classification.pump_and_dump})")
    return 0


def cmd_attribute(args: argparse.Namespace) -> int:
    result, _ = _run_pipeline(args)
    _write(args.out, "attribution.json",
           canonical_json_bytes(attribution_to_list(result.attribution,
                                                    result.config.anonymize)))
    certain = sum(1 for r in result.attribution.values() if r.certainty == "certain")
    print(f"attributed {len(result.attribution)} addresses ({certain} certain)")
    return 0


def cmd_trace(args: argparse.Namespace) -> int:
    result, _ = _run_pipeline(args)
    payload = {
        "graph": graph_to_dict(result.graph, result.config.anonymize),
        "laundering": laundering_to_dict(result.laundering, result.config.anonymize),
    }
    _write(args.out, "trace.json", canonical_json_bytes(payload))
    nodes = len(result.graph.nodes) if result.graph else 0
    print(f"trace graph: {nodes} nodes; "
          f"strategies: {', '.join(result.laundering.strategies) if result.laundering else 'n/a'}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    result, report = _run_pipeline(args)
    _write(args.out, "timeline.json",
           canonical_json_bytes(timeline_to_dict(result.timeline, result.config.anonymize)))
    _write(args.out, "verdict.json", canonical_json_bytes(_verdict_model(report.model)))
    _write(args.out, "attribution.json",
           canonical_json_bytes(attribution_to_list(result.attribution,
                                                    result.config.anonymize)))
    _write(args.out, "trace.json", canonical_json_bytes({
        "graph": graph_to_dict(result.graph, result.config.anonymize),
        "laundering": laundering_to_dict(result.laundering, result.config.anonymize),
    }))
    json_path = _write(args.out, "report.json", render(report, "machine"))
    md_path = _write(args.out, "report.md", render(report, "human"))
    print(f"wrote {json_path} and {md_path}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from chainsleuth.service import create_app

    app = create_app(args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainsleuth",
        description="Rug-pull investigation engine: detect, attribute, trace, report.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser(
        "ingest", help="validate and load a data source",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_source_args(p_ingest)
    p_ingest.add_argument("--token", metavar="ADDR", default=None,
                          help="token address (required for --live)")
    p_ingest.add_argument("--out", metavar="DIR", default="out",
                          help="output directory (live cache lands here)")
    p_ingest.set_defaults(func=cmd_ingest)

    for name, func, help_text in [
        ("detect", cmd_detect, "build the timeline and classify the scheme"),
        ("attribute", cmd_attribute, "attribute scammer addresses and roles"),
        ("trace", cmd_trace, "follow the money to terminal endpoints"),
        ("report", cmd_report, "produce the full evidence dossier"),
    ]:
        p = sub.add_parser(name, help=help_text,
                           formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        _add_source_args(p)
        _add_common_args(p)
        p.set_defaults(func=func)

    p_serve = sub.add_parser(
        "serve", help="run the local investigation HTTP service",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p_serve.add_argument("--data-dir", default=os.environ.get("CHAINSLEUTH_DATA_DIR", "data"),
                         help="state directory (env CHAINSLEUTH_DATA_DIR)")
    p_serve.add_argument("--host", default=os.environ.get("CHAINSLEUTH_BIND", "127.0.0.1"),
                         help="bind address (env CHAINSLEUTH_BIND)")
    p_serve.add_argument("--port", type=int, default=8377)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ChainsleuthError as exc:
        sys.stderr.write(json.dumps(exc.payload()) + "\n")
        return 1
    except Exception as exc:  # unexpected: still structured, still exit 1
        sys.stderr.write(json.dumps({
            "code": "internal_error", "message": str(exc), "detail": type(exc).__name__,
        }) + "\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
