"""Rate-limited client for an Etherscan-compatible HTTP API.

Fetches full paginated address histories (transactions and event logs),
deduplicates, repairs cross-references, and writes everything through to
the fixture-bundle cache so a live investigation replays offline.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import dataclass
from typing import Optional

import requests

from chainsleuth.chaindata.address import Address
from chainsleuth.chaindata.models import LogEvent, Transaction, TxStatus
from chainsleuth.chaindata.store import ChainStore, write_fixture
from chainsleuth.errors import ConfigError, IntegrityError, TransportError

log = logging.getLogger(__name__)

API_KEY_ENV = "CHAINSLEUTH_API_KEY"


@dataclass
class ClientConfig:
    base_url: str
    api_key: Optional[str] = None  # falls back to $CHAINSLEUTH_API_KEY
    requests_per_second: float = 4.0
    page_size: int = 100
    max_retries: int = 3
    backoff_seconds: float = 0.5
    cache_dir: Optional[str] = None

    def resolved_key(self) -> str:
        key = self.api_key or os.environ.get(API_KEY_ENV)
        if not key:
            raise ConfigError(
                f"no API key: pass one or set the {API_KEY_ENV} environment variable"
            )
        return key


class _RateGate:
    """Serializes requests and enforces the configured request rate."""

    def __init__(self, per_second: float):
        self._min_interval = 1.0 / per_second if per_second > 0 else 0.0
        self._lock = threading.Lock()
        self._last = 0.0

    def wait(self) -> None:
        with self._lock:
            now = time.monotonic()
            delay = self._last + self._min_interval - now
            if delay > 0:
                time.sleep(delay)
                now = time.monotonic()
            self._last = now


def _hex_or_int(value) -> int:
    if isinstance(value, str) and value.startswith("0x"):
        return int(value, 16)
    return int(value)


def _parse_tx(entry: dict) -> Transaction:
    to_field = entry.get("to") or None
    input_data = entry.get("input", "")
    selector = None
    if isinstance(input_data, str) and len(input_data) >= 10 and input_data.startswith("0x"):
        selector = bytes.fromhex(input_data[2:10])
    failed = entry.get("isError") == "1" or entry.get("txreceipt_status") == "0"
    return Transaction(
        hash=bytes.fromhex(entry["hash"][2:]),
        block_number=_hex_or_int(entry["blockNumber"]),
        tx_index=_hex_or_int(entry.get("transactionIndex", 0)),
        timestamp=_hex_or_int(entry["timeStamp"]),
        sender=Address.from_hex(entry["from"]),
        to=Address.from_hex(to_field) if to_field else None,
        value_wei=_hex_or_int(entry["value"]),
        status=TxStatus.FAILURE if failed else TxStatus.SUCCESS,
        input_selector=selector,
    )


def _parse_log(entry: dict) -> LogEvent:
    return LogEvent(
        emitter=Address.from_hex(entry["address"]),
        topics=tuple(bytes.fromhex(t[2:]) for t in entry["topics"]),
        data=bytes.fromhex(entry["data"][2:]) if entry["data"] not in ("0x", "") else b"",
        tx_hash=bytes.fromhex(entry["transactionHash"][2:]),
        log_index=_hex_or_int(entry.get("logIndex") or "0x0"),
    )


class EtherscanLikeClient:
    def __init__(self, config: ClientConfig):
        self.config = config
        self._gate = _RateGate(config.requests_per_second)
        self._session = requests.Session()

    def _get(self, params: dict) -> dict:
        params = {**params, "apikey": self.config.resolved_key()}
        last_error: Optional[Exception] = None
        for attempt in range(self.config.max_retries + 1):
            self._gate.wait()
            try:
                response = self._session.get(self.config.base_url, params=params, timeout=30)
                response.raise_for_status()
                payload = response.json()
            except (requests.RequestException, ValueError) as exc:
                last_error = exc
                log.warning("request failed (attempt %d): %s", attempt + 1, exc)
                time.sleep(self.config.backoff_seconds * 2**attempt)
                continue
            message = str(payload.get("message", ""))
            if payload.get("status") == "0" and "rate limit" in message.lower():
                last_error = TransportError(f"rate limited: {message}")
                time.sleep(self.config.backoff_seconds * 2**attempt)
                continue
            return payload
        raise TransportError(
            f"request failed after {self.config.max_retries + 1} attempts: {last_error}"
        )

    def _paginate(self, params: dict) -> list[dict]:
        results: list[dict] = []
        page = 1
        while True:
            payload = self._get({**params, "page": page, "offset": self.config.page_size})
            batch = payload.get("result") or []
            if not isinstance(batch, list):
                raise TransportError(f"unexpected API result shape: {batch!r}")
            results.extend(batch)
            if len(batch) < self.config.page_size:
                break
            page += 1
        return results

    def fetch_transaction(self, tx_hash: bytes) -> Optional[Transaction]:
        payload = self._get({
            "module": "proxy",
            "action": "eth_getTransactionByHash",
            "txhash": "0x" + tx_hash.hex(),
        })
        entry = payload.get("result")
        if not entry:
            return None
        return Transaction(
            hash=bytes.fromhex(entry["hash"][2:]),
            block_number=_hex_or_int(entry["blockNumber"]),
            tx_index=_hex_or_int(entry.get("transactionIndex", "0x0")),
            timestamp=_hex_or_int(entry.get("timeStamp", entry.get("timestamp", 0))),
            sender=Address.from_hex(entry["from"]),
            to=Address.from_hex(entry["to"]) if entry.get("to") else None,
            value_wei=_hex_or_int(entry["value"]),
            status=TxStatus.SUCCESS,
            input_selector=(
                bytes.fromhex(entry["input"][2:10])
                if len(entry.get("input", "")) >= 10 else None
            ),
        )

    def fetch_pair_created_logs(self, token: Address) -> list[LogEvent]:
        """Pool-creation events naming this token, via topic-filtered log
        queries (the creation event is emitted by the factory, so a plain
        address query would never see it)."""
        from chainsleuth.chaindata.decode import PAIR_CREATED_TOPIC

        token_word = "0x" + (b"\x00" * 12 + token.raw).hex()
        found: list[LogEvent] = []
        seen: set[tuple[bytes, int]] = set()
        for position in (1, 2):
            payload = self._get({
                "module": "logs", "action": "getLogs",
                "topic0": "0x" + PAIR_CREATED_TOPIC.hex(),
                f"topic{position}": token_word,
                f"topic0_{position}_opr": "and",
            })
            batch = payload.get("result") or []
            if not isinstance(batch, list):
                continue
            for entry in batch:
                log_event = _parse_log(entry)
                key = (log_event.tx_hash, log_event.log_index)
                if key not in seen:
                    seen.add(key)
                    found.append(log_event)
        return found

    def fetch_token_info(self, address: Address) -> Optional[dict]:
        """Token metadata (decimals, name, symbol) if the API exposes it."""
        try:
            payload = self._get({
                "module": "token", "action": "tokeninfo", "contractaddress": address.hex,
            })
        except TransportError:
            return None
        result = payload.get("result")
        if isinstance(result, list) and result:
            result = result[0]
        if not isinstance(result, dict):
            return None
        decimals = result.get("divisor") or result.get("decimals")
        if decimals is None:
            return None
        return {
            "decimals": int(decimals),
            "name": result.get("tokenName") or result.get("name"),
            "symbol": result.get("symbol"),
        }

    def fetch_address_history(
        self, address: Address, store: ChainStore
    ) -> tuple[list[Transaction], list[LogEvent]]:
        """Full paginated history of an address, deduplicated and ordered,
        ingested into the store (with parent transactions of foreign logs
        repaired via point lookups)."""
        raw_txs = self._paginate({
            "module": "account", "action": "txlist",
            "address": address.hex, "sort": "asc",
        })
        raw_logs = self._paginate({
            "module": "logs", "action": "getLogs", "address": address.hex,
        })

        seen: set[bytes] = set()
        txs: list[Transaction] = []
        for entry in raw_txs:
            tx = _parse_tx(entry)
            if tx.hash in seen:
                continue
            seen.add(tx.hash)
            txs.append(tx)
        txs.sort(key=lambda t: (t.block_number, t.tx_index))
        for earlier, later in zip(txs, txs[1:]):
            if (earlier.block_number, earlier.tx_index) == (later.block_number, later.tx_index):
                raise IntegrityError(
                    f"pagination inconsistency: two transactions at block "
                    f"{earlier.block_number} index {earlier.tx_index}"
                )

        logs = [_parse_log(entry) for entry in raw_logs]
        log_keys = set()
        unique_logs = []
        for item in logs:
            key = (item.tx_hash, item.log_index)
            if key in log_keys:
                continue
            log_keys.add(key)
            unique_logs.append(item)

        for tx in txs:
            store.add_transaction(tx)
        for item in unique_logs:
            if item.tx_hash not in store.transactions:
                parent = self.fetch_transaction(item.tx_hash)
                if parent is None:
                    raise IntegrityError(
                        f"log references transaction 0x{item.tx_hash.hex()} "
                        "that the API cannot resolve"
                    )
                store.add_transaction(parent)
            store.add_log(item)
        store.reindex()

        if self.config.cache_dir:
            write_fixture(store, self.config.cache_dir)
        return txs, unique_logs
