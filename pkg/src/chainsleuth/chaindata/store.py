"""Indexed repository of transactions, logs, decoded events and address tags.

The canonical data substrate is a fixture bundle: a directory of
line-delimited JSON records (see load_fixture). Live API fetches are
written through to the same format so every investigation is replayable
offline.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable, Iterator, Optional

from chainsleuth.chaindata.address import Address
from chainsleuth.chaindata.decode import decode_erc20_transfer, decode_pair_event
from chainsleuth.chaindata.models import (
    AddressTag,
    Erc20Transfer,
    LogEvent,
    PairBurn,
    PairCreated,
    PairEvent,
    PairMint,
    PairSwap,
    PairSync,
    Position,
    TagCategory,
    TokenMeta,
    Transaction,
    TxStatus,
)
from chainsleuth.errors import FixtureError, IntegrityError, MalformedEventError

DEFAULT_DECIMALS = 18


def _hex_to_bytes(value: str, *, what: str, length: Optional[int] = None) -> bytes:
    if not isinstance(value, str) or not value.startswith("0x"):
        raise FixtureError(f"{what}: expected 0x-prefixed hex, got {value!r}")
    try:
        raw = bytes.fromhex(value[2:])
    except ValueError as exc:
        raise FixtureError(f"{what}: bad hex {value!r}") from exc
    if length is not None and len(raw) != length:
        raise FixtureError(f"{what}: expected {length} bytes, got {len(raw)}")
    return raw


@dataclass
class ChainStore:
    transactions: dict[bytes, Transaction] = field(default_factory=dict)
    logs: list[LogEvent] = field(default_factory=list)
    tags: dict[Address, AddressTag] = field(default_factory=dict)
    tokens: dict[Address, TokenMeta] = field(default_factory=dict)
    rates: dict[str, Decimal] = field(default_factory=dict)  # ISO date -> USD per ETH

    # derived indexes (built by reindex)
    _tx_order: list[Transaction] = field(default_factory=list)
    _tx_by_address: dict[Address, list[Transaction]] = field(default_factory=dict)
    _tx_by_position: dict[tuple[int, int], bytes] = field(default_factory=dict)
    _logs_by_tx: dict[bytes, list[LogEvent]] = field(default_factory=dict)
    _transfers_by_token: dict[Address, list[Erc20Transfer]] = field(default_factory=dict)
    _transfers_by_address: dict[Address, list[Erc20Transfer]] = field(default_factory=dict)
    _pair_events_by_pair: dict[Address, list[PairEvent]] = field(default_factory=dict)
    _pairs: dict[Address, PairCreated] = field(default_factory=dict)
    _pairs_by_token: dict[Address, list[Address]] = field(default_factory=dict)
    _decode_errors: list[str] = field(default_factory=list)

    # -- loading -------------------------------------------------------

    def add_transaction(self, tx: Transaction) -> None:
        key = (tx.block_number, tx.tx_index)
        existing = self._tx_by_position.get(key)
        if existing is not None and existing != tx.hash:
            raise IntegrityError(
                f"two transactions claim block {tx.block_number} index {tx.tx_index}: "
                f"0x{existing.hex()} and {tx.hash_hex}"
            )
        self.transactions[tx.hash] = tx
        self._tx_by_position[key] = tx.hash

    def add_log(self, log: LogEvent) -> None:
        if log.tx_hash not in self.transactions:
            raise IntegrityError(
                f"log references unknown transaction 0x{log.tx_hash.hex()}"
            )
        self.logs.append(log)

    def add_tag(self, tag: AddressTag) -> None:
        self.tags[tag.address] = tag

    def add_token(self, meta: TokenMeta) -> None:
        self.tokens[meta.address] = meta

    def reindex(self) -> None:
        """Rebuild every derived index and run the decode pass.

        Unknown event signatures stay in `logs` untouched; decode failures
        for known signatures are recorded in decode_errors, never dropped.
        """
        self._tx_order = sorted(
            self.transactions.values(), key=lambda t: (t.block_number, t.tx_index)
        )
        self._tx_by_address = {}
        for tx in self._tx_order:
            self._tx_by_address.setdefault(tx.sender, []).append(tx)
            if tx.to is not None:
                self._tx_by_address.setdefault(tx.to, []).append(tx)

        self.logs.sort(key=self.log_position)
        self._logs_by_tx = {}
        for log in self.logs:
            self._logs_by_tx.setdefault(log.tx_hash, []).append(log)

        self._transfers_by_token = {}
        self._transfers_by_address = {}
        self._pair_events_by_pair = {}
        self._pairs = {}
        self._pairs_by_token = {}
        self._decode_errors = []

        for log in self.logs:
            meta = self.tokens.get(log.emitter)
            decimals = meta.decimals if meta else DEFAULT_DECIMALS
            try:
                transfer = decode_erc20_transfer(log, decimals)
            except MalformedEventError as exc:
                self._decode_errors.append(str(exc))
                transfer = None
            if transfer is not None:
                self._transfers_by_token.setdefault(transfer.token, []).append(transfer)
                self._transfers_by_address.setdefault(transfer.sender, []).append(transfer)
                if transfer.recipient != transfer.sender:
                    self._transfers_by_address.setdefault(transfer.recipient, []).append(transfer)
                continue
            try:
                pair_event = decode_pair_event(log)
            except MalformedEventError as exc:
                self._decode_errors.append(str(exc))
                pair_event = None
            if pair_event is not None:
                if isinstance(pair_event, PairCreated):
                    self._pairs[pair_event.pair] = pair_event
                    self._pairs_by_token.setdefault(pair_event.token0, []).append(pair_event.pair)
                    self._pairs_by_token.setdefault(pair_event.token1, []).append(pair_event.pair)
                self._pair_events_by_pair.setdefault(pair_event.pair, []).append(pair_event)

        self._derive_token_metadata()

    def _derive_token_metadata(self) -> None:
        for token, meta in self.tokens.items():
            transfers = self._transfers_by_token.get(token, [])
            supply = 0
            for t in transfers:
                if t.is_mint:
                    supply += t.amount
                if t.is_burn:
                    supply -= t.amount
            meta.total_supply = supply
            meta.creator = None
            meta.creation_tx = None
            if transfers:
                first = min(transfers, key=lambda t: self.position_of(t.tx_hash, t.log_index))
                tx = self.transactions[first.tx_hash]
                if tx.to is None:
                    # constructor-minted token: the deploying tx carries the first log
                    meta.creator = tx.sender
                    meta.creation_tx = tx.hash
                elif first.is_mint:
                    meta.creator = tx.sender
                    meta.creation_tx = tx.hash

    # -- lookups -------------------------------------------------------

    def position_of(self, tx_hash: bytes, log_index: int = 0) -> Position:
        tx = self.transactions[tx_hash]
        return (tx.block_number, tx.tx_index, log_index)

    def log_position(self, log: LogEvent) -> Position:
        return self.position_of(log.tx_hash, log.log_index)

    def tx(self, tx_hash: bytes) -> Transaction:
        try:
            return self.transactions[tx_hash]
        except KeyError:
            raise IntegrityError(f"unknown transaction 0x{tx_hash.hex()}") from None

    def has_tx(self, tx_hash: bytes) -> bool:
        return tx_hash in self.transactions

    def transactions_ordered(self) -> list[Transaction]:
        return list(self._tx_order)

    def transactions_for(self, address: Address) -> list[Transaction]:
        return list(self._tx_by_address.get(address, []))

    def logs_for_tx(self, tx_hash: bytes) -> list[LogEvent]:
        return list(self._logs_by_tx.get(tx_hash, []))

    def token_transfers(self, token: Address) -> list[Erc20Transfer]:
        return list(self._transfers_by_token.get(token, []))

    def transfers_involving(self, address: Address) -> list[Erc20Transfer]:
        return list(self._transfers_by_address.get(address, []))

    def pair_events(self, pair: Address) -> list[PairEvent]:
        return list(self._pair_events_by_pair.get(pair, []))

    def pair_info(self, pair: Address) -> Optional[PairCreated]:
        return self._pairs.get(pair)

    def pairs_for_token(self, token: Address) -> list[Address]:
        return list(self._pairs_by_token.get(token, []))

    def lookup_tag(self, address: Address) -> Optional[AddressTag]:
        """Exact-match registry lookup; None means untagged (not an error)."""
        return self.tags.get(address)

    def decode_errors(self) -> list[str]:
        return list(self._decode_errors)

    def usd_rate_for(self, timestamp: int) -> Optional[Decimal]:
        import datetime as _dt

        date = _dt.datetime.fromtimestamp(timestamp, _dt.timezone.utc).date().isoformat()
        return self.rates.get(date)

    def activity(self, address: Address) -> dict:
        """Lifetime activity metrics for one address, from stored value transactions."""
        txs = self._tx_by_address.get(address, [])
        outgoing = [t for t in txs if t.sender == address]
        incoming = [t for t in txs if t.to == address]
        return {
            "tx_count": len(txs),
            "out_count": len(outgoing),
            "in_count": len(incoming),
            "first_seen": txs[0].timestamp if txs else None,
            "last_seen": txs[-1].timestamp if txs else None,
            "total_in_wei": sum(t.value_wei for t in incoming),
            "total_out_wei": sum(t.value_wei for t in outgoing),
        }

    def token_balances(self, token: Address) -> dict[Address, int]:
        """Replay all transfers of a token into final balances (zero address excluded)."""
        balances: dict[Address, int] = {}
        for t in self._transfers_by_token.get(token, []):
            if not t.is_mint:
                balances[t.sender] = balances.get(t.sender, 0) - t.amount
            if not t.is_burn:
                balances[t.recipient] = balances.get(t.recipient, 0) + t.amount
        return {a: b for a, b in balances.items() if b != 0}


# -- fixture bundle I/O -----------------------------------------------


def _parse_tx_record(record: dict, where: str) -> Transaction:
    try:
        to_field = record["to"]
        selector = record.get("inputSelector")
        return Transaction(
            hash=_hex_to_bytes(record["hash"], what=f"{where} hash", length=32),
            block_number=int(record["blockNumber"]),
            tx_index=int(record["txIndex"]),
            timestamp=int(record["timestamp"]),
            sender=Address.from_hex(record["from"]),
            to=Address.from_hex(to_field) if to_field is not None else None,
            value_wei=int(record["valueWei"]),
            status=TxStatus(record["status"]),
            input_selector=(
                _hex_to_bytes(selector, what=f"{where} inputSelector", length=4)
                if selector is not None
                else None
            ),
        )
    except FixtureError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise FixtureError(f"{where}: {exc}") from exc


def _parse_log_record(record: dict, where: str) -> LogEvent:
    try:
        return LogEvent(
            emitter=Address.from_hex(record["emitter"]),
            topics=tuple(
                _hex_to_bytes(t, what=f"{where} topic", length=32) for t in record["topics"]
            ),
            data=_hex_to_bytes(record["dataHex"], what=f"{where} dataHex"),
            tx_hash=_hex_to_bytes(record["txHash"], what=f"{where} txHash", length=32),
            log_index=int(record["logIndex"]),
        )
    except FixtureError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise FixtureError(f"{where}: {exc}") from exc


def _iter_jsonl(path: str) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise FixtureError(f"{os.path.basename(path)}:{lineno}: invalid JSON") from exc


def load_fixture(path: str) -> ChainStore:
    """Load a fixture bundle directory into a fully indexed ChainStore."""
    if not os.path.isdir(path):
        raise FixtureError(f"fixture bundle {path!r} is not a directory")

    store = ChainStore()

    tx_path = os.path.join(path, "transactions.jsonl")
    if os.path.exists(tx_path):
        for lineno, record in _iter_jsonl(tx_path):
            store.add_transaction(_parse_tx_record(record, f"transactions.jsonl:{lineno}"))

    log_path = os.path.join(path, "logs.jsonl")
    if os.path.exists(log_path):
        for lineno, record in _iter_jsonl(log_path):
            log = _parse_log_record(record, f"logs.jsonl:{lineno}")
            try:
                store.add_log(log)
            except IntegrityError as exc:
                raise IntegrityError(f"logs.jsonl:{lineno}: {exc}") from None

    tags_path = os.path.join(path, "tags.json")
    if os.path.exists(tags_path):
        with open(tags_path, encoding="utf-8") as fh:
            try:
                entries = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FixtureError(f"tags.json: invalid JSON") from exc
        for i, entry in enumerate(entries):
            try:
                store.add_tag(
                    AddressTag(
                        address=Address.from_hex(entry["address"]),
                        category=TagCategory(entry["category"]),
                        label=entry["label"],
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise FixtureError(f"tags.json entry {i}: {exc}") from exc

    tokens_path = os.path.join(path, "tokens.json")
    if os.path.exists(tokens_path):
        with open(tokens_path, encoding="utf-8") as fh:
            try:
                entries = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FixtureError(f"tokens.json: invalid JSON") from exc
        for i, entry in enumerate(entries):
            try:
                store.add_token(
                    TokenMeta(
                        address=Address.from_hex(entry["address"]),
                        decimals=int(entry["decimals"]),
                        name=entry.get("name"),
                        symbol=entry.get("symbol"),
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise FixtureError(f"tokens.json entry {i}: {exc}") from exc

    rates_path = os.path.join(path, "rates.json")
    if os.path.exists(rates_path):
        with open(rates_path, encoding="utf-8") as fh:
            try:
                rates = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FixtureError(f"rates.json: invalid JSON") from exc
        for date, rate in rates.items():
            store.rates[date] = Decimal(str(rate))

    store.reindex()
    return store


def write_fixture(store: ChainStore, path: str) -> None:
    """Serialize a store back to the bundle format (deterministic output)."""
    os.makedirs(path, exist_ok=True)

    txs = sorted(store.transactions.values(), key=lambda t: (t.block_number, t.tx_index))
    with open(os.path.join(path, "transactions.jsonl"), "w", encoding="utf-8") as fh:
        for tx in txs:
            fh.write(json.dumps({
                "hash": tx.hash_hex,
                "blockNumber": tx.block_number,
                "txIndex": tx.tx_index,
                "timestamp": tx.timestamp,
                "from": tx.sender.hex,
                "to": tx.to.hex if tx.to is not None else None,
                "valueWei": str(tx.value_wei),
                "status": tx.status.value,
                "inputSelector": "0x" + tx.input_selector.hex() if tx.input_selector else None,
            }) + "\n")

    logs = sorted(store.logs, key=store.log_position)
    with open(os.path.join(path, "logs.jsonl"), "w", encoding="utf-8") as fh:
        for log in logs:
            fh.write(json.dumps({
                "emitter": log.emitter.hex,
                "topics": ["0x" + t.hex() for t in log.topics],
                "dataHex": "0x" + log.data.hex(),
                "txHash": "0x" + log.tx_hash.hex(),
                "logIndex": log.log_index,
            }) + "\n")

    with open(os.path.join(path, "tags.json"), "w", encoding="utf-8") as fh:
        json.dump(
            [
                {"address": t.address.hex, "category": t.category.value, "label": t.label}
                for t in sorted(store.tags.values(), key=lambda t: t.address)
            ],
            fh,
            indent=2,
        )

    with open(os.path.join(path, "tokens.json"), "w", encoding="utf-8") as fh:
        json.dump(
            [
                {
                    "address": m.address.hex,
                    "decimals": m.decimals,
                    **({"name": m.name} if m.name else {}),
                    **({"symbol": m.symbol} if m.symbol else {}),
                }
                for m in sorted(store.tokens.values(), key=lambda m: m.address)
            ],
            fh,
            indent=2,
        )

    with open(os.path.join(path, "rates.json"), "w", encoding="utf-8") as fh:
        json.dump({d: str(r) for d, r in sorted(store.rates.items())}, fh, indent=2)
