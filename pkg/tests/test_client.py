"""The live API client against a local mock of an Etherscan-style server."""

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, HTTPServer
from urllib.parse import parse_qs, urlparse

import pytest

from chainsleuth.chaindata.address import Address
from chainsleuth.chaindata.client import ClientConfig, EtherscanLikeClient
from chainsleuth.chaindata.store import ChainStore, load_fixture
from chainsleuth.errors import ConfigError, TransportError

RICH = "0x" + "aa" * 20
EMPTY = "0x" + "bb" * 20
FLAKY = "0x" + "cc" * 20


def _tx(i: int, sender=RICH) -> dict:
    return {
        "hash": "0x" + f"{i:064x}",
        "blockNumber": str(1000 + i),
        "transactionIndex": "0",
        "timeStamp": str(1_650_000_000 + 12 * i),
        "from": sender,
        "to": "0x" + "dd" * 20,
        "value": str(10**18 + i),
        "isError": "0",
        "txreceipt_status": "1",
        "input": "0x",
    }


class MockHandler(BaseHTTPRequestHandler):
    rate_limit_hits = {"count": 0}

    def log_message(self, *args):
        pass

    def do_GET(self):
        query = parse_qs(urlparse(self.path).query)
        action = query.get("action", [""])[0]
        address = query.get("address", [""])[0].lower()
        page = int(query.get("page", ["1"])[0])
        offset = int(query.get("offset", ["100"])[0])

        if action == "txlist":
            if address == FLAKY:
                MockHandler.rate_limit_hits["count"] += 1
                if MockHandler.rate_limit_hits["count"] < 3:
                    self._send({"status": "0", "message": "Max rate limit reached",
                                "result": []})
                    return
                self._send({"status": "1", "message": "OK",
                            "result": [_tx(1, FLAKY)]})
                return
            if address == EMPTY:
                self._send({"status": "0", "message": "No transactions found",
                            "result": []})
                return
            # 300 unique transactions, with the last of page one repeated
            # at the top of page two: the client must collapse it
            all_txs = [_tx(i) for i in range(300)]
            served = all_txs[:100] + [all_txs[99]] + all_txs[100:]
            start = (page - 1) * offset
            batch = served[start:start + offset]
            self._send({"status": "1", "message": "OK", "result": batch})
        elif action == "getLogs":
            self._send({"status": "1", "message": "OK", "result": [{
                "address": RICH,
                "topics": ["0x" + "ee" * 32],
                "data": "0x01",
                "transactionHash": "0x" + f"{7:064x}",
                "logIndex": "0x0",
            }] if address == RICH and page == 1 else []})
        elif action == "eth_getTransactionByHash":
            txhash = query.get("txhash", [""])[0]
            self._send({"result": {
                "hash": txhash,
                "blockNumber": "0x3ef",
                "transactionIndex": "0x0",
                "timeStamp": str(1_650_000_000),
                "from": RICH,
                "to": "0x" + "dd" * 20,
                "value": "0x0",
                "input": "0x",
            }})
        else:
            self._send({"status": "0", "message": "NOTOK", "result": "bad action"})

    def _send(self, payload: dict):
        body = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


@pytest.fixture(scope="module")
def mock_server():
    server = HTTPServer(("127.0.0.1", 0), MockHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/api"
    server.shutdown()


def _client(url, tmp_path=None, **kwargs) -> EtherscanLikeClient:
    return EtherscanLikeClient(ClientConfig(
        base_url=url,
        api_key="test-key",
        requests_per_second=200,
        cache_dir=str(tmp_path) if tmp_path else None,
        backoff_seconds=0.01,
        **kwargs,
    ))


def test_pagination_dedupe_and_order(mock_server):
    store = ChainStore()
    txs, logs = _client(mock_server).fetch_address_history(
        Address.from_hex(RICH), store)
    assert len(txs) == 300  # the cross-page duplicate collapsed
    keys = [(t.block_number, t.tx_index) for t in txs]
    assert keys == sorted(keys)
    assert len(logs) == 1
    # the foreign log's parent tx was repaired via a point lookup
    assert logs[0].tx_hash in store.transactions


def test_zero_history_address(mock_server):
    store = ChainStore()
    txs, logs = _client(mock_server).fetch_address_history(
        Address.from_hex(EMPTY), store)
    assert txs == [] and logs == []


def test_rate_limit_retry_then_success(mock_server):
    MockHandler.rate_limit_hits["count"] = 0
    store = ChainStore()
    txs, _ = _client(mock_server).fetch_address_history(
        Address.from_hex(FLAKY), store)
    assert len(txs) == 1
    assert MockHandler.rate_limit_hits["count"] == 3


def test_transport_error_after_retry_budget():
    config = ClientConfig(base_url="http://127.0.0.1:1/api", api_key="k",
                          max_retries=1, backoff_seconds=0.01)
    client = EtherscanLikeClient(config)
    with pytest.raises(TransportError):
        client.fetch_address_history(Address.from_hex(RICH), ChainStore())


def test_missing_api_key_names_variable(monkeypatch):
    monkeypatch.delenv("CHAINSLEUTH_API_KEY", raising=False)
    config = ClientConfig(base_url="http://example.invalid/api")
    with pytest.raises(ConfigError) as excinfo:
        config.resolved_key()
    assert "CHAINSLEUTH_API_KEY" in str(excinfo.value)


def test_cache_write_through_is_replayable(mock_server, tmp_path):
    store = ChainStore()
    _client(mock_server, tmp_path / "cache").fetch_address_history(
        Address.from_hex(RICH), store)
    replayed = load_fixture(str(tmp_path / "cache"))
    assert len(replayed.transactions) == len(store.transactions)
    assert len(replayed.logs) == len(store.logs)


def test_rate_gate_paces_requests(mock_server):
    config = ClientConfig(base_url=mock_server, api_key="k",
                          requests_per_second=20, page_size=100)
    client = EtherscanLikeClient(config)
    start = time.monotonic()
    client.fetch_address_history(Address.from_hex(RICH), ChainStore())
    elapsed = time.monotonic() - start
    # 3 tx pages + 1 log page + 1 point lookup at 20 rps: at least 200 ms
    assert elapsed >= 0.2


class LiveScamHandler(BaseHTTPRequestHandler):
    """Serves a whole golden-scenario bundle through the API shapes, so the
    CLI's --live path can be exercised end to end."""

    scenario = None  # set by the fixture

    def log_message(self, *args):
        pass

    def do_GET(self):
        query = parse_qs(urlparse(self.path).query)
        action = query.get("action", [""])[0]
        store = LiveScamHandler.scenario.store
        if action == "txlist":
            address = query.get("address", [""])[0].lower()
            page = int(query.get("page", ["1"])[0])
            offset = int(query.get("offset", ["100"])[0])
            addr = Address.from_hex(address)
            txs = [
                t for t in store.transactions_ordered()
                if t.sender == addr or t.to == addr
                # explorers associate a contract-creation tx with the
                # created contract's address
                or (t.to is None and any(
                    l.emitter == addr for l in store.logs_for_tx(t.hash)))
            ]
            batch = txs[(page - 1) * offset:page * offset]
            self._send({"status": "1", "message": "OK", "result": [{
                "hash": t.hash_hex,
                "blockNumber": str(t.block_number),
                "transactionIndex": str(t.tx_index),
                "timeStamp": str(t.timestamp),
                "from": t.sender.hex,
                "to": t.to.hex if t.to else "",
                "value": str(t.value_wei),
                "isError": "0",
                "txreceipt_status": "1",
                "input": "0x",
            } for t in batch]})
        elif action == "getLogs":
            address = query.get("address", [""])[0].lower()
            page = int(query.get("page", ["1"])[0])
            offset = int(query.get("offset", ["100"])[0])
            if address:
                addr = Address.from_hex(address)
                logs = [l for l in store.logs if l.emitter == addr]
            else:
                # topic-filtered query
                logs = list(store.logs)
                for pos in range(4):
                    want = query.get(f"topic{pos}", [None])[0]
                    if want:
                        logs = [
                            l for l in logs
                            if len(l.topics) > pos
                            and "0x" + l.topics[pos].hex() == want.lower()
                        ]
            batch = logs[(page - 1) * offset:page * offset]
            self._send({"status": "1", "message": "OK", "result": [{
                "address": l.emitter.hex,
                "topics": ["0x" + t.hex() for t in l.topics],
                "data": "0x" + l.data.hex(),
                "transactionHash": "0x" + l.tx_hash.hex(),
                "logIndex": hex(l.log_index),
            } for l in batch]})
        elif action == "eth_getTransactionByHash":
            txhash = query.get("txhash", [""])[0]
            t = store.transactions.get(bytes.fromhex(txhash[2:]))
            if t is None:
                self._send({"result": None})
                return
            self._send({"result": {
                "hash": t.hash_hex,
                "blockNumber": hex(t.block_number),
                "transactionIndex": hex(t.tx_index),
                "timeStamp": str(t.timestamp),
                "from": t.sender.hex,
                "to": t.to.hex if t.to else None,
                "value": hex(t.value_wei),
                "input": "0x",
            }})
        elif action == "tokeninfo":
            token = LiveScamHandler.scenario.token
            meta = store.tokens[token]
            self._send({"status": "1", "result": [{
                "contractAddress": token.hex,
                "divisor": str(meta.decimals),
                "tokenName": meta.name or "Demo",
                "symbol": meta.symbol or "DEMO",
            }]})
        else:
            self._send({"status": "0", "message": "NOTOK", "result": "bad action"})

    _send = MockHandler._send


def test_cli_live_mode_end_to_end(golden, tmp_path, monkeypatch, capsys):
    """--live fetches the token and pair histories through the API, caches
    them as a replayable bundle, and the detection verdict matches the
    offline run."""
    from chainsleuth.cli import main as cli_main

    LiveScamHandler.scenario = golden
    server = HTTPServer(("127.0.0.1", 0), LiveScamHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        monkeypatch.setenv("CHAINSLEUTH_API_KEY", "test-key")
        out = tmp_path / "live-out"
        code = cli_main([
            "detect", "--live", f"http://127.0.0.1:{server.server_port}/api",
            "--token", golden.token.hex, "--out", str(out),
        ])
        assert code == 0
        verdict = json.loads((out / "verdict.json").read_text())
        assert verdict["classification"]["verdict"] == "sell_rug_pull"
        # the write-through cache replays offline with the same verdict
        replay_out = tmp_path / "replay-out"
        code = cli_main([
            "detect", "--fixtures", str(out / "cache"),
            "--token", golden.token.hex, "--out", str(replay_out),
        ])
        assert code == 0
        replayed = json.loads((replay_out / "verdict.json").read_text())
        assert replayed["classification"] == verdict["classification"]
    finally:
        server.shutdown()
