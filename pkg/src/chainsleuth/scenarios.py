"""Deterministic synthetic investigation scenarios.

Each builder scripts one rug-pull case end to end — token creation, pool
funding, pump, dump, exit, laundering — with an exact-integer AMM so
every byte of the resulting fixture bundle is reproducible, and the
economics (revenue, spend, liquidity delta, peak price) hit the targets
the tests assert.

Trades can pin both sides of a swap. The pinned amounts are validated
against the pool invariant (reserve product never decreases across a
swap), so pumped execution prices stay on-chain-plausible.

``python -m chainsleuth.scenarios OUTDIR`` writes every bundle to disk.
"""

from __future__ import annotations

import datetime as dt
import random
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional

from chainsleuth.chaindata.address import Address, ZERO_ADDRESS
from chainsleuth.chaindata.decode import encode_erc20_transfer, encode_pair_event
from chainsleuth.chaindata.models import (
    AddressTag,
    Erc20Transfer,
    PairBurn,
    PairCreated,
    PairMint,
    PairSwap,
    PairSync,
    TagCategory,
    TokenMeta,
    Transaction,
    TxStatus,
)
from chainsleuth.chaindata.store import ChainStore, write_fixture
from chainsleuth.keccak import keccak256
from chainsleuth.units import eth_to_wei

_DUMMY_HASH = b"\x00" * 32


import functools


@functools.lru_cache(maxsize=4096)
def named_address(name: str) -> Address:
    return Address(keccak256(b"chainsleuth:" + name.encode())[:20])


def utc(y: int, mo: int, d: int, h: int = 0, mi: int = 0, s: int = 0) -> int:
    return int(dt.datetime(y, mo, d, h, mi, s, tzinfo=dt.timezone.utc).timestamp())


def eth(amount: str) -> int:
    return eth_to_wei(amount)


class ChainWriter:
    """Accumulates transactions and logs with strictly increasing positions."""

    def __init__(self, store: ChainStore, start_block: int = 14_000_000,
                 start_time: int = utc(2022, 1, 1)):
        self.store = store
        self.block = start_block
        self.time = start_time
        self.tx_index = 0
        self._counter = 0
        self._pinned = False

    def _next_hash(self) -> bytes:
        self._counter += 1
        return keccak256(b"chainsleuth:tx:%d" % self._counter)

    def at(self, timestamp: int) -> None:
        """Pin the next transaction to this exact timestamp."""
        if timestamp < self.time:
            raise ValueError("writer time must not go backwards")
        if timestamp > self.time:
            self.block += max(1, (timestamp - self.time) // 12)
            self.time = timestamp
            self.tx_index = 0
        self._pinned = True

    def tick(self, seconds: int = 12) -> None:
        self.at(self.time + seconds)

    def tx(
        self,
        sender: Address,
        to: Optional[Address],
        value_wei: int = 0,
        events: Optional[list] = None,
        same_block: bool = False,
        status: TxStatus = TxStatus.SUCCESS,
    ) -> Transaction:
        if self._pinned:
            self._pinned = False
        elif not same_block:
            self.tick()
            self._pinned = False
        else:
            self.tx_index += 1
        while (self.block, self.tx_index) in self.store._tx_by_position:
            self.tx_index += 1
        tx = Transaction(
            hash=self._next_hash(),
            block_number=self.block,
            tx_index=self.tx_index,
            timestamp=self.time,
            sender=sender,
            to=to,
            value_wei=value_wei,
            status=status,
        )
        self.store.add_transaction(tx)
        for log_index, ev in enumerate(events or []):
            import dataclasses

            ev = dataclasses.replace(ev, tx_hash=tx.hash, log_index=log_index)
            if isinstance(ev, Erc20Transfer):
                self.store.add_log(encode_erc20_transfer(ev))
            else:
                self.store.add_log(encode_pair_event(ev))
        return tx


def _transfer(token: Address, sender: Address, recipient: Address, amount: int,
              decimals: int) -> Erc20Transfer:
    return Erc20Transfer(token=token, sender=sender, recipient=recipient,
                         amount=amount, decimals=decimals,
                         tx_hash=_DUMMY_HASH, log_index=0)


class PoolSim:
    """Constant-product pool with the 0.3% fee, exact integer arithmetic."""

    FEE_NUM = 997
    FEE_DEN = 1000

    def __init__(self) -> None:
        self.r_tok = 0
        self.r_eth = 0

    def add(self, tokens: int, eth_wei: int) -> None:
        self.r_tok += tokens
        self.r_eth += eth_wei

    def remove(self, tokens: int, eth_wei: int) -> None:
        if tokens > self.r_tok or eth_wei > self.r_eth:
            raise ValueError("removing more than the pool holds")
        self.r_tok -= tokens
        self.r_eth -= eth_wei

    def max_tokens_out(self, eth_in: int) -> int:
        return (self.FEE_NUM * eth_in * self.r_tok) // (
            self.FEE_DEN * self.r_eth + self.FEE_NUM * eth_in
        )

    def max_eth_out(self, tokens_in: int) -> int:
        return (self.FEE_NUM * tokens_in * self.r_eth) // (
            self.FEE_DEN * self.r_tok + self.FEE_NUM * tokens_in
        )

    def min_tokens_in(self, eth_out: int) -> int:
        if eth_out >= self.r_eth:
            raise ValueError("cannot drain the entire ETH reserve via swap")
        num = self.FEE_DEN * self.r_tok * eth_out
        den = self.FEE_NUM * (self.r_eth - eth_out)
        return num // den + 1

    def swap_eth_for_tokens(self, eth_in: int, tokens_out: int) -> None:
        if tokens_out > self.max_tokens_out(eth_in):
            raise ValueError("buy exceeds pool output for that input")
        pre = self.r_tok * self.r_eth
        self.r_tok -= tokens_out
        self.r_eth += eth_in
        assert self.r_tok * self.r_eth >= pre

    def swap_tokens_for_eth(self, tokens_in: int, eth_out: int) -> None:
        if eth_out > self.max_eth_out(tokens_in):
            raise ValueError("sell exceeds pool output for that input")
        pre = self.r_tok * self.r_eth
        self.r_tok += tokens_in
        self.r_eth -= eth_out
        assert self.r_tok * self.r_eth >= pre


@dataclass
class Scenario:
    name: str
    store: ChainStore
    token: Address
    pair: Address
    weth: Address
    actors: dict[str, Address]
    expected: dict = field(default_factory=dict)
    contract_sources: dict[str, str] = field(default_factory=dict)

    def actor(self, name: str) -> Address:
        return self.actors[name]


class ScamKit:
    """Scripting surface for one token's lifecycle on one pair."""

    def __init__(
        self,
        writer: ChainWriter,
        prefix: str,
        decimals: int,
        token_is_token0: bool,
        pair_index: int = 1,
    ):
        self.w = writer
        self.store = writer.store
        self.decimals = decimals
        self.token = named_address(f"{prefix}:token")
        self.pair = named_address(f"{prefix}:pair")
        self.weth = named_address("weth")
        self.factory = named_address("factory")
        self.token_is_token0 = token_is_token0
        self.pair_index = pair_index
        self.pool = PoolSim()
        self.minted_eth_total = 0
        self.store.add_token(TokenMeta(address=self.token, decimals=decimals))

    # -- event plumbing -------------------------------------------------

    def _amounts(self, tokens: int, eth_wei: int) -> tuple[int, int]:
        return (tokens, eth_wei) if self.token_is_token0 else (eth_wei, tokens)

    def _sync(self) -> PairSync:
        a0, a1 = self._amounts(self.pool.r_tok, self.pool.r_eth)
        return PairSync(pair=self.pair, reserve0=a0, reserve1=a1,
                        tx_hash=_DUMMY_HASH, log_index=0)

    def _tfr(self, sender: Address, recipient: Address, amount: int) -> Erc20Transfer:
        return _transfer(self.token, sender, recipient, amount, self.decimals)

    # -- lifecycle steps ------------------------------------------------

    def create_token(self, creator: Address, supply: int) -> Transaction:
        return self.w.tx(creator, None, events=[self._tfr(ZERO_ADDRESS, creator, supply)])

    def create_pair(self, caller: Address) -> Transaction:
        t0, t1 = (self.token, self.weth) if self.token_is_token0 else (self.weth, self.token)
        ev = PairCreated(pair=self.pair, token0=t0, token1=t1,
                         tx_hash=_DUMMY_HASH, log_index=0,
                         factory=self.factory, pair_index=self.pair_index)
        return self.w.tx(caller, self.factory, events=[ev])

    def add_liquidity(self, provider: Address, eth_wei: int, tokens: int) -> Transaction:
        self.pool.add(tokens, eth_wei)
        a0, a1 = self._amounts(tokens, eth_wei)
        mint = PairMint(pair=self.pair, amount0=a0, amount1=a1,
                        tx_hash=_DUMMY_HASH, log_index=0, sender=provider)
        self.minted_eth_total += eth_wei
        return self.w.tx(provider, self.pair, events=[
            self._tfr(provider, self.pair, tokens), self._sync(), mint,
        ])

    def buy(self, buyer: Address, eth_in: int, tokens_out: Optional[int] = None,
            value_tx: bool = False) -> tuple[Transaction, int]:
        if tokens_out is None:
            tokens_out = self.pool.max_tokens_out(eth_in)
        self.pool.swap_eth_for_tokens(eth_in, tokens_out)
        in0, in1 = self._amounts(0, eth_in)
        out0, out1 = self._amounts(tokens_out, 0)
        swap = PairSwap(pair=self.pair, amount0_in=in0, amount1_in=in1,
                        amount0_out=out0, amount1_out=out1, to=buyer,
                        tx_hash=_DUMMY_HASH, log_index=0, sender=buyer)
        tx = self.w.tx(buyer, self.pair, value_wei=eth_in if value_tx else 0, events=[
            self._tfr(self.pair, buyer, tokens_out), self._sync(), swap,
        ])
        return tx, tokens_out

    def sell(
        self,
        seller: Address,
        eth_out: Optional[int] = None,
        tokens_in: Optional[int] = None,
        fee_skim_bps: int = 0,
        auto_liquidity: bool = False,
    ) -> tuple[Transaction, int, int]:
        """Sell tokens for ETH. Either side may be pinned; the other defaults
        to the pool-optimal amount. Optional fee skim and auto-liquidity
        reproduce advance-fee token behaviour."""
        if eth_out is None and tokens_in is None:
            raise ValueError("pin at least one side of the sell")
        if tokens_in is None:
            tokens_in = self.pool.min_tokens_in(eth_out)
        if eth_out is None:
            eth_out = self.pool.max_eth_out(tokens_in)
        self.pool.swap_tokens_for_eth(tokens_in, eth_out)

        events = [self._tfr(seller, self.pair, tokens_in)]
        fee = 0
        if fee_skim_bps:
            # seller is debited the fee on top of what reaches the pool
            fee = tokens_in * fee_skim_bps // (10_000 - fee_skim_bps)
            events.append(self._tfr(seller, self.token, fee))
        events.append(self._sync())
        in0, in1 = self._amounts(tokens_in, 0)
        out0, out1 = self._amounts(0, eth_out)
        events.append(PairSwap(pair=self.pair, amount0_in=in0, amount1_in=in1,
                               amount0_out=out0, amount1_out=out1, to=seller,
                               tx_hash=_DUMMY_HASH, log_index=0, sender=seller))
        if auto_liquidity:
            liq_tokens = max(fee, 1)
            self.pool.add(liq_tokens, 1)
            self.minted_eth_total += 1
            a0, a1 = self._amounts(liq_tokens, 1)
            events.append(self._tfr(self.token, self.pair, liq_tokens))
            events.append(self._sync())
            events.append(PairMint(pair=self.pair, amount0=a0, amount1=a1,
                                   tx_hash=_DUMMY_HASH, log_index=0, sender=self.token))
        tx = self.w.tx(seller, self.pair, events=events)
        return tx, tokens_in, eth_out

    def remove_liquidity(
        self,
        recipient: Address,
        eth_out: Optional[int] = None,
        all_reserves: bool = False,
    ) -> tuple[Transaction, int, int]:
        if all_reserves:
            eth_out = self.pool.r_eth
            tokens_out = self.pool.r_tok
        else:
            if eth_out is None:
                raise ValueError("pin the ETH side of the removal")
            # token side proportional to the ETH share withdrawn
            tokens_out = self.pool.r_tok * eth_out // self.pool.r_eth
        self.pool.remove(tokens_out, eth_out)
        a0, a1 = self._amounts(tokens_out, eth_out)
        burn = PairBurn(pair=self.pair, amount0=a0, amount1=a1, to=recipient,
                        tx_hash=_DUMMY_HASH, log_index=0, sender=recipient)
        events = []
        if tokens_out > 0:
            events.append(self._tfr(self.pair, recipient, tokens_out))
        events.extend([self._sync(), burn])
        tx = self.w.tx(recipient, self.pair, events=events)
        return tx, eth_out, tokens_out

    def transfer(self, sender: Address, recipient: Address, amount: int) -> Transaction:
        return self.w.tx(sender, recipient, events=[self._tfr(sender, recipient, amount)])

    def unwrap_proceeds(self, recipient: Address, eth_wei: int) -> Transaction:
        """Proceeds leaving the WETH world as a plain value transfer."""
        return self.w.tx(self.pair, recipient, value_wei=eth_wei)


def _tag(store: ChainStore, name: str, category: TagCategory, label: str) -> Address:
    addr = named_address(f"tag:{label}")
    store.add_tag(AddressTag(address=addr, category=category, label=label))
    return addr


def _value(w: ChainWriter, sender: Address, to: Address, amount: str,
           at: Optional[int] = None) -> Transaction:
    if at is not None:
        w.at(at)
    return w.tx(sender, to, value_wei=eth(amount))


def _filler_activity(w: ChainWriter, addr: Address, peers_prefix: str, count: int,
                     start: int, spacing: int = 3600, amount: str = "0.5") -> None:
    """Background traffic so an address reads as active/high-volume."""
    w.at(start)
    for i in range(count):
        peer = named_address(f"{peers_prefix}:{i % 7}")
        if i % 2 == 0:
            w.tx(peer, addr, value_wei=eth(amount))
        else:
            w.tx(addr, peer, value_wei=eth(amount) // 2)
        w.tick(spacing)


GOLDEN_CONTRACT_SOURCE = """\
pragma solidity ^0.8.0;

contract AbcToken {
    string public name = "ABC Token";
    mapping(address => uint256) public balanceOf;
    uint256 public totalSupply;
    uint256 public sellTax = 2;
    address public owner;

    constructor(uint256 supply) {
        owner = msg.sender;
        totalSupply = supply;
        balanceOf[msg.sender] = supply;
    }

    function mint(address to, uint256 amount) external {
        require(msg.sender == owner, "not owner");
        totalSupply += amount;
        balanceOf[to] += amount;
    }

    function setSellTax(uint256 newTax) external {
        require(msg.sender == owner, "not owner");
        sellTax = newTax;
    }

    function transfer(address to, uint256 amount) external returns (bool) {
        balanceOf[msg.sender] -= amount;
        balanceOf[to] += amount;
        return true;
    }
}
"""

PLAIN_CONTRACT_SOURCE = """\
pragma solidity ^0.8.0;

contract SimpleToken {
    string public name = "Simple Token";
    mapping(address => uint256) public balanceOf;
    mapping(address => mapping(address => uint256)) public allowance;
    uint256 public totalSupply;

    constructor(uint256 supply) {
        totalSupply = supply;
        balanceOf[msg.sender] = supply;
    }

    function transfer(address to, uint256 amount) external returns (bool) {
        balanceOf[msg.sender] -= amount;
        balanceOf[to] += amount;
        return true;
    }

    function approve(address spender, uint256 amount) external returns (bool) {
        allowance[msg.sender][spender] = amount;
        return true;
    }

    function transferFrom(address sender, address to, uint256 amount) external returns (bool) {
        allowance[sender][msg.sender] -= amount;
        balanceOf[sender] -= amount;
        balanceOf[to] += amount;
        return true;
    }
}
"""


def golden_scenario(
    token_scale: int = 1,
    eth_scale: int = 1,
    shuffle_seed: Optional[int] = None,
) -> Scenario:
    """The canonical eight-step rug pull: create, mint, open a pool, pump,
    dump, remove liquidity, then launder through a burner to an exchange.

    token_scale / eth_scale multiply the respective base amounts;
    shuffle_seed reorders the non-causal middle of the pump (victim and
    flipper entries) plus the gift transfers. The verdict, pump flag,
    victim set and scam window must be invariant under all of these.
    """
    store = ChainStore()
    w = ChainWriter(store, start_time=utc(2022, 2, 20))
    kit = ScamKit(w, "golden", decimals=6, token_is_token0=False)

    def tok(amount: float) -> int:
        return int(amount * 10**6) * token_scale

    def ether(amount: str) -> int:
        return eth(amount) * eth_scale

    scammer = named_address("golden:scammer")
    organic = named_address("golden:organic-funder")
    victims = [named_address(f"golden:victim:{i}") for i in range(3)]
    flippers = [named_address(f"golden:flipper:{i}") for i in range(2)]
    burner = named_address("golden:burner")
    cex = _tag(store, "cex", TagCategory.EXCHANGE, "Apex Exchange")
    store.rates["2022-03-01"] = Decimal("3000.00")

    # the funder has organic history of its own (incoming only, so the
    # noise stays out of any forward trace)
    w.at(utc(2022, 2, 21))
    for i in range(12):
        w.tx(named_address(f"golden:noise:{i % 7}"), organic, value_wei=eth("1"))
        w.tick(3600)
    _value(w, organic, scammer, "4", at=utc(2022, 2, 28, 9, 0))

    w.at(utc(2022, 3, 1, 12, 0, 0))
    kit.create_token(scammer, tok(2_000_000_000))
    kit.create_pair(scammer)
    kit.add_liquidity(scammer, ether("2"), tok(1_000_000_000))

    # scripted pump: scammer entries pinned first/peak, public fills shuffled
    scammer_buys = [("scammer", "0.5", None), ("scammer", "0.8", None)]
    public_buys = (
        [(f"victim{i}", "0.2", None) for i in range(3)]
        + [(f"flipper{i}", "0.2", None) for i in range(2)]
    )
    if shuffle_seed is not None:
        random.Random(shuffle_seed).shuffle(public_buys)

    balances: dict[str, int] = {}

    def buyer_addr(name: str) -> Address:
        if name == "scammer":
            return scammer
        if name.startswith("victim"):
            return victims[int(name[6:])]
        return flippers[int(name[7:])]

    for name, amount, pinned in scammer_buys + public_buys:
        _, got = kit.buy(buyer_addr(name), ether(amount), pinned)
        balances[name] = balances.get(name, 0) + got

    # peak entry: scammer overpays, printing the top of the pump
    peak_tokens = tok(68_000_000)
    _, got = kit.buy(scammer, ether("1.2"), peak_tokens)
    balances["scammer"] = balances.get("scammer", 0) + got

    # flippers time the top and exit completely
    for i, name in enumerate(["flipper0", "flipper1"]):
        kit.sell(flippers[i], eth_out=ether("0.22"), tokens_in=balances.pop(name))

    # dump: exits priced into the floor
    kit.sell(scammer, eth_out=ether("1.3"), tokens_in=tok(170_000_000))
    kit.sell(scammer, eth_out=ether("1.2"), tokens_in=tok(1_000_000_000))

    gifts = [(0, 1, tok(1_000)), (1, 2, tok(2_000)), (2, 0, tok(500))]
    if shuffle_seed is not None:
        random.Random(shuffle_seed + 1).shuffle(gifts)
    for src, dst, amount in gifts:
        kit.transfer(victims[src], victims[dst], amount)

    w.at(utc(2022, 3, 1, 12, 40, 0))
    _, removed_eth, _ = kit.remove_liquidity(scammer, all_reserves=True)

    kit.unwrap_proceeds(scammer, removed_eth)
    _value(w, scammer, burner, "2", at=utc(2022, 3, 1, 13, 30))
    _value(w, burner, cex, "1.9", at=utc(2022, 3, 1, 14, 0))

    store.reindex()
    return Scenario(
        name="golden",
        store=store,
        token=kit.token,
        pair=kit.pair,
        weth=kit.weth,
        actors={
            "scammer": scammer,
            "organic": organic,
            "burner": burner,
            "cex": cex,
            **{f"victim{i}": v for i, v in enumerate(victims)},
            **{f"flipper{i}": f for i, f in enumerate(flippers)},
        },
        expected={
            "verdict": "sell_rug_pull",
            "pump_and_dump": True,
            "victims": set(victims),
            "removed_eth": removed_eth,
        },
        contract_sources={kit.token.hex: GOLDEN_CONTRACT_SOURCE},
    )


def case1_scenario() -> Scenario:
    """First documented case: 40-minute pump and dump, exit via remove-
    liquidity, proceeds chain-hopped over a bridge with side trips through
    burners to a mixer and a gambling service.

    Engineered exacts: 154 token transfers, 94 distinct participants,
    77 remaining holders (excluding the pool), revenue 10.57 ETH, spend
    15.96 ETH, liquidity delta +5.39 ETH, peak price 4.20e-11 ETH.
    """
    store = ChainStore()
    w = ChainWriter(store, start_time=utc(2022, 4, 1))
    kit = ScamKit(w, "case1", decimals=9, token_is_token0=False)
    store.rates["2022-04-17"] = Decimal("3061.88")

    scammer = named_address("case1:scammer")
    trader = named_address("case1:trader")  # scam-funded trading wallet
    a1 = named_address("case1:active-funder")
    b0 = named_address("case1:funding-burner")
    b1 = named_address("case1:burner-1")
    b2 = named_address("case1:burner-2")
    b3 = named_address("case1:burner-3")
    a2 = named_address("case1:comingle-wallet")
    victims = [named_address(f"case1:victim:{i}") for i in range(76)]
    flippers = [named_address(f"case1:flipper:{i}") for i in range(15)]

    bybit = _tag(store, "bybit", TagCategory.EXCHANGE, "ByBit")
    bridge = _tag(store, "bridge", TagCategory.BRIDGE, "Synapse")
    mixer = _tag(store, "mixer", TagCategory.MIXER, "Tornado Cash")
    casino = _tag(store, "casino", TagCategory.GAMBLING, "Lucky Dice")
    cex_a = _tag(store, "cex-a", TagCategory.EXCHANGE, "Harbor Exchange")
    cex_b = _tag(store, "cex-b", TagCategory.EXCHANGE, "Meridian Exchange")

    # co-mingling wallet background volume (outside the trace window)
    _filler_activity(w, a2, "case1:noise", 60, utc(2022, 4, 1, 6, 0), amount="80")
    # the funder stays active enough not to read as a burner
    _filler_activity(w, a1, "case1:smallnoise", 20, utc(2022, 4, 13, 8, 0), amount="0.4")

    _value(w, bybit, a1, "50", at=utc(2022, 4, 14, 10, 0))
    _value(w, a1, b0, "20", at=utc(2022, 4, 15, 9, 0))
    _value(w, b0, scammer, "19", at=utc(2022, 4, 16, 9, 0))

    w.at(utc(2022, 4, 17, 21, 7, 0))
    creation_tx = kit.create_token(scammer, 4 * 10**12 * 10**9)
    kit.create_pair(scammer)
    kit.add_liquidity(scammer, eth("10"), 1_700 * 10**9 * 10**9)
    _value(w, scammer, trader, "16.5")

    balances: dict[Address, int] = {}

    def buy(buyer: Address, amount: str, pinned: Optional[int] = None) -> None:
        _, got = kit.buy(buyer, eth(amount), pinned)
        balances[buyer] = balances.get(buyer, 0) + got

    trader_buys = ["0.5", "0.75", "1.0", "1.0", "1.0", "1.11",
                   "1.2", "1.2", "1.5", "1.5", "1.0"]
    for amount in trader_buys[:3]:
        buy(trader, amount)
    for v in victims[:38]:
        buy(v, "0.0125")
    for f in flippers:
        buy(f, "0.1")
    for amount in trader_buys[3:8]:
        buy(trader, amount)
    for v in victims[38:]:
        buy(v, "0.0125")
    for amount in trader_buys[8:]:
        buy(trader, amount)
    # the printed top of the pump: overpaying entry at 4.20e-11 ETH/token
    buy(trader, "4.2", 100 * 10**9 * 10**9)

    for f in flippers:
        kit.sell(f, eth_out=eth("0.095"), tokens_in=balances.pop(f))

    # retained supply moves to the trading wallet so the dump can keep going
    kit.transfer(scammer, trader, 200 * 10**18)
    balances[trader] += 200 * 10**18

    trader_sells = [("2.0", 62_500 * 10**15), ("1.8", 70_000 * 10**15),
                    ("1.5", 80_000 * 10**15), ("1.5", 100_000 * 10**15),
                    ("1.2", 120_000 * 10**15), ("1.0", 145_000 * 10**15),
                    ("0.87", 175_000 * 10**15), ("0.7", 200_000 * 10**15)]
    for eth_out, tokens_in in trader_sells:
        kit.sell(trader, eth_out=eth(eth_out), tokens_in=tokens_in)
        balances[trader] -= tokens_in

    for i in range(23):
        gift = balances[victims[i]] // 4
        kit.transfer(victims[i], victims[i + 1], gift)
        balances[victims[i]] -= gift
        balances[victims[i + 1]] = balances.get(victims[i + 1], 0) + gift

    kit.transfer(trader, scammer, balances.pop(trader))

    w.at(utc(2022, 4, 17, 21, 47, 0))
    _, removed_eth, _ = kit.remove_liquidity(scammer, eth_out=eth("15.39"))

    kit.unwrap_proceeds(scammer, removed_eth)
    _value(w, trader, scammer, "10.5", at=utc(2022, 4, 17, 21, 58))
    _value(w, scammer, bridge, "19", at=utc(2022, 4, 17, 22, 10))
    _value(w, scammer, b1, "2", at=utc(2022, 4, 17, 22, 30))
    _value(w, b1, b2, "1.2", at=utc(2022, 4, 17, 22, 50))
    _value(w, b2, mixer, "1.0", at=utc(2022, 4, 17, 23, 10))
    _value(w, scammer, b3, "7", at=utc(2022, 4, 17, 23, 25))
    _value(w, b3, a2, "6.3", at=utc(2022, 4, 17, 23, 50))
    _value(w, a2, casino, "30", at=utc(2022, 4, 18, 1, 0))
    _value(w, a2, cex_a, "50", at=utc(2022, 4, 18, 1, 30))
    _value(w, a2, cex_b, "40", at=utc(2022, 4, 18, 2, 0))

    store.reindex()
    return Scenario(
        name="case1",
        store=store,
        token=kit.token,
        pair=kit.pair,
        weth=kit.weth,
        actors={
            "scammer": scammer, "trader": trader, "a1": a1, "b0": b0,
            "b1": b1, "b2": b2, "b3": b3, "a2": a2,
            "bybit": bybit, "bridge": bridge, "mixer": mixer, "casino": casino,
            "cex_a": cex_a, "cex_b": cex_b,
            **{f"victim{i}": v for i, v in enumerate(victims)},
        },
        expected={
            "revenue_eth": "10.57",
            "spend_eth": "15.96",
            "liquidity_delta_eth": "5.39",
            "p_min_eth": "0",
            "p_max_eth": "15.96",
            "transfer_count": 154,
            "distinct_addresses": 94,
            "holders_excluding_contracts": 77,
            "victim_count": 76,
            "max_price": "4.20e-11",
            "window_start": utc(2022, 4, 17, 21, 7, 24),
            "window_end": utc(2022, 4, 17, 21, 47, 0),
            "verdict": "sell_rug_pull",
            "pump_and_dump": True,
            "strategies": ["chain_hop", "gambling", "mixer_deposit"],
            "burners": {b1, b2, b3},
            "cashout_labels": [],
            "candidate_labels": ["Harbor Exchange", "Meridian Exchange"],
            "funding_source_tag": "ByBit",
            "creation_tx": creation_tx.hash,
        },
    )


def case2_scenario() -> Scenario:
    """Second documented case: no remove-liquidity call at all; the pool is
    emptied by dumping the retained supply in one final swap. Proceeds run
    through a peel chain into a heavily co-mingled wallet that pays out to
    five exchanges.

    Engineered exacts: revenue 4.91 ETH (drain swap excluded), spend
    2.91 ETH, liquidity delta +0.14 ETH via the drain-swap convention,
    peak price 6.87e-09 ETH.
    """
    store = ChainStore()
    w = ChainWriter(store, start_time=utc(2022, 6, 1))
    kit = ScamKit(w, "case2", decimals=12, token_is_token0=True)
    store.rates["2022-06-17"] = Decimal("1068.00")

    scammer = named_address("case2:scammer")
    m = named_address("case2:comingle-funder")
    peels = [named_address(f"case2:peel:{i}") for i in range(3)]
    victims = [named_address(f"case2:victim:{i}") for i in range(15)]

    bybit = _tag(store, "bybit", TagCategory.EXCHANGE, "ByBit")
    cexes = [
        _tag(store, "bitfinex", TagCategory.EXCHANGE, "Bitfinex"),
        _tag(store, "okex", TagCategory.EXCHANGE, "OkEx"),
        _tag(store, "cryptocom", TagCategory.EXCHANGE, "Crypto.com"),
        _tag(store, "gateio", TagCategory.EXCHANGE, "Gate.io"),
        _tag(store, "bittrex", TagCategory.EXCHANGE, "Bittrex"),
    ]

    _filler_activity(w, m, "case2:noise", 62, utc(2022, 6, 1, 6, 0), amount="120")
    _value(w, bybit, m, "400", at=utc(2022, 6, 10, 10, 0))
    _value(w, m, scammer, "6", at=utc(2022, 6, 16, 9, 0))

    w.at(utc(2022, 6, 17, 9, 8, 0))
    kit.create_token(scammer, 24 * 10**12 * 10**12)
    kit.create_pair(scammer)
    kit.add_liquidity(scammer, eth("3"), 6 * 10**9 * 10**12)

    balance = 24 * 10**12 * 10**12 - 6 * 10**9 * 10**12

    def sbuy(amount: str, pinned: Optional[int] = None) -> None:
        nonlocal balance
        _, got = kit.buy(scammer, eth(amount), pinned)
        balance += got

    w.tick(120)
    sbuy("1.0")
    w.tick(1800)
    sbuy("1.0")
    for v in victims[:8]:
        w.tick(1800)
        kit.buy(v, eth("0.15"))
    w.tick(1800)
    sbuy("0.91", 132_460 * 10**15)  # 6.87e-09 ETH/token print
    for v in victims[8:14]:
        w.tick(1800)
        kit.buy(v, eth("0.15"))
    w.tick(1800)
    kit.buy(victims[14], eth("0.05"))

    for eth_out, tokens_in in [("1.5", 6 * 10**20), ("1.3", 8 * 10**20),
                               ("1.1", 11 * 10**20), ("1.01", 16 * 10**20)]:
        w.tick(1800)
        kit.sell(scammer, eth_out=eth(eth_out), tokens_in=tokens_in)
        balance -= tokens_in

    # the exit: whole remaining balance swapped out, no remove call
    w.at(utc(2022, 6, 17, 20, 56, 0))
    kit.sell(scammer, eth_out=eth("3.14"), tokens_in=balance)

    kit.unwrap_proceeds(scammer, eth("8.05"))
    _value(w, scammer, peels[0], "7.9", at=utc(2022, 6, 17, 21, 30))
    _value(w, peels[0], peels[1], "7.7", at=utc(2022, 6, 17, 21, 45))
    _value(w, peels[1], peels[2], "7.5", at=utc(2022, 6, 17, 22, 0))
    _value(w, peels[2], m, "7.4", at=utc(2022, 6, 17, 22, 15))
    for i, (cex, amount) in enumerate(zip(cexes, ["3.0", "2.5", "2.0", "1.5", "1.2"])):
        _value(w, m, cex, amount, at=utc(2022, 6, 18, 9 + i, 0))

    # stray late transfer long after the pool died
    w.at(utc(2022, 6, 20, 12, 17, 0))
    kit.transfer(victims[0], victims[1], 10**12)

    store.reindex()
    return Scenario(
        name="case2",
        store=store,
        token=kit.token,
        pair=kit.pair,
        weth=kit.weth,
        actors={
            "scammer": scammer, "m": m, "bybit": bybit,
            **{f"peel{i}": p for i, p in enumerate(peels)},
            **{f"victim{i}": v for i, v in enumerate(victims)},
            **{f"cex{i}": c for i, c in enumerate(cexes)},
        },
        expected={
            "revenue_eth": "4.91",
            "spend_eth": "2.91",
            "liquidity_delta_eth": "0.14",
            "p_min_eth": "2.14",
            "p_max_eth": "5.05",
            "max_price": "6.87e-09",
            "window_end": utc(2022, 6, 17, 20, 56, 0),
            "window_end_reason": "drain_swap",
            "verdict": "sell_rug_pull",
            "pump_and_dump": True,
            "strategies": ["peel_chain"],
            "peel_chain": [scammer] + peels + [m],
            "burners": set(peels),
            "cashout_labels": ["Bitfinex", "Bittrex", "Crypto.com", "Gate.io", "OkEx"],
            "funding_source_tag": "ByBit",
        },
    )


def case3_scenario() -> Scenario:
    """Third documented case: 17-minute scam with advance-fee behaviour —
    every sell skims the seller and mints pool liquidity in the same
    transaction. No laundering: exchange-funded, one pass-through wallet,
    exchange cash-out.

    Engineered exacts: revenue 0.21 ETH, spend 2.35 ETH, liquidity delta
    +2.517 ETH, peak price 1.45e-08 ETH.
    """
    store = ChainStore()
    w = ChainWriter(store, start_time=utc(2022, 4, 1))
    kit = ScamKit(w, "case3", decimals=9, token_is_token0=False)
    store.rates["2022-04-13"] = Decimal("3029.87")

    scammer = named_address("case3:scammer")
    passthrough = named_address("case3:passthrough")
    victims = [named_address(f"case3:victim:{i}") for i in range(8)]
    coinbase = _tag(store, "coinbase", TagCategory.EXCHANGE, "Coinbase")

    _value(w, coinbase, scammer, "3", at=utc(2022, 4, 12, 10, 0))

    w.at(utc(2022, 4, 13, 11, 56, 0))
    kit.create_token(scammer, 2 * 10**9 * 10**9)
    kit.create_pair(scammer)
    kit.add_liquidity(scammer, eth("2"), 10**9 * 10**9)

    kit.buy(scammer, eth("0.4"))
    kit.buy(scammer, eth("0.8"))
    for i, v in enumerate(victims):
        kit.buy(v, eth("0.05") if i < 7 else eth("0.037"))
    kit.buy(scammer, eth("0.57"))
    kit.buy(scammer, eth("0.58"), 40_000 * 10**12)  # 1.45e-08 ETH/token print

    kit.sell(scammer, eth_out=eth("0.12"), tokens_in=24_000 * 10**12,
             fee_skim_bps=500, auto_liquidity=True)
    kit.sell(scammer, eth_out=eth("0.09"), tokens_in=75_000 * 10**12,
             fee_skim_bps=500, auto_liquidity=True)

    # a holder burning dust puts the null address among the holders
    kit.transfer(victims[0], ZERO_ADDRESS, 5 * 10**9)

    w.at(utc(2022, 4, 13, 12, 13, 0))
    burn_eth = kit.minted_eth_total + eth("2.517")
    _, removed_eth, _ = kit.remove_liquidity(scammer, eth_out=burn_eth)

    kit.unwrap_proceeds(scammer, removed_eth)
    _value(w, scammer, passthrough, "2.7", at=utc(2022, 4, 13, 12, 30))
    _value(w, passthrough, coinbase, "2.6", at=utc(2022, 4, 13, 12, 45))
    # the pass-through keeps receiving dust afterwards: active, not a burner
    w.at(utc(2022, 5, 10, 9, 0))
    for i in range(5):
        w.tx(named_address(f"case3:later-peer:{i % 2}"), passthrough, value_wei=eth("0.2"))
        w.tick(3600)

    store.reindex()
    return Scenario(
        name="case3",
        store=store,
        token=kit.token,
        pair=kit.pair,
        weth=kit.weth,
        actors={
            "scammer": scammer, "passthrough": passthrough, "coinbase": coinbase,
            **{f"victim{i}": v for i, v in enumerate(victims)},
        },
        expected={
            "revenue_eth": "0.21",
            "spend_eth": "2.35",
            "liquidity_delta_eth": "2.517",
            "p_min_eth": "0.377",
            "p_max_eth": "2.727",
            "max_price": "1.45e-08",
            "window_start": utc(2022, 4, 13, 11, 56, 24),
            "window_end": utc(2022, 4, 13, 12, 13, 0),
            "verdict": "sell_rug_pull",
            "advance_fee_kind": "both",
            "strategies": ["none"],
            "burners": set(),
            "cashout_labels": ["Coinbase"],
            "funding_source_tag": "Coinbase",
            "has_null_holder": True,
        },
        contract_sources={kit.token.hex: PLAIN_CONTRACT_SOURCE},
    )


def case4_scenario() -> Scenario:
    """Fourth documented case: buys and sells interleave, so the price
    prints several peaks before the exit. No laundering from the primary
    wallet: exchange-funded, exchange cash-out. Several participants hold
    dozens of other thin tokens (degen annotation material).

    Engineered exacts: revenue 15.59 ETH, spend 15.79 ETH, liquidity delta
    +0.26 ETH, peak price 1.23e-11 ETH with two secondary peaks.
    """
    store = ChainStore()
    w = ChainWriter(store, start_time=utc(2022, 5, 20))
    kit = ScamKit(w, "case4", decimals=6, token_is_token0=True)
    store.rates["2022-05-30"] = Decimal("1811.89")

    scammer = named_address("case4:scammer")
    flipper = named_address("case4:flipper")
    victims = [named_address(f"case4:victim:{i}") for i in range(10)]
    binance = _tag(store, "binance", TagCategory.EXCHANGE, "Binance")

    _value(w, binance, scammer, "17", at=utc(2022, 5, 28, 10, 0))

    # airdropped junk portfolios: degen annotation, never attribution
    w.at(utc(2022, 5, 29, 9, 0))
    airdropper = named_address("case4:airdropper")
    for degen in (flipper, victims[0], victims[1]):
        mints = [
            _transfer(named_address(f"case4:alt:{j}"), ZERO_ADDRESS, degen,
                      10**21, 18)
            for j in range(22)
        ]
        w.tx(airdropper, degen, events=mints)

    w.at(utc(2022, 5, 30, 7, 26, 0))
    kit.create_token(scammer, 11 * 10**12 * 10**6)
    kit.create_pair(scammer)
    kit.add_liquidity(scammer, eth("5"), 4_170 * 10**9 * 10**6)

    flipper_balance = 0

    w.tick(600)
    kit.buy(scammer, eth("3.0"))
    w.tick(600)
    kit.buy(scammer, eth("2.0"))
    w.tick(600)
    kit.buy(scammer, eth("1.5"), 153 * 10**15)        # peak one: 9.8e-12
    w.tick(600)
    kit.sell(scammer, eth_out=eth("1.2"), tokens_in=240 * 10**15)
    w.tick(600)
    kit.sell(scammer, eth_out=eth("0.8"), tokens_in=200 * 10**15)
    for v in victims:
        w.tick(600)
        kit.buy(v, eth("0.021"))
    w.tick(600)
    _, flipper_balance = kit.buy(flipper, eth("0.3"))
    w.tick(600)
    kit.buy(scammer, eth("2.79"))
    w.tick(600)
    kit.buy(scammer, eth("2.0"), 220 * 10**15)
    w.tick(600)
    kit.buy(scammer, eth("1.599"), 130 * 10**15)      # global peak: 1.23e-11
    w.tick(600)
    kit.sell(flipper, eth_out=eth("0.44"), tokens_in=flipper_balance)
    w.tick(600)
    kit.sell(scammer, eth_out=eth("1.5"), tokens_in=320 * 10**15)
    w.tick(600)
    kit.sell(scammer, eth_out=eth("1.0"), tokens_in=290 * 10**15)
    w.tick(600)
    kit.buy(scammer, eth("2.901"), 290_100 * 10**12)  # peak three: 1.0e-11
    w.tick(600)
    kit.sell(scammer, eth_out=eth("6.0"), tokens_in=3 * 10**18)
    w.tick(600)
    kit.sell(scammer, eth_out=eth("5.09"), tokens_in=5_656 * 10**15)

    w.at(utc(2022, 5, 30, 13, 36, 0))
    _, removed_eth, _ = kit.remove_liquidity(scammer, eth_out=eth("5.26"))

    kit.unwrap_proceeds(scammer, removed_eth)
    _value(w, scammer, binance, "10", at=utc(2022, 5, 30, 18, 38))
    _value(w, scammer, binance, "5.4", at=utc(2022, 6, 6, 11, 25))

    store.reindex()
    return Scenario(
        name="case4",
        store=store,
        token=kit.token,
        pair=kit.pair,
        weth=kit.weth,
        actors={
            "scammer": scammer, "flipper": flipper, "binance": binance,
            **{f"victim{i}": v for i, v in enumerate(victims)},
        },
        expected={
            "revenue_eth": "15.59",
            "spend_eth": "15.79",
            "liquidity_delta_eth": "0.26",
            "p_min_eth": "0.06",
            "p_max_eth": "15.85",
            "reported_p_min_eth": "0.1",
            "max_price": "1.23e-11",
            "window_end": utc(2022, 5, 30, 13, 36, 0),
            "verdict": "sell_rug_pull",
            "pump_and_dump": True,
            "secondary_peak_count": 2,
            "strategies": ["none"],
            "burners": set(),
            "cashout_labels": ["Binance"],
            "funding_source_tag": "Binance",
            "degens": {flipper, victims[0], victims[1]},
        },
    )


def case5_scenario() -> Scenario:
    """Fifth documented case: four-day scheme, highest unit price of the
    set, a lucky participant selling within a whisker of the top, two
    stray sells weeks later, then a 28-address fan-out with peel chains
    and an exchange cash-out through a co-mingled wallet.

    Engineered exacts: revenue 7.11 ETH, spend 8.13 ETH, liquidity delta
    +0.26 ETH, peak price 2.39e-05 ETH.
    """
    store = ChainStore()
    w = ChainWriter(store, start_time=utc(2022, 5, 1))
    kit = ScamKit(w, "case5", decimals=9, token_is_token0=True)
    store.rates["2022-05-05"] = Decimal("2940.23")

    scammer = named_address("case5:scammer")
    lucky = named_address("case5:lucky")
    victims = [named_address(f"case5:victim:{i}") for i in range(20)]
    fan = [named_address(f"case5:fan:{i}") for i in range(26)]
    f1 = named_address("case5:big-recipient")
    g = [named_address(f"case5:gchain:{i}") for i in range(4)]
    kucoin = _tag(store, "kucoin", TagCategory.EXCHANGE, "Kucoin")

    # the big recipient carries a sizeable co-mingled balance of its own
    w.at(utc(2022, 5, 1, 6, 0))
    for i in range(12):
        w.tx(named_address(f"case5:noise:{i % 5}"), f1, value_wei=eth("5"))
        w.tick(3600)
    _value(w, kucoin, scammer, "9", at=utc(2022, 5, 4, 10, 0))

    w.at(utc(2022, 5, 5, 13, 54, 0))
    kit.create_token(scammer, 3 * 10**6 * 10**9)
    kit.create_pair(scammer)
    kit.add_liquidity(scammer, eth("4"), 1_580 * 10**3 * 10**9)

    lucky_balance = 0
    # four days of pumping: buys only, sells held for the exit
    w.tick(3600)
    kit.buy(scammer, eth("1.5"))
    w.tick(21600)
    kit.buy(scammer, eth("1.2"))
    w.tick(21600)
    _, lucky_balance = kit.buy(lucky, eth("0.2"))
    w.tick(21600)
    kit.buy(scammer, eth("1.0"))
    for v in victims:
        w.tick(7200)
        kit.buy(v, eth("0.015"))
    w.tick(21600)
    kit.buy(scammer, eth("1.2"))
    w.tick(21600)
    kit.buy(scammer, eth("0.84"))
    w.tick(21600)
    kit.buy(scammer, eth("2.39"), 100 * 10**3 * 10**9)  # 2.39e-05 ETH/token print

    # the lucky one: out within 3% of the top
    w.tick(600)
    kit.sell(lucky, eth_out=eth("0.18"), tokens_in=7_700 * 10**9)
    lucky_balance -= 7_700 * 10**9

    for eth_out, tokens_in in [("2.0", 105 * 10**12), ("1.8", 135 * 10**12),
                               ("1.5", 170 * 10**12), ("1.0", 220 * 10**12),
                               ("0.81", 600 * 10**12)]:
        w.tick(7200)
        kit.sell(scammer, eth_out=eth(eth_out), tokens_in=tokens_in)

    w.at(utc(2022, 5, 9, 17, 59, 0))
    _, removed_eth, _ = kit.remove_liquidity(scammer, eth_out=eth("4.26"))

    # stray exits weeks later, into what little the pool still holds
    w.at(utc(2022, 5, 22, 7, 4, 0))
    kit.sell(victims[0], tokens_in=10**12)
    w.tick(60)
    kit.sell(victims[1], tokens_in=10**12)

    kit.unwrap_proceeds(scammer, removed_eth)
    w.at(utc(2022, 6, 5, 10, 56, 0))
    _value(w, scammer, f1, "1.23")
    _value(w, scammer, g[0], "0.2")
    for addr in fan[:25]:
        _value(w, scammer, addr, "0.0527")
    _value(w, scammer, fan[25], "0.0525")
    # fan members shuffle funds among themselves: chains appear
    _value(w, scammer, g[1], "0.0527")
    _value(w, scammer, g[2], "0.0527")
    _value(w, g[0], g[1], "0.19", at=utc(2022, 6, 5, 11, 30))
    _value(w, g[1], g[2], "0.2307", at=utc(2022, 6, 5, 12, 0))
    _value(w, g[2], g[3], "0.27", at=utc(2022, 6, 5, 12, 30))
    _value(w, f1, kucoin, "6.14", at=utc(2022, 6, 5, 14, 0))

    # the fan-out crowd stays active: none of them are burners
    w.at(utc(2022, 6, 20, 9, 0))
    for addr in fan + g:
        w.tx(addr, named_address("case5:later-peer"), value_wei=eth("0.001"))
        w.tick(60)

    store.reindex()
    return Scenario(
        name="case5",
        store=store,
        token=kit.token,
        pair=kit.pair,
        weth=kit.weth,
        actors={
            "scammer": scammer, "lucky": lucky, "f1": f1, "kucoin": kucoin,
            **{f"g{i}": a for i, a in enumerate(g)},
            **{f"victim{i}": v for i, v in enumerate(victims)},
        },
        expected={
            "revenue_eth": "7.11",
            "spend_eth": "8.13",
            "liquidity_delta_eth": "0.26",
            "p_min_eth": "-0.76",
            "p_max_eth": "7.37",
            "reported_p_min_eth": "1.28",
            "max_price": "2.39e-05",
            "window_end": utc(2022, 5, 9, 17, 59, 0),
            "verdict": "sell_rug_pull",
            "pump_and_dump": True,
            "top_sellers": {lucky},
            "strategies": ["peel_chain"],
            "peel_chains": [
                [scammer, g[0], g[1], g[2], g[3]],
                [scammer, g[1], g[2], g[3]],
            ],
            "burners": set(),
            "cashout_labels": ["Kucoin"],
            "funding_source_tag": "Kucoin",
            "victim_count": 18,
        },
    )


SCENARIOS = {
    "golden": golden_scenario,
    "case1": case1_scenario,
    "case2": case2_scenario,
    "case3": case3_scenario,
    "case4": case4_scenario,
    "case5": case5_scenario,
}


def write_bundle(scenario: Scenario, path: str) -> None:
    import os

    write_fixture(scenario.store, path)
    if scenario.contract_sources:
        contracts_dir = os.path.join(path, "contracts")
        os.makedirs(contracts_dir, exist_ok=True)
        for token_hex, source in scenario.contract_sources.items():
            with open(os.path.join(contracts_dir, f"{token_hex}.sol"), "w",
                      encoding="utf-8") as fh:
                fh.write(source)


def main(argv: Optional[list[str]] = None) -> int:
    import argparse
    import os

    parser = argparse.ArgumentParser(
        description="Write the bundled synthetic investigation scenarios to disk."
    )
    parser.add_argument("outdir", help="directory to receive one bundle per scenario")
    parser.add_argument("--only", choices=sorted(SCENARIOS), help="write a single scenario")
    args = parser.parse_args(argv)

    names = [args.only] if args.only else sorted(SCENARIOS)
    for name in names:
        scenario = SCENARIOS[name]()
        bundle_dir = os.path.join(args.outdir, name)
        write_bundle(scenario, bundle_dir)
        print(f"{name}: {bundle_dir} ({len(scenario.store.transactions)} txs, "
              f"{len(scenario.store.logs)} logs)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
