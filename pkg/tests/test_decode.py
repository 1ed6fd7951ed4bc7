"""Event decoding against hand-packed byte vectors, plus totality and
round-trip properties."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainsleuth.chaindata.address import Address, ZERO_ADDRESS
from chainsleuth.chaindata.decode import (
    decode_erc20_transfer,
    decode_pair_event,
    encode_erc20_transfer,
    encode_pair_event,
)
from chainsleuth.chaindata.models import (
    Erc20Transfer,
    LogEvent,
    PairBurn,
    PairCreated,
    PairMint,
    PairSwap,
    PairSync,
)
from chainsleuth.errors import MalformedEventError

TOKEN = Address.from_hex("0x00000000000000000000000000000000000000aa")
PAIR = Address.from_hex("0x00000000000000000000000000000000000000bb")
ALICE = Address.from_hex("0x00000000000000000000000000000000000000a1")
BOB = Address.from_hex("0x00000000000000000000000000000000000000b2")
TX = b"\x11" * 32


def _word(value: int) -> bytes:
    return value.to_bytes(32, "big")


def _addr_word(a: Address) -> bytes:
    return b"\x00" * 12 + a.raw


# hand-packed from the ABI event layouts, not via the encoders
TRANSFER_TOPIC0 = bytes.fromhex(
    "ddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef")
SWAP_TOPIC0 = bytes.fromhex(
    "d78ad95fa46c994b6551d0da85fc275fe613ce37657fb8d5e3d130840159d822")
SYNC_TOPIC0 = bytes.fromhex(
    "1c411e9a96e071241c2f21f7726b17ae89e3cab4c78be50e062b03a9fffbbad1")
PAIR_CREATED_TOPIC0 = bytes.fromhex(
    "0d3648bd0f6ba80134a33ba9275ac585d9d315f0ad8355cddefde31afa28d0e9")


def test_decode_transfer_hand_packed():
    log = LogEvent(
        emitter=TOKEN,
        topics=(TRANSFER_TOPIC0, _addr_word(ALICE), _addr_word(BOB)),
        data=_word(1000),
        tx_hash=TX,
        log_index=0,
    )
    t = decode_erc20_transfer(log, decimals=18)
    assert t is not None
    assert t.sender == ALICE and t.recipient == BOB and t.amount == 1000
    assert t.token == TOKEN


def test_decode_transfer_mint_and_burn_flags():
    mint = LogEvent(TOKEN, (TRANSFER_TOPIC0, _addr_word(ZERO_ADDRESS), _addr_word(BOB)),
                    _word(5), TX, 0)
    burn = LogEvent(TOKEN, (TRANSFER_TOPIC0, _addr_word(ALICE), _addr_word(ZERO_ADDRESS)),
                    _word(5), TX, 1)
    assert decode_erc20_transfer(mint, 18).is_mint
    assert decode_erc20_transfer(burn, 18).is_burn


def test_decode_unrelated_topic_is_not_a_transfer():
    log = LogEvent(TOKEN, (b"\xde" * 32,), _word(1), TX, 0)
    assert decode_erc20_transfer(log, 18) is None
    assert decode_pair_event(log) is None


def test_decode_transfer_malformed_shapes():
    # right signature, wrong topic count
    with pytest.raises(MalformedEventError):
        decode_erc20_transfer(
            LogEvent(TOKEN, (TRANSFER_TOPIC0, _addr_word(ALICE)), _word(1), TX, 0), 18)
    # right signature, wrong data length
    with pytest.raises(MalformedEventError):
        decode_erc20_transfer(
            LogEvent(TOKEN, (TRANSFER_TOPIC0, _addr_word(ALICE), _addr_word(BOB)),
                     b"\x01\x02", TX, 0), 18)


def test_decode_sync_hand_packed():
    log = LogEvent(
        emitter=PAIR,
        topics=(SYNC_TOPIC0,),
        data=_word(10 * 10**18) + _word(10**12),
        tx_hash=TX,
        log_index=3,
    )
    ev = decode_pair_event(log)
    assert isinstance(ev, PairSync)
    assert ev.reserve0 == 10 * 10**18
    assert ev.reserve1 == 10**12


def test_decode_swap_hand_packed_and_zero_sides_rejected():
    good = LogEvent(
        PAIR,
        (SWAP_TOPIC0, _addr_word(ALICE), _addr_word(ALICE)),
        _word(10**18) + _word(0) + _word(0) + _word(5 * 10**11),
        TX, 2,
    )
    ev = decode_pair_event(good)
    assert isinstance(ev, PairSwap)
    assert ev.amount0_in == 10**18 and ev.amount1_out == 5 * 10**11

    bad = LogEvent(
        PAIR,
        (SWAP_TOPIC0, _addr_word(ALICE), _addr_word(ALICE)),
        _word(0) + _word(0) + _word(1) + _word(0),
        TX, 2,
    )
    with pytest.raises(MalformedEventError):
        decode_pair_event(bad)


def test_decode_pair_created_hand_packed():
    weth = Address.from_hex("0x00000000000000000000000000000000000000ee")
    log = LogEvent(
        emitter=Address.from_hex("0x00000000000000000000000000000000000000fa"),
        topics=(PAIR_CREATED_TOPIC0, _addr_word(weth), _addr_word(TOKEN)),
        data=_addr_word(PAIR) + _word(7),
        tx_hash=TX,
        log_index=0,
    )
    ev = decode_pair_event(log)
    assert isinstance(ev, PairCreated)
    assert ev.token0 == weth and ev.token1 == TOKEN
    assert ev.pair == PAIR and ev.pair_index == 7


def test_sync_reserve_overflow_rejected():
    log = LogEvent(PAIR, (SYNC_TOPIC0,), _word(1 << 112) + _word(1), TX, 0)
    with pytest.raises(MalformedEventError):
        decode_pair_event(log)


addresses = st.binary(min_size=20, max_size=20).map(Address)
amounts = st.integers(min_value=0, max_value=2**256 - 1)
small_amounts = st.integers(min_value=0, max_value=2**112 - 1)


@given(sender=addresses, recipient=addresses, amount=amounts)
@settings(max_examples=200)
def test_transfer_round_trip(sender, recipient, amount):
    original = Erc20Transfer(token=TOKEN, sender=sender, recipient=recipient,
                             amount=amount, decimals=9, tx_hash=TX, log_index=4)
    log = encode_erc20_transfer(original)
    decoded = decode_erc20_transfer(log, decimals=9)
    assert decoded == original
    assert encode_erc20_transfer(decoded) == log


@given(
    kind=st.sampled_from(["mint", "burn", "swap", "sync", "created"]),
    a=st.integers(min_value=0, max_value=2**112 - 1),
    b=st.integers(min_value=0, max_value=2**112 - 1),
    c=st.integers(min_value=1, max_value=2**100),
    d=st.integers(min_value=1, max_value=2**100),
    who=addresses,
    to=addresses,
)
@settings(max_examples=200)
def test_pair_event_round_trip(kind, a, b, c, d, who, to):
    if kind == "mint":
        ev = PairMint(PAIR, a, b, TX, 1, who)
    elif kind == "burn":
        ev = PairBurn(PAIR, a, b, to, TX, 1, who)
    elif kind == "swap":
        ev = PairSwap(PAIR, c, 0, 0, d, to, TX, 1, who)
    elif kind == "sync":
        ev = PairSync(PAIR, a, b, TX, 1)
    else:
        ev = PairCreated(PAIR, who, to, TX, 1, TOKEN, a)
    log = encode_pair_event(ev)
    decoded = decode_pair_event(log)
    assert decoded == ev
    assert encode_pair_event(decoded) == log


def test_decode_totality_on_random_bytes():
    """Arbitrary topics/data either decode, return None, or raise the typed
    malformed-event error. Nothing else escapes."""
    rng = random.Random(20220417)
    known_topics = [TRANSFER_TOPIC0, SWAP_TOPIC0, SYNC_TOPIC0, PAIR_CREATED_TOPIC0]
    for i in range(2000):
        topic0 = rng.choice(known_topics + [rng.randbytes(32)])
        n_topics = rng.randint(1, 4)
        topics = (topic0,) + tuple(rng.randbytes(32) for _ in range(n_topics - 1))
        data = rng.randbytes(rng.choice([0, 1, 31, 32, 33, 64, 96, 128, 200]))
        log = LogEvent(TOKEN, topics, data, TX, i)
        for decoder in (lambda l: decode_erc20_transfer(l, 18), decode_pair_event):
            try:
                decoder(log)
            except MalformedEventError:
                pass
