"""ERC-20 and Uniswap-V2 pair event decoding (and re-encoding).

Decoders are total: any log either decodes, returns None (signature
mismatch), or raises MalformedEventError (signature matched, payload
invalid). They never crash on arbitrary bytes.
"""

from __future__ import annotations

from typing import Optional

from chainsleuth.chaindata.address import Address
from chainsleuth.chaindata.models import (
    Erc20Transfer,
    LogEvent,
    PairBurn,
    PairCreated,
    PairEvent,
    PairMint,
    PairSwap,
    PairSync,
)
from chainsleuth.errors import MalformedEventError
from chainsleuth.keccak import event_topic

TRANSFER_TOPIC = event_topic("Transfer(address,address,uint256)")
PAIR_CREATED_TOPIC = event_topic("PairCreated(address,address,address,uint256)")
MINT_TOPIC = event_topic("Mint(address,uint256,uint256)")
BURN_TOPIC = event_topic("Burn(address,uint256,uint256,address)")
SWAP_TOPIC = event_topic("Swap(address,uint256,uint256,uint256,uint256,address)")
SYNC_TOPIC = event_topic("Sync(uint112,uint112)")

_UINT112_MAX = (1 << 112) - 1


def _topic_address(topic: bytes) -> Address:
    # address arguments are right-aligned in their 32-byte topic slot
    return Address(topic[12:])


def _address_word(addr: Address) -> bytes:
    return b"\x00" * 12 + addr.raw


def _uint_word(value: int) -> bytes:
    if value < 0:
        raise ValueError("cannot encode negative amount")
    return value.to_bytes(32, "big")


def _data_words(log: LogEvent, count: int, name: str) -> list[int]:
    if len(log.data) != 32 * count:
        raise MalformedEventError(
            f"{name} event in tx 0x{log.tx_hash.hex()} log {log.log_index}: "
            f"expected {32 * count} data bytes, got {len(log.data)}"
        )
    return [int.from_bytes(log.data[i * 32:(i + 1) * 32], "big") for i in range(count)]


def _require_topics(log: LogEvent, count: int, name: str) -> None:
    if len(log.topics) != count:
        raise MalformedEventError(
            f"{name} event in tx 0x{log.tx_hash.hex()} log {log.log_index}: "
            f"expected {count} topics, got {len(log.topics)}"
        )


def decode_erc20_transfer(log: LogEvent, decimals: int) -> Optional[Erc20Transfer]:
    """Decode a Transfer log, or return None if topic0 is not the Transfer signature."""
    if log.topics[0] != TRANSFER_TOPIC:
        return None
    _require_topics(log, 3, "Transfer")
    (amount,) = _data_words(log, 1, "Transfer")
    return Erc20Transfer(
        token=log.emitter,
        sender=_topic_address(log.topics[1]),
        recipient=_topic_address(log.topics[2]),
        amount=amount,
        decimals=decimals,
        tx_hash=log.tx_hash,
        log_index=log.log_index,
    )


def decode_pair_event(log: LogEvent) -> Optional[PairEvent]:
    """Decode a Uniswap-V2 PairCreated/Mint/Burn/Swap/Sync log, or None."""
    topic0 = log.topics[0]

    if topic0 == PAIR_CREATED_TOPIC:
        _require_topics(log, 3, "PairCreated")
        _, pair_index = _data_words(log, 2, "PairCreated")
        pair_word = log.data[0:32]
        if any(pair_word[:12]):
            raise MalformedEventError(
                f"PairCreated in tx 0x{log.tx_hash.hex()}: pair address word has nonzero padding"
            )
        return PairCreated(
            pair=Address(pair_word[12:]),
            token0=_topic_address(log.topics[1]),
            token1=_topic_address(log.topics[2]),
            tx_hash=log.tx_hash,
            log_index=log.log_index,
            factory=log.emitter,
            pair_index=pair_index,
        )

    if topic0 == MINT_TOPIC:
        _require_topics(log, 2, "Mint")
        amount0, amount1 = _data_words(log, 2, "Mint")
        return PairMint(
            pair=log.emitter,
            amount0=amount0,
            amount1=amount1,
            tx_hash=log.tx_hash,
            log_index=log.log_index,
            sender=_topic_address(log.topics[1]),
        )

    if topic0 == BURN_TOPIC:
        _require_topics(log, 3, "Burn")
        amount0, amount1 = _data_words(log, 2, "Burn")
        return PairBurn(
            pair=log.emitter,
            amount0=amount0,
            amount1=amount1,
            to=_topic_address(log.topics[2]),
            tx_hash=log.tx_hash,
            log_index=log.log_index,
            sender=_topic_address(log.topics[1]),
        )

    if topic0 == SWAP_TOPIC:
        _require_topics(log, 3, "Swap")
        a0in, a1in, a0out, a1out = _data_words(log, 4, "Swap")
        if a0in + a1in == 0 or a0out + a1out == 0:
            raise MalformedEventError(
                f"Swap in tx 0x{log.tx_hash.hex()} log {log.log_index}: "
                "zero input or zero output side"
            )
        return PairSwap(
            pair=log.emitter,
            amount0_in=a0in,
            amount1_in=a1in,
            amount0_out=a0out,
            amount1_out=a1out,
            to=_topic_address(log.topics[2]),
            tx_hash=log.tx_hash,
            log_index=log.log_index,
            sender=_topic_address(log.topics[1]),
        )

    if topic0 == SYNC_TOPIC:
        _require_topics(log, 1, "Sync")
        reserve0, reserve1 = _data_words(log, 2, "Sync")
        if reserve0 > _UINT112_MAX or reserve1 > _UINT112_MAX:
            raise MalformedEventError(
                f"Sync in tx 0x{log.tx_hash.hex()} log {log.log_index}: reserve exceeds uint112"
            )
        return PairSync(
            pair=log.emitter,
            reserve0=reserve0,
            reserve1=reserve1,
            tx_hash=log.tx_hash,
            log_index=log.log_index,
        )

    return None


def encode_erc20_transfer(transfer: Erc20Transfer) -> LogEvent:
    """Inverse of decode_erc20_transfer; produces canonical topic/data bytes."""
    return LogEvent(
        emitter=transfer.token,
        topics=(
            TRANSFER_TOPIC,
            _address_word(transfer.sender),
            _address_word(transfer.recipient),
        ),
        data=_uint_word(transfer.amount),
        tx_hash=transfer.tx_hash,
        log_index=transfer.log_index,
    )


def encode_pair_event(event: PairEvent) -> LogEvent:
    """Inverse of decode_pair_event; produces canonical topic/data bytes."""
    if isinstance(event, PairCreated):
        return LogEvent(
            emitter=event.factory,
            topics=(
                PAIR_CREATED_TOPIC,
                _address_word(event.token0),
                _address_word(event.token1),
            ),
            data=_address_word(event.pair) + _uint_word(event.pair_index),
            tx_hash=event.tx_hash,
            log_index=event.log_index,
        )
    if isinstance(event, PairMint):
        return LogEvent(
            emitter=event.pair,
            topics=(MINT_TOPIC, _address_word(event.sender)),
            data=_uint_word(event.amount0) + _uint_word(event.amount1),
            tx_hash=event.tx_hash,
            log_index=event.log_index,
        )
    if isinstance(event, PairBurn):
        return LogEvent(
            emitter=event.pair,
            topics=(BURN_TOPIC, _address_word(event.sender), _address_word(event.to)),
            data=_uint_word(event.amount0) + _uint_word(event.amount1),
            tx_hash=event.tx_hash,
            log_index=event.log_index,
        )
    if isinstance(event, PairSwap):
        return LogEvent(
            emitter=event.pair,
            topics=(SWAP_TOPIC, _address_word(event.sender), _address_word(event.to)),
            data=(
                _uint_word(event.amount0_in)
                + _uint_word(event.amount1_in)
                + _uint_word(event.amount0_out)
                + _uint_word(event.amount1_out)
            ),
            tx_hash=event.tx_hash,
            log_index=event.log_index,
        )
    if isinstance(event, PairSync):
        return LogEvent(
            emitter=event.pair,
            topics=(SYNC_TOPIC,),
            data=_uint_word(event.reserve0) + _uint_word(event.reserve1),
            tx_hash=event.tx_hash,
            log_index=event.log_index,
        )
    raise TypeError(f"not a pair event: {event!r}")
