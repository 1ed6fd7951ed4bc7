"""Raw and decoded on-chain record types."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from chainsleuth.chaindata.address import Address

# (block_number, tx_index, log_index) — the total order on everything we store.
Position = tuple[int, int, int]


class TxStatus(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"


@dataclass(frozen=True)
class Transaction:
    hash: bytes
    block_number: int
    tx_index: int
    timestamp: int  # UTC seconds
    sender: Address
    to: Optional[Address]  # None for contract creation
    value_wei: int
    status: TxStatus = TxStatus.SUCCESS
    input_selector: Optional[bytes] = None  # first 4 bytes of calldata

    def __post_init__(self) -> None:
        if len(self.hash) != 32:
            raise ValueError("tx hash must be 32 bytes")
        if self.value_wei < 0:
            raise ValueError("tx value must be non-negative")
        if self.input_selector is not None and len(self.input_selector) != 4:
            raise ValueError("input selector must be 4 bytes")

    @property
    def hash_hex(self) -> str:
        return "0x" + self.hash.hex()

    @property
    def position(self) -> Position:
        return (self.block_number, self.tx_index, 0)


@dataclass(frozen=True)
class LogEvent:
    emitter: Address
    topics: tuple[bytes, ...]  # 1-4 entries, 32 bytes each
    data: bytes
    tx_hash: bytes
    log_index: int

    def __post_init__(self) -> None:
        if not (1 <= len(self.topics) <= 4):
            raise ValueError("log must carry 1-4 topics")
        for t in self.topics:
            if len(t) != 32:
                raise ValueError("topics must be 32 bytes")


@dataclass(frozen=True)
class Erc20Transfer:
    token: Address
    sender: Address
    recipient: Address
    amount: int  # token base units
    decimals: int
    tx_hash: bytes
    log_index: int

    def __post_init__(self) -> None:
        if self.amount < 0:
            raise ValueError("transfer amount must be non-negative")

    @property
    def is_mint(self) -> bool:
        return self.sender.is_zero

    @property
    def is_burn(self) -> bool:
        return self.recipient.is_zero


@dataclass(frozen=True)
class PairCreated:
    pair: Address
    token0: Address
    token1: Address
    tx_hash: bytes
    log_index: int
    factory: Address
    pair_index: int = 0  # factory's allPairs ordinal, kept for byte-exact re-encoding


@dataclass(frozen=True)
class PairMint:
    pair: Address
    amount0: int
    amount1: int
    tx_hash: bytes
    log_index: int
    sender: Address


@dataclass(frozen=True)
class PairBurn:
    pair: Address
    amount0: int
    amount1: int
    to: Address
    tx_hash: bytes
    log_index: int
    sender: Address


@dataclass(frozen=True)
class PairSwap:
    pair: Address
    amount0_in: int
    amount1_in: int
    amount0_out: int
    amount1_out: int
    to: Address
    tx_hash: bytes
    log_index: int
    sender: Address

    def __post_init__(self) -> None:
        if self.amount0_in + self.amount1_in <= 0:
            raise ValueError("swap must take at least one input amount")
        if self.amount0_out + self.amount1_out <= 0:
            raise ValueError("swap must pay out at least one amount")


@dataclass(frozen=True)
class PairSync:
    pair: Address
    reserve0: int
    reserve1: int
    tx_hash: bytes
    log_index: int


PairEvent = Union[PairCreated, PairMint, PairBurn, PairSwap, PairSync]


class TagCategory(enum.Enum):
    EXCHANGE = "exchange"
    MIXER = "mixer"
    BRIDGE = "bridge"
    GAMBLING = "gambling"
    BLOCKLIST = "blocklist"
    OTHER = "other"


@dataclass(frozen=True)
class AddressTag:
    address: Address
    category: TagCategory
    label: str

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("tag label must be non-empty")


@dataclass
class TokenMeta:
    address: Address
    decimals: int
    name: Optional[str] = None
    symbol: Optional[str] = None
    # filled in during the load-time decode pass
    creator: Optional[Address] = None
    creation_tx: Optional[bytes] = None
    total_supply: int = 0


@dataclass
class Warning_:
    """Non-fatal finding attached to derived artifacts (timelines, graphs)."""

    code: str
    message: str
    tx_hashes: tuple[bytes, ...] = field(default_factory=tuple)
