"""Chain data layer: raw records, event decoding, storage and tagging."""

from chainsleuth.chaindata.address import Address, ZERO_ADDRESS
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
from chainsleuth.chaindata.decode import (
    decode_erc20_transfer,
    decode_pair_event,
    encode_erc20_transfer,
    encode_pair_event,
)
from chainsleuth.chaindata.store import ChainStore, load_fixture, write_fixture

__all__ = [
    "Address",
    "ZERO_ADDRESS",
    "AddressTag",
    "ChainStore",
    "Erc20Transfer",
    "LogEvent",
    "PairBurn",
    "PairCreated",
    "PairEvent",
    "PairMint",
    "PairSwap",
    "PairSync",
    "Position",
    "TagCategory",
    "TokenMeta",
    "Transaction",
    "TxStatus",
    "decode_erc20_transfer",
    "decode_pair_event",
    "encode_erc20_transfer",
    "encode_pair_event",
    "load_fixture",
    "write_fixture",
]
