"""20-byte Ethereum addresses, canonically rendered as lowercase 0x-hex."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Address:
    raw: bytes

    def __post_init__(self) -> None:
        if not isinstance(self.raw, bytes) or len(self.raw) != 20:
            raise ValueError(f"address must be exactly 20 bytes, got {self.raw!r}")

    @classmethod
    def from_hex(cls, text: str) -> "Address":
        s = text.lower()
        if s.startswith("0x"):
            s = s[2:]
        if len(s) != 40:
            raise ValueError(f"address hex must be 40 nibbles, got {text!r}")
        return cls(bytes.fromhex(s))

    @property
    def hex(self) -> str:
        return "0x" + self.raw.hex()

    @property
    def is_zero(self) -> bool:
        return self.raw == b"\x00" * 20

    def short(self) -> str:
        """Truncated display form, e.g. 0x1234..abcd."""
        h = self.raw.hex()
        return f"0x{h[:4]}..{h[-4:]}"

    def __str__(self) -> str:
        return self.hex

    def __repr__(self) -> str:
        return f"Address({self.hex})"


ZERO_ADDRESS = Address(b"\x00" * 20)
