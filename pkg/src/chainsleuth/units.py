"""Integer wei / token-unit arithmetic and deterministic display formatting.

All on-chain amounts stay arbitrary-precision integers in base units;
ETH and USD strings are derived only at render time.
"""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Optional

WEI_PER_ETH = 10**18


def eth_to_wei(amount: str | int | Decimal) -> int:
    """Exact conversion of a decimal ETH amount to wei."""
    d = Decimal(str(amount)) * WEI_PER_ETH
    if d != d.to_integral_value():
        raise ValueError(f"{amount!r} ETH is not a whole number of wei")
    return int(d)


def wei_to_eth_str(wei: int) -> str:
    """Exact ETH rendering of a signed wei amount, trailing zeros trimmed."""
    sign = "-" if wei < 0 else ""
    q, r = divmod(abs(wei), WEI_PER_ETH)
    if r == 0:
        return f"{sign}{q}"
    frac = f"{r:018d}".rstrip("0")
    return f"{sign}{q}.{frac}"


def wei_to_eth_2dp(wei: int) -> str:
    """ETH rounded to 2 decimals, for headline report figures."""
    d = (Decimal(wei) / WEI_PER_ETH).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    return f"{d:.2f}"


def wei_to_usd_str(wei: int, usd_per_eth: Optional[Decimal]) -> Optional[str]:
    if usd_per_eth is None:
        return None
    usd = (Decimal(wei) / WEI_PER_ETH * usd_per_eth).quantize(
        Decimal("0.01"), rounding=ROUND_HALF_UP
    )
    return f"{usd:,.2f}"


def price_to_sci(price: Fraction) -> str:
    """Price as 3-significant-digit scientific notation, e.g. 2.39e-05."""
    if price == 0:
        return "0"
    d = Decimal(price.numerator) / Decimal(price.denominator)
    mantissa, _, exponent = f"{d:.2e}".partition("e")
    sign = "-" if exponent.startswith("-") else "+"
    return f"{mantissa}e{sign}{abs(int(exponent)):02d}"


def token_units_to_str(amount: int, decimals: int) -> str:
    """Exact token-amount rendering in display units."""
    if decimals == 0:
        return str(amount)
    sign = "-" if amount < 0 else ""
    q, r = divmod(abs(amount), 10**decimals)
    if r == 0:
        return f"{sign}{q}"
    frac = f"{r:0{decimals}d}".rstrip("0")
    return f"{sign}{q}.{frac}"
