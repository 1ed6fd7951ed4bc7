"""Reference figures from five documented rug-pull case studies.

Each row records the published investigation figures for one token:
revenue from selling the token (R), ETH spent buying it (S), the
liquidity difference (removed minus provided), and the published profit
bounds. The profit formulas are

    minimum = (R - S) + liquidity_delta
    maximum =  R      + liquidity_delta

Two published minimum-profit cells (cases 4 and 5) do not satisfy the
formula they accompany; verify_case reproduces the formula faithfully
and flags those cells as discrepancies instead of matching them.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from chainsleuth.frauddetect import (
    ReportedFigureCheck,
    check_reported_figures,
    profit_bounds,
)
from chainsleuth.units import eth_to_wei


@dataclass(frozen=True)
class CaseStudy:
    case_id: int
    active_period: str
    transfer_count: int
    unique_addresses: int
    remaining_holders: int
    holders_include_null: bool
    revenue_eth: str
    liquidity_delta_eth: str
    spend_eth: str
    max_price_eth: str
    reported_min_profit_eth: str
    reported_max_profit_eth: str
    usd_per_eth: str
    laundering_strategies: str
    cashout: str
    funded_by: str


CASEBOOK: tuple[CaseStudy, ...] = (
    CaseStudy(
        case_id=1,
        active_period="2022-04-17 21:07-21:47 UTC",
        transfer_count=154,
        unique_addresses=94,
        remaining_holders=77,
        holders_include_null=False,
        revenue_eth="10.57",
        liquidity_delta_eth="5.39",
        spend_eth="15.96",
        max_price_eth="4.20e-11",
        reported_min_profit_eth="0",
        reported_max_profit_eth="15.96",
        usd_per_eth="3061.88",
        laundering_strategies="chain-hopping; possibly gambling services for other schemes",
        cashout="unknown (centralized exchanges in general)",
        funded_by="active wallet linked to a ByBit account",
    ),
    CaseStudy(
        case_id=2,
        active_period="2022-06-17 09:08-20:56 UTC (final transfer 2022-06-20 12:17)",
        transfer_count=94,
        unique_addresses=22,
        remaining_holders=5,
        holders_include_null=False,
        revenue_eth="4.91",
        liquidity_delta_eth="0.14",
        spend_eth="2.91",
        max_price_eth="6.87e-09",
        reported_min_profit_eth="2.14",
        reported_max_profit_eth="5.05",
        usd_per_eth="1068.00",
        laundering_strategies="peel chains",
        cashout="Bitfinex, OkEx, Crypto.com, Gate.io, Bittrex",
        funded_by="active wallet linked to a ByBit account",
    ),
    CaseStudy(
        case_id=3,
        active_period="2022-04-13 11:56-12:13 UTC",
        transfer_count=92,
        unique_addresses=41,
        remaining_holders=34,
        holders_include_null=True,
        revenue_eth="0.21",
        liquidity_delta_eth="2.517",
        spend_eth="2.35",
        max_price_eth="1.45e-08",
        reported_min_profit_eth="0.38",
        reported_max_profit_eth="2.73",
        usd_per_eth="3029.87",
        laundering_strategies="one pass-through address, no obfuscation",
        cashout="Coinbase",
        funded_by="Coinbase",
    ),
    CaseStudy(
        case_id=4,
        active_period="2022-05-30 07:26-13:36 UTC (funds moved 18:38, then 2022-06-06 11:25)",
        transfer_count=132,
        unique_addresses=56,
        remaining_holders=35,
        holders_include_null=False,
        revenue_eth="15.59",
        liquidity_delta_eth="0.26",
        spend_eth="15.79",
        max_price_eth="1.23e-11",
        reported_min_profit_eth="0.1",
        reported_max_profit_eth="15.85",
        usd_per_eth="1811.89",
        laundering_strategies="none with the primary wallet",
        cashout="Binance",
        funded_by="Binance",
    ),
    CaseStudy(
        case_id=5,
        active_period="2022-05-05 13:54-2022-05-09 17:59 UTC (late sells 2022-05-22, "
                      "funds moved 2022-06-05 10:56)",
        transfer_count=500,
        unique_addresses=82,
        remaining_holders=36,
        holders_include_null=True,
        revenue_eth="7.11",
        liquidity_delta_eth="0.26",
        spend_eth="8.13",
        max_price_eth="2.39e-05",
        reported_min_profit_eth="1.28",
        reported_max_profit_eth="7.37",
        usd_per_eth="2940.23",
        laundering_strategies="peel chains",
        cashout="Kucoin",
        funded_by="Kucoin",
    ),
)


@dataclass(frozen=True)
class CaseCheck:
    case_id: int
    p_min_wei: int
    p_max_wei: int
    reported: ReportedFigureCheck

    @property
    def min_profit_discrepancy(self) -> bool:
        return self.reported.p_min_discrepancy

    @property
    def max_profit_discrepancy(self) -> bool:
        return self.reported.p_max_discrepancy


def verify_case(case: CaseStudy) -> CaseCheck:
    """Apply the profit formulas to the published R/S/liquidity figures and
    compare against the published bounds (rounding-tolerant)."""
    estimate = profit_bounds(
        revenue_wei=eth_to_wei(case.revenue_eth),
        spend_wei=eth_to_wei(case.spend_eth),
        liquidity_delta_wei=eth_to_wei(case.liquidity_delta_eth),
        usd_rate=Decimal(case.usd_per_eth),
    )
    reported = check_reported_figures(
        estimate, case.reported_min_profit_eth, case.reported_max_profit_eth
    )
    return CaseCheck(
        case_id=case.case_id,
        p_min_wei=estimate.p_min_wei,
        p_max_wei=estimate.p_max_wei,
        reported=reported,
    )
