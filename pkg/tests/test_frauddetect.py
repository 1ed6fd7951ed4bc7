"""Classification, victims, profit bounds, pump and advance-fee detection."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainsleuth.casebook import CASEBOOK, verify_case
from chainsleuth.chaindata.store import ChainStore
from chainsleuth.config import DetectionConfig
from chainsleuth.frauddetect import (
    check_reported_figures,
    classify_rug_pull,
    compute_rsl,
    detect_advance_fee,
    detect_pump_and_dump,
    identify_victims,
    profit_bounds,
    verify_evidence_citations,
)
from chainsleuth.heuristics import attribute_scammer_addresses
from chainsleuth.lifecycle import (
    PricePoint,
    build_timeline,
    detect_scam_window,
    price_series,
)
from chainsleuth.scenarios import ChainWriter, ScamKit, named_address, utc
from chainsleuth.units import eth_to_wei
from oracles import brute_force_victims


def _pipeline(scenario):
    tl = build_timeline(scenario.token, scenario.store)
    series = price_series(tl)
    window = detect_scam_window(tl)
    attribution = attribute_scammer_addresses(tl, scenario.store, series, window)
    r, s, dl, _ = compute_rsl(tl, attribution, window)
    p_max = profit_bounds(r, s, dl).p_max_wei
    attribution = attribute_scammer_addresses(tl, scenario.store, series, window, p_max)
    return tl, series, window, attribution


# -- profit bounds ----------------------------------------------------


def test_profit_bounds_case_rows():
    expected = {
        1: ("0", "15.96", False, False),
        2: ("2.14", "5.05", False, False),
        3: ("0.377", "2.727", False, False),
        4: ("0.06", "15.85", True, False),
        5: ("-0.76", "7.37", True, False),
    }
    for case in CASEBOOK:
        check = verify_case(case)
        p_min, p_max, min_flag, max_flag = expected[case.case_id]
        assert check.p_min_wei == eth_to_wei(p_min), case.case_id
        assert check.p_max_wei == eth_to_wei(p_max), case.case_id
        assert check.min_profit_discrepancy == min_flag, case.case_id
        assert check.max_profit_discrepancy == max_flag, case.case_id


def test_profit_bounds_trivial():
    est = profit_bounds(0, 0, 0)
    assert est.p_min_wei == 0 and est.p_max_wei == 0


@given(
    revenue=st.integers(min_value=0, max_value=10**30),
    spend=st.integers(min_value=0, max_value=10**30),
    delta=st.integers(min_value=-(10**30), max_value=10**30),
)
@settings(max_examples=300)
def test_profit_identities(revenue, spend, delta):
    est = profit_bounds(revenue, spend, delta)
    assert est.p_min_wei == (revenue - spend) + delta
    assert est.p_max_wei == revenue + delta
    assert est.p_min_wei == est.p_max_wei - spend
    assert est.p_min_wei <= est.p_max_wei  # since spend >= 0


def test_reported_figure_rounding_tolerance():
    est = profit_bounds(eth_to_wei("0.21"), eth_to_wei("2.35"), eth_to_wei("2.517"))
    check = check_reported_figures(est, "0.38", "2.73")
    assert not check.any_discrepancy  # 0.377 rounds to 0.38


# -- classification ----------------------------------------------------


def test_golden_classification(golden):
    tl, series, window, attribution = _pipeline(golden)
    verdict = classify_rug_pull(tl, attribution, series, window)
    assert verdict.verdict == "sell_rug_pull"
    assert verdict.pump_and_dump is True
    assert verdict.confidence == "high"
    assert verdict.evidence
    assert verify_evidence_citations(verdict, golden.store) == []


def test_case2_sell_rug_without_remove_call(case2):
    tl, series, window, attribution = _pipeline(case2)
    verdict = classify_rug_pull(tl, attribution, series, window)
    assert verdict.verdict == "sell_rug_pull"
    assert window.end_reason == "drain_swap"


def test_simple_rug_pull_when_no_scammer_sells():
    store = ChainStore()
    w = ChainWriter(store, start_time=utc(2022, 9, 1))
    kit = ScamKit(w, "simple", decimals=6, token_is_token0=False)
    scammer = named_address("simple:scammer")
    buyers = [named_address(f"simple:buyer:{i}") for i in range(4)]
    kit.create_token(scammer, 2 * 10**15)
    kit.create_pair(scammer)
    kit.add_liquidity(scammer, eth_to_wei("5"), 10**15)
    for b in buyers:
        kit.buy(b, eth_to_wei("0.5"))
    kit.remove_liquidity(scammer, all_reserves=True)
    store.reindex()
    tl, series, window, attribution = _pipeline(
        type("S", (), {"token": kit.token, "store": store})())
    verdict = classify_rug_pull(tl, attribution, series, window)
    assert verdict.verdict == "simple_rug_pull"
    assert not verdict.pump_and_dump  # nobody dumped: price only rose


def test_stable_token_is_not_a_rug():
    store = ChainStore()
    w = ChainWriter(store, start_time=utc(2022, 9, 2))
    kit = ScamKit(w, "stable", decimals=6, token_is_token0=False)
    dev = named_address("stable:dev")
    traders = [named_address(f"stable:trader:{i}") for i in range(3)]
    kit.create_token(dev, 2 * 10**15)
    kit.create_pair(dev)
    kit.add_liquidity(dev, eth_to_wei("50"), 10**15)
    for t in traders:
        _, got = kit.buy(t, eth_to_wei("1"))
        kit.sell(t, tokens_in=got)
    store.reindex()
    tl, series, window, attribution = _pipeline(
        type("S", (), {"token": kit.token, "store": store})())
    verdict = classify_rug_pull(tl, attribution, series, window)
    assert verdict.verdict == "none"
    assert verdict.evidence == []


def test_timeline_without_pair_is_verdict_none(golden):
    store = ChainStore()
    w = ChainWriter(store, start_time=utc(2022, 9, 3))
    kit = ScamKit(w, "bare", decimals=6, token_is_token0=False)
    kit.create_token(named_address("bare:creator"), 10**12)
    store.reindex()
    tl = build_timeline(kit.token, store)
    verdict = classify_rug_pull(tl, {})
    assert verdict.verdict == "none"
    assert verdict.confidence == "low"


# -- victims ----------------------------------------------------------


def test_golden_victims_match_example_and_oracle(golden):
    tl, series, window, attribution = _pipeline(golden)
    victims = identify_victims(tl, attribution, window)
    assert victims.victims == golden.expected["victims"]
    assert len(victims.victims) == 3  # 5 buyers, 2 exited fully
    oracle = brute_force_victims(
        golden.store, golden.token, golden.pair,
        {a for a, r in attribution.items()}, window.end,
    )
    assert victims.victims == oracle


def test_victim_exclusions_carry_reasons(case1):
    tl, series, window, attribution = _pipeline(case1)
    victims = identify_victims(tl, attribution, window)
    assert len(victims.victims) == 76
    reasons = set(victims.excluded.values())
    # the scammer holds leftovers but took the liquidity; the pool holds dust
    assert "liquidity remover" in reasons
    assert "contract (pool or token)" in reasons
    assert victims.victims.isdisjoint(victims.excluded)


def test_victims_exclude_zero_address_and_sellers(case3, case5):
    tl, series, window, attribution = _pipeline(case3)
    victims = identify_victims(tl, attribution, window)
    # the null address holds burned dust but is never a victim
    assert all(not v.is_zero for v in victims.victims)
    assert len(victims.victims) == 8

    tl5, series5, window5, attribution5 = _pipeline(case5)
    victims5 = identify_victims(tl5, attribution5, window5)
    assert len(victims5.victims) == case5.expected["victim_count"]
    # the two post-window sellers recovered something: excluded
    assert case5.actor("victim0") not in victims5.victims
    assert case5.actor("victim1") not in victims5.victims


def test_victim_soundness_no_seller_in_set(all_cases):
    from chainsleuth.lifecycle import Sell

    for scenario in all_cases.values():
        tl, series, window, attribution = _pipeline(scenario)
        victims = identify_victims(tl, attribution, window)
        sellers = {e.seller for e in tl.events_of(Sell)}
        assert victims.victims.isdisjoint(sellers), scenario.name


# -- economics over timelines ------------------------------------------


def test_compute_rsl_case1(case1):
    tl, series, window, attribution = _pipeline(case1)
    r, s, dl, _ = compute_rsl(tl, attribution, window)
    assert r == eth_to_wei("10.57")
    assert s == eth_to_wei("15.96")
    assert dl == eth_to_wei("5.39")


def test_compute_rsl_case3(case3):
    tl, series, window, attribution = _pipeline(case3)
    r, s, dl, _ = compute_rsl(tl, attribution, window)
    assert (r, s, dl) == (eth_to_wei("0.21"), eth_to_wei("2.35"), eth_to_wei("2.517"))


def test_compute_rsl_case2_drain_convention(case2):
    tl, series, window, attribution = _pipeline(case2)
    r, s, dl, warnings = compute_rsl(tl, attribution, window)
    assert (r, s, dl) == (eth_to_wei("4.91"), eth_to_wei("2.91"), eth_to_wei("0.14"))
    assert any("drain" in w for w in warnings)


def test_compute_rsl_no_scammer_sells_zero_revenue():
    store = ChainStore()
    w = ChainWriter(store, start_time=utc(2022, 9, 4))
    kit = ScamKit(w, "norev", decimals=6, token_is_token0=False)
    scammer = named_address("norev:scammer")
    kit.create_token(scammer, 2 * 10**15)
    kit.create_pair(scammer)
    kit.add_liquidity(scammer, eth_to_wei("1"), 10**15)
    kit.buy(named_address("norev:buyer"), eth_to_wei("0.5"))
    store.reindex()
    tl = build_timeline(kit.token, store)
    attribution = attribute_scammer_addresses(tl, store)
    r, s, dl, _ = compute_rsl(tl, attribution)
    assert r == 0


def test_all_addresses_scope_flag(case5):
    tl, series, window, attribution = _pipeline(case5)
    config = DetectionConfig(economics_all_addresses=True)
    r_all, s_all, _, _ = compute_rsl(tl, attribution, window, config)
    r, s, _, _ = compute_rsl(tl, attribution, window)
    # the lucky trader's exit and entry only count under the flag
    assert r_all > r
    assert s_all > s


# -- pump and dump ------------------------------------------------------


def _series(prices, start=1000):
    out = []
    for i, value in enumerate(prices):
        out.append(PricePoint(
            position=(start + i, 0, 0), timestamp=1650000000 + 12 * i,
            price=Fraction(value).limit_denominator(10**12),
            kind="buy", tx_hash=bytes([i]) * 32,
        ))
    return out


def test_pump_detected_on_rise_and_collapse():
    series = _series(["1e-9", "3e-9", "1e-8", "8e-9", "2e-10"])
    finding = detect_pump_and_dump(series)
    assert finding is not None
    assert finding.peak_position == (1002, 0, 0)
    assert finding.rise_factor == 10
    assert finding.collapse_factor == Fraction(49, 50)


def test_constant_series_is_not_a_pump():
    series = _series(["1e-9"] * 6)
    assert detect_pump_and_dump(series) is None


def test_rise_without_collapse_is_not_a_pump():
    series = _series(["1e-9", "5e-9", "2e-8", "1.5e-8", "1.2e-8"])
    assert detect_pump_and_dump(series) is None


def test_too_few_points_is_not_a_pump():
    assert detect_pump_and_dump(_series(["1e-9", "1e-8"])) is None


def test_case4_multi_peak_keyed_to_global(case4):
    tl, series, window, attribution = _pipeline(case4)
    finding = detect_pump_and_dump(series, window=window)
    assert finding is not None
    from chainsleuth.units import price_to_sci

    assert price_to_sci(finding.peak_price) == "1.23e-11"
    assert len(finding.secondary_peaks) == 2
    assert all(p != finding.peak_position for p in finding.secondary_peaks)


# -- advance fee --------------------------------------------------------


def test_case3_advance_fee_both_signals(case3):
    tl = build_timeline(case3.token, case3.store)
    finding = detect_advance_fee(tl)
    assert finding is not None
    assert finding.kind == "both"
    assert finding.sell_count == 2
    assert abs(float(finding.fee_share) - 0.05) < 0.001


def test_clean_token_has_no_advance_fee(golden):
    tl = build_timeline(golden.token, golden.store)
    assert detect_advance_fee(tl) is None


def test_classification_scale_invariance():
    from chainsleuth.scenarios import golden_scenario

    for token_scale, eth_scale in [(7, 1), (1, 3), (1000, 2)]:
        scenario = golden_scenario(token_scale=token_scale, eth_scale=eth_scale)
        tl, series, window, attribution = _pipeline(scenario)
        verdict = classify_rug_pull(tl, attribution, series, window)
        victims = identify_victims(tl, attribution, window)
        assert verdict.verdict == "sell_rug_pull", (token_scale, eth_scale)
        assert verdict.pump_and_dump is True
        assert victims.victims == scenario.expected["victims"]
