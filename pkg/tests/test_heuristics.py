"""Scammer attribution: certain roles, suspected tiers, and their stability."""

from chainsleuth.chaindata.address import Address
from chainsleuth.config import AttributionConfig
from chainsleuth.heuristics import (
    attribute_scammer_addresses,
    certain_set,
    economics_set,
    find_top_sellers,
)
from chainsleuth.lifecycle import build_timeline, detect_scam_window, price_series
from chainsleuth.units import eth_to_wei


def _attribution(scenario, p_max=None):
    tl = build_timeline(scenario.token, scenario.store)
    series = price_series(tl)
    window = detect_scam_window(tl)
    return tl, series, window, attribute_scammer_addresses(
        tl, scenario.store, series, window, p_max
    )


def test_golden_certain_roles(golden):
    _, _, _, attribution = _attribution(golden)
    scammer = golden.actor("scammer")
    roles = attribution[scammer]
    assert roles.certainty == "certain"
    assert {"deployer", "liquidity_provider", "liquidity_remover"} <= roles.roles
    # the organic funder is certain too: it funded the deployer pre-creation
    assert attribution[golden.actor("organic")].certainty == "certain"
    assert "deployer_funder" in attribution[golden.actor("organic")].roles


def test_funder_chain_two_hops(case1):
    _, _, _, attribution = _attribution(case1)
    # chain: active wallet -> funding burner -> deployer; both are funders
    assert "deployer_funder" in attribution[case1.actor("b0")].roles
    assert "deployer_funder" in attribution[case1.actor("a1")].roles
    # the exchange that funded the active wallet is NOT pulled in
    assert case1.actor("bybit") not in attribution


def test_spike_attribution_of_trading_wallet(case1):
    tl, series, window, first_pass = _attribution(case1)
    # trading wallet is invisible to the certain tier
    assert first_pass.get(case1.actor("trader")) is None or (
        first_pass[case1.actor("trader")].certainty == "suspected"
    )
    p_max = eth_to_wei("15.96")
    _, _, _, attribution = _attribution(case1, p_max)
    trader = attribution[case1.actor("trader")]
    assert "suspected_collusion" in trader.roles
    assert trader.certainty == "suspected"
    assert case1.actor("trader") in economics_set(attribution)
    assert case1.actor("trader") not in certain_set(attribution)


def test_top_sellers_case5(case5):
    tl = build_timeline(case5.token, case5.store)
    series = price_series(tl)
    sellers = find_top_sellers(tl, series, epsilon=0.05)
    assert sellers == {case5.actor("lucky")}
    # lucky peak-timers stay out of the profit economics
    attribution = _attribution(case5, eth_to_wei("7.37"))[3]
    assert case5.actor("lucky") not in economics_set(attribution)
    assert "top_seller" in attribution[case5.actor("lucky")].roles
    assert attribution[case5.actor("lucky")].certainty == "suspected"


def test_top_sellers_empty_when_nobody_near_peak(golden):
    tl = build_timeline(golden.token, golden.store)
    series = price_series(tl)
    assert find_top_sellers(tl, series, epsilon=0.05) == set()
    assert find_top_sellers(tl, [], epsilon=0.05) == set()


def test_certain_set_stability_against_swap_perturbation(golden):
    """The certain set depends only on creation and liquidity events, so
    recomputing without any price/spike inputs must give the same set."""
    tl = build_timeline(golden.token, golden.store)
    bare = attribute_scammer_addresses(tl, golden.store)
    series = price_series(tl)
    window = detect_scam_window(tl)
    rich = attribute_scammer_addresses(tl, golden.store, series, window,
                                       eth_to_wei("100"))
    assert certain_set(bare) == certain_set(rich)


def test_no_silent_promotion(case5):
    _, _, _, attribution = _attribution(case5, eth_to_wei("7.37"))
    for address, role in attribution.items():
        if role.certainty == "certain":
            assert role.roles & {"deployer", "deployer_funder",
                                 "liquidity_provider", "liquidity_remover"}


def test_roles_carry_resolvable_citations(all_cases):
    for scenario in all_cases.values():
        tl = build_timeline(scenario.token, scenario.store)
        series = price_series(tl)
        window = detect_scam_window(tl)
        attribution = attribute_scammer_addresses(
            tl, scenario.store, series, window, eth_to_wei("10"))
        for role in attribution.values():
            if role.roles == {"degen_candidate"}:
                continue  # annotation only
            assert role.citations, (scenario.name, role)
            for cite in role.citations:
                assert scenario.store.has_tx(cite)


def test_degen_annotation(case4):
    _, _, _, attribution = _attribution(case4, eth_to_wei("15.85"))
    for name in ("flipper", "victim0", "victim1"):
        role = attribution.get(case4.actor(name))
        assert role is not None and "degen_candidate" in role.roles, name
        # annotation never confers certainty
        assert role.certainty == "suspected"
    # addresses without junk portfolios stay unannotated
    clean = attribution.get(case4.actor("victim5"))
    assert clean is None or "degen_candidate" not in clean.roles


def test_degen_threshold_configurable(case4):
    tl = build_timeline(case4.token, case4.store)
    config = AttributionConfig(degen_token_count=100)
    attribution = attribute_scammer_addresses(tl, case4.store, config=config)
    flagged = [a for a, r in attribution.items() if "degen_candidate" in r.roles]
    assert flagged == []
