import pytest

from chainsleuth.scenarios import (
    case1_scenario,
    case2_scenario,
    case3_scenario,
    case4_scenario,
    case5_scenario,
    golden_scenario,
)


@pytest.fixture(scope="session")
def golden():
    return golden_scenario()


@pytest.fixture(scope="session")
def case1():
    return case1_scenario()


@pytest.fixture(scope="session")
def case2():
    return case2_scenario()


@pytest.fixture(scope="session")
def case3():
    return case3_scenario()


@pytest.fixture(scope="session")
def case4():
    return case4_scenario()


@pytest.fixture(scope="session")
def case5():
    return case5_scenario()


@pytest.fixture(scope="session")
def all_cases(golden, case1, case2, case3, case4, case5):
    return {
        "golden": golden,
        "case1": case1,
        "case2": case2,
        "case3": case3,
        "case4": case4,
        "case5": case5,
    }


@pytest.fixture(scope="session")
def golden_bundle(tmp_path_factory, golden):
    from chainsleuth.scenarios import write_bundle

    path = tmp_path_factory.mktemp("bundles") / "golden"
    write_bundle(golden, str(path))
    return str(path)


@pytest.fixture(scope="session")
def case1_bundle(tmp_path_factory, case1):
    from chainsleuth.scenarios import write_bundle

    path = tmp_path_factory.mktemp("bundles") / "case1"
    write_bundle(case1, str(path))
    return str(path)
