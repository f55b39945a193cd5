import pytest

from cdgate.circuit import reference_params
from cdgate.experiment import GateSetup


@pytest.fixture(scope="session")
def params():
    return reference_params()


@pytest.fixture(scope="session")
def setup21(params):
    return GateSetup(params=params, model="rwa", dim=21)


@pytest.fixture(scope="session")
def setup17(params):
    return GateSetup(params=params, model="rwa", dim=17, max_leakage=1e-4)


_ACCEPTANCE = []
_CRITERIA = {
    1: "parameter derivation",
    2: "fidelity anchors",
    3: "static-model oracle",
    4: "basis quality",
    5: "threshold reproduction",
    6: "photon-number signature",
    7: "numerical hygiene",
    8: "STA weakness",
}


@pytest.fixture
def acceptance():
    """Record one acceptance sub-result: ``acceptance(criterion, ok, detail)``."""

    def record(criterion, ok, detail):
        _ACCEPTANCE.append((criterion, bool(ok), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    reports = [
        r for key, reps in terminalreporter.stats.items() if key != "deselected"
        for r in reps if hasattr(r, "nodeid")
    ]
    if not any("test_acceptance.py" in r.nodeid for r in reports):
        return
    terminalreporter.section("acceptance criteria")
    for c, name in _CRITERIA.items():
        parts = [(ok, d) for k, ok, d in _ACCEPTANCE if k == c]
        if not parts:
            terminalreporter.write_line(f"criterion {c} ({name}): NOT RUN")
            continue
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = " | ".join(("" if ok else "[fail] ") + d for ok, d in parts)
        terminalreporter.write_line(f"criterion {c} ({name}): {status}: {detail}")
