from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from slnc.netmodel import Edge, Network, gen_combination  # noqa: E402


@pytest.fixture(scope="session")
def comb32() -> Network:
    return gen_combination(3, 2)


@pytest.fixture(scope="session")
def comb86() -> Network:
    return gen_combination(8, 6)


@pytest.fixture(scope="session")
def parallel2() -> Network:
    """s with two parallel edges e1, e2 into t."""
    return Network((Edge("e1", "s", "t"), Edge("e2", "s", "t")), "s", ("t",))


# acceptance criteria record their outcome here; printed in the terminal summary
CRITERIA: dict[int, tuple[str, bool]] = {}


@pytest.fixture
def criterion(request):
    """Call as ``criterion(n, label)`` before the checks of criterion n."""
    seen = []

    def declare(n: int, label: str) -> None:
        seen.append((n, label))

    yield declare
    failed = request.node.stash.get(_FAILED, False)
    for n, label in seen:
        ok = not failed and CRITERIA.get(n, ("", True))[1]
        CRITERIA[n] = (label, ok)


_FAILED = pytest.StashKey[bool]()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and rep.failed:
        item.stash[_FAILED] = True


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        label, ok = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {label}")
