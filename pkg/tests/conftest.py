import numpy as np
import pytest
from hypothesis import settings

from hrmodels.config import make_rng
from hrmodels.graphs import UndirectedGraph

settings.register_profile("default", max_examples=40, deadline=None, derandomize=True)
settings.register_profile("explore", max_examples=300, deadline=None)
settings.load_profile("default")

TRIANGLE = np.array([[0.0, 9.0, 25.0], [9.0, 0.0, 16.0], [25.0, 16.0, 0.0]])


@pytest.fixture
def rng():
    return make_rng(20240601)


@pytest.fixture
def triangle():
    return TRIANGLE.copy()


def graph_from_bits(d: int, bits: int) -> UndirectedGraph:
    """Graph on d vertices whose edges are picked by the bits of an integer."""
    pairs = [(i, j) for i in range(1, d + 1) for j in range(i + 1, d + 1)]
    return UndirectedGraph.from_edges(d, [p for k, p in enumerate(pairs) if bits >> k & 1])


# criterion -> list of (part, passed, detail), filled by test_acceptance
ACCEPTANCE: dict[int, list] = {}


def record(criterion: int, part: str, passed: bool, detail) -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(passed), detail))
    print(f"criterion {criterion} [{part}]: {'PASS' if passed else 'FAIL'} {detail}")
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[crit]
        ok = all(p for _, p, _ in parts)
        failed = [name for name, p, _ in parts if not p]
        note = f" (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'} "
                                    f"[{len(parts)} checks]{note}")
        for name, p, detail in parts:
            terminalreporter.write_line(f"    {'PASS' if p else 'FAIL'} {name}: {detail}")
