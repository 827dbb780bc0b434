import time
from functools import lru_cache

import pytest

from weitzenbock.poly import Poly, parse_poly
from weitzenbock.solver import SolverConfig, compute_kernel

KERNEL_SECONDS: dict[int, float] = {}

# criterion number -> (ok, detail); filled by test_acceptance, printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@lru_cache(maxsize=None)
def kernel(n: int):
    start = time.perf_counter()
    result = compute_kernel(SolverConfig(n))
    KERNEL_SECONDS[n] = time.perf_counter() - start
    return result


@pytest.fixture(scope="session")
def kernel_of():
    return kernel


def P(text: str, n: int) -> Poly:
    return parse_poly(text, n)


def proportional(p: Poly, q: Poly) -> bool:
    """p == c*q for some nonzero rational c."""
    if not p or not q or set(p.keys()) != set(q.keys()):
        return False
    k = next(iter(p.keys()))
    return p * q._terms[k] == q * p._terms[k]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
