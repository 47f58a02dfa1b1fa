import functools

import numba
import numpy as np
import pytest

from skinrules import rules
from skinrules.rules import RuleKind

# Independent route over the whole cube: the scalar reference predicates,
# compiled as-is and driven by a plain triple loop.  The library's own
# domain walk goes through the vectorised predicates instead.


@functools.lru_cache(maxsize=None)
def _compiled_walk(predicate):
    pred = numba.njit(predicate)

    @numba.njit
    def walk(out):
        i = 0
        for r in range(256):
            for g in range(256):
                for b in range(256):
                    out[i] = pred(r, g, b)
                    i += 1

    return walk


@functools.lru_cache(maxsize=None)
def oracle_domain(predicate) -> np.ndarray:
    out = np.zeros(1 << 24, dtype=np.bool_)
    _compiled_walk(predicate)(out)
    out.setflags(write=False)
    return out


def oracle_for(rule) -> np.ndarray:
    return oracle_domain(rules.SCALAR_PREDICATES[RuleKind.parse(rule)])


@pytest.fixture(scope="session")
def oracle():
    return oracle_for


@pytest.fixture(scope="session")
def synthetic_root(tmp_path_factory):
    from skinrules.synthetic import make_synthetic_dataset

    return make_synthetic_dataset(tmp_path_factory.mktemp("synthetic"))


# --- acceptance reporting -------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


class _Criterion:
    def __init__(self, number, title):
        self.number, self.title, self.detail = number, title, ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        line = f"[{status}] criterion {self.number}: {self.title}"
        if self.detail:
            line += f" ({self.detail})"
        if exc is not None:
            line += f" -- {type(exc).__name__}: {exc}".splitlines()[0]
        ACCEPTANCE_LINES.append(line)
        print(line)
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
