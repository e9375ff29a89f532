from __future__ import annotations

import random

import pytest

from ptmverify.models import OnticModel, OperationalModel

# criterion number -> (passed, detail); filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


def random_distribution(rng: random.Random, k: int, zeros: bool = True) -> list:
    """k nonnegative rationals summing to 1, with occasional exact zeros."""
    from fractions import Fraction

    weights = [0 if zeros and rng.random() < 0.25 else rng.randint(1, 6) for _ in range(k)]
    if not any(weights):
        weights[rng.randrange(k)] = 1
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def random_no_signalling(rng: random.Random, nx: int = 2, ny: int = 2, na: int = 2, nb: int = 2) -> OperationalModel:
    """A product-of-local-rules mixture, which never signals in either direction."""
    X = [f"x{i}" for i in range(nx)]
    Y = [f"y{i}" for i in range(ny)]
    A = [f"a{i}" for i in range(na)]
    B = [f"b{i}" for i in range(nb)]
    k = rng.randint(1, 3)
    rho = random_distribution(rng, k, zeros=False)
    pa = [{x: random_distribution(rng, na) for x in X} for _ in range(k)]
    pb = [{y: random_distribution(rng, nb) for y in Y} for _ in range(k)]
    return OperationalModel.from_function(
        X, Y, A, B,
        lambda x, y, a, b: sum(rho[j] * pa[j][x][A.index(a)] * pb[j][y][B.index(b)] for j in range(k)),
    )


def random_local_ontic(rng: random.Random, nl: int = 3) -> OnticModel:
    """Random ontic model where λ is setting-free and each wing's outcome depends on its own setting and λ."""
    X, Y, A, B = ["0", "1"], ["0", "1"], ["u", "d"], ["u", "d"]
    L = [f"l{i}" for i in range(nl)]
    rho = random_distribution(rng, nl, zeros=False)
    pa = {(x, l): random_distribution(rng, 2) for x in X for l in L}
    pb = {(y, l): random_distribution(rng, 2) for y in Y for l in L}
    return OnticModel.from_function(
        X, Y, A, B, L,
        lambda x, y, a, b, l: rho[L.index(l)] * pa[(x, l)][A.index(a)] * pb[(y, l)][B.index(b)],
    )


@pytest.fixture
def rng():
    return random.Random(20261017)
