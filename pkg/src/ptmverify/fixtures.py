"""Built-in models: the timelike counterexample, its reverse, and reference cases."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .conditions import CausalGraph
from .models import OnticModel, OperationalModel
from .prob import StructuralError, to_fraction
from .timereverse import Bijection, ReversePair

UP, DOWN = "up", "down"
OUTCOMES = (UP, DOWN)
PREP_ANGLES = ("0", "30")
MEAS_ANGLES = ("0", "-30")


def lam(angle: str, outcome: str) -> str:
    return f"({angle},{outcome})"


MAUDLIN_LAMBDA = tuple(lam(x, a) for x in PREP_ANGLES for a in OUTCOMES)

# p(b = up | y, lambda); "down" is the complement
P_UP = {
    ("0", lam("0", UP)): "0",
    ("0", lam("0", DOWN)): "1",
    ("0", lam("30", UP)): ".25",
    ("0", lam("30", DOWN)): ".75",
    ("-30", lam("0", UP)): ".25",
    ("-30", lam("0", DOWN)): ".75",
    ("-30", lam("30", UP)): ".75",
    ("-30", lam("30", DOWN)): ".25",
}


def p_b_given_y_lambda(b: str, y: str, lam_label: str) -> Fraction:
    up = to_fraction(P_UP[(y, lam_label)])
    return up if b == UP else 1 - up


def maudlin_model() -> OnticModel:
    """Preparation emits a fair coin a and the state <x, a>; the measurement reads (y, state).

    p(a, b, lambda | x, y) = 1/2 [lambda = <x, a>] p(b | y, lambda)
    """

    def p(x, y, a, b, lam_label):
        if lam_label != lam(x, a):
            return 0
        return Fraction(1, 2) * p_b_given_y_lambda(b, y, lam_label)

    return OnticModel.from_function(PREP_ANGLES, MEAS_ANGLES, OUTCOMES, OUTCOMES, MAUDLIN_LAMBDA, p)


MAUDLIN_F = {
    lam("0", UP): lam("0", UP),
    lam("0", DOWN): lam("0", DOWN),
    lam("30", UP): lam("-30", UP),
    lam("30", DOWN): lam("-30", DOWN),
}


def maudlin_reverse() -> ReversePair:
    """The reverse with preparation inputs {0, -30} and states relabelled 30 -> -30.

    The reverse joint is the transcription p'(b, a, f(lambda) | y, x) = p(a, b, lambda | x, y).
    """
    original = maudlin_model()
    f = Bijection.from_mapping(MAUDLIN_F)
    inverse = f.inverse()
    reverse = OnticModel.from_function(
        MEAS_ANGLES,
        PREP_ANGLES,
        OUTCOMES,
        OUTCOMES,
        tuple(MAUDLIN_F.values()),
        lambda x, y, a, b, mu: original.p(b, a, inverse(mu), y, x),
    )
    return ReversePair(original, reverse, f)


def singlet_stats() -> OperationalModel:
    """Disagreement 1 at (0,0), 3/4 at (30,0) and (0,-30), 1/4 at (30,-30).

    Single-wing marginals are uniform and agreement/disagreement mass is split
    evenly between the two outcome combinations.
    """
    disagree = {("0", "0"): Fraction(1), ("30", "0"): Fraction(3, 4), ("0", "-30"): Fraction(3, 4), ("30", "-30"): Fraction(1, 4)}

    def p(x, y, a, b):
        d = disagree[(x, y)]
        return d / 2 if a != b else (1 - d) / 2

    return OperationalModel.from_function(PREP_ANGLES, MEAS_ANGLES, OUTCOMES, OUTCOMES, p)


def deterministic_local(
    fa: Mapping[tuple[str, str], str] | Callable[[str, str], str],
    fb: Mapping[tuple[str, str], str] | Callable[[str, str], str],
    rho: Mapping[str, object],
    X: Sequence[str] = PREP_ANGLES,
    Y: Sequence[str] = MEAS_ANGLES,
    outcomes: Sequence[str] = OUTCOMES,
) -> OnticModel:
    """p(a, b, lambda | x, y) = rho(lambda) [a = fa(x, lambda)] [b = fb(y, lambda)].

    ``fa`` and ``fb`` are keyed by (setting, lambda) or are callables of the same.
    """
    L = tuple(rho)
    weights = {k: to_fraction(v) for k, v in rho.items()}
    if sum(weights.values()) != 1 or any(w < 0 for w in weights.values()):
        raise StructuralError("rho must be a probability distribution")

    def total(fn, settings, name):
        out = {}
        for s in settings:
            for l in L:
                try:
                    v = fn(s, l) if callable(fn) else fn[(s, l)]
                except KeyError:
                    raise StructuralError(f"{name} is undefined at ({s}, {l})") from None
                if v not in outcomes:
                    raise StructuralError(f"{name}({s}, {l}) = {v!r} is not an outcome")
                out[(s, l)] = v
        return out

    A = total(fa, X, "fa")
    B = total(fb, Y, "fb")
    return OnticModel.from_function(
        X, Y, outcomes, outcomes, L,
        lambda x, y, a, b, l: weights[l] if A[(x, l)] == a and B[(y, l)] == b else 0,
    )


def figure_graph(which: int) -> CausalGraph:
    if which == 1:
        return CausalGraph.build(
            ["x", "P", "a", "T", "M", "y", "b"],
            [("x", "P"), ("P", "a"), ("P", "T"), ("T", "M"), ("y", "M"), ("M", "b")],
            ["x", "y"],
        )
    if which == 2:
        return CausalGraph.build(
            ["P", "M1", "M2", "x", "y", "a", "b"],
            [("P", "M1"), ("P", "M2"), ("x", "M1"), ("M1", "a"), ("y", "M2"), ("M2", "b")],
            ["x", "y"],
        )
    raise ValueError(f"no figure {which}")


FIXTURE_IDS = ("maudlin", "maudlin-reverse", "singlet-stats", "deterministic-local", "figure1-graph", "figure2-graph")


def default_deterministic_local() -> OnticModel:
    """Perfectly anticorrelated at (0,0), one ontic state per outcome of the 0-setting."""
    fa = {(x, l): l for x in PREP_ANGLES for l in OUTCOMES}
    fb = {(y, l): (DOWN if l == UP else UP) for y in MEAS_ANGLES for l in OUTCOMES}
    return deterministic_local(fa, fb, {UP: Fraction(1, 2), DOWN: Fraction(1, 2)})


def build(fixture_id: str):
    """Construct a fixture by id. ``maudlin-reverse`` gives the reverse model only."""
    if fixture_id == "maudlin":
        return maudlin_model()
    if fixture_id == "maudlin-reverse":
        return maudlin_reverse().reverse
    if fixture_id == "singlet-stats":
        return singlet_stats()
    if fixture_id == "deterministic-local":
        return default_deterministic_local()
    if fixture_id == "figure1-graph":
        return figure_graph(1)
    if fixture_id == "figure2-graph":
        return figure_graph(2)
    raise KeyError(f"unknown fixture {fixture_id!r}; choose from {', '.join(FIXTURE_IDS)}")
