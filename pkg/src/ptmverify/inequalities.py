"""Bell-type inequalities on binary-outcome operational statistics.

Agreement is defined by an explicit pairing of preparation outputs with
measurement outcomes (default: identical labels). The classical bounds are
not taken on trust: :func:`local_bound_oracle` recomputes them by trying
every deterministic local strategy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .models import OnticModel, OperationalModel, to_operational
from .prob import StructuralError, format_fraction

Pair = tuple[str, str]
MAX_STRATEGIES = 2**20


class UnsupportedShape(ValueError):
    pass


@dataclass(frozen=True)
class CorrelationSummary:
    p_agree: dict[Pair, Fraction]
    p_disagree: dict[Pair, Fraction]
    correlator: dict[Pair, Fraction]
    agree_map: dict[str, str] = field(default_factory=dict)

    def pairs(self) -> list[Pair]:
        return list(self.p_agree)

    def as_dict(self) -> dict[str, Any]:
        return {
            f"{x},{y}": {
                "p_agree": format_fraction(self.p_agree[(x, y)]),
                "p_disagree": format_fraction(self.p_disagree[(x, y)]),
                "E": format_fraction(self.correlator[(x, y)]),
            }
            for x, y in self.p_agree
        }


@dataclass(frozen=True)
class InequalityResult:
    name: str
    lhs: Fraction
    rhs: Fraction
    violated: bool
    terms: dict[str, Fraction]
    notes: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "lhs": format_fraction(self.lhs),
            "rhs": format_fraction(self.rhs),
            "violated": self.violated,
            "terms": {k: format_fraction(v) for k, v in self.terms.items()},
            **self.notes,
        }


def default_agree_map(model: OperationalModel) -> dict[str, str]:
    if set(model.prep_outputs) != set(model.meas_outputs):
        raise StructuralError("outcome alphabets differ; give an explicit agreement pairing")
    return {a: a for a in model.prep_outputs}


def correlation_summary(
    model: OperationalModel | OnticModel, agree_map: Mapping[str, str] | None = None
) -> CorrelationSummary:
    if isinstance(model, OnticModel):
        model = to_operational(model)
    if len(model.prep_outputs) != 2 or len(model.meas_outputs) != 2:
        raise UnsupportedShape("correlation summaries need binary outcomes on both wings")
    agree_map = dict(agree_map) if agree_map is not None else default_agree_map(model)
    if sorted(agree_map) != sorted(model.prep_outputs) or sorted(agree_map.values()) != sorted(model.meas_outputs):
        raise StructuralError("agreement pairing must match each a-label with a distinct b-label")
    agree, disagree, corr = {}, {}, {}
    for x in model.prep_settings:
        for y in model.meas_settings:
            pa = sum((model.p(a, agree_map[a], x, y) for a in model.prep_outputs), Fraction(0))
            total = sum(
                (model.p(a, b, x, y) for a in model.prep_outputs for b in model.meas_outputs), Fraction(0)
            )
            agree[(x, y)] = pa
            disagree[(x, y)] = total - pa
            corr[(x, y)] = pa - (total - pa)
    return CorrelationSummary(agree, disagree, corr, agree_map)


def _need(summary: CorrelationSummary, pairs: Iterable[Pair]) -> None:
    missing = [p for p in pairs if p not in summary.p_agree]
    if missing:
        raise StructuralError(f"setting pairs not in summary: {missing}")


def wigner_check(summary: CorrelationSummary, triple: Sequence[Pair]) -> InequalityResult:
    """p_agree(t1) + p_agree(t2) >= p_agree(t3), violated on strict failure.

    The inequality presumes perfect anticorrelation wherever the two wings
    share a setting label; that premise is reported in ``notes``, not enforced.
    """
    p1, p2, p3 = (tuple(t) for t in triple)
    _need(summary, (p1, p2, p3))
    lhs = summary.p_agree[p1] + summary.p_agree[p2]
    rhs = summary.p_agree[p3]
    equal = [(x, y) for (x, y) in summary.p_agree if x == y]
    anti = all(summary.p_disagree[p] == 1 for p in equal)
    terms = {f"p_agree({x},{y})": summary.p_agree[(x, y)] for x, y in (p1, p2, p3)}
    notes = {"anticorrelated_at_equal_settings": anti, "equal_setting_pairs": [f"{x},{y}" for x, y in equal]}
    return InequalityResult("wigner", lhs, rhs, lhs < rhs, terms, notes)


def chsh_value(summary: CorrelationSummary, x0: str, x1: str, y0: str, y1: str) -> tuple[Fraction, int]:
    """Max over which correlator carries the minus sign; returns (S, index of that correlator)."""
    pairs = [(x0, y0), (x0, y1), (x1, y0), (x1, y1)]
    _need(summary, pairs)
    E = [summary.correlator[p] for p in pairs]
    best, where = Fraction(-1), -1
    for i in range(4):
        s = abs(sum(E) - 2 * E[i])
        if s > best:
            best, where = s, i
    return best, where


def chsh(summary: CorrelationSummary, x0: str, x1: str, y0: str, y1: str) -> InequalityResult:
    S, where = chsh_value(summary, x0, x1, y0, y1)
    pairs = [(x0, y0), (x0, y1), (x1, y0), (x1, y1)]
    terms = {f"E({x},{y})": summary.correlator[(x, y)] for x, y in pairs}
    x, y = pairs[where]
    return InequalityResult("chsh", S, Fraction(2), S > 2, terms, {"minus_sign_on": f"E({x},{y})"})


@dataclass(frozen=True)
class LinearObjective:
    """``constant + sum coeff[(x,y)] * p_agree(x,y)``."""

    coefficients: dict[Pair, Fraction]
    constant: Fraction = Fraction(0)

    def __call__(self, p_agree: Mapping[Pair, Fraction]) -> Fraction:
        return self.constant + sum(
            (c * p_agree[pair] for pair, c in self.coefficients.items()), Fraction(0)
        )


def chsh_objectives(x0: str, x1: str, y0: str, y1: str) -> list[LinearObjective]:
    """The eight signed CHSH combinations rewritten in agreement probabilities (E = 2 p_agree - 1)."""
    pairs = [(x0, y0), (x0, y1), (x1, y0), (x1, y1)]
    out = []
    for minus in range(4):
        signs = [(-1 if i == minus else 1) for i in range(4)]
        for outer in (1, -1):
            coeff: dict[Pair, Fraction] = {}
            for pair, s in zip(pairs, signs):
                coeff[pair] = coeff.get(pair, Fraction(0)) + 2 * s * outer
            out.append(LinearObjective(coeff, Fraction(-sum(signs) * outer)))
    return out


def wigner_objective(triple: Sequence[Pair]) -> LinearObjective:
    """Amount by which the Wigner inequality is violated: p_agree(t3) - p_agree(t1) - p_agree(t2)."""
    coeff: dict[Pair, Fraction] = {}
    for pair, c in zip(triple, (-1, -1, 1)):
        coeff[tuple(pair)] = coeff.get(tuple(pair), Fraction(0)) + c
    return LinearObjective(coeff)


def deterministic_strategies(X: Sequence[str], Y: Sequence[str]):
    """Every pair (fa, fb) of maps into the outcome bits {0, 1}, as dicts."""
    for bits_a in itertools.product((0, 1), repeat=len(X)):
        for bits_b in itertools.product((0, 1), repeat=len(Y)):
            yield dict(zip(X, bits_a)), dict(zip(Y, bits_b))


def local_bound_oracle(
    X: Sequence[str],
    Y: Sequence[str],
    objective: LinearObjective | Sequence[LinearObjective],
    anticorrelated: Iterable[Pair] = (),
) -> Fraction:
    """Exact maximum of ``objective`` over deterministic local strategies.

    Under a deterministic strategy p_agree(x,y) is 1 when the two wings emit
    the same bit and 0 otherwise; mixtures of strategies cannot exceed the
    best one since the objective is linear. A list of objectives is maximized
    jointly. Strategies that agree at any pair in ``anticorrelated`` are
    discarded.
    """
    if 2 ** (len(X) + len(Y)) > MAX_STRATEGIES:
        raise ValueError(f"{2 ** (len(X) + len(Y))} strategies exceeds the limit of {MAX_STRATEGIES}")
    objectives = [objective] if isinstance(objective, LinearObjective) else list(objective)
    anticorrelated = [tuple(p) for p in anticorrelated]
    unknown = [p for p in anticorrelated if p[0] not in X or p[1] not in Y]
    if unknown:
        raise StructuralError(f"anticorrelation constraints name unknown settings: {unknown}")
    best: Fraction | None = None
    for fa, fb in deterministic_strategies(X, Y):
        if any(fa[x] == fb[y] for x, y in anticorrelated):
            continue
        agree = {(x, y): Fraction(int(fa[x] == fb[y])) for x in X for y in Y}
        for obj in objectives:
            value = obj(agree)
            if best is None or value > best:
                best = value
    if best is None:
        raise ValueError("no deterministic strategy satisfies the anticorrelation constraints")
    return best


def strategy_model(fa: Mapping[str, int], fb: Mapping[str, int], outcomes: Sequence[str] = ("up", "down")) -> OperationalModel:
    """Operational table of a deterministic strategy; bit 0 is the first outcome label."""
    X, Y = list(fa), list(fb)
    return OperationalModel.from_function(
        X, Y, outcomes, outcomes,
        lambda x, y, a, b: int(a == outcomes[fa[x]] and b == outcomes[fb[y]]),
    )


def default_chsh_settings(model: OperationalModel) -> tuple[str, str, str, str]:
    if len(model.prep_settings) != 2 or len(model.meas_settings) != 2:
        raise UnsupportedShape("default CHSH settings need exactly two settings per wing")
    (x0, x1), (y0, y1) = model.prep_settings, model.meas_settings
    return x0, x1, y0, y1


def default_wigner_triple(model: OperationalModel) -> tuple[Pair, Pair, Pair]:
    """((x0, y1), (x1, y0), (x1, y1)) in the models' setting order."""
    x0, x1, y0, y1 = default_chsh_settings(model)
    return (x0, y1), (x1, y0), (x1, y1)
