"""Prepare-transform-measure experiments as exact probability tables.

Every model uses the same variable names: ``x`` (preparation setting), ``a``
(preparation output), ``y`` (measurement setting), ``b`` (measurement
outcome) and, for ontic models, ``lambda``. Settings are exogenous: the
tables are conditional on ``x`` and ``y`` and no distribution over them is
stored.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from .prob import (
    ProbTable,
    StructuralError,
    Witness,
    check_invariance,
    format_fraction,
    marginalize,
    to_fraction,
)

SETTINGS = ("x", "y")
LAMBDA = "lambda"


class ValidationError(ValueError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("invalid model: " + "; ".join(report.problems))


def _table_vars(X, Y, A, B, L=None):
    variables = [("x", tuple(X)), ("y", tuple(Y)), ("a", tuple(A)), ("b", tuple(B))]
    if L is not None:
        variables.append((LAMBDA, tuple(L)))
    return variables


@dataclass(frozen=True, eq=False)
class OperationalModel:
    """``P(a,b|x,y)`` over finite alphabets."""

    prep_settings: tuple[str, ...]
    meas_settings: tuple[str, ...]
    prep_outputs: tuple[str, ...]
    meas_outputs: tuple[str, ...]
    joint: ProbTable

    @classmethod
    def from_function(cls, X, Y, A, B, fn: Callable[[str, str, str, str], Any]) -> "OperationalModel":
        """Build from ``fn(x, y, a, b) -> probability``."""
        table = ProbTable.from_function(
            _table_vars(X, Y, A, B), lambda s: fn(s["x"], s["y"], s["a"], s["b"]), SETTINGS
        )
        return cls(tuple(X), tuple(Y), tuple(A), tuple(B), table)

    @classmethod
    def from_entries(cls, X, Y, A, B, entries: Mapping[tuple[str, str, str, str], Any]) -> "OperationalModel":
        """``entries`` keyed by ``(x, y, a, b)``; absent cells are zero."""
        table = ProbTable(_table_vars(X, Y, A, B), entries, SETTINGS, sparse=True)
        return cls(tuple(X), tuple(Y), tuple(A), tuple(B), table)

    def p(self, a: str, b: str, x: str, y: str) -> Fraction:
        return self.joint[{"x": x, "y": y, "a": a, "b": b}]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OperationalModel):
            return NotImplemented
        return self.joint == other.joint


@dataclass(frozen=True, eq=False)
class OnticModel:
    """``p(a,b,lambda|x,y)``; the operational statistics are its lambda-marginal."""

    prep_settings: tuple[str, ...]
    meas_settings: tuple[str, ...]
    prep_outputs: tuple[str, ...]
    meas_outputs: tuple[str, ...]
    lambda_space: tuple[str, ...]
    joint: ProbTable

    @classmethod
    def from_function(cls, X, Y, A, B, L, fn: Callable[[str, str, str, str, str], Any]) -> "OnticModel":
        """Build from ``fn(x, y, a, b, lam) -> probability``."""
        table = ProbTable.from_function(
            _table_vars(X, Y, A, B, L),
            lambda s: fn(s["x"], s["y"], s["a"], s["b"], s[LAMBDA]),
            SETTINGS,
        )
        return cls(tuple(X), tuple(Y), tuple(A), tuple(B), tuple(L), table)

    @classmethod
    def from_entries(cls, X, Y, A, B, L, entries: Mapping[tuple[str, ...], Any]) -> "OnticModel":
        """``entries`` keyed by ``(x, y, a, b, lam)``; absent cells are zero."""
        table = ProbTable(_table_vars(X, Y, A, B, L), entries, SETTINGS, sparse=True)
        return cls(tuple(X), tuple(Y), tuple(A), tuple(B), tuple(L), table)

    def p(self, a: str, b: str, lam: str, x: str, y: str) -> Fraction:
        return self.joint[{"x": x, "y": y, "a": a, "b": b, LAMBDA: lam}]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OnticModel):
            return NotImplemented
        return self.joint == other.joint


@dataclass(frozen=True, eq=False)
class TransformationChannel:
    """Stochastic map ``p(lambda_out | lambda_in)``."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    kernel: ProbTable

    @classmethod
    def from_function(cls, inputs, outputs, fn: Callable[[str, str], Any]) -> "TransformationChannel":
        """Build from ``fn(lam_in, lam_out) -> probability``."""
        kernel = ProbTable.from_function(
            [("lambda_in", tuple(inputs)), ("lambda_out", tuple(outputs))],
            lambda s: fn(s["lambda_in"], s["lambda_out"]),
            ["lambda_in"],
        )
        if not kernel.is_normalized():
            raise StructuralError("channel rows must each sum to 1")
        return cls(tuple(inputs), tuple(outputs), kernel)

    @classmethod
    def identity(cls, space: Sequence[str]) -> "TransformationChannel":
        return cls.from_function(space, space, lambda i, o: 1 if i == o else 0)

    @classmethod
    def deterministic(cls, inputs, outputs, mapping: Mapping[str, str]) -> "TransformationChannel":
        return cls.from_function(inputs, outputs, lambda i, o: 1 if mapping[i] == o else 0)


@dataclass(frozen=True)
class RunRecord:
    x: str
    y: str
    a: str
    b: str
    lam: str | None
    index: int | None = None


@dataclass
class ValidationReport:
    problems: list[str] = field(default_factory=list)
    bad_rows: list[tuple[dict[str, str], Fraction]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.ok


Model = OperationalModel | OnticModel


def validate(model: Model) -> ValidationReport:
    """List every alphabet defect and every (x,y) row that is not a distribution."""
    report = ValidationReport()
    alphabets = {
        "prep_settings": model.prep_settings,
        "meas_settings": model.meas_settings,
        "prep_outputs": model.prep_outputs,
        "meas_outputs": model.meas_outputs,
    }
    if isinstance(model, OnticModel):
        alphabets["lambda_space"] = model.lambda_space
    for name, labels in alphabets.items():
        if not labels:
            what = "empty ontic space" if name == "lambda_space" else f"empty alphabet {name}"
            report.problems.append(what)
    if report.problems:
        return report
    for assignment, p in model.joint.items():
        if p < 0 or p > 1:
            report.problems.append(f"entry {assignment} = {format_fraction(p)} outside [0,1]")
    for (x, y), total in model.joint.row_sums().items():
        if total != 1:
            row = {"x": x, "y": y}
            report.bad_rows.append((row, total))
            report.problems.append(f"row x={x}, y={y} sums to {format_fraction(total)}")
    return report


def require_valid(model: Model) -> None:
    report = validate(model)
    if not report.ok:
        raise ValidationError(report)


def to_operational(model: OnticModel) -> OperationalModel:
    require_valid(model)
    joint = marginalize(model.joint, ["a", "b"])
    return OperationalModel(
        model.prep_settings, model.meas_settings, model.prep_outputs, model.meas_outputs, joint
    )


def lift(model: OperationalModel, label: str = "*") -> OnticModel:
    """Ontic extension with a single ontic state."""
    return OnticModel.from_function(
        model.prep_settings,
        model.meas_settings,
        model.prep_outputs,
        model.meas_outputs,
        [label],
        lambda x, y, a, b, lam: model.p(a, b, x, y),
    )


def compose_transformation(prep_stage: OnticModel, channel: TransformationChannel) -> OnticModel:
    """Push the ontic state through ``channel``: sum over lambda_in of p(out|in) p(a,b,in|x,y)."""
    if tuple(channel.inputs) != tuple(prep_stage.lambda_space):
        raise StructuralError(
            f"channel input space {channel.inputs} does not match ontic space {prep_stage.lambda_space}"
        )
    entries: dict[tuple[str, ...], Fraction] = {}
    for s, p in prep_stage.joint.items():
        if p == 0:
            continue
        for out in channel.outputs:
            w = channel.kernel[{"lambda_in": s[LAMBDA], "lambda_out": out}]
            if w:
                key = (s["x"], s["y"], s["a"], s["b"], out)
                entries[key] = entries.get(key, Fraction(0)) + p * w
    return OnticModel.from_entries(
        prep_stage.prep_settings,
        prep_stage.meas_settings,
        prep_stage.prep_outputs,
        prep_stage.meas_outputs,
        channel.outputs,
        entries,
    )


@dataclass(frozen=True)
class SignallingVerdict:
    no_forward_signalling: bool
    no_retro_signalling: bool
    forward_witness: Witness | None = None
    retro_witness: Witness | None = None

    @property
    def ok(self) -> bool:
        return self.no_forward_signalling and self.no_retro_signalling


def check_no_signalling(model: Model) -> SignallingVerdict:
    """Forward: p(b|x,y) does not depend on x. Retro: p(a|x,y) does not depend on y."""
    forward = check_invariance(model.joint, ["b"], ["x"], ["y"])
    retro = check_invariance(model.joint, ["a"], ["y"], ["x"])
    return SignallingVerdict(forward.holds, retro.holds, forward.witness, retro.witness)


class RunSampler:
    """Draws (a, b, lambda) for given settings from precomputed integer thresholds.

    A 64-bit uniform integer ``u`` selects the first cell whose cumulative
    probability ``c`` satisfies ``u < c * 2**64``; the comparison is exact.
    """

    def __init__(self, model: Model):
        require_valid(model)
        self.model = model
        self._cells: dict[tuple[str, str], tuple[list[int], list[tuple]]] = {}
        has_lambda = isinstance(model, OnticModel)
        for x in model.prep_settings:
            for y in model.meas_settings:
                cum = Fraction(0)
                bounds: list[int] = []
                outcomes: list[tuple] = []
                for s, p in model.joint.items():
                    if s["x"] != x or s["y"] != y or p == 0:
                        continue
                    cum += p
                    scaled = cum * 2**64
                    bounds.append(-((-scaled.numerator) // scaled.denominator))
                    outcomes.append((s["a"], s["b"], s[LAMBDA] if has_lambda else None))
                self._cells[(x, y)] = (bounds, outcomes)

    def draw(self, x: str, y: str, rng: random.Random, index: int | None = None) -> RunRecord:
        try:
            bounds, outcomes = self._cells[(x, y)]
        except KeyError:
            raise StructuralError(f"unknown settings x={x!r}, y={y!r}") from None
        u = rng.getrandbits(64)
        a, b, lam = outcomes[bisect.bisect_right(bounds, u)]
        return RunRecord(x, y, a, b, lam, index)


def sample_run(model: Model, x: str, y: str, rng: random.Random, index: int | None = None) -> RunRecord:
    """One run at settings (x, y); reproducible for a given ``random.Random`` state."""
    return RunSampler(model).draw(x, y, rng, index)


def _settings_weights(labels: Sequence[str], dist: Mapping[str, Any] | None) -> list[Fraction]:
    if dist is None:
        return [Fraction(1, len(labels))] * len(labels)
    w = [to_fraction(dist.get(lab, 0)) for lab in labels]
    if sum(w) != 1 or any(v < 0 for v in w):
        raise StructuralError("settings distribution must be normalized")
    return w


def sample_runs(
    model: Model,
    n: int,
    seed: int,
    settings: Mapping[str, Mapping[str, Any]] | None = None,
) -> list[RunRecord]:
    """``n`` runs with settings drawn independently from ``settings`` (uniform by default)."""
    if n <= 0:
        raise ValueError("number of runs must be positive")
    settings = settings or {}
    rng = random.Random(seed)
    sampler = RunSampler(model)
    X, Y = model.prep_settings, model.meas_settings
    wx = _settings_weights(X, settings.get("x"))
    wy = _settings_weights(Y, settings.get("y"))
    runs = []
    for i in range(n):
        # exact-weight setting draws use the same threshold scheme as the outcomes
        x = X[_pick(wx, rng)]
        y = Y[_pick(wy, rng)]
        runs.append(sampler.draw(x, y, rng, i))
    return runs


def _pick(weights: list[Fraction], rng: random.Random) -> int:
    u = rng.getrandbits(64)
    cum = Fraction(0)
    for i, w in enumerate(weights):
        cum += w
        if w and u * cum.denominator < cum.numerator * 2**64:
            return i
    return len(weights) - 1
