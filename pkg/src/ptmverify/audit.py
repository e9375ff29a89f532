"""Step-by-step audit of the no-go lemma's proof on a concrete reverse pair.

The proof runs: decompose the joint by No Retrocausality, apply Bayes,
substitute, sum out to get p(lambda|x,y) = p(lambda|x); repeat on the time
reverse to get p(lambda|x,y) = p(lambda|y); conclude p(lambda|x,y) =
p(lambda), plus the mediation-style consequences for b and a.

Steps (a)-(c) are checked with the full setting context (x, y) held fixed,
so they test the algebra of each rewrite; whether the factors really drop y
is exactly what step (d) tests. Steps (d)-(i) are invariance statements
evaluated with :func:`~ptmverify.prob.check_invariance`. Conditionals on
events of probability zero are never evaluated: an entry that needs one is
counted as vacuous, and a step with no non-vacuous entry is reported as
``"vacuous"`` rather than passed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .conditions import Verdict
from .inequalities import (
    CorrelationSummary,
    InequalityResult,
    UnsupportedShape,
    chsh,
    correlation_summary,
    default_chsh_settings,
    default_wigner_triple,
    wigner_check,
)
from .models import LAMBDA, OnticModel, OperationalModel, require_valid
from .prob import (
    StructuralError,
    Witness,
    bayes_invert,
    check_independence,
    check_invariance,
    conditional,
    format_fraction,
)
from .timereverse import ReversePair, verify_reverse_pair

HOLDS, FAILS, VACUOUS = "holds", "fails", "vacuous"

STEP_ORDER = (
    ("a", "eq19", "original", "p(a,b,λ|x,y) = p(b|λ,x,a,y) p(λ|a,x) p(a|x)"),
    ("b", "eq20", "original", "p(λ|a,x) = p(a|λ,x) p(λ|x) / p(a|x)"),
    ("c", "eq21", "original", "p(a,b,λ|x,y) = p(b|λ,x,a,y) p(a|λ,x) p(λ|x)"),
    ("d", "lambda_indep_y", "original", "p(λ|x,y) = p(λ|x)"),
    ("e", "reverse_indep", "reverse", "reverse: p′(μ|y,x) = p′(μ|y), μ = f(λ)"),
    ("f", "lambda_indep_x", "original", "p(λ|x,y) = p(λ|y)"),
    ("g", "eq16", "original", "p(λ|x,y) = p(λ)"),
    ("h", "eq17", "original", "p(b|λ,x,y) = p(b|λ,y)"),
    ("i", "eq18", "original", "p(a|λ,x,y) = p(a|λ,x)"),
)


@dataclass(frozen=True)
class AuditStep:
    label: str
    step_id: str
    statement: str
    side: str
    verdict: str
    witness: Witness | None = None
    checked: int = 0
    vacuous: int = 0

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "step": self.label,
            "id": self.step_id,
            "statement": self.statement,
            "side": self.side,
            "verdict": self.verdict,
            "checked": self.checked,
            "vacuous_entries": self.vacuous,
        }
        if self.witness is not None:
            out["witness"] = self.witness.as_dict()
        return out


@dataclass
class AuditReport:
    steps: list[AuditStep]
    summary: str

    def step(self, key: str) -> AuditStep:
        for s in self.steps:
            if key in (s.label, s.step_id):
                return s
        raise KeyError(key)

    @property
    def first_failure(self) -> AuditStep | None:
        return next((s for s in self.steps if s.verdict == FAILS), None)

    def as_dict(self) -> dict[str, Any]:
        first = self.first_failure
        return {
            "steps": [s.as_dict() for s in self.steps],
            "first_failure": first.label if first else None,
            "summary": self.summary,
        }


class _Tally:
    def __init__(self):
        self.checked = 0
        self.vacuous = 0
        self.witness: Witness | None = None

    def compare(self, assignment, lhs, rhs) -> None:
        self.checked += 1
        if lhs != rhs and self.witness is None:
            self.witness = Witness(dict(assignment), lhs, rhs)

    def step(self, row) -> AuditStep:
        label, step_id, side, statement = row
        if self.witness is not None:
            verdict = FAILS
        elif self.checked == 0:
            verdict = VACUOUS
        else:
            verdict = HOLDS
        return AuditStep(label, step_id, statement, side, verdict, self.witness, self.checked, self.vacuous)


def _step_row(step_id: str):
    return next(s for s in STEP_ORDER if s[1] == step_id)


def _decomposition_steps(model: OnticModel) -> list[AuditStep]:
    J = model.joint
    p_a = conditional(J, ["a"], ["x", "y"])
    p_l = conditional(J, [LAMBDA], ["x", "y"])
    p_l_a = conditional(J, [LAMBDA], ["a", "x", "y"])
    p_a_l = conditional(J, ["a"], [LAMBDA, "x", "y"])
    p_b = conditional(J, ["b"], [LAMBDA, "x", "a", "y"])

    eq19, eq21 = _Tally(), _Tally()
    for s, joint in J.items():
        ctx = {"x": s["x"], "y": s["y"]}
        pa = p_a[{**ctx, "a": s["a"]}]
        pl = p_l[{**ctx, LAMBDA: s[LAMBDA]}]
        # eq19: p(b|λ,x,a,y) p(λ|a,x) p(a|x)
        if pa == 0 or p_l_a[{**ctx, "a": s["a"], LAMBDA: s[LAMBDA]}] == 0:
            eq19.vacuous += 1
        else:
            rhs = p_b[s] * p_l_a[{**ctx, "a": s["a"], LAMBDA: s[LAMBDA]}] * pa
            eq19.compare(s, joint, rhs)
        # eq21: p(b|λ,x,a,y) p(a|λ,x) p(λ|x)
        if pl == 0 or p_a_l[{**ctx, "a": s["a"], LAMBDA: s[LAMBDA]}] == 0:
            eq21.vacuous += 1
        else:
            rhs = p_b[s] * p_a_l[{**ctx, "a": s["a"], LAMBDA: s[LAMBDA]}] * pl
            eq21.compare(s, joint, rhs)

    eq20 = _Tally()
    inverted = bayes_invert(p_a_l, p_l, p_a, skip_zero=True)
    # both sides are undefined exactly where p(a|x,y) = 0
    for s, direct in p_l_a.items():
        eq20.compare(s, direct, inverted[s])
    for row in J.assignments(["x", "y", "a"]):
        if not p_l_a.is_defined(row):
            eq20.vacuous += len(model.lambda_space)

    return [eq19.step(_step_row("eq19")), eq20.step(_step_row("eq20")), eq21.step(_step_row("eq21"))]


def _invariance_step(step_id: str, table, targets, over, given) -> AuditStep:
    label, _, side, statement = _step_row(step_id)
    v = check_invariance(table, targets, over, given)
    return AuditStep(label, step_id, statement, side, v.status, v.witness, v.compared)


_REVERSE_NAMES = {"x": "y", "y": "x", "a": "b", "b": "a", LAMBDA: "μ"}


def _relabel_reverse(step: AuditStep) -> AuditStep:
    """Report a reverse-model witness in the original's variable names (μ = f(λ))."""
    w = step.witness
    if w is None:
        return step
    rename = lambda d: {_REVERSE_NAMES.get(k, k): v for k, v in d.items()}  # noqa: E731
    detail = {k: rename(v) if isinstance(v, dict) else v for k, v in w.detail.items()}
    return AuditStep(
        step.label, step.step_id, step.statement, step.side, step.verdict,
        Witness(rename(w.assignment), w.lhs, w.rhs, detail), step.checked, step.vacuous,
    )


def _summarize(steps: list[AuditStep]) -> str:
    first = next((s for s in steps if s.verdict == FAILS), None)
    if first is None:
        return "every step holds on this pair"
    w = first.witness
    where = ""
    if w is not None:
        if "lhs_context" in w.detail:
            where = (
                f" (witness {_fmt_assign(w.assignment)}: p = {format_fraction(w.lhs)} at "
                f"{_fmt_assign(w.detail['lhs_context'])}, p = {format_fraction(w.rhs)} at "
                f"{_fmt_assign(w.detail['rhs_context'])})"
            )
        else:
            where = f" (witness {_fmt_assign(w.assignment)}: {format_fraction(w.lhs)} vs {format_fraction(w.rhs)})"
    return f"first failing step ({first.label}) {first.step_id} [{first.side}]: {first.statement}{where}"


def _fmt_assign(a: Mapping[str, str]) -> str:
    return ", ".join(f"{'λ' if k == LAMBDA else k}={v}" for k, v in a.items())


def audit_lemma(pair: ReversePair) -> AuditReport:
    check = verify_reverse_pair(pair)
    if not check.passed:
        raise StructuralError(f"not an ontological reverse pair: {check.witness}")
    require_valid(pair.original)
    J = pair.original.joint
    R = pair.reverse.joint
    steps = _decomposition_steps(pair.original)
    steps.append(_invariance_step("lambda_indep_y", J, [LAMBDA], ["y"], ["x"]))
    # reverse model: its preparation setting is named x and carries the original y values
    steps.append(_relabel_reverse(_invariance_step("reverse_indep", R, [LAMBDA], ["y"], ["x"])))
    steps.append(_invariance_step("lambda_indep_x", J, [LAMBDA], ["x"], ["y"]))
    steps.append(_invariance_step("eq16", J, [LAMBDA], ["x", "y"], []))
    steps.append(_invariance_step("eq17", J, ["b"], ["x"], [LAMBDA, "y"]))
    steps.append(_invariance_step("eq18", J, ["a"], ["y"], [LAMBDA, "x"]))
    return AuditReport(steps, _summarize(steps))


@dataclass(frozen=True)
class ConflationFinding:
    """The three independence claims the proof juggles, with their audit verdicts."""

    original_lambda_indep_y: str
    reverse_mu_indep_x: str
    original_lambda_indep_x: str
    text: str

    def as_dict(self) -> dict[str, Any]:
        return {
            "original: λ ⫫ y | x": self.original_lambda_indep_y,
            "reverse: f(λ) ⫫ x | y": self.reverse_mu_indep_x,
            "original: λ ⫫ x | y": self.original_lambda_indep_x,
            "finding": self.text,
        }


def explain_conflation(pair: ReversePair, report: AuditReport | None = None) -> ConflationFinding:
    report = report or audit_lemma(pair)
    d, e, f = report.step("d").verdict, report.step("e").verdict, report.step("f").verdict
    if d == FAILS:
        text = (
            "the original model already lets λ depend on the measurement setting y, so the "
            "lemma's premise fails and the original/reverse distinction is not reached"
        )
    elif f != FAILS:
        text = "λ is independent of both settings in the original model; conflating λ with f(λ) does no damage here"
    elif e == FAILS:
        text = (
            "λ ⫫ y holds in the original model, but the reverse-side claim f(λ) ⫫ x fails: "
            "under the reversal it is the same equation as λ ⫫ x in the original model, which "
            "also fails. The second half of the lemma's argument needs a premise the reverse does not satisfy"
        )
    else:
        text = (
            "λ ⫫ y holds in the original model and f(λ) ⫫ x holds in the reverse, yet λ ⫫ x "
            "fails in the original: the two independences belong to different models and "
            "cannot be combined into p(λ|x,y) = p(λ)"
        )
    return ConflationFinding(d, e, f, text)


@dataclass(frozen=True)
class MediationConsequence:
    recomputed: OperationalModel
    lambda_marginal: dict[str, Fraction]
    b_independent: bool
    summary: CorrelationSummary | None
    inequalities: list[InequalityResult] = field(default_factory=list)

    @property
    def violation_survives(self) -> bool:
        return any(r.violated for r in self.inequalities)

    @property
    def verdict(self) -> Verdict:
        ok = self.b_independent and not self.violation_survives
        return Verdict("mediation_consequence", ok, None, None if ok else "recomputed model still correlates")


def mediation_consequence_check(
    model: OnticModel, settings: Mapping[str, Mapping[str, Any]] | None = None
) -> MediationConsequence:
    """Recompute the statistics with p(λ|a,x) replaced by a setting-free p(λ).

    P*(a,b|x,y) = p(a|x,y) sum_λ p(λ) p(b|λ,y)

    p(λ) is the λ-marginal under ``settings`` (uniform by default) and
    p(b|λ,y) is the mediated outcome rule read off the same mixture. At a y
    where some λ never occurs, the sum is renormalized over the λ that do.
    """
    require_valid(model)
    mix = model.joint.joint(settings)
    p_lam = {lam: mix.mass({LAMBDA: lam}) for lam in model.lambda_space}
    p_b = conditional(mix, ["b"], [LAMBDA, "y"])
    p_a = conditional(model.joint, ["a"], ["x", "y"])

    q: dict[tuple[str, str], Fraction] = {}
    for y in model.meas_settings:
        live = [lam for lam in model.lambda_space if p_lam[lam] and p_b.is_defined({LAMBDA: lam, "y": y})]
        norm = sum((p_lam[lam] for lam in live), Fraction(0))
        for b in model.meas_outputs:
            q[(y, b)] = sum((p_lam[lam] * p_b[{LAMBDA: lam, "y": y, "b": b}] for lam in live), Fraction(0)) / norm

    recomputed = OperationalModel.from_function(
        model.prep_settings, model.meas_settings, model.prep_outputs, model.meas_outputs,
        lambda x, y, a, b: p_a[{"x": x, "y": y, "a": a}] * q[(y, b)],
    )
    b_indep = check_independence(recomputed.joint, ["b"], ["a", "x"], ["y"]).independent

    summary = None
    results: list[InequalityResult] = []
    try:
        summary = correlation_summary(recomputed)
        x0, x1, y0, y1 = default_chsh_settings(recomputed)
        results.append(wigner_check(summary, default_wigner_triple(recomputed)))
        results.append(chsh(summary, x0, x1, y0, y1))
    except (UnsupportedShape, StructuralError):
        pass
    return MediationConsequence(recomputed, p_lam, b_indep, summary, results)

