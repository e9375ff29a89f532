"""Checkers for the five conditions, Bell locality and causal acyclicity."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from .models import LAMBDA, OnticModel
from .prob import Witness, check_independence, conditional, format_fraction

CONDITIONS = ("free_choice", "realism", "lambda_mediation", "no_retrocausality", "time_symmetry")
DISPLAY_NAMES = {
    "free_choice": "FreeChoice",
    "realism": "Realism",
    "lambda_mediation": "LambdaMediation",
    "no_retrocausality": "NoRetrocausality",
    "time_symmetry": "TimeSymmetry",
}


@dataclass(frozen=True)
class Verdict:
    """Pass/fail with the evidence for a failure.

    ``witness`` is either a :class:`~ptmverify.prob.Witness` or, for the
    structural checks, a plain dict naming the offending object.
    """

    name: str
    passed: bool
    witness: Any = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.passed

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "passed": self.passed}
        if self.witness is not None:
            w = self.witness
            out["witness"] = w.as_dict() if isinstance(w, Witness) else w
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass(frozen=True)
class CausalGraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    input_nodes: frozenset[str] = frozenset()

    def __post_init__(self):
        known = set(self.nodes)
        for u, v in self.edges:
            if u not in known or v not in known:
                raise ValueError(f"edge {u}->{v} references an unknown node")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("duplicate edges")
        if not set(self.input_nodes) <= known:
            raise ValueError("input nodes must be graph nodes")

    @classmethod
    def build(cls, nodes: Iterable[str], edges: Iterable[tuple[str, str]], inputs: Iterable[str] = ()):
        return cls(tuple(nodes), tuple(edges), frozenset(inputs))

    def with_edge(self, u: str, v: str) -> "CausalGraph":
        return CausalGraph(self.nodes, self.edges + ((u, v),), self.input_nodes)

    def successors(self, node: str) -> list[str]:
        return [v for u, v in self.edges if u == node]

    def has_path(self, src: str, dst: str) -> bool:
        seen, stack = set(), [src]
        while stack:
            for nxt in self.successors(stack.pop()):
                if nxt == dst:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return False


def check_acyclic(g: CausalGraph) -> Verdict:
    """Depth-first search for a back edge; a failure carries the cycle, closed (first node repeated)."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(g.nodes, WHITE)
    path: list[str] = []

    def visit(node: str) -> list[str] | None:
        color[node] = GREY
        path.append(node)
        for nxt in g.successors(node):
            if color[nxt] == GREY:
                return path[path.index(nxt):] + [nxt]
            if color[nxt] == WHITE:
                cycle = visit(nxt)
                if cycle:
                    return cycle
        path.pop()
        color[node] = BLACK
        return None

    for node in g.nodes:
        if color[node] == WHITE:
            cycle = visit(node)
            if cycle:
                return Verdict("acyclic", False, {"cycle": cycle}, "directed cycle")
    return Verdict("acyclic", True)


def check_free_choice(model: OnticModel) -> Verdict:
    """Every (x, y) pair must carry its own normalized distribution.

    The settings are exogenous, so the only way a model can restrict the
    experimenters' choices is by leaving some combination undefined.
    """
    for (x, y), total in model.joint.row_sums().items():
        if total == 0:
            return Verdict("free_choice", False, {"x": x, "y": y}, "setting pair has no distribution")
        if total != 1:
            return Verdict(
                "free_choice", False, {"x": x, "y": y, "sum": format_fraction(total)},
                "setting pair is not normalized",
            )
    return Verdict("free_choice", True)


def check_realism(model: OnticModel) -> Verdict:
    if not model.lambda_space:
        return Verdict("realism", False, {"lambda_space": []}, "empty ontic space")
    for s, p in model.joint.items():
        if p < 0 or p > 1:
            return Verdict("realism", False, {**s, "p": format_fraction(p)}, "entry is not a probability")
    for (x, y), total in model.joint.row_sums().items():
        if total != 1:
            return Verdict(
                "realism", False, {"x": x, "y": y, "sum": format_fraction(total)},
                "(a, b, lambda) is not a proper distribution for these settings",
            )
    return Verdict("realism", True)


def check_lambda_mediation(model: OnticModel) -> Verdict:
    """b ⫫ {a, x} | {lambda, y}."""
    v = check_independence(model.joint, ["b"], ["a", "x"], [LAMBDA, "y"])
    if v.independent:
        return Verdict("lambda_mediation", True)
    return Verdict("lambda_mediation", False, v.witness, "b depends on (a, x) beyond (lambda, y)")


def check_no_retrocausality(model: OnticModel) -> Verdict:
    """a ⫫ y | x and lambda ⫫ y | {a, x}: nothing produced before the measurement sees y."""
    v = check_independence(model.joint, ["a"], ["y"], ["x"])
    if not v.independent:
        return Verdict("no_retrocausality", False, v.witness, "preparation output a depends on y")
    v = check_independence(model.joint, [LAMBDA], ["y"], ["a", "x"])
    if not v.independent:
        return Verdict("no_retrocausality", False, v.witness, "ontic state depends on y")
    return Verdict("no_retrocausality", True)


def check_time_symmetry(model: OnticModel) -> Verdict:
    from .timereverse import check_time_symmetry as _check

    return _check(model)


def check_bell_locality(model: OnticModel) -> Verdict:
    """p(a,b|x,y,lambda) = p(a|x,lambda) p(b|y,lambda) wherever p(lambda|x,y) > 0.

    The single-wing conditionals drop a setting, so they are read off the
    uniform-settings mixture; if p(a|x,y,lambda) varied with y the
    factorization fails at some y regardless.
    """
    joint = model.joint.joint()
    p_ab = conditional(model.joint, ["a", "b"], ["x", "y", LAMBDA])
    p_a = conditional(joint, ["a"], ["x", LAMBDA])
    p_b = conditional(joint, ["b"], ["y", LAMBDA])
    for s, lhs in p_ab.items():
        ra = {"x": s["x"], LAMBDA: s[LAMBDA]}
        rb = {"y": s["y"], LAMBDA: s[LAMBDA]}
        rhs = p_a[{**ra, "a": s["a"]}] * p_b[{**rb, "b": s["b"]}]
        if lhs != rhs:
            return Verdict(
                "bell_locality", False, Witness(s, lhs, rhs),
                "joint outcome distribution does not factorize given lambda",
            )
    return Verdict("bell_locality", True)


@dataclass
class ConditionReport:
    verdicts: dict[str, Verdict] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.verdicts.items() if not v.passed]

    def as_dict(self) -> dict[str, Any]:
        return {k: v.as_dict() for k, v in self.verdicts.items()}


def check_conditions(model: OnticModel) -> ConditionReport:
    """Run all five checks. The equational ones need a well-formed model and are failed outright otherwise."""
    report = ConditionReport()
    report.verdicts["free_choice"] = check_free_choice(model)
    report.verdicts["realism"] = check_realism(model)
    well_formed = report.verdicts["free_choice"].passed and report.verdicts["realism"].passed
    for name, fn in (
        ("lambda_mediation", check_lambda_mediation),
        ("no_retrocausality", check_no_retrocausality),
        ("time_symmetry", check_time_symmetry),
    ):
        if well_formed:
            report.verdicts[name] = fn(model)
        else:
            report.verdicts[name] = Verdict(name, False, {"model": "invalid"}, "model failed validation")
    return report


def recheck_witness(model: OnticModel, verdict: Verdict, A, B, C) -> bool:
    """True when a failed independence verdict's witness still violates the equality on re-evaluation."""
    w = verdict.witness
    if not isinstance(w, Witness):
        return False
    joint = model.joint.joint()
    c = {k: w.assignment[k] for k in C}
    a = {k: w.assignment[k] for k in A}
    b = {k: w.assignment[k] for k in B}
    pc = joint.mass(c)
    if pc == 0:
        return False
    lhs = joint.mass({**c, **a, **b}) / pc
    rhs = (joint.mass({**c, **a}) / pc) * (joint.mass({**c, **b}) / pc)
    return lhs == w.lhs and rhs == w.rhs and lhs != rhs

