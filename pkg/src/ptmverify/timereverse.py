"""Operational and ontological time reverses.

A reverse swaps the roles of the two devices: the measurement's setting and
outcome become the preparation's, and vice versa. For ontic models the
reverse must also reproduce the full joint through a bijection of ontic
states:

    p_rev(a'=b, b'=a, lambda'=f(lambda) | x'=y, y'=x) = p(a, b, lambda | x, y)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .conditions import Verdict
from .models import (
    LAMBDA,
    OnticModel,
    OperationalModel,
    check_no_signalling,
    require_valid,
    to_operational,
)
from .prob import StructuralError, Witness

MAX_SEARCH_LAMBDA = 8


class SignallingRequired(ValueError):
    """The construction is only guaranteed inside the no-signalling sector."""

    def __init__(self, flags: list[str], witness: Witness | None = None):
        self.flags = flags
        self.witness = witness
        super().__init__("model signals: " + ", ".join(flags) + " violated")


class SearchLimitError(ValueError):
    pass


@dataclass(frozen=True)
class Bijection:
    """A one-to-one map between ontic spaces, stored as ordered label pairs."""

    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        src = [s for s, _ in self.pairs]
        dst = [d for _, d in self.pairs]
        if len(set(src)) != len(src) or len(set(dst)) != len(dst):
            raise StructuralError("bijection must be injective and single-valued")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str]) -> "Bijection":
        return cls(tuple(mapping.items()))

    @classmethod
    def identity(cls, space) -> "Bijection":
        return cls(tuple((s, s) for s in space))

    def __call__(self, label: str) -> str:
        for s, d in self.pairs:
            if s == label:
                return d
        raise KeyError(label)

    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    def inverse(self) -> "Bijection":
        return Bijection(tuple((d, s) for s, d in self.pairs))

    def is_identity(self) -> bool:
        return all(s == d for s, d in self.pairs)

    def check_onto(self, domain, codomain) -> None:
        if sorted(s for s, _ in self.pairs) != sorted(domain) or sorted(d for _, d in self.pairs) != sorted(codomain):
            raise StructuralError("bijection is not total and onto the target space")


@dataclass(frozen=True)
class ReversePair:
    original: OnticModel
    reverse: OnticModel
    f: Bijection


def _require_no_signalling(model: OperationalModel | OnticModel) -> None:
    verdict = check_no_signalling(model)
    if not verdict.ok:
        flags = []
        if not verdict.no_forward_signalling:
            flags.append("no_forward_signalling")
        if not verdict.no_retro_signalling:
            flags.append("no_retro_signalling")
        raise SignallingRequired(flags, verdict.forward_witness or verdict.retro_witness)


def operational_reverse(model: OperationalModel) -> OperationalModel:
    """Swap the devices: P'(b,a|y,x) := P(a,b|x,y)."""
    require_valid(model)
    _require_no_signalling(model)
    return OperationalModel.from_function(
        model.meas_settings,
        model.prep_settings,
        model.meas_outputs,
        model.prep_outputs,
        lambda x, y, a, b: model.p(b, a, y, x),
    )


def _check_swapped_alphabets(m1, m2) -> None:
    if (
        set(m2.prep_settings) != set(m1.meas_settings)
        or set(m2.meas_settings) != set(m1.prep_settings)
        or set(m2.prep_outputs) != set(m1.meas_outputs)
        or set(m2.meas_outputs) != set(m1.prep_outputs)
    ):
        raise StructuralError("second model's alphabets are not the first's with roles swapped")


def is_operational_reverse(m1: OperationalModel, m2: OperationalModel) -> Verdict:
    _check_swapped_alphabets(m1, m2)
    for s, p in m1.joint.items():
        q = m2.p(s["b"], s["a"], s["y"], s["x"])
        if p != q:
            return Verdict("operational_reverse", False, Witness(s, p, q), "P'(b,a|y,x) != P(a,b|x,y)")
    return Verdict("operational_reverse", True)


def _reverse_matches(original: OnticModel, candidate: OnticModel, f: Bijection) -> Witness | None:
    for s, p in original.joint.items():
        q = candidate.p(s["b"], s["a"], f(s[LAMBDA]), s["y"], s["x"])
        if p != q:
            return Witness(s, p, q, {"f(lambda)": f(s[LAMBDA])})
    return None


def verify_reverse_pair(pair: ReversePair) -> Verdict:
    """Check the defining equality of an ontological reverse entrywise."""
    _check_swapped_alphabets(pair.original, pair.reverse)
    pair.f.check_onto(pair.original.lambda_space, pair.reverse.lambda_space)
    w = _reverse_matches(pair.original, pair.reverse, pair.f)
    if w is not None:
        return Verdict("ontological_reverse", False, w, "p'(b,a,f(lambda)|y,x) != p(a,b,lambda|x,y)")
    return Verdict("ontological_reverse", True)


def find_ontological_reverse(original: OnticModel, candidate: OnticModel) -> list[Bijection]:
    """All bijections f making ``candidate`` an ontological reverse of ``original``.

    Every permutation of the candidate's ontic space is tried, in the
    lexicographic order of ``itertools.permutations``; the result keeps that
    order. Each ontic state's column of the joint is compared once up front so
    that checking a permutation costs |Lambda| lookups.
    """
    L, L2 = original.lambda_space, candidate.lambda_space
    if len(L) != len(L2):
        raise StructuralError(f"ontic spaces differ in size: {len(L)} vs {len(L2)}")
    if len(L) > MAX_SEARCH_LAMBDA:
        raise SearchLimitError(
            f"|Lambda| = {len(L)} exceeds the search limit of {MAX_SEARCH_LAMBDA}"
        )
    _check_swapped_alphabets(original, candidate)

    def column(model: OnticModel, lam: str, swap: bool):
        out = []
        for x in original.prep_settings:
            for y in original.meas_settings:
                for a in original.prep_outputs:
                    for b in original.meas_outputs:
                        out.append(model.p(b, a, lam, y, x) if swap else model.p(a, b, lam, x, y))
        return tuple(out)

    cols = {lam: column(original, lam, False) for lam in L}
    cand = {mu: column(candidate, mu, True) for mu in L2}
    fits = {(lam, mu): cols[lam] == cand[mu] for lam in L for mu in L2}

    found = []
    for image in itertools.permutations(L2):
        if all(fits[(lam, mu)] for lam, mu in zip(L, image)):
            found.append(Bijection(tuple(zip(L, image))))
    return found


def canonical_ontological_reverse(original: OnticModel) -> ReversePair:
    """Reverse with the same ontic space and f the identity: p'(b,a,lambda|y,x) := p(a,b,lambda|x,y)."""
    require_valid(original)
    _require_no_signalling(to_operational(original))
    reverse = OnticModel.from_function(
        original.meas_settings,
        original.prep_settings,
        original.meas_outputs,
        original.prep_outputs,
        original.lambda_space,
        lambda x, y, a, b, lam: original.p(b, a, lam, y, x),
    )
    return ReversePair(original, reverse, Bijection.identity(original.lambda_space))


def check_time_symmetry(model: OnticModel) -> Verdict:
    """Existence of an ontological reverse, witnessed by the canonical construction.

    Outside the no-signalling sector no reverse can exist (the reverse's
    preparation output would have to depend on its own future input), so the
    verdict is a failure with reason.
    """
    try:
        pair = canonical_ontological_reverse(model)
    except SignallingRequired as err:
        return Verdict("time_symmetry", False, err.witness, "no-signalling violated: " + ", ".join(err.flags))
    check = verify_reverse_pair(pair)
    if not check.passed:
        return Verdict("time_symmetry", False, check.witness, "canonical reverse failed verification")
    return Verdict("time_symmetry", True)
