"""Exact finite probability tables.

Every number here is a :class:`fractions.Fraction`. A :class:`ProbTable`
holds a (possibly conditional) distribution over a handful of named
variables with string labels; the variables listed in ``given`` are
conditioners and carry no distribution of their own.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping, Sequence

Assignment = dict[str, str]

_DECIMAL = re.compile(r"^[+-]?(\d+)(?:\.(\d*))?$")
_RATIO = re.compile(r"^[+-]?\d+\s*/\s*\d+$")


class StructuralError(ValueError):
    """Unknown variable, mismatched alphabets, overlapping variable sets..."""


class ZeroConditioning(ArithmeticError):
    """Conditioning on an event of probability zero."""

    def __init__(self, assignment: Mapping[str, str], message: str | None = None):
        self.assignment = dict(assignment)
        super().__init__(message or f"conditioning event has probability 0: {self.assignment}")


def to_fraction(value: Any, max_decimals: int | None = None) -> Fraction:
    """Parse ``value`` exactly; ``".25"`` and ``"1/4"`` both give ``Fraction(1, 4)``.

    Floats are refused because their binary expansion is not the number the
    author wrote down.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float {value!r}; pass a string such as '0.25' or '1/4'")
    if isinstance(value, str):
        text = value.strip()
        if _RATIO.match(text):
            num, den = text.split("/")
            if int(den) == 0:
                raise ValueError(f"zero denominator in {value!r}")
            return Fraction(int(num), int(den))
        m = _DECIMAL.match(text) or re.match(r"^[+-]?()\.(\d+)$", text)
        if m:
            digits = m.group(2) or ""
            if max_decimals is not None and len(digits) > max_decimals:
                raise ValueError(f"{value!r} has more than {max_decimals} fractional digits")
            return Fraction(text)
    raise ValueError(f"not an exact probability: {value!r}")


def format_fraction(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Witness:
    """A concrete assignment at which a claimed equality fails, with both sides."""

    assignment: dict[str, str]
    lhs: Fraction
    rhs: Fraction
    detail: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "assignment": dict(self.assignment),
            "lhs": format_fraction(self.lhs),
            "rhs": format_fraction(self.rhs),
        }
        for key, val in self.detail.items():
            out[key] = format_fraction(val) if isinstance(val, Fraction) else val
        return out


class ProbTable:
    """Dense table over the product of the variables' alphabets.

    ``entries`` maps full assignments (dicts, or tuples in variable order) to
    probabilities. Missing assignments are an error unless ``sparse`` is set,
    in which case they are zero. A ``partial`` table may leave whole rows of
    the conditioning variables undefined; those rows are simply absent
    (``is_defined`` tells which).

    Normalization is *not* enforced on construction so that defective models
    can still be loaded and reported on; see :meth:`row_sums`.
    """

    __slots__ = ("_vars", "_names", "_index", "given", "partial", "_entries", "_rows")

    def __init__(
        self,
        variables: Sequence[tuple[str, Sequence[str]]],
        entries: Mapping[Any, Any],
        given: Iterable[str] = (),
        *,
        sparse: bool = False,
        partial: bool = False,
    ):
        names = [name for name, _ in variables]
        if len(set(names)) != len(names):
            raise StructuralError(f"duplicate variable names in {names}")
        self._vars: tuple[tuple[str, tuple[str, ...]], ...] = tuple(
            (name, tuple(labels)) for name, labels in variables
        )
        for name, labels in self._vars:
            if len(set(labels)) != len(labels):
                raise StructuralError(f"duplicate labels in alphabet of {name!r}")
        self._names = tuple(names)
        self._index = {name: i for i, name in enumerate(names)}
        given = frozenset(given)
        unknown = given - set(names)
        if unknown:
            raise StructuralError(f"conditioning variables not in table: {sorted(unknown)}")
        self.given = given
        self.partial = partial

        table: dict[tuple[str, ...], Fraction] = {}
        for key, value in entries.items():
            key = self._key(key)
            table[key] = to_fraction(value)
        gpos = [i for i, n in enumerate(self._names) if n in given]
        rows = {tuple(k[i] for i in gpos) for k in table}
        self._rows = rows
        for key in itertools.product(*(labels for _, labels in self._vars)):
            if key in table:
                continue
            if partial and tuple(key[i] for i in gpos) not in rows:
                continue
            if not sparse:
                raise StructuralError(f"missing entry for {dict(zip(self._names, key))}")
            table[key] = Fraction(0)
        self._entries = table

    # -- construction helpers -------------------------------------------------

    def _key(self, key: Any) -> tuple[str, ...]:
        if isinstance(key, Mapping):
            if set(key) != set(self._names):
                raise StructuralError(f"assignment {dict(key)} does not cover variables {self._names}")
            key = tuple(key[n] for n in self._names)
        key = tuple(key)
        if len(key) != len(self._vars):
            raise StructuralError(f"assignment {key} has wrong length")
        for (name, labels), label in zip(self._vars, key):
            if label not in labels:
                raise StructuralError(f"label {label!r} not in alphabet of {name!r}")
        return key

    @classmethod
    def from_function(
        cls,
        variables: Sequence[tuple[str, Sequence[str]]],
        fn,
        given: Iterable[str] = (),
        *,
        partial: bool = False,
    ) -> "ProbTable":
        """Build a table by calling ``fn(assignment_dict)`` on every cell.

        With ``partial`` set, ``fn`` may return ``None`` for cells of an
        undefined conditioning row.
        """
        names = [n for n, _ in variables]
        entries = {}
        for key in itertools.product(*(labels for _, labels in variables)):
            value = fn(dict(zip(names, key)))
            if value is None:
                if not partial:
                    raise StructuralError(f"no value for {dict(zip(names, key))}")
                continue
            entries[key] = value
        return cls(variables, entries, given, partial=partial)

    # -- accessors ------------------------------------------------------------

    @property
    def variables(self) -> tuple[tuple[str, tuple[str, ...]], ...]:
        return self._vars

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    @property
    def outcomes(self) -> tuple[str, ...]:
        """Non-conditioning variable names, in table order."""
        return tuple(n for n in self._names if n not in self.given)

    def alphabet(self, name: str) -> tuple[str, ...]:
        try:
            return self._vars[self._index[name]][1]
        except KeyError:
            raise StructuralError(f"unknown variable {name!r}") from None

    def __getitem__(self, assignment: Any) -> Fraction:
        key = self._key(assignment)
        try:
            return self._entries[key]
        except KeyError:
            raise ZeroConditioning(
                {n: key[self._index[n]] for n in self.given}, "conditioning row is undefined"
            ) from None

    def items(self) -> Iterator[tuple[Assignment, Fraction]]:
        for key, value in self._entries.items():
            yield dict(zip(self._names, key)), value

    def is_defined(self, row: Mapping[str, str]) -> bool:
        """Whether the conditioning row ``row`` carries a distribution."""
        if not self.partial:
            return True
        return tuple(row[n] for n in self._names if n in self.given) in self._rows

    def assignments(self, names: Sequence[str]) -> Iterator[Assignment]:
        for key in itertools.product(*(self.alphabet(n) for n in names)):
            yield dict(zip(names, key))

    def mass(self, event: Mapping[str, str]) -> Fraction:
        """Sum of the entries consistent with the partial assignment ``event``."""
        idx = [(self._index[n], v) for n, v in event.items()]
        return sum(
            (p for k, p in self._entries.items() if all(k[i] == v for i, v in idx)),
            Fraction(0),
        )

    def row_sums(self) -> dict[tuple[str, ...], Fraction]:
        """Total mass of each conditioning row, keyed by the row's labels in table order."""
        gpos = [i for i, n in enumerate(self._names) if n in self.given]
        sums: dict[tuple[str, ...], Fraction] = {}
        for key in itertools.product(*(self.alphabet(self._names[i]) for i in gpos)):
            if not self.partial or key in self._rows:
                sums[key] = Fraction(0)
        for key, p in self._entries.items():
            sums[tuple(key[i] for i in gpos)] += p
        return sums

    def is_normalized(self) -> bool:
        return all(s == 1 for s in self.row_sums().values()) and all(
            0 <= p <= 1 for p in self._entries.values()
        )

    def prob(self, event: Mapping[str, str], given: Mapping[str, str] | None = None) -> Fraction | None:
        """``p(event | given)``, or ``None`` when the conditioning event has probability 0.

        ``given`` must fix every conditioning variable of the table; use
        :meth:`joint` first to condition on fewer.
        """
        given = dict(given or {})
        missing = self.given - set(given)
        if missing:
            raise StructuralError(
                f"conditional needs values for conditioning variables {sorted(missing)}"
            )
        if not self.is_defined(given):
            return None
        den = self.mass(given)
        if den == 0:
            return None
        clash = {k for k in event if k in given and event[k] != given[k]}
        if clash:
            return Fraction(0)
        return self.mass({**given, **event}) / den

    def joint(self, settings: Mapping[str, Mapping[str, Any]] | None = None) -> "ProbTable":
        """Turn conditioners into ordinary variables by giving them a distribution.

        ``settings`` maps each conditioning variable to a distribution over its
        labels; variables not mentioned are uniform. Conditioners are taken to
        be mutually independent.
        """
        if not self.given:
            return self
        if self.partial:
            raise StructuralError("cannot form a joint from a partially defined table")
        weights: dict[str, dict[str, Fraction]] = {}
        for name in self.given:
            labels = self.alphabet(name)
            dist = (settings or {}).get(name)
            if dist is None:
                weights[name] = {lab: Fraction(1, len(labels)) for lab in labels}
            else:
                w = {lab: to_fraction(dist.get(lab, 0)) for lab in labels}
                if sum(w.values()) != 1 or any(v < 0 for v in w.values()):
                    raise StructuralError(f"settings distribution for {name!r} is not normalized")
                weights[name] = w
        entries = {}
        for assignment, p in self.items():
            w = p
            for name in self.given:
                w *= weights[name][assignment[name]]
            entries[tuple(assignment[n] for n in self._names)] = w
        return ProbTable(self._vars, entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProbTable):
            return NotImplemented
        return (
            self._vars == other._vars
            and self.given == other.given
            and self._entries == other._entries
        )

    def __hash__(self) -> int:
        return hash((self._vars, self.given, frozenset(self._entries.items())))

    def __repr__(self) -> str:
        cond = ",".join(n for n in self._names if n in self.given)
        head = ",".join(self.outcomes)
        return f"ProbTable(p({head}|{cond}), {len(self._entries)} cells)"


def _check_names(table: ProbTable, names: Iterable[str]) -> None:
    for name in names:
        if name not in table.names:
            raise StructuralError(f"unknown variable {name!r}")


def marginalize(table: ProbTable, keep: Iterable[str]) -> ProbTable:
    """Sum out every non-conditioning variable not in ``keep``."""
    keep = set(keep)
    _check_names(table, keep)
    if keep & table.given:
        raise StructuralError(f"cannot keep conditioning variables {sorted(keep & table.given)}")
    kept = [(n, labels) for n, labels in table.variables if n in keep or n in table.given]
    names = [n for n, _ in kept]
    entries: dict[tuple[str, ...], Fraction] = {}
    for assignment, p in table.items():
        key = tuple(assignment[n] for n in names)
        entries[key] = entries.get(key, Fraction(0)) + p
    return ProbTable(kept, entries, table.given, partial=table.partial)


def conditional(table: ProbTable, targets: Iterable[str], given: Iterable[str]) -> ProbTable:
    """``p(targets | given)`` as a partial table; rows of probability zero are left undefined.

    ``given`` must contain every conditioning variable of ``table``.
    """
    targets = list(targets)
    given = set(given)
    _check_names(table, targets)
    _check_names(table, given)
    if set(targets) & given:
        raise StructuralError("targets and conditioners overlap")
    if not table.given <= given:
        raise StructuralError(
            f"conditioning set must include {sorted(table.given)}; use ProbTable.joint first"
        )
    gnames = [n for n in table.names if n in given]
    tnames = [n for n in table.names if n in targets]
    num: dict[tuple, Fraction] = {}
    den: dict[tuple, Fraction] = {}
    for assignment, p in table.items():
        g = tuple(assignment[n] for n in gnames)
        t = tuple(assignment[n] for n in tnames)
        num[g + t] = num.get(g + t, Fraction(0)) + p
        den[g] = den.get(g, Fraction(0)) + p
    entries = {}
    for key, p in num.items():
        d = den[key[: len(gnames)]]
        if d != 0:
            entries[key] = p / d
    variables = [(n, table.alphabet(n)) for n in gnames + tnames]
    return ProbTable(variables, entries, gnames, sparse=True, partial=True)


def condition(table: ProbTable, on: Mapping[str, str]) -> ProbTable:
    """Fix the variables in ``on`` and renormalize what remains.

    Conditioning variables in ``on`` are simply sliced. Raises
    :class:`ZeroConditioning` if the event has probability zero in any
    remaining conditioning row.
    """
    on = dict(on)
    _check_names(table, on)
    for name, label in on.items():
        if label not in table.alphabet(name):
            raise StructuralError(f"label {label!r} not in alphabet of {name!r}")
    if not on:
        return table
    new_given = table.given | set(on)
    cond = conditional(table, [n for n in table.names if n not in new_given], new_given)
    rest_given = [n for n in table.names if n in table.given and n not in on]
    variables = [(n, labels) for n, labels in cond.variables if n not in on]
    names = [n for n, _ in variables]
    entries = {}
    for row in table.assignments(rest_given):
        full_row = {**row, **on}
        if not cond.is_defined(full_row):
            raise ZeroConditioning(full_row)
    for assignment, p in cond.items():
        if all(assignment[n] == v for n, v in on.items()):
            entries[tuple(assignment[n] for n in names)] = p
    return ProbTable(variables, entries, rest_given)


def bayes_invert(
    p_a_given_lx: ProbTable,
    p_l_given_x: ProbTable,
    p_a_given_x: ProbTable,
    *,
    skip_zero: bool = False,
) -> ProbTable:
    """Bayes' rule: ``p(l|a,x) = p(a|l,x) p(l|x) / p(a|x)``.

    The variable roles are read off the tables: the outcomes of ``p_a_given_x``
    are the evidence ``a``, the outcomes of ``p_l_given_x`` are the hypothesis
    ``l``, and the conditioners of ``p_a_given_x`` are the context ``x``.
    Where ``p(l|x) = 0`` the result is 0 even if ``p(a|l,x)`` is undefined.

    Rows with ``p(a|x) = 0`` raise :class:`ZeroConditioning`, or are left
    undefined when ``skip_zero`` is set.
    """
    a_names = list(p_a_given_x.outcomes)
    l_names = list(p_l_given_x.outcomes)
    x_names = sorted(p_a_given_x.given, key=p_a_given_x.names.index)
    if set(p_l_given_x.given) != set(x_names):
        raise StructuralError("p(l|x) and p(a|x) must share the context variables")
    if set(p_a_given_lx.given) != set(x_names) | set(l_names) or set(p_a_given_lx.outcomes) != set(a_names):
        raise StructuralError("p(a|l,x) must have outcomes a and conditioners l, x")
    for name in a_names:
        if p_a_given_lx.alphabet(name) != p_a_given_x.alphabet(name):
            raise StructuralError(f"alphabet mismatch for {name!r}")
    for name in l_names:
        if p_a_given_lx.alphabet(name) != p_l_given_x.alphabet(name):
            raise StructuralError(f"alphabet mismatch for {name!r}")

    variables = [(n, p_a_given_x.alphabet(n)) for n in x_names + a_names] + [
        (n, p_l_given_x.alphabet(n)) for n in l_names
    ]
    entries = {}
    for xa in itertools.product(*(p_a_given_x.alphabet(n) for n in x_names + a_names)):
        ctx = dict(zip(x_names + a_names, xa))
        xs = {n: ctx[n] for n in x_names}
        evidence = p_a_given_x[ctx] if p_a_given_x.is_defined(xs) else Fraction(0)
        if evidence == 0:
            if skip_zero:
                continue
            raise ZeroConditioning(ctx)
        for lv in itertools.product(*(p_l_given_x.alphabet(n) for n in l_names)):
            ls = dict(zip(l_names, lv))
            prior = p_l_given_x[{**xs, **ls}] if p_l_given_x.is_defined(xs) else Fraction(0)
            if prior == 0:
                value = Fraction(0)
            else:
                value = p_a_given_lx[{**ctx, **ls}] * prior / evidence
            entries[xa + lv] = value
    return ProbTable(variables, entries, x_names + a_names, partial=skip_zero)


@dataclass(frozen=True)
class IndependenceVerdict:
    independent: bool
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.independent


def check_independence(
    table: ProbTable,
    A: Iterable[str],
    B: Iterable[str],
    given: Iterable[str] = (),
    settings: Mapping[str, Mapping[str, Any]] | None = None,
) -> IndependenceVerdict:
    """Exact test of ``A ⫫ B | given``.

    Conditioning variables of ``table`` get a distribution from ``settings``
    (uniform by default) so that they can appear in ``A``, ``B`` or
    ``given``. Any full-support choice gives the same verdict for
    statements about conditioners. Rows with ``p(given) = 0`` are skipped.
    The witness records ``p(a,b|c)`` as lhs and ``p(a|c)p(b|c)`` as rhs.
    """
    A, B, C = list(A), list(B), list(given)
    sets = [set(A), set(B), set(C)]
    for s in sets:
        _check_names(table, s)
    if sets[0] & sets[1] or sets[0] & sets[2] or sets[1] & sets[2]:
        raise StructuralError("A, B and the conditioning set must be disjoint")
    if not A or not B:
        return IndependenceVerdict(True)
    joint = table.joint(settings)
    AB = A + B
    cab: dict[tuple, Fraction] = {}
    for assignment, p in joint.items():
        key = tuple(assignment[n] for n in C + AB)
        cab[key] = cab.get(key, Fraction(0)) + p
    nc, na = len(C), len(A)
    pc: dict[tuple, Fraction] = {}
    pca: dict[tuple, Fraction] = {}
    pcb: dict[tuple, Fraction] = {}
    for key, p in cab.items():
        c, a, b = key[:nc], key[nc : nc + na], key[nc + na :]
        pc[c] = pc.get(c, Fraction(0)) + p
        pca[c + a] = pca.get(c + a, Fraction(0)) + p
        pcb[c + b] = pcb.get(c + b, Fraction(0)) + p
    alph = lambda names: itertools.product(*(table.alphabet(n) for n in names))  # noqa: E731
    for c in alph(C):
        total = pc.get(c, Fraction(0))
        if total == 0:
            continue
        for a in alph(A):
            for b in alph(B):
                lhs = cab.get(c + a + b, Fraction(0)) / total
                rhs = (pca.get(c + a, Fraction(0)) / total) * (pcb.get(c + b, Fraction(0)) / total)
                if lhs != rhs:
                    assignment = {**dict(zip(C, c)), **dict(zip(A, a)), **dict(zip(B, b))}
                    return IndependenceVerdict(False, Witness(assignment, lhs, rhs))
    return IndependenceVerdict(True)


@dataclass(frozen=True)
class InvarianceVerdict:
    """Outcome of :func:`check_invariance`: ``"holds"``, ``"fails"`` or ``"vacuous"``."""

    status: str
    witness: Witness | None = None
    compared: int = 0

    @property
    def holds(self) -> bool:
        return self.status != "fails"


def check_invariance(
    table: ProbTable,
    targets: Sequence[str],
    over: Sequence[str],
    given: Sequence[str] = (),
) -> InvarianceVerdict:
    """Check ``p(targets | over, given) = p(targets | given)``.

    Equivalently: for each assignment of ``given``, the conditional is the
    same at every value of ``over`` where it is defined. Contexts of
    probability zero are skipped; the verdict is ``"vacuous"`` when no
    context is defined at all. On failure the witness compares the first
    defined context (lhs) against the first disagreeing one (rhs).
    """
    targets, over, given = list(targets), list(over), list(given)
    cond = conditional(table, targets, over + given)
    compared = 0
    for g in table.assignments(given):
        for t in table.assignments(targets):
            first: tuple[Assignment, Fraction] | None = None
            for o in table.assignments(over):
                row = {**g, **o}
                if not cond.is_defined(row):
                    continue
                value = cond[{**row, **t}]
                compared += 1
                if first is None:
                    first = (o, value)
                elif value != first[1]:
                    witness = Witness(
                        {**g, **t},
                        first[1],
                        value,
                        {"lhs_context": dict(first[0]), "rhs_context": dict(o)},
                    )
                    return InvarianceVerdict("fails", witness, compared)
    return InvarianceVerdict("holds" if compared else "vacuous", None, compared)
