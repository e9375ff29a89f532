from __future__ import annotations

import random
from fractions import Fraction

import pytest

from conftest import random_distribution
from ptmverify.prob import (
    ProbTable,
    StructuralError,
    ZeroConditioning,
    bayes_invert,
    check_independence,
    check_invariance,
    condition,
    conditional,
    format_fraction,
    marginalize,
    to_fraction,
)

F = Fraction


def coin_pair(p_same: Fraction) -> ProbTable:
    """Two binary variables that agree with probability ``p_same``."""
    return ProbTable(
        [("A", ["0", "1"]), ("B", ["0", "1"])],
        {("0", "0"): p_same / 2, ("1", "1"): p_same / 2, ("0", "1"): (1 - p_same) / 2, ("1", "0"): (1 - p_same) / 2},
    )


class TestToFraction:
    @pytest.mark.parametrize(
        "text, expected",
        [("1/4", F(1, 4)), ("0.25", F(1, 4)), (".25", F(1, 4)), ("3", F(3)), (" 2 / 6 ", F(1, 3)), ("-0.5", F(-1, 2))],
    )
    def test_parses_exactly(self, text, expected):
        assert to_fraction(text) == expected

    def test_ints_and_fractions_pass_through(self):
        assert to_fraction(2) == 2
        assert to_fraction(F(3, 7)) == F(3, 7)

    @pytest.mark.parametrize("bad", [0.25, True, None, "abc", "1/0", "1e-3"])
    def test_rejects(self, bad):
        with pytest.raises((TypeError, ValueError)):
            to_fraction(bad)

    def test_decimal_limit(self):
        assert to_fraction("0.123456", max_decimals=6) == F(123456, 10**6)
        with pytest.raises(ValueError):
            to_fraction("0.1234567", max_decimals=6)

    def test_format(self):
        assert format_fraction(F(4, 2)) == "2"
        assert format_fraction(F(-3, 6)) == "-1/2"


class TestProbTable:
    def test_dense_table_requires_every_entry(self):
        with pytest.raises(StructuralError, match="missing entry"):
            ProbTable([("A", ["0", "1"])], {("0",): 1})

    def test_sparse_fills_zero(self):
        t = ProbTable([("A", ["0", "1"])], {("0",): 1}, sparse=True)
        assert t[{"A": "1"}] == 0

    def test_duplicate_names_and_labels(self):
        with pytest.raises(StructuralError):
            ProbTable([("A", ["0"]), ("A", ["1"])], {}, sparse=True)
        with pytest.raises(StructuralError):
            ProbTable([("A", ["0", "0"])], {}, sparse=True)

    def test_unknown_conditioner(self):
        with pytest.raises(StructuralError):
            ProbTable([("A", ["0"])], {("0",): 1}, given=["Z"])

    def test_normalization_reported_not_enforced(self):
        t = ProbTable([("X", ["p", "q"]), ("A", ["0", "1"])], {("p", "0"): F(1, 2), ("p", "1"): F(1, 2), ("q", "0"): F(1, 3), ("q", "1"): 0}, given=["X"])
        assert t.row_sums() == {("p",): 1, ("q",): F(1, 3)}
        assert not t.is_normalized()

    def test_partial_rows_raise_on_access(self):
        cond = conditional(
            ProbTable([("C", ["0", "1"]), ("A", ["0", "1"])], {("0", "0"): 1, ("0", "1"): 0, ("1", "0"): 0, ("1", "1"): 0}),
            ["A"], ["C"],
        )
        assert cond.is_defined({"C": "0"})
        assert not cond.is_defined({"C": "1"})
        with pytest.raises(ZeroConditioning):
            cond[{"C": "1", "A": "0"}]

    def test_prob_and_mass(self):
        t = coin_pair(F(3, 4))
        assert t.mass({"A": "0"}) == F(1, 2)
        assert t.prob({"B": "0"}, {"A": "0"}) == F(3, 4)

    def test_joint_with_uniform_settings(self):
        t = ProbTable([("X", ["p", "q"]), ("A", ["0", "1"])], {("p", "0"): 1, ("p", "1"): 0, ("q", "0"): 0, ("q", "1"): 1}, given=["X"])
        j = t.joint()
        assert j.given == frozenset()
        assert j[{"X": "p", "A": "0"}] == F(1, 2)
        assert t.joint({"X": {"p": "1/4", "q": "3/4"}})[{"X": "q", "A": "1"}] == F(3, 4)


class TestOperations:
    def test_marginalize_keeps_conditioners(self):
        t = ProbTable([("X", ["p"]), ("A", ["0", "1"]), ("B", ["0", "1"])],
                      {("p", "0", "0"): F(1, 4), ("p", "0", "1"): F(1, 4), ("p", "1", "0"): F(1, 2), ("p", "1", "1"): 0}, given=["X"])
        m = marginalize(t, ["A"])
        assert m.names == ("X", "A")
        assert m[{"X": "p", "A": "1"}] == F(1, 2)
        with pytest.raises(StructuralError):
            marginalize(t, ["X"])

    def test_conditional_needs_table_conditioners(self):
        t = ProbTable([("X", ["p"]), ("A", ["0"])], {("p", "0"): 1}, given=["X"])
        with pytest.raises(StructuralError, match="conditioning set"):
            conditional(t, ["A"], [])

    def test_condition_renormalizes(self):
        c = condition(coin_pair(F(3, 4)), {"A": "1"})
        assert c[{"B": "1"}] == F(3, 4)
        assert c.is_normalized()

    def test_condition_on_impossible_event(self):
        t = ProbTable([("A", ["0", "1"])], {("0",): 1, ("1",): 0})
        with pytest.raises(ZeroConditioning):
            condition(t, {"A": "1"})

    def test_bayes_matches_direct_computation(self, rng):
        for _ in range(30):
            w = random_distribution(rng, 8, zeros=False)
            joint = ProbTable(
                [("X", ["p", "q"]), ("L", ["l0", "l1"]), ("A", ["0", "1"])],
                dict(zip([(x, l, a) for x in "pq" for l in ("l0", "l1") for a in "01"], w)),
            )
            direct = conditional(joint, ["L"], ["A", "X"])
            inverted = bayes_invert(conditional(joint, ["A"], ["L", "X"]), conditional(joint, ["L"], ["X"]), conditional(joint, ["A"], ["X"]))
            for x in "pq":
                for a in "01":
                    for l in ("l0", "l1"):
                        assert inverted[{"X": x, "A": a, "L": l}] == direct[{"X": x, "A": a, "L": l}]

    def test_bayes_zero_evidence(self):
        joint = ProbTable([("X", ["p"]), ("L", ["l"]), ("A", ["0", "1"])], {("p", "l", "0"): 1, ("p", "l", "1"): 0})
        args = (conditional(joint, ["A"], ["L", "X"]), conditional(joint, ["L"], ["X"]), conditional(joint, ["A"], ["X"]))
        with pytest.raises(ZeroConditioning):
            bayes_invert(*args)
        out = bayes_invert(*args, skip_zero=True)
        assert out[{"X": "p", "A": "0", "L": "l"}] == 1


class TestIndependence:
    def test_product_is_independent(self):
        assert check_independence(coin_pair(F(1, 2)), ["A"], ["B"]).independent

    def test_correlated_witness(self):
        v = check_independence(coin_pair(F(1)), ["A"], ["B"])
        assert not v.independent
        assert v.witness.assignment == {"A": "0", "B": "0"}
        assert (v.witness.lhs, v.witness.rhs) == (F(1, 2), F(1, 4))

    def test_overlapping_sets_rejected(self):
        with pytest.raises(StructuralError):
            check_independence(coin_pair(F(1)), ["A"], ["A"])

    def test_conditioner_independence_uses_settings_mixture(self):
        # A copies the setting X: dependent on X under any full-support mixture
        t = ProbTable([("X", ["0", "1"]), ("A", ["0", "1"])], {("0", "0"): 1, ("0", "1"): 0, ("1", "0"): 0, ("1", "1"): 1}, given=["X"])
        assert not check_independence(t, ["A"], ["X"]).independent
        assert not check_independence(t, ["A"], ["X"], settings={"X": {"0": "9/10", "1": "1/10"}}).independent

    def test_random_symmetry(self):
        rng = random.Random(3)
        for _ in range(100):
            w = random_distribution(rng, 8)
            t = ProbTable([("A", ["0", "1"]), ("B", ["0", "1"]), ("C", ["0", "1"])],
                          dict(zip([(a, b, c) for a in "01" for b in "01" for c in "01"], w)))
            assert check_independence(t, ["A"], ["B"], ["C"]).independent == check_independence(t, ["B"], ["A"], ["C"]).independent


class TestInvariance:
    def table(self, rows):
        return ProbTable([("X", ["0", "1"]), ("A", ["0", "1"])],
                         {(x, a): rows[x][int(a)] for x in "01" for a in "01"}, given=["X"])

    def test_holds(self):
        v = check_invariance(self.table({"0": (F(1, 3), F(2, 3)), "1": (F(1, 3), F(2, 3))}), ["A"], ["X"])
        assert v.status == "holds" and v.holds

    def test_fails_with_two_contexts(self):
        v = check_invariance(self.table({"0": (1, 0), "1": (0, 1)}), ["A"], ["X"])
        assert v.status == "fails"
        assert v.witness.detail["lhs_context"] == {"X": "0"}
        assert v.witness.detail["rhs_context"] == {"X": "1"}
        assert (v.witness.lhs, v.witness.rhs) == (1, 0)
