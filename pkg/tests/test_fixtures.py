from __future__ import annotations

from fractions import Fraction

import pytest

from ptmverify import fixtures
from ptmverify.conditions import check_conditions
from ptmverify.models import OnticModel, OperationalModel, to_operational, validate
from ptmverify.prob import StructuralError

F = Fraction


class TestMaudlin:
    def test_lambda_space(self):
        assert fixtures.MAUDLIN_LAMBDA == ("(0,up)", "(0,down)", "(30,up)", "(30,down)")

    def test_state_records_setting_and_output(self):
        m = fixtures.maudlin_model()
        for (s, p) in m.joint.items():
            if p:
                assert s["lambda"] == fixtures.lam(s["x"], s["a"])

    @pytest.mark.parametrize(
        "y, lam, up",
        [("0", "(0,up)", 0), ("0", "(0,down)", 1), ("0", "(30,up)", F(1, 4)), ("-30", "(30,up)", F(3, 4)), ("-30", "(0,down)", F(3, 4))],
    )
    def test_measurement_rule(self, y, lam, up):
        assert fixtures.p_b_given_y_lambda("up", y, lam) == up
        assert fixtures.p_b_given_y_lambda("down", y, lam) == 1 - up

    def test_reverse_fixture_is_relabelled(self):
        pair = fixtures.maudlin_reverse()
        assert pair.reverse.lambda_space == ("(0,up)", "(0,down)", "(-30,up)", "(-30,down)")
        assert pair.reverse.prep_settings == fixtures.MEAS_ANGLES
        assert validate(pair.reverse).ok

    def test_singlet_reference_matches_maudlin(self):
        assert to_operational(fixtures.maudlin_model()) == fixtures.singlet_stats()


class TestDeterministicLocal:
    def test_default_is_valid_and_passes_conditions(self):
        m = fixtures.default_deterministic_local()
        assert validate(m).ok
        assert check_conditions(m).all_passed

    def test_callable_rules(self):
        m = fixtures.deterministic_local(lambda x, l: l, lambda y, l: l, {"up": "1/2", "down": "1/2"})
        assert m.p("up", "up", "up", "0", "0") == F(1, 2)

    def test_rho_must_normalize(self):
        with pytest.raises(StructuralError):
            fixtures.deterministic_local(lambda x, l: l, lambda y, l: l, {"up": "1/2", "down": "1/4"})

    def test_undefined_rule(self):
        with pytest.raises(StructuralError):
            fixtures.deterministic_local({}, lambda y, l: l, {"up": "1"})


class TestBuild:
    @pytest.mark.parametrize("fid", fixtures.FIXTURE_IDS)
    def test_every_id_builds(self, fid):
        assert fixtures.build(fid) is not None

    def test_kinds(self):
        assert isinstance(fixtures.build("maudlin"), OnticModel)
        assert isinstance(fixtures.build("singlet-stats"), OperationalModel)

    def test_unknown(self):
        with pytest.raises(KeyError):
            fixtures.build("nope")
