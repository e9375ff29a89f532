from __future__ import annotations

import json
from fractions import Fraction

import pytest

from ptmverify import cli, fixtures
from ptmverify.modelfile import dump, load
from ptmverify.models import OnticModel, OperationalModel


@pytest.fixture
def files(tmp_path):
    paths = {}
    for fid in ("maudlin", "singlet-stats", "deterministic-local"):
        paths[fid] = str(tmp_path / f"{fid}.json")
        dump(fixtures.build(fid), paths[fid], fid)
    signalling = OperationalModel.from_function(
        ["0", "1"], ["y"], ["0", "1"], ["0", "1"], lambda x, y, a, b: Fraction(1, 2) if b == x else 0
    )
    paths["signalling"] = str(tmp_path / "signalling.json")
    dump(signalling, paths["signalling"])
    ternary = OperationalModel.from_function(["x"], ["y"], ["0", "1", "2"], ["0", "1"], lambda x, y, a, b: Fraction(1, 6))
    paths["ternary"] = str(tmp_path / "ternary.json")
    dump(ternary, paths["ternary"])
    paths["broken"] = str(tmp_path / "broken.json")
    (tmp_path / "broken.json").write_text("{not json")
    return paths


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCheck:
    def test_maudlin(self, capsys, files):
        code, out, _ = run(capsys, "check", files["maudlin"])
        assert code == 0
        assert out.count("PASS") >= 5 and "FAIL" not in out

    def test_json(self, capsys, files):
        code, out, _ = run(capsys, "check", files["maudlin"], "--format", "json")
        d = json.loads(out)
        assert all(v["passed"] for v in d["conditions"].values())

    def test_env_default_format(self, capsys, files, monkeypatch):
        monkeypatch.setenv("PTMVERIFY_FORMAT", "json")
        _, out, _ = run(capsys, "check", files["maudlin"])
        assert json.loads(out)["command"] == "check"

    def test_require_failure(self, capsys, files):
        code, out, _ = run(capsys, "check", files["singlet-stats"], "--require", "LambdaMediation")
        assert code == 1 and "required conditions failed" in out

    def test_unknown_condition(self, capsys, files):
        code, _, err = run(capsys, "check", files["maudlin"], "--require", "locality")
        assert code == 2 and "unknown condition" in err

    def test_parse_error(self, capsys, files):
        code, _, err = run(capsys, "check", files["broken"])
        assert code == 2 and "line 1" in err


class TestReverse:
    def test_operational_twice_gives_original(self, capsys, files, tmp_path):
        once, twice = str(tmp_path / "r1.json"), str(tmp_path / "r2.json")
        assert run(capsys, "reverse", files["singlet-stats"], "-o", once)[0] == 0
        assert run(capsys, "reverse", once, "-o", twice)[0] == 0
        assert load(twice) == load(files["singlet-stats"])

    def test_ontological_twice_gives_original(self, capsys, files, tmp_path):
        once, twice = str(tmp_path / "r1.json"), str(tmp_path / "r2.json")
        run(capsys, "reverse", files["maudlin"], "--ontological", "-o", once)
        run(capsys, "reverse", once, "--ontological", "-o", twice)
        assert isinstance(load(twice), OnticModel)
        assert load(twice) == load(files["maudlin"])

    def test_signalling_exit_3(self, capsys, files):
        code, _, err = run(capsys, "reverse", files["signalling"])
        assert code == 3 and "SignallingRequired" in err

    def test_ontological_needs_ontic(self, capsys, files):
        assert run(capsys, "reverse", files["singlet-stats"], "--ontological")[0] == 2


class TestAudit:
    def test_maudlin(self, capsys, files):
        code, out, _ = run(capsys, "audit", files["maudlin"])
        assert code == 0
        assert "Eq. 16: FAILS (witness λ=(0,up): p=1/2 at x=0, p=0 at x=30)" in out.splitlines()
        assert "Eq. 17: HOLDS" in out and "Eq. 18: HOLDS" in out

    def test_operational_rejected(self, capsys, files):
        assert run(capsys, "audit", files["singlet-stats"])[0] == 2


class TestBell:
    def test_chsh(self, capsys, files):
        code, out, _ = run(capsys, "bell", files["maudlin"], "--inequality", "chsh", "--format", "json")
        d = json.loads(out)
        assert code == 0 and d["inequality"]["lhs"] == "5/2" and d["local_bound"] == "2" and d["violated"]

    def test_wigner_explicit_pairs(self, capsys, files):
        code, out, _ = run(
            capsys, "bell", files["singlet-stats"], "--inequality", "wigner",
            "--pair", "0,-30", "--pair", "30,0", "--pair", "30,-30",
        )
        assert code == 0 and "1/2 < 3/4: VIOLATED" in out

    def test_local_model_not_violated(self, capsys, files):
        _, out, _ = run(capsys, "bell", files["deterministic-local"], "--format", "json")
        assert json.loads(out)["violated"] is False

    def test_non_binary_exit_4(self, capsys, files):
        code, _, err = run(capsys, "bell", files["ternary"])
        assert code == 4 and "UnsupportedShape" in err

    def test_wrong_pair_count(self, capsys, files):
        assert run(capsys, "bell", files["maudlin"], "--inequality", "wigner", "--pair", "0,0")[0] == 2


class TestSample:
    def test_deterministic_and_within_three_sigma(self, capsys, files):
        args = ("sample", files["maudlin"], "-n", "20000", "--seed", "3", "--format", "json")
        first = run(capsys, *args)[1]
        second = run(capsys, *args)[1]
        assert first == second
        d = json.loads(first)
        assert d["all_within_3_sigma"]
        assert d["cells"]["0,0"]["empirical"] == "1"

    def test_settings_file(self, capsys, files, tmp_path):
        s = tmp_path / "settings.json"
        s.write_text('{"x": {"0": "1", "30": "0"}}')
        d = json.loads(run(capsys, "sample", files["maudlin"], "-n", "500", "--settings-dist", str(s), "--format", "json")[1])
        assert d["cells"]["30,0"]["runs"] == 0

    @pytest.mark.parametrize("n", ["0", "-5"])
    def test_bad_n(self, capsys, files, n):
        assert run(capsys, "sample", files["maudlin"], "-n", n)[0] == 2


class TestExportAndDemo:
    def test_export_round_trip(self, capsys, tmp_path):
        path = str(tmp_path / "m.json")
        assert run(capsys, "export", "maudlin-reverse", "-o", path)[0] == 0
        assert load(path) == fixtures.maudlin_reverse().reverse

    def test_export_unknown(self, capsys):
        assert run(capsys, "export", "nope")[0] == 2

    def test_demo_passes(self, capsys, tmp_path):
        code, out, _ = run(capsys, "demo", "--out-dir", str(tmp_path))
        assert code == 0
        assert "five conditions: PASS" in out and "Eq. 16: FAILS" in out
        assert (tmp_path / "maudlin.json").exists()

    def test_demo_json_is_deterministic(self, capsys, tmp_path):
        a = run(capsys, "demo", "--format", "json", "--out-dir", str(tmp_path))[1]
        b = run(capsys, "demo", "--format", "json", "--out-dir", str(tmp_path))[1]
        assert a == b

    def test_demo_fails_on_corrupted_fixture(self, capsys, tmp_path, monkeypatch):
        # uncorrelated stand-in over the same ontic labels: nothing to violate
        def flat():
            return OnticModel.from_function(
                fixtures.PREP_ANGLES, fixtures.MEAS_ANGLES, fixtures.OUTCOMES, fixtures.OUTCOMES,
                fixtures.MAUDLIN_LAMBDA, lambda x, y, a, b, l: Fraction(1, 16),
            )

        monkeypatch.setattr(fixtures, "maudlin_model", flat)
        code, out, _ = run(capsys, "demo", "--out-dir", str(tmp_path))
        assert code == 1
        assert "inequalities: NOT VIOLATED" in out
