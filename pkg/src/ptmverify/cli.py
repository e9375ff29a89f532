"""Command-line entry point: ``ptmverify {check,reverse,audit,bell,sample,export,demo}``.

Exit codes: 0 success, 1 a ``--require``d condition or demo assertion
failed, 2 input error, 3 model signals where no-signalling is required,
4 unsupported model shape.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from collections import Counter
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from . import fixtures
from .audit import audit_lemma, explain_conflation, mediation_consequence_check
from .conditions import CONDITIONS, DISPLAY_NAMES, check_acyclic, check_conditions
from .inequalities import (
    UnsupportedShape,
    chsh,
    chsh_objectives,
    correlation_summary,
    default_chsh_settings,
    default_wigner_triple,
    local_bound_oracle,
    wigner_check,
    wigner_objective,
)
from .modelfile import ModelFileError, dumps, load, load_settings, loads, to_document
from .models import (
    OnticModel,
    OperationalModel,
    ValidationError,
    check_no_signalling,
    lift,
    sample_runs,
    to_operational,
    validate,
)
from .prob import StructuralError, format_fraction
from .timereverse import (
    ReversePair,
    SignallingRequired,
    canonical_ontological_reverse,
    find_ontological_reverse,
    is_operational_reverse,
    operational_reverse,
    verify_reverse_pair,
)

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_SIGNALLING, EXIT_SHAPE = 0, 1, 2, 3, 4


class CommandError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


class Report:
    """A command's structured result plus its text rendering."""

    def __init__(self, command: str, data: dict[str, Any], lines: list[str], code: int = EXIT_OK):
        self.command = command
        self.data = data
        self.lines = lines
        self.code = code

    def render(self, fmt: str) -> str:
        if fmt == "json":
            payload = {"command": self.command, "exit_code": self.code, **self.data}
            return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
        return "\n".join(self.lines) + "\n"


def _dec(value: Fraction, places: int = 6) -> str:
    """Decimal rendering computed from the exact value, without floats."""
    sign = "-" if value < 0 else ""
    value = abs(value)
    scaled = round(value * 10**places)
    whole, frac = divmod(scaled, 10**places)
    return f"{sign}{whole}.{str(frac).rjust(places, '0').rstrip('0') or '0'}"


def _q(value: Fraction) -> str:
    return f"{format_fraction(value)} ({_dec(value)})"


def _table(rows: Sequence[Sequence[str]], indent: str = "  ") -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return [indent + "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


def _load_model(path: str):
    try:
        return load(path)
    except ModelFileError as err:
        raise CommandError(EXIT_INPUT, f"error: {err}") from None


def _as_ontic(model) -> OnticModel:
    return model if isinstance(model, OnticModel) else lift(model)


def _verdict_word(passed: bool) -> str:
    return "PASS" if passed else "FAIL"


# -- check --------------------------------------------------------------------


def _condition_section(model: OnticModel) -> tuple[dict[str, Any], list[str], Any]:
    report = check_conditions(model)
    lines = []
    for key in CONDITIONS:
        v = report.verdicts[key]
        line = f"  {DISPLAY_NAMES[key]:<18} {_verdict_word(v.passed)}"
        if not v.passed:
            detail = v.as_dict().get("witness")
            line += f"  ({v.reason}; witness {json.dumps(detail, sort_keys=True, ensure_ascii=False)})"
        lines.append(line)
    return report.as_dict(), lines, report


def cmd_check(args) -> Report:
    required = []
    if args.require:
        required = [r.strip().lower() for r in args.require.split(",") if r.strip()]
        aliases = {DISPLAY_NAMES[k].lower(): k for k in CONDITIONS}
        required = [aliases.get(r, r) for r in required]
        unknown = [r for r in required if r not in CONDITIONS]
        if unknown:
            raise CommandError(EXIT_INPUT, f"error: unknown condition(s): {', '.join(unknown)}")
    raw = _load_model(args.model)
    model = _as_ontic(raw)
    lines = [f"model: {args.model} ({'ontic' if isinstance(raw, OnticModel) else 'operational, single ontic state'})"]
    val = validate(model)
    lines.append("validation: " + ("ok" if val.ok else "; ".join(val.problems)))
    data: dict[str, Any] = {"model": args.model, "validation": val.problems}
    cond_data, cond_lines, report = _condition_section(model)
    data["conditions"] = cond_data
    lines.append("conditions:")
    lines += cond_lines
    if val.ok:
        sig = check_no_signalling(model)
        data["no_signalling"] = {"forward": sig.no_forward_signalling, "retro": sig.no_retro_signalling}
        lines.append(
            f"no-signalling: forward {_verdict_word(sig.no_forward_signalling)}, "
            f"retro {_verdict_word(sig.no_retro_signalling)}"
        )
    code = EXIT_OK
    if required:
        failed = [r for r in required if not report.verdicts[r].passed]
        data["required"] = required
        data["required_failed"] = failed
        if failed:
            code = EXIT_FAILED
            lines.append("required conditions failed: " + ", ".join(DISPLAY_NAMES[f] for f in failed))
    return Report("check", data, lines, code)


# -- reverse ------------------------------------------------------------------


def cmd_reverse(args) -> Report:
    model = _load_model(args.model)
    lines = []
    try:
        if args.ontological:
            if not isinstance(model, OnticModel):
                raise CommandError(EXIT_INPUT, "error: --ontological needs an ontic model file")
            pair = canonical_ontological_reverse(model)
            check = verify_reverse_pair(pair)
            reverse, f = pair.reverse, pair.f.as_dict()
            lines.append("ontological reverse (canonical construction, same ontic space)")
            lines.append("f: " + ", ".join(f"{k} -> {v}" for k, v in f.items()))
            lines.append(f"f is identity: {pair.f.is_identity()}")
        else:
            operational = to_operational(model) if isinstance(model, OnticModel) else model
            reverse = operational_reverse(operational)
            check = is_operational_reverse(operational, reverse)
            f = None
            lines.append("operational reverse")
    except SignallingRequired as err:
        raise CommandError(EXIT_SIGNALLING, f"error: SignallingRequired: {err}") from None
    except ValidationError as err:
        raise CommandError(EXIT_INPUT, f"error: {err}") from None
    lines.append(f"verification of the defining equality: {_verdict_word(check.passed)}")
    doc = to_document(reverse)
    if args.output:
        Path(args.output).write_text(dumps(reverse), encoding="utf-8")
        lines.append(f"written to {args.output}")
    else:
        lines.append(dumps(reverse).rstrip())
    data = {"model": args.model, "verified": check.passed, "reverse": doc}
    if f is not None:
        data["f"] = f
    return Report("reverse", data, lines, EXIT_OK if check.passed else EXIT_FAILED)


# -- audit --------------------------------------------------------------------

_STEP_NAMES = {"eq19": "Eq. 19", "eq20": "Eq. 20", "eq21": "Eq. 21", "eq16": "Eq. 16", "eq17": "Eq. 17", "eq18": "Eq. 18"}


def _fmt_ctx(ctx: dict[str, str]) -> str:
    return ", ".join(f"{'λ' if k == 'lambda' else k}={v}" for k, v in ctx.items())


def _audit_lines(report) -> list[str]:
    lines = []
    for step in report.steps:
        name = _STEP_NAMES.get(step.step_id, "")
        line = f"  ({step.label}) {name:<7} [{step.side:<8}] {step.statement:<46} {step.verdict.upper()}"
        w = step.witness
        if w is not None:
            if "lhs_context" in w.detail:
                line += (
                    f" (witness {_fmt_ctx(w.assignment)}: p={format_fraction(w.lhs)} at "
                    f"{_fmt_ctx(w.detail['lhs_context'])}, p={format_fraction(w.rhs)} at "
                    f"{_fmt_ctx(w.detail['rhs_context'])})"
                )
            else:
                line += f" (witness {_fmt_ctx(w.assignment)}: {format_fraction(w.lhs)} vs {format_fraction(w.rhs)})"
        lines.append(line)
    return lines


def _named_line(step) -> str:
    """One-line verdict; the witness shows only the settings that differ between its two contexts."""
    line = f"{_STEP_NAMES[step.step_id]}: {step.verdict.upper()}"
    w = step.witness
    if w is not None and "lhs_context" in w.detail:
        left, right = w.detail["lhs_context"], w.detail["rhs_context"]
        diff = [k for k in left if left[k] != right.get(k)]
        line += (
            f" (witness {_fmt_ctx(w.assignment)}: p={format_fraction(w.lhs)} at "
            f"{_fmt_ctx({k: left[k] for k in diff})}, p={format_fraction(w.rhs)} at "
            f"{_fmt_ctx({k: right[k] for k in diff})})"
        )
    return line


def _run_audit(pair: ReversePair) -> tuple[dict[str, Any], list[str], Any]:
    report = audit_lemma(pair)
    finding = explain_conflation(pair, report)
    lines = ["audit of the lemma's proof chain:"] + _audit_lines(report)
    lines.append(report.summary)
    lines += [_named_line(report.step(k)) for k in ("eq16", "eq17", "eq18")]
    lines.append("independence claims:")
    for key, value in finding.as_dict().items():
        if key != "finding":
            lines.append(f"  {key:<24} {value.upper()}")
    lines.append("finding: " + finding.text)
    return {"audit": report.as_dict(), "conflation": finding.as_dict()}, lines, report


def cmd_audit(args) -> Report:
    model = _load_model(args.model)
    if not isinstance(model, OnticModel):
        raise CommandError(EXIT_INPUT, "error: audit needs an ontic model file")
    try:
        pair = canonical_ontological_reverse(model)
    except SignallingRequired as err:
        raise CommandError(EXIT_SIGNALLING, f"error: SignallingRequired: {err}") from None
    except ValidationError as err:
        raise CommandError(EXIT_INPUT, f"error: {err}") from None
    data, lines, _ = _run_audit(pair)
    data["model"] = args.model
    return Report("audit", data, [f"model: {args.model} (canonical reverse, f = identity)"] + lines)


# -- bell ---------------------------------------------------------------------


def _parse_pair(text: str) -> tuple[str, str]:
    parts = text.split(",")
    if len(parts) != 2:
        raise CommandError(EXIT_INPUT, f"error: setting pair {text!r} must look like X,Y")
    return parts[0].strip(), parts[1].strip()


def _bell_section(model, inequality: str, args=None) -> tuple[dict[str, Any], list[str], Any]:
    operational = to_operational(model) if isinstance(model, OnticModel) else model
    agree_map = None
    if args is not None and args.agree:
        agree_map = dict(_parse_pair(p.replace("=", ",")) for p in args.agree.split(";"))
    summary = correlation_summary(operational, agree_map)
    X, Y = operational.prep_settings, operational.meas_settings
    rows = [["x", "y", "p_agree", "p_disagree", "E"]]
    for (x, y) in summary.pairs():
        rows.append([x, y, _q(summary.p_agree[(x, y)]), _q(summary.p_disagree[(x, y)]), _q(summary.correlator[(x, y)])])
    lines = ["correlations:"] + _table(rows)
    if inequality == "chsh":
        if args is not None and all(getattr(args, k) for k in ("x0", "x1", "y0", "y1")):
            x0, x1, y0, y1 = args.x0, args.x1, args.y0, args.y1
        else:
            x0, x1, y0, y1 = default_chsh_settings(operational)
        result = chsh(summary, x0, x1, y0, y1)
        bound = local_bound_oracle(X, Y, chsh_objectives(x0, x1, y0, y1))
        lines.append(f"CHSH: S = {_q(result.lhs)}, local bound {format_fraction(bound)} (enumerated)")
        violated = result.lhs > bound
        lines.append(f"  {'VIOLATED' if violated else 'not violated'}")
    else:
        if args is not None and args.pair:
            if len(args.pair) != 3:
                raise CommandError(EXIT_INPUT, "error: --pair must be given exactly three times")
            triple = tuple(_parse_pair(p) for p in args.pair)
        else:
            triple = default_wigner_triple(operational)
        result = wigner_check(summary, triple)
        anti = [(x, y) for x in X for y in Y if x == y]
        bound = local_bound_oracle(X, Y, wigner_objective(triple), anti)
        terms = " + ".join(f"p_agree({x},{y})" for x, y in triple[:2])
        lines.append(
            f"Wigner: {terms} = {_q(result.lhs)} vs p_agree({triple[2][0]},{triple[2][1]}) = {_q(result.rhs)}"
        )
        lines.append(
            f"  anticorrelated at equal settings: {result.notes['anticorrelated_at_equal_settings']}; "
            f"largest local violation (enumerated): {format_fraction(bound)}"
        )
        violated = result.violated
        lines.append(
            f"  {format_fraction(result.lhs)} {'<' if violated else '>='} {format_fraction(result.rhs)}: "
            f"{'VIOLATED' if violated else 'not violated'}"
        )
    data = {
        "summary": summary.as_dict(),
        "inequality": result.as_dict(),
        "local_bound": format_fraction(bound),
        "violated": violated,
    }
    return data, lines, result


def cmd_bell(args) -> Report:
    model = _load_model(args.model)
    try:
        data, lines, _ = _bell_section(model, args.inequality, args)
    except UnsupportedShape as err:
        raise CommandError(EXIT_SHAPE, f"error: UnsupportedShape: {err}") from None
    except (StructuralError, ValidationError) as err:
        raise CommandError(EXIT_INPUT, f"error: {err}") from None
    data["model"] = args.model
    return Report("bell", data, [f"model: {args.model}"] + lines)


# -- sample -------------------------------------------------------------------


def sample_section(model, n: int, seed: int, settings=None) -> tuple[dict[str, Any], list[str], bool]:
    """Empirical disagreement per setting pair against the exact value, with a 3-sigma flag.

    The flag is decided exactly: (k/n - p)^2 <= 9 p (1 - p) / n.
    """
    summary = correlation_summary(model)
    runs = sample_runs(model, n, seed, settings)
    totals = Counter((r.x, r.y) for r in runs)
    disagree = Counter((r.x, r.y) for r in runs if summary.agree_map[r.a] != r.b)
    rows = [["x", "y", "runs", "disagree", "empirical", "exact", "within 3σ"]]
    cells = {}
    all_ok = True
    for pair in summary.pairs():
        count, k = totals[pair], disagree[pair]
        p = summary.p_disagree[pair]
        if count:
            emp = Fraction(k, count)
            ok = (emp - p) ** 2 <= 9 * p * (1 - p) / count
        else:
            emp, ok = None, True
        all_ok &= ok
        cells[f"{pair[0]},{pair[1]}"] = {
            "runs": count,
            "disagree": k,
            "empirical": format_fraction(emp) if emp is not None else None,
            "exact": format_fraction(p),
            "within_3_sigma": ok,
        }
        rows.append([pair[0], pair[1], str(count), str(k), _dec(emp) if emp is not None else "-", _q(p), "yes" if ok else "NO"])
    lines = [f"{n} runs, seed {seed}:"] + _table(rows)
    return {"runs": n, "seed": seed, "cells": cells, "all_within_3_sigma": all_ok}, lines, all_ok


def cmd_sample(args) -> Report:
    if args.n <= 0:
        raise CommandError(EXIT_INPUT, "error: -n must be positive")
    model = _load_model(args.model)
    if not isinstance(model, OnticModel):
        raise CommandError(EXIT_INPUT, "error: sample needs an ontic model file")
    settings = None
    if args.settings_dist != "uniform":
        try:
            settings = load_settings(args.settings_dist)
        except ModelFileError as err:
            raise CommandError(EXIT_INPUT, f"error: {err}") from None
    try:
        data, lines, _ = sample_section(model, args.n, args.seed, settings)
    except UnsupportedShape as err:
        raise CommandError(EXIT_SHAPE, f"error: UnsupportedShape: {err}") from None
    except (StructuralError, ValidationError) as err:
        raise CommandError(EXIT_INPUT, f"error: {err}") from None
    data["model"] = args.model
    return Report("sample", data, [f"model: {args.model}"] + lines)


# -- export -------------------------------------------------------------------


def cmd_export(args) -> Report:
    try:
        obj = fixtures.build(args.fixture)
    except KeyError as err:
        raise CommandError(EXIT_INPUT, f"error: {err.args[0]}") from None
    if not isinstance(obj, (OnticModel, OperationalModel)):
        graph = {"nodes": list(obj.nodes), "edges": [list(e) for e in obj.edges], "inputs": sorted(obj.input_nodes)}
        text = json.dumps(graph, indent=2) + "\n"
    else:
        text = dumps(obj, args.fixture)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        return Report("export", {"fixture": args.fixture, "output": args.output}, [f"wrote {args.output}"])
    return Report("export", {"fixture": args.fixture, "document": json.loads(text)}, [text.rstrip()])


# -- demo ---------------------------------------------------------------------


def cmd_demo(args) -> Report:
    """Reproduce the counterexample end to end from serialized fixture files."""
    lines: list[str] = []
    data: dict[str, Any] = {}
    failures: list[str] = []

    def expect(ok: bool, what: str) -> bool:
        if not ok:
            failures.append(what)
        return ok

    out_dir = Path(args.out_dir) if args.out_dir else Path(tempfile.mkdtemp(prefix="ptmverify-demo-"))
    out_dir.mkdir(parents=True, exist_ok=True)
    built = {
        "maudlin": fixtures.maudlin_model(),
        "maudlin-reverse": fixtures.maudlin_reverse().reverse,
        "singlet-stats": fixtures.singlet_stats(),
        "deterministic-local": fixtures.default_deterministic_local(),
    }
    parsed = {}
    lines.append(f"fixtures serialized to {out_dir}:")
    for name, model in built.items():
        path = out_dir / f"{name}.json"
        path.write_text(dumps(model, name), encoding="utf-8")
        parsed[name] = loads(path.read_text(encoding="utf-8"), str(path))
        same = parsed[name] == model
        expect(same, f"round trip {name}")
        lines.append(f"  {name + '.json':<26} round trip {'exact' if same else 'MISMATCH'}")
    data["round_trip"] = {name: parsed[name] == built[name] for name in built}
    if not args.out_dir:
        data["fixtures_dir"] = None
    model, reverse_model = parsed["maudlin"], parsed["maudlin-reverse"]

    # [1] graphs and the five conditions
    g1, g2 = fixtures.figure_graph(1), fixtures.figure_graph(2)
    acyclic = check_acyclic(g1).passed and check_acyclic(g2).passed
    expect(acyclic, "figure graphs acyclic")
    lines.append(f"[1] causal graphs of both figures acyclic: {acyclic}")
    cond_data, cond_lines, cond_report = _condition_section(model)
    sig = check_no_signalling(to_operational(model))
    five = expect(cond_report.all_passed, "five conditions")
    expect(sig.ok, "no-signalling")
    lines.append("    conditions on maudlin.json:")
    lines += ["  " + s for s in cond_lines]
    lines.append(f"    no-signalling: {_verdict_word(sig.ok)}")
    data["conditions"] = cond_data

    # [2] reverses
    pair = canonical_ontological_reverse(model)
    canonical_ok = verify_reverse_pair(pair).passed and pair.f.is_identity()
    found = find_ontological_reverse(model, reverse_model)
    target_f = {k: v for k, v in fixtures.MAUDLIN_F.items()}
    has_target_f = any(f.as_dict() == target_f for f in found)
    expect(canonical_ok, "canonical reverse")
    expect(has_target_f, "relabelled reverse found by search")
    lines.append(f"[2] canonical reverse (f = identity) verifies: {canonical_ok}")
    lines.append(f"    search over all bijections against maudlin-reverse.json: {len(found)} solution(s)")
    for f in found:
        lines.append("      f: " + ", ".join(f"{k} -> {v}" for k, v in f.as_dict().items()))
    data["reverse"] = {"canonical_verified": canonical_ok, "bijections": [f.as_dict() for f in found]}

    # [3] inequalities
    wig_data, wig_lines, wig = _bell_section(model, "wigner")
    chsh_data, chsh_lines, ch = _bell_section(model, "chsh")
    violated = expect(
        wig_data["violated"] and chsh_data["violated"] and chsh_data["local_bound"] == "2",
        "inequality violation",
    )
    lines.append("[3] inequalities on the operational statistics:")
    lines += ["    " + s for s in wig_lines] + ["    " + s for s in chsh_lines[-2:]]
    data["wigner"], data["chsh"] = wig_data, chsh_data

    # [4] audit of the lemma on the relabelled pair
    relabelled_pair = ReversePair(model, reverse_model, next(f for f in found if f.as_dict() == target_f)) if has_target_f else None
    eq16_fails = False
    if relabelled_pair is not None:
        audit_data, audit_lines, report = _run_audit(relabelled_pair)
        lines.append("[4] " + audit_lines[0])
        lines += ["  " + s for s in audit_lines[1:]]
        data.update(audit_data)
        eq16 = report.step("eq16")
        eq16_fails = eq16.verdict == "fails" and eq16.witness is not None and eq16.witness.assignment.get("lambda") == "(0,up)"
        algebra = all(report.step(s).holds for s in ("eq19", "eq20", "eq21", "lambda_indep_y", "eq17", "eq18"))
        expect(eq16_fails, "Eq. 16 fails")
        expect(algebra, "Eqs. 19-21, p(λ|x,y) = p(λ|x), Eqs. 17-18 hold")

    # [5] consequence of Eq. 16
    consequence = [mediation_consequence_check(model), mediation_consequence_check(model, {"x": {"0": "3/4", "30": "1/4"}})]
    no_corr = all(
        c.b_independent and not c.violation_survives and set(c.summary.p_agree.values()) == {Fraction(1, 2)}
        for c in consequence
    )
    expect(no_corr, "forced p(λ) removes all correlation")
    lines.append(f"[5] forcing p(λ|a,x) = p(λ) leaves p_agree = 1/2 everywhere, no violation: {no_corr}")
    data["mediation_consequence"] = no_corr

    lines.append("summary:")
    lines.append(f"  five conditions: {'PASS' if five else 'FAIL'}")
    lines.append(f"  inequalities: {'VIOLATED' if violated else 'NOT VIOLATED'} (Wigner {format_fraction(wig.lhs)} < {format_fraction(wig.rhs)}, CHSH S = {format_fraction(ch.lhs)} > 2)")
    lines.append(f"  Eq. 16: {'FAILS' if eq16_fails else 'DOES NOT FAIL'}")
    if failures:
        lines.append("demo assertions failed: " + ", ".join(failures))
    data["failures"] = failures
    data["summary"] = {"five_conditions_pass": five, "inequalities_violated": violated, "eq16_fails": eq16_fails}
    return Report("demo", data, lines, EXIT_FAILED if failures else EXIT_OK)


# -- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    default_format = os.environ.get("PTMVERIFY_FORMAT", "text")
    if default_format not in ("text", "json"):
        default_format = "text"
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=default_format)

    parser = argparse.ArgumentParser(prog="ptmverify", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate and run the five condition checks")
    p.add_argument("model")
    p.add_argument("--require", help="comma-separated conditions whose failure makes the exit code nonzero")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reverse", parents=[common], help="construct and verify a time reverse")
    p.add_argument("model")
    p.add_argument("--ontological", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reverse)

    p = sub.add_parser("audit", parents=[common], help="audit the lemma's proof steps on the canonical reverse pair")
    p.add_argument("model")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bell", parents=[common], help="evaluate a Bell-type inequality")
    p.add_argument("model")
    p.add_argument("--inequality", choices=("wigner", "chsh"), default="chsh")
    p.add_argument("--x0")
    p.add_argument("--x1")
    p.add_argument("--y0")
    p.add_argument("--y1")
    p.add_argument("--pair", action="append", help="X,Y setting pair for the Wigner form (three times)")
    p.add_argument("--agree", help="agreement pairing, e.g. 'up=up;down=down'")
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("sample", parents=[common], help="Monte Carlo runs against the exact statistics")
    p.add_argument("model")
    p.add_argument("-n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--settings-dist", default="uniform", help="'uniform' or a JSON settings file")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("export", parents=[common], help="write a built-in fixture as a model file")
    p.add_argument("fixture", help=", ".join(fixtures.FIXTURE_IDS))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("demo", parents=[common], help="reproduce the counterexample end to end")
    p.add_argument("--out-dir", help="where to write the fixture files (default: a temporary directory)")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: Sequence[str] | None = None, out: Callable[[str], Any] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    write = out or sys.stdout.write
    try:
        report = args.func(args)
    except CommandError as err:
        print(err, file=sys.stderr)
        return err.code
    write(report.render(args.format))
    return report.code


if __name__ == "__main__":
    sys.exit(main())
