"""Command-line front end: load a workspace file, run one command, print a
text or JSON report with deterministic exit codes.

Exit codes: 0 all verdicts pass, 1 at least one mathematical verdict fails
(an obstruction or a violated identity is a finding, not a crash), 2 input
or usage error.  JSON output is byte-identical across runs; timing_ms is 0
unless LIECOCHAIN_TIMING=1.  LIECOCHAIN_COLOR=0 disables text styling.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

from . import __version__
from . import action_analysis as aa
from . import chart_calculus as cc
from . import dsl
from . import scalar_field as sf
from .lie_cohomology import (CohomologyError, SubgroupSpec, relative_cohomology,
                             validate_lie_algebra)


@dataclass
class RunConfig:
    input: str
    command: str
    format: str
    names: dict
    verbosity: int


class InputError(Exception):
    pass


def _verdict(check, subject, ok, **extra):
    v = {"check": check, "subject": subject,
         "verdict": ok if isinstance(ok, str) else ("pass" if ok else "fail")}
    for key in ("witness", "point", "dims", "representatives", "frame", "reason",
                "_pretty", "_pretty_representatives"):
        if key in extra and extra[key] is not None:
            v[key] = extra[key]
    return v


def _load_workspace(path):
    if path == "-":
        text = sys.stdin.read()
        name = "<stdin>"
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from exc
        name = path
    return dsl.parse(text, name)


def _get(store, name, what):
    if name not in store:
        raise InputError(f"unknown {what} {name!r}")
    return store[name]


def _points_for(ws, names, chart=None):
    out = []
    for n in names or []:
        chart_name, values = _get(ws.points, n, "point")
        if chart is not None and ws.charts[chart_name] != chart:
            raise InputError(f"point {n!r} is not on the action's chart")
        out.append(values)
    return out


def _chart_points(ws, chart):
    return [values for (chart_name, values) in ws.points.values()
            if ws.charts[chart_name] == chart]


def _residual_str(obj):
    if isinstance(obj, (cc.DiffForm, cc.MultiVectorField, cc.VectorField)):
        return dsl.tensor_dsl(obj)
    if isinstance(obj, sf.ScalarExpr):
        return sf.dsl_str(obj)
    return str(obj)


def _pretty_str(obj):
    if isinstance(obj, (cc.DiffForm, cc.MultiVectorField, cc.VectorField)):
        return dsl.tensor_pretty(obj)
    if isinstance(obj, sf.ScalarExpr):
        return sf.pretty(obj)
    return str(obj)


# -- commands ---------------------------------------------------------------


def _cmd_validate(ws, names):
    verdicts = []
    for name, algebra in ws.lie_algebras.items():
        rep = validate_lie_algebra(algebra)
        witness = None
        if not rep.ok:
            i, j, k, res = rep.violations[0]
            witness = f"triple ({i+1},{j+1},{k+1}): {dsl.vector_dsl(res)}"
        verdicts.append(_verdict("jacobi", name, rep.ok, witness=witness))
    for name, decl in ws.actions.items():
        action = decl.spec
        samples = _chart_points(ws, action.chart)
        rep = aa.validate_action(action, samples)
        witness = None
        if rep.bracket_violations:
            i, j, res = rep.bracket_violations[0]
            witness = (f"[{decl.generators[i]}, {decl.generators[j]}]: "
                       f"{_residual_str(res)}")
        verdicts.append(_verdict("action_brackets", name, not rep.bracket_violations,
                                 witness=witness))
        if samples:
            ok = not rep.rank_failures
            witness = None
            if rep.rank_failures:
                pt, r = rep.rank_failures[0]
                coords = ", ".join(str(v) for v in pt)
                witness = f"rank {r} != {action.orbit_dim} at ({coords})"
            verdicts.append(_verdict("action_rank", name, ok, witness=witness))
        else:
            verdicts.append(_verdict("action_rank", name, "skipped",
                                     reason="no sample points declared on the chart"))
        verdicts.append(_verdict("action_effective", name, rep.effective,
                                 witness=None if rep.effective else
                                 "; ".join(dsl.vector_dsl(v) for v in rep.kernel_basis)))
    return verdicts


def _cmd_cohomology(ws, names):
    algebra = _get(ws.lie_algebras, names["algebra"], "lie_algebra")
    if names.get("subgroup"):
        sub = _get(ws.subgroups, names["subgroup"], "subgroup").spec
        subject = f"{names['algebra']} rel {names['subgroup']}"
    else:
        sub = SubgroupSpec.trivial()
        subject = names["algebra"]
    degree = names["degree"]
    result = relative_cohomology(algebra, sub, degree)
    return [_verdict("cohomology", f"{subject} degree {degree}", True,
                     dims={"A_rel": result.relative_dims[degree], "H": result.dimension},
                     representatives=[dsl.altform_dsl(r) for r in result.representatives],
                     _pretty_representatives=[dsl.altform_pretty(r)
                                              for r in result.representatives])]


def _cmd_isotropy(ws, names):
    decl = _get(ws.actions, names["action"], "action")
    point_name = names["point"]
    chart_name, values = _get(ws.points, point_name, "point")
    if ws.charts[chart_name] != decl.spec.chart:
        raise InputError(f"point {point_name!r} is not on the action's chart")
    sample = aa.isotropy_algebra_at(decl.spec, values)
    sample = aa.fixed_space_at(decl.spec, sample)
    dims = {"isotropy": len(sample.isotropy_basis),
            "fixed_tangent": len(sample.fixed_tangent),
            "fixed_vertical": len(sample.fixed_vertical)}
    witness = "; ".join(dsl.vector_dsl(v) for v in sample.isotropy_basis) or None
    return [_verdict("isotropy", names["action"], True, point=point_name,
                     dims=dims, witness=witness)]


def _find_object(ws, name):
    try:
        return ws.find_object(name)
    except KeyError:
        raise InputError(f"unknown form/field/chain {name!r}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _cmd_check_simple(ws, names):
    kind = names["kind"]
    decl = _get(ws.actions, names["action"], "action")
    action = decl.spec
    obj_kind, obj = _find_object(ws, names["object"])
    subject = names["object"]
    if kind == "invariant":
        checker = {"form": aa.check_invariant_form,
                   "field": aa.check_invariant_vectorfield,
                   "chain": aa.check_invariant_multivector}[obj_kind]
        v = checker(action, obj)
        witness = pretty = None
        if not v.ok:
            witness = f"generator {v.generator + 1}: {_residual_str(v.witness)}"
            pretty = f"generator {v.generator + 1}: {_pretty_str(v.witness)}"
        return [_verdict("invariant", subject, v.ok, witness=witness, _pretty=pretty)]
    if kind == "vertical":
        if obj_kind != "chain":
            raise InputError("vertical applies to a chain")
        points = _points_for(ws, names.get("points"), action.chart)
        try:
            res = aa.check_vertical(action, obj, points)
        except aa.NoFrameFound as exc:
            return [_verdict("vertical", subject, False, reason=str(exc))]
        witness = sf.dsl_str(res.factor) if res.ok else None
        pretty = sf.pretty(res.factor) if res.ok else None
        frame = [i + 1 for i in res.frame] if res.ok else None
        return [_verdict("vertical", subject, res.ok, witness=witness, frame=frame,
                         reason=res.reason or None, _pretty=pretty)]
    if kind == "semibasic":
        if obj_kind != "form":
            raise InputError("semibasic applies to a form")
        v = aa.check_semibasic(action, obj)
        witness = pretty = None
        if not v.ok:
            witness = f"generator {v.generator + 1}: {_residual_str(v.witness)}"
            pretty = f"generator {v.generator + 1}: {_pretty_str(v.witness)}"
        return [_verdict("semibasic", subject, v.ok, witness=witness, _pretty=pretty)]
    raise InputError(f"unknown check kind {kind!r}")


def _cmd_check_cochain(ws, names):
    decl = _get(ws.actions, names["action"], "action")
    action = decl.spec
    chain = _get(ws.chains, names["chain"], "chain")
    form_names = names.get("forms") or []
    field_names = names.get("fields") or []
    points = _points_for(ws, names.get("points"), action.chart)
    forms = [_get(ws.forms, n, "form") for n in form_names]
    fields = [_get(ws.vector_fields, n, "field") for n in field_names]
    verdicts = []

    try:
        aa._require_invariant_vertical_chain(action, chain, points)
    except aa.InvalidInput as exc:
        verdicts.append(_verdict("chain_basis", names["chain"], False, reason=str(exc)))
        for n in form_names:
            verdicts.append(_verdict("cochain_condition", n, "skipped",
                                     reason="chain precondition failed"))
        for n in field_names:
            verdicts.append(_verdict("stability", n, "skipped",
                                     reason="chain precondition failed"))
        return verdicts

    for n, omega in zip(form_names, forms):
        try:
            res = aa.cochain_condition_check(action, chain, omega, points)
            verdicts.append(_verdict(
                "cochain_condition", n, res.ok,
                witness=None if res.ok else _residual_str(res.residual),
                _pretty=None if res.ok else _pretty_str(res.residual)))
        except aa.InvalidInput as exc:
            verdicts.append(_verdict("cochain_condition", n, False, reason=str(exc)))
    for n, r in zip(field_names, fields):
        try:
            entries = aa.stability_check(action, chain, [r]).entries
            e = entries[0]
            verdicts.append(_verdict(
                "stability", n, e.ok,
                witness=None if e.ok else _residual_str(e.residual),
                _pretty=None if e.ok else _pretty_str(e.residual)))
        except aa.NonInvariantField as exc:
            verdicts.append(_verdict("stability", n, False, reason=str(exc)))
            continue
        try:
            lam = aa.scaling_factor(action, chain, r, points)
            verdicts.append(_verdict("scaling_factor", n, True, witness=sf.dsl_str(lam),
                                     _pretty=sf.pretty(lam)))
        except (aa.NotProportional, aa.InvalidInput) as exc:
            verdicts.append(_verdict("scaling_factor", n, False, reason=str(exc)))
    if len(fields) >= 2:
        try:
            res = aa.integrability_check(action, chain, fields, points)
            for s, t, residual in res.pairs:
                verdicts.append(_verdict(
                    "integrability", f"{field_names[s]},{field_names[t]}",
                    residual.is_zero(),
                    witness=None if residual.is_zero() else sf.dsl_str(residual),
                    _pretty=None if residual.is_zero() else sf.pretty(residual)))
        except (aa.NotProportional, aa.NonInvariantField, aa.InvalidInput) as exc:
            verdicts.append(_verdict("integrability", ",".join(field_names), False,
                                     reason=str(exc)))
    return verdicts


def _cmd_rho(ws, names):
    decl = _get(ws.actions, names["action"], "action")
    chain = _get(ws.chains, names["chain"], "chain")
    form = _get(ws.forms, names["form"], "form")
    points = _points_for(ws, names.get("points"), decl.spec.chart)
    try:
        res = aa.evaluation_map(decl.spec, chain, form, points)
    except aa.InvalidInput as exc:
        return [_verdict("rho", names["form"], False, reason=str(exc))]
    ok = res.basic
    reason = None
    if not res.semibasic.ok:
        reason = "result is not semi-basic"
    elif not res.invariant.ok:
        reason = "result is not invariant"
    return [_verdict("rho", names["form"], ok, witness=dsl.tensor_dsl(res.form),
                     reason=reason, _pretty=dsl.tensor_pretty(res.form))]


def _cmd_certify(ws, names):
    decl = _get(ws.actions, names["action"], "action")
    chain = _get(ws.chains, names["chain"], "chain")
    form = _get(ws.forms, names["form"], "form")
    points = _points_for(ws, names.get("points"), decl.spec.chart)
    try:
        res = aa.surjectivity_certificate(decl.spec, chain, form, points)
    except aa.InvalidInput as exc:
        return [_verdict("surjective", f"{names['chain']} with {names['form']}",
                         False, reason=str(exc))]
    reason = None
    if not sf.equals(res.pairing, 1):
        reason = "pairing is not 1"
    elif not res.invariance.ok:
        reason = "certificate form is not invariant"
    return [_verdict("surjective", f"{names['chain']} with {names['form']}", res.ok,
                     witness=sf.dsl_str(res.pairing), reason=reason,
                     _pretty=sf.pretty(res.pairing))]


def _cmd_report(ws, names):
    decl = _get(ws.actions, names["action"], "action")
    action = decl.spec
    point_names = names["points"]
    comps = None
    if names.get("components"):
        sub = _get(ws.subgroups, names["components"], "subgroup")
        comps = [sub.spec.component_reps] * len(point_names)
    values = _points_for(ws, point_names, action.chart)
    report = aa.obstruction_report(action, values, comps)
    verdicts = []
    for pname, p in zip(point_names, report.points):
        ok = p.relative_dim > 0 and p.cohomology_dim > 0
        verdicts.append(_verdict("obstruction", names["action"], ok, point=pname,
                                 dims={"isotropy": p.isotropy_dim,
                                       "A_rel": p.relative_dim,
                                       "H": p.cohomology_dim}))
    verdicts.append(_verdict("report", names["action"], report.ok,
                             witness=report.verdict))
    return verdicts


# -- driver -----------------------------------------------------------------


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="workspace file, or - for stdin")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--verbose", "-v", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog="liecochain",
        description="exact checks for evaluation cochain maps of group actions")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common])

    p = sub.add_parser("cohomology", parents=[common])
    p.add_argument("--algebra", required=True)
    p.add_argument("--subgroup")
    p.add_argument("--degree", type=int, required=True)

    p = sub.add_parser("isotropy", parents=[common])
    p.add_argument("--action", required=True)
    p.add_argument("--point", required=True)

    p = sub.add_parser("check", parents=[common])
    p.add_argument("kind", choices=("invariant", "vertical", "semibasic", "cochain"))
    p.add_argument("--action", required=True)
    p.add_argument("--object")
    p.add_argument("--chain")
    p.add_argument("--forms", nargs="*")
    p.add_argument("--fields", nargs="*")
    p.add_argument("--points", nargs="*")

    p = sub.add_parser("rho", parents=[common])
    p.add_argument("--action", required=True)
    p.add_argument("--chain", required=True)
    p.add_argument("--form", required=True)
    p.add_argument("--points", nargs="*")

    p = sub.add_parser("certify", parents=[common])
    p.add_argument("what", choices=("surjective",))
    p.add_argument("--action", required=True)
    p.add_argument("--chain", required=True)
    p.add_argument("--form", required=True)
    p.add_argument("--points", nargs="*")

    p = sub.add_parser("report", parents=[common])
    p.add_argument("--action", required=True)
    p.add_argument("--points", nargs="+", required=True)
    p.add_argument("--components")
    return parser


def _dispatch(ws, args):
    names = vars(args)
    if args.command == "validate":
        return _cmd_validate(ws, names)
    if args.command == "cohomology":
        return _cmd_cohomology(ws, names)
    if args.command == "isotropy":
        return _cmd_isotropy(ws, names)
    if args.command == "check":
        if args.kind == "cochain":
            if not args.chain:
                raise InputError("check cochain needs --chain")
            return _cmd_check_cochain(ws, names)
        if not args.object:
            raise InputError(f"check {args.kind} needs --object")
        return _cmd_check_simple(ws, names)
    if args.command == "rho":
        return _cmd_rho(ws, names)
    if args.command == "certify":
        return _cmd_certify(ws, names)
    if args.command == "report":
        return _cmd_report(ws, names)
    raise InputError(f"unknown command {args.command!r}")


def _use_color():
    return os.environ.get("LIECOCHAIN_COLOR", "1") != "0" and sys.stdout.isatty()


def _print_text(command, verdicts, verbose):
    color = _use_color()
    styles = {"pass": "32", "fail": "31", "skipped": "33"}
    for v in verdicts:
        tag = v["verdict"]
        if color:
            tag = f"\x1b[{styles[tag]}m{tag}\x1b[0m"
        line = f"[{tag}] {v['check']} {v['subject']}"
        if v.get("point"):
            line += f" at {v['point']}"
        if v.get("dims"):
            line += " " + " ".join(f"{k}={n}" for k, n in v["dims"].items())
        reps = v.get("_pretty_representatives") or v.get("representatives")
        if reps:
            line += " reps: " + ", ".join(reps)
        witness = v.get("_pretty") or v.get("witness")
        if witness:
            line += f" | {witness}"
        if v.get("reason"):
            line += f" ({v['reason']})"
        print(line)


def _emit_json(command, verdicts, elapsed_ms):
    public = [{k: val for k, val in v.items() if not k.startswith("_")}
              for v in verdicts]
    report = {
        "tool_version": __version__,
        "command": command,
        "verdicts": public,
        "timing_ms": elapsed_ms,
    }
    print(json.dumps(report, indent=2))


def run(config, args):
    started = time.perf_counter()
    ws = _load_workspace(config.input)
    verdicts = _dispatch(ws, args)
    elapsed_ms = 0
    if os.environ.get("LIECOCHAIN_TIMING") == "1":
        elapsed_ms = int((time.perf_counter() - started) * 1000)
    if config.format == "json":
        _emit_json(config.command, verdicts, elapsed_ms)
    else:
        if config.verbosity:
            print(f"liecochain {__version__} | {config.command} | {ws.source_name}")
        _print_text(config.command, verdicts, config.verbosity)
    return 1 if any(v["verdict"] == "fail" for v in verdicts) else 0


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    config = RunConfig(input=args.input, command=args.command, format=args.format,
                       names=vars(args), verbosity=args.verbose)
    try:
        return run(config, args)
    except (InputError, dsl.ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (aa.ActionError, CohomologyError, sf.ScalarError, cc.ChartError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
