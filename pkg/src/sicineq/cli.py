"""Command-line driver.

Exit codes: 0 success (optimal with positive violation / all checks pass),
1 a requested check failed, 2 no state-independent violation, 3 infeasible,
64 malformed input, 65 enumeration guard refused.
"""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import certify as certify_mod
from .builtin_scenarios import BUILTINS, load_builtin
from .document import (DocumentError, export_scenario, parse_inequality_document,
                       parse_scenario_document, resolve_observable)
from .exact import format_fraction
from .hv import DEFAULT_GUARD, EnumerationGuardError
from .lp import Inequality, solve_optimal
from .scenario import ScenarioError, compatibility_graph, enumerate_contexts, require_valid_contexts
from .sparsify import omission_sweep, solve_with_zeros, tight_representative
from .tightness import is_tight

EXIT_OK, EXIT_FAIL, EXIT_NO_SIC, EXIT_INFEASIBLE = 0, 1, 2, 3
EXIT_PARSE, EXIT_GUARD = 64, 65

REPORT_BEGIN = "--- BEGIN REPORT JSON ---"
REPORT_END = "--- END REPORT JSON ---"

log = logging.getLogger("sicineq")


class UsageError(ValueError):
    pass


def load_scenario(source: str):
    """Built-in name or path to a scenario document -> (scenario, named context sets)."""
    if source in BUILTINS:
        return load_builtin(source)
    path = Path(source)
    if not path.exists():
        raise UsageError(f"no built-in or file named {source!r}")
    scenario, contexts = parse_scenario_document(path.read_text(encoding="utf-8"))
    return scenario, ({"file": contexts} if contexts is not None else {})


def resolve_contexts(spec: str | None, scenario, named: dict):
    """``auto:max_size=K``, a named set, ``file``, or ``{1,2},{4,A},...``."""
    if spec is None:
        if len(named) == 1:
            return next(iter(named.values()))
        raise UsageError(f"--contexts required; named sets: {sorted(named)}")
    m = re.fullmatch(r"auto:max_size=(\d+)", spec.strip())
    if m:
        return enumerate_contexts(compatibility_graph(scenario), int(m.group(1)))
    if spec in named:
        return named[spec]
    return require_valid_contexts(scenario, parse_context_list(spec, scenario))


def parse_context_list(spec: str, scenario):
    groups = re.findall(r"\{([^}]*)\}", spec)
    if not groups:
        groups = [g for g in spec.split(";") if g.strip()]
    if not groups:
        raise UsageError(f"cannot parse context list {spec!r}")
    return [[resolve_observable(t, scenario, "contexts") for t in g.split(",") if t.strip()] for g in groups]


def _frac(x) -> str | None:
    return None if x is None else format_fraction(Fraction(x))


def _decimal(x) -> str:
    return f"{float(x):.6f}"


def lambda_table(scenario, contexts, lam) -> list:
    return [{"context": scenario.label(c), "lambda": _frac(l)} for c, l in zip(contexts, lam)]


def emit(report: dict, human: list, out):
    """Human-readable lines, then the machine-readable block."""
    for line in human:
        print(line, file=out)
    print(REPORT_BEGIN, file=out)
    print(json.dumps(report, indent=1), file=out)
    print(REPORT_END, file=out)


def extract_report(text: str) -> dict:
    start = text.index(REPORT_BEGIN) + len(REPORT_BEGIN)
    return json.loads(text[start:text.index(REPORT_END)])


def _human_lambda(scenario, contexts, lam):
    lines = ["  context            lambda"]
    for c, l in zip(contexts, lam):
        lines.append(f"  {scenario.label(c):<18} {format_fraction(l):>10}   ({_decimal(l)})")
    return lines


def _tightness_dict(rep):
    return {"polytope_dim": rep.polytope_dim, "saturating_count": rep.saturating_count,
            "saturating_affine_rank": rep.saturating_affine_rank, "tight": rep.tight}


# --- commands -----------------------------------------------------------------

def cmd_solve(args, out) -> int:
    scenario, named = load_scenario(args.scenario)
    contexts = resolve_contexts(args.contexts, scenario, named)
    rep = solve_optimal(scenario, contexts, guard=args.guard, exact=args.exact)
    report = {"command": "solve", "status": rep.status, "n": scenario.n, "contexts": len(contexts),
              "iterations": rep.iterations, "constraints_generated": rep.constraints_generated,
              "method": rep.method}
    human = [f"scenario {args.scenario}: n={scenario.n}, |C|={len(contexts)}", f"status: {rep.status}"]
    if rep.inequality is not None:
        ineq = rep.inequality
        report["eta"] = _frac(ineq.eta)
        report["violation"] = _frac(rep.violation)
        report["lambda"] = lambda_table(scenario, contexts, ineq.lam)
        report["dual_certificate_support"] = len(rep.certificate.weights) if rep.certificate else None
        human.append(f"eta = {_frac(ineq.eta)} ({_decimal(ineq.eta)})")
        if rep.violation is not None:
            human.append(f"V = {_frac(rep.violation)} ({_decimal(rep.violation)})")
        if not args.no_tightness:
            t = is_tight(ineq, contexts, scenario.n, args.guard)
            report["tightness"] = _tightness_dict(t)
            human.append(f"tight: {t.tight} (p={t.polytope_dim}, saturating rank={t.saturating_affine_rank})")
        human += _human_lambda(scenario, contexts, ineq.lam)
    human.append(f"iterations={rep.iterations} constraints_generated={rep.constraints_generated}")
    emit(report, human, out)
    return {"optimal": EXIT_OK, "no_sic": EXIT_NO_SIC, "infeasible": EXIT_INFEASIBLE}[rep.status]


def _inequality_source(args, scenario, named):
    if args.table:
        if args.scenario != "yu-oh":
            raise UsageError("--table requires --scenario yu-oh")
        return certify_mod.table_inequality(args.table)[1:] + (certify_mod.EXPECTED[args.table][0],)
    if args.inequality:
        path = Path(args.inequality)
        if not path.exists():
            raise UsageError(f"no inequality file {args.inequality!r}")
        contexts, lam, eta = parse_inequality_document(path.read_text(encoding="utf-8"), scenario)
        return contexts, lam, eta
    raise UsageError("need --table or --inequality")


def cmd_certify(args, out) -> int:
    scenario, named = load_scenario(args.scenario)
    contexts, lam, eta = _inequality_source(args, scenario, named)
    rep = certify_mod.certify_inequality(scenario, contexts, lam, eta=eta, tightness=args.tightness,
                                         guard=args.guard, name=args.table or args.inequality)
    report = {"command": "certify", "passed": rep.passed, "eta": _frac(rep.eta),
              "violation": _frac(rep.violation),
              "checks": {k: ok for k, (ok, _) in rep.checks.items()}}
    human = [f"certify {rep.name}: {'PASS' if rep.passed else 'FAIL'}"]
    for k, (ok, detail) in rep.checks.items():
        if k == "state_independent":
            detail = "T(lambda) = 1" if ok else "residual T(lambda) - 1 nonzero"
        elif k == "tight":
            detail = _tightness_dict(detail)
        human.append(f"  {k:<18} {'ok' if ok else 'FAILED'}  {detail}")
    ok_si, residual = rep.checks["state_independent"][0], rep.checks["state_independent"][1]
    if not ok_si:
        report["residual"] = [[str(x) for x in row] for row in residual]
        human.append("  residual T(lambda) - 1:")
        human += ["    " + "  ".join(str(x) for x in row) for row in residual]
    if rep.tightness is not None:
        report["tightness"] = _tightness_dict(rep.tightness)
    emit(report, human, out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_tightness(args, out) -> int:
    scenario, named = load_scenario(args.scenario)
    contexts, lam, _ = _inequality_source(args, scenario, named)
    ineq = Inequality(lam, 0)
    from .hv import noncontextual_max
    eta, _ = noncontextual_max(lam, contexts, scenario.n, args.guard)
    t = is_tight(Inequality(ineq.lam, eta), contexts, scenario.n, args.guard)
    report = {"command": "tightness", "eta": _frac(eta), **_tightness_dict(t)}
    emit(report, [f"eta = {_frac(eta)}, tight: {t.tight} (p={t.polytope_dim}, "
                  f"saturating={t.saturating_count}, rank={t.saturating_affine_rank})"], out)
    return EXIT_OK if t.tight else EXIT_FAIL


def _sweep_one(payload):
    scenario_source, contexts, eta, c, guard = payload
    scenario, _ = load_scenario(scenario_source)
    return c, solve_with_zeros(scenario, contexts, eta, [c], guard).feasible


def cmd_sparsify(args, out) -> int:
    scenario, named = load_scenario(args.scenario)
    contexts = resolve_contexts(args.contexts, scenario, named)
    base = solve_optimal(scenario, contexts, guard=args.guard)
    if base.status == "infeasible":
        emit({"command": "sparsify", "status": "infeasible"}, ["status: infeasible"], out)
        return EXIT_INFEASIBLE
    eta = base.eta
    report = {"command": "sparsify", "eta_star": _frac(eta), "violation": _frac(base.violation)}
    human = [f"optimal eta* = {_frac(eta)}"]
    if args.zero == "sweep":
        if args.jobs > 1:
            payloads = [(args.scenario, contexts, eta, c, args.guard) for c in contexts]
            with ProcessPoolExecutor(args.jobs) as pool:
                verdicts = dict(pool.map(_sweep_one, payloads))
        else:
            verdicts = omission_sweep(scenario, contexts, eta, args.guard)
        report["sweep"] = [{"context": scenario.label(c), "omissible": v} for c, v in verdicts.items()]
        human.append("  context            omissible")
        human += [f"  {scenario.label(c):<18} {'yes' if v else 'no'}" for c, v in verdicts.items()]
        emit(report, human, out)
        return EXIT_OK
    zero_set = list(contexts) if args.zero == "all" else [
        tuple(sorted(c)) for c in parse_context_list(args.zero, scenario)]
    report["zero_set"] = [scenario.label(c) for c in zero_set]
    if args.tight:
        ineq = tight_representative(scenario, contexts, eta, zero_set, args.guard,
                                    trials=args.trials, seed=args.seed)
        feasible = solve_with_zeros(scenario, contexts, eta, zero_set, args.guard).feasible
    else:
        res = solve_with_zeros(scenario, contexts, eta, zero_set, args.guard)
        feasible, ineq = res.feasible, res.inequality
        report["constrained_optimum"] = _frac(res.constrained_optimum)
    report["feasible"] = feasible
    human.append(f"zeros {', '.join(report['zero_set'])}: {'feasible' if feasible else 'infeasible'}")
    if ineq is not None:
        report["lambda"] = lambda_table(scenario, contexts, ineq.lam)
        t = is_tight(ineq, contexts, scenario.n, args.guard)
        report["tightness"] = _tightness_dict(t)
        human.append(f"tight: {t.tight}")
        human += _human_lambda(scenario, contexts, ineq.lam)
    elif args.tight and feasible:
        human.append("no tight representative found")
    emit(report, human, out)
    if not feasible:
        return EXIT_INFEASIBLE
    return EXIT_OK if ineq is not None else EXIT_FAIL


def cmd_scenarios(args, out) -> int:
    if args.action == "list":
        for name, desc in BUILTINS.items():
            print(f"{name:<18} {desc}", file=out)
        return EXIT_OK
    scenario, named = load_scenario(args.name)
    contexts = resolve_contexts(args.contexts, scenario, named) if (args.contexts or len(named) == 1) else None
    print(export_scenario(scenario, contexts), file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sicineq", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, contexts=True):
        sp.add_argument("--scenario", required=True, help="built-in name or scenario document path")
        if contexts:
            sp.add_argument("--contexts", help="auto:max_size=K, a named set, or {1,2},{4,A},...")
        sp.add_argument("--guard", type=int, default=DEFAULT_GUARD, help="max n for 2**n enumeration")
        sp.add_argument("--out", help="write the report here instead of stdout")

    sp = sub.add_parser("solve", help="optimal state-independent inequality")
    common(sp)
    sp.add_argument("--exact", action="store_true", help="pure rational simplex (small scenarios)")
    sp.add_argument("--no-tightness", action="store_true")
    sp.set_defaults(func=cmd_solve)

    for name, func in (("certify", cmd_certify), ("tightness", cmd_tightness)):
        sp = sub.add_parser(name)
        common(sp, contexts=False)
        sp.add_argument("--table", choices=certify_mod.COLUMNS)
        sp.add_argument("--inequality", help="inequality document path")
        if name == "certify":
            sp.add_argument("--tightness", action="store_true")
        sp.set_defaults(func=func)

    sp = sub.add_parser("sparsify", help="optimal inequalities with omitted contexts")
    common(sp)
    sp.add_argument("--zero", required=True, help="sweep, all, or {4,7},...")
    sp.add_argument("--tight", action="store_true", help="request a tight representative")
    sp.add_argument("--trials", type=int, default=64)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_sparsify)

    sp = sub.add_parser("scenarios")
    sp.add_argument("action", choices=["list", "export"])
    sp.add_argument("name", nargs="?")
    sp.add_argument("--contexts")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scenarios)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.command == "scenarios" and args.action == "export" and not args.name:
        print("scenarios export needs a name", file=sys.stderr)
        return EXIT_PARSE
    out = open(args.out, "w", encoding="utf-8") if getattr(args, "out", None) else sys.stdout
    try:
        return args.func(args, out)
    except EnumerationGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, DocumentError, ScenarioError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
