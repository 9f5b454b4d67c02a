"""Command-line interface: ``pathalg <subcommand> <file> [options]``.

Exit codes: 0 on success (every assertion SAFE for ``check``), 1 when some
assertion is UNKNOWN or a check finds a discrepancy, 2 on usage, parse or
validation errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Any, Dict, List, Optional, Sequence

from . import poly
from .algebra import check_order, check_pka, check_qpka, check_quantale
from .eval import Interpretation
from .interproc import (
    BudgetExceeded,
    ProcedureExprs,
    coincidence_oracle,
    path_to_table,
    summary_fixpoint_lfp,
    summary_fixpoint_widening,
)
from .lang import ParseError, Program, eval_bexp, exp_has_division, guard_dnf, load_program, validate
from .lradom import LraDomain, TransFormula, entails, exp_to_poly, formula, make_cube, prime, to_smt2
from .regex import render
from .reldom import RelDomain, all_envs

EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2

# laws the linear domain is not expected to satisfy
LRA_EXPECTED_FAILURES = {"star_sum"}


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--domain", choices=["rel", "lra"], default="lra", help="semantic domain (default: lra)")
    common.add_argument("--modulus", "-m", type=int, default=5, help="value modulus for the rel domain (default: 5)")
    common.add_argument(
        "--widening", choices=["trivial", "drop"], default="trivial", help="summary widening for lra (default: trivial)"
    )
    common.add_argument(
        "--star", choices=["refined", "closed"], default="refined", help="lra iteration operator (default: refined)"
    )
    common.add_argument("--cap", type=int, default=16, help="maximum disjuncts per lra formula (default: 16)")
    common.add_argument(
        "--fm-budget", type=int, default=512, help="Fourier-Motzkin combination budget per variable (default: 512)"
    )
    common.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    common.add_argument("--format", choices=["text", "json"], default="text", help="output format")
    common.add_argument("--json", action="store_const", const="json", dest="format", help="same as --format json")

    parser = argparse.ArgumentParser(
        prog="pathalg", description="Algebraic program analysis by path expressions."
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("analyze", parents=[common], help="value of every vertex (PathTo table)")
    p.add_argument("file")
    p.add_argument("--proc", help="only vertices of this procedure")
    p.add_argument("--vertex", help="only this vertex (name such as v8 or numeric id)")

    p = sub.add_parser("paths", parents=[common], help="path expressions from each procedure entry")
    p.add_argument("file")
    p.add_argument("--proc", help="only vertices of this procedure")
    p.add_argument("--vertex", help="only this vertex")

    p = sub.add_parser("summaries", parents=[common], help="procedure summaries")
    p.add_argument("file")
    p.add_argument("--history", action="store_true", help="print every widening round")

    p = sub.add_parser("check", parents=[common], help="verdict for every assertion")
    p.add_argument("file")
    p.add_argument("--emit-smt2", metavar="DIR", help="write one SMT-LIB entailment query per assertion")

    p = sub.add_parser("axioms", parents=[common], help="sampled algebraic law checks")
    p.add_argument("--vars", default="x,y", help="comma-separated variables (default: x,y)")
    p.add_argument("--samples", type=int, default=100, help="samples per law (default: 100)")

    p = sub.add_parser("oracle-compare", parents=[common], help="PathTo versus stack-semantics oracle (rel)")
    p.add_argument("file")
    return parser


def _config_check(args) -> None:
    if args.modulus < 2:
        raise UsageError("--modulus must be at least 2")
    if args.cap < 1:
        raise UsageError("--cap must be at least 1")
    if args.fm_budget < 1:
        raise UsageError("--fm-budget must be positive")


def make_domain(args, variables: Sequence[str]):
    if args.domain == "rel":
        return RelDomain(variables, args.modulus)
    return LraDomain(variables, cap=args.cap, widening=args.widening, star=args.star)


def load(path: str) -> Program:
    try:
        program = load_program(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except ParseError as exc:
        raise UsageError(f"{path}:{exc}") from exc
    diags = validate(program)
    if diags:
        raise UsageError(f"{path}: invalid program: " + "; ".join(diags))
    return program


def compute_table(program: Program, domain):
    exprs = ProcedureExprs(program)
    if isinstance(domain, RelDomain):
        result = summary_fixpoint_lfp(program, domain, exprs=exprs)
    else:
        result = summary_fixpoint_widening(program, domain, exprs=exprs)
    return result, path_to_table(program, domain, result.summary, exprs=exprs)


def _vertices(program: Program, only: Optional[str], proc: Optional[str] = None):
    procs = range(len(program.procedures))
    if proc is not None:
        try:
            procs = [program.proc_index(proc)]
        except KeyError as exc:
            raise UsageError(f"unknown procedure {proc!r}") from exc
    if only is not None:
        try:
            v = program.vertex_by_name(only)
        except KeyError as exc:
            raise UsageError(f"unknown vertex {only!r}") from exc
        if program.proc_of_vertex[v] not in procs:
            raise UsageError(f"vertex {only!r} is not in procedure {proc!r}")
        return [(program.proc_of_vertex[v], v)]
    return [(i, v) for i in procs for v in program.procedures[i].graph.vertices]


def _emit(rows: List[Dict[str, Any]], fmt: str, text_lines: List[str]) -> None:
    if fmt == "json":
        print(json.dumps(rows, indent=2, sort_keys=True))
    else:
        print("\n".join(text_lines))


def cmd_analyze(args) -> int:
    program = load(args.file)
    domain = make_domain(args, program.variables)
    _, table = compute_table(program, domain)
    rows, lines = [], []
    for i, v in _vertices(program, args.vertex, args.proc):
        name = program.procedures[i].name
        value = domain.render(table[(i, v)])
        rows.append({"procedure": name, "vertex": program.vertex_name(v), "value": value})
        lines.append(f"{name} {program.vertex_name(v)}: {value}")
    _emit(rows, args.format, lines)
    return EXIT_OK


def cmd_paths(args) -> int:
    program = load(args.file)
    exprs = ProcedureExprs(program)
    rows, lines = [], []
    for i, v in _vertices(program, args.vertex, args.proc):
        name = program.procedures[i].name
        text = render(exprs.to(i, v))
        rows.append({"procedure": name, "vertex": program.vertex_name(v), "value": text})
        lines.append(f"{name} {program.vertex_name(v)}: {text}")
    _emit(rows, args.format, lines)
    return EXIT_OK


def cmd_summaries(args) -> int:
    program = load(args.file)
    domain = make_domain(args, program.variables)
    result, _ = compute_table(program, domain)
    rows, lines = [], []
    if args.history and result.history:
        for rnd in result.history:
            for i, p in enumerate(program.procedures):
                row = {"procedure": p.name, "round": rnd.index, "value": domain.render(rnd.summaries[i])}
                if i in rnd.candidates:
                    row["candidate"] = domain.render(rnd.candidates[i])
                rows.append(row)
                cand = f"  candidate {row['candidate']}" if "candidate" in row else ""
                lines.append(f"S{rnd.index}({p.name}) = {row['value']}{cand}")
    else:
        for i, p in enumerate(program.procedures):
            value = domain.render(result.summary[i])
            rows.append({"procedure": p.name, "value": value})
            lines.append(f"S({p.name}) = {value}")
    _emit(rows, args.format, lines)
    return EXIT_OK


def assertion_formula(cond) -> Optional[TransFormula]:
    """The assertion as a formula over post-state symbols, or None if not expressible."""
    cubes = []
    for conj in guard_dnf(cond):
        if any(exp_has_division(e) for e in conj):
            return None
        ges = [exp_to_poly(e).rename(prime) for e in conj]
        cubes.append(make_cube([], ges))
    return formula(cubes, cap=max(16, len(cubes)))


def _rel_holds(value, cond) -> bool:
    envs = all_envs(value.modulus, len(value.variables))
    cols = value.matrix.any(axis=0).nonzero()[0]
    for j in cols.tolist():
        env = dict(zip(value.variables, envs[j]))
        try:
            if not eval_bexp(cond, env):
                return False
        except ZeroDivisionError:
            return False
    return True


def cmd_check(args) -> int:
    program = load(args.file)
    domain = make_domain(args, program.variables)
    _, table = compute_table(program, domain)
    rows, lines = [], []
    status = EXIT_OK
    if args.emit_smt2:
        os.makedirs(args.emit_smt2, exist_ok=True)
    for v in sorted(program.asserts):
        cond = program.asserts[v]
        i = program.proc_of_vertex[v]
        value = table[(i, v)]
        if isinstance(domain, RelDomain):
            safe = _rel_holds(value, cond)
        else:
            goal = assertion_formula(cond)
            safe = goal is not None and entails(value, goal)
            if args.emit_smt2 and goal is not None:
                path = os.path.join(args.emit_smt2, f"{program.vertex_name(v)}.smt2")
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(to_smt2(value, goal, expected="unsat" if safe else "unknown"))
        verdict = "SAFE" if safe else "UNKNOWN"
        if not safe:
            status = EXIT_UNKNOWN
        name = program.procedures[i].name
        rows.append(
            {"procedure": name, "vertex": program.vertex_name(v), "value": domain.render(value), "verdict": verdict}
        )
        lines.append(f"{name} {program.vertex_name(v)}: assert({cond_text(cond)}) {verdict}")
    if not program.asserts:
        lines.append("no assertions")
    _emit(rows, args.format, lines)
    return status


def cond_text(cond) -> str:
    from .lang import And, Cmp, Not, Or, render_exp

    if isinstance(cond, Cmp):
        return f"{render_exp(cond.left)} {cond.op} {render_exp(cond.right)}"
    if isinstance(cond, And):
        return f"({cond_text(cond.left)}) && ({cond_text(cond.right)})"
    if isinstance(cond, Or):
        return f"({cond_text(cond.left)}) || ({cond_text(cond.right)})"
    if isinstance(cond, Not):
        return f"!({cond_text(cond.arg)})"
    return str(cond)


def cmd_axioms(args) -> int:
    variables = tuple(x.strip() for x in args.vars.split(",") if x.strip())
    if not variables or len(set(variables)) != len(variables):
        raise UsageError("--vars needs distinct variable names")
    domain = make_domain(args, variables)
    samples = domain.random_value
    n = args.samples
    star_terms = 100 if args.domain == "rel" else 10
    report = (
        check_pka(domain, samples, n, args.seed)
        .merge(check_qpka(domain, samples, variables, n, args.seed))
        .merge(check_quantale(domain, samples, n, star_terms=star_terms, seed=args.seed))
        .merge(check_order(domain, samples, n, args.seed))
    )
    if args.format == "json":
        print(report.to_json(domain))
    else:
        print(report.table())
        for name in report.failures():
            r = report.results[name]
            ops = ", ".join(_show(domain, o) for o in r.counterexample or ())
            print(f"counterexample for {name}: {ops}" + (f" ({r.detail})" if r.detail else ""))
    expected = LRA_EXPECTED_FAILURES if args.domain == "lra" else set()
    return EXIT_UNKNOWN if set(report.failures()) - expected else EXIT_OK


def _show(domain, o) -> str:
    if isinstance(o, str):
        return o
    if isinstance(o, tuple):
        return "[" + ", ".join(_show(domain, x) for x in o) + "]"
    return domain.render(o)


def cmd_oracle_compare(args) -> int:
    program = load(args.file)
    domain = RelDomain(program.variables, args.modulus)
    _, table = compute_table(program, domain)
    oracle = coincidence_oracle(program, domain)
    rows, lines = [], []
    status = EXIT_OK
    for i, p in enumerate(program.procedures):
        for v in p.graph.vertices:
            same = table[(i, v)] == oracle[(i, v)]
            if not same:
                status = EXIT_UNKNOWN
            verdict = "equal" if same else "diff"
            rows.append({"procedure": p.name, "vertex": program.vertex_name(v), "verdict": verdict})
            lines.append(f"{p.name} {program.vertex_name(v)}: {verdict}")
    _emit(rows, args.format, lines)
    return status


COMMANDS = {
    "analyze": cmd_analyze,
    "paths": cmd_paths,
    "summaries": cmd_summaries,
    "check": cmd_check,
    "axioms": cmd_axioms,
    "oracle-compare": cmd_oracle_compare,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    saved_budget = poly.FM_BUDGET
    try:
        _config_check(args)
        random.seed(args.seed)
        poly.FM_BUDGET = args.fm_budget
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"pathalg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"pathalg: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    finally:
        poly.FM_BUDGET = saved_budget


if __name__ == "__main__":
    sys.exit(main())
