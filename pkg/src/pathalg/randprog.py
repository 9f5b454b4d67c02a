"""Seeded random programs for property tests and oracle comparisons.

Two generators are provided: :func:`random_graph_program` builds flow graphs
directly (arbitrary, possibly irreducible control flow with a bounded vertex
count) and :func:`random_source_program` emits structured source text that
goes through the parser.
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Tuple

from .lang import (
    Assign,
    Assume,
    BinOp,
    Call,
    Edge,
    FlowGraph,
    Havoc,
    Num,
    Procedure,
    Program,
    Var,
    parse_program,
)


def _proc_names(n: int) -> List[str]:
    return ["main"] + [f"p{i}" for i in range(1, n)]


def _random_exp(rng: random.Random, vs: Sequence[str], division: bool, nonlinear: bool):
    x = Var(rng.choice(vs))
    c = Num(rng.randint(-2, 3))
    r = rng.random()
    if r < 0.15:
        return c
    if r < 0.3:
        return x
    if r < 0.6:
        return BinOp(rng.choice("+-"), x, Num(rng.randint(1, 2)))
    if r < 0.75:
        return BinOp(rng.choice("+-"), x, Var(rng.choice(vs)))
    if r < 0.85:
        return BinOp("*", x, Num(rng.randint(-1, 2)))
    if nonlinear and r < 0.93:
        return BinOp("*", x, Var(rng.choice(vs)))
    if division:
        return BinOp("/", x, rng.choice([Var(rng.choice(vs)), Num(rng.randint(1, 2))]))
    return BinOp("+", x, c)


def _random_guard(rng: random.Random, vs: Sequence[str]):
    x = Var(rng.choice(vs))
    r = rng.random()
    if r < 0.4:
        return BinOp("-", x, Num(rng.randint(-1, 3)))
    if r < 0.8:
        return BinOp("-", Num(rng.randint(-1, 3)), x)
    return BinOp("-", x, Var(rng.choice(vs)))


def _random_action(rng, vs, callees, call_prob, division, nonlinear, havoc):
    r = rng.random()
    if callees and r < call_prob:
        j, name = rng.choice(callees)
        return Call(j, name)
    r = rng.random()
    if havoc and r < 0.06:
        return Havoc(rng.choice(vs))
    if r < 0.55:
        return Assign(rng.choice(vs), _random_exp(rng, vs, division, nonlinear))
    if r < 0.9:
        return Assume(_random_guard(rng, vs))
    return Assume(Num(0))


def vertex_names_for(procedures: Sequence[Procedure]) -> Dict[int, str]:
    """entry/exit (or entry_P/exit_P with several procedures), others v1, v2, ..."""
    names: Dict[int, str] = {}
    single = len(procedures) == 1
    special = set()
    for p in procedures:
        g = p.graph
        names[g.entry] = "entry" if single else f"entry_{p.name}"
        names[g.exit] = "exit" if single else f"exit_{p.name}"
        special |= {g.entry, g.exit}
    k = 1
    for v in sorted(v for p in procedures for v in p.graph.vertices):
        if v not in special:
            names[v] = f"v{k}"
            k += 1
    return names


def random_graph_program(
    rng: random.Random,
    max_vertices: int = 8,
    n_globals: int = 2,
    n_procs: int = 1,
    max_locals: int = 1,
    max_vars: int = 3,
    call_prob: float = 0.2,
    division: bool = True,
    nonlinear: bool = False,
    havoc: bool = True,
) -> Program:
    """Random program with at most ``max_vertices`` vertices per procedure.

    Every vertex is reachable from its entry; extra edges create loops,
    self-loops and irreducible regions.  The total variable count is at most
    ``max_vars``.
    """
    names = _proc_names(n_procs)
    n_globals = max(1, min(n_globals, max_vars))
    globals_ = [f"g{i}" for i in range(n_globals)]
    budget = max_vars - n_globals
    locals_: List[List[str]] = []
    for i in range(n_procs):
        k = min(budget, rng.randint(0, max_locals))
        budget -= k
        locals_.append([f"l{i}_{j}" for j in range(k)])
    callees = [(j, names[j]) for j in range(n_procs)]
    procedures = []
    next_v = 0
    next_e = 0
    for i in range(n_procs):
        n = rng.randint(2, max(2, max_vertices))
        vs = list(range(next_v, next_v + n))
        next_v += n
        entry, exit_ = vs[0], vs[-1]
        variables = globals_ + locals_[i]
        pairs: List[Tuple[int, int]] = []
        for k in range(1, n):
            pairs.append((vs[rng.randrange(0, k)], vs[k]))
        for _ in range(rng.randint(0, n)):
            src = rng.choice(vs[:-1])
            tgt = rng.choice(vs[1:])
            pairs.append((src, tgt))
        edges = []
        for src, tgt in pairs:
            action = _random_action(rng, variables, callees if n_procs > 1 else [], call_prob, division, nonlinear, havoc)
            edges.append(Edge(next_e, src, tgt, action))
            next_e += 1
        graph = FlowGraph(tuple(vs), tuple(edges), entry, exit_)
        procedures.append(Procedure(names[i], graph, frozenset(locals_[i])))
    return Program(tuple(procedures), frozenset(globals_), {}, vertex_names_for(procedures))


# ---------------------------------------------------------------------------
# Structured source programs


def _src_exp(rng: random.Random, vs: Sequence[str], division: bool) -> str:
    x = rng.choice(vs)
    r = rng.random()
    if r < 0.15:
        return str(rng.randint(0, 5))
    if r < 0.5:
        return f"{x} {rng.choice('+-')} {rng.randint(1, 3)}"
    if r < 0.7:
        return f"{x} {rng.choice('+-')} {rng.choice(vs)}"
    if r < 0.8:
        return f"{x} * {rng.randint(0, 2)}"
    if r < 0.87:
        return f"{x} * {rng.choice(vs)}"
    if division and r < 0.93:
        return f"{x} / {rng.choice(vs + ['2'])}"
    return x


def _src_cond(rng: random.Random, vs: Sequence[str]) -> str:
    x = rng.choice(vs)
    op = rng.choice(["<", "<=", ">", ">=", "==", "!="])
    rhs = rng.choice([str(rng.randint(0, 6)), rng.choice(vs)])
    cond = f"{x} {op} {rhs}"
    if rng.random() < 0.15:
        other = f"{rng.choice(vs)} {rng.choice(['<', '>='])} {rng.randint(0, 6)}"
        cond = f"({cond}) {rng.choice(['&&', '||'])} ({other})"
    return cond


def _src_block(rng, vs, callees, depth, division, indent) -> List[str]:
    pad = "  " * indent
    lines = []
    for _ in range(rng.randint(1, 3)):
        r = rng.random()
        if depth > 0 and r < 0.18:
            lines.append(f"{pad}if ({_src_cond(rng, vs)}) {{")
            lines += _src_block(rng, vs, callees, depth - 1, division, indent + 1)
            if rng.random() < 0.6:
                lines.append(f"{pad}}} else {{")
                lines += _src_block(rng, vs, callees, depth - 1, division, indent + 1)
            lines.append(f"{pad}}}")
        elif depth > 0 and r < 0.36:
            counter = rng.choice(vs)
            bound = rng.choice([str(rng.randint(1, 8)), rng.choice(vs)])
            lines.append(f"{pad}while ({counter} < {bound}) {{")
            lines += _src_block(rng, vs, callees, depth - 1, division, indent + 1)
            lines.append(f"{pad}  {counter} := {counter} + {rng.randint(1, 2)};")
            lines.append(f"{pad}}}")
        elif callees and r < 0.46:
            lines.append(f"{pad}call {rng.choice(callees)};")
        elif r < 0.5:
            lines.append(f"{pad}havoc {rng.choice(vs)};")
        elif r < 0.56:
            lines.append(f"{pad}assume({_src_cond(rng, vs)});")
        else:
            lines.append(f"{pad}{rng.choice(vs)} := {_src_exp(rng, vs, division)};")
    return lines


def random_source(
    rng: random.Random,
    n_procs: int = 1,
    n_globals: int = 2,
    max_locals: int = 1,
    depth: int = 2,
    division: bool = True,
    recursion: bool = True,
) -> str:
    names = _proc_names(n_procs)
    globals_ = [f"g{i}" for i in range(n_globals)]
    out = []
    for i, name in enumerate(names):
        locs = [f"{name}_l{j}" for j in range(rng.randint(0, max_locals))]
        callees = [n for j, n in enumerate(names) if recursion or j > i]
        head = f"proc {name}()" + (f" local {', '.join(locs)}" if locs else "")
        out.append(head + " {")
        out += _src_block(rng, globals_ + locs, callees if n_procs > 1 else [], depth, division, 1)
        out.append("}")
        out.append("")
    return "\n".join(out)


def random_source_program(rng: random.Random, **kwargs) -> Program:
    return parse_program(random_source(rng, **kwargs))
