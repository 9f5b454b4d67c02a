"""Interpreting path expressions in a domain, plus join-over-paths oracles."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from .algebra import Domain
from .lang import Call, Edge, Program
from .pathexpr import solve_single_source
from .regex import Cat, Edge as EdgeExpr, Empty, Eps, PathExpr, Plus, Star


class SummaryAssignment(dict):
    """Procedure index → summary value."""

    def is_total(self, n_procs: int) -> bool:
        return all(i in self for i in range(n_procs))


class MissingSummary(LookupError):
    pass


@dataclass
class Interpretation:
    """A domain, the meaning of intraprocedural edges, and optional call summaries."""

    domain: Domain
    edges: Mapping[Hashable, Edge]
    sem_edge: Optional[Callable[[Edge], Any]] = None
    summary: Optional[Mapping[int, Any]] = None
    _memo: Dict[PathExpr, Any] = field(default_factory=dict, repr=False)

    @classmethod
    def for_program(cls, program: Program, domain: Domain, summary=None) -> "Interpretation":
        return cls(domain, program.edges, summary=summary)

    def with_summary(self, summary: Mapping[int, Any]) -> "Interpretation":
        return Interpretation(self.domain, self.edges, self.sem_edge, summary)

    def edge_value(self, eid: Hashable):
        e = self.edges[eid]
        if isinstance(getattr(e, "action", None), Call):
            if self.summary is None or e.action.callee not in self.summary:
                raise MissingSummary(f"no summary for call to {e.action.name} on edge {eid}")
            return self.summary[e.action.callee]
        return self.sem_edge(e) if self.sem_edge is not None else self.domain.sem_edge(e)

    def word_value(self, word: Sequence[Hashable]):
        d = self.domain
        out = d.one()
        for eid in word:
            out = d.times(out, self.edge_value(eid))
        return out


def interpret(interp: Interpretation, p: PathExpr):
    """Structural interpretation: ∅→0, ε→1, e→⟦e⟧, +→⊕, ·→⊙, *→star.

    Shared subexpressions are interpreted once (expressions are hash-consed).
    """
    d = interp.domain
    memo = interp._memo
    stack: List[Tuple[PathExpr, bool]] = [(p, False)]
    while stack:
        q, expanded = stack.pop()
        if q in memo:
            continue
        if isinstance(q, Empty):
            memo[q] = d.zero()
        elif isinstance(q, Eps):
            memo[q] = d.one()
        elif isinstance(q, EdgeExpr):
            memo[q] = interp.edge_value(q.eid)
        elif not expanded:
            stack.append((q, True))
            children = (q.arg,) if isinstance(q, Star) else (q.left, q.right)
            stack.extend((c, False) for c in children if c not in memo)
        elif isinstance(q, Plus):
            memo[q] = d.plus(memo[q.left], memo[q.right])
        elif isinstance(q, Cat):
            memo[q] = d.times(memo[q.left], memo[q.right])
        else:
            memo[q] = d.star(memo[q.arg])
    return memo[p]


def intraproc_analyze(
    program: Program, interp: Interpretation, proc: int = 0, order: Optional[Sequence[int]] = None
) -> Dict[int, Any]:
    """Vertex ↦ value of all paths from the procedure entry to the vertex."""
    graph = program.procedures[proc].graph
    exprs = solve_single_source(graph, graph.entry, order)
    return {v: interpret(interp, exprs[v]) for v in graph.vertices}


class BudgetExceeded(RuntimeError):
    pass


def join_over_paths_oracle(
    program: Program, interp: Interpretation, v: int, proc: int = 0, budget: int = 1_000_000
):
    """Join of ⟦π⟧ over all paths entry→v by chaotic iteration (finite lattices only).

    Each vertex accumulates the join of the values flowing into it; with a
    finite lattice and a distributive ⊙ the fixpoint is the join over paths.
    """
    d = interp.domain
    graph = program.procedures[proc].graph
    values = {u: d.zero() for u in graph.vertices}
    values[graph.entry] = d.one()
    work = [graph.entry]
    steps = 0
    while work:
        u = work.pop()
        for e in graph.out_edges.get(u, ()):
            steps += 1
            if steps > budget:
                raise BudgetExceeded(f"join-over-paths budget {budget} exceeded")
            new = d.plus(values[e.tgt], d.times(values[u], interp.edge_value(e.id)))
            if not d.equal(new, values[e.tgt]):
                values[e.tgt] = new
                if e.tgt not in work:
                    work.append(e.tgt)
    return values[v]


@dataclass
class CorrectnessReport:
    vertex: int
    checked: int = 0
    violations: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _path_counts(graph, v: int, max_len: int) -> Dict[int, List[int]]:
    """counts[u][l] = number of paths u→v with exactly l edges."""
    counts = {u: [0] * (max_len + 1) for u in graph.vertices}
    counts[v][0] = 1
    for length in range(1, max_len + 1):
        for u in graph.vertices:
            counts[u][length] = sum(counts[e.tgt][length - 1] for e in graph.out_edges.get(u, ()))
    return counts


def sample_paths(program: Program, v: int, n_paths: int, max_len: int, proc: int = 0, seed: int = 0):
    """Uniform-by-length random paths entry→v of at most ``max_len`` edges."""
    graph = program.procedures[proc].graph
    counts = _path_counts(graph, v, max_len)
    lengths = [l for l in range(max_len + 1) if counts[graph.entry][l]]
    rng = random.Random(seed)
    paths = []
    if not lengths:
        return paths
    for _ in range(n_paths):
        length = rng.choice(lengths)
        u, word = graph.entry, []
        for remaining in range(length, 0, -1):
            outs = [e for e in graph.out_edges.get(u, ()) if counts[e.tgt][remaining - 1]]
            weights = [counts[e.tgt][remaining - 1] for e in outs]
            e = rng.choices(outs, weights)[0]
            word.append(e.id)
            u = e.tgt
        paths.append(tuple(word))
    return paths


def check_correctness_sampled(
    program: Program,
    interp: Interpretation,
    v: int,
    n_paths: int,
    max_len: int,
    proc: int = 0,
    seed: int = 0,
    analysis: Optional[Mapping[int, Any]] = None,
) -> CorrectnessReport:
    """Check ⟦e_1⟧ ⊙ ⋯ ⊙ ⟦e_n⟧ ≤ analysis(v) on sampled paths."""
    if analysis is None:
        analysis = intraproc_analyze(program, interp, proc)
    report = CorrectnessReport(v)
    for word in sample_paths(program, v, n_paths, max_len, proc, seed):
        report.checked += 1
        if not interp.domain.leq(interp.word_value(word), analysis[v]):
            report.violations.append(word)
    return report


def check_locality(program: Program, interp: Interpretation) -> List[Tuple[int, str]]:
    """Edges of one procedure must neither read nor write another's locals."""
    bad = []
    d = interp.domain
    for i, proc in enumerate(program.procedures):
        others = set()
        for j, q in enumerate(program.procedures):
            if j != i:
                others |= set(q.locals)
        for e in proc.graph.edges:
            if isinstance(e.action, Call):
                continue
            val = interp.edge_value(e.id)
            for x in sorted(others):
                if not d.equal(d.exists(x, val), val):
                    bad.append((e.id, x))
    return bad
