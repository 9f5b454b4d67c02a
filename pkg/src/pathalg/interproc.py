"""Interprocedural analysis: summaries, the PathTo table and stack semantics.

Each procedure P_i gets a summary S(i) approximating ``∃LV_i`` of all its
complete executions.  The call graph has an edge P_i → P_j whenever P_i
contains ``call j``; its value is the ``∃LV_i``-projection of all paths from
entry_i to the call sites of j.  Path expressions over the call graph then
give the value at each procedure entry, and path expressions inside the
procedure extend it to every vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

from .algebra import Domain
from .eval import Interpretation, SummaryAssignment, interpret
from .lang import RETURN, Call, Edge, Program
from .pathexpr import solve_single_source


@dataclass(frozen=True)
class CallGraphEdge:
    id: Tuple[int, int]
    src: int
    tgt: int


@dataclass(frozen=True)
class CallGraph:
    vertices: Tuple[int, ...]
    edges: Tuple[CallGraphEdge, ...]

    @classmethod
    def of(cls, program: Program) -> "CallGraph":
        pairs = set()
        for i, proc in enumerate(program.procedures):
            for e in proc.graph.edges:
                if isinstance(e.action, Call):
                    pairs.add((i, e.action.callee))
        edges = tuple(CallGraphEdge((i, j), i, j) for i, j in sorted(pairs))
        return cls(tuple(range(len(program.procedures))), edges)


class BudgetExceeded(RuntimeError):
    pass


def main_index(program: Program) -> int:
    return program.proc_index("main")


class ProcedureExprs:
    """Single-source path expressions from each procedure entry (computed once)."""

    def __init__(self, program: Program):
        self.program = program
        self.exprs = []
        for proc in program.procedures:
            g = proc.graph
            self.exprs.append(solve_single_source(g, g.entry))

    def to(self, i: int, v: int):
        return self.exprs[i][v]

    def body(self, i: int):
        return self.exprs[i][self.program.procedures[i].graph.exit]


def _exprs(program: Program, exprs: Optional[ProcedureExprs]) -> ProcedureExprs:
    return exprs if exprs is not None else ProcedureExprs(program)


def summary_candidate(program: Program, interp: Interpretation, i: int, exprs: ProcedureExprs):
    """∃LV_i. I(S)[pathexp(entry_i, exit_i)]."""
    d = interp.domain
    return d.exists_all(program.procedures[i].locals, interpret(interp, exprs.body(i)))


@dataclass
class WideningRound:
    """One round of summary iteration: per procedure, the candidate and the widened value."""

    index: int
    candidates: Dict[int, Any]
    summaries: Dict[int, Any]


@dataclass
class SummaryResult:
    summary: SummaryAssignment
    rounds: int
    history: List[WideningRound] = field(default_factory=list)


def summary_fixpoint_widening(
    program: Program,
    domain: Domain,
    budget: int = 200,
    exprs: Optional[ProcedureExprs] = None,
    base: Optional[Interpretation] = None,
) -> SummaryResult:
    """S_n(i) = S_{n-1}(i) ∇ ∃LV_i. I(S_{n-1})[pathexp(entry_i, exit_i)] from S_0 = 0."""
    exprs = _exprs(program, exprs)
    base = base or Interpretation.for_program(program, domain)
    n = len(program.procedures)
    current = SummaryAssignment({i: domain.zero() for i in range(n)})
    history = [WideningRound(0, {}, dict(current))]
    changing: List[str] = []
    for rnd in range(1, budget + 1):
        interp = base.with_summary(current)
        candidates, nxt = {}, SummaryAssignment()
        for i in range(n):
            candidates[i] = summary_candidate(program, interp, i, exprs)
            nxt[i] = domain.widen(current[i], candidates[i])
        history.append(WideningRound(rnd, candidates, dict(nxt)))
        if all(domain.equal(nxt[i], current[i]) for i in range(n)):
            return SummaryResult(current, rnd, history)
        changing = [program.procedures[i].name for i in range(n) if not domain.equal(nxt[i], current[i])]
        current = nxt
    raise BudgetExceeded(f"summaries did not stabilise within {budget} rounds: {', '.join(changing)}")


def summary_fixpoint_lfp(
    program: Program,
    domain: Domain,
    budget: int = 100000,
    exprs: Optional[ProcedureExprs] = None,
    base: Optional[Interpretation] = None,
) -> SummaryResult:
    """Kleene iteration of F(S) = λi. ∃LV_i. I(S)[pathexp(entry_i, exit_i)] (finite lattices)."""
    exprs = _exprs(program, exprs)
    base = base or Interpretation.for_program(program, domain)
    n = len(program.procedures)
    current = SummaryAssignment({i: domain.zero() for i in range(n)})
    for rnd in range(1, budget + 1):
        interp = base.with_summary(current)
        nxt = SummaryAssignment({i: summary_candidate(program, interp, i, exprs) for i in range(n)})
        if all(domain.equal(nxt[i], current[i]) for i in range(n)):
            return SummaryResult(current, rnd)
        current = nxt
    raise BudgetExceeded(f"least fixpoint not reached within {budget} rounds")


def is_inductive(
    program: Program,
    domain: Domain,
    summary: Mapping[int, Any],
    exprs: Optional[ProcedureExprs] = None,
    base: Optional[Interpretation] = None,
) -> List[str]:
    """Procedures whose summary fails S(i) ≥ ∃LV_i. I(S)[pathexp(entry_i, exit_i)]."""
    exprs = _exprs(program, exprs)
    base = base or Interpretation.for_program(program, domain)
    interp = base.with_summary(summary)
    bad = []
    for i, proc in enumerate(program.procedures):
        if not domain.leq(summary_candidate(program, interp, i, exprs), summary[i]):
            bad.append(proc.name)
    return bad


def call_edge_value(
    program: Program, interp: Interpretation, i: int, j: int, exprs: Optional[ProcedureExprs] = None
):
    """∃LV_i. ⊕ { I(S)[pathexp(entry_i, src(e))] : e in P_i, act(e) = call j }."""
    exprs = _exprs(program, exprs)
    d = interp.domain
    total = d.zero()
    found = False
    for e in program.procedures[i].graph.edges:
        if isinstance(e.action, Call) and e.action.callee == j:
            found = True
            total = d.plus(total, interpret(interp, exprs.to(i, e.src)))
    if not found:
        raise ValueError(f"{program.procedures[i].name} does not call {program.procedures[j].name}")
    return d.exists_all(program.procedures[i].locals, total)


@dataclass
class PathToTable:
    """(procedure index, vertex) → value of all interprocedural paths from main's entry."""

    values: Dict[Tuple[int, int], Any]
    entries: Dict[int, Any]

    def __getitem__(self, key: Tuple[int, int]):
        return self.values[key]

    def at(self, program: Program, v: int):
        return self.values[(program.proc_of_vertex[v], v)]


def path_to_table(
    program: Program,
    domain: Domain,
    summary: Mapping[int, Any],
    exprs: Optional[ProcedureExprs] = None,
    base: Optional[Interpretation] = None,
) -> PathToTable:
    exprs = _exprs(program, exprs)
    base = base or Interpretation.for_program(program, domain)
    interp = base.with_summary(summary)
    cg = CallGraph.of(program)
    edge_values = {e.id: call_edge_value(program, interp, e.src, e.tgt, exprs) for e in cg.edges}
    cg_interp = Interpretation(
        domain, {e.id: e for e in cg.edges}, sem_edge=lambda e: edge_values[e.id]
    )
    cg_exprs = solve_single_source(cg, main_index(program))
    entries = {i: interpret(cg_interp, cg_exprs[i]) for i in cg.vertices}
    values = {}
    for i, proc in enumerate(program.procedures):
        g = proc.graph
        for v in g.vertices:
            if v == g.entry:
                values[(i, v)] = entries[i]
            else:
                values[(i, v)] = domain.times(entries[i], interpret(interp, exprs.to(i, v)))
    return PathToTable(values, entries)


# ---------------------------------------------------------------------------
# Stack semantics


@dataclass(frozen=True)
class Activation:
    variables: FrozenSet[str]
    value: Any
    proc: int = 0


Stack = Tuple[Activation, ...]  # top first


class StackError(ValueError):
    pass


def initial_stack(program: Program, domain: Domain) -> Stack:
    m = main_index(program)
    return (Activation(frozenset(program.procedures[m].locals), domain.one(), m),)


def stack_step(program: Program, step: Union[Edge, str], stack: Stack, interp: Interpretation) -> Stack:
    """Push on call, pop with ``a_2 ⊙ ∃V_1.a_1`` on return, else extend the top."""
    d = interp.domain
    if not stack:
        raise StackError("empty activation stack")
    if step == RETURN:
        if len(stack) < 2:
            raise StackError("return on a depth-1 stack")
        top, below = stack[0], stack[1]
        merged = d.times(below.value, d.exists_all(top.variables, top.value))
        return (Activation(below.variables, merged, below.proc),) + stack[2:]
    if isinstance(step.action, Call):
        j = step.action.callee
        return (Activation(frozenset(program.procedures[j].locals), d.one(), j),) + stack
    top = stack[0]
    return (Activation(top.variables, d.times(top.value, interp.edge_value(step.id)), top.proc),) + stack[1:]


def flatten(domain: Domain, stack: Stack):
    """(∃V_n.a_n) ⊙ ⋯ ⊙ (∃V_2.a_2) ⊙ a_1."""
    out = stack[0].value
    for act in stack[1:]:
        out = domain.times(domain.exists_all(act.variables, act.value), out)
    return out


def stack_of_path(program: Program, interp: Interpretation, steps: Sequence[Union[int, str]]) -> Stack:
    """Stack reached along an interprocedural path given as edge ids and RETURN markers."""
    stack = initial_stack(program, interp.domain)
    for s in steps:
        stack = stack_step(program, s if s == RETURN else program.edges[s], stack, interp)
    return stack


def coincidence_oracle(program: Program, domain: Domain, budget: int = 1_000_000) -> Dict[Tuple[int, int], Any]:
    """Join of flatten(stack(π)) over all interprocedurally valid paths π, per vertex.

    For finite lattices with ⊙ distributing over ⊕.  A path to v in P_i splits
    into a prefix ending with the push of P_i's activation and a same-level
    suffix in P_i.  The flatten of its stack is T ⊙ a_1 where T depends only
    on the prefix and a_1 only on the suffix, so the join over all paths is
    (join of T over prefixes) ⊙ (join of a_1 over suffixes).  Both joins are
    computed by chaotic iteration over the flow graphs, independently of path
    expressions and call-graph summaries.
    """
    d = domain
    procs = program.procedures
    interp = Interpretation.for_program(program, d)
    steps = 0

    def tick() -> None:
        nonlocal steps
        steps += 1
        if steps > budget:
            raise BudgetExceeded(f"coincidence oracle budget {budget} exceeded")

    # same-level values: X[i][v] = join of a_1 over balanced paths entry_i → v
    X = [{v: d.zero() for v in p.graph.vertices} for p in procs]
    for i, p in enumerate(procs):
        X[i][p.graph.entry] = d.one()
    returns = [d.zero() for _ in procs]  # ∃LV_j. X[j][exit_j]
    changed = True
    while changed:
        changed = False
        for i, p in enumerate(procs):
            work = list(p.graph.vertices)
            while work:
                u = work.pop(0)
                for e in p.graph.out_edges.get(u, ()):
                    tick()
                    if isinstance(e.action, Call):
                        step = returns[e.action.callee]
                    else:
                        step = interp.edge_value(e.id)
                    new = d.plus(X[i][e.tgt], d.times(X[i][u], step))
                    if not d.equal(new, X[i][e.tgt]):
                        X[i][e.tgt] = new
                        if e.tgt not in work:
                            work.append(e.tgt)
            ret = d.exists_all(p.locals, X[i][p.graph.exit])
            if not d.equal(ret, returns[i]):
                returns[i] = ret
                changed = True

    # tails: T[j] = join of flatten-of-tail over stacks whose top is a fresh activation of P_j
    m = main_index(program)
    T = [d.zero() for _ in procs]
    T[m] = d.one()
    changed = True
    while changed:
        changed = False
        for i, p in enumerate(procs):
            for e in p.graph.edges:
                if not isinstance(e.action, Call):
                    continue
                tick()
                j = e.action.callee
                pushed = d.times(T[i], d.exists_all(p.locals, X[i][e.src]))
                new = d.plus(T[j], pushed)
                if not d.equal(new, T[j]):
                    T[j] = new
                    changed = True

    return {
        (i, v): d.times(T[i], X[i][v]) for i, p in enumerate(procs) for v in p.graph.vertices
    }


def bounded_stack_join(program: Program, domain: Domain, max_len: int) -> Dict[Tuple[int, int], Any]:
    """Join of flatten(stack(π)) over all interprocedural paths with at most ``max_len`` steps.

    Explores stacks explicitly with :func:`stack_step`; states with equal
    (vertex, call-return vertices, stack) are merged.  Exponential in general,
    meant for tiny programs.
    """
    d = domain
    interp = Interpretation.for_program(program, d)
    procs = program.procedures
    m = main_index(program)
    out: Dict[Tuple[int, int], Any] = {
        (i, v): d.zero() for i, p in enumerate(procs) for v in p.graph.vertices
    }
    start = (procs[m].graph.entry, (), initial_stack(program, d))
    frontier = {start}
    seen = set()
    for _ in range(max_len + 1):
        nxt = set()
        for state in frontier:
            if state in seen:
                continue
            seen.add(state)
            v, returns, stack = state
            i = stack[0].proc
            out[(i, v)] = d.plus(out[(i, v)], flatten(d, stack))
            g = procs[i].graph
            if v == g.exit and returns:
                nxt.add((returns[0], returns[1:], stack_step(program, RETURN, stack, interp)))
            for e in g.out_edges.get(v, ()):
                new_stack = stack_step(program, e, stack, interp)
                if isinstance(e.action, Call):
                    callee = procs[e.action.callee].graph.entry
                    nxt.add((callee, (e.tgt,) + returns, new_stack))
                else:
                    nxt.add((e.tgt, returns, new_stack))
        frontier = nxt
    return out
