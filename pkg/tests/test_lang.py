from __future__ import annotations

import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathalg.lang import (
    RETURN,
    Assign,
    Assume,
    BinOp,
    Call,
    Edge,
    FlowGraph,
    Havoc,
    Num,
    ParseError,
    Procedure,
    Program,
    Var,
    concrete_run,
    eval_exp,
    parse_program,
    tdiv,
    validate,
)
from pathalg.randprog import random_graph_program, random_source_program


def test_division_program_shape(div_program) -> None:
    graph = div_program.procedures[0].graph
    assert len(graph.edges) == 11
    assert len(graph.vertices) == 10
    assert div_program.global_vars == {"q", "r", "t", "x", "y"}
    assert validate(div_program) == []
    (v,) = div_program.asserts
    assert div_program.vertex_name(v) == "v8"


def test_empty_procedure() -> None:
    program = parse_program("proc main() { }")
    graph = program.procedures[0].graph
    assert graph.entry == graph.exit
    assert graph.edges == ()
    assert validate(program) == []


def test_interproc_program_shape(interproc_program) -> None:
    assert [p.name for p in interproc_program.procedures] == ["main", "foo"]
    foo = interproc_program.procedures[1]
    assert foo.locals == {"x"}
    assert len(foo.graph.edges) == 7
    calls = [e for e in foo.graph.edges if isinstance(e.action, Call)]
    assert [c.action.callee for c in calls] == [1]


def test_main_is_first_even_when_declared_last() -> None:
    program = parse_program("proc f() { g := 1; } proc main() { call f; }")
    assert [p.name for p in program.procedures] == ["main", "f"]
    (call,) = [e for e in program.procedures[0].graph.edges if isinstance(e.action, Call)]
    assert call.action.callee == 1


def _guards_from(program, vertex):
    graph = program.procedures[0].graph
    return sorted(str(e.action) for e in graph.out_edges[vertex] if isinstance(e.action, Assume))


def test_while_desugars_to_guard_and_negation() -> None:
    program = parse_program("proc main() { while (x < 3) { x := x + 1; } }")
    graph = program.procedures[0].graph
    header = next(v for v in graph.vertices if len(graph.out_edges[v]) == 2)
    assert _guards_from(program, header) == ["[3 - x - 1 >= 0]", "[x - 3 >= 0]"]


def test_equality_and_disequality_guards() -> None:
    eq = parse_program("proc main() { assume(x == y); }")
    assert [str(e.action) for e in eq.procedures[0].graph.edges] == ["[x - y >= 0]", "[y - x >= 0]"]
    ne = parse_program("proc main() { assume(x != y); }")
    edges = ne.procedures[0].graph.edges
    assert len(edges) == 2
    assert edges[0].src == edges[1].src and edges[0].tgt == edges[1].tgt


def test_assert_is_not_an_edge() -> None:
    program = parse_program("proc main() { x := 1; assert(x > 0); }")
    graph = program.procedures[0].graph
    (v,) = program.asserts
    # the check vertex leaves by a skip edge; the condition never prunes paths
    (out,) = graph.out_edges[v]
    assert str(out.action) == "[0 >= 0]"
    assert [str(e.action) for e in graph.edges] == ["x := 1", "[0 >= 0]"]


@pytest.mark.parametrize(
    "text, message",
    [
        ("proc main() { x := ; }", "1:20"),
        ("proc main() { x := 1 }", "expected"),
        ("proc main() { call nowhere; }", "undeclared procedure"),
        ("proc main() { } proc main() { }", "duplicate procedure"),
        ("proc f() { }", "no procedure named 'main'"),
        ("proc main() { y := z; } proc f() local z { }", "undeclared variable"),
        ("proc main() local a { } proc f() local a { }", "already declared"),
        ("proc main() { x := 1 # 2; }", "unexpected character"),
    ],
)
def test_parse_errors(text, message) -> None:
    with pytest.raises(ParseError, match=message):
        parse_program(text)


def test_parse_error_position() -> None:
    with pytest.raises(ParseError) as info:
        parse_program("proc main() {\n  x := 1;\n  y := * 2;\n}")
    assert (info.value.line, info.value.col) == (3, 8)


def _one_proc(edges, entry=0, exit_=1, locals_=frozenset()):
    vertices = tuple(sorted({entry, exit_} | {e.src for e in edges} | {e.tgt for e in edges}))
    graph = FlowGraph(vertices, tuple(edges), entry, exit_)
    return Procedure("main", graph, locals_)


def test_validate_exit_with_outgoing_edge() -> None:
    proc = _one_proc([Edge(0, 0, 1, Assign("x", Num(1))), Edge(1, 1, 2, Assign("x", Num(2)))])
    program = Program((proc,), frozenset({"x"}))
    assert "main: exit has outgoing edge" in validate(program)


def test_validate_shared_locals() -> None:
    main = _one_proc([Edge(0, 0, 1, Call(1, "f"))], locals_=frozenset({"a"}))
    f_graph = FlowGraph((2, 3), (Edge(1, 2, 3, Assign("a", Num(0))),), 2, 3)
    f = Procedure("f", f_graph, frozenset({"a"}))
    diags = validate(Program((main, f), frozenset()))
    assert any(d.startswith("locals not disjoint") for d in diags)


def test_validate_unreachable_and_foreign_variables() -> None:
    proc = _one_proc([Edge(0, 0, 1, Assign("x", Var("z"))), Edge(1, 2, 1, Assign("x", Num(0)))])
    diags = validate(Program((proc,), frozenset({"x"})))
    assert "main: unreachable vertices [2]" in diags
    assert "main: edge 0 mentions foreign variables ['z']" in diags


def test_truncating_division() -> None:
    assert [tdiv(7, 2), tdiv(-7, 2), tdiv(7, -2), tdiv(-7, -2)] == [3, -3, -3, 3]
    assert eval_exp(BinOp("/", Var("x"), Num(2)), {"x": -5}) == -2
    with pytest.raises(ZeroDivisionError):
        eval_exp(BinOp("/", Var("x"), Var("y")), {"x": 1, "y": 0})


def test_division_program_run(div_program) -> None:
    trace = concrete_run(div_program, {"x": 7, "y": 2, "q": 0, "r": 0, "t": 0}, 10000)
    assert trace.terminated
    env = trace.final[1]
    assert env["x"] == env["q"] * env["y"] + env["r"]
    assert env["r"] <= env["y"]


def test_fuel_zero(div_program) -> None:
    initial = {"x": 1, "y": 1, "q": 0, "r": 0, "t": 0}
    trace = concrete_run(div_program, initial, 0)
    assert trace.points == [(div_program.procedures[0].graph.entry, initial)]
    assert trace.status == "fuel"


def test_recursive_run_decrements_ten_times(interproc_program) -> None:
    trace = concrete_run(interproc_program, {"g": 3, "p0": 7}, 10000)
    assert trace.terminated
    assert trace.final[1]["g"] == 10
    assert trace.steps.count(RETURN) == 11


def test_division_by_zero_is_stuck() -> None:
    program = parse_program("proc main() { x := 1 / y; }")
    trace = concrete_run(program, {"x": 0, "y": 0}, 100)
    assert trace.stuck


def test_missing_global_rejected(div_program) -> None:
    with pytest.raises(ValueError):
        concrete_run(div_program, {"x": 1}, 10)


def _check_steps(program, trace) -> None:
    """Each intraprocedural step agrees with the edge's action."""
    for (_, before), step, (_, after) in zip(trace.points, trace.steps, trace.points[1:]):
        if step == RETURN:
            continue
        a = program.edges[step].action
        if isinstance(a, Assign):
            assert after[a.var] == eval_exp(a.exp, before)
            assert {k: v for k, v in after.items() if k != a.var} == {
                k: v for k, v in before.items() if k != a.var
            }
        elif isinstance(a, Assume):
            assert eval_exp(a.exp, before) >= 0
            assert after == before
        elif isinstance(a, Havoc):
            assert {k for k in after if after[k] != before[k]} <= {a.var}


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=60, deadline=None)
def test_traces_follow_edge_semantics(seed) -> None:
    rng = random.Random(seed)
    if seed % 2:
        program = random_source_program(rng, n_procs=rng.randint(1, 3))
    else:
        program = random_graph_program(rng, n_procs=rng.randint(1, 3))
    assert validate(program) == []
    initial = {x: rng.randint(-4, 4) for x in program.global_vars}
    trace = concrete_run(program, initial, 300, rng_seed=seed)
    _check_steps(program, trace)
    again = concrete_run(program, initial, 300, rng_seed=seed)
    assert again.points == trace.points and again.steps == trace.steps


def _assignments_after_guards(graph, v, env):
    """Assignments reachable from v through enabled guard edges only."""
    found, stack, seen = set(), [v], {v}
    while stack:
        u = stack.pop()
        for e in graph.out_edges[u]:
            if isinstance(e.action, Assume):
                if eval_exp(e.action.exp, env) >= 0 and e.tgt not in seen:
                    seen.add(e.tgt)
                    stack.append(e.tgt)
            else:
                found.add(str(e.action))
    return found


comparisons = st.sampled_from(["<", "<=", ">", ">=", "==", "!="])


@given(comparisons, comparisons, st.sampled_from(["&&", "||", None]), st.booleans())
@settings(max_examples=100, deadline=None)
def test_loop_guard_and_negation_are_complementary(op1, op2, conn, negate) -> None:
    from pathalg.lang import eval_bexp

    cond = f"a {op1} b"
    if conn:
        cond = f"({cond}) {conn} (b {op2} 2)"
    if negate:
        cond = f"!({cond})"
    program = parse_program(f"proc main() {{ while ({cond}) {{ c := 100; }} c := 200; }}")
    graph = program.procedures[0].graph
    header = graph.entry
    bexp = parse_program(f"proc main() {{ assert({cond}); }}").asserts
    (b,) = bexp.values()
    for a in range(-2, 4):
        for bb in range(-2, 4):
            env = {"a": a, "b": bb, "c": 0}
            reached = _assignments_after_guards(graph, header, env)
            holds = eval_bexp(b, env)
            assert ("c := 100" in reached) == holds
            assert ("c := 200" in reached) == (not holds)
