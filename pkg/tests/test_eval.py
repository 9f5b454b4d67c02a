from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import tf
from pathalg.eval import (
    BudgetExceeded,
    Interpretation,
    MissingSummary,
    SummaryAssignment,
    check_correctness_sampled,
    check_locality,
    interpret,
    intraproc_analyze,
    join_over_paths_oracle,
    sample_paths,
)
from pathalg.lang import parse_program
from pathalg.lradom import LraDomain
from pathalg.randprog import random_graph_program
from pathalg.regex import EPS, Edge, Star
from pathalg.reldom import RelDomain, RelValue


def test_interpret_eps_is_one(div_program) -> None:
    for d in (RelDomain(div_program.variables, 2), LraDomain(div_program.variables)):
        interp = Interpretation.for_program(div_program, d)
        assert d.equal(interpret(interp, EPS), d.one())


def test_star_of_increment_is_full_relation() -> None:
    program = parse_program("proc main() { x := x + 1; }")
    d = RelDomain(("x",), 4)
    interp = Interpretation.for_program(program, d)
    (e,) = program.procedures[0].graph.edges
    value = interpret(interp, Star(Edge(e.id)))
    assert value.pairs() == {((i,), (j,)) for i in range(4) for j in range(4)}


def test_call_without_summary_fails(interproc_program) -> None:
    d = LraDomain(interproc_program.variables)
    interp = Interpretation.for_program(interproc_program, d)
    call = next(e for e in interproc_program.edges.values() if e.action.__class__.__name__ == "Call")
    with pytest.raises(MissingSummary):
        interp.edge_value(call.id)
    summary = SummaryAssignment({0: d.one(), 1: d.one()})
    assert summary.is_total(2) and not SummaryAssignment({0: d.one()}).is_total(2)
    assert d.equal(interp.with_summary(summary).edge_value(call.id), d.one())


def test_entry_value_is_one(div_program) -> None:
    d = LraDomain(div_program.variables)
    analysis = intraproc_analyze(div_program, Interpretation.for_program(div_program, d))
    assert d.equal(analysis[div_program.procedures[0].graph.entry], d.one())


def test_division_example_matches_oracle_over_relations(div_program) -> None:
    d = RelDomain(div_program.variables, 3)
    interp = Interpretation.for_program(div_program, d)
    v8 = div_program.vertex_by_name("v8")
    assert intraproc_analyze(div_program, interp)[v8] == join_over_paths_oracle(div_program, interp, v8)


def test_oracle_two_edges_and_unreachable() -> None:
    program = parse_program("proc main() { x := 1; x := x + 1; }")
    d = RelDomain(("x",), 3)
    interp = Interpretation.for_program(program, d)
    g = program.procedures[0].graph
    e1, e2 = g.edges
    expected = d.times(interp.edge_value(e1.id), interp.edge_value(e2.id))
    assert join_over_paths_oracle(program, interp, g.exit) == expected
    dead = parse_program("proc main() { assume(0 > 1); x := 2; }")
    interp = Interpretation.for_program(dead, d)
    g = dead.procedures[0].graph
    assert intraproc_analyze(dead, interp)[g.exit] == d.zero()


def test_oracle_budget() -> None:
    program = parse_program("proc main() { while (x < 100) { x := x + 1; } }")
    d = RelDomain(("x",), 5)
    interp = Interpretation.for_program(program, d)
    with pytest.raises(BudgetExceeded):
        join_over_paths_oracle(program, interp, program.procedures[0].graph.exit, budget=2)


def test_division_example_sampled_correctness(div_program) -> None:
    d = LraDomain(div_program.variables)
    interp = Interpretation.for_program(div_program, d)
    report = check_correctness_sampled(div_program, interp, div_program.vertex_by_name("v8"), 50, 30)
    assert report.checked == 50
    assert report.ok


def test_empty_path_at_entry(div_program) -> None:
    d = LraDomain(div_program.variables)
    interp = Interpretation.for_program(div_program, d)
    entry = div_program.procedures[0].graph.entry
    assert sample_paths(div_program, entry, 3, 0) == [(), (), ()]
    assert check_correctness_sampled(div_program, interp, entry, 3, 0).ok


def test_sampled_paths_are_paths(div_program) -> None:
    g = div_program.procedures[0].graph
    v8 = div_program.vertex_by_name("v8")
    for word in sample_paths(div_program, v8, 30, 25, seed=4):
        v = g.entry
        for eid in word:
            e = div_program.edges[eid]
            assert e.src == v
            v = e.tgt
        assert v == v8 and len(word) <= 25


def test_locality(interproc_program) -> None:
    for d in (RelDomain(interproc_program.variables, 2), LraDomain(interproc_program.variables)):
        assert check_locality(interproc_program, Interpretation.for_program(interproc_program, d)) == []


def test_locality_detects_a_leaky_edge_semantics(interproc_program) -> None:
    d = LraDomain(interproc_program.variables)
    # main's first edge also writes foo's local x
    leaky = lambda e: tf("g' = 20 /\\ p0' = p0 /\\ x' = 0") if e.id == 0 else d.sem_edge(e)
    interp = Interpretation(d, interproc_program.edges, sem_edge=leaky)
    assert check_locality(interproc_program, interp) == [(0, "x")]


@given(st.integers(min_value=0, max_value=10**6), st.sampled_from(["rel", "lra"]))
@settings(max_examples=30, deadline=None)
def test_sampled_correctness_on_random_programs(seed, kind) -> None:
    rng = random.Random(seed)
    program = random_graph_program(rng, max_vertices=7, n_globals=2, max_locals=0)
    d = RelDomain(program.variables, 3) if kind == "rel" else LraDomain(program.variables)
    interp = Interpretation.for_program(program, d)
    analysis = intraproc_analyze(program, interp)
    for v in program.procedures[0].graph.vertices:
        report = check_correctness_sampled(program, interp, v, 5, 12, seed=seed, analysis=analysis)
        assert report.ok
