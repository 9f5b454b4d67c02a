from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from conftest import poly
from pathalg.poly import (
    Inconsistent,
    Poly,
    _row,
    feasible,
    fm_eliminate,
    gauss,
    project_rows,
    render_poly,
    render_relation,
    row_to_poly,
    rows_feasible,
)

SYMS = ("a", "b", "c")

small_polys = st.builds(
    lambda coeffs, const: sum(
        (Poly.sym(s, c) for s, c in zip(SYMS, coeffs)), Poly.const(const)
    ),
    st.lists(st.integers(-3, 3), min_size=3, max_size=3),
    st.integers(-4, 4),
)
envs = st.fixed_dictionaries({s: st.integers(-5, 5) for s in SYMS})


def test_render() -> None:
    assert render_poly(poly("x' - q'*y' - r'")) == "-q'*y' - r' + x'"
    assert render_poly(Poly()) == "0"
    assert render_relation(poly("x - y - 1"), ">=") == "x >= y + 1"
    assert render_relation(poly("0 - t"), ">=") == "t <= 0"
    assert render_relation(poly("r' - r + y"), "=") == "r' + y = r"


def test_substitution_and_degree() -> None:
    p = poly("r' - r + y*k")
    q = p.substitute("k", poly("q' - q"))
    assert q.degree() == 2
    assert q == poly("r' - r + y*q' - y*q")
    assert p.occurs_nonlinearly("k") and not p.occurs_nonlinearly("r")


def test_gauss_solves_and_detects_inconsistency() -> None:
    rank = lambda s: (0 if s == "a" else 1, s)
    solved, residual = gauss([poly("a - b - 1"), poly("b - 2")], rank)
    assert solved["a"] == Poly.const(3) and solved["b"] == Poly.const(2)
    assert residual == []
    with pytest.raises(Inconsistent):
        gauss([poly("a - 1"), poly("a - 2")], rank)


def test_gauss_respects_allowed_pivots() -> None:
    solved, residual = gauss([poly("a - b")], lambda s: (s,), allowed=lambda s: s == "b")
    assert list(solved) == ["b"]
    solved, residual = gauss([poly("a*b - 1")], lambda s: (s,))
    assert solved == {} and residual == [poly("a*b - 1")]


def test_feasible_examples() -> None:
    assert feasible([poly("a - 1"), poly("3 - a")])
    assert not feasible([poly("a - 3"), poly("1 - a")])
    assert not feasible([], eqs=[poly("a - 1")], strict=[poly("1 - a")])
    # monomials are independent dimensions: a*b >= 1, a*b <= 0 is infeasible
    assert not feasible([poly("a*b - 1"), poly("0 - a*b")])


def test_fm_eliminate_example() -> None:
    rows = [_row(poly("a - b")), _row(poly("c - a"))]
    (out,) = fm_eliminate(rows, ("a",))
    assert row_to_poly(out) == poly("c - b")


def test_fm_budget_drops_constraints() -> None:
    rows = [_row(poly(f"a - {i}")) for i in range(5)] + [_row(poly(f"{i} - a")) for i in range(5)]
    assert fm_eliminate(rows, ("a",), budget=4) == []


def _scipy_feasible(ges) -> bool:
    A, b = [], []
    for g in ges:
        A.append([-float(g.linear_coeff(s)) for s in SYMS])
        b.append(float(g.constant()))
    res = linprog(np.zeros(3), A_ub=np.array(A), b_ub=np.array(b), bounds=[(None, None)] * 3, method="highs")
    return res.status == 0


@given(st.lists(small_polys, min_size=1, max_size=7))
@settings(max_examples=200, deadline=None)
def test_feasibility_agrees_with_linear_programming(ges) -> None:
    assert feasible(ges) == _scipy_feasible(ges)


@given(st.lists(small_polys, min_size=1, max_size=6), envs)
@settings(max_examples=200, deadline=None)
def test_projection_keeps_every_model(ges, env) -> None:
    if any(g.evaluate(env) < 0 for g in ges):
        return
    rows = project_rows([_row(g) for g in ges], ["a"])
    for r in rows:
        assert row_to_poly(r).evaluate(env) >= 0


@given(st.lists(small_polys, min_size=1, max_size=6))
@settings(max_examples=150, deadline=None)
def test_projection_is_exact_over_rationals(ges) -> None:
    """Every point of the projection extends to a point of the original set."""
    rows = project_rows([_row(g) for g in ges], ["a"])
    projected = [row_to_poly(r) for r in rows]
    rng = random.Random(0)
    for _ in range(5):
        b, c = Fraction(rng.randint(-8, 8), 2), Fraction(rng.randint(-8, 8), 2)
        if not all(p.evaluate({"b": b, "c": c}) >= 0 for p in projected):
            continue
        fixed = [g.substitute_all({"b": Poly.const(b), "c": Poly.const(c)}) for g in ges]
        assert feasible(fixed)


@given(small_polys, small_polys, envs)
@settings(max_examples=200, deadline=None)
def test_ring_laws_under_evaluation(p, q, env) -> None:
    assert (p * q).evaluate(env) == p.evaluate(env) * q.evaluate(env)
    assert (p + q).evaluate(env) == p.evaluate(env) + q.evaluate(env)
    assert (p - q) + q == p
    assert p * q == q * p


@given(small_polys, small_polys, envs)
@settings(max_examples=200, deadline=None)
def test_substitution_commutes_with_evaluation(p, q, env) -> None:
    value = q.evaluate(env)
    lhs = p.substitute("a", q).evaluate(env)
    rhs = p.evaluate({**env, "a": value})
    assert lhs == rhs
