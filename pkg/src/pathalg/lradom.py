"""Transition formulas over linear (and polynomial) arithmetic.

A transition formula relates pre-state symbols ``x`` to post-state symbols
``x'``.  It is kept in disjunctive normal form: a :class:`TransFormula` is a
tuple of :class:`Cube` values, each a conjunction of equalities ``p = 0`` and
inequalities ``p >= 0`` over exact rationals.

Sequencing introduces intermediate symbols ``x''`` which are eliminated by
Gaussian substitution where an equality permits it and by Fourier-Motzkin
otherwise.  Iteration recognises induction variables (``x' = x + f`` with
``f`` over variables of lower strata), sums their closed forms over a loop
counter ``%k`` and eliminates the counter.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .algebra import Domain
from .lang import Assign, Assume, BinOp, Call, Edge, Havoc, Num, Var, exp_has_division
from .poly import (
    ONE,
    ZERO,
    Inconsistent,
    Poly,
    feasible,
    gauss,
    project_rows,
    render_poly,
    render_relation,
    row_to_poly,
    solvable_in,
    _row,
)

K = "%k"
DEFAULT_CAP = 16


def prime(x: str, n: int = 1) -> str:
    return x + "'" * n


def primes(s: str) -> int:
    return len(s) - len(s.rstrip("'"))


def unprimed(s: str) -> str:
    return s.rstrip("'")


def _rank(s: str) -> tuple:
    """Pivot priority: intermediate symbols, loop counter, post-state, pre-state."""
    p = primes(s)
    if p >= 2:
        return (0, s)
    if s == K:
        return (1, s)
    if p == 1:
        return (2, s)
    return (3, s)


def _normalize_eq(p: Poly) -> Poly:
    p = p.primitive()
    if p.leading()[1] < 0:
        p = -p
    return p


class Cube:
    """A satisfiable conjunction in solved form.

    ``solved`` maps pivot symbols to values mentioning no pivot; ``residual``
    holds equalities without a linear pivot; ``ges`` holds irredundant
    inequalities, none of which is an implicit equality.
    """

    __slots__ = ("solved", "residual", "ges", "key", "_hash", "_eq_rows", "_constraints", "_symbols")

    def __init__(self, solved: Mapping[str, Poly], residual: Sequence[Poly], ges: Sequence[Poly]):
        self.solved: Dict[str, Poly] = dict(sorted(solved.items(), key=lambda t: _display_rank(t[0])))
        self.residual: Tuple[Poly, ...] = tuple(sorted(set(residual)))
        self.ges: Tuple[Poly, ...] = tuple(sorted(set(ges)))
        self.key = (
            tuple(sorted((s, v.key) for s, v in self.solved.items())),
            tuple(p.key for p in self.residual),
            tuple(g.key for g in self.ges),
        )
        self._hash = hash(self.key)
        self._eq_rows = None
        self._constraints = None
        self._symbols = None

    def __eq__(self, other) -> bool:
        return isinstance(other, Cube) and self.key == other.key

    def __lt__(self, other: "Cube") -> bool:
        return self.key < other.key

    def __hash__(self) -> int:
        return self._hash

    @property
    def eq_rows(self) -> List[Poly]:
        if self._eq_rows is None:
            rows = [Poly.sym(s) - v for s, v in self.solved.items()]
            rows.extend(self.residual)
            self._eq_rows = tuple(rows)
        return list(self._eq_rows)

    @property
    def constraints(self) -> Tuple[Tuple[str, Poly], ...]:
        if self._constraints is None:
            self._constraints = tuple([("eq", p) for p in self.eq_rows] + [("ge", g) for g in self.ges])
        return self._constraints

    def symbols(self) -> frozenset:
        if self._symbols is None:
            out = set()
            for _, p in self.constraints:
                out |= p.symbols()
            self._symbols = frozenset(out)
        return self._symbols

    def __str__(self) -> str:
        return render_cube(self)

    def __repr__(self) -> str:
        return f"Cube({render_cube(self)})"


def _display_rank(s: str) -> tuple:
    return (-primes(s), unprimed(s))


TRUE_CUBE = Cube({}, (), ())

_CUBE_CACHE: Dict[tuple, Optional[Cube]] = {}


def make_cube(eqs: Iterable[Poly], ges: Iterable[Poly]) -> Optional[Cube]:
    """Canonical cube for ``eqs = 0 ∧ ges >= 0``, or None if infeasible."""
    eqs = tuple(e for e in eqs if e)
    ges = tuple(ges)
    key = (frozenset(eqs), frozenset(ges))
    if key in _CUBE_CACHE:
        return _CUBE_CACHE[key]
    result = _build_cube(list(eqs), list(ges))
    if len(_CUBE_CACHE) > 200000:
        _CUBE_CACHE.clear()
    _CUBE_CACHE[key] = result
    return result


def _build_cube(eqs: List[Poly], ges: List[Poly]) -> Optional[Cube]:
    while True:
        try:
            solved, residual = gauss(eqs, _rank)
        except Inconsistent:
            return None
        reduced = []
        for g in ges:
            g = g.substitute_all(solved)
            if g.is_const():
                if g.constant() < 0:
                    return None
                continue
            reduced.append(g.primitive())
        reduced = sorted(set(reduced))
        residual = sorted({_normalize_eq(r) for r in residual})
        if not feasible(reduced, residual):
            return None
        kept: List[Poly] = []
        promoted = None
        for i, g in enumerate(reduced):
            others = kept + reduced[i + 1 :]
            if not feasible(others, residual, strict=[-g]):
                continue
            if not feasible(reduced, residual, strict=[g]):
                promoted = g
                break
            kept.append(g)
        if promoted is None:
            return Cube(solved, residual, kept)
        eqs = [Poly.sym(s) - v for s, v in solved.items()] + residual + [promoted]
        ges = [g for g in reduced if g != promoted]


def project_cube(eqs: Iterable[Poly], ges: Iterable[Poly], symbols: Iterable[str]) -> Optional[Cube]:
    """Cube for ``∃symbols. eqs = 0 ∧ ges >= 0`` (exact or a sound over-approximation)."""
    syms = frozenset(symbols)
    rank = lambda s: (0, s) if s in syms else (1,) + _rank(s)  # noqa: E731
    try:
        solved, residual = gauss(list(eqs), rank)
    except Inconsistent:
        return None
    keep_eqs: List[Poly] = []
    keep_ges: List[Poly] = []
    rows = []
    for s, v in solved.items():
        if s in syms:
            continue
        row = Poly.sym(s) - v
        if row.symbols() & syms:
            rows.append(_row(row))
            rows.append(_row(-row))
        else:
            keep_eqs.append(row)
    for r in residual:
        if r.symbols() & syms:
            rows.append(_row(r))
            rows.append(_row(-r))
        else:
            keep_eqs.append(r)
    for g in ges:
        g = g.substitute_all(solved)
        if g.symbols() & syms:
            rows.append(_row(g))
        else:
            keep_ges.append(g)
    if rows:
        # infeasibility must survive the projection
        if not feasible([row_to_poly(r) for r in rows] + keep_ges, keep_eqs):
            return None
        keep_ges.extend(row_to_poly(r) for r in project_rows(rows, syms))
    return make_cube(keep_eqs, keep_ges)


# ---------------------------------------------------------------------------
# Entailment

_ENTAIL_CACHE: Dict[tuple, bool] = {}


def cube_entails(c: Cube, kind: str, target: Poly) -> bool:
    """Does the cube imply ``target = 0`` (kind "eq") or ``target >= 0`` ("ge")?"""
    key = (c, kind, target)
    hit = _ENTAIL_CACHE.get(key)
    if hit is not None:
        return hit
    t = target.substitute_all(c.solved)
    if kind == "eq":
        if not t:
            result = True
        elif t.is_const():
            result = False
        else:
            result = _ge_entailed(c, t) and _ge_entailed(c, -t)
    elif t.is_const():
        result = t.constant() >= 0
    else:
        result = _ge_entailed(c, t)
    if len(_ENTAIL_CACHE) > 500000:
        _ENTAIL_CACHE.clear()
    _ENTAIL_CACHE[key] = result
    return result


def _ge_entailed(c: Cube, t: Poly) -> bool:
    return not feasible(c.ges, c.residual, strict=[-t])


_LEQ_CACHE: Dict[Tuple[Cube, Cube], bool] = {}


def cube_leq(c: Cube, d: Cube) -> bool:
    if c == d:
        return True
    hit = _LEQ_CACHE.get((c, d))
    if hit is None:
        hit = all(cube_entails(c, kind, p) for kind, p in d.constraints)
        if len(_LEQ_CACHE) > 500000:
            _LEQ_CACHE.clear()
        _LEQ_CACHE[(c, d)] = hit
    return hit


# ---------------------------------------------------------------------------
# Formulas


class TransFormula:
    """A disjunction of cubes; the empty disjunction is ``false``."""

    __slots__ = ("cubes", "_hash")

    def __init__(self, cubes: Iterable[Cube]):
        self.cubes: Tuple[Cube, ...] = tuple(cubes)
        self._hash = hash(self.cubes)

    def __eq__(self, other) -> bool:
        return isinstance(other, TransFormula) and self.cubes == other.cubes

    def __hash__(self) -> int:
        return self._hash

    def is_false(self) -> bool:
        return not self.cubes

    def is_true(self) -> bool:
        return TRUE_CUBE in self.cubes

    def __str__(self) -> str:
        return render_formula(self)

    def __repr__(self) -> str:
        return f"TransFormula({render_formula(self)})"


FALSE = TransFormula(())
TRUE = TransFormula((TRUE_CUBE,))


def formula(cubes: Iterable[Optional[Cube]], cap: int = DEFAULT_CAP) -> TransFormula:
    """Normalise a list of cubes: drop infeasible and subsumed cubes, then cap."""
    cubes = sorted({c for c in cubes if c is not None})
    kept = _prune(cubes)
    while len(kept) > cap:
        i, j = _most_similar(kept)
        merged = hull(kept[i], kept[j])
        rest = [c for n, c in enumerate(kept) if n not in (i, j)]
        kept = _prune(sorted(set(rest + [merged])))
    return TransFormula(kept)


def _prune(cubes: Sequence[Cube]) -> List[Cube]:
    if any(c == TRUE_CUBE for c in cubes):
        return [TRUE_CUBE]
    kept: List[Cube] = []
    for c in cubes:
        if any(cube_leq(c, d) for d in kept):
            continue
        kept = [d for d in kept if not cube_leq(d, c)]
        kept.append(c)
    return sorted(kept)


def _most_similar(cubes: Sequence[Cube]) -> Tuple[int, int]:
    sets = [{(k, p) for k, p in c.constraints} for c in cubes]
    best, pair = -1, (0, 1)
    for i in range(len(cubes)):
        for j in range(i + 1, len(cubes)):
            score = len(sets[i] & sets[j])
            if score > best:
                best, pair = score, (i, j)
    return pair


def entails(phi: TransFormula, psi: TransFormula) -> bool:
    """Cube-wise entailment: every cube of ``phi`` implies some cube of ``psi``."""
    if psi.is_true():
        return True
    return all(any(cube_leq(c, d) for d in psi.cubes) for c in phi.cubes)


def equivalent(phi: TransFormula, psi: TransFormula) -> bool:
    return phi == psi or (entails(phi, psi) and entails(psi, phi))


def identity_cube(variables: Sequence[str]) -> Cube:
    return make_cube([Poly.sym(prime(x)) - Poly.sym(x) for x in variables], [])


# ---------------------------------------------------------------------------
# Affine hull


def _nullspace(rows: List[List[Fraction]], ncols: int) -> List[List[Fraction]]:
    """Basis of {v : rows·v = 0} by reduced row echelon form."""
    m = [list(r) for r in rows]
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][col]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for i, pcol in enumerate(pivots):
            v[pcol] = -m[i][fcol]
        basis.append(v)
    return basis


def span_intersection(a: Sequence[Poly], b: Sequence[Poly]) -> List[Poly]:
    """Equalities in both linear spans, treating monomials as coordinates."""
    a, b = list(a), list(b)
    if not a or not b:
        return []
    monos = sorted({m for p in a + b for m in p.terms})
    # columns of the system: coefficients λ (for a) then μ (for b); one row per monomial
    rows = []
    for mono in monos:
        rows.append([p.terms.get(mono, Fraction(0)) for p in a] + [-p.terms.get(mono, Fraction(0)) for p in b])
    out = []
    for v in _nullspace(rows, len(a) + len(b)):
        q = ZERO
        for coef, p in zip(v[: len(a)], a):
            if coef:
                q = q + p.scale(coef)
        if q:
            out.append(_normalize_eq(q))
    return out


def _halves(rows: Iterable[Poly]) -> List[Poly]:
    out = []
    for r in rows:
        out.append(r)
        out.append(-r)
    return out


def hull(c: Cube, d: Cube) -> Cube:
    """A single cube implied by both ``c`` and ``d``."""
    if cube_leq(c, d):
        return d
    if cube_leq(d, c):
        return c
    eqs = span_intersection(c.eq_rows, d.eq_rows)
    ges = [g for g in list(c.ges) + _halves(c.eq_rows) if cube_entails(d, "ge", g)]
    ges += [g for g in list(d.ges) + _halves(d.eq_rows) if cube_entails(c, "ge", g)]
    out = make_cube(eqs, ges)
    return out if out is not None else TRUE_CUBE


def hull_all(cubes: Sequence[Cube]) -> Optional[Cube]:
    if not cubes:
        return None
    return reduce(hull, cubes)


# ---------------------------------------------------------------------------
# Operations


def _rename(p: Poly, frm: int, to: int) -> Poly:
    def go(s: str) -> str:
        if s != K and primes(s) == frm:
            return prime(unprimed(s), to)
        return s

    return p.rename(go)


def seq_cube(c: Cube, d: Cube) -> Optional[Cube]:
    eqs = [_rename(p, 1, 2) for p in c.eq_rows] + [_rename(p, 0, 2) for p in d.eq_rows]
    ges = [_rename(p, 1, 2) for p in c.ges] + [_rename(p, 0, 2) for p in d.ges]
    mids = {s for p in eqs + ges for s in p.symbols() if primes(s) == 2}
    return project_cube(eqs, ges, mids)


def lra_seq(phi: TransFormula, psi: TransFormula, cap: int = DEFAULT_CAP) -> TransFormula:
    return formula((seq_cube(c, d) for c in phi.cubes for d in psi.cubes), cap)


def lra_plus(phi: TransFormula, psi: TransFormula, cap: int = DEFAULT_CAP) -> TransFormula:
    return formula(phi.cubes + psi.cubes, cap)


def lra_exists(x: str, phi: TransFormula, cap: int = DEFAULT_CAP) -> TransFormula:
    xp = Poly.sym(prime(x)) - Poly.sym(x)
    out = []
    for c in phi.cubes:
        p = project_cube(c.eq_rows, c.ges, {x, prime(x)})
        if p is not None:
            out.append(make_cube(p.eq_rows + [xp], p.ges))
    return formula(out, cap)


# ---------------------------------------------------------------------------
# Induction variables and closed forms


@dataclass(frozen=True)
class Recurrence:
    """``x' = x + increment`` holds in every disjunct; ``closed_form`` is x after %k steps."""

    var: str
    increment: Poly
    stratum: int
    closed_form: Poly

    def __str__(self) -> str:
        return f"{self.var}' = {render_poly(Poly.sym(self.var) + self.increment)} (stratum {self.stratum})"


def _k(n: int) -> Poly:
    return Poly.sym(K).power(n)


# Σ_{i<k} i^p as a polynomial in k
_SUM_POWERS = {
    0: _k(1),
    1: (_k(2) - _k(1)).scale(Fraction(1, 2)),
    2: (_k(3).scale(2) - _k(2).scale(3) + _k(1)).scale(Fraction(1, 6)),
    3: (_k(4) - _k(3).scale(2) + _k(2)).scale(Fraction(1, 4)),
}


def sum_below_k(p: Poly) -> Poly:
    """``Σ_{i<%k} p[%k := i]``."""
    out = ZERO
    for m, c in p.terms.items():
        j = m.count(K)
        if j not in _SUM_POWERS:
            raise ValueError("degree in the loop counter too high")
        rest = tuple(s for s in m if s != K)
        out = out + Poly({rest: c}) * _SUM_POWERS[j]
    return out


def substitute_simultaneous(p: Poly, mapping: Mapping[str, Poly]) -> Poly:
    tmp = {s: "#" + s for s in mapping}
    q = p.rename(lambda s: tmp.get(s, s))
    for s, v in mapping.items():
        q = q.substitute(tmp[s], v)
    return q


def detect_induction_vars(phi: TransFormula, variables: Sequence[str]) -> List[Recurrence]:
    cubes = phi.cubes
    if not cubes:
        return []
    # solve each cube for post-state symbols only, so that pre-state
    # equalities such as ``y = 1`` do not get folded into ``y' = 1``
    post_solved = []
    for c in cubes:
        solved, _ = gauss(c.eq_rows, _rank, allowed=lambda s: primes(s) == 1)
        post_solved.append(solved)
    increments: Dict[str, Poly] = {}
    for x in variables:
        xp = prime(x)
        candidates: List[Poly] = [ZERO]
        for solved in post_solved:
            v = solved.get(xp)
            if v is None or any(primes(s) for s in v.symbols()):
                continue
            f = v - Poly.sym(x)
            if f.degree() > 1 or f.mentions(x) or K in f.symbols() or f in candidates:
                continue
            candidates.append(f)
        for f in candidates:
            target = Poly.sym(xp) - Poly.sym(x) - f
            if all(cube_entails(c, "eq", target) for c in cubes):
                increments[x] = f
                break
    strata: Dict[str, int] = {}
    closed: Dict[str, Poly] = {}
    rejected = set()
    changed = True
    while changed:
        changed = False
        for x in variables:
            if x in strata or x in rejected or x not in increments:
                continue
            f = increments[x]
            deps = f.symbols()
            if not all(d in strata for d in deps):
                continue
            summand = substitute_simultaneous(f, {d: closed[d] for d in deps})
            try:
                cf = Poly.sym(x) + sum_below_k(summand)
            except ValueError:
                rejected.add(x)
                continue
            if max((m.count(K) for m in cf.terms), default=0) > 2:
                rejected.add(x)
                continue
            strata[x] = 1 + max(strata[d] for d in deps) if deps else 0
            closed[x] = cf
            changed = True
    return [Recurrence(x, increments[x], strata[x], closed[x]) for x in variables if x in strata]


def _closed_form_constraints(recs: Sequence[Recurrence]) -> Tuple[List[Poly], List[Poly]]:
    eqs = [Poly.sym(prime(r.var)) - r.closed_form for r in recs]
    order = {r.var: i for i, r in enumerate(recs)}

    def key(p: Poly):
        var = unprimed(next(s for s in sorted(p.symbols()) if primes(s) == 1))
        return (not solvable_in(p, K), abs(p.linear_coeff(K)) != 1, order[var])

    eqs.sort(key=key)
    ges = []
    for r in recs:
        if r.stratum == 0 and r.increment.is_const():
            c = r.increment.constant()
            diff = Poly.sym(prime(r.var)) - Poly.sym(r.var)
            if c > 0:
                ges.append(diff)
            elif c < 0:
                ges.append(-diff)
    return eqs, ges


def lra_star(phi: TransFormula, variables: Sequence[str], cap: int = DEFAULT_CAP) -> TransFormula:
    """``∃%k >= 0`` of the closed forms of the induction variables."""
    if phi.is_false():
        return TransFormula((identity_cube(variables),))
    recs = detect_induction_vars(phi, variables)
    eqs, ges = _closed_form_constraints(recs)
    cube = project_cube(eqs, ges + [Poly.sym(K)], {K})
    return formula([identity_cube(variables), cube], cap)


def invariant_vars(phi: TransFormula, variables: Sequence[str]) -> List[str]:
    return [
        x
        for x in variables
        if all(cube_entails(c, "eq", Poly.sym(prime(x)) - Poly.sym(x)) for c in phi.cubes)
    ]


def partition_by_invariants(phi: TransFormula, variables: Sequence[str]) -> List[List[Cube]]:
    """Group cubes whose projections onto the invariant variables overlap."""
    inv = set(invariant_vars(phi, variables))
    cubes = list(phi.cubes)
    projections = []
    for c in cubes:
        drop = {s for s in c.symbols() if s not in inv}
        projections.append(project_cube(c.eq_rows, c.ges, drop))
    parent = list(range(len(cubes)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(cubes)):
        for j in range(i + 1, len(cubes)):
            if find(i) == find(j):
                continue
            a, b = projections[i], projections[j]
            if a is None or b is None:
                continue
            if make_cube(a.eq_rows + b.eq_rows, list(a.ges) + list(b.ges)) is not None:
                parent[find(j)] = find(i)
    groups: Dict[int, List[Cube]] = {}
    for i, c in enumerate(cubes):
        groups.setdefault(find(i), []).append(c)
    return [groups[k] for k in sorted(groups)]


def post_condition(c: Cube) -> Optional[Cube]:
    """Project a cube onto its post-state symbols."""
    drop = {s for s in c.symbols() if primes(s) == 0}
    return project_cube(c.eq_rows, c.ges, drop)


def lra_star_refined(phi: TransFormula, variables: Sequence[str], cap: int = DEFAULT_CAP) -> TransFormula:
    """Iteration that remembers the last step.

    The disjuncts are grouped by their invariant-variable guards.  Within a
    group G, one or more iterations satisfy the closed forms of G with
    ``%k >= 1`` and end in the post-state of some disjunct of G.
    """
    one = identity_cube(variables)
    if phi.is_false():
        return TransFormula((one,))
    parts = [one]
    for group in partition_by_invariants(phi, variables):
        recs = detect_induction_vars(TransFormula(group), variables)
        eqs, ges = _closed_form_constraints(recs)
        ges = ges + [Poly.sym(K) - Poly.const(1)]
        for c in group:
            post = post_condition(c)
            if post is None:
                continue
            parts.append(project_cube(eqs + post.eq_rows, ges + list(post.ges), {K}))
    return formula(parts, cap)


# ---------------------------------------------------------------------------
# Widening


def widen_trivial(phi: TransFormula, psi: TransFormula) -> TransFormula:
    return phi if equivalent(phi, psi) else TRUE


def widen_drop(phi: TransFormula, psi: TransFormula) -> TransFormula:
    """Keep the constraints of the hull of ``phi`` that ``psi`` also satisfies."""
    if entails(psi, phi):
        return phi
    if phi.is_false():
        return TransFormula((hull_all(psi.cubes),))
    h = hull_all(phi.cubes)
    eqs = h.eq_rows
    for d in psi.cubes:
        eqs = span_intersection(eqs, d.eq_rows)
    ges = [g for g in list(h.ges) + _halves(h.eq_rows) if all(cube_entails(d, "ge", g) for d in psi.cubes)]
    out = make_cube(eqs, ges)
    return TransFormula((out if out is not None else TRUE_CUBE,))


# ---------------------------------------------------------------------------
# Edge semantics and evaluation


def exp_to_poly(e) -> Poly:
    if isinstance(e, Num):
        return Poly.const(e.value)
    if isinstance(e, Var):
        return Poly.sym(e.name)
    a, b = exp_to_poly(e.left), exp_to_poly(e.right)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    raise ValueError("division has no polynomial translation")


def lra_sem_edge(e: Edge, variables: Sequence[str]) -> TransFormula:
    """Formula of an intraprocedural edge.

    Assignments with division become havoc and guards with division are
    dropped; both are sound over-approximations.
    """
    action = e.action

    def frame(skip: Iterable[str]) -> List[Poly]:
        skip = set(skip)
        return [Poly.sym(prime(y)) - Poly.sym(y) for y in variables if y not in skip]

    if isinstance(action, Assign):
        eqs = frame([action.var])
        if not exp_has_division(action.exp):
            eqs.append(Poly.sym(prime(action.var)) - exp_to_poly(action.exp))
        return formula([make_cube(eqs, [])])
    if isinstance(action, Assume):
        ges = [] if exp_has_division(action.exp) else [exp_to_poly(action.exp)]
        return formula([make_cube(frame([]), ges)])
    if isinstance(action, Havoc):
        return formula([make_cube(frame([action.var]), [])])
    if isinstance(action, Call):
        raise TypeError("call edges are interpreted by summaries")
    raise TypeError(action)


def eval_formula(phi: TransFormula, pre: Mapping[str, int], post: Mapping[str, int]) -> bool:
    """Exact truth of ``phi`` on a pair of integer environments."""
    env: Dict[str, Fraction] = {}
    for x, v in pre.items():
        env[x] = Fraction(v)
    for x, v in post.items():
        env[prime(x)] = Fraction(v)
    for c in phi.cubes:
        if all(p.evaluate(env) == 0 for p in c.eq_rows) and all(g.evaluate(env) >= 0 for g in c.ges):
            return True
    return False


# ---------------------------------------------------------------------------
# Rendering


def render_cube(c: Cube) -> str:
    if c == TRUE_CUBE:
        return "true"
    parts = [f"{s} = {render_poly(v)}" for s, v in c.solved.items()]
    parts += [render_relation(p, "=") for p in c.residual]
    parts += [render_relation(g, ">=") for g in c.ges]
    return " /\\ ".join(parts)


def render_formula(phi: TransFormula) -> str:
    if not phi.cubes:
        return "false"
    if len(phi.cubes) == 1:
        return render_cube(phi.cubes[0])
    return " \\/ ".join(f"({render_cube(c)})" for c in phi.cubes)


def _smt_sym(s: str) -> str:
    if s == K:
        return "k__"
    return unprimed(s) + "_p" * primes(s)


def _smt_poly(p: Poly) -> str:
    """Integer term for ``p``; callers pass primitive (integer-coefficient) polynomials."""
    if not p.terms:
        return "0"
    terms = []
    for m, c in sorted(p.terms.items()):
        num = str(abs(c.numerator))
        num = f"(- {num})" if c < 0 else num
        if m == ONE:
            terms.append(num)
        else:
            factors = " ".join(_smt_sym(s) for s in m)
            terms.append(f"(* {num} {factors})")
    return terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")"


def _smt_formula(phi: TransFormula) -> str:
    cubes = []
    for c in phi.cubes:
        atoms = [f"(= {_smt_poly(p.primitive())} 0)" for p in c.eq_rows]
        atoms += [f"(>= {_smt_poly(g.primitive())} 0)" for g in c.ges]
        cubes.append("(and " + " ".join(atoms) + ")" if atoms else "true")
    if not cubes:
        return "false"
    return cubes[0] if len(cubes) == 1 else "(or " + " ".join(cubes) + ")"


def to_smt2(phi: TransFormula, goal: Optional[TransFormula] = None, expected: Optional[str] = None) -> str:
    """SMT-LIB script over the integers; with ``goal`` it is unsat when ``phi`` implies ``goal``.

    Entailment here is decided over the rationals, so an ``unsat`` verdict
    carries over to the integer query.  ``expected`` is written as a comment.
    """
    syms = set()
    for f in (phi, goal) if goal is not None else (phi,):
        for c in f.cubes:
            syms |= c.symbols()
    lines = []
    if expected is not None:
        lines.append(f"; expected: {expected}")
    lines.append("(set-logic QF_NIA)")
    lines += [f"(declare-fun {_smt_sym(s)} () Int)" for s in sorted(syms)]
    lines.append(f"(assert {_smt_formula(phi)})")
    if goal is not None:
        lines.append(f"(assert (not {_smt_formula(goal)}))")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# The domain


class LraDomain(Domain):
    """Transition formulas; ``widening`` is "trivial" or "drop", ``star`` is "refined" or "closed"."""

    def __init__(
        self,
        variables: Sequence[str],
        cap: int = DEFAULT_CAP,
        widening: str = "trivial",
        star: str = "refined",
    ):
        if widening not in ("trivial", "drop"):
            raise ValueError(f"unknown widening {widening!r}")
        if star not in ("refined", "closed"):
            raise ValueError(f"unknown star mode {star!r}")
        if cap < 1:
            raise ValueError("cap must be positive")
        self.variables = tuple(variables)
        self.cap = cap
        self.widening = widening
        self.star_mode = star
        self._one = TransFormula((identity_cube(self.variables),))
        self._edge_cache: Dict[Edge, TransFormula] = {}

    def zero(self) -> TransFormula:
        return FALSE

    def one(self) -> TransFormula:
        return self._one

    def plus(self, a, b):
        return lra_plus(a, b, self.cap)

    def times(self, a, b):
        return lra_seq(a, b, self.cap)

    def star(self, a):
        if self.star_mode == "closed":
            return lra_star(a, self.variables, self.cap)
        return lra_star_refined(a, self.variables, self.cap)

    def exists(self, x, a):
        return lra_exists(x, a, self.cap)

    def widen(self, a, b):
        return widen_drop(a, b) if self.widening == "drop" else widen_trivial(a, b)

    def equal(self, a, b) -> bool:
        return equivalent(a, b)

    def leq(self, a, b) -> bool:
        return entails(a, b)

    def sem_edge(self, e: Edge) -> TransFormula:
        hit = self._edge_cache.get(e)
        if hit is None:
            hit = lra_sem_edge(e, self.variables)
            self._edge_cache[e] = hit
        return hit

    def render(self, a) -> str:
        return render_formula(a)

    def random_value(self, rng: random.Random) -> TransFormula:
        """Random small formula built from typical loop-body shapes."""
        kind = rng.random()
        if kind < 0.07:
            return FALSE
        if kind < 0.14:
            return self._one
        if kind < 0.18:
            return TRUE
        cubes = []
        for _ in range(rng.choice([1, 1, 2, 3])):
            eqs, ges = [], []
            for x in self.variables:
                xp, px = Poly.sym(prime(x)), Poly.sym(x)
                shape = rng.random()
                if shape < 0.35:
                    eqs.append(xp - px)
                elif shape < 0.6:
                    eqs.append(xp - px - Poly.const(rng.randint(-2, 2)))
                elif shape < 0.7:
                    eqs.append(xp - Poly.const(rng.randint(-3, 3)))
                elif shape < 0.8:
                    y = rng.choice(self.variables)
                    eqs.append(xp - Poly.sym(y) - Poly.const(rng.randint(-1, 1)))
                elif shape < 0.9:
                    ges.append(xp - px - Poly.const(rng.randint(-1, 1)))
                if rng.random() < 0.2:
                    ges.append(px - Poly.const(rng.randint(-3, 3)))
            cubes.append(make_cube(eqs, ges))
        return formula(cubes, self.cap)
