"""Exact rational polynomials, Gaussian substitution and Fourier-Motzkin.

Polynomials range over string symbols.  For linear reasoning every non-constant
monomial is treated as an independent dimension; equalities are additionally
used as rewrite rules, which lets products such as ``q'*y'`` cancel after
substituting ``q' = 0``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

Monomial = Tuple[str, ...]
ONE: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


class Poly:
    """Immutable polynomial with Fraction coefficients."""

    __slots__ = ("terms", "_key", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = c if type(c) is Fraction else Fraction(c)
        self.terms: Dict[Monomial, Fraction] = clean
        self._key = None
        self._hash = None

    # construction helpers
    @staticmethod
    def const(c) -> "Poly":
        return Poly({ONE: Fraction(c)}) if c else ZERO

    @staticmethod
    def sym(s: str, c=1) -> "Poly":
        return Poly({(s,): Fraction(c)})

    # identity
    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(self.terms.items()))
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.key == other.key

    def __lt__(self, other: "Poly") -> bool:
        return self.key < other.key

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    # arithmetic
    def __add__(self, other: "Poly") -> "Poly":
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return ZERO
        if c == 1:
            return self
        return Poly({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    def power(self, n: int) -> "Poly":
        out = Poly.const(1)
        for _ in range(n):
            out = out * self
        return out

    # inspection
    def constant(self) -> Fraction:
        return self.terms.get(ONE, Fraction(0))

    def is_const(self) -> bool:
        return all(m == ONE for m in self.terms)

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def symbols(self) -> frozenset:
        return frozenset(s for m in self.terms for s in m)

    def linear_coeff(self, s: str) -> Fraction:
        return self.terms.get((s,), Fraction(0))

    def occurs_nonlinearly(self, s: str) -> bool:
        return any(s in m and m != (s,) for m in self.terms)

    def mentions(self, s: str) -> bool:
        return any(s in m for m in self.terms)

    def without_const(self) -> "Poly":
        return Poly({m: c for m, c in self.terms.items() if m != ONE})

    # transformation
    def substitute(self, s: str, value: "Poly") -> "Poly":
        if not self.mentions(s):
            return self
        out = ZERO
        powers: Dict[int, Poly] = {}
        for m, c in self.terms.items():
            j = m.count(s)
            if j == 0:
                out = out + Poly({m: c})
                continue
            rest = tuple(x for x in m if x != s)
            if j not in powers:
                powers[j] = value.power(j)
            out = out + Poly({rest: c}) * powers[j]
        return out

    def substitute_all(self, subst: Mapping[str, "Poly"]) -> "Poly":
        p = self
        for s in sorted(self.symbols()):
            if s in subst:
                p = p.substitute(s, subst[s])
        return p

    def rename(self, mapping: Callable[[str], str]) -> "Poly":
        return Poly({tuple(sorted(mapping(s) for s in m)): c for m, c in self.terms.items()})

    def evaluate(self, env: Mapping[str, object]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for s in m:
                v *= env[s]
            total += v
        return total

    def primitive(self) -> "Poly":
        """Positive multiple with coprime integer coefficients."""
        if not self.terms:
            return self
        dens = reduce(lambda a, b: a * b // gcd(a, b), (c.denominator for c in self.terms.values()))
        nums = [abs(c.numerator * (dens // c.denominator)) for c in self.terms.values()]
        g = reduce(gcd, nums)
        return self.scale(Fraction(dens, g))

    def leading(self) -> Tuple[Monomial, Fraction]:
        for m, c in self.key:
            if m != ONE:
                return m, c
        return ONE, self.constant()

    def __str__(self) -> str:
        return render_poly(self)

    def __repr__(self) -> str:
        return f"Poly({render_poly(self)})"


ZERO = Poly()


def _sym_rank(s: str) -> tuple:
    primes = len(s) - len(s.rstrip("'"))
    return (-primes, s.rstrip("'"), s)


def _mono_rank(m: Monomial) -> tuple:
    if not m:
        return (1, ())
    return (0, tuple(_sym_rank(s) for s in m))


def _render_mono(m: Monomial) -> str:
    return "*".join(sorted(m, key=_sym_rank))


def render_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for m, c in sorted(p.terms.items(), key=lambda t: _mono_rank(t[0])):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if m == ONE:
            body = str(a)
        elif a == 1:
            body = _render_mono(m)
        else:
            body = f"{a}*{_render_mono(m)}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def render_relation(p: Poly, op: str) -> str:
    """Render ``p op 0`` with positive terms on the left, negative on the right."""
    pos = Poly({m: c for m, c in p.terms.items() if c > 0})
    neg = Poly({m: -c for m, c in p.terms.items() if c < 0})
    if not pos.terms:
        pos, neg = neg, pos
        op = {">=": "<=", "=": "="}[op]
    return f"{render_poly(pos)} {op} {render_poly(neg)}"


# ---------------------------------------------------------------------------
# Gaussian elimination with polynomial substitution


def solvable_in(p: Poly, s: str) -> bool:
    return p.linear_coeff(s) != 0 and not p.occurs_nonlinearly(s)


def solve_for(p: Poly, s: str) -> Poly:
    """Value v with ``p = 0  ⟺  s = v`` (requires :func:`solvable_in`)."""
    c = p.linear_coeff(s)
    return (p - Poly.sym(s, c)).scale(-1 / c)


class Inconsistent(Exception):
    pass


def gauss(
    eqs: Iterable[Poly], rank: Callable[[str], tuple], allowed: Callable[[str], bool] = None
) -> Tuple[Dict[str, Poly], List[Poly]]:
    """Gauss-Jordan reduction of ``eqs`` (each ``p = 0``).

    Returns ``(solved, residual)``: ``solved`` maps pivot symbols to values
    that mention no pivot, ``residual`` holds equalities without a usable
    pivot.  Pivots are chosen by smallest ``rank`` among the symbols
    accepted by ``allowed`` (default: all).  Raises
    :class:`Inconsistent` when a non-zero constant is derived.
    """
    solved: Dict[str, Poly] = {}
    residual: List[Poly] = []
    queue = list(eqs)
    while queue:
        p = queue.pop(0).substitute_all(solved)
        if not p.terms:
            continue
        if p.is_const():
            raise Inconsistent()
        candidates = [s for s in p.symbols() if solvable_in(p, s) and (allowed is None or allowed(s))]
        if not candidates:
            residual.append(p)
            continue
        s = min(candidates, key=lambda x: (rank(x), abs(p.linear_coeff(x)) != 1))
        value = solve_for(p, s)
        for t in list(solved):
            if solved[t].mentions(s):
                solved[t] = solved[t].substitute(s, value)
        solved[s] = value
        keep = []
        for r in residual:
            if r.mentions(s):
                queue.append(r)
            else:
                keep.append(r)
        residual = keep
    return solved, residual


# ---------------------------------------------------------------------------
# Fourier-Motzkin over linearised monomials

FM_BUDGET = 512

# A linear row: (coefficients over non-constant monomials, constant, strict)
Row = Tuple[Tuple[Tuple[Monomial, Fraction], ...], Fraction, bool]


def _row(p: Poly, strict: bool = False) -> Row:
    p = p.primitive()
    lin = tuple(sorted((m, c) for m, c in p.terms.items() if m != ONE))
    return lin, p.constant(), strict


def _combine(rows: Iterable[Row]) -> List[Row]:
    """Deduplicate rows with equal linear part, keeping the strongest."""
    best: Dict[tuple, Tuple[Fraction, bool]] = {}
    for lin, c, strict in rows:
        old = best.get(lin)
        if old is None or c < old[0] or (c == old[0] and strict and not old[1]):
            best[lin] = (c, strict)
    return [(lin, c, s) for lin, (c, s) in best.items()]


def _contradiction(rows: Iterable[Row]) -> bool:
    return any(not lin and (c < 0 or (c == 0 and strict)) for lin, c, strict in rows)


def fm_eliminate(rows: List[Row], column: Monomial, budget: int = None) -> List[Row]:
    """Project out one linear dimension (exact, or a sound weakening on blowup)."""
    budget = FM_BUDGET if budget is None else budget
    pos, neg, rest = [], [], []
    for r in rows:
        c = dict(r[0]).get(column)
        if c is None:
            rest.append(r)
        elif c > 0:
            pos.append((r, c))
        else:
            neg.append((r, c))
    if len(pos) * len(neg) > budget:
        return rest
    out = list(rest)
    for (lp, cp, sp), a in pos:
        for (ln, cn, sn), b in neg:
            coeffs: Dict[Monomial, Fraction] = {}
            for m, v in lp:
                coeffs[m] = coeffs.get(m, 0) + v * (-b)
            for m, v in ln:
                coeffs[m] = coeffs.get(m, 0) + v * a
            coeffs.pop(column, None)
            coeffs[ONE] = cp * (-b) + cn * a
            out.append(_row(Poly(coeffs), sp or sn))
    return _combine(out)


def rows_feasible(rows: List[Row], budget: int = None) -> bool:
    """False only if the rows are rationally infeasible (monomials independent)."""
    rows = _combine(rows)
    while True:
        if _contradiction(rows):
            return False
        cols: Dict[Monomial, List[int]] = {}
        for lin, _, _ in rows:
            for m, c in lin:
                cnt = cols.setdefault(m, [0, 0])
                cnt[0 if c > 0 else 1] += 1
        if not cols:
            return True
        col = min(cols, key=lambda m: (cols[m][0] * cols[m][1], m))
        rows = fm_eliminate(rows, col, budget)


def feasible(ges: Iterable[Poly], eqs: Iterable[Poly] = (), strict: Iterable[Poly] = ()) -> bool:
    rows = [_row(g) for g in ges]
    for e in eqs:
        rows.append(_row(e))
        rows.append(_row(-e))
    rows.extend(_row(s, True) for s in strict)
    return rows_feasible(rows)


def project_rows(rows: List[Row], symbols: Iterable[str], budget: int = None) -> List[Row]:
    """Eliminate every monomial mentioning one of ``symbols``.

    Rows where such a symbol occurs inside a non-linear monomial are dropped.
    """
    syms = set(symbols)
    rows = [r for r in rows if not any(len(m) > 1 and syms.intersection(m) for m, _ in r[0])]
    remaining = set(syms)
    while remaining:
        counts = {}
        for s in remaining:
            p = n = 0
            for lin, _, _ in rows:
                c = dict(lin).get((s,))
                if c is None:
                    continue
                if c > 0:
                    p += 1
                else:
                    n += 1
            counts[s] = p * n
        s = min(remaining, key=lambda x: (counts[x], x))
        rows = fm_eliminate(rows, (s,), budget)
        remaining.discard(s)
    return rows


def row_to_poly(row: Row) -> Poly:
    lin, c, _ = row
    terms = dict(lin)
    terms[ONE] = c
    return Poly(terms)
