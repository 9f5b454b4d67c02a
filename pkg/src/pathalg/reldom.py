"""The relational quantale over environments with values in Z_m.

A relation over variables ``x_1..x_k`` is stored as an ``n × n`` boolean
matrix with ``n = m**k``; environment tuples are numbered in row-major order
(first variable most significant).  The matrix is canonical, so equality is
plain array equality.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Sequence, Tuple

import numpy as np

from .algebra import Domain
from .lang import Action, Assign, Assume, Call, Edge, Havoc, eval_exp

EnvTuple = Tuple[int, ...]


class RelValue:
    __slots__ = ("modulus", "variables", "matrix", "_hash")

    def __init__(self, modulus: int, variables: Sequence[str], matrix: np.ndarray):
        self.modulus = modulus
        self.variables = tuple(variables)
        self.matrix = matrix
        self.matrix.flags.writeable = False
        self._hash = None

    @property
    def size(self) -> int:
        return self.modulus ** len(self.variables)

    @classmethod
    def from_pairs(cls, modulus: int, variables: Sequence[str], pairs: Iterable) -> "RelValue":
        """Build from pairs of env tuples or env dicts."""
        variables = tuple(variables)
        n = modulus ** len(variables)
        mat = np.zeros((n, n), dtype=bool)
        for rho, rho2 in pairs:
            mat[env_index(modulus, variables, rho), env_index(modulus, variables, rho2)] = True
        return cls(modulus, variables, mat)

    def pairs(self) -> FrozenSet[Tuple[EnvTuple, EnvTuple]]:
        envs = all_envs(self.modulus, len(self.variables))
        rows, cols = np.nonzero(self.matrix)
        return frozenset((envs[i], envs[j]) for i, j in zip(rows.tolist(), cols.tolist()))

    def contains(self, rho, rho2) -> bool:
        m, vs = self.modulus, self.variables
        return bool(self.matrix[env_index(m, vs, rho), env_index(m, vs, rho2)])

    def __len__(self) -> int:
        return int(self.matrix.sum())

    def _check(self, other: "RelValue") -> None:
        if self.modulus != other.modulus:
            raise ValueError(f"modulus mismatch: {self.modulus} vs {other.modulus}")
        if self.variables != other.variables:
            raise ValueError("variable lists differ")

    def __eq__(self, other) -> bool:
        if not isinstance(other, RelValue):
            return NotImplemented
        return (
            self.modulus == other.modulus
            and self.variables == other.variables
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.modulus, self.variables, self.matrix.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        return f"RelValue(m={self.modulus}, vars={self.variables}, pairs={len(self)})"

    def __str__(self) -> str:
        return render_relation(self)


@lru_cache(maxsize=None)
def all_envs(modulus: int, k: int) -> Tuple[EnvTuple, ...]:
    return tuple(itertools.product(range(modulus), repeat=k))


def env_index(modulus: int, variables: Sequence[str], rho) -> int:
    if isinstance(rho, Mapping):
        rho = tuple(rho[x] for x in variables)
    idx = 0
    for v in rho:
        idx = idx * modulus + (v % modulus)
    return idx


def render_relation(r: RelValue, limit: int = 64) -> str:
    items = sorted(r.pairs())
    shown = []
    for a, b in items[:limit]:
        pre = ",".join(f"{x}:{v}" for x, v in zip(r.variables, a))
        post = ",".join(f"{x}:{v}" for x, v in zip(r.variables, b))
        shown.append(f"({pre} -> {post})")
    more = f" ... {len(items) - limit} more" if len(items) > limit else ""
    return "{" + ", ".join(shown) + more + "}"


def rel_zero(modulus: int, variables: Sequence[str]) -> RelValue:
    n = modulus ** len(variables)
    return RelValue(modulus, variables, np.zeros((n, n), dtype=bool))


def rel_one(modulus: int, variables: Sequence[str]) -> RelValue:
    n = modulus ** len(variables)
    return RelValue(modulus, variables, np.eye(n, dtype=bool))


def rel_plus(r: RelValue, s: RelValue) -> RelValue:
    r._check(s)
    return RelValue(r.modulus, r.variables, r.matrix | s.matrix)


def rel_compose(r: RelValue, s: RelValue) -> RelValue:
    r._check(s)
    return RelValue(r.modulus, r.variables, _bool_matmul(r.matrix, s.matrix))


def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if np.count_nonzero(a) <= 4 * n:
        return _sparse_left_matmul(a, b)
    if np.count_nonzero(b) <= 4 * n:
        return _sparse_left_matmul(b.T, a.T).T
    # float32 products go through BLAS; counts stay exact below 2**24
    return (a.astype(np.float32) @ b.astype(np.float32)) > 0


def _sparse_left_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Boolean product when ``a`` has few entries: OR together the rows of ``b``."""
    out = np.zeros((a.shape[0], b.shape[1]), dtype=bool)
    rows, cols = np.nonzero(a)
    if rows.size:
        present, starts = np.unique(rows, return_index=True)
        out[present] = np.logical_or.reduceat(b[cols], starts, axis=0)
    return out


def rel_star(r: RelValue) -> RelValue:
    """Reflexive-transitive closure by repeated squaring."""
    closure = r.matrix | np.eye(r.matrix.shape[0], dtype=bool)
    while True:
        nxt = closure | _bool_matmul(closure, closure)
        if np.array_equal(nxt, closure):
            return RelValue(r.modulus, r.variables, closure)
        closure = nxt


def rel_exists(x: str, r: RelValue) -> RelValue:
    """{⟨ρ[x←n], ρ′[x←n]⟩ : ⟨ρ,ρ′⟩ ∈ R, n ∈ Z_m}."""
    if x not in r.variables:
        raise KeyError(f"unknown variable {x!r}")
    m, k = r.modulus, len(r.variables)
    i = r.variables.index(x)
    t = r.matrix.reshape((m,) * (2 * k))
    pre_axis, post_axis = i, k + i
    projected = t.any(axis=(pre_axis, post_axis), keepdims=True)
    shape = [1] * (2 * k)
    shape[pre_axis] = m
    shape[post_axis] = m
    diag = np.eye(m, dtype=bool).reshape(shape)
    out = np.broadcast_to(projected, t.shape) & diag
    return RelValue(m, r.variables, np.ascontiguousarray(out).reshape(r.matrix.shape))


@lru_cache(maxsize=4096)
def _sem_action(action: Action, modulus: int, variables: Tuple[str, ...]) -> RelValue:
    envs = all_envs(modulus, len(variables))
    n = len(envs)
    mat = np.zeros((n, n), dtype=bool)
    if isinstance(action, Havoc):
        pos = variables.index(action.var)
        for idx, rho in enumerate(envs):
            for v in range(modulus):
                rho2 = rho[:pos] + (v,) + rho[pos + 1 :]
                mat[idx, env_index(modulus, variables, rho2)] = True
        return RelValue(modulus, variables, mat)
    for idx, rho in enumerate(envs):
        env = dict(zip(variables, rho))
        try:
            if isinstance(action, Assume):
                if eval_exp(action.exp, env) >= 0:
                    mat[idx, idx] = True
            elif isinstance(action, Assign):
                env[action.var] = eval_exp(action.exp, env) % modulus
                mat[idx, env_index(modulus, variables, env)] = True
            else:
                raise TypeError(action)
        except ZeroDivisionError:
            pass
    return RelValue(modulus, variables, mat)


def rel_sem_edge(e: Edge, modulus: int, variables: Sequence[str]) -> RelValue:
    """Relational meaning of an intraprocedural edge.

    Expressions are evaluated over the integers on residue representatives
    0..m-1, assignments store the result mod m, guards compare the integer
    value, and division by zero yields no pair.
    """
    if isinstance(e.action, Call):
        raise TypeError("call edges are interpreted by summaries")
    return _sem_action(e.action, modulus, tuple(variables))


class RelDomain(Domain):
    """Relations over Z_m environments; widening is join (the lattice is finite)."""

    def __init__(self, variables: Sequence[str], modulus: int = 5):
        if modulus < 2:
            raise ValueError("modulus must be at least 2")
        self.variables = tuple(variables)
        self.modulus = modulus
        self._zero = rel_zero(modulus, self.variables)
        self._one = rel_one(modulus, self.variables)

    def zero(self) -> RelValue:
        return self._zero

    def one(self) -> RelValue:
        return self._one

    def plus(self, a, b):
        return rel_plus(a, b)

    def times(self, a, b):
        return rel_compose(a, b)

    def star(self, a):
        return rel_star(a)

    def exists(self, x, a):
        return rel_exists(x, a)

    def widen(self, a, b):
        return rel_plus(a, b)

    def equal(self, a, b) -> bool:
        return a == b

    def leq(self, a, b) -> bool:
        return not np.any(a.matrix & ~b.matrix)

    def sem_edge(self, e: Edge) -> RelValue:
        return rel_sem_edge(e, self.modulus, self.variables)

    def render(self, a) -> str:
        return render_relation(a)

    def random_value(self, rng: random.Random, density: float = None) -> RelValue:
        """Random relation; a mix of sparse, functional and special values."""
        n = self.modulus ** len(self.variables)
        kind = rng.random()
        if kind < 0.08:
            return self._zero
        if kind < 0.16:
            return self._one
        seed = rng.getrandbits(32)
        gen = np.random.default_rng(seed)
        if kind < 0.5:
            # partial function
            mat = np.zeros((n, n), dtype=bool)
            rows = gen.random(n) < 0.8
            cols = gen.integers(0, n, size=n)
            mat[np.nonzero(rows)[0], cols[rows]] = True
            return RelValue(self.modulus, self.variables, mat)
        p = density if density is not None else gen.choice([0.02, 0.05, 0.15])
        return RelValue(self.modulus, self.variables, gen.random((n, n)) < p)
