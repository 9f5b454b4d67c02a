"""Single-source path expressions by Gaussian (Kleene) elimination.

The system solved is ``X[v] = [v = source]·ε + Σ_{u→v} X[u]·e``.  Eliminating a
vertex k uses Arden's rule for its self-loop, ``X[k] = b·a*``, and substitutes
the result into every other equation.  After all vertices are eliminated each
equation is a closed path expression.
"""

from __future__ import annotations

from typing import Dict, Hashable, Iterable, Optional, Protocol, Sequence

from .regex import EMPTY, EPS, Edge, PathExpr, cat, plus, simplify, star


class GraphEdge(Protocol):
    id: Hashable
    src: Hashable
    tgt: Hashable


class Graph(Protocol):
    vertices: Sequence[Hashable]
    edges: Sequence[GraphEdge]


def solve_single_source(
    graph: Graph, source: Hashable, order: Optional[Sequence[Hashable]] = None
) -> Dict[Hashable, PathExpr]:
    """Map every vertex v to a path expression for the paths source→v.

    ``order`` is the elimination order (default: sorted vertex ids).  Vertices
    not reachable from ``source`` map to the empty expression.
    """
    vertices = list(graph.vertices)
    if order is None:
        order = sorted(vertices)
    elif set(order) != set(vertices):
        raise ValueError("elimination order must be a permutation of the vertices")

    # const[v]: the part of X[v] that is already closed
    # coef[v][u]: coefficient of X[u] in the equation for X[v]
    const: Dict[Hashable, PathExpr] = {v: EMPTY for v in vertices}
    const[source] = EPS
    coef: Dict[Hashable, Dict[Hashable, PathExpr]] = {v: {} for v in vertices}
    for e in graph.edges:
        row = coef[e.tgt]
        row[e.src] = plus(row.get(e.src, EMPTY), Edge(e.id))
    # users[u]: equations that currently mention X[u]
    users: Dict[Hashable, set] = {v: set() for v in vertices}
    for v, row in coef.items():
        for u in row:
            users[u].add(v)

    for k in order:
        row_k = coef[k]
        loop = row_k.pop(k, None)
        users[k].discard(k)
        if loop is not None:
            s = star(loop)
            const[k] = simplify(cat(const[k], s))
            for u in row_k:
                row_k[u] = simplify(cat(row_k[u], s))
        for v in sorted(users[k], key=_order_key(order)):
            row_v = coef[v]
            a = row_v.pop(k)
            const[v] = simplify(plus(const[v], cat(const[k], a)))
            for u, c in row_k.items():
                row_v[u] = simplify(plus(row_v.get(u, EMPTY), cat(c, a)))
                users[u].add(v)
        users[k] = set()
    return const


def _order_key(order: Sequence[Hashable]):
    pos = {v: i for i, v in enumerate(order)}
    return lambda v: pos[v]


def solve_pairwise(graph: Graph, u: Hashable, v: Hashable) -> PathExpr:
    """Path expression for the paths u→v."""
    return solve_single_source(graph, u)[v]
