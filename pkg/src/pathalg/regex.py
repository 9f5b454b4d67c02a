"""Regular expressions over edge identifiers (path expressions).

Nodes are hash-consed: structurally equal expressions are the same object, so
equality and hashing are O(1) and large shared DAGs produced by elimination
stay cheap to interpret with memoization.
"""

from __future__ import annotations

import weakref
from functools import lru_cache
from typing import Dict, FrozenSet, Hashable, Iterable, Sequence, Tuple

Word = Tuple[Hashable, ...]


class PathExpr:
    __slots__ = ("__weakref__", "_key")
    _table: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()

    def __new__(cls, *args):
        key = (cls.__name__,) + tuple(id(a) if isinstance(a, PathExpr) else a for a in args)
        node = PathExpr._table.get(key)
        if node is None:
            node = object.__new__(cls)
            node._key = key
            node._init(*args)
            PathExpr._table[key] = node
        return node

    def _init(self, *args) -> None:
        pass

    def __eq__(self, other) -> bool:
        return self is other

    def __hash__(self) -> int:
        return id(self)

    def __reduce__(self):
        return (type(self), self._args())

    def _args(self) -> tuple:
        return ()

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}{self._args()!r}"


class Empty(PathExpr):
    __slots__ = ()


class Eps(PathExpr):
    __slots__ = ()


class Edge(PathExpr):
    __slots__ = ("eid",)

    def _init(self, eid) -> None:
        self.eid = eid

    def _args(self) -> tuple:
        return (self.eid,)


class Plus(PathExpr):
    __slots__ = ("left", "right")

    def _init(self, left: PathExpr, right: PathExpr) -> None:
        self.left, self.right = left, right

    def _args(self) -> tuple:
        return (self.left, self.right)


class Cat(PathExpr):
    __slots__ = ("left", "right")

    def _init(self, left: PathExpr, right: PathExpr) -> None:
        self.left, self.right = left, right

    def _args(self) -> tuple:
        return (self.left, self.right)


class Star(PathExpr):
    __slots__ = ("arg",)

    def _init(self, arg: PathExpr) -> None:
        self.arg = arg

    def _args(self) -> tuple:
        return (self.arg,)


EMPTY = Empty()
EPS = Eps()

# Keep the two constants alive for the lifetime of the interpreter.
_PINNED = (EMPTY, EPS)


def render(p: PathExpr) -> str:
    """Text rendering: ``0``, ``e``, ``<eid>``, ``(p+q)``, ``(p.q)``, ``p*``."""
    memo: Dict[PathExpr, str] = {}

    def go(q: PathExpr) -> str:
        s = memo.get(q)
        if s is not None:
            return s
        if isinstance(q, Empty):
            s = "0"
        elif isinstance(q, Eps):
            s = "e"
        elif isinstance(q, Edge):
            s = f"<{q.eid}>"
        elif isinstance(q, Plus):
            s = f"({go(q.left)}+{go(q.right)})"
        elif isinstance(q, Cat):
            s = f"({go(q.left)}.{go(q.right)})"
        else:
            s = f"{go(q.arg)}*"
        memo[q] = s
        return s

    return go(p)


# ---------------------------------------------------------------------------
# Smart constructors applying the unit/annihilator rewrites


def plus(p: PathExpr, q: PathExpr) -> PathExpr:
    if p is EMPTY:
        return q
    if q is EMPTY:
        return p
    return Plus(p, q)


def cat(p: PathExpr, q: PathExpr) -> PathExpr:
    if p is EMPTY or q is EMPTY:
        return EMPTY
    if p is EPS:
        return q
    if q is EPS:
        return p
    return Cat(p, q)


def star(p: PathExpr) -> PathExpr:
    if p is EMPTY or p is EPS:
        return EPS
    return Star(p)


def simplify(p: PathExpr) -> PathExpr:
    """Apply the language-preserving rewrites bottom-up.

    ∅+p→p, p+∅→p, ∅·p→∅, p·∅→∅, ε·p→p, p·ε→p, ∅*→ε, ε*→ε.
    """
    memo: Dict[PathExpr, PathExpr] = {}

    def go(q: PathExpr) -> PathExpr:
        r = memo.get(q)
        if r is not None:
            return r
        if isinstance(q, Plus):
            r = plus(go(q.left), go(q.right))
        elif isinstance(q, Cat):
            r = cat(go(q.left), go(q.right))
        elif isinstance(q, Star):
            r = star(go(q.arg))
        else:
            r = q
        memo[q] = r
        return r

    return go(p)


# ---------------------------------------------------------------------------
# Language oracles


def enumerate_words(p: PathExpr, max_len: int) -> FrozenSet[Word]:
    """All words of length at most ``max_len`` in the language of ``p``."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    memo: Dict[PathExpr, FrozenSet[Word]] = {}

    def concat(a: FrozenSet[Word], b: FrozenSet[Word]) -> FrozenSet[Word]:
        return frozenset(u + v for u in a for v in b if len(u) + len(v) <= max_len)

    def go(q: PathExpr) -> FrozenSet[Word]:
        r = memo.get(q)
        if r is not None:
            return r
        if isinstance(q, Empty):
            r = frozenset()
        elif isinstance(q, Eps):
            r = frozenset([()])
        elif isinstance(q, Edge):
            r = frozenset([(q.eid,)]) if max_len >= 1 else frozenset()
        elif isinstance(q, Plus):
            r = go(q.left) | go(q.right)
        elif isinstance(q, Cat):
            left = go(q.left)
            r = concat(left, go(q.right)) if left else frozenset()
        else:
            base = go(q.arg)
            r = frozenset([()])
            frontier = r
            while frontier:
                grown = concat(frontier, base) - r
                r = r | grown
                frontier = grown
        memo[q] = r
        return r

    return go(p)


def recognizes(p: PathExpr, word: Sequence[Hashable]) -> bool:
    """Membership test by recursive matching over word positions."""
    w = tuple(word)
    n = len(w)

    @lru_cache(maxsize=None)
    def ends(q: PathExpr, i: int) -> FrozenSet[int]:
        # positions j such that w[i:j] is in L(q)
        if isinstance(q, Empty):
            return frozenset()
        if isinstance(q, Eps):
            return frozenset([i])
        if isinstance(q, Edge):
            return frozenset([i + 1]) if i < n and w[i] == q.eid else frozenset()
        if isinstance(q, Plus):
            return ends(q.left, i) | ends(q.right, i)
        if isinstance(q, Cat):
            out = set()
            for j in ends(q.left, i):
                out |= ends(q.right, j)
            return frozenset(out)
        reached = {i}
        frontier = [i]
        while frontier:
            j = frontier.pop()
            for k in ends(q.arg, j):
                if k not in reached:
                    reached.add(k)
                    frontier.append(k)
        return frozenset(reached)

    return n in ends(p, 0)


def edges_of(p: PathExpr) -> FrozenSet[Hashable]:
    """Edge identifiers occurring in ``p``."""
    seen: Dict[PathExpr, None] = {}
    out = set()
    stack = [p]
    while stack:
        q = stack.pop()
        if q in seen:
            continue
        seen[q] = None
        if isinstance(q, Edge):
            out.add(q.eid)
        elif isinstance(q, (Plus, Cat)):
            stack.extend((q.left, q.right))
        elif isinstance(q, Star):
            stack.append(q.arg)
    return frozenset(out)
