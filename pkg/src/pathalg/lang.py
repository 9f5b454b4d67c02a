"""Toy imperative language: parser, flow-graph construction and a concrete interpreter.

A program is a list of parameterless procedures.  Structured control flow is
compiled into flow graphs whose edges carry one of four actions: assignment,
assumption (``exp >= 0``), havoc, or call.  Assertions do not produce actions;
they mark a vertex in a side table that the checker consults later.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Num:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Exp"
    right: "Exp"

    def __str__(self) -> str:
        return render_exp(self)


Exp = Union[Num, Var, BinOp]

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def render_exp(e: Exp, parent: int = 0, right_side: bool = False) -> str:
    if isinstance(e, Num):
        return str(e.value) if e.value >= 0 or parent == 0 else f"({e.value})"
    if isinstance(e, Var):
        return e.name
    prec = _PREC[e.op]
    text = f"{render_exp(e.left, prec)} {e.op} {render_exp(e.right, prec, True)}"
    if prec < parent or (prec == parent and right_side):
        return f"({text})"
    return text


def exp_vars(e: Exp) -> frozenset:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, BinOp):
        return exp_vars(e.left) | exp_vars(e.right)
    return frozenset()


def exp_has_division(e: Exp) -> bool:
    if isinstance(e, BinOp):
        return e.op == "/" or exp_has_division(e.left) or exp_has_division(e.right)
    return False


def tdiv(a: int, b: int) -> int:
    """Integer division truncating toward zero; raises ZeroDivisionError."""
    if b == 0:
        raise ZeroDivisionError("division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


def eval_exp(e: Exp, env: Mapping[str, int]) -> int:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    a = eval_exp(e.left, env)
    b = eval_exp(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    return tdiv(a, b)


# ---------------------------------------------------------------------------
# Boolean expressions (source level only)


@dataclass(frozen=True)
class Cmp:
    op: str  # < <= > >= == !=
    left: Exp
    right: Exp

    def __str__(self) -> str:
        return f"{render_exp(self.left)} {self.op} {render_exp(self.right)}"


@dataclass(frozen=True)
class And:
    left: "Bexp"
    right: "Bexp"

    def __str__(self) -> str:
        return f"({self.left} && {self.right})"


@dataclass(frozen=True)
class Or:
    left: "Bexp"
    right: "Bexp"

    def __str__(self) -> str:
        return f"({self.left} || {self.right})"


@dataclass(frozen=True)
class Not:
    arg: "Bexp"

    def __str__(self) -> str:
        return f"!({self.arg})"


Bexp = Union[Cmp, And, Or, Not]

_NEGATED = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}


def _minus(a: Exp, b: Exp) -> Exp:
    if isinstance(b, Num) and b.value == 0:
        return a
    return BinOp("-", a, b)


def _minus_one(a: Exp) -> Exp:
    if isinstance(a, Num):
        return Num(a.value - 1)
    return BinOp("-", a, Num(1))


def guard_dnf(b: Bexp, negate: bool = False) -> List[List[Exp]]:
    """Translate a boolean expression into DNF over atoms ``exp >= 0``.

    Each inner list is a conjunction realised as a chain of Assume edges; the
    outer list is a disjunction realised as parallel chains.
    """
    if isinstance(b, Not):
        return guard_dnf(b.arg, not negate)
    if isinstance(b, (And, Or)):
        conj = isinstance(b, And) != negate
        left = guard_dnf(b.left, negate)
        right = guard_dnf(b.right, negate)
        if conj:
            return [l + r for l in left for r in right]
        return left + right
    op = _NEGATED[b.op] if negate else b.op
    s, t = b.left, b.right
    if op == "<":
        return [[_minus_one(_minus(t, s))]]
    if op == "<=":
        return [[_minus(t, s)]]
    if op == ">":
        return [[_minus_one(_minus(s, t))]]
    if op == ">=":
        return [[_minus(s, t)]]
    if op == "==":
        return [[_minus(s, t), _minus(t, s)]]
    return [[_minus_one(_minus(s, t))], [_minus_one(_minus(t, s))]]


def eval_bexp(b: Bexp, env: Mapping[str, int]) -> bool:
    if isinstance(b, Not):
        return not eval_bexp(b.arg, env)
    if isinstance(b, And):
        return eval_bexp(b.left, env) and eval_bexp(b.right, env)
    if isinstance(b, Or):
        return eval_bexp(b.left, env) or eval_bexp(b.right, env)
    a, c = eval_exp(b.left, env), eval_exp(b.right, env)
    return {
        "<": a < c,
        "<=": a <= c,
        ">": a > c,
        ">=": a >= c,
        "==": a == c,
        "!=": a != c,
    }[b.op]


def bexp_vars(b: Bexp) -> frozenset:
    if isinstance(b, Not):
        return bexp_vars(b.arg)
    if isinstance(b, (And, Or)):
        return bexp_vars(b.left) | bexp_vars(b.right)
    return exp_vars(b.left) | exp_vars(b.right)


# ---------------------------------------------------------------------------
# Actions and the program model


@dataclass(frozen=True)
class Assign:
    var: str
    exp: Exp

    def __str__(self) -> str:
        return f"{self.var} := {render_exp(self.exp)}"


@dataclass(frozen=True)
class Assume:
    """Guard ``exp >= 0``."""

    exp: Exp

    def __str__(self) -> str:
        return f"[{render_exp(self.exp)} >= 0]"


@dataclass(frozen=True)
class Havoc:
    var: str

    def __str__(self) -> str:
        return f"havoc {self.var}"


@dataclass(frozen=True)
class Call:
    callee: int
    name: str

    def __str__(self) -> str:
        return f"call {self.name}"


Action = Union[Assign, Assume, Havoc, Call]

SKIP = Assume(Num(0))


def action_vars(a: Action) -> frozenset:
    if isinstance(a, Assign):
        return frozenset([a.var]) | exp_vars(a.exp)
    if isinstance(a, Assume):
        return exp_vars(a.exp)
    if isinstance(a, Havoc):
        return frozenset([a.var])
    return frozenset()


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    tgt: int
    action: Action

    def __str__(self) -> str:
        return f"<{self.id}: {self.src}->{self.tgt} {self.action}>"


@dataclass(frozen=True)
class FlowGraph:
    vertices: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    entry: int
    exit: int

    @cached_property
    def out_edges(self) -> Dict[int, Tuple[Edge, ...]]:
        table: Dict[int, List[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            table.setdefault(e.src, []).append(e)
        return {v: tuple(es) for v, es in table.items()}

    @cached_property
    def in_edges(self) -> Dict[int, Tuple[Edge, ...]]:
        table: Dict[int, List[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            table.setdefault(e.tgt, []).append(e)
        return {v: tuple(es) for v, es in table.items()}


@dataclass(frozen=True)
class Procedure:
    name: str
    graph: FlowGraph
    locals: frozenset


@dataclass(frozen=True, eq=False)
class Program:
    procedures: Tuple[Procedure, ...]
    global_vars: frozenset
    asserts: Mapping[int, Bexp] = field(default_factory=dict)
    vertex_names: Mapping[int, str] = field(default_factory=dict)

    @cached_property
    def variables(self) -> Tuple[str, ...]:
        """All program variables: sorted globals, then each procedure's sorted locals."""
        out = sorted(self.global_vars)
        for p in self.procedures:
            out.extend(sorted(p.locals))
        return tuple(out)

    @cached_property
    def edges(self) -> Dict[int, Edge]:
        return {e.id: e for p in self.procedures for e in p.graph.edges}

    @cached_property
    def proc_of_vertex(self) -> Dict[int, int]:
        return {v: i for i, p in enumerate(self.procedures) for v in p.graph.vertices}

    def proc_index(self, name: str) -> int:
        for i, p in enumerate(self.procedures):
            if p.name == name:
                return i
        raise KeyError(name)

    def vertex_name(self, v: int) -> str:
        return self.vertex_names.get(v, f"v{v}")

    def vertex_by_name(self, name: str) -> int:
        for v, n in self.vertex_names.items():
            if n == name:
                return v
        if name.isdigit() and int(name) in self.proc_of_vertex:
            return int(name)
        raise KeyError(name)


# ---------------------------------------------------------------------------
# Lexer and parser


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>//[^\n]*)"
    r"|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>:=|<=|>=|==|!=|&&|\|\||[-+*/<>!(){};,])"
)

_KEYWORDS = {"proc", "local", "assume", "call", "assert", "if", "else", "while", "havoc"}


@dataclass
class _Tok:
    kind: str  # int, ident, kw, op, eof
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks: List[_Tok] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind == "ident" and lexeme in _KEYWORDS:
                kind = "kw"
            if kind not in ("ws", "comment"):
                toks.append(_Tok(kind, lexeme, line, col))
            col += len(lexeme)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


# statement AST (internal)
@dataclass
class _SAssign:
    var: str
    exp: Exp
    pos: Tuple[int, int]


@dataclass
class _SAssume:
    cond: Bexp


@dataclass
class _SCall:
    name: str
    pos: Tuple[int, int]


@dataclass
class _SAssert:
    cond: Bexp


@dataclass
class _SIf:
    cond: Bexp
    then: list
    orelse: list


@dataclass
class _SWhile:
    cond: Bexp
    body: list


@dataclass
class _SHavoc:
    var: str
    pos: Tuple[int, int]


@dataclass
class _ProcAst:
    name: str
    locals: List[str]
    body: list
    pos: Tuple[int, int]
    uses: List[Tuple[str, Tuple[int, int]]]


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.uses: List[Tuple[str, Tuple[int, int]]] = []

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str) -> ParseError:
        t = self.cur
        found = t.text or "end of input"
        return ParseError(f"{msg}, found {found!r}", t.line, t.col)

    def accept(self, text: str) -> bool:
        if self.cur.text == text and self.cur.kind in ("op", "kw"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        t = self.cur
        if not self.accept(text):
            raise self.error(f"expected {text!r}")
        return t

    def ident(self) -> _Tok:
        t = self.cur
        if t.kind != "ident":
            raise self.error("expected identifier")
        self.i += 1
        return t

    def program(self) -> List[_ProcAst]:
        procs = []
        while self.cur.kind != "eof":
            procs.append(self.proc())
        if not procs:
            raise self.error("expected 'proc'")
        return procs

    def proc(self) -> _ProcAst:
        start = self.expect("proc")
        name = self.ident().text
        self.expect("(")
        self.expect(")")
        locals_: List[str] = []
        if self.accept("local"):
            locals_.append(self.ident().text)
            while self.accept(","):
                locals_.append(self.ident().text)
        self.uses = []
        body = self.block()
        return _ProcAst(name, locals_, body, (start.line, start.col), self.uses)

    def block(self) -> list:
        self.expect("{")
        stmts = []
        while not self.accept("}"):
            if self.cur.kind == "eof":
                raise self.error("expected '}'")
            stmts.append(self.stmt())
        return stmts

    def stmt(self):
        t = self.cur
        if t.kind == "ident":
            self.i += 1
            self.uses.append((t.text, (t.line, t.col)))
            self.expect(":=")
            e = self.exp()
            self.expect(";")
            return _SAssign(t.text, e, (t.line, t.col))
        if self.accept("assume"):
            self.expect("(")
            c = self.bexp()
            self.expect(")")
            self.expect(";")
            return _SAssume(c)
        if self.accept("assert"):
            self.expect("(")
            c = self.bexp()
            self.expect(")")
            self.expect(";")
            return _SAssert(c)
        if self.accept("call"):
            n = self.ident()
            self.expect(";")
            return _SCall(n.text, (n.line, n.col))
        if self.accept("havoc"):
            n = self.ident()
            self.uses.append((n.text, (n.line, n.col)))
            self.expect(";")
            return _SHavoc(n.text, (n.line, n.col))
        if self.accept("if"):
            self.expect("(")
            c = self.bexp()
            self.expect(")")
            then = self.block()
            orelse = self.block() if self.accept("else") else []
            return _SIf(c, then, orelse)
        if self.accept("while"):
            self.expect("(")
            c = self.bexp()
            self.expect(")")
            return _SWhile(c, self.block())
        raise self.error("expected statement")

    # bexp := or ; or := and ('||' and)* ; and := unary ('&&' unary)*
    def bexp(self) -> Bexp:
        b = self.band()
        while self.accept("||"):
            b = Or(b, self.band())
        return b

    def band(self) -> Bexp:
        b = self.bunary()
        while self.accept("&&"):
            b = And(b, self.bunary())
        return b

    def bunary(self) -> Bexp:
        if self.accept("!"):
            return Not(self.bunary())
        if self.cur.text == "(":
            save, save_uses = self.i, len(self.uses)
            try:
                self.i += 1
                b = self.bexp()
                self.expect(")")
                if self.cur.text not in ("<", "<=", ">", ">=", "==", "!=", "+", "-", "*", "/"):
                    return b
            except ParseError:
                pass
            self.i = save
            del self.uses[save_uses:]
        left = self.exp()
        op = self.cur
        if op.text not in ("<", "<=", ">", ">=", "==", "!="):
            raise self.error("expected comparison operator")
        self.i += 1
        return Cmp(op.text, left, self.exp())

    def exp(self) -> Exp:
        e = self.term()
        while self.cur.text in ("+", "-") and self.cur.kind == "op":
            op = self.cur.text
            self.i += 1
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Exp:
        e = self.factor()
        while self.cur.text in ("*", "/") and self.cur.kind == "op":
            op = self.cur.text
            self.i += 1
            e = BinOp(op, e, self.factor())
        return e

    def factor(self) -> Exp:
        t = self.cur
        if t.kind == "int":
            self.i += 1
            return Num(int(t.text))
        if t.kind == "ident":
            self.i += 1
            self.uses.append((t.text, (t.line, t.col)))
            return Var(t.text)
        if self.accept("("):
            e = self.exp()
            self.expect(")")
            return e
        if self.accept("-"):
            inner = self.factor()
            if isinstance(inner, Num):
                return Num(-inner.value)
            return BinOp("-", Num(0), inner)
        raise self.error("expected expression")


class _Builder:
    """Compiles statement lists into edges, allocating program-wide vertex ids."""

    def __init__(self):
        self.next_vertex = 0
        self.next_edge = 0
        self.asserts: Dict[int, Bexp] = {}

    def vertex(self) -> int:
        v = self.next_vertex
        self.next_vertex += 1
        return v

    def edge(self, edges: List[Edge], src: int, tgt: int, action: Action) -> None:
        edges.append(Edge(self.next_edge, src, tgt, action))
        self.next_edge += 1

    def guard(self, edges, src: int, tgt: int, cond: Bexp, negate: bool = False) -> None:
        for conj in guard_dnf(cond, negate):
            cur = src
            for k, g in enumerate(conj):
                nxt = tgt if k == len(conj) - 1 else self.vertex()
                self.edge(edges, cur, nxt, Assume(g))
                cur = nxt

    def block(self, edges, stmts: list, src: int, tgt: Optional[int], entry: int, procs) -> int:
        """Compile ``stmts`` from ``src``; end at ``tgt`` (fresh vertex when None)."""
        if not stmts:
            if tgt is None or tgt == src:
                return src
            self.edge(edges, src, tgt, SKIP)
            return tgt
        cur = src
        for k, s in enumerate(stmts):
            last = k == len(stmts) - 1
            cur = self.stmt(edges, s, cur, tgt if last else None, entry, procs)
        return cur

    def stmt(self, edges, s, src: int, tgt: Optional[int], entry: int, procs) -> int:
        def target() -> int:
            return self.vertex() if tgt is None else tgt

        if isinstance(s, _SAssign):
            t = target()
            self.edge(edges, src, t, Assign(s.var, s.exp))
            return t
        if isinstance(s, _SHavoc):
            t = target()
            self.edge(edges, src, t, Havoc(s.var))
            return t
        if isinstance(s, _SCall):
            t = target()
            self.edge(edges, src, t, Call(procs[s.name], s.name))
            return t
        if isinstance(s, _SAssume):
            t = target()
            self.guard(edges, src, t, s.cond)
            return t
        if isinstance(s, _SAssert):
            if src in self.asserts:
                self.asserts[src] = And(self.asserts[src], s.cond)
            else:
                self.asserts[src] = s.cond
            t = target()
            self.edge(edges, src, t, SKIP)
            return t
        if isinstance(s, _SIf):
            join = target()
            then_start = self.vertex() if s.then else join
            self.guard(edges, src, then_start, s.cond)
            if s.then:
                self.block(edges, s.then, then_start, join, entry, procs)
            else_start = self.vertex() if s.orelse else join
            self.guard(edges, src, else_start, s.cond, negate=True)
            if s.orelse:
                self.block(edges, s.orelse, else_start, join, entry, procs)
            return join
        if isinstance(s, _SWhile):
            head = src
            if head == entry:
                # the entry vertex must not have incoming edges
                head = self.vertex()
                self.edge(edges, src, head, SKIP)
            if s.body:
                body_start = self.vertex()
                self.guard(edges, head, body_start, s.cond)
                self.block(edges, s.body, body_start, head, entry, procs)
            else:
                self.guard(edges, head, head, s.cond)
            t = target()
            self.guard(edges, head, t, s.cond, negate=True)
            return t
        raise TypeError(s)


def _collect_calls(stmts, out: list) -> None:
    for s in stmts:
        if isinstance(s, _SCall):
            out.append(s)
        elif isinstance(s, _SIf):
            _collect_calls(s.then, out)
            _collect_calls(s.orelse, out)
        elif isinstance(s, _SWhile):
            _collect_calls(s.body, out)


def _bexp_uses(stmts, out: list) -> None:
    for s in stmts:
        if isinstance(s, (_SAssume, _SAssert, _SIf, _SWhile)):
            out.extend(bexp_vars(s.cond))
        if isinstance(s, _SIf):
            _bexp_uses(s.then, out)
            _bexp_uses(s.orelse, out)
        elif isinstance(s, _SWhile):
            _bexp_uses(s.body, out)


def parse_program(text: str) -> Program:
    """Parse source text into a :class:`Program` (``main`` first)."""
    asts = _Parser(text).program()
    names: Dict[str, int] = {}
    for a in asts:
        if a.name in names:
            raise ParseError(f"duplicate procedure {a.name!r}", *a.pos)
        names[a.name] = len(names)
    if "main" not in names:
        raise ParseError("no procedure named 'main'")
    asts.sort(key=lambda a: a.name != "main")  # stable: main first
    order = {a.name: i for i, a in enumerate(asts)}

    all_locals: Dict[str, str] = {}
    for a in asts:
        for x in a.locals:
            if x in all_locals:
                owner = all_locals[x]
                raise ParseError(
                    f"local {x!r} of {a.name!r} already declared in {owner!r}", *a.pos
                )
            all_locals[x] = a.name

    global_vars = set()
    for a in asts:
        used = [n for n, _ in a.uses]
        _bexp_uses(a.body, used)
        for n in used:
            owner = all_locals.get(n)
            if owner is None:
                global_vars.add(n)
            elif owner != a.name:
                pos = next((p for m, p in a.uses if m == n), a.pos)
                raise ParseError(f"undeclared variable {n!r} in {a.name!r}", *pos)
        calls: list = []
        _collect_calls(a.body, calls)
        for c in calls:
            if c.name not in order:
                raise ParseError(f"undeclared procedure {c.name!r}", *c.pos)

    b = _Builder()
    procs = []
    names_of: Dict[int, str] = {}
    for a in asts:
        edges: List[Edge] = []
        entry = b.vertex()
        first_vertex = entry
        exit_ = b.block(edges, a.body, entry, None, entry, order)
        verts = tuple(range(first_vertex, b.next_vertex))
        graph = FlowGraph(verts, tuple(edges), entry, exit_)
        procs.append(Procedure(a.name, graph, frozenset(a.locals)))
        names_of[entry] = f"entry_{a.name}" if len(asts) > 1 else "entry"
        if exit_ != entry:
            names_of[exit_] = f"exit_{a.name}" if len(asts) > 1 else "exit"
    counter = 1
    for p in procs:
        for v in p.graph.vertices:
            if v not in names_of:
                names_of[v] = f"v{counter}"
                counter += 1
    return Program(tuple(procs), frozenset(global_vars), dict(b.asserts), names_of)


# ---------------------------------------------------------------------------
# Validation


def _reachable(graph: FlowGraph) -> set:
    seen = {graph.entry}
    stack = [graph.entry]
    out = graph.out_edges
    while stack:
        v = stack.pop()
        for e in out.get(v, ()):
            if e.tgt not in seen:
                seen.add(e.tgt)
                stack.append(e.tgt)
    return seen


def validate(program: Program) -> List[str]:
    """Return one diagnostic string per violated structural invariant."""
    diags: List[str] = []
    names = [p.name for p in program.procedures]
    if len(set(names)) != len(names):
        diags.append("duplicate procedure names")
    if not names or names[0] != "main":
        diags.append("first procedure is not main")
    seen_v: Dict[int, str] = {}
    seen_l: Dict[str, str] = {}
    seen_e: set = set()
    for p in program.procedures:
        g = p.graph
        vs = set(g.vertices)
        for v in vs:
            if v in seen_v:
                diags.append(f"vertex {v} shared by {seen_v[v]} and {p.name}")
            seen_v[v] = p.name
        for x in p.locals:
            if x in seen_l:
                diags.append(f"locals not disjoint: {x} in {seen_l[x]} and {p.name}")
            seen_l[x] = p.name
        if p.locals & program.global_vars:
            diags.append(f"locals of {p.name} overlap globals")
        if g.entry not in vs or g.exit not in vs:
            diags.append(f"{p.name}: entry or exit not a vertex")
        for e in g.edges:
            if e.id in seen_e:
                diags.append(f"duplicate edge id {e.id}")
            seen_e.add(e.id)
            if e.src not in vs or e.tgt not in vs:
                diags.append(f"{p.name}: edge {e.id} leaves the procedure")
            if e.tgt == g.entry:
                diags.append(f"{p.name}: entry has incoming edge")
            if e.src == g.exit:
                diags.append(f"{p.name}: exit has outgoing edge")
            if isinstance(e.action, Call):
                if not 0 <= e.action.callee < len(program.procedures):
                    diags.append(f"{p.name}: call to undeclared procedure {e.action.name}")
            bad = action_vars(e.action) - program.global_vars - p.locals
            if bad:
                diags.append(f"{p.name}: edge {e.id} mentions foreign variables {sorted(bad)}")
        unreachable = vs - _reachable(g)
        if unreachable:
            diags.append(f"{p.name}: unreachable vertices {sorted(unreachable)}")
    return diags


# ---------------------------------------------------------------------------
# Concrete interpreter

RETURN = "return"
HAVOC_RANGE = (-10, 10)


@dataclass
class Trace:
    """Result of :func:`concrete_run`.

    ``points`` lists (vertex, env) pairs; envs are total over all program
    variables, with locals of inactive procedures shown at their initial value.
    ``steps`` lists the edge ids taken, with :data:`RETURN` for returns.
    ``status`` is ``"exit"`` (main returned), ``"stuck"`` or ``"fuel"``.
    """

    points: List[Tuple[int, Dict[str, int]]]
    steps: List[Union[int, str]]
    status: str

    @property
    def terminated(self) -> bool:
        return self.status == "exit"

    @property
    def stuck(self) -> bool:
        return self.status == "stuck"

    @property
    def final(self) -> Tuple[int, Dict[str, int]]:
        return self.points[-1]


def concrete_run(
    program: Program, initial: Mapping[str, int], fuel: int, rng_seed: int = 0
) -> Trace:
    """Execute one randomly resolved interprocedural path."""
    missing = program.global_vars - set(initial)
    if missing:
        raise ValueError(f"initial environment misses globals {sorted(missing)}")
    rng = random.Random(rng_seed)
    start = {x: int(initial.get(x, 0)) for x in program.variables}
    procs = program.procedures
    proc = 0
    vertex = procs[0].graph.entry
    # active environment: globals + locals of the running activation
    env = {x: start[x] for x in program.global_vars | procs[0].locals}
    stack: List[Tuple[int, int, Dict[str, int]]] = []  # (proc, return vertex, saved locals)

    def view() -> Dict[str, int]:
        full = dict(start)
        full.update(env)
        return full

    points = [(vertex, view())]
    steps: List[Union[int, str]] = []
    status = "fuel"
    for _ in range(fuel):
        graph = procs[proc].graph
        if vertex == graph.exit:
            if not stack:
                status = "exit"
                break
            caller, ret, saved = stack.pop()
            for x in procs[proc].locals:
                del env[x]
            env.update(saved)
            proc, vertex = caller, ret
            steps.append(RETURN)
            points.append((vertex, view()))
            continue
        enabled = []
        for e in graph.out_edges[vertex]:
            a = e.action
            try:
                if isinstance(a, Assume):
                    if eval_exp(a.exp, env) >= 0:
                        enabled.append((e, None))
                elif isinstance(a, Assign):
                    enabled.append((e, eval_exp(a.exp, env)))
                else:
                    enabled.append((e, None))
            except ZeroDivisionError:
                pass
        if not enabled:
            status = "stuck"
            break
        e, value = enabled[rng.randrange(len(enabled))]
        a = e.action
        if isinstance(a, Assign):
            env[a.var] = value
        elif isinstance(a, Havoc):
            env[a.var] = rng.randint(*HAVOC_RANGE)
        steps.append(e.id)
        if isinstance(a, Call):
            saved = {x: env.pop(x) for x in procs[proc].locals}
            stack.append((proc, e.tgt, saved))
            proc = a.callee
            for x in procs[proc].locals:
                env[x] = 0
            vertex = procs[proc].graph.entry
        else:
            vertex = e.tgt
        points.append((vertex, view()))
    else:
        if procs[proc].graph.exit == vertex and not stack:
            status = "exit"
    return Trace(points, steps, status)


def load_program(path: str) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())
