"""Abstract domain interface and sampling-based axiom checking.

Every domain provides the eight operations of a quantified pre-Kleene algebra.
The checkers instantiate each law on randomly sampled operands and report the
first counterexample per law; counterexamples can be replayed with
:func:`replay`.
"""

from __future__ import annotations

import json
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

Sampler = Callable[[random.Random], Any]


class Domain(ABC):
    """A quantified pre-Kleene algebra with widening."""

    variables: Tuple[str, ...] = ()

    @abstractmethod
    def zero(self): ...

    @abstractmethod
    def one(self): ...

    @abstractmethod
    def plus(self, a, b): ...

    @abstractmethod
    def times(self, a, b): ...

    @abstractmethod
    def star(self, a): ...

    @abstractmethod
    def exists(self, x: str, a): ...

    @abstractmethod
    def widen(self, a, b): ...

    @abstractmethod
    def equal(self, a, b) -> bool: ...

    def leq(self, a, b) -> bool:
        return self.equal(self.plus(a, b), b)

    def exists_all(self, xs, a):
        for x in sorted(xs):
            a = self.exists(x, a)
        return a

    def sum(self, values):
        out = self.zero()
        for v in values:
            out = self.plus(out, v)
        return out

    def render(self, a) -> str:
        return str(a)


# ---------------------------------------------------------------------------
# Laws.  Each returns True when the instance holds.


def _assoc_plus(d: Domain, a, b, c) -> bool:
    return d.equal(d.plus(a, d.plus(b, c)), d.plus(d.plus(a, b), c))


def _comm_plus(d: Domain, a, b) -> bool:
    return d.equal(d.plus(a, b), d.plus(b, a))


def _idem_plus(d: Domain, a) -> bool:
    return d.equal(d.plus(a, a), a)


def _unit_zero(d: Domain, a) -> bool:
    return d.equal(d.plus(a, d.zero()), a)


def _assoc_times(d: Domain, a, b, c) -> bool:
    return d.equal(d.times(a, d.times(b, c)), d.times(d.times(a, b), c))


def _unit_one(d: Domain, a) -> bool:
    return d.equal(d.times(d.one(), a), a) and d.equal(d.times(a, d.one()), a)


def _left_pre_dist(d: Domain, a, b, c) -> bool:
    return d.leq(d.plus(d.times(a, b), d.times(a, c)), d.times(a, d.plus(b, c)))


def _right_pre_dist(d: Domain, a, b, c) -> bool:
    return d.leq(d.plus(d.times(a, c), d.times(b, c)), d.times(d.plus(a, b), c))


def _i1(d: Domain, a) -> bool:
    s = d.star(a)
    return d.leq(d.plus(d.one(), d.times(a, s)), s)


def _i2(d: Domain, a) -> bool:
    s = d.star(a)
    return d.leq(d.plus(d.one(), d.times(s, a)), s)


def _dist_left(d: Domain, a, bs) -> bool:
    return d.equal(d.times(a, d.sum(bs)), d.sum(d.times(a, b) for b in bs))


def _dist_right(d: Domain, bs, a) -> bool:
    return d.equal(d.times(d.sum(bs), a), d.sum(d.times(b, a) for b in bs))


def _q1(d: Domain, x, a, b) -> bool:
    return d.leq(d.plus(d.exists(x, a), d.exists(x, b)), d.exists(x, d.plus(a, b)))


def _q1_exact(d: Domain, x, a, b) -> bool:
    return d.equal(d.plus(d.exists(x, a), d.exists(x, b)), d.exists(x, d.plus(a, b)))


def _q2(d: Domain, x, a, b) -> bool:
    ea = d.exists(x, a)
    return d.equal(d.exists(x, d.times(ea, b)), d.times(ea, d.exists(x, b)))


def _q3(d: Domain, x, a, b) -> bool:
    eb = d.exists(x, b)
    return d.equal(d.exists(x, d.times(a, eb)), d.times(d.exists(x, a), eb))


def _q4(d: Domain, x, y, a) -> bool:
    return d.equal(d.exists(x, d.exists(y, a)), d.exists(y, d.exists(x, a)))


def _w1(d: Domain, a, b) -> bool:
    return d.leq(d.plus(a, b), d.widen(a, b))


LAWS: Dict[str, Callable[..., bool]] = {
    "assoc_plus": _assoc_plus,
    "comm_plus": _comm_plus,
    "idem_plus": _idem_plus,
    "unit_zero": _unit_zero,
    "assoc_times": _assoc_times,
    "unit_one": _unit_one,
    "left_pre_dist": _left_pre_dist,
    "right_pre_dist": _right_pre_dist,
    "I1": _i1,
    "I2": _i2,
    "dist_left": _dist_left,
    "dist_right": _dist_right,
    "Q1": _q1,
    "Q1_exact": _q1_exact,
    "Q2": _q2,
    "Q3": _q3,
    "Q4": _q4,
    "W1": _w1,
}

PKA_AXIOMS = (
    "assoc_plus",
    "comm_plus",
    "idem_plus",
    "unit_zero",
    "assoc_times",
    "unit_one",
    "left_pre_dist",
    "right_pre_dist",
    "I1",
    "I2",
)


@dataclass
class AxiomResult:
    group: str
    status: str = "pass"  # pass | fail | inconclusive
    checked: int = 0
    counterexample: Optional[tuple] = None
    detail: str = ""


@dataclass
class AxiomReport:
    results: Dict[str, AxiomResult] = field(default_factory=dict)

    def entry(self, name: str, group: str) -> AxiomResult:
        if name not in self.results:
            self.results[name] = AxiomResult(group)
        return self.results[name]

    def record(self, name: str, group: str, holds: bool, operands: tuple) -> None:
        r = self.entry(name, group)
        r.checked += 1
        if not holds and r.status != "fail":
            r.status = "fail"
            r.counterexample = operands

    @property
    def ok(self) -> bool:
        return all(r.status != "fail" for r in self.results.values())

    def failures(self) -> List[str]:
        return [n for n, r in self.results.items() if r.status == "fail"]

    def status(self, name: str) -> str:
        return self.results[name].status

    def merge(self, other: "AxiomReport") -> "AxiomReport":
        out = AxiomReport(dict(self.results))
        out.results.update(other.results)
        return out

    def to_json(self, domain: Optional[Domain] = None) -> str:
        def show(v):
            if domain is not None and not isinstance(v, (str, int, list, tuple)):
                return domain.render(v)
            if isinstance(v, (list, tuple)):
                return [show(x) for x in v]
            return v if isinstance(v, (str, int)) else str(v)

        data = {}
        for name, r in self.results.items():
            item = {"group": r.group, "status": r.status, "checked": r.checked}
            if r.counterexample is not None:
                item["counterexample"] = show(r.counterexample)
            if r.detail:
                item["detail"] = r.detail
            data[name] = item
        return json.dumps(data, indent=2, sort_keys=True)

    def table(self) -> str:
        rows = [f"{'group':<10} {'axiom':<16} {'status':<13} checked"]
        for name, r in self.results.items():
            rows.append(f"{r.group:<10} {name:<16} {r.status:<13} {r.checked}")
        return "\n".join(rows)


def replay(domain: Domain, name: str, operands: tuple) -> bool:
    """Re-evaluate a law instance; returns True when it holds."""
    return LAWS[name](domain, *operands)


def check_pka(domain: Domain, samples: Sampler, n: int, seed: int = 0) -> AxiomReport:
    rng = random.Random(seed)
    report = AxiomReport()
    for name in PKA_AXIOMS:
        report.entry(name, "PKA")
    for _ in range(n):
        a, b, c = samples(rng), samples(rng), samples(rng)
        for name in PKA_AXIOMS:
            law = LAWS[name]
            arity = law.__code__.co_argcount - 1
            ops = (a, b, c)[:arity]
            report.record(name, "PKA", law(domain, *ops), ops)
    return report


def star_sum_status(domain: Domain, a, budget: int) -> Tuple[str, str]:
    """Compare star(a) with the partial sums of powers of a."""
    total = domain.one()
    power = domain.one()
    for step in range(1, budget + 1):
        power = domain.times(power, a)
        nxt = domain.plus(total, power)
        if domain.equal(nxt, total):
            if domain.equal(total, domain.star(a)):
                return "pass", f"powers stabilise after {step} steps"
            return "fail", f"sum of powers stabilised after {step} steps but differs from star"
        total = nxt
    if not domain.leq(total, domain.star(a)):
        return "fail", "a partial sum of powers is not below star"
    return "inconclusive", f"powers still growing after {budget} steps"


def check_quantale(
    domain: Domain, samples: Sampler, n: int, star_terms: int = 100, seed: int = 0
) -> AxiomReport:
    rng = random.Random(seed)
    report = AxiomReport()
    for name in ("dist_left", "dist_right"):
        report.entry(name, "Quantale")
    star_entry = report.entry("star_sum", "Quantale")
    inconclusive = None
    for _ in range(n):
        a = samples(rng)
        bs = tuple(samples(rng) for _ in range(rng.randint(0, 4)))
        report.record("dist_left", "Quantale", _dist_left(domain, a, bs), (a, bs))
        report.record("dist_right", "Quantale", _dist_right(domain, bs, a), (bs, a))
        status, detail = star_sum_status(domain, a, star_terms)
        star_entry.checked += 1
        if status == "fail" and star_entry.status != "fail":
            star_entry.status, star_entry.counterexample, star_entry.detail = "fail", (a,), detail
        elif status == "inconclusive" and inconclusive is None:
            inconclusive = (a, detail)
    if inconclusive is not None and star_entry.status == "pass":
        star_entry.status = "inconclusive"
        star_entry.counterexample = (inconclusive[0],)
        star_entry.detail = inconclusive[1]
    return report


def stabilization_status(domain: Domain, chain: Sequence[Any], settle: int) -> Tuple[str, str]:
    """Widen along ``chain``, whose values stop growing at index ``settle``.

    The widened sequence must be constant from index ``settle + 2`` on.
    """
    w = chain[0]
    last_change = 0
    for i, a in enumerate(chain[1:], start=1):
        nxt = domain.widen(w, a)
        if not domain.equal(nxt, w):
            last_change = i
        w = nxt
    if last_change <= settle + 2:
        return "pass", f"stable after step {last_change} (chain settles at {settle})"
    return "fail", f"still changing at step {last_change}; chain settled at {settle}"


def check_qpka(
    domain: Domain,
    samples: Sampler,
    variables: Sequence[str],
    n: int,
    seed: int = 0,
    exact_q1: bool = False,
    budget: int = 100,
    chains: int = 3,
) -> AxiomReport:
    rng = random.Random(seed)
    report = AxiomReport()
    q1 = "Q1_exact" if exact_q1 else "Q1"
    names = (q1, "Q2", "Q3", "Q4")
    for name in names:
        report.entry(name, "Q")
    report.entry("W1", "W")
    vs = list(variables)
    for _ in range(n):
        a, b = samples(rng), samples(rng)
        x, y = rng.choice(vs), rng.choice(vs)
        report.record(q1, "Q", LAWS[q1](domain, x, a, b), (x, a, b))
        report.record("Q2", "Q", _q2(domain, x, a, b), (x, a, b))
        report.record("Q3", "Q", _q3(domain, x, a, b), (x, a, b))
        report.record("Q4", "Q", _q4(domain, x, y, a), (x, y, a))
        report.record("W1", "W", _w1(domain, a, b), (a, b))
    stab = report.entry("stabilization", "W")
    for _ in range(chains):
        settle = rng.randint(1, max(1, budget // 2))
        chain = [samples(rng)]
        for i in range(1, budget):
            chain.append(domain.plus(chain[-1], samples(rng)) if i <= settle else chain[-1])
        status, detail = stabilization_status(domain, chain, settle)
        stab.checked += 1
        if status == "fail" and stab.status != "fail":
            stab.status, stab.detail = "fail", detail
        elif stab.status == "pass":
            stab.detail = detail
    return report


def check_order(domain: Domain, samples: Sampler, n: int, seed: int = 0) -> AxiomReport:
    """leq is reflexive, transitive and antisymmetric modulo equal (sampled)."""
    rng = random.Random(seed)
    report = AxiomReport()
    for _ in range(n):
        a, b, c = samples(rng), samples(rng), samples(rng)
        report.record("leq_refl", "Order", domain.leq(a, a), (a,))
        ab = domain.plus(a, b)
        abc = domain.plus(ab, c)
        report.record(
            "leq_trans",
            "Order",
            not (domain.leq(a, ab) and domain.leq(ab, abc)) or domain.leq(a, abc),
            (a, b, c),
        )
        both = domain.leq(a, b) and domain.leq(b, a)
        report.record("leq_antisym", "Order", not both or domain.equal(a, b), (a, b))
    return report
