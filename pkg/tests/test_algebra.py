from __future__ import annotations

import json
import random

from pathalg.algebra import (
    PKA_AXIOMS,
    Domain,
    check_order,
    check_pka,
    check_qpka,
    check_quantale,
    replay,
    stabilization_status,
    star_sum_status,
)
from pathalg.lradom import LraDomain
from pathalg.reldom import RelDomain


class Saturating(Domain):
    """Counts 0..3 with saturating addition: ⊕ is not idempotent."""

    variables = ("x",)

    def zero(self):
        return 0

    def one(self):
        return 1

    def plus(self, a, b):
        return min(a + b, 3)

    def times(self, a, b):
        return min(a * b, 3)

    def star(self, a):
        return 1 if a == 0 else 3

    def exists(self, x, a):
        return a

    def widen(self, a, b):
        return 3

    def equal(self, a, b):
        return a == b

    def sample(self, rng):
        return rng.randint(0, 3)


class Singleton(Domain):
    """The one-element algebra where 0 = 1."""

    variables = ("x",)

    def zero(self):
        return ()

    def one(self):
        return ()

    def plus(self, a, b):
        return ()

    def times(self, a, b):
        return ()

    def star(self, a):
        return ()

    def exists(self, x, a):
        return ()

    def widen(self, a, b):
        return ()

    def equal(self, a, b):
        return True

    def sample(self, rng):
        return ()


def test_broken_domain_reports_idempotence() -> None:
    d = Saturating()
    report = check_pka(d, d.sample, 50)
    assert "idem_plus" in report.failures()
    ce = report.results["idem_plus"].counterexample
    assert replay(d, "idem_plus", ce) is False
    assert not report.ok


def test_counterexamples_replay_as_failures() -> None:
    d = Saturating()
    report = check_pka(d, d.sample, 100).merge(check_qpka(d, d.sample, d.variables, 100))
    for name in report.failures():
        r = report.results[name]
        if r.counterexample is not None and name != "stabilization":
            assert replay(d, name, r.counterexample) is False


def test_singleton_domain_passes_everything() -> None:
    d = Singleton()
    report = (
        check_pka(d, d.sample, 20)
        .merge(check_quantale(d, d.sample, 20))
        .merge(check_qpka(d, d.sample, d.variables, 20))
    )
    assert report.ok
    assert report.status("star_sum") == "pass"


def test_report_lists_every_axiom_key() -> None:
    d = Singleton()
    report = (
        check_pka(d, d.sample, 1)
        .merge(check_quantale(d, d.sample, 1))
        .merge(check_qpka(d, d.sample, d.variables, 1))
    )
    expected = set(PKA_AXIOMS) | {
        "Q1", "Q2", "Q3", "Q4", "W1", "stabilization", "dist_left", "dist_right", "star_sum",
    }
    assert set(report.results) == expected
    data = json.loads(report.to_json())
    assert data["I1"]["status"] == "pass"
    assert report.table().splitlines()[0].split() == ["group", "axiom", "status", "checked"]


def test_relational_axioms_exact() -> None:
    d = RelDomain(("x", "y"), 3)
    report = (
        check_pka(d, d.random_value, 200)
        .merge(check_qpka(d, d.random_value, d.variables, 200, exact_q1=True))
        .merge(check_quantale(d, d.random_value, 100))
        .merge(check_order(d, d.random_value, 100))
    )
    assert report.failures() == []


def test_relational_star_reaches_fixpoint_within_height() -> None:
    d = RelDomain(("x", "y"), 3)
    rng = random.Random(3)
    for _ in range(20):
        status, detail = star_sum_status(d, d.random_value(rng), 81)
        assert status == "pass", detail


def test_exists_of_one_is_one() -> None:
    for d in (RelDomain(("x", "y"), 3), LraDomain(("x", "y"))):
        for x in d.variables:
            assert d.equal(d.exists(x, d.one()), d.one())


def test_lra_pka_and_quantifier_laws() -> None:
    d = LraDomain(("x", "y"))
    report = check_pka(d, d.random_value, 40, seed=2).merge(
        check_qpka(d, d.random_value, d.variables, 40, seed=2)
    )
    assert report.failures() == []
    assert check_order(d, d.random_value, 40, seed=2).failures() == []


def test_lra_star_is_not_the_sum_of_powers() -> None:
    d = LraDomain(("x", "y"))
    report = check_quantale(d, d.random_value, 20, star_terms=10, seed=1)
    assert report.status("star_sum") in ("fail", "inconclusive")


def test_trivial_widening_stabilises_quickly() -> None:
    d = LraDomain(("x",))
    x = [d.random_value(random.Random(i)) for i in range(6)]
    chain = [x[0]]
    for a in x[1:4]:
        chain.append(d.plus(chain[-1], a))
    chain += [chain[-1]] * 6
    status, detail = stabilization_status(d, chain, 3)
    assert status == "pass", detail


def test_stabilization_detects_a_widening_that_keeps_moving() -> None:
    d = Saturating()

    class Flapping(Saturating):
        def widen(self, a, b):
            return 3 - a

    f = Flapping()
    chain = [0, 1, 2, 3] + [3] * 10
    assert stabilization_status(f, chain, 3)[0] == "fail"
    assert stabilization_status(d, chain, 3)[0] == "pass"
