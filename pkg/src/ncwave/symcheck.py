"""Randomized exact identity suites for the symbolic engine."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .ncalg.algebra import (
    LAM,
    ZERO,
    AlgebraElement,
    Coefficient,
    canonicalize,
    flat_laplacian,
    lambda_order,
    mul,
    r,
    t,
    tau,
    x,
)
from .ncalg.forms import ModelConfig, left_mul, right_mul
from .waveops import (
    delta0,
    delta0_closed,
    dt_commutator,
    dt_commutator_identity,
    exterior_d,
    exterior_d_formula,
    gauge_identity_holds,
    inner_commutator,
    inner_theta,
    partial0,
    wave_extract,
)

BETAS = {
    "1": AlgebraElement.const(1),
    "r^-1": r(-1),
    "r^-2": r(-2),
    "r^-3": r(-3),
    "1+gam*r^-1": AlgebraElement.const(1) + canonicalize([((0, 0, 0, -1, 0), Coefficient({(0, 1): 1}))]),
}


def random_monomial(rng: random.Random, max_degree: int = 4, max_t: int = 2, coeff: bool = True) -> AlgebraElement:
    """A single term ``c x1^a1 x2^a2 x3^a3 r^k t^n`` with small exponents."""
    while True:
        a = [rng.randint(0, 2) for _ in range(3)]
        k = rng.randint(-2, 2)
        n = rng.randint(0, max_t)
        if sum(a) + abs(k) + n <= max_degree:
            break
    c = Fraction(rng.choice([1, -1, 2, -3, 5]), rng.choice([1, 1, 2, 3])) if coeff else Fraction(1)
    p = rng.choice([0, 0, 0, 1])
    q = rng.choice([0, 0, 0, 1])
    return canonicalize([((a[0], a[1], a[2], k, n), Coefficient({(p, q): c}))])


def random_polynomial(rng: random.Random, terms: int = 3, max_degree: int = 4, max_t: int = 2) -> AlgebraElement:
    out = ZERO
    for _ in range(terms):
        out = out + random_monomial(rng, max_degree, max_t)
    return out


def random_classical_polynomial(rng: random.Random, terms: int = 3) -> AlgebraElement:
    """Polynomial in ``x_i`` and ``t`` with no ``lam`` and no negative powers of ``r``."""
    raw = []
    for _ in range(terms):
        a = [rng.randint(0, 2) for _ in range(3)]
        k = rng.choice([0, 0, 2])
        n = rng.randint(0, 3)
        raw.append(((a[0], a[1], a[2], k, n), Fraction(rng.randint(-4, 4), rng.choice([1, 2, 3]))))
    return canonicalize(raw)


@dataclass
class SuiteResult:
    name: str
    passed: int
    total: int
    failures: list

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def _run(name: str, cases, check: Callable) -> SuiteResult:
    passed = 0
    failures = []
    total = 0
    for case in cases:
        total += 1
        try:
            good = check(*case)
        except Exception as exc:  # a crash is a failed case, not a failed run
            good = False
            case = case + (repr(exc),)
        if good:
            passed += 1
        elif len(failures) < 5:
            failures.append(case)
    return SuiteResult(name, passed, total, failures)


def suite_associativity(rng, n_cases=200) -> SuiteResult:
    cases = [tuple(random_monomial(rng) for _ in range(3)) for _ in range(n_cases)]
    return _run("associativity", cases, lambda a, b, c: mul(mul(a, b), c) == mul(a, mul(b, c)))


def suite_tau_derivation(rng, n_cases=200) -> SuiteResult:
    cases = [(random_monomial(rng), random_monomial(rng)) for _ in range(n_cases)]
    return _run("tau-derivation", cases, lambda f, g: tau(mul(f, g)) == mul(tau(f), g) + mul(f, tau(g)))


def suite_leibniz(rng, n_cases=200) -> SuiteResult:
    betas = list(BETAS.values())
    cases = [(random_monomial(rng, 4, 2), random_monomial(rng, 4, 2), rng.choice(betas)) for _ in range(n_cases)]

    def check(f, g, beta):
        model = ModelConfig(beta=beta)
        lhs = exterior_d(mul(f, g), model)
        rhs = right_mul(exterior_d(f, model), g, model) + left_mul(f, exterior_d(g, model))
        return lhs == rhs

    return _run("leibniz", cases, check)


def suite_right_module(rng, n_cases=100) -> SuiteResult:
    betas = list(BETAS.values())
    cases = [(random_monomial(rng, 3, 2), random_monomial(rng, 3, 2), random_monomial(rng, 3, 2), rng.randrange(5), rng.choice(betas)) for _ in range(n_cases)]

    def check(c, f, g, which, beta):
        from .ncalg.forms import FormSum

        model = ModelConfig(beta=beta)
        phi = FormSum.basis(which, c)
        return right_mul(right_mul(phi, f, model), g, model) == right_mul(phi, mul(f, g), model)

    return _run("right-module", cases, check)


def suite_theta_divisibility(rng, n_cases=100) -> SuiteResult:
    betas = list(BETAS.values())
    cases = [(random_polynomial(rng, 3, 4, 3), rng.choice(betas)) for _ in range(n_cases)]

    def check(psi, beta):
        model = ModelConfig(beta=beta)
        dec = wave_extract(psi, model)
        return dec.dt_coeff == partial0(psi) and exterior_d(psi, model) == exterior_d_formula(psi, model) and dec.box is not None

    return _run("theta-divisibility", cases, check)


def suite_delta0_table() -> SuiteResult:
    def check(beta):
        model = ModelConfig(beta=beta)
        want3 = mul(beta * 3, t(1)) - tau(beta) * Coefficient({(1, 0): 2})
        return (
            delta0(t(0), model).is_zero()
            and delta0(t(1), model).is_zero()
            and delta0(t(2), model) == beta
            and delta0(t(3), model) == want3
        )

    return _run("delta0-table", [(b,) for b in BETAS.values()], check)


def suite_delta0_closed() -> SuiteResult:
    cases = [(m, n) for m in range(-3, 6) for n in range(7)]
    return _run("delta0-closed", cases, lambda m, n: delta0(t(n), ModelConfig(beta=r(-m))) == delta0_closed(t(n), m))


def suite_classical_limit(rng, n_cases=50) -> SuiteResult:
    betas = list(BETAS.values())
    cases = [(random_classical_polynomial(rng), rng.choice(betas)) for _ in range(n_cases)]

    def check(psi, beta):
        from .waveops import partial_t

        box = wave_extract(psi, ModelConfig(beta=beta)).box
        want = flat_laplacian(psi) + mul(beta, partial_t(partial_t(psi)))
        return lambda_order(box, 0) == want

    return _run("classical-limit", cases, check)


def _degree_le3_monomials():
    out = []
    for a1 in range(4):
        for a2 in range(4 - a1):
            for a3 in range(2):
                for k in range(-3, 4):
                    if a1 + a2 + a3 + abs(k) <= 3:
                        out.append(canonicalize([((a1, a2, a3, k, 0), 1)]))
    return out


def suite_inner(ms=(-2, 0, 3, 4)) -> SuiteResult:
    mons = _degree_le3_monomials() + [t(1), t(2), mul(x(1), t(1))]
    cases = [(m, f) for m in ms for f in mons]

    def check(m, f):
        inner = inner_theta(m)
        return inner.defining_equations_hold() and inner_commutator(inner, f) == left_mul(-LAM, exterior_d(f, inner.model))

    return _run("inner-theta", cases, check)


def suite_gauge(rng, n_cases=30) -> SuiteResult:
    betas = list(BETAS.values())
    cases = []
    for _ in range(n_cases):
        h = ZERO
        for _ in range(2):
            h = h + canonicalize([((0, 0, 0, rng.randint(-3, 3), 0), Fraction(rng.randint(-3, 3), rng.choice([1, 2])))])
        cases.append((h, rng.choice(betas)))
    return _run("gauge-shift", cases, lambda h, beta: gauge_identity_holds(h, ModelConfig(beta=beta)))


def suite_dt_commutator() -> SuiteResult:
    cases = [(n, b) for n in range(7) for b in BETAS.values()]
    return _run(
        "dt-commutator",
        cases,
        lambda n, b: dt_commutator(t(n), ModelConfig(beta=b)) == dt_commutator_identity(n, ModelConfig(beta=b)),
    )


def run_all(seed: int = 0, n_cases: int = 200) -> list[SuiteResult]:
    rng = random.Random(seed)
    return [
        suite_associativity(rng, n_cases),
        suite_tau_derivation(rng, n_cases),
        suite_leibniz(rng, n_cases),
        suite_right_module(rng, max(1, n_cases // 2)),
        suite_theta_divisibility(rng, max(1, n_cases // 2)),
        suite_delta0_table(),
        suite_delta0_closed(),
        suite_classical_limit(rng, 50),
        suite_inner(),
        suite_gauge(rng),
        suite_dt_commutator(),
    ]
