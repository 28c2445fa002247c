"""Acceptance criteria, one test per criterion.

Each test records a ``CRITERION n: PASS/FAIL`` line that is printed in the
terminal summary, then asserts the same condition.
"""
import math
import random
import time
from dataclasses import replace

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from ncwave import symcheck
from ncwave.bhnum import (
    PRESETS,
    PhysParams,
    RegionSpec,
    classical_counterpart,
    dfield,
    dfield_closed,
    dfield_series,
    diagnostics,
    gap_at,
    interregnum_bounds,
    min_gap_between,
    one_plus_zmax,
    rk_fixed,
    script_d,
    solve_region,
    zmax,
)
from ncwave.bhnum.solve import _rhs
from ncwave.clgeom import einstein_residual, ricci_static4
from ncwave.ncalg import LAM, ModelConfig, divide_by_lambda, mul, r, t
from ncwave.ncalg.algebra import radial_derivative
from ncwave.waveops import delta0, exterior_d


def record(n, ok, detail):
    ACCEPTANCE_LINES.append(f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_01_delta0_table():
    def run():
        bad = []
        for name, beta in symcheck.BETAS.items():
            m = ModelConfig(beta=beta)
            want3 = 3 * mul(beta, t(1)) - 2 * mul(LAM, mul(r(1), radial_derivative(beta)))
            got = (delta0(t(0), m).is_zero(), delta0(t(1), m).is_zero(), delta0(t(2), m) == beta, delta0(t(3), m) == want3)
            if not all(got):
                bad.append(name)
        return bad

    bad, dt = timed(run)
    record(1, not bad and dt < 1.0, f"5 betas, mismatches={bad}, {dt:.2f}s")


def test_criterion_02_delta0_closed_forms():
    res, dt = timed(symcheck.suite_delta0_closed)
    record(2, res.ok and res.total == 63 and dt < 5.0, f"m in -3..5, n <= 6: {res.passed}/{res.total}, {dt:.2f}s")


def test_criterion_03_leibniz_associativity_divisibility():
    def run():
        rng = random.Random(2024)
        assoc = symcheck.suite_associativity(rng, 200)
        leib = symcheck.suite_leibniz(rng, 200)
        theta = symcheck.suite_theta_divisibility(rng, 200)
        # every d psi met above has a theta' coefficient divisible by lam
        betas = list(symcheck.BETAS.values())
        ndiv = 0
        for _ in range(200):
            f, g = symcheck.random_monomial(rng), symcheck.random_monomial(rng)
            model = ModelConfig(beta=rng.choice(betas))
            for psi in (f, g, mul(f, g)):
                divide_by_lambda(exterior_d(psi, model)["th"])
                ndiv += 1
        return assoc, leib, theta, ndiv

    (assoc, leib, theta, ndiv), dt = timed(run)
    ok = assoc.ok and leib.ok and theta.ok and assoc.total >= 200 and leib.total >= 200 and dt < 10.0
    detail = (f"assoc {assoc.passed}/{assoc.total}, leibniz {leib.passed}/{leib.total}, "
              f"theta' divisible {theta.passed}/{theta.total} + {ndiv} d psi, {dt:.2f}s")
    record(3, ok, detail)


def test_criterion_04_classical_limit():
    res = symcheck.suite_classical_limit(random.Random(4), 50)
    record(4, res.ok and res.total == 50, f"lam^0 part of box: {res.passed}/{res.total}")


def test_criterion_05_inner_element():
    res = symcheck.suite_inner((-2, 0, 3, 4))
    record(5, res.ok, f"[theta, f] = -lam df: {res.passed}/{res.total} (m in -2, 0, 3, 4)")


def test_criterion_06_ricci_flat_and_einstein():
    def run():
        flat = ricci_static4("1-gam/r", "1/(1-gam/r)").as_tuple() == (0, 0, 0)
        einstein = einstein_residual("1/(1+K*r^2)").is_zero()
        return flat, einstein

    (flat, einstein), dt = timed(run)
    record(6, flat and einstein and dt < 1.0, f"ricci=(0,0,0): {flat}, einstein residual 0: {einstein}, {dt:.2f}s")


def test_criterion_07_dfield_limits():
    errs = []
    for gamma, lp in ((1.0, 0.1), (2.0, 0.5), (1.0, 1.0)):
        for omega in (0.7, 3.0, -2.0):
            P = PhysParams(gamma=gamma, lambda_p=lp)
            x = omega * lp
            # r -> infinity
            errs.append(abs(dfield(omega, 1e10 * gamma, P).real / ((math.cosh(x) - 1) / lp**2) - 1))
            # r -> gamma from either side
            for side in (1, -1):
                d = dfield(omega, gamma * (1 + side * 1e-10), P).real
                errs.append(abs(d / (math.sinh(x) / lp**2) - 1))
            # lambda_p -> 0 by linear extrapolation from h and h/2
            for rr in (1.5 * gamma, 4 * gamma, 0.5 * gamma):
                cl = omega**2 / (2 * (1 - gamma / rr))
                h = 1e-5
                a = dfield(omega, rr, P.replace(lambda_p=h)).real
                b = dfield(omega, rr, P.replace(lambda_p=h / 2)).real
                errs.append(abs((2 * b - a) / cl - 1))
    worst = max(errs)
    record(7, worst < 1e-6, f"{len(errs)} limit checks, max rel err {worst:.2e}")


def test_criterion_08_series_and_script_d():
    worst_series = 0.0
    # r = gamma/2 must lie outside the interregnum, i.e. |omega lambda_p| < log 2
    for omega in (0.5, 1.0, -1.0, 1.3):
        for lp in (0.1, 0.25, 0.5):
            for gamma in (1.0, 2.0, 5.0):
                P = PhysParams(gamma=gamma, lambda_p=lp)
                for rr in (2 * gamma, gamma / 2):
                    want = dfield(omega, rr, P)
                    worst_series = max(worst_series, abs(dfield_series(omega, rr, P, 400) - want) / abs(want))
    rng = np.random.default_rng(8)
    worst_id = 0.0
    n = 0
    while n < 1000:
        lp = float(rng.choice([0.05, 0.5, 1.0]))
        x = float(rng.uniform(0.05, 3.0) * rng.choice([1, -1]))
        gamma = float(rng.choice([0.5, 1.0, 3.0]))
        rr = gamma * float(rng.uniform(0.05, 6.0))
        P = PhysParams(gamma=gamma, lambda_p=lp)
        lo, hi = interregnum_bounds(x / lp, P)
        if min(abs(rr - lo), abs(rr - hi)) < 1e-6 * gamma:
            continue
        lhs = script_d(-math.expm1(x), rr, P)
        rhs = math.exp(x) * lp**2 * dfield_closed(x / lp, rr, P)
        worst_id = max(worst_id, abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
        n += 1
    ok = worst_series < 1e-8 and worst_id < 1e-12
    record(8, ok, f"series max rel err {worst_series:.1e} (72 pts), identity max rel err {worst_id:.1e} ({n} pts)")


def test_criterion_09_zmax():
    P = PhysParams(lambda_p=1e-44)
    z = zmax(1e19, P)
    asym = []
    for x in (9.99e-4, 1e-4, 1e-6, 1e-8, 1e-12):
        Q = PhysParams(lambda_p=1.0)
        asym.append(abs(one_plus_zmax(x, Q) / math.sqrt(2 / x) - 1))
    ok = 2e12 <= z <= 8e12 and max(asym) < 0.01
    record(9, ok, f"z_max = {z:.3e}, worst (1+z_max)/sqrt(2/x) - 1 = {max(asym):.1e}")


def test_criterion_10_figure_presets():
    lines = []
    # (a) exterior
    p = PRESETS["fig1a"]
    q = diagnostics(solve_region(replace(p.spec, estimate_error=False), p.params))
    cs, cp = classical_counterpart(p.spec, p.params)
    c = diagnostics(solve_region(replace(cs, estimate_error=False), cp))
    g = p.params.gamma
    q_ratio = min_gap_between(q, 1.05 * g, 1.5 * g) / gap_at(q, 1.5 * g)
    c_shrink = gap_at(c, 1.5 * g) / min_gap_between(c, 1.05 * g, 1.5 * g)
    ok_a = q_ratio >= 0.5 and c_shrink > 5
    lines.append(f"(a) quantum min-gap ratio {q_ratio:.3f} (need >= 0.5), classical shrink {c_shrink:.1f}x (need > 5)")
    # (b) interior
    p = PRESETS["fig1b"]
    qs = solve_region(replace(p.spec, estimate_error=False), p.params)
    finite = qs.status == "ok" and np.isfinite(qs.psi[-1]) and np.isfinite(qs.dpsi[-1])
    cs, cp = classical_counterpart(p.spec, p.params)
    cd = diagnostics(solve_region(replace(cs, estimate_error=False), cp))
    lw = cd.local_wavelengths
    shrinking = len(lw) >= 10 and np.all(np.diff(lw[-10:]) < 0) and lw[-1] < 1e-5 * p.params.gamma
    ok_b = bool(finite and shrinking)
    lines.append(f"(b) quantum edge |psi|={abs(qs.psi[-1]):.2e} |psi'|={abs(qs.dpsi[-1]):.2e}, "
                 f"classical last wavelength {lw[-1]:.1e}")
    # (c) interregnum
    p = PRESETS["fig1c"]
    sol = solve_region(replace(p.spec, estimate_error=False), p.params)
    growth = np.max(np.abs(sol.psi)) / sol.boundary_amplitude
    ok_c = growth > 10 or sol.diverged
    lines.append(f"(c) max|psi|/boundary {growth:.0f}, diverged={sol.diverged}")
    record(10, ok_a and ok_b and ok_c, "; ".join(lines))


def test_criterion_11_cycle_calibration():
    p = PRESETS["cycles"]
    d = diagnostics(solve_region(replace(p.spec, estimate_error=False), p.params))
    record(11, 0.75 <= d.cycle_count <= 1.25, f"omega/nu=16, omega*lambda_p=1: cycle_count={d.cycle_count}")


def _spherical(k, r0, rr):
    M = np.array([[math.sin(k * r0) / r0, math.cos(k * r0) / r0],
                  [k * math.cos(k * r0) / r0 - math.sin(k * r0) / r0**2,
                   -k * math.sin(k * r0) / r0 - math.cos(k * r0) / r0**2]])
    A, B = np.linalg.solve(M, [1.0, 0.0])
    return (A * np.sin(k * rr) + B * np.cos(k * rr)) / rr


def test_criterion_12_solver_oracle():
    worst = 0.0
    for omega in (1.0, 5.0, 20.0):
        for loc in ("left", "right"):
            P = PhysParams(gamma=0.0, lambda_p=0.0, omega=omega)
            sol = solve_region(RegionSpec("exterior", 1.0, 10.0, loc, 1.0, 0.0, estimate_error=False), P)
            exact = _spherical(omega, 1.0 if loc == "left" else 10.0, sol.r)
            worst = max(worst, np.max(np.abs(sol.psi - exact)) / np.max(np.abs(exact)))
    f = _rhs(3.0, PhysParams(gamma=0.0, lambda_p=0.0))
    ref = _spherical(3.0, 1.0, np.array([4.0]))[0]
    errs = [abs(rk_fixed(f, 1.0, (1, 0), 4.0, n)[0] - ref) for n in (20, 40, 80, 160)]
    order = min(math.log2(errs[i] / errs[i + 1]) for i in range(3))
    record(12, worst < 1e-6 and order >= 4, f"sup rel err {worst:.1e}, observed order {order:.2f}")


def test_criterion_13_interregnum_support():
    mismatches = 0
    checked = 0
    for gamma, lp in ((1.0, 0.5), (2.0, 0.1)):
        for omega in (3.0, -3.0):
            P = PhysParams(gamma=gamma, lambda_p=lp)
            lo, hi = interregnum_bounds(omega, P)
            x = omega * lp
            want = (gamma * math.exp(-x), gamma) if omega > 0 else (gamma, gamma * math.exp(-x))
            assert (lo, hi) == pytest.approx(want, rel=1e-15)
            grid = gamma * np.geomspace(0.02, 50, 250)
            for rr in grid:
                rr = float(rr)
                if min(abs(rr - lo), abs(rr - hi)) < 1e-9 * gamma:
                    continue
                inside = lo < rr < hi
                mismatches += (dfield(omega, rr, P).imag != 0) != inside
                checked += 1
    record(13, mismatches == 0 and checked >= 1000, f"{checked} samples, {mismatches} support mismatches")
