import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncwave.bhnum import (
    PRESETS,
    PhysParams,
    RegionSpec,
    classical_counterpart,
    dfield,
    dfield_closed,
    dfield_infinity,
    dfield_mp,
    dfield_series,
    diagnostics,
    diagnostics_from_samples,
    harmonic_shift,
    horizon_residual,
    interregnum_bounds,
    make_grid,
    ode_coeffs,
    one_plus_z,
    one_plus_zmax,
    redshift,
    region_bounds,
    rk_fixed,
    script_d,
    solve_region,
    zero_crossings,
    zmax,
)
from ncwave.bhnum.solve import _rhs
from ncwave.clgeom import classical_wave_coeffs

# (omega, lambda_p, gamma, r) -> D, frozen from a 40-digit evaluation of the closed form
FROZEN_D = [
    ((1, 1, 1, 2), 0.72211684722086539427 + 0j),
    ((1, 1, 1, 0.5), 1.5638640912837596036 + 2.3114546995818434358j),
    ((1, 1, 1, 0.3), -1.1649363608308826272 + 0j),
    ((1, 0.1, 1, 2), 0.940145333244684051 + 0j),
    ((10, 0.1, 1, 1.5), 81.593320538897095051 + 0j),
    ((-1, 0.5, 1, 1.3), -1.0763944031442835304 - 3.6778300344488178623j),
    ((2.7, 0.1, 1, 0.9), 35.443735010437118744 + 29.607745818638865972j),
    ((1, 1e-3, 1, 3), 0.74975021863133431389 + 0j),
]


@pytest.mark.parametrize("args,want", FROZEN_D)
def test_dfield_frozen(args, want):
    om, lp, g, r = args
    got = dfield(om, r, PhysParams(gamma=g, lambda_p=lp))
    assert abs(got - want) <= 1e-13 * abs(want)


@pytest.mark.parametrize("args,want", FROZEN_D)
def test_dfield_mp_frozen(args, want):
    om, lp, g, r = args
    got = complex(dfield_mp(om, r, PhysParams(gamma=g, lambda_p=lp)))
    assert abs(got - want) <= 1e-15 * abs(want)


def test_dfield_limits():
    P = PhysParams(gamma=1.0, lambda_p=0.1)
    x = 0.1
    assert dfield(1, 1e9, P).real == pytest.approx((math.cosh(x) - 1) / 0.01, rel=1e-8)
    # the horizon value is approached like delta*log(delta), from both sides
    lim = math.sinh(x) / 0.01
    devs = [abs(dfield(1, 1 + s * d, P).real / lim - 1) for d in (1e-6, 1e-8, 1e-10) for s in (1, -1)]
    assert devs[0] > devs[2] > devs[4] and max(devs[4:]) < 1e-7
    for d in (1e-6, 1e-10):
        assert abs(dfield(1, 1 + d, P) - complex(dfield_mp(1, 1 + d, P))) < 1e-12 * lim


@pytest.mark.parametrize("r", [1.5, 2.0, 5.0])
def test_classical_continuity(r):
    P = PhysParams(gamma=1.0, lambda_p=1e-6)
    want = 1.0 / (2 * (1 - 1 / r))
    assert abs(dfield(1.0, r, P).real - want) / want < 1e-4


def test_classical_branch():
    assert dfield(2.0, 3.0, PhysParams(gamma=1.0, lambda_p=0.0)) == pytest.approx(4 / (2 * (2 / 3)))


def test_dfield_singular_points():
    P = PhysParams(gamma=1.0, lambda_p=1.0)
    for r in (1.0, math.exp(-1.0), 0.0, -1.0):
        with pytest.raises(ValueError):
            dfield(1.0, r, P)
    with pytest.raises(OverflowError):
        dfield(1e4, 2.0, P)


def test_dfield_real_outside_interregnum():
    P = PhysParams(gamma=1.0, lambda_p=0.5)
    lo, hi = interregnum_bounds(1.0, P)
    for r in np.linspace(0.05, 4, 300):
        d = dfield(1.0, float(r), P)
        if lo < r < hi:
            assert d.imag != 0
        elif not (abs(r - lo) < 1e-12 or abs(r - 1) < 1e-12):
            assert d.imag == 0


def test_small_x_switch_is_continuous():
    P = PhysParams(gamma=1.0, lambda_p=1.0)
    for r in (0.5, 2.0, 10.0):
        for om in (1e-2 * (1 - 1e-9), 1e-2, 1e-4):
            want = complex(dfield_mp(om, r, P))
            assert abs(dfield(om, r, P) - want) / abs(want) < 1e-12


# -- series oracle --------------------------------------------------------------

SERIES_GRID = [(om, lp, g) for om in (0.5, 1.0, -1.0) for lp in (0.1, 0.25, 0.5) for g in (1.0, 2.0)]


@pytest.mark.parametrize("om,lp,g", SERIES_GRID)
def test_series_matches_closed_form(om, lp, g):
    P = PhysParams(gamma=g, lambda_p=lp)
    for r in (2 * g, g / 2):
        want = dfield(om, r, P)
        got = dfield_series(om, r, P, 200)
        assert abs(got - want) / abs(want) < 1e-8


def test_series_example_outer():
    P = PhysParams(gamma=1, lambda_p=1)
    assert abs(dfield_series(1, 2, P, 60) - dfield(1, 2, P)) / abs(dfield(1, 2, P)) < 1e-8


def test_inner_series_rejected_in_interregnum():
    # r = gamma/2 at omega*lambda_p = 1 lies in (gamma e^-1, gamma)
    with pytest.raises(ValueError, match="diverges"):
        dfield_series(1, 0.5, PhysParams(gamma=1, lambda_p=1), 80)


def test_inner_series_leading_term():
    P = PhysParams(gamma=1.0, lambda_p=0.3)
    x = 0.3 * 2.0
    r = 1e-3
    slope = -(math.cosh(x) - 1) * (1 + 2 * math.exp(x)) / (3 * 0.09 * 1.0)
    assert dfield_series(2.0, r, P, 1).real == pytest.approx(slope * r, rel=1e-12)
    assert dfield(2.0, r, P).real == pytest.approx(slope * r, rel=1e-2)


def test_series_errors():
    P = PhysParams(gamma=1, lambda_p=1)
    with pytest.raises(ValueError):
        dfield_series(1, 2, P, 0)
    with pytest.raises(ValueError):
        dfield_series(1, 1.0, P, 10)


# -- script D -------------------------------------------------------------------

def test_script_d_zero():
    assert script_d(0.0, 2.0, PhysParams(gamma=1.0, lambda_p=0.1)) == 0


def test_script_d_identity_example():
    P = PhysParams(gamma=1.0, lambda_p=0.1)
    x = 0.1
    lhs = script_d(1 - math.exp(x), 2.0, P)
    rhs = math.exp(x) * 0.01 * dfield_closed(1.0, 2.0, P)
    assert abs(lhs - rhs) / abs(rhs) < 1e-12


def test_script_d_horizon_limit():
    P = PhysParams(gamma=1.0, lambda_p=0.1)
    X = -0.3
    assert script_d(X, 1 + 1e-9, P) == pytest.approx(-X + X * X / 2, rel=1e-6)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.05, 3.0), st.sampled_from([1, -1]), st.floats(0.05, 6.0))
def test_script_d_identity_property(x, sign, r):
    x = sign * x
    P = PhysParams(gamma=1.0, lambda_p=0.5)
    omega = x / 0.5
    lo, hi = interregnum_bounds(omega, P)
    if min(abs(r - lo), abs(r - hi)) < 1e-6:
        return
    d = dfield_closed(omega, r, P)
    lhs = script_d(-math.expm1(x), r, P)
    # D vanishes linearly at r = 0, so compare on an absolute floor
    assert abs(lhs - math.exp(x) * 0.25 * d) < 1e-12 * max(abs(lhs), 1.0)


# -- coefficients and regions ---------------------------------------------------

def test_flat_coefficients():
    a2, a1, a0 = ode_coeffs(3.0, 2.0, PhysParams(gamma=0.0, lambda_p=0.0))
    assert (a2, a1, a0) == (1, 1.0, 9.0)


@pytest.mark.parametrize("r,l", [(1.5, 0), (3.0, 2), (0.5, 1)])
def test_classical_coefficients_match_geometry(r, l):
    P = PhysParams(gamma=1.0, lambda_p=0.0, l=l)
    omega = 2.0
    a2, a1, a0 = ode_coeffs(omega, r, P)
    a_tt, a_r, a_rr, a_ang = classical_wave_coeffs("1-gam/r", "1/(1-gam/r)", l)
    vals = {k: f.subs(r=r, gam=1.0) for k, f in {"tt": a_tt, "r": a_r, "rr": a_rr, "ang": a_ang}.items()}
    # e^{i omega t} turns a_tt d_t^2 into -omega^2 a_tt
    assert a2 == pytest.approx(vals["rr"])
    assert a1 == pytest.approx(vals["r"])
    assert a0 == pytest.approx(-omega**2 * vals["tt"] + vals["ang"])


def test_horizon_limits_of_coefficients():
    P = PhysParams(gamma=1.0, lambda_p=0.1)
    x = 1.0
    a2, a1, a0 = ode_coeffs(10.0, 1 + 1e-9, P)
    assert abs(a2) < 1e-8
    assert a1 == pytest.approx(1.0, rel=1e-6)
    assert a0.real == pytest.approx(math.exp(x) * 2 * math.sinh(x) / 0.01, rel=1e-6)


def test_region_bounds():
    P = PhysParams(gamma=2.0, lambda_p=0.5)
    assert interregnum_bounds(1.0, P) == (2 * math.exp(-0.5), 2.0)
    assert interregnum_bounds(-1.0, P) == (2.0, 2 * math.exp(0.5))
    assert region_bounds("exterior", -1.0, P) == (2 * math.exp(0.5), math.inf)
    assert region_bounds("interior", 1.0, P) == (0.0, 2 * math.exp(-0.5))
    with pytest.raises(ValueError):
        region_bounds("outside", 1.0, P)


@settings(deadline=None)
@given(st.floats(0.01, 5.0), st.floats(0.1, 3.0))
def test_sign_symmetry_is_inversion(omega, gamma):
    P = PhysParams(gamma=gamma, lambda_p=0.3)
    lo, hi = interregnum_bounds(omega, P)
    lo2, hi2 = interregnum_bounds(-omega, P)
    # r -> gamma^2 / r maps one layer onto the other
    assert gamma**2 / hi == pytest.approx(lo2, rel=1e-12)
    assert gamma**2 / lo == pytest.approx(hi2, rel=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        PhysParams(gamma=-1)
    with pytest.raises(ValueError):
        PhysParams(lambda_p=-1)
    with pytest.raises(ValueError):
        PhysParams(c=0)
    with pytest.raises(ValueError):
        PhysParams(l=1.5)
    assert PhysParams(gamma=2.0, c=3.0).nu == 1.5


# -- solver -----------------------------------------------------------------------

def _spherical(k, r0, r):
    M = np.array([[math.sin(k * r0) / r0, math.cos(k * r0) / r0],
                  [k * math.cos(k * r0) / r0 - math.sin(k * r0) / r0**2,
                   -k * math.sin(k * r0) / r0 - math.cos(k * r0) / r0**2]])
    A, B = np.linalg.solve(M, [1.0, 0.0])
    return (A * np.sin(k * r) + B * np.cos(k * r)) / r


@pytest.mark.parametrize("omega,loc", [(3.0, "left"), (7.0, "right")])
def test_flat_spherical_waves(omega, loc):
    P = PhysParams(gamma=0.0, lambda_p=0.0, omega=omega)
    spec = RegionSpec("exterior", 1.0, 10.0, loc, 1.0, 0.0)
    sol = solve_region(spec, P)
    r0 = 1.0 if loc == "left" else 10.0
    exact = _spherical(omega, r0, sol.r)
    assert np.max(np.abs(sol.psi - exact)) / np.max(np.abs(exact)) < 1e-6
    assert np.all(np.diff(sol.r) > 0)


def test_fixed_step_order():
    P = PhysParams(gamma=0.0, lambda_p=0.0, omega=3.0)
    f = _rhs(3.0, P)
    ref = _spherical(3.0, 1.0, np.array([4.0]))[0]
    errs = [abs(rk_fixed(f, 1.0, (1, 0), 4.0, n)[0] - ref) for n in (20, 40, 80)]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 4


def test_error_estimate_tracks_tolerance():
    P = PhysParams(gamma=0.0, lambda_p=0.0, omega=5.0)
    ests = []
    for rtol in (1e-5, 1e-8):
        spec = RegionSpec("exterior", 1.0, 10.0, "left", 1.0, 0.0, n_points=5, rtol=rtol, atol=rtol)
        ests.append(solve_region(spec, P).error_estimate)
    assert ests[1] < ests[0]


def test_solver_rejects_bad_specs():
    P = PhysParams(gamma=1.0, lambda_p=0.1, omega=10.0)
    with pytest.raises(ValueError):
        solve_region(RegionSpec("exterior", 0.9, 2.0), P)
    with pytest.raises(ValueError):
        solve_region(RegionSpec("exterior", 3.0, 2.0), P)
    with pytest.raises(ValueError):
        solve_region(RegionSpec("exterior", 2.0, 3.0, bc_value=0, bc_slope=0), P)
    with pytest.raises(ValueError):
        solve_region(RegionSpec("exterior", 2.0, 3.0, bc_location="middle"), P)


def test_divergence_flag():
    P = PhysParams(gamma=0.0, lambda_p=0.0, omega=0.0)
    P = replace(P, l=3)
    # growing r^l mode with a tiny cap trips the flag
    spec = RegionSpec("exterior", 1.0, 100.0, "left", 1.0, 3.0, cap=10.0, estimate_error=False)
    sol = solve_region(spec, P)
    assert sol.diverged and sol.r[-1] < 100.0
    assert np.all(np.isfinite(sol.psi))


def test_make_grid_merges_duplicates():
    g = make_grid(1e-6, 0.74, 50, 0.7400001)
    assert np.all(np.diff(g) > 0) and g[0] == 1e-6 and g[-1] == 0.74


def test_horizon_residual_regular_solution():
    P = PhysParams(gamma=1.0, lambda_p=0.1, omega=10.0, l=1)
    res = []
    for delta in (1e-3, 1e-4, 1e-5):
        r0 = 1 + delta
        a2, a1, a0 = ode_coeffs(P.omega, r0, P)
        # regular branch: a1 psi' + a0 psi = 0 at leading order
        spec = RegionSpec("exterior", r0, 1.5, "left", 1.0, -a0 / a1, n_points=201, estimate_error=False)
        sol = solve_region(spec, P)
        res.append(abs(horizon_residual(sol.psi[0], sol.dpsi[0], P.omega, P)))
    assert res[2] < res[1] < res[0]
    assert res[2] < 1e-3 * abs(horizon_residual(1.0, 0.0, P.omega, P))


def test_horizon_residual_is_scaled_ode():
    P = PhysParams(gamma=1.0, lambda_p=0.1, omega=3.0, l=2, c=2.0)
    r0 = 1 + 1e-12
    _, a1, a0 = ode_coeffs(P.omega, r0, P)
    psi, dpsi = 0.7 + 0.1j, -1.3j
    assert horizon_residual(psi, dpsi, P.omega, P) == pytest.approx(-P.c * P.lambda_p * (a1 * dpsi + a0 * psi), rel=1e-6)


# -- diagnostics ---------------------------------------------------------------

def test_sine_cycle_count():
    k = 3.0
    r = np.linspace(0, 2 * math.pi / k, 500)
    d = diagnostics_from_samples(r, np.sin(k * r), k * np.cos(k * r))
    assert d.cycle_count == 1.0
    assert d.zero_crossings == pytest.approx([math.pi / k], abs=1e-9)


def test_zero_crossings_linear_fallback():
    r = np.linspace(0, 1, 11)
    zc = zero_crossings(r, r - 0.55)
    assert zc == pytest.approx([0.55])
    assert len(zero_crossings(r, np.ones_like(r))) == 0


def test_interior_cycle_calibration_preset():
    p = PRESETS["cycles"]
    d = diagnostics(solve_region(replace(p.spec, estimate_error=False), p.params))
    assert 0.75 <= d.cycle_count <= 1.25


def test_exterior_wavelength_properties():
    p = PRESETS["fig1a"]
    q = diagnostics(solve_region(replace(p.spec, estimate_error=False), p.params))
    cs, cp = classical_counterpart(p.spec, p.params)
    c = diagnostics(solve_region(replace(cs, estimate_error=False), cp))
    # classical crossings pile up without bound near the horizon; quantum ones do not
    near = lambda d: np.sum(d.zero_crossings < 1.05)
    assert near(c) > 3 * near(q)
    assert np.min(q.local_wavelengths) > 5 * np.min(c.local_wavelengths)


# -- redshift and deficit --------------------------------------------------------

def test_zmax_values():
    P = PhysParams(lambda_p=1e-44)
    assert 2e12 <= zmax(1e19, P) <= 8e12
    assert one_plus_zmax(1e19, P) == pytest.approx(math.sqrt(2 / 1e-25), rel=1e-9)
    assert one_plus_zmax(50.0, PhysParams(lambda_p=1.0)) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        zmax(-1.0, P)


def test_redshift_classical_and_quantum():
    P0 = PhysParams(gamma=1.0, lambda_p=0.0)
    assert one_plus_z(1.0, 4.0, P0) == pytest.approx(1 / math.sqrt(0.75))
    P = PhysParams(gamma=1.0, lambda_p=0.1)
    # approaches the horizon bound from below
    assert one_plus_z(10.0, 1 + 1e-9, P) == pytest.approx(one_plus_zmax(10.0, P), rel=1e-6)
    assert redshift(10.0, 3.0, P) > 0
    with pytest.raises(ValueError):
        one_plus_z(10.0, 0.9, P)


def test_dfield_infinity():
    P = PhysParams(gamma=1.0, lambda_p=0.2)
    assert dfield_infinity(3.0, P) == pytest.approx((math.cosh(0.6) - 1) / 0.04)


def test_harmonic_shift_n1():
    h = harmonic_shift(1e-3, 1, 3.0, PhysParams(gamma=1.0, lambda_p=1.0))
    assert h.deficit_exact == 0 and h.deficit_first_order == 0


def test_harmonic_first_order_converges():
    P = PhysParams(gamma=1.0, lambda_p=1.0)
    ratios = [harmonic_shift(om, 3, 2.0, P) for om in (1e-2, 1e-4, 1e-6)]
    dev = [abs(h.deficit_exact / h.deficit_first_order - 1) for h in ratios]
    assert dev[0] > dev[1] > dev[2] and dev[2] < 1e-5
    # the s^(1/2) form misses a factor 1/s = 2 at r = 2 gamma
    assert ratios[2].deficit_exact / ratios[2].deficit_weak_field == pytest.approx(2.0, rel=1e-4)


def test_harmonic_scenario():
    c, ly = 299792458.0, 9.4607e15
    gamma = 3000.0
    P = PhysParams(gamma=gamma, lambda_p=5.39e-44, c=c)
    h = harmonic_shift(c / 1e-10, 10, 10 * gamma, P)
    assert 0.1 / 3 <= h.accumulation_length / ly <= 0.3
    assert 0.1 / 3 <= h.accumulation_length_exact / ly <= 0.3


def test_harmonic_errors():
    P = PhysParams(gamma=1.0, lambda_p=1.0)
    with pytest.raises(ValueError):
        harmonic_shift(1.0, 0, 2.0, P)
    with pytest.raises(ValueError):
        harmonic_shift(1.0, 2, 0.5, P)
