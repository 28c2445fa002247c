"""Radial boundary-value runs of the wave equation region by region."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .field import PhysParams, ode_coeffs, region_bounds
from .rk import dopri5


@dataclass(frozen=True)
class RegionSpec:
    """One integration run.

    Parameters
    ----------
    region : str
        ``exterior``, ``interregnum`` or ``interior``.
    r_min, r_max : float
        Ends of the output grid; both strictly inside the open region.
    bc_location : str
        ``left`` or ``right``: the end where ``psi`` and ``psi'`` are imposed.
    bc_value, bc_slope : complex
        Boundary data ``psi`` and ``psi'``.
    n_points : int
        Size of the uniform part of the output grid.
    cluster : bool
        Add points spaced geometrically towards the region edge nearest the
        horizon, so that log-periodic oscillations are resolved.
    rtol, atol : float
        Tolerances of the adaptive integrator.
    cap : float
        Divergence threshold relative to the boundary amplitude.
    estimate_error : bool
        Re-run at half the tolerance to estimate the global error.
    """

    region: str
    r_min: float
    r_max: float
    bc_location: str = "right"
    bc_value: complex = 1.0
    bc_slope: complex = 0.0
    n_points: int = 2001
    cluster: bool = True
    rtol: float = 1e-10
    atol: float = 1e-13
    cap: float = 1e12
    estimate_error: bool = True


@dataclass
class RegionSolution:
    """Complex ``psi`` and ``psi'`` on an ascending radial grid."""

    r: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    params: PhysParams
    spec: RegionSpec
    error_estimate: float = math.nan
    diverged: bool = False
    status: str = "ok"
    n_steps: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def region(self) -> str:
        return self.spec.region

    @property
    def boundary_amplitude(self) -> float:
        return _bc_amplitude(self.spec)


def _bc_amplitude(spec: RegionSpec) -> float:
    return max(abs(spec.bc_value), abs(spec.bc_slope) * (spec.r_max - spec.r_min))


def make_grid(r_min: float, r_max: float, n: int, anchor: float | None = None) -> np.ndarray:
    """Uniform grid, refined geometrically towards ``anchor`` when it is given."""
    grid = np.linspace(r_min, r_max, n)
    if anchor is not None and not (r_min < anchor < r_max):
        d_near = min(abs(r_min - anchor), abs(r_max - anchor))
        d_far = max(abs(r_min - anchor), abs(r_max - anchor))
        if d_near > 0:
            side = 1.0 if r_min >= anchor else -1.0
            geo = anchor + side * np.geomspace(d_near, d_far, n)
            grid = np.concatenate([grid, geo])
    grid = np.unique(np.clip(grid, r_min, r_max))
    # merge points that coincide up to round-off
    keep = np.concatenate([[True], np.diff(grid) > 1e-12 * max(abs(r_max), abs(r_min))])
    grid = grid[keep]
    grid[-1] = r_max
    return grid


def _rhs(omega: float, params: PhysParams):
    def f(r, y):
        a2, a1, a0 = ode_coeffs(omega, r, params)
        psi, dpsi = y
        return (dpsi, -(a1 * dpsi + a0 * psi) / a2)

    return f


def _validate(spec: RegionSpec, omega: float, params: PhysParams) -> None:
    lo, hi = region_bounds(spec.region, omega, params)
    if not spec.r_min < spec.r_max:
        raise ValueError("r_min must be smaller than r_max")
    if not (lo < spec.r_min and spec.r_max < hi):
        raise ValueError(
            f"[{spec.r_min}, {spec.r_max}] is not strictly inside the {spec.region} region ({lo}, {hi})"
        )
    if spec.bc_location not in ("left", "right"):
        raise ValueError("bc_location must be 'left' or 'right'")
    if _bc_amplitude(spec) == 0:
        raise ValueError("boundary data are identically zero")


def _integrate(spec: RegionSpec, params: PhysParams, grid: np.ndarray, rtol: float, atol: float):
    omega = params.omega
    pts = grid if spec.bc_location == "left" else grid[::-1]
    amp = _bc_amplitude(spec)
    res = dopri5(
        _rhs(omega, params),
        float(pts[0]),
        (spec.bc_value, spec.bc_slope),
        [float(v) for v in pts],
        rtol=rtol,
        atol=atol * amp,
        cap=spec.cap * amp,
    )
    r = np.array(res.t, dtype=float)
    ys = np.array(res.y, dtype=complex).reshape(-1, 2)
    if spec.bc_location == "right":
        r, ys = r[::-1], ys[::-1]
    return r, ys[:, 0], ys[:, 1], res


def solve_region(spec: RegionSpec, params: PhysParams) -> RegionSolution:
    """Integrate ``a2 psi'' + a1 psi' + a0 psi = 0`` across one region.

    ``params.omega`` is the mode frequency.  The error estimate is the sup-norm
    difference to a run at half the tolerance, relative to ``max |psi|``.
    """
    omega = params.omega
    _validate(spec, omega, params)
    anchor = None
    if spec.cluster and params.gamma > 0:
        lo, hi = region_bounds(spec.region, omega, params)
        # refine towards the edge that touches the classical horizon
        anchor = params.gamma if abs(hi - params.gamma) < abs(lo - params.gamma) or spec.region == "exterior" else lo
        if spec.region == "interior":
            anchor = hi
    grid = make_grid(spec.r_min, spec.r_max, spec.n_points, anchor)
    r, psi, dpsi, res = _integrate(spec, params, grid, spec.rtol, spec.atol)
    diverged = res.status == "diverged"
    err = math.nan
    if spec.estimate_error and res.status in ("ok", "diverged"):
        r2, psi2, _, res2 = _integrate(spec, params, grid, spec.rtol / 2, spec.atol / 2)
        n = min(len(r), len(r2))
        if n:
            sl = slice(0, n) if spec.bc_location == "left" else slice(len(r) - n, len(r))
            sl2 = slice(0, n) if spec.bc_location == "left" else slice(len(r2) - n, len(r2))
            scale = np.max(np.abs(psi[sl])) or 1.0
            err = float(np.max(np.abs(psi[sl] - psi2[sl2])) / scale)
    return RegionSolution(
        r=r,
        psi=psi,
        dpsi=dpsi,
        params=params,
        spec=spec,
        error_estimate=err,
        diverged=diverged,
        status=res.status,
        n_steps=res.n_steps,
        meta={"message": res.message, "n_rejected": res.n_rejected},
    )


def _hermite_root(r0, r1, f0, f1, d0, d1) -> float:
    h = r1 - r0

    def p(s):
        s2, s3 = s * s, s * s * s
        return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * f1 + (s3 - s2) * h * d1

    a, b = 0.0, 1.0
    fa = f0
    for _ in range(60):
        m = 0.5 * (a + b)
        fm = p(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return r0 + 0.5 * (a + b) * h


def zero_crossings(r, values, slopes=None, rel_tol: float = 1e-12) -> np.ndarray:
    """Sign changes of a real sampled function, located by cubic Hermite interpolation.

    Samples with ``|v| <= rel_tol * max|v|`` count as zero; touching zero at an
    end of the grid is not a crossing.
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return np.array([])
    thresh = rel_tol * (np.max(np.abs(v)) or 1.0)
    sign = np.where(np.abs(v) <= thresh, 0, np.sign(v)).astype(int)
    nz = np.nonzero(sign)[0]
    out = []
    for i, j in zip(nz[:-1], nz[1:]):
        if sign[i] == sign[j]:
            continue
        if j == i + 1:
            if slopes is not None:
                out.append(_hermite_root(r[i], r[j], v[i], v[j], slopes[i], slopes[j]))
            else:
                out.append(r[i] - v[i] * (r[j] - r[i]) / (v[j] - v[i]))
        else:
            # one or more exact zeros in between
            out.append(float(np.mean(r[i + 1 : j])))
    return np.array(out)


@dataclass
class Diagnostics:
    zero_crossings: np.ndarray
    local_wavelengths: np.ndarray
    cycle_count: float
    max_amplitude: float
    started_at_zero: bool


def diagnostics_from_samples(r, psi, dpsi=None, start: str = "left", started_at_zero: bool | None = None) -> Diagnostics:
    """Zero crossings of ``Re psi`` and the derived cycle count.

    ``cycle_count = Z/2`` for ``Z`` crossings, plus ``1/2`` when the run starts
    from ``psi = 0`` (the rise out of the origin counts as half a cycle).
    """
    r = np.asarray(r, dtype=float)
    psi = np.asarray(psi, dtype=complex)
    slopes = None if dpsi is None else np.asarray(dpsi, dtype=complex).real
    zc = zero_crossings(r, psi.real, slopes)
    gaps = np.diff(zc)
    if started_at_zero is None:
        first = psi[0] if start == "left" else psi[-1]
        started_at_zero = bool(first == 0)
    count = len(zc) / 2 + (0.5 if started_at_zero else 0.0)
    amp = float(np.max(np.abs(psi))) if len(psi) else 0.0
    return Diagnostics(zc, gaps, count, amp, started_at_zero)


def diagnostics(sol: RegionSolution) -> Diagnostics:
    if len(sol.r) < 3:
        return Diagnostics(np.array([]), np.array([]), 0.0, 0.0, False)
    return diagnostics_from_samples(sol.r, sol.psi, sol.dpsi, start=sol.spec.bc_location)


def gap_at(diag: Diagnostics, r0: float) -> float:
    """Zero-crossing gap of the pair enclosing ``r0`` (nearest pair if none does)."""
    zc = diag.zero_crossings
    if len(zc) < 2:
        return math.nan
    idx = int(np.searchsorted(zc, r0))
    idx = min(max(idx, 1), len(zc) - 1)
    return float(zc[idx] - zc[idx - 1])


def min_gap_between(diag: Diagnostics, lo: float, hi: float) -> float:
    """Smallest gap among consecutive crossings lying in ``[lo, hi]``."""
    zc = diag.zero_crossings
    sel = zc[(zc >= lo) & (zc <= hi)]
    if len(sel) < 2:
        return math.nan
    return float(np.min(np.diff(sel)))


INSET = 1e-6


@dataclass(frozen=True)
class Preset:
    name: str
    params: PhysParams
    spec: RegionSpec
    description: str = ""


def _presets() -> dict:
    out = {}
    p_a = PhysParams(gamma=1.0, lambda_p=0.1, omega=10.0)
    out["fig1a"] = Preset(
        "fig1a",
        p_a,
        RegionSpec("exterior", 1.001, 10.0, "right", 1.0, 0.0),
        "exterior, psi=1, psi'=0 at r=10",
    )
    p_b = PhysParams(gamma=1.0, lambda_p=0.03, omega=10.0)
    hi_b = region_bounds("interior", p_b.omega, p_b)[1]
    out["fig1b"] = Preset(
        "fig1b",
        p_b,
        RegionSpec("interior", INSET, hi_b * (1 - INSET), "left", 0.0, 1.0),
        "interior, psi=0, psi'=1 at r=inset",
    )
    p_c = PhysParams(gamma=1.0, lambda_p=0.1, omega=2.7)
    lo_c, hi_c = region_bounds("interregnum", p_c.omega, p_c)
    out["fig1c"] = Preset(
        "fig1c",
        p_c,
        RegionSpec("interregnum", lo_c * (1 + INSET), hi_c * (1 - INSET), "right", 1.0, 0.0),
        "interregnum, psi=1, psi'=0 at the horizon side",
    )
    p_d = PhysParams(gamma=1.0, lambda_p=1 / 16, omega=16.0)
    hi_d = region_bounds("interior", p_d.omega, p_d)[1]
    out["cycles"] = Preset(
        "cycles",
        p_d,
        RegionSpec("interior", INSET, hi_d * (1 - INSET), "left", 0.0, 1.0),
        "interior at omega lambda_p = 1, omega/nu = 16",
    )
    return out


PRESETS = _presets()


def classical_counterpart(spec: RegionSpec, params: PhysParams) -> tuple[RegionSpec, PhysParams]:
    """Same run with ``lambda_p = 0``; the region is mapped to its classical range."""
    cparams = params.replace(lambda_p=0.0)
    if spec.region == "interregnum":
        raise ValueError("the interregnum has no classical counterpart")
    if spec.region == "interior":
        # the classical interior is (0, gamma)
        return replace(spec, r_max=params.gamma * (1 - INSET)), cparams
    return replace(spec), cparams


__all__ = [
    "INSET",
    "PRESETS",
    "Diagnostics",
    "Preset",
    "RegionSolution",
    "RegionSpec",
    "classical_counterpart",
    "diagnostics",
    "diagnostics_from_samples",
    "gap_at",
    "make_grid",
    "min_gap_between",
    "solve_region",
    "zero_crossings",
]
