"""Frequency-domain eigenvalue D(omega, r) of the time operator and its consequences.

Notation used throughout::

    x = omega * lambda_p,   u = gamma / r,   s = 1 - u,   zeta = exp(-x)

The time operator acts on ``exp(i omega t)`` with the deformation parameter
``lambda = i lambda_p``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath

_EXP_LIMIT = 700.0


@dataclass(frozen=True)
class PhysParams:
    """Physical parameters of a mode.

    Parameters
    ----------
    gamma : float
        Schwarzschild radius; ``0`` gives flat space.
    lambda_p : float
        Planck-scale time; ``0`` selects the classical operator.
    c : float
        Speed of light.
    l : int
        Angular momentum of the spherical harmonic.
    omega : float
        Signed mode frequency.
    """

    gamma: float = 1.0
    lambda_p: float = 0.0
    c: float = 1.0
    l: int = 0
    omega: float = 1.0

    def __post_init__(self):
        if not self.gamma >= 0:
            raise ValueError("gamma must be >= 0")
        if not self.lambda_p >= 0:
            raise ValueError("lambda_p must be >= 0")
        if not self.c > 0:
            raise ValueError("c must be > 0")
        if int(self.l) != self.l or self.l < 0:
            raise ValueError("l must be a non-negative integer")

    @property
    def nu(self) -> float:
        """Frequency ``c / gamma`` attached to the Schwarzschild radius."""
        return self.c / self.gamma if self.gamma else math.inf

    @property
    def classical(self) -> bool:
        return self.lambda_p == 0

    def replace(self, **changes) -> "PhysParams":
        values = {k: getattr(self, k) for k in ("gamma", "lambda_p", "c", "l", "omega")}
        values.update(changes)
        return PhysParams(**values)


def _check_x(x: float) -> None:
    if abs(x) > _EXP_LIMIT:
        raise OverflowError(f"|omega * lambda_p| = {abs(x):.3g} is too large for double precision")


def _us(r: float, gamma: float) -> tuple[float, float]:
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    u = gamma / r
    s = 1.0 - u
    if s == 0.0:
        raise ValueError("r = gamma is a singular point")
    return u, s


def _g(y):
    """``-log(1 - y) - y`` on the principal branch, accurate for small ``y``."""
    if isinstance(y, complex):
        if abs(y) < 0.05:
            return _g_series(y)
        return -cmath.log(1 - y) - y
    if y == 1.0:
        raise ValueError("singular point: logarithm argument vanishes")
    if abs(y) < 0.05:
        return _g_series(y)
    if y < 1.0:
        return -math.log1p(-y) - y
    # log(1 - y) = log(y - 1) + i pi
    return complex(-math.log(y - 1.0) - y, -math.pi)


def _g_series(y):
    acc = 0.0
    term = y
    for k in range(2, 40):
        term = term * y
        acc = acc + term / k
    return acc


def script_d(X, r: float, params: PhysParams) -> complex:
    """``-X + X^2/2 + s (X - u log(1 - X/s))`` in cancellation-free form.

    The value is computed as ``X^2/2 + u s g(X/s)`` with ``g(y) = -log(1-y) - y``.
    """
    u, s = _us(r, params.gamma)
    if u == 0.0:
        return complex(X * X / 2)
    return complex(X * X / 2 + u * s * _g(X / s))


def dfield_closed(omega: float, r: float, params: PhysParams) -> complex:
    """Closed-form D (principal logarithm), without the small-x switch."""
    lp = params.lambda_p
    if lp == 0:
        raise ValueError("the closed form needs lambda_p > 0")
    x = omega * lp
    _check_x(x)
    u, s = _us(r, params.gamma)
    em = math.expm1(x)
    w = 1.0 + em / s
    if w == 0.0:
        raise ValueError("r = gamma exp(-omega lambda_p) is a singular point")
    if w > 0:
        log_w: complex = complex(math.log1p(em / s))
    else:
        log_w = complex(math.log(-w), math.pi)
    val = math.sinh(x) + math.exp(-x) * s * (-em - u * log_w)
    return complex(val) / (lp * lp)


def dfield(omega: float, r: float, params: PhysParams) -> complex:
    """Eigenvalue ``D(omega, r)`` of the time operator on ``exp(i omega t)``.

    Evaluated through ``lambda_p^2 D = exp(-x) script_d(1 - exp(x))``.  The
    closed form (``dfield_closed``) cancels badly both for small ``x`` and
    where D itself vanishes near ``r = 0``; this route does not.
    ``lambda_p = 0`` returns ``omega^2 / (2 (1 - gamma/r))``.
    """
    lp = params.lambda_p
    if lp == 0:
        u, s = _us(r, params.gamma)
        return complex(omega * omega / (2 * s))
    x = omega * lp
    _check_x(x)
    w = 1.0 + math.expm1(x) / _us(r, params.gamma)[1]
    if w == 0.0:
        raise ValueError("r = gamma exp(-omega lambda_p) is a singular point")
    return math.exp(-x) * script_d(-math.expm1(x), r, params) / (lp * lp)


def dfield_mp(omega, r, params: PhysParams, dps: int = 50) -> mpmath.mpc:
    """High-precision closed form of D with mpmath (principal logarithm)."""
    with mpmath.workdps(dps):
        lp = mpmath.mpf(params.lambda_p)
        om = mpmath.mpf(omega)
        rr = mpmath.mpf(r)
        gam = mpmath.mpf(params.gamma)
        x = om * lp
        if lp == 0:
            return mpmath.mpc(om**2 / (2 * (1 - gam / rr)))
        u = gam / rr
        s = 1 - u
        if s == 0:
            raise ValueError("r = gamma is a singular point")
        w = (mpmath.exp(x) - u) / s
        if w == 0:
            raise ValueError("r = gamma exp(-omega lambda_p) is a singular point")
        val = mpmath.sinh(x) + mpmath.exp(-x) * s * (1 - mpmath.exp(x) - u * mpmath.log(w))
        return +mpmath.mpc(val / lp**2)


def dfield_infinity(omega: float, params: PhysParams) -> float:
    """``lim_{r -> inf} D = 2 sinh^2(x/2) / lambda_p^2`` (``omega^2/2`` classically)."""
    lp = params.lambda_p
    if lp == 0:
        return omega * omega / 2
    x = omega * lp
    _check_x(x)
    return 2 * math.sinh(x / 2) ** 2 / (lp * lp)


def _series_term(m: int, zeta: float, omega: float, lam: complex) -> complex:
    """Eigenvalue of the time operator for ``beta = r^-m`` on ``exp(i omega t)``."""
    if m == 1:
        return zeta / lam * (1j * omega - (1 - 1 / zeta) / lam)
    if m == 2:
        return zeta / lam * ((zeta - 1) / lam - 1j * omega)
    num = zeta + (1 - m) * zeta ** (m - 1) - (2 - m) * zeta**m
    return num / (lam * lam * (2 - m) * (1 - m))


def dfield_series(omega: float, r: float, params: PhysParams, n_terms: int) -> complex:
    """Partial sum of D from the geometric expansion of the Schwarzschild beta.

    For ``r > gamma`` the expansion is in ``gamma/r`` (terms ``m = 0, 1, ...``),
    for ``r < gamma`` in ``r/gamma`` (terms ``m = 1, 2, ...``).  Each monomial
    ``r^-m`` contributes its exact closed-form eigenvalue.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    lp = params.lambda_p
    if lp <= 0:
        raise ValueError("dfield_series needs lambda_p > 0")
    gam = params.gamma
    x = omega * lp
    _check_x(x)
    zeta = math.exp(-x)
    lam = 1j * lp
    if gam == 0 or r > gam:
        u = gam / r
        rate = u * max(1.0, zeta)
        if rate >= 1:
            raise ValueError(f"outer series diverges here (ratio {rate:.3g} >= 1)")
        total = 0j
        for m in range(n_terms):
            total -= u**m * _series_term(m, zeta, omega, lam)
        return total
    if not 0 < r < gam:
        raise ValueError("r = gamma is outside both series disks")
    v = r / gam
    rate = v * max(1.0, 1 / zeta)
    if rate >= 1:
        raise ValueError(f"inner series diverges here (ratio {rate:.3g} >= 1)")
    total = 0j
    for m in range(1, n_terms + 1):
        total += v**m * _series_term(-m, zeta, omega, lam)
    return total


def interregnum_bounds(omega: float, params: PhysParams) -> tuple[float, float]:
    """Radii between which D is complex: ``gamma e^{-x}`` and ``gamma``, ordered."""
    gam = params.gamma
    x = omega * params.lambda_p
    _check_x(x)
    edge = gam * math.exp(-x)
    return (min(edge, gam), max(edge, gam))


REGIONS = ("exterior", "interregnum", "interior")


def region_bounds(region: str, omega: float, params: PhysParams) -> tuple[float, float]:
    """Open interval of radii occupied by ``region``."""
    lo, hi = interregnum_bounds(omega, params)
    if region == "exterior":
        return (hi, math.inf)
    if region == "interregnum":
        return (lo, hi)
    if region == "interior":
        return (0.0, lo)
    raise ValueError(f"unknown region {region!r}; expected one of {REGIONS}")


def ode_coeffs(omega: float, r: float, params: PhysParams) -> tuple[complex, complex, complex]:
    """Coefficients of ``a2 psi'' + a1 psi' + a0 psi = 0`` for the radial mode."""
    gam, c, l, lp = params.gamma, params.c, params.l, params.lambda_p
    u, s = _us(r, gam)
    a2 = s
    a1 = 2 / r - gam / (r * r)
    ang = l * (l + 1) / (r * r)
    if lp == 0:
        a0 = complex(omega * omega / (c * c * s) - ang)
    else:
        x = omega * lp
        _check_x(x)
        a0 = 2 / (c * c * lp * lp) * script_d(-math.expm1(x), r, params) - ang
    return complex(a2), complex(a1), a0


def horizon_residual(psi: complex, dpsi: complex, omega: float, params: PhysParams) -> complex:
    """Residual of the horizon relation in the frequency domain.

    ``(2i/c) d0~psi - (c lambda_p / gamma) psi' + (c lambda_p / gamma^2) l(l+1) psi``
    with ``d0~`` acting as ``(1 - e^{2x}) / (2 i lambda_p)``.
    """
    lp, gam, c, l = params.lambda_p, params.gamma, params.c, params.l
    if lp <= 0 or gam <= 0:
        raise ValueError("the horizon relation needs lambda_p > 0 and gamma > 0")
    x = omega * lp
    _check_x(x)
    d0 = -math.expm1(2 * x) / (2j * lp)
    return (2j / c) * d0 * psi - (c * lp / gam) * dpsi + (c * lp / gam**2) * l * (l + 1) * psi


def one_plus_z(omega: float, r: float, params: PhysParams) -> float:
    """Redshift factor ``sqrt(D(omega, r) / D(omega, inf))`` for emission at ``r``."""
    if omega == 0:
        raise ValueError("omega must be nonzero")
    if params.lambda_p > 0:
        lo, hi = interregnum_bounds(omega, params)
        if lo < r < hi:
            raise ValueError("D is complex inside the interregnum; no redshift there")
    ratio = dfield(omega, r, params).real / dfield_infinity(omega, params)
    if ratio < 0:
        raise ValueError("D(omega, r) and D(omega, inf) have opposite signs")
    return math.sqrt(ratio)


def redshift(omega: float, r: float, params: PhysParams) -> float:
    """Redshift ``z`` of a mode emitted at radius ``r`` and received at infinity."""
    return one_plus_z(omega, r, params) - 1.0


def one_plus_zmax(omega: float, params: PhysParams) -> float:
    """Horizon limit ``sqrt(sinh x / (cosh x - 1)) = sqrt(coth(x/2))``."""
    x = omega * params.lambda_p
    if not x > 0:
        raise ValueError("the maximum redshift needs omega > 0 and lambda_p > 0")
    _check_x(x)
    return math.sqrt(1 / math.tanh(x / 2))


def zmax(omega: float, params: PhysParams) -> float:
    """Largest redshift reachable from just outside the horizon."""
    return one_plus_zmax(omega, params) - 1.0


@dataclass(frozen=True)
class HarmonicShift:
    """Wavelength mismatch between a mode and its ``n``-th harmonic after redshift.

    ``deficit_exact`` is ``c/omega' - n c/omega''`` from the exact redshifts,
    ``deficit_first_order`` its leading term in ``omega lambda_p`` and
    ``deficit_weak_field`` the same term with ``s^{1/2}`` in place of
    ``s^{3/2}``, which agrees with it to leading order in ``gamma/r``.
    """

    deficit_exact: float
    deficit_first_order: float
    deficit_weak_field: float
    accumulation_length: float
    accumulation_length_exact: float


def harmonic_shift(omega: float, n: int, r: float, params: PhysParams) -> HarmonicShift:
    """Deficit per base cycle and the distance over which it adds up to a wavelength."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    gam, c, lp = params.gamma, params.c, params.lambda_p
    if not r > gam:
        raise ValueError("r must lie outside the horizon")
    if omega <= 0 or lp <= 0:
        raise ValueError("harmonic_shift needs omega > 0 and lambda_p > 0")
    x = omega * lp
    dps = 30 + int(3 * max(0.0, -math.log10(x * max(1, n))))
    with mpmath.workdps(dps):

        def opz(om):
            d_r = dfield_mp(om, r, params, dps=dps).real
            d_inf = 2 * mpmath.sinh(mpmath.mpf(om) * lp / 2) ** 2 / mpmath.mpf(lp) ** 2
            return mpmath.sqrt(d_r / d_inf)

        exact = mpmath.mpf(c) / omega * (opz(omega) - opz(n * omega))
        exact_f = float(exact)
    s = 1 - gam / r
    base = (n - 1) / 3 * c * lp * gam / r
    first = base / s**1.5
    weak = base / math.sqrt(s)
    wavelength = c / omega
    length = wavelength**2 * 3 * r / (n * gam * c * lp)
    length_exact = wavelength**2 / exact_f if exact_f else math.inf
    return HarmonicShift(exact_f, first, weak, length, length_exact)


__all__ = [
    "REGIONS",
    "HarmonicShift",
    "PhysParams",
    "dfield",
    "dfield_closed",
    "dfield_infinity",
    "dfield_mp",
    "dfield_series",
    "harmonic_shift",
    "horizon_residual",
    "interregnum_bounds",
    "ode_coeffs",
    "one_plus_z",
    "one_plus_zmax",
    "redshift",
    "region_bounds",
    "script_d",
    "zmax",
]
