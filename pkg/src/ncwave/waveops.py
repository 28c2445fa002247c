"""Time differences, exterior derivative and induced wave operators.

All operators act on normal-ordered elements ``psi = sum_n f_n t^n`` and are
left-linear over the t-free coefficients ``f_n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .ncalg.algebra import (
    GAM,
    LAM,
    ONE,
    ZERO,
    AlgebraElement,
    divide_by_lambda,
    flat_laplacian,
    mul,
    r,
    radial_derivative,
    scale,
    shift_t,
    split_t,
    t,
    tau,
    times_t,
)
from .ncalg.forms import DT, TH, FormSum, ModelConfig, classical_d_and_laplacian, commutator, left_mul, right_mul

GEOMETRIES = ("flat", "flat+drift", "schwarzschild-laurent")


def partial0(psi: AlgebraElement) -> AlgebraElement:
    """Backward difference ``(psi(t) - psi(t - lam)) / lam``."""
    return divide_by_lambda(psi - shift_t(psi, -1))


def partial_t(psi: AlgebraElement) -> AlgebraElement:
    """Formal derivative in ``t`` of a normal-ordered element."""
    out = ZERO
    for n, fn in split_t(psi).items():
        if n:
            out = out + times_t(scale(fn, n), n - 1)
    return out


@lru_cache(maxsize=1024)
def _delta0_t_power(n: int, beta: AlgebraElement) -> AlgebraElement:
    # sum_i (d0 t^(n-1-i)) beta (t + lam)^i
    out = ZERO
    shifted = t(1) + LAM
    power = ONE
    for i in range(n):
        d0 = partial0(t(n - 1 - i))
        if not d0.is_zero():
            out = out + mul(mul(d0, beta), power)
        power = mul(power, shifted)
    return out


def delta0(psi: AlgebraElement, model: ModelConfig) -> AlgebraElement:
    """Second time operator, extended left-linearly over t-free coefficients."""
    out = ZERO
    for n, fn in split_t(psi).items():
        if n >= 2:
            out = out + mul(fn, _delta0_t_power(n, model.beta))
    return out


def delta0_closed(psi: AlgebraElement, m: int) -> AlgebraElement:
    """Closed form of ``delta0`` for ``beta = r^-m``.

    The three cases are ``m = 1``, ``m = 2`` and generic ``m``; every division by
    ``lam`` is exact.
    """
    m = int(m)
    rm = r(-m)
    if m == 1:
        g1 = shift_t(psi, 1)
        body = divide_by_lambda(partial_t(g1) - partial0(g1))
    elif m == 2:
        body = divide_by_lambda(partial0(shift_t(psi, 2)) - partial_t(shift_t(psi, 1)))
    else:
        comb = shift_t(psi, 1) + scale(shift_t(psi, -(1 - m)), 1 - m) - scale(shift_t(psi, m), 2 - m)
        body = scale(divide_by_lambda(comb, 2), Fraction(1, (2 - m) * (1 - m)))
    return mul(rm, body)


def _d_tfree(f: AlgebraElement) -> FormSum:
    grad, lap = classical_d_and_laplacian(f)
    half_lam = scale(LAM, Fraction(1, 2))
    return grad + FormSum.basis(TH, mul(half_lam, lap))


@lru_cache(maxsize=1024)
def _d_t_power(n: int, beta: AlgebraElement) -> FormSum:
    model = ModelConfig(beta=beta)
    if n == 0:
        return FormSum()
    # d(t^n) = dt t^(n-1) + t d(t^(n-1))
    head = right_mul(FormSum.basis(DT), t(n - 1), model)
    return head + left_mul(t(1), _d_t_power(n - 1, beta))


def exterior_d(psi: AlgebraElement, model: ModelConfig) -> FormSum:
    """Exterior derivative built from generators by the Leibniz rule."""
    out = FormSum()
    for n, fn in split_t(psi).items():
        out = out + right_mul(_d_tfree(fn), t(n), model)
        if n:
            out = out + left_mul(fn, _d_t_power(n, model.beta))
    return out


def exterior_d_formula(psi: AlgebraElement, model: ModelConfig) -> FormSum:
    """Exterior derivative assembled directly from ``d̄``, ``d0``, ``Lap`` and ``delta0``."""
    coeffs = [ZERO] * 5
    lap = ZERO
    for n, fn in split_t(psi).items():
        grad, lap_n = classical_d_and_laplacian(fn)
        for i in range(3):
            coeffs[i] = coeffs[i] + times_t(grad.coeffs[i], n)
        lap = lap + times_t(lap_n, n)
    coeffs[DT] = partial0(psi)
    theta = scale(mul(LAM, shift_t(lap, 1)), Fraction(1, 2)) + mul(LAM, delta0(psi, model))
    coeffs[TH] = theta
    return FormSum(coeffs)


@dataclass(frozen=True)
class WaveDecomposition:
    """Split ``d psi = d̄psi + (d0 psi) dt + (lam/2) box(psi) th``."""

    spatial: FormSum
    dt_coeff: AlgebraElement
    theta_coeff: AlgebraElement

    def __post_init__(self):
        try:
            divide_by_lambda(self.theta_coeff)
        except ArithmeticError:
            raise ArithmeticError("th-coefficient of d(psi) is not divisible by lam") from None

    @property
    def box(self) -> AlgebraElement:
        return scale(divide_by_lambda(self.theta_coeff), 2)


def wave_extract(psi: AlgebraElement, model: ModelConfig) -> WaveDecomposition:
    """Read the induced wave operator off the ``th`` component of ``d psi``."""
    d = exterior_d(psi, model)
    return WaveDecomposition(spatial=d.spatial, dt_coeff=d[DT], theta_coeff=d[TH])


def angular_laplacian(f: AlgebraElement) -> AlgebraElement:
    """``e_i e_i f = Lap f - d_r^2 f - (2/r) d_r f`` on each t-coefficient."""
    out = ZERO
    two_inv_r = scale(r(-1), 2)
    for n, fn in split_t(f).items():
        term = flat_laplacian(fn) - radial_derivative(fn, 2) - mul(two_inv_r, radial_derivative(fn, 1))
        out = out + times_t(term, n)
    return out


def _radial_on_t(f: AlgebraElement, order: int) -> AlgebraElement:
    out = ZERO
    for n, fn in split_t(f).items():
        out = out + times_t(radial_derivative(fn, order), n)
    return out


def spatial_operator(psi: AlgebraElement, model: ModelConfig, geometry: str) -> AlgebraElement:
    """Spatial part ``L`` of an assembled wave operator, before the ``t -> t + lam`` shift."""
    if geometry == "flat":
        return flat_laplacian(psi)
    if geometry == "flat+drift":
        if model.drift is None:
            raise ValueError("flat+drift geometry needs model.drift")
        return flat_laplacian(psi) - mul(model.drift, _radial_on_t(psi, 1))
    if geometry == "schwarzschild-laurent":
        gam_over_r = mul(GAM, r(-1))
        c1 = scale(r(-1), 2) - mul(GAM, r(-2))
        c2 = ONE - gam_over_r
        return mul(c1, _radial_on_t(psi, 1)) + mul(c2, _radial_on_t(psi, 2)) + angular_laplacian(psi)
    raise ValueError(f"unknown geometry {geometry!r}; expected one of {GEOMETRIES}")


def wave_assembled(psi: AlgebraElement, model: ModelConfig, geometry: str = "flat") -> AlgebraElement:
    """``box psi = 2 delta0 psi + (L psi)(t + lam)``."""
    return scale(delta0(psi, model), 2) + shift_t(spatial_operator(psi, model, geometry), 1)


def schwarzschild_beta_series(order: int) -> AlgebraElement:
    """Truncation of ``-1/(1 - gam/r) = -sum_k gam^k r^-k`` through ``k = order``."""
    out = ZERO
    term = ONE
    step = mul(GAM, r(-1))
    for _ in range(order + 1):
        out = out - term
        term = mul(term, step)
    return out


@dataclass(frozen=True)
class InnerElement:
    """``theta = dt - (mu + nu) th`` for ``beta = r^-m``."""

    m: int
    mu: AlgebraElement
    nu: AlgebraElement
    theta: FormSum

    @property
    def model(self) -> ModelConfig:
        return ModelConfig(beta=r(-self.m))

    def defining_equations_hold(self) -> bool:
        beta = self.model.beta
        return tau(self.mu) == beta - scale(self.mu, 2) and tau(self.nu) == self.mu - self.nu


def inner_theta(m: int) -> InnerElement:
    """Inner element for ``beta = r^-m``; ``m = 1, 2`` need ``log r`` and are rejected."""
    m = int(m)
    if m in (1, 2):
        raise ValueError(f"m={m}: mu and nu involve log r, which is outside the Laurent ring")
    mu = scale(r(-m), Fraction(1, 2 - m))
    nu = scale(r(-m), Fraction(1, (2 - m) * (1 - m)))
    theta = FormSum.basis(DT) - FormSum.basis(TH, mu + nu)
    return InnerElement(m=m, mu=mu, nu=nu, theta=theta)


def inner_commutator(inner: InnerElement, f: AlgebraElement) -> FormSum:
    return commutator(inner.theta, f, inner.model)


def gauge_shift(h: AlgebraElement, model: ModelConfig) -> ModelConfig:
    """Model after ``dt -> dt + h th``: ``beta' = beta + tau(h) + 2h``."""
    if not h.is_radial():
        raise ValueError("h must be a t-free Laurent polynomial in r")
    return ModelConfig(beta=model.beta + tau(h) + scale(h, 2), alpha=model.alpha, drift=model.drift)


def gauge_identity_holds(h: AlgebraElement, model: ModelConfig) -> bool:
    """Check ``[dt - h th, t] = lam beta th - lam (dt - h th)`` inside the shifted calculus."""
    shifted = gauge_shift(h, model)
    old_dt = FormSum.basis(DT) - FormSum.basis(TH, h)
    lhs = commutator(old_dt, t(1), shifted)
    rhs = FormSum.basis(TH, mul(LAM, model.beta)) - left_mul(LAM, old_dt)
    return lhs == rhs


def dt_commutator(psi: AlgebraElement, model: ModelConfig) -> FormSum:
    """``[dt, psi]`` by direct normal ordering."""
    return commutator(FormSum.basis(DT), psi, model)


def dt_commutator_identity(n: int, model: ModelConfig) -> FormSum:
    """``-lam (d0 t^n) dt + lam (delta0 t^(n+1) - t delta0 t^n) th``."""
    dt_part = -mul(LAM, partial0(t(n)))
    th_part = mul(LAM, delta0(t(n + 1), model) - mul(t(1), delta0(t(n), model)))
    return FormSum.basis(DT, dt_part) + FormSum.basis(TH, th_part)


def dt_commutator_closed(psi: AlgebraElement, m: int) -> FormSum:
    """Closed form of ``[dt, g]`` for ``beta = r^-m`` with ``m != 2``."""
    m = int(m)
    if m == 2:
        raise ValueError("the closed form divides by m - 2")
    diff = divide_by_lambda(shift_t(psi, m - 1) - shift_t(psi, 1))
    th_part = mul(LAM, mul(r(-m), scale(diff, Fraction(1, m - 2))))
    return FormSum.basis(DT, -mul(LAM, partial0(psi))) + FormSum.basis(TH, th_part)


__all__ = [
    "GEOMETRIES",
    "InnerElement",
    "WaveDecomposition",
    "angular_laplacian",
    "delta0",
    "delta0_closed",
    "dt_commutator",
    "dt_commutator_closed",
    "dt_commutator_identity",
    "exterior_d",
    "exterior_d_formula",
    "gauge_identity_holds",
    "gauge_shift",
    "inner_commutator",
    "inner_theta",
    "partial0",
    "partial_t",
    "schwarzschild_beta_series",
    "spatial_operator",
    "wave_assembled",
    "wave_extract",
]
