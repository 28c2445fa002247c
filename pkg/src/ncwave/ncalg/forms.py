"""First-order forms over the bicrossproduct algebra.

A 1-form is stored with every algebra coefficient on the left of the basis
``(dx1, dx2, dx3, dt, th)``, where ``th`` is the extra direction ``theta'``.
Right multiplication by functions pushes them leftwards with the bimodule
relations of the flat calculus (spatial part taken with a pure flat Laplacian).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .algebra import (
    LAM,
    ONE,
    ZERO,
    AlgebraElement,
    Coefficient,
    flat_laplacian,
    mul,
    partial_x,
    scale,
    split_t,
    times_t,
)

BASIS = ("dx1", "dx2", "dx3", "dt", "th")
DX1, DX2, DX3, DT, TH = range(5)


@dataclass(frozen=True)
class ModelConfig:
    """Parameters of the calculus.

    Parameters
    ----------
    beta : AlgebraElement
        The t-free radial function in ``[dt, t] = lam beta th - lam dt``.
    alpha : Fraction
        Conformal Killing factor; only ``alpha = 1`` (radial scaling) is supported.
    drift : AlgebraElement, optional
        Radial Laurent drift ``q(r)`` used by assembled wave operators.
    """

    beta: AlgebraElement = ONE
    alpha: Fraction = Fraction(1)
    drift: AlgebraElement | None = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.alpha != 1:
            raise ValueError("only alpha = 1 is supported")
        if not isinstance(self.beta, AlgebraElement):
            object.__setattr__(self, "beta", AlgebraElement.const(self.beta))
        if not self.beta.is_radial():
            raise ValueError("beta must be a t-free Laurent polynomial in r")
        if self.drift is not None and not self.drift.is_radial():
            raise ValueError("drift must be a t-free Laurent polynomial in r")


class FormSum:
    """Immutable 1-form ``sum_b c_b * b`` with left coefficients."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Sequence[AlgebraElement] | None = None):
        if coeffs is None:
            coeffs = (ZERO,) * 5
        coeffs = tuple(coeffs)
        if len(coeffs) != 5:
            raise ValueError("a FormSum needs exactly five coefficients")
        self._coeffs = tuple(c if isinstance(c, AlgebraElement) else AlgebraElement.const(c) for c in coeffs)

    @classmethod
    def basis(cls, which: int | str, coeff: AlgebraElement = ONE) -> "FormSum":
        idx = _basis_index(which)
        out = [ZERO] * 5
        out[idx] = coeff
        return cls(out)

    @property
    def coeffs(self) -> tuple[AlgebraElement, ...]:
        return self._coeffs

    def __getitem__(self, which) -> AlgebraElement:
        return self._coeffs[_basis_index(which)]

    @property
    def spatial(self) -> "FormSum":
        return FormSum(self._coeffs[:3] + (ZERO, ZERO))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self._coeffs)

    def __eq__(self, other):
        if not isinstance(other, FormSum):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def __add__(self, other):
        if not isinstance(other, FormSum):
            return NotImplemented
        return FormSum(a + b for a, b in zip(self._coeffs, other._coeffs))

    def __neg__(self):
        return FormSum(-c for c in self._coeffs)

    def __sub__(self, other):
        if not isinstance(other, FormSum):
            return NotImplemented
        return self + (-other)

    def __rmul__(self, other):
        # left multiplication by a function or scalar needs no reordering
        if isinstance(other, (int, Fraction, Coefficient)):
            return FormSum(scale(c, other) for c in self._coeffs)
        if isinstance(other, AlgebraElement):
            return left_mul(other, self)
        return NotImplemented

    def __repr__(self):
        from .parser import format_expr

        return f"FormSum({format_expr(self)!r})"

    def __str__(self):
        from .parser import format_expr

        return format_expr(self)


def _basis_index(which) -> int:
    if isinstance(which, str):
        try:
            return BASIS.index(which)
        except ValueError:
            raise KeyError(f"unknown basis form {which!r}") from None
    if not 0 <= int(which) < 5:
        raise KeyError(f"basis index out of range: {which}")
    return int(which)


def left_mul(f: AlgebraElement, form: FormSum) -> FormSum:
    return FormSum(mul(f, c) for c in form.coeffs)


def classical_d_and_laplacian(f: AlgebraElement) -> tuple[FormSum, AlgebraElement]:
    """Commutative gradient ``d̄f = (d_i f) dx_i`` and flat Laplacian of t-free ``f``."""
    if not f.is_t_free():
        raise ValueError("classical_d_and_laplacian expects a t-free element")
    grads = [partial_x(f, i) for i in (1, 2, 3)]
    lap = ZERO
    for i, g in enumerate(grads, start=1):
        lap = lap + partial_x(g, i)
    return FormSum(grads + [ZERO, ZERO]), lap


def _push_tfree(which: int, f: AlgebraElement) -> list[AlgebraElement]:
    """Coefficients of ``b * f`` for a t-free ``f``."""
    out = [ZERO] * 5
    if which == TH:
        out[TH] = f
    elif which == DT:
        # dt f = f dt - lam (d̄f + (lam/2) Lap f th)
        grad, lap = classical_d_and_laplacian(f)
        for i in range(3):
            out[i] = -mul(LAM, grad.coeffs[i])
        out[DT] = f
        out[TH] = scale(lap, Coefficient({(2, 0): Fraction(-1, 2)}))
    else:
        out[which] = f
        out[TH] = mul(LAM, partial_x(f, which + 1))
    return out


@lru_cache(maxsize=4096)
def _push_t_power(which: int, n: int, beta: AlgebraElement | None) -> tuple[AlgebraElement, ...]:
    """Coefficients of ``b * t^n``."""
    if n == 0:
        out = [ZERO] * 5
        out[which] = ONE
        return tuple(out)
    prev = _push_t_power(which, n - 1, beta)
    out = [ZERO] * 5
    for j, c in enumerate(prev):
        if c.is_zero():
            continue
        ct = times_t(c)
        if j < 3:
            out[j] = out[j] + ct
        elif j == TH:
            out[TH] = out[TH] + ct + mul(LAM, c)
        else:
            if beta is None:
                raise ValueError("a ModelConfig is required to move dt past t")
            out[DT] = out[DT] + ct - mul(LAM, c)
            out[TH] = out[TH] + mul(c, mul(LAM, beta))
    return tuple(out)


def push(which: int | str, f: AlgebraElement, model: ModelConfig | None) -> FormSum:
    """Normal form of the product ``b * f`` of a basis 1-form with a function."""
    idx = _basis_index(which)
    beta = model.beta if model is not None else None
    out = [ZERO] * 5
    for n, fn in split_t(f).items():
        for j, c in enumerate(_push_tfree(idx, fn)):
            if c.is_zero():
                continue
            for k, g in enumerate(_push_t_power(j, n, beta)):
                if not g.is_zero():
                    out[k] = out[k] + mul(c, g)
    return FormSum(out)


def right_mul(form: FormSum, f: AlgebraElement, model: ModelConfig | None = None) -> FormSum:
    """``form * f`` brought back to left-coefficient normal form."""
    out = FormSum()
    for j, c in enumerate(form.coeffs):
        if not c.is_zero():
            out = out + left_mul(c, push(j, f, model))
    return out


Term = tuple[AlgebraElement, Union[int, str], AlgebraElement]


def form_normalize(terms: Iterable[Term], model: ModelConfig | None = None) -> FormSum:
    """Normalize ``sum left * basis * right`` to left-coefficient form."""
    out = FormSum()
    for left, which, right in terms:
        out = out + left_mul(left, push(which, right, model))
    return out


def commutator(form: FormSum, f: AlgebraElement, model: ModelConfig | None = None) -> FormSum:
    """``[form, f] = form*f - f*form``."""
    return right_mul(form, f, model) - left_mul(f, form)


def dr_form() -> FormSum:
    """``dr = r^-1 x_i dx_i + lam r^-1 th`` expressed in the free basis."""
    from .algebra import r, x

    inv = r(-1)
    return FormSum([mul(inv, x(1)), mul(inv, x(2)), mul(inv, x(3)), ZERO, mul(LAM, inv)])


__all__ = [
    "BASIS",
    "DT",
    "DX1",
    "DX2",
    "DX3",
    "TH",
    "FormSum",
    "ModelConfig",
    "classical_d_and_laplacian",
    "commutator",
    "dr_form",
    "flat_laplacian",
    "form_normalize",
    "left_mul",
    "push",
    "right_mul",
]
