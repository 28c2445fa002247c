"""Exact classical geometry of static spherically symmetric metrics.

The metric is ``-F dt^2 + H dr^2 + r^2 dOmega^2`` with ``F = f^2`` and ``H = h^2``,
so that every curvature coefficient is a rational function of ``r`` and no
square roots appear.  Rational functions live in ``Q(r, gam, K)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import sympy
from sympy import QQ
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.fields import field

from .ncalg.algebra import ONE, ZERO, AlgebraElement, mul, r as r_gen, x as x_gen
from .ncalg.forms import FormSum

_FIELD, _R, _GAM, _K = field("r,gam,K", QQ)
_SYMBOLS = {name: sympy.Symbol(name) for name in ("r", "gam", "K")}
_TRANSFORMS = standard_transformations + (convert_xor,)


class RationalFunction:
    """Reduced element of ``Q(r, gam, K)``; ``d/dr`` is the formal derivative."""

    __slots__ = ("_v",)

    def __init__(self, value=0):
        if isinstance(value, RationalFunction):
            self._v = value._v
        elif isinstance(value, str):
            self._v = _parse(value)
        else:
            self._v = _FIELD(value)

    @classmethod
    def _wrap(cls, v) -> "RationalFunction":
        out = cls.__new__(cls)
        out._v = v
        return out

    @property
    def numerator(self) -> sympy.Expr:
        return self._v.numer.as_expr()

    @property
    def denominator(self) -> sympy.Expr:
        return self._v.denom.as_expr()

    def as_expr(self) -> sympy.Expr:
        return self._v.as_expr()

    def is_zero(self) -> bool:
        return not self._v

    def diff(self) -> "RationalFunction":
        return RationalFunction._wrap(self._v.diff(_R))

    def subs(self, **values) -> float | complex:
        """Numerical evaluation, e.g. ``F.subs(r=2.0, gam=1.0)``."""
        return complex(self.as_expr().evalf(subs={_SYMBOLS[k]: v for k, v in values.items()})).real

    def _other(self, other):
        if isinstance(other, RationalFunction):
            return other._v
        return _FIELD(other)

    def __add__(self, other):
        return RationalFunction._wrap(self._v + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return RationalFunction._wrap(self._v - self._other(other))

    def __rsub__(self, other):
        return RationalFunction._wrap(self._other(other) - self._v)

    def __neg__(self):
        return RationalFunction._wrap(-self._v)

    def __mul__(self, other):
        return RationalFunction._wrap(self._v * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        den = self._other(other)
        if not den:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction._wrap(self._v / den)

    def __rtruediv__(self, other):
        if not self._v:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction._wrap(self._other(other) / self._v)

    def __pow__(self, n: int):
        if n < 0 and not self._v:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction._wrap(self._v**n)

    def __eq__(self, other):
        try:
            return self._v == self._other(other)
        except (TypeError, sympy.polys.polyerrors.CoercionFailed):
            return NotImplemented

    def __hash__(self):
        return hash(self._v)

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        return str(self.as_expr()).replace("**", "^")


def _parse(text: str):
    try:
        expr = parse_expr(text, local_dict=dict(_SYMBOLS), transformations=_TRANSFORMS, evaluate=True)
    except (SyntaxError, TypeError, sympy.SympifyError) as exc:
        raise ValueError(f"cannot parse rational function {text!r}: {exc}") from None
    extra = {str(s) for s in expr.free_symbols} - set(_SYMBOLS)
    if extra:
        raise ValueError(f"unknown symbols {sorted(extra)}; allowed are r, gam, K")
    try:
        return _FIELD.from_expr(expr)
    except Exception as exc:  # sympy raises several coercion types here
        raise ValueError(f"{text!r} is not a rational function of r, gam, K") from exc


RationalLike = Union[RationalFunction, str, int]


def ratfn(value: RationalLike) -> RationalFunction:
    return value if isinstance(value, RationalFunction) else RationalFunction(value)


R = RationalFunction._wrap(_R)
GAM = RationalFunction._wrap(_GAM)
K = RationalFunction._wrap(_K)


@dataclass(frozen=True)
class RicciComponents:
    """Coefficients of the angular, ``d̄r d̄r`` and ``d̄t d̄t`` blocks of Ricci."""

    c_ang: RationalFunction
    c_rr: RationalFunction
    c_tt: RationalFunction

    def as_tuple(self) -> tuple:
        return (self.c_ang, self.c_rr, self.c_tt)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.as_tuple())


def _curvature_x(F: RationalFunction, H: RationalFunction) -> RationalFunction:
    # (f'h' - f''h)/(fh) rewritten with F = f^2, H = h^2
    F1, F2, H1 = F.diff(), F.diff().diff(), H.diff()
    return F1 * H1 / (4 * F * H) - F2 / (2 * F) + F1 * F1 / (4 * F * F)


def ricci_static4(F: RationalLike, H: RationalLike) -> RicciComponents:
    """Ricci components of the static metric with ``F = f^2``, ``H = h^2``."""
    F, H = ratfn(F), ratfn(H)
    if F.is_zero() or H.is_zero():
        raise ZeroDivisionError("F and H must be nonzero")
    F1, H1 = F.diff(), H.diff()
    X = _curvature_x(F, H)
    c_ang = (F1 / (2 * F * H) - H1 / (2 * H * H) - (1 - 1 / H) / R) / (2 * R)
    c_rr = -X / 2 - H1 / (2 * H * R)
    c_tt = F / (2 * H) * X - F1 / (2 * H * R)
    return RicciComponents(c_ang, c_rr, c_tt)


def ricci_3(H: RationalLike) -> tuple[RationalFunction, RationalFunction]:
    """Angular and radial Ricci coefficients of the spatial metric ``H dr^2 + r^2 dOmega^2``."""
    comps = ricci_static4(1, H)
    return comps.c_ang, comps.c_rr


def einstein_residual(H: RationalLike) -> RationalFunction:
    """``r H' - 2 H (H - 1)``, which vanishes exactly for Einstein spatial slices."""
    H = ratfn(H)
    if H.is_zero():
        raise ZeroDivisionError("H must be nonzero")
    return R * H.diff() - 2 * H * (H - 1)


def classical_wave_coeffs(F: RationalLike, H: RationalLike, l: int = 0):
    """Coefficients ``(a_tt, a_r, a_rr, a_ang)`` of the Laplace-Beltrami operator.

    ``box = a_tt d_t^2 + a_r d_r + a_rr d_r^2 + a_ang`` on the ``l`` harmonic.
    """
    F, H = ratfn(F), ratfn(H)
    if F.is_zero() or H.is_zero():
        raise ZeroDivisionError("F and H must be nonzero")
    a_tt = -1 / F
    a_r = (2 / R - H.diff() / (2 * H) + F.diff() / (2 * F)) / H
    a_rr = 1 / H
    a_ang = RationalFunction(-l * (l + 1)) / (R * R)
    return a_tt, a_r, a_rr, a_ang


def projector_identities() -> dict:
    """Check the tangent projector ``e_ij = delta_ij - x_i x_j / r^2`` exactly.

    Returns a dict of named booleans plus the computed trace.
    """
    xs = [x_gen(i) for i in (1, 2, 3)]
    inv_r2 = r_gen(-2)
    e = [[(ONE if i == j else ZERO) - mul(mul(xs[i], xs[j]), inv_r2) for j in range(3)] for i in range(3)]
    e2 = [[sum((mul(e[i][k], e[k][j]) for k in range(3)), ZERO) for j in range(3)] for i in range(3)]
    idempotent = all(e2[i][j] == e[i][j] for i in range(3) for j in range(3))
    annihilates = all(sum((mul(xs[i], e[i][j]) for i in range(3)), ZERO).is_zero() for j in range(3))
    trace = e[0][0] + e[1][1] + e[2][2]
    # omega_i = e_ik d̄x_k, then x_i omega_i
    omegas = [FormSum([e[i][0], e[i][1], e[i][2], ZERO, ZERO]) for i in range(3)]
    contracted = FormSum()
    for i in range(3):
        contracted = contracted + mul(xs[i], ONE) * omegas[i]
    return {
        "idempotent": idempotent,
        "x_annihilates": annihilates,
        "trace": trace,
        "trace_is_2": trace == AlgebraElement.const(2),
        "x_omega_zero": contracted.is_zero(),
    }


__all__ = [
    "GAM",
    "K",
    "R",
    "RationalFunction",
    "RicciComponents",
    "classical_wave_coeffs",
    "einstein_residual",
    "projector_identities",
    "ratfn",
    "ricci_3",
    "ricci_static4",
]
