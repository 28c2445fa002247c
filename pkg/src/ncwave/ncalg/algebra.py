"""Exact normal-ordered elements of the flat bicrossproduct coordinate algebra.

Elements are finite sums of terms ``c * x1^a1 x2^a2 x3^a3 r^k t^n`` where the
coefficient ``c`` lives in ``Q[lam, gam]``.  Spatial generators commute with
each other; time obeys ``[x_i, t] = lam x_i`` and ``[r, t] = lam r``, so every
product is brought to normal order with all powers of ``t`` on the right.

Internally a term is keyed by the flat tuple ``(a1, a2, a3, k, n, p, q)`` where
``p`` and ``q`` are the exponents of ``lam`` and ``gam``.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Iterator, NamedTuple, Union

Number = Union[int, Fraction]


class Monomial(NamedTuple):
    """Exponents of ``x1^a1 x2^a2 x3^a3 r^k t^n`` (``a3`` is 0 or 1 once canonical)."""

    a1: int = 0
    a2: int = 0
    a3: int = 0
    k: int = 0
    n: int = 0

    @property
    def degree(self) -> int:
        """Homogeneity degree in the spatial generators (``t`` excluded)."""
        return self.a1 + self.a2 + self.a3 + self.k


class Coefficient:
    """Exact polynomial in the formal parameters ``lam`` and ``gam`` over Q."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for key, val in dict(terms).items():
                val = Fraction(val)
                if val:
                    clean[(int(key[0]), int(key[1]))] = val
        self._terms = clean

    @classmethod
    def const(cls, value: Number) -> "Coefficient":
        return cls({(0, 0): value})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Coefficient.const(other)
        if not isinstance(other, Coefficient):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        other = _as_coefficient(other)
        out = dict(self._terms)
        for key, val in other._terms.items():
            out[key] = out.get(key, 0) + val
        return Coefficient(out)

    __radd__ = __add__

    def __neg__(self):
        return Coefficient({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-_as_coefficient(other))

    def __rsub__(self, other):
        return _as_coefficient(other) - self

    def __mul__(self, other):
        other = _as_coefficient(other)
        out: dict = {}
        for (p1, q1), v1 in self._terms.items():
            for (p2, q2), v2 in other._terms.items():
                key = (p1 + p2, q1 + q2)
                out[key] = out.get(key, 0) + v1 * v2
        return Coefficient(out)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Coefficient({_format_coeff_terms(self._terms)})"


def _as_coefficient(value) -> Coefficient:
    if isinstance(value, Coefficient):
        return value
    if isinstance(value, (int, Fraction)):
        return Coefficient.const(value)
    raise TypeError(f"cannot use {type(value).__name__} as a coefficient")


def _add_into(acc: dict, key: tuple, value) -> None:
    new = acc.get(key, 0) + value
    if new:
        acc[key] = new
    else:
        acc.pop(key, None)


def _x3_reduce(a1: int, a2: int, a3: int, k: int) -> list[tuple[tuple[int, int, int, int], int]]:
    """Eliminate even powers of x3 with x3^2 = r^2 - x1^2 - x2^2."""
    q, e = divmod(a3, 2)
    if q == 0:
        return [((a1, a2, a3, k), 1)]
    out = []
    fq = factorial(q)
    for i in range(q + 1):
        for j in range(q + 1 - i):
            l = q - i - j
            mult = fq // (factorial(i) * factorial(j) * factorial(l))
            if (j + l) % 2:
                mult = -mult
            out.append(((a1 + 2 * j, a2 + 2 * l, e, k + 2 * i), mult))
    return out


class AlgebraElement:
    """Immutable normal-ordered element of ``C(R^3 minus 0) x| R`` over ``Q[lam, gam]``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: dict | None = None, *, _trusted: bool = False):
        if _trusted:
            self._terms = terms if terms is not None else {}
        else:
            acc: dict = {}
            for key, val in (terms or {}).items():
                a1, a2, a3, k, n, p, qq = (int(v) for v in key)
                for (b1, b2, b3, kk), mult in _x3_reduce(a1, a2, a3, k):
                    _add_into(acc, (b1, b2, b3, kk, n, p, qq), Fraction(val) * mult)
            self._terms = acc
        self._hash = None

    # -- construction helpers -------------------------------------------------
    @classmethod
    def const(cls, value: Number | Coefficient) -> "AlgebraElement":
        coeff = _as_coefficient(value)
        return cls({(0, 0, 0, 0, 0, p, q): v for (p, q), v in coeff._terms.items()}, _trusted=True)

    @classmethod
    def monomial(cls, mono: Iterable[int], coeff: Number | Coefficient = 1) -> "AlgebraElement":
        return canonicalize([(tuple(mono), coeff)])

    # -- inspection ----------------------------------------------------------
    @property
    def raw_terms(self) -> dict:
        """Flat ``(a1, a2, a3, k, n, p, q) -> Fraction`` mapping (a copy)."""
        return dict(self._terms)

    def terms(self) -> Iterator[tuple[Monomial, Coefficient]]:
        grouped: dict = {}
        for key, val in self._terms.items():
            grouped.setdefault(key[:5], {})[key[5:]] = val
        for mono in sorted(grouped):
            yield Monomial(*mono), Coefficient(grouped[mono])

    def coefficient(self, mono: Iterable[int]) -> Coefficient:
        mono = tuple(mono)
        return Coefficient({key[5:]: v for key, v in self._terms.items() if key[:5] == mono})

    def is_zero(self) -> bool:
        return not self._terms

    def max_t_degree(self) -> int:
        return max((key[4] for key in self._terms), default=0)

    def is_t_free(self) -> bool:
        return all(key[4] == 0 for key in self._terms)

    def is_radial(self) -> bool:
        """True when the element is a t-free Laurent polynomial in ``r`` alone."""
        return all(key[0] == key[1] == key[2] == key[4] == 0 for key in self._terms)

    # -- equality / hashing --------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Coefficient)):
            other = AlgebraElement.const(other)
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for key, val in other._terms.items():
            _add_into(acc, key, val)
        return AlgebraElement(acc, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement({k: -v for k, v in self._terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Coefficient)):
            return scale(self, other)
        if isinstance(other, AlgebraElement):
            return mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Coefficient)):
            return scale(self, other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers of algebra elements are not defined")
        out = ONE
        for _ in range(n):
            out = mul(out, self)
        return out

    def __repr__(self):
        from .parser import format_expr

        return f"AlgebraElement({format_expr(self)!r})"

    def __str__(self):
        from .parser import format_expr

        return format_expr(self)


def _coerce(value):
    if isinstance(value, AlgebraElement):
        return value
    if isinstance(value, (int, Fraction, Coefficient)):
        return AlgebraElement.const(value)
    return NotImplemented


def canonicalize(raw: Iterable[tuple[Iterable[int], Number | Coefficient]]) -> AlgebraElement:
    """Build a canonical element from ``(monomial, coefficient)`` pairs.

    Monomials may carry any power of ``x3``; even powers are rewritten with
    ``x3^2 = r^2 - x1^2 - x2^2`` and zero coefficients are dropped.
    """
    acc: dict = {}
    for mono, coeff in raw:
        a1, a2, a3, k, n = (int(v) for v in mono)
        if a1 < 0 or a2 < 0 or a3 < 0 or n < 0:
            raise ValueError("only r may carry a negative exponent")
        coeff = _as_coefficient(coeff)
        for (b1, b2, b3, kk), mult in _x3_reduce(a1, a2, a3, k):
            for (p, q), v in coeff._terms.items():
                _add_into(acc, (b1, b2, b3, kk, n, p, q), v * mult)
    return AlgebraElement(acc, _trusted=True)


def scale(a: AlgebraElement, c: Number | Coefficient) -> AlgebraElement:
    c = _as_coefficient(c)
    acc: dict = {}
    for key, v in a._terms.items():
        for (p, q), w in c._terms.items():
            _add_into(acc, key[:5] + (key[5] + p, key[6] + q), v * w)
    return AlgebraElement(acc, _trusted=True)


def mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Normal-ordered product.

    Moving ``t^n`` right past a spatial monomial of degree ``d`` gives
    ``t^n X = X (t - d lam)^n``.
    """
    acc: dict = {}
    for ka, va in a._terms.items():
        a1, a2, a3, k, n1, p1, q1 = ka
        for kb, vb in b._terms.items():
            b1, b2, b3, kk, n2, p2, q2 = kb
            d2 = b1 + b2 + b3 + kk
            v = va * vb
            spatial = _x3_reduce(a1 + b1, a2 + b2, a3 + b3, k + kk)
            if n1 == 0 or d2 == 0:
                shifts = [(n1, 0, 1)]
            else:
                # (t - d2 lam)^n1 = sum_j C(n1, j) t^j (-d2)^(n1-j) lam^(n1-j)
                shifts = [(j, n1 - j, comb(n1, j) * (-d2) ** (n1 - j)) for j in range(n1 + 1)]
            for (c1, c2, c3, ck), mult in spatial:
                for j, lp, m2 in shifts:
                    _add_into(acc, (c1, c2, c3, ck, j + n2, p1 + p2 + lp, q1 + q2), v * mult * m2)
    return AlgebraElement(acc, _trusted=True)


def tau(f: AlgebraElement) -> AlgebraElement:
    """Degree operator ``r d/dr``: multiply each term by its spatial degree."""
    acc: dict = {}
    for key, v in f._terms.items():
        d = key[0] + key[1] + key[2] + key[3]
        if d:
            acc[key] = v * d
    return AlgebraElement(acc, _trusted=True)


def times_t(f: AlgebraElement, power: int = 1) -> AlgebraElement:
    """Right multiplication by ``t^power``; already normal ordered."""
    return AlgebraElement(
        {k[:4] + (k[4] + power,) + k[5:]: v for k, v in f._terms.items()}, _trusted=True
    )


def shift_t(f: AlgebraElement, a: Number) -> AlgebraElement:
    """Return ``f(t + a lam)`` for normal-ordered ``f``."""
    a = Fraction(a)
    if a == 0:
        return f
    acc: dict = {}
    for key, v in f._terms.items():
        n = key[4]
        for j in range(n + 1):
            c = comb(n, j) * a ** (n - j)
            _add_into(acc, key[:4] + (j, key[5] + n - j, key[6]), v * c)
    return AlgebraElement(acc, _trusted=True)


def divide_by_lambda(f: AlgebraElement, power: int = 1) -> AlgebraElement:
    """Exact division by ``lam^power``; raises ArithmeticError on a remainder."""
    acc = {}
    for key, v in f._terms.items():
        if key[5] < power:
            raise ArithmeticError(f"element is not divisible by lam^{power}")
        acc[key[:5] + (key[5] - power, key[6])] = v
    return AlgebraElement(acc, _trusted=True)


def lambda_order(f: AlgebraElement, p: int) -> AlgebraElement:
    """The coefficient of ``lam^p`` (so ``p=0`` is the classical part)."""
    return AlgebraElement(
        {k[:5] + (0, k[6]): v for k, v in f._terms.items() if k[5] == p}, _trusted=True
    )


def split_t(f: AlgebraElement) -> dict[int, AlgebraElement]:
    """Group a normal-ordered element as ``sum_n f_n t^n`` with t-free ``f_n``."""
    out: dict = {}
    for key, v in f._terms.items():
        out.setdefault(key[4], {})[key[:4] + (0,) + key[5:]] = v
    return {n: AlgebraElement(d, _trusted=True) for n, d in sorted(out.items())}


def partial_x(f: AlgebraElement, i: int) -> AlgebraElement:
    """Commutative derivative d/dx_i (i = 1, 2, 3) of a t-free element."""
    if not f.is_t_free():
        raise ValueError("partial_x expects a t-free element")
    idx = i - 1
    raw = []
    for key, v in f._terms.items():
        expo = list(key[:3])
        k = key[3]
        if expo[idx]:
            e2 = list(expo)
            e2[idx] -= 1
            raw.append(((e2[0], e2[1], e2[2], k, 0, key[5], key[6]), v * expo[idx]))
        if k:
            e3 = list(expo)
            e3[idx] += 1
            raw.append(((e3[0], e3[1], e3[2], k - 2, 0, key[5], key[6]), v * k))
    acc: dict = {}
    for (a1, a2, a3, kk, n, p, q), v in raw:
        for (b1, b2, b3, k2), mult in _x3_reduce(a1, a2, a3, kk):
            _add_into(acc, (b1, b2, b3, k2, n, p, q), v * mult)
    return AlgebraElement(acc, _trusted=True)


def flat_laplacian(f: AlgebraElement) -> AlgebraElement:
    """Euclidean Laplacian, applied to each t-coefficient of a normal-ordered element."""
    out = ZERO
    for n, fn in split_t(f).items():
        lap = ZERO
        for i in (1, 2, 3):
            lap = lap + partial_x(partial_x(fn, i), i)
        out = out + times_t(lap, n)
    return out


def radial_derivative(f: AlgebraElement, order: int = 1) -> AlgebraElement:
    """``d/dr`` at fixed angles, i.e. ``r^-1`` times the degree operator."""
    out = f
    inv_r = AlgebraElement({(0, 0, 0, -1, 0, 0, 0): Fraction(1)}, _trusted=True)
    for _ in range(order):
        out = mul(inv_r, tau(out))
    return out


def x(i: int) -> AlgebraElement:
    mono = [0, 0, 0, 0, 0]
    mono[i - 1] = 1
    return canonicalize([(mono, 1)])


def r(k: int = 1) -> AlgebraElement:
    return canonicalize([((0, 0, 0, k, 0), 1)])


def t(n: int = 1) -> AlgebraElement:
    return canonicalize([((0, 0, 0, 0, n), 1)])


ZERO = AlgebraElement({}, _trusted=True)
ONE = AlgebraElement({(0, 0, 0, 0, 0, 0, 0): Fraction(1)}, _trusted=True)
LAM = AlgebraElement({(0, 0, 0, 0, 0, 1, 0): Fraction(1)}, _trusted=True)
GAM = AlgebraElement({(0, 0, 0, 0, 0, 0, 1): Fraction(1)}, _trusted=True)


def _format_coeff_terms(terms: dict) -> str:
    if not terms:
        return "0"
    parts = []
    for (p, q), v in sorted(terms.items()):
        factors = []
        if v != 1 or (p == 0 and q == 0):
            factors.append(str(v))
        if p:
            factors.append("lam" if p == 1 else f"lam^{p}")
        if q:
            factors.append("gam" if q == 1 else f"gam^{q}")
        parts.append("*".join(factors))
    return " + ".join(parts)
