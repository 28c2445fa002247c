"""Dormand-Prince 5(4) integrator for small complex first-order systems.

Written for the radial wave equation: the state is a short tuple of complex
numbers, so plain Python arithmetic beats array overhead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

State = tuple

# Butcher tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# difference between the 5th and embedded 4th order weights
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


@dataclass
class RKResult:
    """Samples of the solution at the requested points (possibly truncated)."""

    t: list
    y: list
    n_steps: int = 0
    n_rejected: int = 0
    status: str = "ok"
    message: str = ""
    extra: dict = field(default_factory=dict)


def _combo(y, h, ks, weights):
    out = []
    for i, yi in enumerate(y):
        acc = 0j
        for w, k in zip(weights, ks):
            if w:
                acc += w * k[i]
        out.append(yi + h * acc)
    return tuple(out)


def _step(f, t, y, h, k1):
    ks = [k1]
    for stage in range(1, 7):
        yi = _combo(y, h, ks, _A[stage])
        ks.append(f(t + _C[stage] * h, yi))
    y_new = _combo(y, h, ks, _B[:6])
    err = tuple(h * sum(e * k[i] for e, k in zip(_E, ks) if e) for i in range(len(y)))
    return y_new, err, ks[6]


def dopri5(
    f: Callable[[float, State], State],
    t0: float,
    y0: Sequence[complex],
    t_eval: Sequence[float],
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    h0: float | None = None,
    max_steps: int = 2_000_000,
    cap: float | None = None,
    cap_index: int = 0,
) -> RKResult:
    """Adaptive integration from ``t0`` through the monotone points ``t_eval``.

    Steps are clipped so that every requested point is hit exactly.  When
    ``cap`` is given, integration stops as soon as ``|y[cap_index]|`` exceeds it
    and the result carries ``status = "diverged"``.
    """
    y = tuple(complex(v) for v in y0)
    t = float(t0)
    ts, ys = [], []
    if not len(t_eval):
        return RKResult(ts, ys)
    direction = 1.0 if t_eval[-1] >= t0 else -1.0
    span = abs(t_eval[-1] - t0) or 1.0
    h = abs(h0) if h0 else span * 1e-4
    k1 = f(t, y)
    n_steps = n_rej = 0
    idx = 0
    while idx < len(t_eval) and abs(t_eval[idx] - t) == 0.0:
        ts.append(t_eval[idx])
        ys.append(y)
        idx += 1
    while idx < len(t_eval):
        target = t_eval[idx]
        remaining = abs(target - t)
        landing = h >= remaining
        step = remaining if landing else h
        y_new, err, k_last = _step(f, t, y, direction * step, k1)
        norm = 0.0
        for yi, yn, ei in zip(y, y_new, err):
            scale = atol + rtol * max(abs(yi), abs(yn))
            norm = max(norm, abs(ei) / scale)
        if not math.isfinite(norm):
            norm = float("inf")
        if norm <= 1.0:
            n_steps += 1
            t = target if landing else t + direction * step
            y = y_new
            k1 = k_last
            if landing:
                ts.append(target)
                ys.append(y)
                idx += 1
            if cap is not None and abs(y[cap_index]) > cap:
                if not landing:
                    ts.append(t)
                    ys.append(y)
                return RKResult(ts, ys, n_steps, n_rej, "diverged", f"|y| exceeded cap at t={t:.17g}")
            fac = 5.0 if norm == 0.0 else min(5.0, max(0.2, 0.9 * norm ** -0.2))
            # a landing step may be artificially short; do not let it shrink h
            h = max(h, step * fac) if landing else step * fac
        else:
            n_rej += 1
            h = step * max(0.2, 0.9 * norm ** -0.2)
        if n_steps + n_rej > max_steps:
            return RKResult(ts, ys, n_steps, n_rej, "max_steps", "step budget exhausted")
        if h < 1e-14 * max(1.0, abs(t)):
            return RKResult(ts, ys, n_steps, n_rej, "step_underflow", f"step size underflow at t={t:.17g}")
    return RKResult(ts, ys, n_steps, n_rej)


def rk_fixed(f, t0: float, y0: Sequence[complex], t1: float, n_steps: int) -> State:
    """Fixed-step Dormand-Prince (5th-order weights); used for order checks."""
    y = tuple(complex(v) for v in y0)
    h = (t1 - t0) / n_steps
    t = t0
    k1 = f(t, y)
    for i in range(n_steps):
        y, _, k1 = _step(f, t, y, h, k1)
        t = t0 + (i + 1) * h
    return y


__all__ = ["RKResult", "dopri5", "rk_fixed"]
