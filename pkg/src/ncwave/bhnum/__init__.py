"""Numerics of the radial wave equation around a noncommutative black hole."""
from .field import *  # noqa: F401,F403
from .field import __all__ as _field_all
from .rk import RKResult, dopri5, rk_fixed
from .solve import *  # noqa: F401,F403
from .solve import __all__ as _solve_all

__all__ = list(_field_all) + list(_solve_all) + ["RKResult", "dopri5", "rk_fixed"]
