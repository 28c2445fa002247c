"""Exact algebra and 1-forms of the flat bicrossproduct model."""
from .algebra import (
    GAM,
    LAM,
    ONE,
    ZERO,
    AlgebraElement,
    Coefficient,
    Monomial,
    canonicalize,
    divide_by_lambda,
    flat_laplacian,
    lambda_order,
    mul,
    partial_x,
    r,
    radial_derivative,
    scale,
    shift_t,
    split_t,
    t,
    tau,
    times_t,
    x,
)
from .forms import (
    BASIS,
    DT,
    DX1,
    DX2,
    DX3,
    TH,
    FormSum,
    ModelConfig,
    classical_d_and_laplacian,
    commutator,
    dr_form,
    form_normalize,
    left_mul,
    push,
    right_mul,
)
from .parser import ParseError, format_expr, parse

__all__ = [
    "BASIS", "DT", "DX1", "DX2", "DX3", "GAM", "LAM", "ONE", "TH", "ZERO",
    "AlgebraElement", "Coefficient", "FormSum", "ModelConfig", "Monomial", "ParseError",
    "canonicalize", "classical_d_and_laplacian", "commutator", "divide_by_lambda", "dr_form",
    "flat_laplacian", "form_normalize", "format_expr", "lambda_order", "left_mul", "mul",
    "parse", "partial_x", "push", "r", "radial_derivative", "right_mul", "scale", "shift_t",
    "split_t", "t", "tau", "times_t", "x",
]
