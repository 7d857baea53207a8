"""Uniform operations over dense matrices and shift-type operators.

Fredholm modules come in two flavors: finite rank fibers (plain numpy
arrays) and shift-type fibers (ShiftOp).  The helpers here let the
verification code treat both the same way.  In finite dimensions every
operator is compact, so the compactness defect of a dense operator is
zero by definition.
"""

from __future__ import annotations

import numpy as np

from .linalg import dagger, opnorm
from .shift_calculus import ShiftOp, identity_op, op_equal

Operator = "np.ndarray | ShiftOp"


def adj(x):
    if isinstance(x, ShiftOp):
        return x.H
    return dagger(x)


def identity_like(x):
    if isinstance(x, ShiftOp):
        if x.d_out != x.d_in:
            raise ValueError("identity needs square color dimensions")
        return identity_op(x.d_out)
    return np.eye(x.shape[0], dtype=complex)


def norm_upper(x) -> float:
    """Upper bound for the operator norm (exact for dense matrices)."""
    if isinstance(x, ShiftOp):
        return x.norm_upper()
    return opnorm(x)


def compact_defect(x) -> float:
    if isinstance(x, ShiftOp):
        return x.compact_defect()
    return 0.0


def zero_defect(x) -> float:
    """Upper bound for the distance to the zero operator."""
    if isinstance(x, ShiftOp):
        return x.norm_upper()
    return opnorm(x)


def commutator(a, b):
    return a @ b - b @ a


def is_exactly_zero(x) -> bool:
    if isinstance(x, ShiftOp):
        return not x.stripes and not x.finite
    return not np.any(x)


def operators_equal_exact(a, b) -> bool:
    if isinstance(a, ShiftOp) and isinstance(b, ShiftOp):
        return op_equal(a, b)
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        return a.shape == b.shape and np.array_equal(a, b)
    return False


def evaluate_word_ops(letters, images: dict, ident):
    """Product of images over signed 1-based letters, last letter first."""
    out = ident
    for l in reversed(tuple(letters)):
        m = images[abs(l)]
        out = (m if l > 0 else adj(m)) @ out
    return out
