"""Exact calculus for shift-type operators on l2(N) tensor C^d.

An operator is a finite sum of modulated stripes and a finitely
supported block matrix.  The stripe with offset k, phase c and color
matrix M has the block entry exp(2 pi i c m) M at position (m, m - k)
for every site m >= max(0, k); phases are kept as exact Fractions mod 1
so that products, adjoints and identities like S* S = 1 and
S S* = 1 - P_0 come out exactly, not just to float precision.

Products of stripes are again stripes up to a finite correction:
the product of offsets k1 and k2 is supported on m >= max(0, k1, k1+k2),
while the canonical stripe with offset k1+k2 starts at max(0, k1+k2),
so the surplus rows (nonempty only when k1 > 0 > k2) are subtracted
into the finite part.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import FiberMismatch
from .linalg import dagger, opnorm

Phase = Fraction

_QUARTER_EXACT = {
    Fraction(0): 1.0 + 0.0j,
    Fraction(1, 4): 1.0j,
    Fraction(1, 2): -1.0 + 0.0j,
    Fraction(3, 4): -1.0j,
}


def cispi_frac(c: Fraction) -> complex:
    """exp(2 pi i c) with exact values at the quarter turns."""
    c = c % 1
    if c in _QUARTER_EXACT:
        return _QUARTER_EXACT[c]
    return complex(np.exp(2j * np.pi * float(c)))


def _scale(z: complex, m: np.ndarray) -> np.ndarray:
    # multiplying by exactly 1 must be the identity at the bit level
    if z == 1.0:
        return m
    return z * m


class ShiftOp:
    """Finite sum of modulated stripes plus a finite block matrix.

    stripes maps (offset k, phase c) to a d_out x d_in color matrix;
    finite maps a site pair (r, s) to a color matrix.  Zero matrices are
    dropped on construction, so the representation is a normal form and
    two operators are equal iff their dictionaries match.
    """

    __slots__ = ("d_out", "d_in", "stripes", "finite")

    def __init__(self, d_out: int, d_in: int,
                 stripes: dict[tuple[int, Fraction], np.ndarray] | None = None,
                 finite: dict[tuple[int, int], np.ndarray] | None = None):
        self.d_out = int(d_out)
        self.d_in = int(d_in)
        self.stripes: dict[tuple[int, Fraction], np.ndarray] = {}
        self.finite: dict[tuple[int, int], np.ndarray] = {}
        for (k, c), m in (stripes or {}).items():
            m = np.asarray(m, dtype=complex)
            if m.shape != (self.d_out, self.d_in):
                raise FiberMismatch(
                    f"stripe {k} color matrix has shape {m.shape}, "
                    f"expected {(self.d_out, self.d_in)}")
            if np.any(m):
                key = (int(k), Fraction(c) % 1)
                self.stripes[key] = self.stripes.get(key, 0) + m
        for (r, s), m in (finite or {}).items():
            if r < 0 or s < 0:
                raise FiberMismatch("finite part indexed by negative sites")
            m = np.asarray(m, dtype=complex)
            if m.shape != (self.d_out, self.d_in):
                raise FiberMismatch(
                    f"finite block {(r, s)} has shape {m.shape}, "
                    f"expected {(self.d_out, self.d_in)}")
            if np.any(m):
                self.finite[(int(r), int(s))] = self.finite.get((r, s), 0) + m
        # summing may have produced fresh zeros
        self.stripes = {k: v for k, v in self.stripes.items() if np.any(v)}
        self.finite = {k: v for k, v in self.finite.items() if np.any(v)}

    # ------------------------------------------------------------ queries

    @property
    def max_abs_shift(self) -> int:
        return max((abs(k) for k, _ in self.stripes), default=0)

    @property
    def finite_extent(self) -> int:
        """Number of leading sites that contain the whole finite part."""
        return max((max(r, s) + 1 for r, s in self.finite), default=0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.compact_defect() <= tol and all(
            opnorm(m) <= tol for m in self.finite.values())

    def compact_defect(self) -> float:
        """Distance bound to the compacts: total stripe weight."""
        return float(sum(opnorm(m) for m in self.stripes.values()))

    def is_compact(self, tol: float = 0.0) -> bool:
        return self.compact_defect() <= tol

    def norm_upper(self) -> float:
        """Triangle-inequality bound; each stripe has norm exactly |M|."""
        bound = sum(opnorm(m) for m in self.stripes.values())
        n = self.finite_extent
        if n:
            bound += opnorm(self._finite_dense(n, n))
        return float(bound)

    def _finite_dense(self, rows: int, cols: int) -> np.ndarray:
        out = np.zeros((rows * self.d_out, cols * self.d_in), dtype=complex)
        for (r, s), m in self.finite.items():
            if r < rows and s < cols:
                out[r * self.d_out:(r + 1) * self.d_out,
                    s * self.d_in:(s + 1) * self.d_in] += m
        return out

    def materialize(self, rows: int, cols: int | None = None) -> np.ndarray:
        """Dense window: the first `rows` x `cols` sites of the operator."""
        if cols is None:
            cols = rows
        out = self._finite_dense(rows, cols)
        for (k, c), m in self.stripes.items():
            for row in range(max(0, k), rows):
                col = row - k
                if 0 <= col < cols:
                    out[row * self.d_out:(row + 1) * self.d_out,
                        col * self.d_in:(col + 1) * self.d_in] += _scale(
                            cispi_frac(c * row), m)
        return out

    def __repr__(self) -> str:
        ks = sorted((k, str(c)) for k, c in self.stripes)
        return (f"ShiftOp(d={self.d_out}x{self.d_in}, stripes={ks}, "
                f"finite_blocks={len(self.finite)})")

    # ---------------------------------------------------------- arithmetic

    def _require_same_space(self, other: "ShiftOp") -> None:
        if (self.d_out, self.d_in) != (other.d_out, other.d_in):
            raise FiberMismatch("color dimensions differ")

    def __add__(self, other: "ShiftOp") -> "ShiftOp":
        if not isinstance(other, ShiftOp):
            return NotImplemented
        self._require_same_space(other)
        stripes = {k: v.copy() for k, v in self.stripes.items()}
        for k, v in other.stripes.items():
            stripes[k] = stripes.get(k, 0) + v
        finite = {k: v.copy() for k, v in self.finite.items()}
        for k, v in other.finite.items():
            finite[k] = finite.get(k, 0) + v
        return ShiftOp(self.d_out, self.d_in, stripes, finite)

    def __neg__(self) -> "ShiftOp":
        return self * (-1.0)

    def __sub__(self, other: "ShiftOp") -> "ShiftOp":
        if not isinstance(other, ShiftOp):
            return NotImplemented
        return self + (-other)

    def __mul__(self, z) -> "ShiftOp":
        if not isinstance(z, (int, float, complex)):
            return NotImplemented
        return ShiftOp(self.d_out, self.d_in,
                       {k: z * v for k, v in self.stripes.items()},
                       {k: z * v for k, v in self.finite.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "ShiftOp") -> "ShiftOp":
        if not isinstance(other, ShiftOp):
            return NotImplemented
        if self.d_in != other.d_out:
            raise FiberMismatch("color dimensions do not compose")
        stripes: dict[tuple[int, Fraction], np.ndarray] = {}
        finite: dict[tuple[int, int], np.ndarray] = {}

        def add_stripe(k: int, c: Fraction, m: np.ndarray) -> None:
            key = (k, c % 1)
            stripes[key] = stripes.get(key, 0) + m

        def add_finite(r: int, s: int, m: np.ndarray) -> None:
            finite[(r, s)] = finite.get((r, s), 0) + m

        for (k1, c1), m1 in self.stripes.items():
            for (k2, c2), m2 in other.stripes.items():
                k = k1 + k2
                c = c1 + c2
                m = _scale(cispi_frac(-c2 * k1), m1 @ m2)
                add_stripe(k, c, m)
                # the true product starts at max(0, k1, k); the canonical
                # stripe starts earlier, so subtract the surplus rows
                for row in range(max(0, k), max(0, k1, k)):
                    add_finite(row, row - k, _scale(-cispi_frac(c * row), m))
            for (r, s), m2 in other.finite.items():
                if r + k1 >= max(0, k1):
                    add_finite(r + k1, s,
                               _scale(cispi_frac(c1 * (r + k1)), m1 @ m2))
        for (r, s), m1 in self.finite.items():
            for (k2, c2), m2 in other.stripes.items():
                if s >= max(0, k2):
                    add_finite(r, s - k2, _scale(cispi_frac(c2 * s), m1 @ m2))
            for (r2, s2), m2 in other.finite.items():
                if s == r2:
                    add_finite(r, s2, m1 @ m2)
        return ShiftOp(self.d_out, other.d_in, stripes, finite)

    @property
    def H(self) -> "ShiftOp":
        """Adjoint; stripes map to stripes, exactly."""
        stripes = {}
        for (k, c), m in self.stripes.items():
            stripes[(-k, -c % 1)] = _scale(cispi_frac(-c * k), dagger(m))
        finite = {(s, r): dagger(m) for (r, s), m in self.finite.items()}
        return ShiftOp(self.d_in, self.d_out, stripes, finite)


# ------------------------------------------------------------ constructors

def zero_op(d_out: int, d_in: int | None = None) -> ShiftOp:
    return ShiftOp(d_out, d_out if d_in is None else d_in)


def identity_op(d: int) -> ShiftOp:
    return stripe_op(0, np.eye(d, dtype=complex))


def stripe_op(k: int, m: np.ndarray, c: Fraction = Fraction(0)) -> ShiftOp:
    m = np.asarray(m, dtype=complex)
    return ShiftOp(m.shape[0], m.shape[1], {(k, Fraction(c)): m})


def shift_op(d: int = 1) -> ShiftOp:
    """The unilateral shift (tensor the identity color)."""
    return stripe_op(1, np.eye(d, dtype=complex))


def modulation_op(c: Fraction, d: int = 1) -> ShiftOp:
    """Diagonal modulation: site m carries the phase exp(2 pi i c m)."""
    return stripe_op(0, np.eye(d, dtype=complex), Fraction(c))


def constant_diag_op(m: np.ndarray) -> ShiftOp:
    """Block diagonal with the same color matrix at every site."""
    return stripe_op(0, m)


def finite_op(blocks: dict[tuple[int, int], np.ndarray], d_out: int,
              d_in: int | None = None) -> ShiftOp:
    return ShiftOp(d_out, d_out if d_in is None else d_in, finite=blocks)


def site_projection_op(sites: int, d: int = 1) -> ShiftOp:
    """Orthogonal projection onto the first `sites` sites."""
    eye = np.eye(d, dtype=complex)
    return finite_op({(m, m): eye.copy() for m in range(sites)}, d)


def updown_op(a: int, b: int, m: np.ndarray) -> ShiftOp:
    """S^a (1 tensor M) S*^b in normal form (a, b >= 0).

    The entries sit at (n + a, n + b) for n >= 0, so the canonical
    stripe of offset a - b overshoots by the rows below a; those are
    subtracted into the finite part.
    """
    if a < 0 or b < 0:
        raise FiberMismatch("shift powers must be nonnegative")
    m = np.asarray(m, dtype=complex)
    k = a - b
    out = stripe_op(k, m)
    fin = {(row, row - k): -m for row in range(max(0, k), a)}
    return out + ShiftOp(m.shape[0], m.shape[1], finite=fin)


# -------------------------------------------------------------- color maps

def map_color(op: ShiftOp, f) -> ShiftOp:
    """Apply f to every color matrix; f must preserve a common shape."""
    stripes = {k: np.asarray(f(m), dtype=complex) for k, m in op.stripes.items()}
    finite = {k: np.asarray(f(m), dtype=complex) for k, m in op.finite.items()}
    shapes = {m.shape for m in stripes.values()} | {m.shape for m in finite.values()}
    if len(shapes) > 1:
        raise FiberMismatch(f"color map produced mixed shapes {shapes}")
    if shapes:
        d_out, d_in = next(iter(shapes))
    else:
        d_out, d_in = op.d_out, op.d_in
    return ShiftOp(d_out, d_in, stripes, finite)


def color_corner(op: ShiftOp, rows, cols) -> ShiftOp:
    """Sub-operator picking the given color row/column indices."""
    rows = list(rows)
    cols = list(cols)
    sel = np.ix_(rows, cols)
    stripes = {k: m[sel] for k, m in op.stripes.items()}
    finite = {k: m[sel] for k, m in op.finite.items()}
    return ShiftOp(len(rows), len(cols), stripes, finite)


def op_equal(a: ShiftOp, b: ShiftOp) -> bool:
    """Bitwise equality of the normal forms."""
    if (a.d_out, a.d_in) != (b.d_out, b.d_in):
        return False
    if set(a.stripes) != set(b.stripes) or set(a.finite) != set(b.finite):
        return False
    return (all(np.array_equal(a.stripes[k], b.stripes[k]) for k in a.stripes)
            and all(np.array_equal(a.finite[k], b.finite[k]) for k in a.finite))
