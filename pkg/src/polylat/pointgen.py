"""Polynomial lattice point sets and digit interlacing.

A generating vector (b, m, P, q_1..q_d) defines the classical polynomial
lattice point set: point n has coordinate j equal to the first m Laurent
digits of n(x)q_j(x)/P(x).  Interlacing order alpha merges each block of
alpha classical coordinates into one coordinate with alpha*m digits,
yielding a higher-order net of b^m points in s = d/alpha dimensions.

Points are kept as exact base-b digit vectors until quadrature time: the
error kernel needs exact leading-digit positions, and interlacing is a
digit operation.  Bulk generation exploits that both maps involved are
Z_b-linear in the coefficient vector of n(x), so a whole point set is a
couple of small integer matrix products (see gfpoly.laurent_digit_matrix).
"""

import json
from dataclasses import dataclass

import numpy as np

from .gfpoly import (
    DigitVector,
    GfPoly,
    Modulus,
    check_prime_base,
    laurent_digit_matrix,
    laurent_digits,
    mul_mod_matrix,
    poly_from_string,
    poly_to_string,
    truncate_digits,
)


def index_to_poly(n: int, b: int) -> GfPoly:
    """The polynomial n(x) = sum eta_r x^r for n = sum eta_r b^r."""
    if n < 0:
        raise ValueError("point index must be nonnegative")
    check_prime_base(b)
    return GfPoly.from_int(b, n)


@dataclass(frozen=True)
class GeneratingVector:
    """Generating vector of an interlaced polynomial lattice rule.

    q holds d = alpha*s nonzero polynomials of degree < m (the candidate
    set per CBC component); alpha = 1 gives a classical rule.
    """

    modulus: Modulus
    alpha: int
    q: tuple

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("interlacing factor must be >= 1")
        if not self.q:
            raise ValueError("generating vector must be nonempty")
        if len(self.q) % self.alpha != 0:
            raise ValueError(
                f"number of components {len(self.q)} not a multiple of alpha={self.alpha}"
            )
        for j, qj in enumerate(self.q):
            if qj.b != self.b:
                raise ValueError(f"component {j + 1}: base mismatch")
            if qj.is_zero() or qj.degree >= self.m:
                raise ValueError(
                    f"component {j + 1} must be nonzero of degree < {self.m}: {qj}"
                )
        object.__setattr__(self, "q", tuple(self.q))

    @property
    def b(self) -> int:
        return self.modulus.b

    @property
    def m(self) -> int:
        return self.modulus.m

    @property
    def d(self) -> int:
        return len(self.q)

    @property
    def s(self) -> int:
        return self.d // self.alpha

    @property
    def n_points(self) -> int:
        return self.b**self.m

    def to_json_dict(self) -> dict:
        return {
            "b": self.b,
            "m": self.m,
            "alpha": self.alpha,
            "s": self.s,
            "P": poly_to_string(self.modulus.poly),
            "q": [poly_to_string(qj) for qj in self.q],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "GeneratingVector":
        b = int(data["b"])
        modulus = Modulus(poly_from_string(b, data["P"]))
        if modulus.m != int(data["m"]):
            raise ValueError("modulus degree does not match field 'm'")
        q = tuple(poly_from_string(b, s) for s in data["q"])
        gv = cls(modulus=modulus, alpha=int(data["alpha"]), q=q)
        if gv.s != int(data["s"]):
            raise ValueError("field 's' does not match len(q)/alpha")
        return gv

    def save(self, path, metadata: dict | None = None):
        doc = self.to_json_dict()
        if metadata:
            doc["config"] = metadata
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "GeneratingVector":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class DigitPoint:
    """One point, coordinate-wise exact digit expansions."""

    coords: tuple

    def values(self) -> np.ndarray:
        return np.array([c.value() for c in self.coords])


@dataclass(frozen=True)
class PointSet:
    """Materialized point set; index n = 0 is always the origin."""

    points: tuple
    base: int
    precision: int

    @property
    def dimension(self) -> int:
        return len(self.points[0].coords)

    def __len__(self):
        return len(self.points)

    def to_array(self) -> np.ndarray:
        return np.array([p.values() for p in self.points])


# -- bulk digit generation ---------------------------------------------------


def classical_digit_array(gv: GeneratingVector) -> np.ndarray:
    """Digits of the classical point set, shape (N, d, m), dtype uint8.

    out[n, j] holds digits t_1..t_m of coordinate j of point n.
    """
    b, m, N = gv.b, gv.m, gv.n_points
    # base-b digits of every index n, shape (m, N)
    idx = np.arange(N, dtype=np.int64)
    n_digits = np.empty((m, N), dtype=np.int64)
    for r in range(m):
        n_digits[r] = idx % b
        idx = idx // b
    T = laurent_digit_matrix(gv.modulus)
    out = np.empty((N, gv.d, m), dtype=np.uint8)
    for j, qj in enumerate(gv.q):
        M = mul_mod_matrix(qj, gv.modulus)
        digits = (T @ M % b) @ n_digits % b  # entries < m*b^2, no overflow
        out[:, j, :] = digits.T
    return out


def interlace_digit_array(classical: np.ndarray, alpha: int) -> np.ndarray:
    """Interlace blocks of alpha coordinates, (N, alpha*s, m) -> (N, s, alpha*m).

    Output digit at position j + (a-1)*alpha (1-based) is digit a of block
    member j, exactly the digit-interleaving map.
    """
    N, d, m = classical.shape
    if d % alpha != 0:
        raise ValueError(f"dimension {d} not divisible by alpha={alpha}")
    s = d // alpha
    blocks = classical.reshape(N, s, alpha, m)
    # position index (a-1)*alpha + (j-1) means digit axis varies slowest
    return blocks.transpose(0, 1, 3, 2).reshape(N, s, alpha * m)


def digits_to_values(digits: np.ndarray, b: int) -> np.ndarray:
    """Exact digit arrays to floats in [0,1); error at most one ulp."""
    L = digits.shape[-1]
    weights = b ** -(np.arange(1, L + 1, dtype=np.float64))
    return digits.astype(np.float64) @ weights


def lattice_points(gv: GeneratingVector) -> np.ndarray:
    """Interlaced lattice points as an (N, s) float array, the quadrature view."""
    return digits_to_values(interlace_digit_array(classical_digit_array(gv), gv.alpha), gv.b)


# -- object API (exact digit vectors) ----------------------------------------


def classical_points(gv: GeneratingVector) -> PointSet:
    """Classical (non-interlaced) point set as exact digit vectors."""
    digits = classical_digit_array(gv)
    b = gv.b
    pts = tuple(
        DigitPoint(tuple(DigitVector(b, tuple(digits[n, j])) for j in range(gv.d)))
        for n in range(gv.n_points)
    )
    return PointSet(points=pts, base=b, precision=gv.m)


def point_for_index(gv: GeneratingVector, n: int) -> DigitPoint:
    """Single classical point straight from the Laurent-division definition.

    Slower than the bulk path; serves as its independent cross-check.
    """
    npoly = index_to_poly(n, gv.b)
    coords = tuple(
        truncate_digits(laurent_digits(npoly, qj, gv.modulus, gv.m), gv.m) for qj in gv.q
    )
    return DigitPoint(coords)


def iter_classical_points(gv: GeneratingVector):
    """Stream classical points one index at a time (O(d*m) memory)."""
    b, m, N = gv.b, gv.m, gv.n_points
    T = laurent_digit_matrix(gv.modulus)
    maps = [(T @ mul_mod_matrix(qj, gv.modulus)) % b for qj in gv.q]
    for n in range(N):
        nd = np.array((GfPoly.from_int(b, n).coeffs + (0,) * m)[:m], dtype=np.int64)
        coords = tuple(DigitVector(b, tuple((mp @ nd) % b)) for mp in maps)
        yield DigitPoint(coords)


def interlace_digits(streams, alpha: int) -> DigitVector:
    """Interleave alpha digit vectors of equal precision m into one of alpha*m."""
    if len(streams) != alpha:
        raise ValueError(f"need exactly alpha={alpha} inputs, got {len(streams)}")
    m = streams[0].precision
    b = streams[0].b
    if any(s.precision != m or s.b != b for s in streams):
        raise ValueError("inputs must share base and precision")
    out = [0] * (alpha * m)
    for j, s in enumerate(streams):  # j = 0..alpha-1 for member j+1
        for a, t in enumerate(s.digits):  # a = 0..m-1 for digit a+1
            out[j + a * alpha] = t
    return DigitVector(b, tuple(out))


def interlace_points(ps: PointSet, alpha: int) -> PointSet:
    """Blockwise interlacing of a point set; alpha = 1 is the identity."""
    d = ps.dimension
    if d % alpha != 0:
        raise ValueError(f"dimension {d} not divisible by alpha={alpha}")
    s = d // alpha
    pts = tuple(
        DigitPoint(
            tuple(
                interlace_digits([p.coords[k * alpha + j] for j in range(alpha)], alpha)
                for k in range(s)
            )
        )
        for p in ps.points
    )
    return PointSet(points=pts, base=ps.base, precision=alpha * ps.precision)


def point_to_floats(p: DigitPoint) -> np.ndarray:
    """Coordinate values of one point as floats."""
    return p.values()


# -- file formats -------------------------------------------------------------


def write_points_csv(path, values: np.ndarray):
    """Decimal CSV, one row per point, header y1..ys."""
    n, s = values.shape
    with open(path, "w") as fh:
        fh.write(",".join(f"y{j + 1}" for j in range(s)) + "\n")
        for row in values:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_points_digits(path, digits: np.ndarray, b: int):
    """Exactness-preserving format: one base-b digit string per coordinate.

    A coordinate with digits t_1..t_L is written as the string t_1 t_2 ... t_L
    (most significant fractional digit first).
    """
    if b > 9:
        raise ValueError("digit format needs single-character digits (b <= 7)")
    n, s, L = digits.shape
    with open(path, "w") as fh:
        fh.write(",".join(f"y{j + 1}" for j in range(s)) + "\n")
        for row in digits:
            fh.write(",".join("".join(str(int(t)) for t in coord) for coord in row) + "\n")


def read_points_digits(path, b: int) -> np.ndarray:
    """Inverse of :func:`write_points_digits`; exact round trip."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    rows = [ln.split(",") for ln in lines[1:]]
    out = np.array(
        [[[int(ch) for ch in coord] for coord in row] for row in rows], dtype=np.uint8
    )
    if out.size and out.max() >= b:
        raise ValueError(f"digit {out.max()} out of range for base {b}")
    return out
