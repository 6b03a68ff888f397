"""Axis-aligned boxes, main diagonals, and the two subdivision strategies.

A point is a 1-D float64 numpy array.  A box is stored by the two ends of
its main diagonal: the componentwise-lower corner ``a`` and the upper
corner ``b``.  Both subdivision strategies keep that orientation for every
child, so the diagonal direction ``b - a`` is always well defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DIMENSION = 10


def as_point(x) -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    p = np.asarray(x, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError(f"point must be 1-D, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"point has non-finite coordinates: {p}")
    return p


@dataclass
class DiagonalBox:
    """Hyperinterval [a, b] with a < b componentwise."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = as_point(self.a)
        self.b = as_point(self.b)
        n = self.a.size
        if self.b.size != n:
            raise ValueError("corner dimensions differ")
        if not 1 <= n <= MAX_DIMENSION:
            raise ValueError(f"dimension {n} outside 1..{MAX_DIMENSION}")
        if not np.all(self.a < self.b):
            raise ValueError(f"need a < b componentwise, got a={self.a}, b={self.b}")

    @property
    def dimension(self) -> int:
        return self.a.size

    @property
    def edges(self) -> np.ndarray:
        return self.b - self.a

    def volume(self) -> float:
        return float(np.prod(self.b - self.a))

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(self.a <= x) and np.all(x <= self.b))


def diag_norm(box: DiagonalBox) -> float:
    """Euclidean length of the main diagonal."""
    return float(np.linalg.norm(box.a - box.b))


def place_on_diagonal(box: DiagonalBox, f_a: float, f_b: float, khat: float) -> np.ndarray:
    """Next trial point on the main diagonal of ``box``.

    The point is the diagonal midpoint shifted toward the lower of the two
    endpoint values by (f_b - f_a) / (2 khat) along the unit diagonal.
    ``khat`` must be large enough (>= 4 |f_b - f_a| / diag) for the shift
    to stay within the middle three quarters of the diagonal; a point that
    escapes the closed segment means the caller supplied an invalid khat.
    """
    if khat <= 0:
        raise ValueError(f"khat must be positive, got {khat}")
    d = diag_norm(box)
    x = (box.a + box.b) / 2 - (f_b - f_a) / (2 * khat) * (box.b - box.a) / d
    if not box.contains(x):
        raise ValueError(
            f"placed point {x} escapes the box; khat={khat} is too small "
            f"for |f_b - f_a|={abs(f_b - f_a)} over diagonal {d}"
        )
    return x


def _strictly_inside(box: DiagonalBox, x: np.ndarray) -> bool:
    return bool(np.all(box.a < x) and np.all(x < box.b))


def bisect(box: DiagonalBox, x: np.ndarray) -> tuple[list[DiagonalBox], list[np.ndarray]]:
    """Split ``box`` by the hyperplane through ``x`` orthogonal to its longest edge.

    Returns the two children and the two vertices where the objective still
    has to be evaluated (the parent corners are inherited).  Edge-length
    ties go to the smallest coordinate index.
    """
    x = as_point(x)
    if not _strictly_inside(box, x):
        raise ValueError(f"split point {x} not strictly inside [{box.a}, {box.b}]")
    j = int(np.argmax(box.edges))
    b_lo = box.b.copy()
    b_lo[j] = x[j]
    a_hi = box.a.copy()
    a_hi[j] = x[j]
    children = [DiagonalBox(box.a.copy(), b_lo), DiagonalBox(a_hi, box.b.copy())]
    return children, [b_lo.copy(), a_hi.copy()]


def partition_2n(box: DiagonalBox, x: np.ndarray) -> tuple[list[DiagonalBox], list[np.ndarray]]:
    """Split ``box`` into 2^n children by the n axis hyperplanes through ``x``.

    Child ``index`` occupies [a_i, x_i] along axis i when bit i of ``index``
    is 0 and [x_i, b_i] when it is 1.  The returned vertices are the
    distinct child diagonal corners minus the parent corners a and b:
    exactly 2^(n+1) - 3 points, with ``x`` listed once (it is a corner of
    both the all-low and the all-high child).
    """
    x = as_point(x)
    if not _strictly_inside(box, x):
        raise ValueError(f"split point {x} not strictly inside [{box.a}, {box.b}]")
    n = box.dimension
    if n > MAX_DIMENSION:
        raise ValueError(f"dimension {n} exceeds cap {MAX_DIMENSION}")

    children = []
    new_vertices = []
    seen = set()
    a_key = (0,) * n
    b_key = (2,) * n
    seen.add(a_key)
    seen.add(b_key)
    # Selector per axis: 0 -> a_i, 1 -> x_i, 2 -> b_i.  Keys are exact, no
    # float comparisons needed.
    pool = (box.a, x, box.b)
    for index in range(2 ** n):
        bits = [(index >> i) & 1 for i in range(n)]
        lo_key = tuple(bits)                    # 0 or 1 per axis
        hi_key = tuple(bit + 1 for bit in bits)  # 1 or 2 per axis
        lo = np.array([pool[k][i] for i, k in enumerate(lo_key)])
        hi = np.array([pool[k][i] for i, k in enumerate(hi_key)])
        children.append(DiagonalBox(lo, hi))
        for key, vertex in ((lo_key, lo), (hi_key, hi)):
            if key not in seen:
                seen.add(key)
                new_vertices.append(vertex.copy())
    return children, new_vertices
