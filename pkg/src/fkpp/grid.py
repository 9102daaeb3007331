"""Periodic lattices and the scalar fields that live on them.

Two grid roles share one type: the unit periodicity cell of the medium
(corner-anchored, used for eigenproblems and steady states) and a large
origin-centered box standing in for R^d (used for propagation runs).  They
differ only in the ``origin_centered`` flag.  Storage is a flat row-major
float64 array; axis strides follow numpy's C layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PeriodicGrid",
    "ScalarField",
    "make_grid",
    "radial_distance",
    "tile_to_box",
    "sample_periodic",
]


def _is_pow2(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform lattice on the torus [0,L1) x ... x [0,Ld).

    When ``origin_centered`` the coordinates are (j - n/2) * h so that x = 0
    is the lattice point at index n/2 on every axis; otherwise x_j = j * h.
    """

    d: int
    n: tuple[int, ...]
    L: tuple[float, ...]
    origin_centered: bool = False

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.d}")
        if len(self.n) != self.d or len(self.L) != self.d:
            raise ValueError("n and L must have one entry per axis")
        for m in self.n:
            if m < 8 or not _is_pow2(m):
                raise ValueError(f"points per axis must be a power of two >= 8, got {m}")
        for length in self.L:
            if not (length > 0 and np.isfinite(length)):
                raise ValueError(f"box length must be positive and finite, got {length}")

    @property
    def h(self) -> tuple[float, ...]:
        return tuple(length / m for length, m in zip(self.L, self.n))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def size(self) -> int:
        return int(np.prod(self.n))

    def axis_coords(self, axis: int) -> np.ndarray:
        m = self.n[axis]
        j = np.arange(m, dtype=float)
        if self.origin_centered:
            j -= m // 2
        return j * self.h[axis]

    def coords(self) -> list[np.ndarray]:
        """Per-axis coordinate arrays broadcast to the full grid shape."""
        axes = [self.axis_coords(a) for a in range(self.d)]
        return list(np.meshgrid(*axes, indexing="ij"))

    def axis_wavenumbers(self, axis: int) -> np.ndarray:
        """FFT-ordered wavenumbers 2*pi*m~/L with m~ the signed alias of m."""
        return 2 * np.pi * np.fft.fftfreq(self.n[axis], d=self.h[axis])

    def symbol(self, two_alpha: float) -> np.ndarray:
        """|k|^two_alpha on the full FFT grid (shape = self.shape)."""
        ks = np.meshgrid(*[self.axis_wavenumbers(a) for a in range(self.d)], indexing="ij")
        k2 = sum(k * k for k in ks)
        return k2 ** (two_alpha / 2.0)

    def radial(self) -> np.ndarray:
        """|x| at every lattice point (origin-centered grids only)."""
        if not self.origin_centered:
            raise ValueError("radial coordinates require an origin-centered grid")
        xs = self.coords()
        return np.sqrt(sum(x * x for x in xs))

    def origin_index(self) -> tuple[int, ...]:
        if not self.origin_centered:
            raise ValueError("origin index requires an origin-centered grid")
        return tuple(m // 2 for m in self.n)


@dataclass
class ScalarField:
    """Real values on a PeriodicGrid, stored flat in row-major order."""

    grid: PeriodicGrid
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float).reshape(-1)
        if self.data.size != self.grid.size:
            raise ValueError(
                f"data length {self.data.size} does not match grid size {self.grid.size}"
            )

    @property
    def shaped(self) -> np.ndarray:
        """View of the data with the grid's d-dimensional shape."""
        return self.data.reshape(self.grid.shape)

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.data.copy())

    def check_finite(self, what: str = "field") -> "ScalarField":
        if not np.all(np.isfinite(self.data)):
            from .errors import NumericalError

            raise NumericalError(f"{what} contains non-finite values")
        return self


def make_grid(d, n, L, origin_centered=False) -> PeriodicGrid:
    """Construct a validated PeriodicGrid; scalars broadcast to all axes."""
    if np.isscalar(n):
        n = (int(n),) * d
    if np.isscalar(L):
        L = (float(L),) * d
    return PeriodicGrid(d=int(d), n=tuple(int(m) for m in n),
                        L=tuple(float(v) for v in L), origin_centered=bool(origin_centered))


def field_from(grid: PeriodicGrid, values: np.ndarray) -> ScalarField:
    return ScalarField(grid, np.asarray(values, dtype=float).reshape(-1))


def radial_distance(grid: PeriodicGrid, index) -> float:
    """Euclidean |x| of the lattice point at ``index`` (origin-centered only)."""
    if not grid.origin_centered:
        raise ValueError("radial_distance requires an origin-centered grid")
    if np.isscalar(index):
        index = (int(index),)
    if len(index) != grid.d:
        raise ValueError("index must have one entry per axis")
    s = 0.0
    for a, j in enumerate(index):
        x = (int(j) - grid.n[a] // 2) * grid.h[a]
        s += x * x
    return float(np.sqrt(s))


def _mode_matrix(cell_n: int, cell_L: float, pts: np.ndarray) -> np.ndarray:
    """exp(i k_m x_p) matrix (len(pts) x cell_n) for one axis of a cell grid."""
    k = 2 * np.pi * np.fft.fftfreq(cell_n, d=cell_L / cell_n)
    return np.exp(1j * np.outer(pts, k))


def sample_periodic(cell_field: ScalarField, pts: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of a cell field at arbitrary points.

    ``pts`` has shape (m, d) (or (m,) in 1D).  Points are taken modulo the
    cell lengths.  Exact for band-limited data; the Nyquist mode is treated
    as a cosine by taking the real part.
    """
    g = cell_field.grid
    pts = np.asarray(pts, dtype=float)
    if g.d == 1 and pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[1] != g.d:
        raise ValueError(f"points must have shape (m, {g.d})")
    coef = np.fft.fftn(cell_field.shaped) / g.size
    mats = [_mode_matrix(g.n[a], g.L[a], pts[:, a]) for a in range(g.d)]
    if g.d == 1:
        vals = np.einsum("a,pa->p", coef, mats[0])
    elif g.d == 2:
        vals = np.einsum("ab,pa,pb->p", coef, mats[0], mats[1])
    else:
        vals = np.einsum("abc,pa,pb,pc->p", coef, mats[0], mats[1], mats[2])
    return np.real(vals)


def sample_on_tensor(cell_field: ScalarField, axis_points) -> np.ndarray:
    """Evaluate the trigonometric interpolant on a tensor-product point set.

    ``axis_points`` is one 1D coordinate array per axis; the result has shape
    (len(p1), ..., len(pd)).  Separable contraction keeps the cost at
    O(prod(N_a) * n_cell) per axis instead of the scattered-point product.
    """
    g = cell_field.grid
    if len(axis_points) != g.d:
        raise ValueError("need one coordinate array per axis")
    coef = np.fft.fftn(cell_field.shaped) / g.size
    out = coef
    for a in range(g.d):
        E = _mode_matrix(g.n[a], g.L[a], np.asarray(axis_points[a], dtype=float))
        out = np.tensordot(out, E, axes=([0], [1]))
    # each contraction appends that axis's point dimension, so the final
    # axis order matches the input order
    return np.real(out)


def tile_to_box(cell_field: ScalarField, box: PeriodicGrid) -> ScalarField:
    """Tile a periodic cell field onto a larger box by trigonometric interpolation.

    Requires every box length to be an integer multiple of the cell length on
    the same axis, so the tiled field is periodic on the box.
    """
    g = cell_field.grid
    if g.d != box.d:
        raise ValueError("cell and box dimensions differ")
    for a in range(g.d):
        ratio = box.L[a] / g.L[a]
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValueError(
                f"box length {box.L[a]} is not an integer multiple of cell length {g.L[a]}"
            )
    vals = sample_on_tensor(cell_field, [box.axis_coords(a) for a in range(g.d)])
    return ScalarField(box, vals.reshape(-1))
