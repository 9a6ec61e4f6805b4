"""Periodic 4-torus cell complex and its discrete exterior calculus.

Cochains are plain numpy arrays holding pointwise component values:

    degree 0   shape (N, N, N, N)
    degree 1   shape (N, N, N, N, 4)    last axis: edge direction mu
    degree 2   shape (N, N, N, N, 6)    last axis: plane index into PLANES

Enumeration order is C order on these shapes (site-major lexicographic,
then direction), which is also the snapshot payload order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DIM = 4
PLANES: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PLANE_INDEX = {p: i for i, p in enumerate(PLANES)}
N_COMPONENTS = {0: 1, 1: 4, 2: 6}


@dataclass(frozen=True)
class Lattice:
    n: int
    h: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n_per_axis must be an integer >= 2, got {self.n!r}")
        if not (np.isfinite(self.h) and self.h > 0):
            raise ValueError(f"spacing must be positive and finite, got {self.h!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "h", float(self.h))

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.n,) * DIM

    @property
    def n_sites(self) -> int:
        return self.n**DIM

    @property
    def n_edges(self) -> int:
        return DIM * self.n_sites

    @property
    def n_plaquettes(self) -> int:
        return 6 * self.n_sites

    @property
    def volume(self) -> float:
        return self.n_sites * self.h**DIM

    @property
    def weight(self) -> float:
        """Cell weight h^4 of the discrete integral."""
        return self.h**DIM

    def cochain_shape(self, k: int) -> tuple[int, ...]:
        if k == 0:
            return self.shape
        if k in (1, 2):
            return self.shape + (N_COMPONENTS[k],)
        raise ValueError(f"cochain degree must be 0, 1 or 2, got {k}")

    def zeros(self, k: int) -> np.ndarray:
        return np.zeros(self.cochain_shape(k))

    def spinor_zeros(self) -> np.ndarray:
        return np.zeros(self.shape + (2,), dtype=complex)

    def coords(self) -> np.ndarray:
        """Integer site coordinates, shape (N, N, N, N, 4)."""
        grids = np.meshgrid(*(np.arange(self.n),) * DIM, indexing="ij")
        return np.stack(grids, axis=-1)

    # -- indexing bijections -------------------------------------------------

    def site_index(self, x) -> int:
        return int(np.ravel_multi_index(tuple(int(c) % self.n for c in x), self.shape))

    def site_coords(self, i: int) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unravel_index(i, self.shape))

    def edge_index(self, x, mu: int) -> int:
        return DIM * self.site_index(x) + mu

    def edge(self, i: int) -> tuple[tuple[int, ...], int]:
        """(tail site, direction) of edge i."""
        s, mu = divmod(i, DIM)
        return self.site_coords(s), mu

    def plaquette_index(self, x, mu: int, nu: int) -> int:
        return 6 * self.site_index(x) + PLANE_INDEX[(mu, nu)]

    def plaquette(self, i: int) -> tuple[tuple[int, ...], tuple[int, int]]:
        """(corner site, ordered direction pair) of plaquette i."""
        s, p = divmod(i, 6)
        return self.site_coords(s), PLANES[p]


def degree(c: np.ndarray) -> int:
    if c.ndim == DIM:
        return 0
    if c.ndim == DIM + 1 and c.shape[-1] == 4:
        return 1
    if c.ndim == DIM + 1 and c.shape[-1] == 6:
        return 2
    raise ValueError(f"array of shape {c.shape} is not a cochain")


def _check(lat: Lattice, c: np.ndarray, allowed: tuple[int, ...]) -> int:
    k = degree(c)
    if k not in allowed:
        raise ValueError(f"cochain degree {k} not in {allowed}")
    if c.shape != lat.cochain_shape(k):
        raise ValueError(f"cochain shape {c.shape} does not match lattice {lat.shape}")
    return k


def shift(f: np.ndarray, mu: int, step: int = 1) -> np.ndarray:
    """f(x + step*mu_hat) with periodic wrap."""
    return np.roll(f, -step, axis=mu)


def fwd(f: np.ndarray, mu: int, h: float) -> np.ndarray:
    return (shift(f, mu) - f) / h


def fwd_T(f: np.ndarray, mu: int, h: float) -> np.ndarray:
    """Transpose of the forward difference: (f(x - mu) - f(x)) / h."""
    return (shift(f, mu, -1) - f) / h


def d(lat: Lattice, c: np.ndarray) -> np.ndarray:
    """Coboundary: forward differences divided by h."""
    k = _check(lat, c, (0, 1))
    h = lat.h
    if k == 0:
        return np.stack([fwd(c, mu, h) for mu in range(DIM)], axis=-1)
    out = np.empty(lat.cochain_shape(2))
    for p, (mu, nu) in enumerate(PLANES):
        out[..., p] = fwd(c[..., nu], mu, h) - fwd(c[..., mu], nu, h)
    return out


def d_star(lat: Lattice, c: np.ndarray) -> np.ndarray:
    """Codifferential, the exact adjoint of d under `inner`."""
    k = _check(lat, c, (1, 2))
    h = lat.h
    if k == 1:
        return sum(fwd_T(c[..., mu], mu, h) for mu in range(DIM))
    out = np.zeros(lat.cochain_shape(1))
    for p, (mu, nu) in enumerate(PLANES):
        out[..., nu] += fwd_T(c[..., p], mu, h)
        out[..., mu] -= fwd_T(c[..., p], nu, h)
    return out


def inner(lat: Lattice, a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    _check(lat, a, (0, 1, 2))
    return float(lat.weight * np.vdot(a, b).real)


def norm(lat: Lattice, a: np.ndarray) -> float:
    return float(np.sqrt(lat.weight * np.vdot(a, a).real))


def self_dual(f: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto self-dual 2-cochains.

    Flat orthonormal frame with orientation dx0^dx1^dx2^dx3:
    F+_01 = F+_23, F+_02 = -F+_13, F+_03 = F+_12.
    """
    if degree(f) != 2:
        raise ValueError("self_dual needs a 2-cochain")
    out = np.empty_like(f)
    s01 = 0.5 * (f[..., 0] + f[..., 5])
    s02 = 0.5 * (f[..., 1] - f[..., 4])
    s03 = 0.5 * (f[..., 2] + f[..., 3])
    out[..., 0] = s01
    out[..., 5] = s01
    out[..., 1] = s02
    out[..., 4] = -s02
    out[..., 2] = s03
    out[..., 3] = s03
    return out


def hodge_laplacian(lat: Lattice, c: np.ndarray) -> np.ndarray:
    """(d d* + d* d) on 0- and 1-cochains."""
    k = _check(lat, c, (0, 1))
    if k == 0:
        return d_star(lat, d(lat, c))
    return d(lat, d_star(lat, c)) + d_star(lat, d(lat, c))


def laplacian_eigenvalues(lat: Lattice) -> np.ndarray:
    """Closed-form spectrum of d*d on 0-cochains, one value per momentum."""
    k = np.arange(lat.n)
    s = 4.0 * np.sin(np.pi * k / lat.n) ** 2
    grids = np.meshgrid(*(s,) * DIM, indexing="ij")
    return np.sort(sum(grids).ravel()) / lat.h**2
