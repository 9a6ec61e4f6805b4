"""Hodge theory on 1-cochains: exact/coexact/harmonic splitting, b_1,
Coulomb gauge and holonomy coordinates on the Jacobian torus."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from .fields import Configuration, GaugeTransform, gauge_apply
from .lattice import DIM, Lattice, d, d_star, hodge_laplacian, norm


class PoissonError(RuntimeError):
    pass


def solve_poisson(lat: Lattice, rhs: np.ndarray, rtol: float = 1e-12, maxiter: int = 10_000) -> np.ndarray:
    """Zero-mean chi with d*d chi = rhs (rhs is projected to zero mean)."""
    b = (rhs - rhs.mean()).ravel()
    if not np.any(b):
        return lat.zeros(0)
    op = LinearOperator(
        (lat.n_sites, lat.n_sites), matvec=lambda x: d_star(lat, d(lat, x.reshape(lat.shape))).ravel(), dtype=float
    )
    x, info = cg(op, b, rtol=rtol, atol=0.0, maxiter=maxiter)
    resid = np.linalg.norm(op.matvec(x) - b) / np.linalg.norm(b)
    if info != 0 or resid > 10 * rtol:
        raise PoissonError(f"CG did not converge: info={info}, relative residual {resid:.3e}")
    x = x.reshape(lat.shape)
    return x - x.mean()


@dataclass(frozen=True)
class HodgeSplit:
    exact: np.ndarray
    coexact: np.ndarray
    harmonic: np.ndarray
    potential: np.ndarray  # zero-mean chi with exact = d(chi)

    def reassemble(self) -> np.ndarray:
        return self.exact + self.coexact + self.harmonic


def harmonic_part(a: np.ndarray) -> np.ndarray:
    """Per-direction mean: the L2 projection onto constant 1-cochains."""
    return np.broadcast_to(a.mean(axis=tuple(range(DIM))), a.shape).copy()


def hodge_split(lat: Lattice, a: np.ndarray, rtol: float = 1e-12) -> HodgeSplit:
    chi = solve_poisson(lat, d_star(lat, a), rtol)
    exact = d(lat, chi)
    harmonic = harmonic_part(a)
    return HodgeSplit(exact, a - exact - harmonic, harmonic, chi)


def harmonic_basis(lat: Lattice, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal null-space basis of the 1-form Hodge Laplacian (dense; small N)."""
    dim = lat.n_edges
    if dim > 4096:
        raise ValueError("dense harmonic basis limited to N <= 5")
    shape = lat.cochain_shape(1)
    M = np.column_stack([hodge_laplacian(lat, e.reshape(shape)).ravel() for e in np.eye(dim)])
    vals, vecs = np.linalg.eigh(0.5 * (M + M.T))
    return vecs[:, np.abs(vals) <= tol * max(1.0, vals.max())]


def betti_1(lat: Lattice, tol: float = 1e-8) -> int:
    return int(harmonic_basis(lat, tol).shape[1])


def coulomb_gauge_fix(c: Configuration, rtol: float = 1e-12) -> tuple[Configuration, GaugeTransform]:
    """Gauge-equivalent configuration with d*(a) = 0."""
    lat = c.lattice
    chi = solve_poisson(lat, -d_star(lat, c.a), rtol)
    g = GaugeTransform(chi)
    return gauge_apply(g, c), g


def coulomb_residual(c: Configuration) -> float:
    """||d* a|| relative to max(1, ||a|| / h)."""
    lat = c.lattice
    return norm(lat, d_star(lat, c.a)) / max(1.0, norm(lat, c.a) / lat.h)


@dataclass(frozen=True)
class JacobianPoint:
    coords: tuple[float, float, float, float]

    def distance(self, other: JacobianPoint) -> float:
        """Max over directions of the circular distance on R/Z."""
        diff = np.asarray(self.coords) - np.asarray(other.coords)
        return float(np.max(np.abs(diff - np.round(diff))))


def holonomy_angles(c: Configuration) -> np.ndarray:
    lat = c.lattice
    return c.a.mean(axis=tuple(range(DIM))) * lat.n * lat.h


def jacobian_coordinates(c: Configuration, grad_tol: float = 1e-10) -> JacobianPoint:
    from .functional import sw_gradient
    from .hessian import REDUCIBLE_TOL, spinor_norm_sq

    phi_norm = np.sqrt(spinor_norm_sq(c))
    if phi_norm > REDUCIBLE_TOL:
        raise ValueError(f"not a reducible configuration: ||phi|| = {phi_norm:.3e}")
    g = sw_gradient(c).norm(c.lattice)
    if g > grad_tol:
        raise ValueError(f"not a critical point: ||grad|| = {g:.3e} > {grad_tol:.1e}")
    coords = np.mod(holonomy_angles(c) / (2 * np.pi), 1.0)
    return JacobianPoint(tuple(float(x) for x in coords))
