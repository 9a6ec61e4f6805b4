"""Symmetric eigensolvers for the Hessian blocks and the Morse index of (A, 0).

All dimensions are real dimensions: complex spinor fields are flattened to
interleaved (re, im) float vectors, so each complex eigenvector of L_A
counts twice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .fields import Configuration
from .hessian import REDUCIBLE_TOL, HessianOperator, spinor_norm_sq
from .lattice import Lattice, d, d_star, hodge_laplacian

DENSE_MAX_DIM = 4096


class SpectralError(RuntimeError):
    pass


class LanczosConvergenceError(SpectralError):
    pass


class AmbiguousIndexError(SpectralError):
    pass


@dataclass(frozen=True)
class RealOperator:
    matvec: Callable[[np.ndarray], np.ndarray]
    dim: int
    name: str = "op"
    scale: float = 1.0  # rough spectral radius, sets default thresholds


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    morse_index: int
    kernel_dim: int
    zero_threshold: float
    solver: str
    iterations: int = 0
    residual_norms: np.ndarray = field(default_factory=lambda: np.zeros(0))
    operator: str = "op"
    complete: bool = True  # False when only the lowest part of the spectrum was computed
    gap_eigenvalue: float | None = None
    dimension_convention: str = "real"

    def as_dict(self) -> dict:
        return {
            "operator": self.operator,
            "solver": self.solver,
            "dimension_convention": self.dimension_convention,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "morse_index": int(self.morse_index),
            "kernel_dim": int(self.kernel_dim),
            "zero_threshold": float(self.zero_threshold),
            "complete": self.complete,
            "gap_eigenvalue": None if self.gap_eigenvalue is None else float(self.gap_eigenvalue),
            "iterations": int(self.iterations),
            "max_residual": float(np.max(self.residual_norms)) if len(self.residual_norms) else 0.0,
        }


def default_threshold(op: RealOperator) -> float:
    return 1e-8 * max(1.0, op.scale)


def _report(vals, res, tau, solver, op, iterations=0, complete=True):
    vals = np.asarray(vals, dtype=float)
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    res = np.asarray(res, dtype=float)[order]
    morse = int(np.sum(vals < -tau))
    kernel = int(np.sum(np.abs(vals) <= tau))
    above = vals[vals > tau]
    gap = float(above[0]) if len(above) else None
    return SpectralReport(vals, morse, kernel, tau, solver, iterations, res, op.name, complete, gap)


# -- operators ---------------------------------------------------------------


def spinor_to_real(v: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(v).view(float).ravel()


def real_to_spinor(x: np.ndarray, lat: Lattice) -> np.ndarray:
    return np.ascontiguousarray(x).view(complex).reshape(lat.shape + (2,))


def la_operator(c: Configuration) -> RealOperator:
    """L_A = Delta_A + kg/4 on real-flattened spinor fields."""
    lat = c.lattice
    H = HessianOperator(c)
    scale = 16.0 / lat.h**2 + float(np.max(np.abs(c.bundle.kg))) / 4

    def mv(x):
        return spinor_to_real(H.L_A(real_to_spinor(x, lat)))

    return RealOperator(mv, 4 * lat.n_sites, "L_A", scale)


def dstard_operator(lat: Lattice) -> RealOperator:
    """d*d on 1-cochains."""
    shape = lat.cochain_shape(1)

    def mv(x):
        return d_star(lat, d(lat, x.reshape(shape))).ravel()

    return RealOperator(mv, lat.n_edges, "d*d", 24.0 / lat.h**2)


def hodge1_operator(lat: Lattice) -> RealOperator:
    """d d* + d* d on 1-cochains; its kernel is d*d restricted to the Coulomb slice."""
    shape = lat.cochain_shape(1)

    def mv(x):
        return hodge_laplacian(lat, x.reshape(shape)).ravel()

    return RealOperator(mv, lat.n_edges, "hodge_1", 16.0 / lat.h**2)


def shifted_identity(dim: int, c: float) -> RealOperator:
    return RealOperator(lambda x: c * x, dim, f"{c}*I", abs(c))


# -- dense oracle ------------------------------------------------------------


def materialize(op: RealOperator) -> np.ndarray:
    if op.dim > DENSE_MAX_DIM:
        raise SpectralError(f"dense path limited to {DENSE_MAX_DIM} real dimensions, got {op.dim}")
    M = np.empty((op.dim, op.dim))
    e = np.zeros(op.dim)
    for j in range(op.dim):
        e[j] = 1.0
        M[:, j] = op.matvec(e)
        e[j] = 0.0
    return M


def dense_spectrum(op: RealOperator, tau: float | None = None, asym_tol: float = 1e-10) -> SpectralReport:
    M = materialize(op)
    asym = float(np.max(np.abs(M - M.T))) if op.dim else 0.0
    if asym > asym_tol * max(1.0, float(np.max(np.abs(M)))):
        raise SpectralError(f"operator {op.name} is not symmetric: max |M - M^T| = {asym:.3e}")
    M = 0.5 * (M + M.T)
    vals, vecs = np.linalg.eigh(M)
    res = np.linalg.norm(M @ vecs - vecs * vals, axis=0)
    if tau is None:
        tau = default_threshold(op)
    return _report(vals, res, tau, "dense", op)


# -- Lanczos with full reorthogonalization and locking ------------------------


def _orthonormalize_against(x, V):
    for _ in range(2):
        if V.shape[1]:
            x = x - V @ (V.T @ x)
    return x


def _cycle(op, V_locked, m, rng, tol):
    """One Lanczos run on the operator deflated by the locked vectors."""
    n = op.dim
    m = min(m, n - V_locked.shape[1])
    q = _orthonormalize_against(rng.standard_normal(n), V_locked)
    q /= np.linalg.norm(q)
    Q = np.empty((n, m))
    alpha, beta = np.empty(m), np.empty(m)
    steps = 0
    for j in range(m):
        Q[:, j] = q
        w = op.matvec(q)
        w = _orthonormalize_against(w, V_locked)
        alpha[j] = q @ w
        w -= Q[:, : j + 1] @ (Q[:, : j + 1].T @ w)
        w -= Q[:, : j + 1] @ (Q[:, : j + 1].T @ w)
        beta[j] = np.linalg.norm(w)
        steps = j + 1
        breakdown = beta[j] <= 1e-14 * max(1.0, op.scale)
        if breakdown or (steps >= 8 and steps % 4 == 0) or steps == m:
            theta, S = _tridiag_eig(alpha[:steps], beta[: steps - 1])
            est = np.abs(beta[j] * S[-1, 0])
            if breakdown or est <= 0.1 * tol * max(1.0, abs(theta[0])):
                break
        q = w / beta[j]
    theta, S = _tridiag_eig(alpha[:steps], beta[: steps - 1])
    Y = Q[:, :steps] @ S
    return theta, Y, steps


def _tridiag_eig(alpha, beta):
    if len(alpha) == 1:
        return alpha.copy(), np.ones((1, 1))
    return eigh_tridiagonal(alpha, beta)


def lanczos_lowest(
    op: RealOperator,
    k: int,
    tol: float = 1e-10,
    seed: int = 0,
    krylov: int | None = None,
    max_cycles: int | None = None,
    tau: float | None = None,
) -> SpectralReport:
    """k lowest eigenpairs of a symmetric operator, multiplicities included."""
    n = op.dim
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= dim, got k={k}, dim={n}")
    rng = np.random.default_rng(seed)
    m = krylov or min(n, max(80, 4 * k))
    max_cycles = max_cycles or 4 * k + 20
    V = np.empty((n, 0))
    vals: list[float] = []
    iters = 0
    sep = 1e-9 * max(1.0, op.scale)
    for _ in range(max_cycles):
        if V.shape[1] >= n:
            break
        theta, Y, steps = _cycle(op, V, m, rng, tol)
        iters += steps
        res = np.array([np.linalg.norm(op.matvec(Y[:, i]) - theta[i] * Y[:, i]) for i in range(min(len(theta), k))])
        conv = res <= tol * np.maximum(1.0, np.abs(theta[: len(res)]))
        if len(vals) >= k:
            kth = np.sort(vals)[k - 1]
            if conv[0] and theta[0] >= kth - sep:
                break
        added = 0
        for i in np.flatnonzero(conv):
            y = _orthonormalize_against(Y[:, i], V)
            nrm = np.linalg.norm(y)
            if nrm < 0.5:
                continue
            V = np.column_stack([V, y / nrm])
            vals.append(float(theta[i]))
            added += 1
        if not added:
            if m >= n - V.shape[1]:
                raise LanczosConvergenceError(
                    f"Lanczos on {op.name}: no converged Ritz pair (best residual {res.min():.3e}, tol {tol:.1e})"
                )
            m = min(n, 2 * m)
    else:
        raise LanczosConvergenceError(f"Lanczos on {op.name}: cycle budget exhausted with {len(vals)} of {k} pairs")
    AV = np.column_stack([op.matvec(V[:, i]) for i in range(V.shape[1])])
    rq = np.einsum("ij,ij->j", V, AV)
    order = np.argsort(rq, kind="stable")[:k]
    res = np.linalg.norm(AV[:, order] - V[:, order] * rq[order], axis=0)
    if tau is None:
        tau = default_threshold(op)
    rep = _report(rq[order], res, tau, "lanczos", op, iters, complete=(k == n))
    bad = res > 1e-8 * np.maximum(1.0, np.abs(rq[order]))
    if np.any(bad):
        raise LanczosConvergenceError(f"Lanczos on {op.name}: residual {res.max():.3e} above contract")
    return rep


def lowest_through(op: RealOperator, level: float, tau: float, seed: int = 0, start: int = 8) -> SpectralReport:
    """Lowest eigenvalues until one strictly above `level` is found (a verified gap)."""
    k = min(start, op.dim)
    while True:
        rep = lanczos_lowest(op, k, seed=seed, tau=tau)
        if rep.eigenvalues[-1] > level or k == op.dim:
            return rep
        k = min(op.dim, 2 * k)


# -- Morse index -------------------------------------------------------------


def _check_ambiguous(rep: SpectralReport):
    tau = rep.zero_threshold
    close = rep.eigenvalues[(rep.eigenvalues >= -2 * tau) & (rep.eigenvalues <= -tau / 2)]
    if len(close):
        raise AmbiguousIndexError(
            f"eigenvalue {close[0]:.3e} lies within [-2 tau, -tau/2] of the zero threshold tau={tau:.1e}; "
            "adjust the threshold"
        )


def _require_reducible(c: Configuration):
    nrm = np.sqrt(spinor_norm_sq(c))
    if nrm > REDUCIBLE_TOL:
        raise SpectralError(f"configuration is not reducible: ||phi|| = {nrm:.3e}")


def spectrum(op: RealOperator, tau: float | None = None, solver: str = "auto", k: int | None = None, seed: int = 0):
    if solver == "auto":
        solver = "dense" if op.dim <= DENSE_MAX_DIM else "lanczos"
    if solver == "dense":
        return dense_spectrum(op, tau)
    if solver == "lanczos":
        tau = default_threshold(op) if tau is None else tau
        if k is None:
            return lowest_through(op, tau, tau, seed=seed)
        return lanczos_lowest(op, k, seed=seed, tau=tau)
    raise ValueError(f"unknown solver {solver!r}")


@lru_cache(maxsize=16)
def assert_connection_block_psd(n: int, h: float) -> float:
    """One-time check that d*d contributes nothing negative; returns its lowest eigenvalue."""
    op = dstard_operator(Lattice(n, h))
    low = float(spectrum(op, solver="auto", k=1).eigenvalues[0])
    if low < -default_threshold(op):
        raise SpectralError(f"d*d has a negative eigenvalue {low:.3e}")
    return low


def morse_index(c: Configuration, tau: float | None = None, solver: str = "auto", seed: int = 0) -> SpectralReport:
    """Real dimension of the negative eigenspace of L_A at a reducible point."""
    _require_reducible(c)
    assert_connection_block_psd(c.lattice.n, c.lattice.h)
    op = la_operator(c)
    rep = spectrum(op, tau, solver, seed=seed)
    _check_ambiguous(rep)
    if rep.gap_eigenvalue is None and not rep.complete:
        raise SpectralError("no eigenvalue above the zero threshold was computed; index not certified")
    return rep


def spectrum_bounded_below_check(c: Configuration, probe_count: int = 16, solver: str = "auto", seed: int = 0) -> float:
    """min(kg)/4 bounds spec(L_A) from below because Delta_A is a Gram form."""
    _require_reducible(c)
    bound = float(np.min(c.bundle.kg)) / 4
    op = la_operator(c)
    if solver == "auto":
        solver = "dense" if op.dim <= DENSE_MAX_DIM else "lanczos"
    rep = dense_spectrum(op) if solver == "dense" else lanczos_lowest(op, min(probe_count, op.dim), seed=seed)
    if rep.eigenvalues.min() < bound - 1e-10:
        raise SpectralError(f"eigenvalue {rep.eigenvalues.min():.3e} below certified bound {bound:.3e}")
    return bound


@dataclass(frozen=True)
class ReducibleKernel:
    connection: int  # harmonic 1-forms: kernel of d*d on the Coulomb slice
    spinor: int  # kernel of L_A, real dimension
    morse_index: int

    @property
    def total(self) -> int:
        return self.connection + self.spinor


def reducible_kernel(c: Configuration, tau: float | None = None, solver: str = "auto") -> ReducibleKernel:
    rep = morse_index(c, tau, solver)
    conn = spectrum(hodge1_operator(c.lattice), solver=solver)
    if not conn.complete and conn.gap_eigenvalue is None:
        raise SpectralError("connection kernel not certified")
    return ReducibleKernel(conn.kernel_dim, rep.kernel_dim, rep.morse_index)
