"""Matrix-free second variation of the SW functional.

`HessianOperator.apply` is the exact second derivative of `sw_eval` with
respect to the real inner products on 1-cochains and spinors. In block form

    theta-block : 1/2 (d*d + 4 Phi*Phi) + C
    off-diagonal: 2 P  (theta <- v),  2 Q = 2 P^T  (v <- theta)
    v-block     : 2 (Delta_A + 1/2 Re<phi, .> phi + (kg + |phi|^2)/4)

C is the diagonal compact-link term -2 h Re<grad_A phi, U phi(x+mu)>_e, an
O(h) lattice artifact that vanishes at phi = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fields import (
    Configuration,
    covariant_derivative,
    covariant_derivative_adjoint,
    spinor_inner,
    transported_head,
    transports,
)
from .lattice import DIM, d, d_star, inner, shift

REDUCIBLE_TOL = 1e-12

# Prefactors of the connection and spinor blocks relative to the bare
# operators d*d and L_A (the 1/2 and 2 of the first variations d_1, d_2).
CONNECTION_SCALE = 0.5
SPINOR_SCALE = 2.0


@dataclass(frozen=True)
class TangentVector:
    theta: np.ndarray
    v: np.ndarray

    def __add__(self, other):
        return TangentVector(self.theta + other.theta, self.v + other.v)

    def __sub__(self, other):
        return TangentVector(self.theta - other.theta, self.v - other.v)

    def __mul__(self, s):
        return TangentVector(s * self.theta, s * self.v)

    __rmul__ = __mul__


def tangent_inner(lat, s: TangentVector, t: TangentVector) -> float:
    return inner(lat, s.theta, t.theta) + spinor_inner(lat, s.v, t.v)


def tangent_norm(lat, t: TangentVector) -> float:
    return float(np.sqrt(tangent_inner(lat, t, t)))


class HessianOperator:
    """Second variation at a fixed base configuration. Immutable after construction."""

    def __init__(self, base: Configuration):
        self.base = base
        self.lattice = base.lattice
        self._U = transports(base)
        self._U.setflags(write=False)
        self._head = transported_head(base, base.phi, self._U)
        self._grad_phi = covariant_derivative(base, base.phi, self._U)
        self.rho = np.sum(np.abs(base.phi) ** 2, axis=-1)
        self.kg = base.bundle.kg
        self._head_rho = np.sum(np.abs(self._head) ** 2, axis=-1)
        self._link = -2 * self.lattice.h * np.sum(np.conj(self._grad_phi) * self._head, axis=-1).real

    @property
    def is_reducible(self) -> bool:
        return spinor_norm_sq(self.base) <= REDUCIBLE_TOL**2

    # -- building blocks -----------------------------------------------------

    def phi_op(self, theta):
        return 1j * theta[..., None] * self._head

    def phi_adj(self, w):
        return np.sum(np.conj(self._head) * w, axis=-1).imag

    def P(self, v: np.ndarray) -> np.ndarray:
        """W*(grad_A phi) + Phi*(grad_A v)."""
        head_v = transported_head(self.base, v, self._U)
        w_adj = np.sum(np.conj(head_v) * self._grad_phi, axis=-1).imag
        return w_adj + self.phi_adj(covariant_derivative(self.base, v, self._U))

    def Q(self, theta: np.ndarray) -> np.ndarray:
        """Exact adjoint of P."""
        z = -1j * theta[..., None] * np.conj(self._U[..., None]) * self._grad_phi
        out = sum(shift(z[..., mu, :], mu, -1) for mu in range(DIM))
        return out + covariant_derivative_adjoint(self.base, self.phi_op(theta), self._U)

    def connection_block(self, theta: np.ndarray) -> np.ndarray:
        """d*d + 4 Phi*Phi (bare, without the 1/2 prefactor)."""
        lat = self.lattice
        return d_star(lat, d(lat, theta)) + 4 * self._head_rho * theta

    def spinor_block(self, v: np.ndarray) -> np.ndarray:
        """Delta_A v + 1/2 Re<phi, v> phi + (kg + |phi|^2)/4 v (bare)."""
        phi = self.base.phi
        re = np.sum(np.conj(phi) * v, axis=-1).real
        lap = covariant_derivative_adjoint(self.base, covariant_derivative(self.base, v, self._U), self._U)
        return lap + 0.5 * re[..., None] * phi + ((self.kg + self.rho) / 4)[..., None] * v

    def L_A(self, v: np.ndarray) -> np.ndarray:
        """Delta_A + kg/4."""
        lap = covariant_derivative_adjoint(self.base, covariant_derivative(self.base, v, self._U), self._U)
        return lap + (self.kg / 4)[..., None] * v

    # -- full operator -------------------------------------------------------

    def apply(self, t: TangentVector) -> TangentVector:
        lat = self.lattice
        if t.theta.shape != lat.cochain_shape(1) or t.v.shape != lat.shape + (2,):
            raise ValueError("tangent vector does not match the base lattice")
        theta = CONNECTION_SCALE * self.connection_block(t.theta) + self._link * t.theta
        theta = theta + 2 * self.P(t.v)
        v = 2 * self.Q(t.theta) + SPINOR_SCALE * self.spinor_block(t.v)
        return TangentVector(theta, v)

    __call__ = apply

    def quadratic_form(self, t: TangentVector) -> float:
        return tangent_inner(self.lattice, t, self.apply(t))

    # -- flat real vectors ---------------------------------------------------

    @property
    def dim(self) -> int:
        return self.lattice.n_edges + 4 * self.lattice.n_sites

    def unflatten(self, x: np.ndarray) -> TangentVector:
        ne = self.lattice.n_edges
        theta = x[:ne].reshape(self.lattice.cochain_shape(1))
        v = np.ascontiguousarray(x[ne:]).view(complex).reshape(self.lattice.shape + (2,))
        return TangentVector(theta, v)

    @staticmethod
    def flatten(t: TangentVector) -> np.ndarray:
        return np.concatenate([t.theta.ravel(), np.ascontiguousarray(t.v).view(float).ravel()])

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.flatten(self.apply(self.unflatten(x)))

    def dense(self, max_dim: int = 1300) -> np.ndarray:
        """Materialize the operator (verification path, N <= 3)."""
        if self.dim > max_dim:
            raise ValueError(f"dense Hessian limited to dim <= {max_dim}, got {self.dim}")
        eye = np.eye(self.dim)
        return np.stack([self.matvec(e) for e in eye], axis=1)


def spinor_norm_sq(c: Configuration) -> float:
    return spinor_inner(c.lattice, c.phi, c.phi)


def hessian_apply(H: HessianOperator, t: TangentVector) -> TangentVector:
    return H.apply(t)


def hessian_quadratic_form(H: HessianOperator, t: TangentVector) -> float:
    return H.quadratic_form(t)


def reducible_quadratic_form(c: Configuration, t: TangentVector) -> float:
    """||d theta||^2 + ||grad_A v||^2 + sum (kg/4)|v|^2, weighted by the block prefactors."""
    lat = c.lattice
    dtheta = d(lat, t.theta)
    cov = covariant_derivative(c, t.v)
    pot = lat.weight * np.sum(c.bundle.kg[..., None] * np.abs(t.v) ** 2) / 4
    return CONNECTION_SCALE * inner(lat, dtheta, dtheta) + SPINOR_SCALE * (
        float(lat.weight * np.sum(np.abs(cov) ** 2)) + float(pot)
    )


@dataclass(frozen=True)
class ReducibleBlocks:
    """Decoupled blocks at (A, 0): hessian = (connection_scale * d*d, spinor_scale * L_A)."""

    connection: Callable[[np.ndarray], np.ndarray]
    spinor: Callable[[np.ndarray], np.ndarray]
    connection_scale: float = CONNECTION_SCALE
    spinor_scale: float = SPINOR_SCALE


def reducible_blocks(H: HessianOperator) -> ReducibleBlocks:
    nrm = np.sqrt(spinor_norm_sq(H.base))
    if nrm > REDUCIBLE_TOL:
        raise ValueError(f"base point is not reducible: ||phi|| = {nrm:.3e} > {REDUCIBLE_TOL}")
    lat = H.lattice
    return ReducibleBlocks(lambda theta: d_star(lat, d(lat, theta)), H.L_A)


def gradient_fd_directional(c: Configuration, t: TangentVector, step: float = 1e-5) -> TangentVector:
    """Central difference of sw_gradient along t (oracle for `apply`)."""
    from .functional import sw_gradient

    gp = sw_gradient(c.with_fields(a=c.a + step * t.theta, phi=c.phi + step * t.v))
    gm = sw_gradient(c.with_fields(a=c.a - step * t.theta, phi=c.phi - step * t.v))
    return TangentVector((gp.grad_a - gm.grad_a) / (2 * step), (gp.grad_phi - gm.grad_phi) / (2 * step))
