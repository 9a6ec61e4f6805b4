"""The SW functional, the monopole map and the Euler-Lagrange gradient."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (
    Configuration,
    covariant_derivative,
    covariant_derivative_adjoint,
    curvature,
    laplacian_A,
    spinor_inner,
    transported_head,
    transports,
)
from .lattice import DIM, d_star, inner, self_dual, shift

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

# Chiral Clifford maps S+ -> S-: gamma_0 = 1, gamma_k = i sigma_k. With this
# sign the Weitzenboeck curvature term of D+ couples to the self-dual part in
# the frame convention of `lattice.self_dual`.
GAMMA = np.concatenate([np.eye(2, dtype=complex)[None], 1j * PAULI])

# iota sends sum_k c_k sigma_k to the self-dual form with omega_{0k} = IOTA_COEFF * c_k.
# 2 is the value for which the F+ / spinor cross terms of the Weitzenboeck
# identity cancel (frozen in tests/test_functional.py).
IOTA_COEFF = 2.0


@dataclass(frozen=True)
class EnergyBreakdown:
    curvature_term: float
    dirichlet_term: float
    quartic_term: float
    curvature_coupling_term: float
    topological_term: float

    @property
    def total(self) -> float:
        return (
            self.curvature_term
            + self.dirichlet_term
            + self.quartic_term
            + self.curvature_coupling_term
            + self.topological_term
        )

    def as_dict(self) -> dict:
        return {
            "curvature_term": self.curvature_term,
            "dirichlet_term": self.dirichlet_term,
            "quartic_term": self.quartic_term,
            "curvature_coupling_term": self.curvature_coupling_term,
            "topological_term": self.topological_term,
            "total": self.total,
        }


@dataclass(frozen=True)
class GradientPair:
    grad_a: np.ndarray
    grad_phi: np.ndarray

    def norm(self, lat) -> float:
        return float(np.sqrt(inner(lat, self.grad_a, self.grad_a) + spinor_inner(lat, self.grad_phi, self.grad_phi)))


def sw_eval(c: Configuration) -> EnergyBreakdown:
    lat = c.lattice
    w = lat.weight
    F = curvature(c)
    rho = np.sum(np.abs(c.phi) ** 2, axis=-1)
    grad = covariant_derivative(c, c.phi)
    return EnergyBreakdown(
        curvature_term=0.25 * inner(lat, F, F),
        dirichlet_term=float(w * np.sum(np.abs(grad) ** 2)),
        quartic_term=float(w * np.sum(rho**2) / 8),
        curvature_coupling_term=float(w * np.sum(c.bundle.kg * rho) / 4),
        topological_term=float(np.pi**2 * c.bundle.alpha_squared),
    )


def sigma_form(phi_site) -> np.ndarray:
    """sigma(phi) = phi phi^* - |phi|^2 / 2 I; works pointwise on (..., 2) arrays."""
    phi_site = np.asarray(phi_site, dtype=complex)
    outer = phi_site[..., :, None] * np.conj(phi_site[..., None, :])
    rho = np.sum(np.abs(phi_site) ** 2, axis=-1)
    return outer - 0.5 * rho[..., None, None] * np.eye(2)


def pauli_coefficients(m: np.ndarray) -> np.ndarray:
    """c_k with m = sum_k c_k sigma_k for traceless hermitian m, shape (..., 3)."""
    return 0.5 * np.einsum("kij,...ji->...k", PAULI, m).real


def iota(m: np.ndarray) -> np.ndarray:
    """Self-dual 2-cochain attached to a field of traceless hermitian 2x2 matrices."""
    ck = IOTA_COEFF * pauli_coefficients(m)
    out = np.empty(m.shape[:-2] + (6,))
    out[..., 0] = out[..., 5] = ck[..., 0]
    out[..., 1] = ck[..., 1]
    out[..., 4] = -ck[..., 1]
    out[..., 2] = out[..., 3] = ck[..., 2]
    return out


def dirac_plus(c: Configuration, psi: np.ndarray, U=None) -> np.ndarray:
    """Naive symmetric-difference Dirac operator S+ -> S- (doublers included)."""
    if psi.shape != c.lattice.shape + (2,):
        raise ValueError("dirac_plus expects a plus-chirality spinor field")
    if U is None:
        U = transports(c)
    h = c.lattice.h
    out = np.zeros_like(psi)
    for mu in range(DIM):
        fwd = U[..., mu, None] * shift(psi, mu)
        bwd = shift(np.conj(U[..., mu, None]) * psi, mu, -1)
        out += np.einsum("ij,...j->...i", GAMMA[mu], fwd - bwd)
    return out / (2 * h)


def monopole_residual(c: Configuration) -> tuple[np.ndarray, np.ndarray]:
    """(F+ - iota(sigma(phi)), D+ phi)."""
    first = self_dual(curvature(c)) - iota(sigma_form(c.phi))
    return first, dirac_plus(c, c.phi)


def self_dual_energy(lat, w: np.ndarray) -> float:
    """Norm squared on self-dual forms matched to the Clifford image: half the cochain norm."""
    return 0.5 * inner(lat, w, w)


def residual_energy(c: Configuration) -> float:
    """||D+ phi||^2 + |F+ - iota(sigma)|^2; the topological term rides inside |F+|^2."""
    lat = c.lattice
    first, second = monopole_residual(c)
    return spinor_inner(lat, second, second) + self_dual_energy(lat, first)


def weitzenbock_defect(c: Configuration) -> float:
    """sw_eval(c).total - residual_energy(c); kg should be 0 (flat torus)."""
    return sw_eval(c).total - residual_energy(c)


def phi_operator(c: Configuration, theta: np.ndarray, U=None) -> np.ndarray:
    """Linearization of the covariant derivative in a: i theta_e U_e phi(x + mu)."""
    head = transported_head(c, c.phi, U)
    return 1j * theta[..., None] * head


def phi_adjoint(c: Configuration, w: np.ndarray, U=None) -> np.ndarray:
    """Real adjoint of `phi_operator`."""
    head = transported_head(c, c.phi, U)
    return np.sum(np.conj(head) * w, axis=-1).imag


def sw_gradient(c: Configuration) -> GradientPair:
    """Riesz gradient of sw_eval for <.,.> on 1-cochains and Re<.,.> on spinors.

    grad_a   = 1/2 (d*F + 4 Phi*(grad_A phi))
    grad_phi = 2 (Delta_A phi + (|phi|^2 + kg)/4 phi)
    """
    lat = c.lattice
    U = transports(c)
    F = curvature(c)
    cov = covariant_derivative(c, c.phi, U)
    grad_a = 0.5 * (d_star(lat, F) + 4 * phi_adjoint(c, cov, U))
    rho = np.sum(np.abs(c.phi) ** 2, axis=-1)
    lap = covariant_derivative_adjoint(c, cov, U)
    grad_phi = 2 * (lap + ((rho + c.bundle.kg) / 4)[..., None] * c.phi)
    return GradientPair(grad_a, grad_phi)


def directional_derivative_fd(c: Configuration, theta, v, step: float = 1e-5) -> float:
    """Central finite difference of sw_eval along (theta, v)."""
    plus = c.with_fields(a=c.a + step * theta, phi=c.phi + step * v)
    minus = c.with_fields(a=c.a - step * theta, phi=c.phi - step * v)
    return (sw_eval(plus).total - sw_eval(minus).total) / (2 * step)


__all__ = [
    "EnergyBreakdown",
    "GradientPair",
    "GAMMA",
    "IOTA_COEFF",
    "dirac_plus",
    "iota",
    "laplacian_A",
    "monopole_residual",
    "phi_adjoint",
    "phi_operator",
    "residual_energy",
    "sigma_form",
    "sw_eval",
    "sw_gradient",
    "weitzenbock_defect",
]
