"""Verification harness shared by the CLI, the scripts and the test-suite."""

from __future__ import annotations

import numpy as np

from .fields import BundleData, Configuration
from .functional import directional_derivative_fd, sw_gradient, weitzenbock_defect
from .hessian import HessianOperator, TangentVector, gradient_fd_directional, tangent_inner, tangent_norm
from .lattice import Lattice, inner
from .fields import spinor_inner


def random_spinor(lat: Lattice, rng, amplitude: float = 1.0) -> np.ndarray:
    shape = lat.shape + (2,)
    return amplitude * (rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape))


def random_configuration(lat: Lattice, rng, amplitude: float = 0.5, flux=(0,) * 6, kg=None) -> Configuration:
    a = amplitude * rng.uniform(-1, 1, lat.cochain_shape(1))
    if kg is None:
        kg = rng.uniform(-2, 2, lat.shape)
    elif np.isscalar(kg):
        kg = np.full(lat.shape, float(kg))
    return Configuration(lat, a, random_spinor(lat, rng, amplitude), BundleData(tuple(flux), kg))


def random_tangent(lat: Lattice, rng) -> TangentVector:
    return TangentVector(rng.standard_normal(lat.cochain_shape(1)), random_spinor(lat, rng))


def gradient_check(c: Configuration, rng, directions: int = 20, step: float = 1e-5) -> float:
    """Max over random directions of |FD - <grad, t>| / (||grad|| ||t||)."""
    lat = c.lattice
    g = sw_gradient(c)
    gn = g.norm(lat)
    worst = 0.0
    for _ in range(directions):
        t = random_tangent(lat, rng)
        exact = inner(lat, g.grad_a, t.theta) + spinor_inner(lat, g.grad_phi, t.v)
        fd = directional_derivative_fd(c, t.theta, t.v, step)
        worst = max(worst, abs(fd - exact) / (gn * tangent_norm(lat, t)))
    return worst


def hessian_fd_error(c: Configuration, rng, step: float = 1e-5) -> float:
    """||FD of sw_gradient along t - H t|| / ||H t|| for one random t."""
    lat = c.lattice
    t = random_tangent(lat, rng)
    Ht = HessianOperator(c).apply(t)
    fd = gradient_fd_directional(c, t, step)
    return tangent_norm(lat, fd - Ht) / tangent_norm(lat, Ht)


def hessian_symmetry_defect(c: Configuration, rng, pairs: int = 100) -> float:
    """Max |<s, Ht> - <Hs, t>| / (||s|| ||t||)."""
    lat = c.lattice
    H = HessianOperator(c)
    worst = 0.0
    for _ in range(pairs):
        s, t = random_tangent(lat, rng), random_tangent(lat, rng)
        defect = abs(tangent_inner(lat, s, H.apply(t)) - tangent_inner(lat, H.apply(s), t))
        worst = max(worst, defect / (tangent_norm(lat, s) * tangent_norm(lat, t)))
    return worst


# -- Weitzenboeck refinement study ---------------------------------------------


def smooth_configuration(n: int, length: float = 8.0, amplitude: float = 0.3, flux=(0,) * 6) -> Configuration:
    """Fixed band-limited (lowest Fourier modes only) configuration on a torus of side `length`."""
    lat = Lattice(n, length / n)
    x = lat.coords() * lat.h
    k = 2 * np.pi / length
    a = np.zeros(lat.cochain_shape(1))
    a[..., 0] = 0.2 * np.sin(k * x[..., 1])
    a[..., 1] = 0.15 * np.cos(k * x[..., 2])
    a[..., 2] = 0.1 * np.sin(k * (x[..., 3] + x[..., 0]))
    a[..., 3] = 0.1 * np.sin(k * x[..., 0])
    phi = lat.spinor_zeros()
    phi[..., 0] = amplitude * (1 + 0.5 * np.cos(k * x[..., 0])) * np.exp(1j * k * x[..., 1])
    phi[..., 1] = 0.7 * amplitude * np.sin(k * (x[..., 2] + x[..., 3]))
    return Configuration(lat, a, phi, BundleData.constant(lat, 0.0, flux))


def quartic_integral(c: Configuration) -> float:
    rho = np.sum(np.abs(c.phi) ** 2, axis=-1)
    return float(c.lattice.weight * np.sum(rho**2))


def identity_study(sizes=(4, 8, 16), length: float = 8.0, amplitude: float = 0.3, flux=(0,) * 6) -> dict:
    """Weitzenboeck defect under refinement at fixed physical size."""
    defects, quartic = [], []
    for n in sizes:
        c = smooth_configuration(n, length, amplitude, flux)
        defects.append(weitzenbock_defect(c))
        quartic.append(quartic_integral(c))
    defects = np.array(defects)
    quartic = np.array(quartic)
    abs_def = np.abs(defects)
    return {
        "sizes": list(sizes),
        "defect": defects.tolist(),
        "abs_defect": abs_def.tolist(),
        "ratios": (abs_def[:-1] / abs_def[1:]).tolist(),
        # the defect tends to (1/8 - 1) * int |phi|^4, see README
        "quartic_integral": quartic.tolist(),
        "defect_minus_limit": (defects + 7 / 8 * quartic).tolist(),
    }
