"""Gauge potentials, spinor fields, Spin^c bundle data and the gauge action.

The connection is A = i*a with a a real 1-cochain. Spinors are complex
arrays of shape (N, N, N, N, 2); spinor-valued 1-cochains have shape
(N, N, N, N, 4, 2). Link transports are compact,

    U_e = exp(i h (a_e + t_e)),

where t is a fixed background twist carrying the flux integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .lattice import DIM, PLANES, Lattice, d, shift

Flux = tuple[int, int, int, int, int, int]


def alpha_pairing(flux) -> int:
    """Intersection pairing of the class with itself on T^4."""
    m01, m02, m03, m12, m13, m23 = (int(m) for m in flux)
    return 2 * (m01 * m23 - m02 * m13 + m03 * m12)


@dataclass(frozen=True)
class BundleData:
    flux: Flux
    kg: np.ndarray  # 0-cochain, units 1/length^2

    def __post_init__(self):
        flux = tuple(int(m) for m in self.flux)
        if len(flux) != 6:
            raise ValueError(f"flux needs six integers (m01 m02 m03 m12 m13 m23), got {len(flux)}")
        object.__setattr__(self, "flux", flux)
        kg = np.asarray(self.kg, dtype=float)
        if kg.ndim != DIM:
            raise ValueError("kg must be a 0-cochain")
        if not np.all(np.isfinite(kg)):
            raise ValueError("kg must be finite")
        object.__setattr__(self, "kg", kg)

    @property
    def alpha_squared(self) -> int:
        return alpha_pairing(self.flux)

    @classmethod
    def constant(cls, lat: Lattice, kg: float = 0.0, flux=(0,) * 6) -> BundleData:
        return cls(tuple(flux), np.full(lat.shape, float(kg)))


@dataclass(frozen=True)
class Configuration:
    lattice: Lattice
    a: np.ndarray
    phi: np.ndarray
    bundle: BundleData

    def __post_init__(self):
        lat = self.lattice
        if self.a.shape != lat.cochain_shape(1):
            raise ValueError(f"a has shape {self.a.shape}, expected {lat.cochain_shape(1)}")
        if self.phi.shape != lat.shape + (2,):
            raise ValueError(f"phi has shape {self.phi.shape}, expected {lat.shape + (2,)}")
        if self.bundle.kg.shape != lat.shape:
            raise ValueError("kg field does not match the lattice")
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        object.__setattr__(self, "phi", np.asarray(self.phi, dtype=complex))

    @classmethod
    def zero(cls, lat: Lattice, kg: float = 0.0, flux=(0,) * 6) -> Configuration:
        return cls(lat, lat.zeros(1), lat.spinor_zeros(), BundleData.constant(lat, kg, flux))

    def with_fields(self, a=None, phi=None) -> Configuration:
        return replace(self, a=self.a if a is None else a, phi=self.phi if phi is None else phi)


@dataclass(frozen=True)
class GaugeTransform:
    """g(x) = exp(i chi(x)) times an optional winding exp(2 pi i w.x / N).

    chi is a real 0-cochain and is not reduced mod 2 pi: it shifts a by d(chi).
    The winding integers realize large gauge transformations, which shift a by
    the integral harmonic cochain 2 pi w_mu / (N h) on direction-mu edges.
    """

    chi: np.ndarray
    winding: tuple[int, int, int, int] = field(default=(0, 0, 0, 0))

    def __post_init__(self):
        object.__setattr__(self, "chi", np.asarray(self.chi, dtype=float))
        object.__setattr__(self, "winding", tuple(int(w) for w in self.winding))
        if len(self.winding) != DIM:
            raise ValueError("winding needs four integers")

    @classmethod
    def identity(cls, lat: Lattice) -> GaugeTransform:
        return cls(lat.zeros(0))

    @classmethod
    def large(cls, lat: Lattice, mu: int, sign: int = 1) -> GaugeTransform:
        w = [0] * DIM
        w[mu] = sign
        return cls(lat.zeros(0), tuple(w))

    def phase(self, lat: Lattice) -> np.ndarray:
        """Total phase angle per site (meaningful mod 2 pi)."""
        x = lat.coords()
        return self.chi + 2 * np.pi * (x @ np.asarray(self.winding, dtype=float)) / lat.n

    def connection_shift(self, lat: Lattice) -> np.ndarray:
        return d(lat, self.chi) + 2 * np.pi * np.asarray(self.winding, dtype=float) / (lat.n * lat.h)

    def compose(self, other: GaugeTransform) -> GaugeTransform:
        return GaugeTransform(
            self.chi + other.chi, tuple(u + v for u, v in zip(self.winding, other.winding))
        )


def gauge_apply(g: GaugeTransform, c: Configuration) -> Configuration:
    lat = c.lattice
    if g.chi.shape != lat.shape:
        raise ValueError("gauge transform lives on a different lattice")
    a = c.a + g.connection_shift(lat)
    phi = np.exp(-1j * g.phase(lat))[..., None] * c.phi
    return c.with_fields(a=a, phi=phi)


def gauge_spinor(g: GaugeTransform, lat: Lattice, psi: np.ndarray) -> np.ndarray:
    """Action of g on a spinor (or spinor-valued 1-cochain) at the tail site."""
    ph = np.exp(-1j * g.phase(lat))
    return ph.reshape(ph.shape + (1,) * (psi.ndim - DIM)) * psi


# -- background twist --------------------------------------------------------


@lru_cache(maxsize=64)
def _twist_angles(n: int, flux: Flux) -> np.ndarray:
    theta = np.zeros((n,) * DIM + (DIM,))
    x = np.stack(np.meshgrid(*(np.arange(n),) * DIM, indexing="ij"), axis=-1)
    for (mu, nu), m in zip(PLANES, flux):
        if m == 0:
            continue
        beta = 2 * np.pi * m / n**2
        theta[..., nu] += beta * x[..., mu]
        boundary = x[..., mu] == n - 1
        theta[..., mu] -= np.where(boundary, beta * n * x[..., nu], 0.0)
    theta.setflags(write=False)
    return theta


def twist_angles(lat: Lattice, flux) -> np.ndarray:
    """Per-edge twist phase h*t_e ('t Hooft twist, one plane at a time)."""
    return _twist_angles(lat.n, tuple(int(m) for m in flux))


def twist_potential(lat: Lattice, flux) -> np.ndarray:
    return twist_angles(lat, flux) / lat.h


def twist_curvature(lat: Lattice, flux) -> np.ndarray:
    """Uniform background field 2 pi m_{mu nu} / (N h)^2 on each plane."""
    f = np.empty(lat.cochain_shape(2))
    for p, m in enumerate(flux):
        f[..., p] = 2 * np.pi * int(m) / (lat.n * lat.h) ** 2
    return f


def twist_plaquette_curvature(lat: Lattice, flux) -> np.ndarray:
    """Plaquette angles of the twist, wrapped to (-pi, pi], divided by h^2."""
    ang = d(lat, twist_potential(lat, flux)) * lat.h**2
    return np.angle(np.exp(1j * ang)) / lat.h**2


def curvature(c: Configuration) -> np.ndarray:
    """F = d(a) + background twist curvature."""
    return d(c.lattice, c.a) + twist_curvature(c.lattice, c.bundle.flux)


# -- covariant calculus ------------------------------------------------------


def transports(c: Configuration) -> np.ndarray:
    lat = c.lattice
    return np.exp(1j * (lat.h * c.a + twist_angles(lat, c.bundle.flux)))


def spinor_inner(lat: Lattice, u: np.ndarray, v: np.ndarray) -> float:
    """Real L2 pairing Re<u, v> with weight h^4."""
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    return float(lat.weight * np.vdot(u, v).real)


def spinor_norm(lat: Lattice, u: np.ndarray) -> float:
    return float(np.sqrt(spinor_inner(lat, u, u)))


def transported_head(c: Configuration, psi: np.ndarray, U=None) -> np.ndarray:
    """U_e psi(x + mu) for every edge e = (x, mu)."""
    if U is None:
        U = transports(c)
    return np.stack([U[..., mu, None] * shift(psi, mu) for mu in range(DIM)], axis=-2)


def covariant_derivative(c: Configuration, psi: np.ndarray, U=None) -> np.ndarray:
    """(U_e psi(x + mu) - psi(x)) / h, covariant at the tail site."""
    if psi.shape != c.lattice.shape + (2,):
        raise ValueError("spinor does not match the lattice")
    return (transported_head(c, psi, U) - psi[..., None, :]) / c.lattice.h


def covariant_derivative_adjoint(c: Configuration, w: np.ndarray, U=None) -> np.ndarray:
    if U is None:
        U = transports(c)
    h = c.lattice.h
    out = np.zeros(c.lattice.shape + (2,), dtype=complex)
    for mu in range(DIM):
        out += shift(np.conj(U[..., mu, None]) * w[..., mu, :], mu, -1) - w[..., mu, :]
    return out / h


def laplacian_A(c: Configuration, psi: np.ndarray, U=None) -> np.ndarray:
    if U is None:
        U = transports(c)
    return covariant_derivative_adjoint(c, covariant_derivative(c, psi, U), U)
