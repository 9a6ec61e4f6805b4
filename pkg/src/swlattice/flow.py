"""Gradient descent on configuration space and critical point classification."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .fields import Configuration
from .functional import sw_eval, sw_gradient
from .hessian import REDUCIBLE_TOL, spinor_norm_sq
from .hodge import betti_1, coulomb_gauge_fix
from .lattice import Lattice
from .spectral import reducible_kernel

log = logging.getLogger(__name__)

ARMIJO_C1 = 1e-4
BACKTRACK = 0.5


@dataclass(frozen=True)
class FlowParams:
    step: float = 0.05
    max_iters: int = 20_000
    grad_tol: float = 1e-10
    regauge_every: int = 0  # 0 disables Coulomb re-gauging
    seed: int = 0
    max_step: float = 1.0
    max_backtracks: int = 60

    def __post_init__(self):
        if not self.step > 0 or not self.max_step > 0:
            raise ValueError("step sizes must be positive")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.max_iters < 0 or self.regauge_every < 0:
            raise ValueError("iteration counts must be non-negative")


@dataclass
class FlowTrace:
    energy: list[float] = field(default_factory=list)
    grad_norm: list[float] = field(default_factory=list)
    phi_norm: list[float] = field(default_factory=list)
    step: list[float] = field(default_factory=list)
    regauged: list[bool] = field(default_factory=list)
    terminal: Configuration | None = None
    status: str = "max_iters"

    @property
    def iterations(self) -> int:
        return len(self.energy) - 1

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "iterations": self.iterations,
            "energy": self.energy,
            "grad_norm": self.grad_norm,
            "phi_norm": self.phi_norm,
            "step": self.step,
            "regauged": self.regauged,
        }


def rounding_slack(c: Configuration) -> float:
    """Size of floating point noise in sw_eval at c."""
    e = sw_eval(c)
    terms = e.as_dict()
    scale = sum(abs(v) for k, v in terms.items() if k != "total")
    return 64 * np.finfo(float).eps * max(scale, 1e-300)


def descend(c0: Configuration, p: FlowParams = FlowParams()) -> FlowTrace:
    """Backtracking (Armijo) gradient descent along -grad sw_eval."""
    lat = c0.lattice
    c = c0
    E = sw_eval(c).total
    g = sw_gradient(c)
    gn = g.norm(lat)
    tr = FlowTrace()

    def record(s, regauged):
        tr.energy.append(E)
        tr.grad_norm.append(gn)
        tr.phi_norm.append(float(np.sqrt(spinor_norm_sq(c))))
        tr.step.append(s)
        tr.regauged.append(regauged)

    record(0.0, False)
    step = p.step
    for it in range(p.max_iters):
        if gn <= p.grad_tol:
            tr.status = "converged"
            break
        s = step
        slack = rounding_slack(c)
        gt = None
        for _ in range(p.max_backtracks):
            trial = c.with_fields(a=c.a - s * g.grad_a, phi=c.phi - s * g.grad_phi)
            Et = sw_eval(trial).total
            # once the predicted decrease drowns in rounding noise the energy can
            # no longer rank steps; a decreasing gradient norm takes over
            noisy = ARMIJO_C1 * s * gn**2 <= slack
            if not noisy:
                if Et <= E - ARMIJO_C1 * s * gn**2:
                    break
            elif Et <= E + slack:
                gt = sw_gradient(trial)
                if gt.norm(lat) < gn:
                    break
                gt = None
            s *= BACKTRACK
        else:
            tr.status = "diverged"
            log.warning("flow: no acceptable step after %d backtracks at iteration %d", p.max_backtracks, it)
            break
        c, E = trial, Et
        regauged = bool(p.regauge_every) and (it + 1) % p.regauge_every == 0
        if regauged:
            c, _ = coulomb_gauge_fix(c)
            E = sw_eval(c).total
        g = gt if gt is not None and not regauged else sw_gradient(c)
        gn = g.norm(lat)
        record(s, regauged)
        step = s if noisy else min(2 * s, p.max_step)
    else:
        tr.status = "converged" if gn <= p.grad_tol else "max_iters"
    tr.terminal = c
    return tr


@dataclass(frozen=True)
class CriticalPoint:
    kind: str  # reducible_morse_bott | reducible_indexed | irreducible | not_critical
    index: int | None = None
    kernel_dim: int | None = None
    grad_norm: float = 0.0

    def __str__(self):
        if self.kind == "reducible_indexed":
            return f"reducible_indexed({self.index})"
        return self.kind


def classify_critical_point(
    c: Configuration, tau: float | None = None, grad_tol: float = 1e-8, phi_tol: float = REDUCIBLE_TOL
) -> CriticalPoint:
    """Classify c. A spinor with norm <= phi_tol is snapped to zero before the
    reducible analysis, so flow terminals (which only reach phi ~ grad_tol) can be
    passed with a looser phi_tol."""
    gn = sw_gradient(c).norm(c.lattice)
    if gn > grad_tol:
        return CriticalPoint("not_critical", grad_norm=gn)
    if np.sqrt(spinor_norm_sq(c)) > phi_tol:
        return CriticalPoint("irreducible", grad_norm=gn)
    ker = reducible_kernel(c.with_fields(phi=np.zeros_like(c.phi)), tau)
    if ker.morse_index == 0 and ker.total == betti_1_cached():
        return CriticalPoint("reducible_morse_bott", 0, ker.total, gn)
    return CriticalPoint("reducible_indexed", ker.morse_index, ker.total, gn)


@lru_cache(maxsize=None)
def betti_1_cached() -> int:
    # b_1 of the torus is independent of N; the dense count on N = 2 certifies it
    return betti_1(Lattice(2, 1.0))
