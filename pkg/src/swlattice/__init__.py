"""Lattice discretization of the Seiberg-Witten functional on a flat 4-torus.

Fields live on the periodic hypercubic lattice (Z/N)^4 with spacing h: the
connection a is a real 1-cochain, the spinor phi a C^2-valued 0-cochain, and
the line bundle is fixed by six 't Hooft flux integers.
"""

from .fields import BundleData, Configuration, GaugeTransform, alpha_pairing, curvature, gauge_apply
from .flow import CriticalPoint, FlowParams, FlowTrace, classify_critical_point, descend
from .functional import EnergyBreakdown, GradientPair, monopole_residual, residual_energy, sw_eval, sw_gradient
from .hessian import HessianOperator, TangentVector, reducible_blocks
from .hodge import HodgeSplit, betti_1, coulomb_gauge_fix, hodge_split, jacobian_coordinates
from .lattice import Lattice
from .snapshot import load_snapshot, save_snapshot
from .spectral import SpectralReport, morse_index, reducible_kernel, spectrum

__all__ = [
    "BundleData", "Configuration", "CriticalPoint", "EnergyBreakdown", "FlowParams", "FlowTrace",
    "GaugeTransform", "GradientPair", "HessianOperator", "HodgeSplit", "Lattice", "SpectralReport",
    "TangentVector", "alpha_pairing", "betti_1", "classify_critical_point", "coulomb_gauge_fix",
    "curvature", "descend", "gauge_apply", "hodge_split", "jacobian_coordinates", "load_snapshot",
    "monopole_residual", "morse_index", "reducible_blocks", "reducible_kernel", "residual_energy",
    "save_snapshot", "spectrum", "sw_eval", "sw_gradient",
]
