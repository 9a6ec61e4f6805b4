"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import json
import time

import numpy as np
import pytest

from swlattice import cli
from swlattice.checks import (
    gradient_check,
    hessian_fd_error,
    hessian_symmetry_defect,
    random_configuration,
    random_tangent,
    smooth_configuration,
)
from swlattice.fields import (
    BundleData,
    Configuration,
    GaugeTransform,
    curvature,
    gauge_apply,
    spinor_norm,
)
from swlattice.flow import FlowParams, descend
from swlattice.functional import monopole_residual, residual_energy, sw_eval
from swlattice.hessian import (
    HessianOperator,
    TangentVector,
    reducible_quadratic_form,
    spinor_norm_sq,
)
from swlattice.hodge import betti_1, hodge_split, jacobian_coordinates
from swlattice.lattice import Lattice, d_star, inner, laplacian_eigenvalues, norm
from swlattice.snapshot import load_snapshot, save_snapshot
from swlattice.spectral import (
    dense_spectrum,
    la_operator,
    lanczos_lowest,
    morse_index,
    reducible_kernel,
)


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}", flush=True)
        return ok

    return emit


def _reducible(lat, rng, kg, harmonic=None):
    a = np.broadcast_to(rng.uniform(-1, 1, 4) if harmonic is None else harmonic, lat.cochain_shape(1)).copy()
    kg = np.full(lat.shape, kg) if np.isscalar(kg) else kg
    return Configuration(lat, a, lat.spinor_zeros(), BundleData((0,) * 6, kg))


def test_criterion_01_gradient(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    errs = []
    for n in (2, 3):
        lat = Lattice(n, 0.8)
        for i in range(20):
            flux = (0,) * 6 if i % 2 else tuple(int(m) for m in rng.integers(-1, 2, 6))
            c = random_configuration(lat, rng, 0.5, flux)
            errs.append(gradient_check(c, rng, directions=1, step=1e-5))
    dt = time.perf_counter() - t0
    ok = max(errs) <= 1e-6 and dt < 10
    assert verdict(1, "gradient correctness", ok, f"max rel err {max(errs):.2e} (<= 1e-6), {dt:.1f} s (< 10 s)")


def test_criterion_02_hessian(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    lat = Lattice(2, 0.9)
    sym = fd = 0.0
    for _ in range(5):
        c = random_configuration(lat, rng, 0.6, (0, 1, 0, 0, 0, 0))
        sym = max(sym, hessian_symmetry_defect(c, rng, pairs=20))
        fd = max(fd, hessian_fd_error(c, rng))
    off = eq87 = 0.0
    for _ in range(10):
        c = _reducible(lat, rng, rng.uniform(-2, 2, lat.shape))
        H = HessianOperator(c)
        t = random_tangent(lat, rng)
        off = max(off, np.max(np.abs(H.apply(TangentVector(t.theta, lat.spinor_zeros())).v)))
        off = max(off, np.max(np.abs(H.apply(TangentVector(lat.zeros(1), t.v)).theta)))
        q = H.quadratic_form(t)
        eq87 = max(eq87, abs(q - reducible_quadratic_form(c, t)) / abs(q))
    dt = time.perf_counter() - t0
    ok = sym <= 1e-11 and fd <= 1e-5 and off <= 1e-13 and eq87 <= 1e-12 and dt < 30
    detail = f"symmetry {sym:.1e}, FD {fd:.1e}, off-diagonal at phi=0 {off:.1e}, reducible form {eq87:.1e}, {dt:.1f} s"
    assert verdict(2, "Hessian correctness", ok, detail)


def test_criterion_03_closed_form_spectrum(verdict):
    errs = []
    for c in (-1.0, 0.0, 1.5):
        lat = Lattice(2, 1.0)
        exact = np.sort(np.repeat(laplacian_eigenvalues(lat) + c / 4, 4))
        errs.append(np.max(np.abs(dense_spectrum(la_operator(Configuration.zero(lat, c))).eigenvalues - exact)))
    lat6 = Lattice(6, 1.0)
    exact6 = np.sort(np.repeat(laplacian_eigenvalues(lat6) - 0.25, 4))[:10]
    got6 = lanczos_lowest(la_operator(Configuration.zero(lat6, -1.0)), 10).eigenvalues
    errs.append(np.max(np.abs(got6 - exact6)))
    ok = max(errs) <= 1e-10
    assert verdict(3, "closed-form spectrum", ok, f"max abs err {max(errs):.1e} (N=2 dense, N=6 Lanczos lowest 10)")


def test_criterion_04_morse_index(verdict):
    neg = Configuration.zero(Lattice(2, 1.0), -1.0)
    dense = morse_index(neg, solver="dense").morse_index
    lanczos = morse_index(neg, solver="lanczos").morse_index
    pos = reducible_kernel(Configuration.zero(Lattice(2, 1.0), 1.0))
    flat = reducible_kernel(Configuration.zero(Lattice(2, 1.0), 0.0))
    b1 = betti_1(Lattice(2, 1.0))
    ok = dense == lanczos == 4 and pos.morse_index == 0 and pos.total == 4 == b1 and flat.total == 8
    detail = (f"kg=-1 index {dense} dense / {lanczos} Lanczos; kg=+1 index {pos.morse_index}, kernel {pos.total} "
              f"(b1={b1}); kg=0 kernel {flat.total}")
    assert verdict(4, "Morse index instance", ok, detail)


def test_criterion_05_boundedness(verdict):
    rng = np.random.default_rng(505)
    lat = Lattice(2, 1.0)
    worst = np.inf
    stable = True
    counts = []
    for _ in range(10):
        kg = rng.uniform(-12, 1, lat.shape)
        c = _reducible(lat, rng, kg)
        ev = dense_spectrum(la_operator(c)).eigenvalues
        worst = min(worst, ev.min() - kg.min() / 4)
        tau = 1e-8 * 17
        i1 = morse_index(c, tau).morse_index
        i2 = morse_index(c, tau / 2).morse_index
        stable &= i1 == i2
        counts.append(i1)
    ok = worst >= -1e-10 and stable
    assert verdict(5, "finiteness and lower bound", ok, f"min(eig - min(kg)/4) = {worst:.2e}, indices {counts} stable under tau/2: {stable}")


def test_criterion_06_hodge_jacobian(verdict):
    rng = np.random.default_rng(606)
    b1 = [betti_1(Lattice(n, 1.0)) for n in (2, 3)]
    lat = Lattice(3, 0.8)
    ortho = 0.0
    for _ in range(5):
        a = rng.standard_normal(lat.cochain_shape(1))
        s = hodge_split(lat, a)
        scale = norm(lat, a) ** 2
        for u, v in [(s.exact, s.coexact), (s.exact, s.harmonic), (s.coexact, s.harmonic)]:
            ortho = max(ortho, abs(inner(lat, u, v)) / scale)
    c = _reducible(lat, rng, 1.0)
    p0 = jacobian_coordinates(c)
    drift = max(
        p0.distance(jacobian_coordinates(gauge_apply(GaugeTransform.large(lat, mu, s), c)))
        for mu in range(4)
        for s in (1, -1)
    )
    ok = b1 == [4, 4] and ortho <= 1e-10 and drift <= 1e-10
    assert verdict(6, "Hodge / Jacobian", ok, f"b1 {b1}, orthogonality {ortho:.1e}, winding drift {drift:.1e}")


def test_criterion_07_gauge_invariance(verdict):
    rng = np.random.default_rng(707)
    lat = Lattice(3, 0.8)
    c = random_configuration(lat, rng, 0.6, (1, 0, 0, 0, 0, -1))
    e0 = sw_eval(c).total
    f0, s0 = monopole_residual(c)
    r0 = np.hypot(norm(lat, f0), spinor_norm(lat, s0))
    red = _reducible(Lattice(2, 1.0), rng, -6.0)
    m0 = morse_index(red).morse_index
    j0 = jacobian_coordinates(red)
    de = dr = dj = 0.0
    same_index = True
    for _ in range(50):
        g = GaugeTransform(rng.uniform(-6, 6, lat.shape), tuple(int(w) for w in rng.integers(-2, 3, 4)))
        cg = gauge_apply(g, c)
        de = max(de, abs(sw_eval(cg).total - e0) / abs(e0))
        f1, s1 = monopole_residual(cg)
        dr = max(dr, abs(np.hypot(norm(lat, f1), spinor_norm(lat, s1)) - r0) / r0)
        gr = GaugeTransform(rng.uniform(-6, 6, red.lattice.shape), tuple(int(w) for w in rng.integers(-2, 3, 4)))
        rg = gauge_apply(gr, red)
        same_index &= morse_index(rg).morse_index == m0
        dj = max(dj, j0.distance(jacobian_coordinates(rg)))
    ok = de <= 1e-12 and dr <= 1e-12 and same_index and dj <= 1e-12
    detail = f"energy {de:.1e}, residual {dr:.1e}, Morse index fixed at {m0}: {same_index}, Jacobian {dj:.1e}"
    assert verdict(7, "gauge invariance", ok, detail)


def test_criterion_08_weitzenbock_convergence(verdict):
    # |SW - (||D+ phi||^2 + ||F+ - iota sigma||^2 + pi^2 alpha^2)| must shrink by >= 1.5 per refinement
    t0 = time.perf_counter()
    defects = []
    for n in (4, 8, 16):
        c = smooth_configuration(n, 8.0)
        rhs = residual_energy(c) + np.pi**2 * c.bundle.alpha_squared
        defects.append(abs(sw_eval(c).total - rhs))
    ratios = [defects[i] / defects[i + 1] for i in range(2)]
    dt = time.perf_counter() - t0
    ok = all(r >= 1.5 for r in ratios) and dt < 120
    detail = f"|defect| {[round(x, 3) for x in defects]}, ratios {[round(r, 3) for r in ratios]} (need >= 1.5), {dt:.1f} s"
    assert verdict(8, "Weitzenboeck identity convergence", ok, detail)


def test_criterion_09_flow_shadow(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(909)
    lat = Lattice(4, 1.0)
    params = FlowParams(grad_tol=1e-10, max_iters=20_000)
    converged, phi_max, dsf_max = 0, 0.0, 0.0
    for _ in range(20):
        c = random_configuration(lat, rng, 0.2, kg=1.0)
        tr = descend(c, params)
        if tr.status != "converged":
            continue
        converged += 1
        T = tr.terminal
        phi_max = max(phi_max, np.sqrt(spinor_norm_sq(T)))
        dsf_max = max(dsf_max, norm(lat, d_star(lat, curvature(T))))
    small = Lattice(2, 1.0)
    phi = small.spinor_zeros()
    phi[..., 0] = 1e-3
    start = Configuration(small, small.zeros(1), phi + 1e-4 * rng.standard_normal(phi.shape), BundleData.constant(small, -1.0))
    escaped = np.sqrt(spinor_norm_sq(descend(start, FlowParams(max_iters=5000, grad_tol=1e-9)).terminal))
    dt = time.perf_counter() - t0
    ok = converged > 0 and phi_max <= 1e-6 and dsf_max <= 1e-8 and escaped > 0.1 and dt < 300
    detail = (f"kg=+1: {converged}/20 converged, max ||phi|| {phi_max:.1e}, max ||d*F|| {dsf_max:.1e}; "
              f"kg=-1 terminal ||phi|| {escaped:.2f}; {dt:.0f} s")
    assert verdict(9, "flow shadow", ok, detail)


def test_criterion_10_persistence(verdict, tmp_path):
    rng = np.random.default_rng(1010)
    c = random_configuration(Lattice(3, 0.45), rng, 0.8, (0, 0, 1, -1, 0, 0))
    back = load_snapshot(save_snapshot(c, tmp_path / "snap"))
    bitwise = all(x.tobytes() == y.tobytes() for x, y in [(back.a, c.a), (back.phi, c.phi), (back.bundle.kg, c.bundle.kg)])
    outputs = []
    for run in ("r1", "r2"):
        for cmd in (["grad-check", "--set", "samples=3"], ["eval", "--set", "random=true"]):
            assert cli.main(cmd + ["--n", "2", "--seed", "5", "--out", str(tmp_path / run)]) == 0
        outputs.append([(tmp_path / run / f).read_bytes() for f in ("grad-check.json", "eval.json")])
    same = outputs[0] == outputs[1]
    json.loads(outputs[0][0])
    ok = bitwise and same
    assert verdict(10, "persistence", ok, f"snapshot bitwise {bitwise}, reports byte-identical {same}")
