import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swlattice.lattice import (
    PLANES,
    Lattice,
    d,
    d_star,
    degree,
    hodge_laplacian,
    inner,
    laplacian_eigenvalues,
    norm,
    self_dual,
)


def test_counts_and_indexing():
    lat = Lattice(3, 0.5)
    assert (lat.n_sites, lat.n_edges, lat.n_plaquettes) == (81, 324, 486)
    assert lat.volume == pytest.approx(1.5**4)
    for i in [0, 17, 80]:
        assert lat.site_index(lat.site_coords(i)) == i
    for i in [0, 100, 323]:
        x, mu = lat.edge(i)
        assert lat.edge_index(x, mu) == i
    for i in [0, 200, 485]:
        x, (mu, nu) = lat.plaquette(i)
        assert lat.plaquette_index(x, mu, nu) == i


def test_invalid_lattice():
    with pytest.raises(ValueError):
        Lattice(1, 1.0)
    with pytest.raises(ValueError):
        Lattice(4, 0.0)


def test_degree_detection(lat2):
    assert degree(lat2.zeros(0)) == 0
    assert degree(lat2.zeros(1)) == 1
    assert degree(lat2.zeros(2)) == 2
    with pytest.raises(ValueError):
        d(lat2, np.zeros((2, 2, 2, 2, 3)))


def test_d_of_constant_vanishes(lat3):
    assert np.all(d(lat3, np.full(lat3.shape, 2.5)) == 0)


def test_d_squared(lat3, rng):
    chi = rng.standard_normal(lat3.shape)
    dd = d(lat3, d(lat3, chi))
    assert np.max(np.abs(dd)) <= 1e-13 * np.linalg.norm(chi) / lat3.h**2


def test_curl_formula(lat3, rng):
    a = rng.standard_normal(lat3.cochain_shape(1))
    F = d(lat3, a)
    x = (1, 2, 0, 1)
    for p, (mu, nu) in enumerate(PLANES):
        xm = list(x)
        xm[mu] = (xm[mu] + 1) % 3
        xn = list(x)
        xn[nu] = (xn[nu] + 1) % 3
        expect = (a[tuple(xm) + (nu,)] - a[x + (nu,)] - a[tuple(xn) + (mu,)] + a[x + (mu,)]) / lat3.h
        assert F[x + (p,)] == pytest.approx(expect, rel=1e-14)


@pytest.mark.parametrize("k", [1, 2])
def test_d_star_is_adjoint(lat3, rng, k):
    a = rng.standard_normal(lat3.cochain_shape(k - 1))
    f = rng.standard_normal(lat3.cochain_shape(k))
    lhs = inner(lat3, d(lat3, a), f)
    rhs = inner(lat3, a, d_star(lat3, f))
    assert abs(lhs - rhs) <= 1e-12 * norm(lat3, d(lat3, a)) * norm(lat3, f)


def test_d_star_zero(lat2):
    assert np.all(d_star(lat2, lat2.zeros(2)) == 0)


def test_inner_weights():
    lat = Lattice(2, 1.0)
    ones = np.ones(lat.shape)
    assert inner(lat, ones, ones) == 16
    assert inner(Lattice(2, 2.0), ones, ones) == 16 * 16
    with pytest.raises(ValueError):
        inner(lat, ones, lat.zeros(1))


def test_self_dual_single_plaquette(lat2):
    f = lat2.zeros(2)
    f[0, 0, 0, 0, 0] = 1.0
    fp = self_dual(f)
    assert fp[0, 0, 0, 0, 0] == 0.5 and fp[0, 0, 0, 0, 5] == 0.5
    assert np.count_nonzero(fp) == 2


@given(st.integers(0, 2**32 - 1))
def test_self_dual_projection(seed):
    lat = Lattice(2, 0.9)
    f = np.random.default_rng(seed).standard_normal(lat.cochain_shape(2))
    fp = self_dual(f)
    np.testing.assert_allclose(self_dual(fp), fp, atol=1e-15)
    assert abs(inner(lat, f - fp, fp)) <= 1e-12 * norm(lat, f) ** 2
    assert norm(lat, f) ** 2 == pytest.approx(norm(lat, fp) ** 2 + norm(lat, f - fp) ** 2, rel=1e-12)


@pytest.mark.parametrize("n,h", [(2, 1.0), (3, 0.5), (4, 1.3)])
def test_scalar_laplacian_closed_form(n, h):
    lat = Lattice(n, h)
    eye = np.eye(lat.n_sites)
    M = np.stack([hodge_laplacian(lat, e.reshape(lat.shape)).ravel() for e in eye], axis=1)
    np.testing.assert_allclose(np.linalg.eigvalsh(M), laplacian_eigenvalues(lat), atol=1e-10 / h**2)
