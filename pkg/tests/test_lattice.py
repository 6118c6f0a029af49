import numpy as np
import pytest

from ptssh import HybridChainSpec, build_hamiltonian, pt_symmetry_check


def test_matrix_shape_and_structure(small_chain):
    h = build_hamiltonian(small_chain)
    n = small_chain.n_sites
    assert h.shape == (n, n)
    assert h.dtype == np.complex128
    # strictly tridiagonal
    mask = np.ones_like(h, dtype=bool)
    for d in (-1, 0, 1):
        mask &= ~np.eye(n, k=d, dtype=bool)
    assert np.all(h[mask] == 0)


def test_alternating_hoppings(small_chain):
    h = build_hamiltonian(small_chain)
    off = np.diag(h, k=1)
    assert np.allclose(off[0::2], small_chain.v)
    assert np.allclose(off[1::2], small_chain.w)
    # hoppings are real and symmetric
    assert np.array_equal(np.diag(h, k=-1), off)
    assert np.all(off.imag == 0)


def test_onsite_gain_loss_window(small_chain):
    h = build_hamiltonian(small_chain)
    d = np.diag(h)
    first, last = small_chain.pt_first_site, small_chain.pt_last_site
    inside = d[first - 1:last]
    outside = np.concatenate([d[:first - 1], d[last:]])
    assert np.all(outside == 0)
    # odd sites lose, even sites gain, conjugate pair values
    assert np.allclose(inside[0::2], small_chain.u_re - 1j * small_chain.u_im)
    assert np.allclose(inside[1::2], small_chain.u_re + 1j * small_chain.u_im)


def test_pt_block_symmetry(small_chain):
    h = build_hamiltonian(small_chain)
    assert pt_symmetry_check(h, small_chain)
    h[small_chain.pt_first_site - 1, small_chain.pt_first_site - 1] += 1e-6
    assert not pt_symmetry_check(h, small_chain)


def test_hermitian_counterpart(small_chain):
    plain = small_chain.hermitian_counterpart()
    assert plain.u_re == 0.0 and plain.u_im == 0.0
    h = build_hamiltonian(plain)
    assert np.allclose(h, h.conj().T)


def test_with_v(small_chain):
    bumped = small_chain.with_v(0.5)
    assert bumped.v == 0.5
    assert bumped.w == small_chain.w
    assert bumped.n_sites == small_chain.n_sites


@pytest.mark.parametrize("kwargs, match", [
    (dict(n_sites=7), "even"),
    (dict(n_sites=0), "even"),
    (dict(pt_first_site=2), "odd"),
    (dict(pt_last_site=13), "even"),
    (dict(pt_first_site=-3), "within"),
    (dict(pt_last_site=400), "within"),
    (dict(u_im=-0.1), ">= 0"),
    (dict(v=float("nan")), "finite"),
])
def test_invalid_specs(kwargs, match):
    base = dict(n_sites=20, v=0.1, w=0.4, u_re=-0.3, u_im=0.1,
                pt_first_site=9, pt_last_site=12)
    base.update(kwargs)
    with pytest.raises(ValueError, match=match):
        HybridChainSpec(**base)


def test_pt_window_ordering():
    with pytest.raises(ValueError):
        HybridChainSpec(n_sites=20, v=0.1, w=0.4, pt_first_site=13,
                        pt_last_site=4)
