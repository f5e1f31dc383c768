import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.integrate import quad

from excitonwalk import (HBAR, KB, BathSpec, NetworkSpec, bohr_frequencies, bose_occupation,
                         diagonalize, phonon_rate, spectral_density)

from conftest import dimer, random_network


def test_dimer_diagonalization():
    basis = diagonalize(dimer(coupling=30.0))
    np.testing.assert_allclose(basis.energies, [-30.0, 30.0])
    np.testing.assert_allclose(np.abs(basis.coefficients), 1 / math.sqrt(2))


def test_diagonal_network():
    net = NetworkSpec([30.0, 10.0, 20.0], np.zeros((3, 3)))
    basis = diagonalize(net)
    np.testing.assert_allclose(basis.energies, [10.0, 20.0, 30.0])
    np.testing.assert_allclose(np.abs(basis.coefficients), np.eye(3)[:, [1, 2, 0]])
    assert np.all(basis.coefficients >= 0)


def test_sign_convention(rng=np.random.default_rng(3)):
    for _ in range(5):
        basis = diagonalize(random_network(rng))
        c = basis.coefficients
        for k in range(c.shape[1]):
            assert c[np.argmax(np.abs(c[:, k])), k] > 0


def test_fmo_basis(fmo):
    net, _ = fmo
    basis = diagonalize(net)
    c = basis.coefficients
    np.testing.assert_allclose(c.T @ c, np.eye(7), atol=1e-12)
    h = net.hamiltonian()
    resid = np.abs(h @ c - c * basis.energies).max()
    assert resid <= 1e-10 * np.abs(basis.energies).max()
    assert np.all(np.diff(basis.energies) > 0)
    gaps = np.diff(basis.energies)
    assert 30 < gaps.mean() < 150  # separations of order 100 cm^-1
    # lowest exciton mostly on site 3, highest on sites 1/2
    assert np.argmax(c[:, 0] ** 2) == 2
    assert set(np.argsort(c[:, 6] ** 2)[-2:]) == {0, 1}
    assert set(np.argsort(c[:, 5] ** 2)[-2:]) == {4, 5}


def test_dimer_groups():
    basis = diagonalize(dimer(coupling=25.0))
    omegas = sorted(g.omega for g in basis.frequency_groups)
    np.testing.assert_allclose(omegas, [-50 / HBAR, 0.0, 50 / HBAR])


def test_nondegenerate_group_count():
    net = NetworkSpec([0.0, 13.0, 31.0, 70.0], np.zeros((4, 4)))
    groups = bohr_frequencies(diagonalize(net), tol=1e-9)
    assert len(groups) == 4 * 3 + 1
    zero = [g for g in groups if g.omega == 0.0][0]
    assert sorted(zero.pairs) == [(k, k) for k in range(4)]


def test_degenerate_gaps_share_group():
    # equally spaced ladder: 0-1 and 1-2 transitions coincide
    net = NetworkSpec([0.0, 10.0, 20.0], np.zeros((3, 3)))
    groups = bohr_frequencies(diagonalize(net), tol=1e-6)
    assert len(groups) == 5
    down10 = [g for g in groups if math.isclose(g.omega, 10 / HBAR)][0]
    assert sorted(down10.pairs) == [(0, 1), (1, 2)]


def test_fmo_groups(fmo):
    basis = diagonalize(fmo[0])
    e = basis.energies
    # brute-force: no two distinct off-diagonal gaps within tolerance
    gaps = sorted(e[b] - e[a] for a, b in itertools.permutations(range(7), 2))
    assert min(np.diff(gaps)) > 1e-6
    assert min(abs(g) for g in gaps) > 1e-6
    groups = bohr_frequencies(basis, tol=1e-6)
    assert len(groups) == 43


@given(st.integers(0, 10_000))
def test_groups_partition_pairs(seed):
    rng = np.random.default_rng(seed)
    basis = diagonalize(random_network(rng))
    n = basis.dim
    pairs = [p for g in basis.frequency_groups for p in g.pairs]
    assert sorted(pairs) == [(a, b) for a in range(n) for b in range(n)]
    zero = [g for g in basis.frequency_groups if g.omega == 0.0]
    assert len(zero) == 1
    assert {(k, k) for k in range(n)} <= set(zero[0].pairs)


BATH = BathSpec(temperature=295.0, reorg_energy=35.0, cutoff=150.0)


def test_spectral_density_values():
    wc = BATH.cutoff_omega
    assert spectral_density(0.0, BATH) == 0.0
    assert spectral_density(-3.0, BATH) == 0.0
    assert spectral_density(wc, BATH) == pytest.approx(35.0 / HBAR / math.e, rel=1e-14)
    assert np.all(spectral_density(np.linspace(-100, 100, 201), BATH) >= 0)


def test_reorganization_integral():
    val, _ = quad(lambda w: spectral_density(w, BATH) / w, 0, np.inf, epsabs=0, epsrel=1e-12)
    assert HBAR * val == pytest.approx(35.0, rel=1e-8)


def test_bose_occupation():
    assert bose_occupation(5.0, 0.0) == 0.0
    w = KB * 300.0 / HBAR
    assert bose_occupation(w, 300.0) == pytest.approx(1 / (math.e - 1), rel=1e-12)
    assert bose_occupation(w, 300.0) == pytest.approx(0.58198, abs=1e-5)
    with pytest.raises(ValueError):
        bose_occupation(0.0, 300.0)


@given(st.floats(1e-3, 200.0), st.floats(1.0, 1000.0))
def test_bose_identity(w, t):
    assume(HBAR * w / (KB * t) < 30)
    n = bose_occupation(w, t)
    assert n > 0
    assert n * math.exp(HBAR * w / (KB * t)) - n == pytest.approx(1.0, rel=1e-9)


def test_phonon_rate_zero_temperature():
    cold = BATH.replace(temperature=0.0)
    assert phonon_rate(-10.0, cold) == 0.0
    assert phonon_rate(0.0, cold) == 0.0
    assert phonon_rate(10.0, cold) == pytest.approx(2 * math.pi * spectral_density(10.0, cold))


def test_detailed_balance_value():
    w = 100.0 / HBAR
    ratio = phonon_rate(-w, BATH) / phonon_rate(w, BATH)
    assert ratio == pytest.approx(math.exp(-100.0 / (KB * 295.0)), rel=1e-12)
    assert ratio == pytest.approx(0.6139, abs=2e-3)


@given(st.floats(1e-4, 300.0), st.floats(1.0, 500.0))
def test_detailed_balance_random(w, t):
    bath = BATH.replace(temperature=t)
    fwd, back = phonon_rate(w, bath), phonon_rate(-w, bath)
    assert fwd >= 0 and back >= 0
    assert back == pytest.approx(math.exp(-HBAR * w / (KB * t)) * fwd, rel=1e-12, abs=1e-300)


def test_zero_frequency_limit():
    limit = 2 * math.pi * 35.0 * KB * 295.0 / (HBAR**2 * BATH.cutoff_omega)
    assert phonon_rate(0.0, BATH) == pytest.approx(limit, rel=1e-14)
    eps = 1e-8 / HBAR
    assert phonon_rate(eps, BATH) == pytest.approx(limit, rel=1e-6)
    assert phonon_rate(-eps, BATH) == pytest.approx(limit, rel=1e-6)


def test_phonon_rate_vectorized():
    w = np.array([-5.0, 0.0, 5.0])
    out = phonon_rate(w, BATH)
    assert out.shape == (3,)
    np.testing.assert_allclose(out, [phonon_rate(x, BATH) for x in w])
