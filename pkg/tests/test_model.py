import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from excitonwalk import (HBAR, KB, BathSpec, NetworkError, NetworkSpec, dipole_coupling,
                         energy_to_omega, initial_state, load_network, omega_to_energy,
                         save_network)
from excitonwalk.model import load_bath, serialize_network


def test_constants_values():
    assert HBAR == pytest.approx(5.3088, abs=1e-4)
    assert KB == pytest.approx(0.69504, abs=1e-5)
    assert KB * 295 == pytest.approx(205.04, abs=0.01)


@given(st.floats(min_value=-1e4, max_value=1e4, allow_nan=False))
def test_energy_omega_round_trip(e):
    assert omega_to_energy(energy_to_omega(e)) == pytest.approx(e, rel=1e-12, abs=1e-300)


def test_fmo_file(fmo):
    net, bath = fmo
    assert net.n_sites == 7
    assert net.trap_rates[2] == 1.0
    assert np.count_nonzero(net.trap_rates) == 1
    assert net.loss_rate == 0.001
    assert (bath.temperature, bath.reorg_energy, bath.cutoff) == (295.0, 35.0, 150.0)


def _write(tmp_path, doc):
    path = tmp_path / "net.json"
    path.write_text(json.dumps(doc))
    return path


BASE = {
    "sites": [{"label": "a", "energy_cm1": 0.0}, {"label": "b", "energy_cm1": 100.0},
              {"label": "c", "energy_cm1": 50.0}],
    "couplings": [[0, 1, 20.0], [1, 2, -5.0]],
    "trap_rates_ps1": {"0": 1.0},
    "loss_rate_ps1": 0.001,
}


def test_load_valid(tmp_path):
    net = load_network(_write(tmp_path, BASE))
    assert net.couplings[1, 0] == net.couplings[0, 1] == 20.0
    assert net.labels == ("a", "b", "c")


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d["couplings"].append([1, 0, 21.0]), "asymmetric couplings"),
    (lambda d: d.update(trap_rates_ps1={"0": -1.0}), "negative rate"),
    (lambda d: d.update(loss_rate_ps1=-1.0), "negative rate"),
    (lambda d: d["couplings"].append([0, 7, 1.0]), "dimension mismatch"),
    (lambda d: d.update(trap_rates_ps1={"5": 1.0}), "dimension mismatch"),
    (lambda d: d.update(extra=1), "parse error"),
    (lambda d: d["sites"][0].update(color="red"), "parse error"),
])
def test_load_rejects(tmp_path, mutate, message):
    doc = json.loads(json.dumps(BASE))
    mutate(doc)
    with pytest.raises(NetworkError, match=message):
        load_network(_write(tmp_path, doc))


def test_load_parse_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(NetworkError, match="parse error"):
        load_network(path)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError, match="network file not found"):
        load_network(tmp_path / "nope.json")


def test_direct_asymmetric():
    with pytest.raises(NetworkError, match="asymmetric"):
        NetworkSpec([0, 0], [[0, 1], [2, 0]])


def test_round_trip(tmp_path, fmo):
    net, bath = fmo
    path = tmp_path / "rt.json"
    save_network(path, net, bath)
    assert load_network(path) == net
    assert load_bath(path) == bath
    assert serialize_network(load_network(path), bath) == serialize_network(net, bath)


def test_bath_validation():
    with pytest.raises(NetworkError):
        BathSpec(temperature=-1)
    with pytest.raises(NetworkError):
        BathSpec(cutoff=0)
    with pytest.raises(NetworkError):
        BathSpec(reorg_energy=-5)


def test_dipole_parallel_perpendicular():
    mu = [0, 0, 2.0]
    r = [3.0, 0, 0]
    assert dipole_coupling(mu, mu, r) == pytest.approx(4.0 / 27.0)


def test_dipole_cubic_law_and_symmetry():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a, b, r = rng.normal(size=(3, 3))
        v = dipole_coupling(a, b, r)
        assert dipole_coupling(a, b, 2 * r) == pytest.approx(v / 8)
        assert dipole_coupling(b, a, -r) == pytest.approx(v)
        assert dipole_coupling(b, a, r) == pytest.approx(v)


def test_dipole_zero_separation():
    with pytest.raises(ValueError, match="zero separation"):
        dipole_coupling([1, 0, 0], [1, 0, 0], [0, 0, 0])


def test_initial_site():
    s = initial_state("site", 7, [0])
    assert s.matrix[0, 0] == 1 and s.trace == 1 and s.purity() == pytest.approx(1)
    assert s.trapped_weight == s.lost_weight == 0
    assert s.is_physical()


def test_initial_mixture():
    s = initial_state("mixture", 7, [0, 5])
    assert s.matrix[0, 0] == s.matrix[5, 5] == 0.5
    assert s.purity() == pytest.approx(0.5)
    assert s.is_physical()


def test_initial_uniform():
    s = initial_state("uniform", 7)
    np.testing.assert_allclose(s.matrix, np.full((7, 7), 1 / 7))
    assert np.linalg.matrix_rank(s.matrix) == 1
    assert s.is_physical()


@pytest.mark.parametrize("kind, sites", [("site", [7]), ("site", [-1]), ("mixture", []),
                                         ("site", [])])
def test_initial_errors(kind, sites):
    with pytest.raises(ValueError):
        initial_state(kind, 7, sites)


@settings(max_examples=30)
@given(st.integers(1, 8), st.data())
def test_initial_states_physical(n, data):
    sites = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
    for s in (initial_state("mixture", n, sites), initial_state("uniform", n)):
        assert s.is_physical()
        assert math.isclose(s.total_weight, 1.0, abs_tol=1e-12)
