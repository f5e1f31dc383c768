"""Domain types, units and input handling for single-excitation channels.

Units used throughout the package:

- energies in cm^-1
- times in ps, rates and angular frequencies in ps^-1
- temperatures in K

Conversion between an energy ``E`` and an angular frequency is ``omega = E / HBAR``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import jsonschema
import numpy as np
import scipy.constants as sc

# hbar / (2 pi c) expressed in cm^-1 ps, and k_B / (h c) in cm^-1 / K
HBAR = 1e12 / (2 * math.pi * sc.c * 100)
KB = sc.k / (sc.h * sc.c * 100)


class NetworkError(ValueError):
    """Invalid network or bath description."""


def energy_to_omega(energy):
    """Energy in cm^-1 to angular frequency in ps^-1."""
    return np.divide(energy, HBAR)


def omega_to_energy(omega):
    """Angular frequency in ps^-1 to energy in cm^-1."""
    return np.multiply(omega, HBAR)


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """An N-site chromophore channel.

    Attributes:
        site_energies: Site energies (cm^-1).
        couplings: Real symmetric coupling matrix (cm^-1) with zero diagonal.
        trap_rates: Transfer rate from each site to the acceptor (ps^-1).
        loss_rate: Uniform exciton recombination rate (ps^-1).
        labels: Optional site names.
    """

    site_energies: np.ndarray
    couplings: np.ndarray
    trap_rates: np.ndarray | None = None
    loss_rate: float = 0.0
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        energies = _frozen(self.site_energies)
        if energies.ndim != 1 or energies.size < 1:
            raise NetworkError("site energies must be a non-empty vector")
        n = energies.size
        couplings = _frozen(self.couplings)
        if couplings.shape != (n, n):
            raise NetworkError(f"dimension mismatch: couplings {couplings.shape} for {n} sites")
        if not np.allclose(couplings, couplings.T, rtol=0.0, atol=1e-12):
            raise NetworkError("asymmetric couplings")
        if np.any(np.diag(couplings) != 0.0):
            raise NetworkError("couplings must have a zero diagonal")
        traps = np.zeros(n) if self.trap_rates is None else self.trap_rates
        traps = _frozen(traps)
        if traps.shape != (n,):
            raise NetworkError(f"dimension mismatch: {traps.size} trap rates for {n} sites")
        if np.any(traps < 0) or self.loss_rate < 0:
            raise NetworkError("negative rate")
        if not (np.all(np.isfinite(energies)) and np.all(np.isfinite(couplings))
                and np.all(np.isfinite(traps)) and math.isfinite(self.loss_rate)):
            raise NetworkError("non-finite network parameter")
        labels = self.labels
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n:
                raise NetworkError(f"dimension mismatch: {len(labels)} labels for {n} sites")
        object.__setattr__(self, "site_energies", energies)
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "trap_rates", traps)
        object.__setattr__(self, "loss_rate", float(self.loss_rate))
        object.__setattr__(self, "labels", labels)

    @property
    def n_sites(self) -> int:
        return self.site_energies.size

    def hamiltonian(self) -> np.ndarray:
        """Channel Hamiltonian in the site basis (cm^-1)."""
        return np.diag(self.site_energies) + self.couplings

    def replace(self, **changes) -> "NetworkSpec":
        kwargs = dict(site_energies=self.site_energies, couplings=self.couplings,
                      trap_rates=self.trap_rates, loss_rate=self.loss_rate, labels=self.labels)
        kwargs.update(changes)
        return NetworkSpec(**kwargs)

    def __eq__(self, other):
        if not isinstance(other, NetworkSpec):
            return NotImplemented
        return (np.array_equal(self.site_energies, other.site_energies)
                and np.array_equal(self.couplings, other.couplings)
                and np.array_equal(self.trap_rates, other.trap_rates)
                and self.loss_rate == other.loss_rate
                and self.labels == other.labels)

    __hash__ = None


@dataclass(frozen=True)
class BathSpec:
    """Thermal phonon bath with an Ohmic, exponentially cut-off spectral density.

    ``reorg_energy`` and ``cutoff`` are in cm^-1; the cutoff frequency used by the
    rate functions is ``cutoff / HBAR``.
    """

    temperature: float = 295.0
    reorg_energy: float = 35.0
    cutoff: float = 150.0
    family: str = field(default="ohmic-exponential", init=False)

    def __post_init__(self):
        for name in ("temperature", "reorg_energy", "cutoff"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise NetworkError(f"non-finite bath parameter {name}")
            object.__setattr__(self, name, value)
        if self.temperature < 0:
            raise NetworkError("temperature must be non-negative")
        if self.reorg_energy < 0:
            raise NetworkError("reorganization energy must be non-negative")
        if self.cutoff <= 0:
            raise NetworkError("cutoff must be positive")

    @property
    def cutoff_omega(self) -> float:
        return self.cutoff / HBAR

    @property
    def kT(self) -> float:
        """Thermal energy in cm^-1."""
        return KB * self.temperature

    def replace(self, **changes) -> "BathSpec":
        kwargs = dict(temperature=self.temperature, reorg_energy=self.reorg_energy,
                      cutoff=self.cutoff)
        kwargs.update(changes)
        return BathSpec(**kwargs)


@dataclass(frozen=True, eq=False)
class DensityState:
    """Single-excitation density matrix plus the two zero-excitation sinks."""

    matrix: np.ndarray
    trapped_weight: float = 0.0
    lost_weight: float = 0.0

    def __post_init__(self):
        rho = _frozen(self.matrix, complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got {rho.shape}")
        object.__setattr__(self, "matrix", rho)
        object.__setattr__(self, "trapped_weight", float(self.trapped_weight))
        object.__setattr__(self, "lost_weight", float(self.lost_weight))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def total_weight(self) -> float:
        return self.trace + self.trapped_weight + self.lost_weight

    @property
    def populations(self) -> np.ndarray:
        return np.diag(self.matrix).real

    def purity(self) -> float:
        rho = self.matrix
        return float(np.einsum("ij,ji->", rho, rho).real)

    def is_physical(self, tol: float = 1e-9) -> bool:
        rho = self.matrix
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > tol:
            return False
        if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -tol:
            return False
        return abs(self.total_weight - 1.0) <= tol


def initial_state(kind: str, n_sites: int, sites: Sequence[int] = ()) -> DensityState:
    """Build an initial channel state.

    Args:
        kind: ``"site"`` (one site), ``"mixture"`` (equal incoherent mixture of
            ``sites``) or ``"uniform"`` (equal coherent superposition of all sites).
        n_sites: Channel size.
        sites: 0-based site indices for ``"site"`` and ``"mixture"``.
    """
    if n_sites < 1:
        raise ValueError("n_sites must be positive")
    if kind == "uniform":
        psi = np.full(n_sites, 1 / math.sqrt(n_sites))
        return DensityState(np.outer(psi, psi))
    sites = list(sites)
    if not sites:
        raise ValueError("empty site set")
    for s in sites:
        if not (0 <= s < n_sites):
            raise ValueError(f"invalid site index {s} for {n_sites} sites")
    if kind == "site":
        if len(sites) != 1:
            raise ValueError("'site' takes exactly one index")
    elif kind != "mixture":
        raise ValueError(f"unknown initial state kind {kind!r}")
    rho = np.zeros((n_sites, n_sites))
    for s in sites:
        rho[s, s] += 1.0 / len(sites)
    return DensityState(rho)


NETWORK_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["sites", "couplings"],
    "properties": {
        "sites": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["energy_cm1"],
                "properties": {
                    "label": {"type": "string"},
                    "energy_cm1": {"type": "number"},
                },
            },
        },
        "couplings": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [{"type": "integer"}, {"type": "integer"}, {"type": "number"}],
                "minItems": 3,
                "maxItems": 3,
            },
        },
        "trap_rates_ps1": {
            "type": "object",
            "patternProperties": {"^[0-9]+$": {"type": "number"}},
            "additionalProperties": False,
        },
        "loss_rate_ps1": {"type": "number"},
        "bath": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "temperature_K": {"type": "number"},
                "reorg_cm1": {"type": "number"},
                "cutoff_cm1": {"type": "number"},
            },
        },
    },
}


def _read_document(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"network file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise NetworkError(f"parse error in {path}: {exc}") from exc
    try:
        jsonschema.validate(doc, NETWORK_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise NetworkError(f"parse error in {path}: {exc.message}") from exc
    return doc


def network_from_dict(doc: dict) -> NetworkSpec:
    sites = doc["sites"]
    n = len(sites)
    couplings = np.zeros((n, n))
    seen = {}
    for i, j, value in doc["couplings"]:
        if not (0 <= i < n and 0 <= j < n):
            raise NetworkError(f"dimension mismatch: coupling index ({i}, {j}) for {n} sites")
        if i == j:
            raise NetworkError(f"coupling ({i}, {j}) on the diagonal")
        key = (min(i, j), max(i, j))
        if key in seen and seen[key] != value:
            raise NetworkError("asymmetric couplings")
        seen[key] = value
        couplings[i, j] = couplings[j, i] = value
    traps = np.zeros(n)
    for key, rate in doc.get("trap_rates_ps1", {}).items():
        idx = int(key)
        if idx >= n:
            raise NetworkError(f"dimension mismatch: trap index {idx} for {n} sites")
        traps[idx] = rate
    labels = [s.get("label", str(k + 1)) for k, s in enumerate(sites)]
    return NetworkSpec(
        site_energies=[s["energy_cm1"] for s in sites],
        couplings=couplings,
        trap_rates=traps,
        loss_rate=doc.get("loss_rate_ps1", 0.0),
        labels=labels,
    )


def bath_from_dict(doc: dict) -> BathSpec:
    bath = doc.get("bath", {})
    defaults = BathSpec()
    return BathSpec(
        temperature=bath.get("temperature_K", defaults.temperature),
        reorg_energy=bath.get("reorg_cm1", defaults.reorg_energy),
        cutoff=bath.get("cutoff_cm1", defaults.cutoff),
    )


def load_network(path) -> NetworkSpec:
    """Read and validate a JSON network file."""
    return network_from_dict(_read_document(path))


def load_bath(path) -> BathSpec:
    """Read the ``bath`` block of a network file (defaults when absent)."""
    return bath_from_dict(_read_document(path))


def serialize_network(net: NetworkSpec, bath: BathSpec | None = None) -> dict:
    n = net.n_sites
    labels = net.labels or tuple(str(k + 1) for k in range(n))
    doc = {
        "sites": [{"label": labels[k], "energy_cm1": float(net.site_energies[k])}
                  for k in range(n)],
        "couplings": [[i, j, float(net.couplings[i, j])]
                      for i in range(n) for j in range(i + 1, n) if net.couplings[i, j] != 0.0],
        "trap_rates_ps1": {str(k): float(r) for k, r in enumerate(net.trap_rates) if r != 0.0},
        "loss_rate_ps1": net.loss_rate,
    }
    if bath is not None:
        doc["bath"] = {"temperature_K": bath.temperature, "reorg_cm1": bath.reorg_energy,
                       "cutoff_cm1": bath.cutoff}
    return doc


def save_network(path, net: NetworkSpec, bath: BathSpec | None = None) -> None:
    Path(path).write_text(json.dumps(serialize_network(net, bath), indent=2) + "\n")


def fmo_path() -> Path:
    """Location of the bundled seven-site FMO network file."""
    return Path(str(resources.files("excitonwalk") / "data" / "fmo.json"))


def load_fmo() -> tuple[NetworkSpec, BathSpec]:
    path = fmo_path()
    return load_network(path), load_bath(path)


def dipole_coupling(mu_m: Iterable[float], mu_n: Iterable[float], r_mn: Iterable[float]) -> float:
    """Point-dipole coupling ``(mu_m.mu_n - 3 (mu_m.R)(mu_n.R) / R^2) / R^3``.

    The result is in whatever unit the inputs imply; no prefactor is applied.
    """
    mu_m = np.asarray(mu_m, float)
    mu_n = np.asarray(mu_n, float)
    r = np.asarray(r_mn, float)
    dist = float(np.linalg.norm(r))
    if dist == 0.0:
        raise ValueError("zero separation")
    return float((mu_m @ mu_n - 3.0 * (mu_m @ r) * (mu_n @ r) / dist**2) / dist**3)
