"""Exciton basis, Bohr-frequency grouping and phonon rate functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import HBAR, KB, BathSpec, NetworkSpec

#: Default secular grouping tolerance on energy differences (cm^-1).
DEFAULT_GROUP_TOL = 1e-6


@dataclass(frozen=True)
class FrequencyGroup:
    """Exciton transitions sharing one Bohr frequency.

    ``pairs`` holds ``(a, b)`` index pairs, each standing for the dyad
    ``|a><b|``, i.e. the transition from exciton ``b`` to exciton ``a``.
    ``omega`` is the energy released by that transition, ``(e_b - e_a) / HBAR``,
    so positive frequencies are downhill.
    """

    omega: float
    pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True, eq=False)
class ExcitonBasis:
    energies: np.ndarray
    coefficients: np.ndarray
    frequency_groups: tuple[FrequencyGroup, ...]

    @property
    def dim(self) -> int:
        return self.energies.size

    def to_site(self, op: np.ndarray) -> np.ndarray:
        """Express an exciton-basis operator in the site basis."""
        c = self.coefficients
        return c @ op @ c.conj().T

    def to_exciton(self, op: np.ndarray) -> np.ndarray:
        c = self.coefficients
        return c.conj().T @ op @ c


def diagonalize(net: NetworkSpec, tol: float = DEFAULT_GROUP_TOL) -> ExcitonBasis:
    """Eigen-decompose the channel Hamiltonian.

    Eigenvalues come out ascending. Each eigenvector is signed so that its
    largest-magnitude component is positive (first one on ties).
    """
    energies, vecs = np.linalg.eigh(net.hamiltonian())
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        pivot = np.argmax(np.abs(col) > np.abs(col).max() - 1e-12)
        if col[pivot] < 0:
            vecs[:, k] = -col
    energies.setflags(write=False)
    vecs.setflags(write=False)
    groups = _group_transitions(energies, tol)
    return ExcitonBasis(energies, vecs, groups)


def bohr_frequencies(basis: ExcitonBasis, tol: float = DEFAULT_GROUP_TOL) -> tuple[FrequencyGroup, ...]:
    """Group all ordered exciton pairs by transition energy, within ``tol`` cm^-1."""
    return _group_transitions(basis.energies, tol)


def _group_transitions(energies: np.ndarray, tol: float) -> tuple[FrequencyGroup, ...]:
    if tol <= 0:
        raise ValueError("grouping tolerance must be positive")
    n = energies.size
    pairs = [(a, b) for a in range(n) for b in range(n)]
    gaps = np.array([energies[b] - energies[a] for a, b in pairs])
    # diagonal pairs are exactly zero; degenerate off-diagonal pairs join them below
    for k, (a, b) in enumerate(pairs):
        if a == b:
            gaps[k] = 0.0
    order = np.argsort(gaps, kind="stable")
    clusters: list[list[int]] = []
    for k in order:
        if clusters and gaps[k] - gaps[clusters[-1][-1]] <= tol:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    groups = []
    for members in clusters:
        has_diag = any(pairs[k][0] == pairs[k][1] for k in members)
        gap = 0.0 if has_diag else float(np.mean(gaps[members]))
        groups.append(FrequencyGroup(gap / HBAR, tuple(sorted(pairs[k] for k in members))))
    return tuple(groups)


def spectral_density(omega, bath: BathSpec):
    """Ohmic spectral density ``(E_R/hbar) (w/wc) exp(-w/wc)`` for w > 0, zero otherwise (ps^-1)."""
    w = np.asarray(omega, float)
    wc = bath.cutoff_omega
    pos = np.where(w > 0, w, 0.0)
    out = (bath.reorg_energy / HBAR) * (pos / wc) * np.exp(-pos / wc)
    return out if out.ndim else float(out)


def bose_occupation(omega, temperature: float):
    """Bose-Einstein occupation ``1 / (exp(hbar w / kT) - 1)``.

    Raises ``ValueError`` for ``omega == 0`` at finite temperature, where the
    occupation diverges.
    """
    w = np.asarray(omega, float)
    if temperature == 0:
        out = np.where(w > 0, 0.0, np.where(w < 0, -1.0, 0.0))
        return out if out.ndim else float(out)
    if np.any(w == 0):
        raise ValueError("Bose occupation is undefined at zero frequency")
    with np.errstate(over="ignore"):
        out = 1.0 / np.expm1(HBAR * w / (KB * temperature))
    return out if out.ndim else float(out)


def phonon_rate(omega, bath: BathSpec):
    """Secular phonon transition rate ``2 pi [J(w)(1 + n(w)) + J(-w) n(-w)]`` (ps^-1).

    Positive ``omega`` is emission into the bath. At ``omega == 0`` the finite
    limit ``2 pi E_R kT / (hbar^2 wc)`` is returned, which is the pure-dephasing
    rate.
    """
    w = np.atleast_1d(np.asarray(omega, float))
    out = np.zeros_like(w)
    aw = np.abs(w)
    j = np.asarray(spectral_density(aw, bath))
    nonzero = w != 0
    if bath.temperature == 0:
        out[w > 0] = 2 * np.pi * j[w > 0]
    else:
        n = np.zeros_like(w)
        n[nonzero] = bose_occupation(aw[nonzero], bath.temperature)
        emit = w > 0
        absorb = w < 0
        out[emit] = 2 * np.pi * j[emit] * (1.0 + n[emit])
        out[absorb] = 2 * np.pi * j[absorb] * n[absorb]
        out[~nonzero] = 2 * np.pi * bath.reorg_energy * bath.kT / (HBAR**2 * bath.cutoff_omega)
    return out if np.ndim(omega) else float(out[0])
