"""Dissipative channels of the channel master equation.

Phonon jump operators are built per Bohr-frequency group in the exciton basis
and then carried into the site basis, where they are summarized by two
tensors::

    gamma[m, m', n, n'] = sum_{l, w} g(w) <m|A_l(w)|m'> conj(<n|A_l(w)|n'>)
    theta[m, n]         = sum_{l, w} g(w) <m|A_l(w)^† A_l(w)|n>

so that the phonon dissipator reads

    sum gamma[m, m', n, n'] W_{m m'} rho W_{n n'}^†  -  1/2 {theta, rho}

with ``W_{m m'} = |m><m'|``. Trap and loss act through the anti-Hermitian part
of the effective Hamiltonian and drain probability into the two sinks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import HBAR, KB, BathSpec, NetworkSpec
from .spectral import ExcitonBasis, phonon_rate


@dataclass(frozen=True, eq=False)
class JumpTensors:
    gamma: np.ndarray
    theta: np.ndarray

    def __add__(self, other: "JumpTensors") -> "JumpTensors":
        return JumpTensors(self.gamma + other.gamma, self.theta + other.theta)


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """All dissipative channels of a network at one bath setting.

    ``generators[g]`` has shape ``(N, N, N)``: the exciton-basis operator
    ``A_m(w_g)`` for every site ``m``. ``rates[g]`` is the phonon rate of
    group ``g``. The phonon tensors are split into the population-transferring
    part (``w != 0`` groups) and the pure-dephasing part (the ``w = 0`` group).
    """

    basis: ExcitonBasis
    bath: BathSpec
    generators: tuple[np.ndarray, ...]
    rates: np.ndarray
    jumps: JumpTensors
    dephasing: JumpTensors
    loss_rates: np.ndarray
    trap_op: np.ndarray

    @property
    def gamma(self) -> np.ndarray:
        return self.jumps.gamma + self.dephasing.gamma

    @property
    def theta(self) -> np.ndarray:
        return self.jumps.theta + self.dephasing.theta

    @property
    def labels(self) -> tuple[str, ...]:
        return ("phonon", "dephasing", "loss", "trap")


@dataclass(frozen=True, eq=False)
class EffectiveHamiltonian:
    """Non-Hermitian no-jump generator ``H_C / hbar - (i/2) decay``.

    ``hamiltonian`` is the channel Hamiltonian in cm^-1. ``decay`` is the
    Hermitian rate matrix (ps^-1) ``theta + loss * I + K`` with ``K`` the
    diagonal trap-rate matrix, so the no-jump evolution drains the trace at
    ``Tr[decay rho]``.
    """

    hamiltonian: np.ndarray
    decay: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        """Full effective Hamiltonian in angular-frequency units (ps^-1)."""
        return self.hamiltonian / HBAR - 0.5j * self.decay

    @property
    def hermitian_part(self) -> np.ndarray:
        return self.hamiltonian

    @property
    def antihermitian_part(self) -> np.ndarray:
        return -0.5j * self.decay


def phonon_generators(basis: ExcitonBasis) -> tuple[np.ndarray, ...]:
    """Exciton-basis generators ``A_m(w)`` for every frequency group and site.

    ``A_m(w) = sum_{(a, b) in group} c_m(a)^* c_m(b) |a><b|``.
    """
    c = basis.coefficients
    n_sites, n = c.shape
    out = []
    for group in basis.frequency_groups:
        ops = np.zeros((n_sites, n, n), dtype=complex)
        for a, b in group.pairs:
            ops[:, a, b] += c[:, a].conj() * c[:, b]
        out.append(ops)
    return tuple(out)


def _tensors(site_ops: np.ndarray, rate: float) -> JumpTensors:
    # site_ops: (N_sites, N, N), one site-basis jump operator per bath site
    gamma = rate * np.einsum("lab,lcd->abcd", site_ops, site_ops.conj())
    theta = rate * np.einsum("lba,lbc->ac", site_ops.conj(), site_ops)
    return JumpTensors(gamma, theta)


def jump_tensors(basis: ExcitonBasis, bath: BathSpec, which: str = "all") -> JumpTensors:
    """Phonon jump-rate tensor and matching damping matrix in the site basis.

    ``which`` selects ``"all"`` groups, only the population-transfer groups
    (``"jumps"``, w != 0) or only the pure-dephasing group (``"dephasing"``).
    """
    if which not in ("all", "jumps", "dephasing"):
        raise ValueError(f"unknown group selection {which!r}")
    n = basis.dim
    total = JumpTensors(np.zeros((n,) * 4, complex), np.zeros((n, n), complex))
    c = basis.coefficients
    for group, ops in zip(basis.frequency_groups, phonon_generators(basis)):
        is_zero = group.omega == 0.0
        if (which == "jumps" and is_zero) or (which == "dephasing" and not is_zero):
            continue
        rate = phonon_rate(group.omega, bath)
        if rate == 0.0:
            continue
        site_ops = c @ ops @ c.conj().T
        total = total + _tensors(site_ops, rate)
    return total


def build_channels(net: NetworkSpec, basis: ExcitonBasis, bath: BathSpec) -> ChannelSet:
    generators = phonon_generators(basis)
    rates = np.array([phonon_rate(g.omega, bath) for g in basis.frequency_groups])
    return ChannelSet(
        basis=basis,
        bath=bath,
        generators=generators,
        rates=rates,
        jumps=jump_tensors(basis, bath, "jumps"),
        dephasing=jump_tensors(basis, bath, "dephasing"),
        loss_rates=np.full(net.n_sites, net.loss_rate),
        trap_op=np.diag(net.trap_rates).astype(float),
    )


def effective_hamiltonian(net: NetworkSpec, channels: ChannelSet) -> EffectiveHamiltonian:
    decay = channels.theta + np.diag(channels.loss_rates) + channels.trap_op
    return EffectiveHamiltonian(net.hamiltonian(), decay)


def phonon_dissipator(channels: ChannelSet, rho: np.ndarray) -> np.ndarray:
    """Apply the phonon dissipator to a site-basis density matrix."""
    gamma, theta = channels.gamma, channels.theta
    gain = np.einsum("abcd,bd->ac", gamma, rho)
    return gain - 0.5 * (theta @ rho + rho @ theta)


def gibbs_state(basis: ExcitonBasis, temperature: float) -> np.ndarray:
    """Thermal state of the channel Hamiltonian, in the site basis."""
    if temperature <= 0:
        weights = np.zeros(basis.dim)
        weights[0] = 1.0
    else:
        e = basis.energies - basis.energies.min()
        weights = np.exp(-e / (KB * temperature))
        weights /= weights.sum()
    return basis.to_site(np.diag(weights).astype(complex))

