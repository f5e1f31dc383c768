"""Liouville-space representation of the channel dynamics.

Density matrices are column-stacked: ``rho[m, n]`` sits at index ``n * N + m``.
With this convention ``vec(A rho B^†) = kron(conj(B), A) @ vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .lindblad import ChannelSet, EffectiveHamiltonian, build_channels, effective_hamiltonian, phonon_generators
from .model import HBAR, BathSpec, DensityState, NetworkSpec
from .spectral import DEFAULT_GROUP_TOL, ExcitonBasis, diagonalize

#: Named parts of the generator, in a fixed order.
PARTS = ("hamiltonian", "phonon", "dephasing", "trap", "loss")


def vectorize(rho) -> np.ndarray:
    if isinstance(rho, DensityState):
        rho = rho.matrix
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    return rho.reshape(-1, order="F").astype(complex)


def devectorize(vec, n: int | None = None) -> np.ndarray:
    vec = np.asarray(vec)
    size = vec.shape[0]
    if n is None:
        n = int(round(np.sqrt(size)))
    if n * n != size:
        raise ValueError(f"vector of length {size} is not a vectorized {n}x{n} matrix")
    return vec.reshape((n, n) + vec.shape[1:], order="F")


def left(a: np.ndarray) -> np.ndarray:
    """Superoperator of ``rho -> a rho``."""
    return np.kron(np.eye(a.shape[0]), a)


def right(b: np.ndarray) -> np.ndarray:
    """Superoperator of ``rho -> rho b``."""
    return np.kron(b.T, np.eye(b.shape[0]))


def sandwich(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of ``rho -> a rho b^†``."""
    return np.kron(b.conj(), a)


def trace_functional(n: int) -> np.ndarray:
    """Row vector ``t`` with ``t @ vec(rho) == Tr(rho)``."""
    return vectorize(np.eye(n)).real


@dataclass(frozen=True, eq=False)
class Supermatrix:
    """Liouville-space generator ``M = sum_k scalings[k] * parts[k]`` (ps^-1).

    Besides the generator parts, it carries what the observables need: the trap
    and loss rates (to form sink fluxes) and the phonon jump tensor (for
    site-to-site pathway perturbations).
    """

    parts: Mapping[str, np.ndarray]
    trap_rates: np.ndarray
    loss_rate: float
    gamma: np.ndarray | None = None
    scalings: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        scal = {k: 1.0 for k in self.parts}
        for k, v in dict(self.scalings).items():
            if k not in self.parts:
                raise KeyError(f"unknown generator part {k!r}")
            scal[k] = float(v)
        object.__setattr__(self, "parts", dict(self.parts))
        object.__setattr__(self, "scalings", scal)
        total = sum(scal[k] * p for k, p in self.parts.items())
        total = np.asarray(total, dtype=complex)
        total.setflags(write=False)
        object.__setattr__(self, "_matrix", total)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def n_sites(self) -> int:
        return self.trap_rates.size

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.parts)

    def scaled(self, **scalings: float) -> "Supermatrix":
        """Copy with some part scalings replaced."""
        scal = dict(self.scalings)
        scal.update(scalings)
        return Supermatrix(self.parts, self.trap_rates, self.loss_rate, self.gamma, scal)

    def part(self, name: str) -> np.ndarray:
        return self.parts[name]

    def trap_functional(self) -> np.ndarray:
        """Row vector giving the instantaneous trapping flux ``sum_m k_m rho_mm``."""
        return self.scalings.get("trap", 1.0) * vectorize(np.diag(self.trap_rates)).real

    def loss_functional(self) -> np.ndarray:
        return self.scalings.get("loss", 1.0) * self.loss_rate * trace_functional(self.n_sites)

    def dump(self, path) -> None:
        """Write nonzero entries as ``row col re im`` lines (0-based)."""
        m = self.matrix
        rows, cols = np.nonzero(m)
        with Path(path).open("w") as fh:
            fh.write(f"# {m.shape[0]} {m.shape[1]}\n")
            for r, c in zip(rows, cols):
                fh.write(f"{r} {c} {m[r, c].real:.17g} {m[r, c].imag:.17g}\n")


def load_dump(path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    shape = tuple(int(x) for x in lines[0].lstrip("#").split())
    m = np.zeros(shape, complex)
    for line in lines[1:]:
        r, c, re, im = line.split()
        m[int(r), int(c)] = float(re) + 1j * float(im)
    return m


def _jump_superop(gamma: np.ndarray) -> np.ndarray:
    # sum gamma[m, m', n, n'] kron(conj(W_{n n'}), W_{m m'}) has entry
    # [(n N + m), (n' N + m')] = gamma[m, m', n, n']
    n = gamma.shape[0]
    return gamma.transpose(2, 0, 3, 1).reshape(n * n, n * n)


def _anticommutator(x: np.ndarray) -> np.ndarray:
    return left(x) + right(x)


def build_supermatrix(net: NetworkSpec, channels: ChannelSet,
                      heff: EffectiveHamiltonian | None = None) -> Supermatrix:
    """Assemble the site-basis generator from the effective Hamiltonian and jump tensors.

    ``-i (I (x) H_eff - H_eff^* (x) I) + sum gamma kron(conj(W), W)``, split into
    named parts.
    """
    if heff is None:
        heff = effective_hamiltonian(net, channels)
    h = heff.hermitian_part
    n = net.n_sites
    parts = {
        "hamiltonian": -1j / HBAR * (left(h) - right(h)),
        "phonon": _jump_superop(channels.jumps.gamma) - 0.5 * _anticommutator(channels.jumps.theta),
        "dephasing": (_jump_superop(channels.dephasing.gamma)
                      - 0.5 * _anticommutator(channels.dephasing.theta)),
        "trap": -0.5 * _anticommutator(channels.trap_op),
        "loss": -0.5 * _anticommutator(np.diag(channels.loss_rates)),
    }
    sm = Supermatrix(parts, net.trap_rates, net.loss_rate, channels.gamma)
    # the non-jump parts must reproduce the effective Hamiltonian term
    heff_m = heff.matrix
    nojump = -1j * (left(heff_m) - np.kron(heff_m.conj(), np.eye(n)))
    jumps = _jump_superop(channels.gamma)
    if not np.allclose(sm.matrix, nojump + jumps, rtol=0, atol=1e-9 * max(1.0, np.abs(nojump).max())):
        raise ValueError("effective Hamiltonian inconsistent with the channel set")
    return sm


def _lindblad_columns(n: int, apply) -> np.ndarray:
    """Superoperator matrix of a linear map, built column by column."""
    out = np.zeros((n * n, n * n), complex)
    for b in range(n):
        for a in range(n):
            e = np.zeros((n, n), complex)
            e[a, b] = 1.0
            out[:, b * n + a] = apply(e).reshape(-1, order="F")
    return out


def build_supermatrix_exciton(net: NetworkSpec, basis: ExcitonBasis, bath: BathSpec) -> Supermatrix:
    """Same generator, assembled by applying each channel's Lindblad form to exciton-basis
    matrix units and transforming the result to the site basis.

    Independent of the jump-tensor route; used as a cross-check.
    """
    from .spectral import phonon_rate

    n = basis.dim
    energies = basis.energies
    c = basis.coefficients
    gens = phonon_generators(basis)
    rates = [phonon_rate(g.omega, bath) for g in basis.frequency_groups]

    def phonon(rho, want_zero):
        out = np.zeros_like(rho)
        for group, ops, rate in zip(basis.frequency_groups, gens, rates):
            if (group.omega == 0.0) != want_zero or rate == 0.0:
                continue
            for a in ops:
                ada = a.conj().T @ a
                out += rate * (a @ rho @ a.conj().T - 0.5 * (ada @ rho + rho @ ada))
        return out

    k_exc = c.T @ np.diag(net.trap_rates) @ c
    maps = {
        "hamiltonian": lambda r: -1j / HBAR * (energies[:, None] - energies[None, :]) * r,
        "phonon": lambda r: phonon(r, False),
        "dephasing": lambda r: phonon(r, True),
        "trap": lambda r: -0.5 * (k_exc @ r + r @ k_exc),
        "loss": lambda r: -net.loss_rate * r,
    }
    s = np.kron(c.conj(), c)  # vec(C rho C^†) = kron(conj(C), C) vec(rho)
    s_inv = s.conj().T
    parts = {name: s @ _lindblad_columns(n, f) @ s_inv for name, f in maps.items()}
    # site-basis jump tensor rebuilt from the same generators for pathway analysis
    gamma = np.zeros((n,) * 4, complex)
    for ops, rate in zip(gens, rates):
        site = c @ ops @ c.conj().T
        gamma += rate * np.einsum("lab,lcd->abcd", site, site.conj())
    return Supermatrix(parts, net.trap_rates, net.loss_rate, gamma)


def build_model(net: NetworkSpec, bath: BathSpec, tol: float = DEFAULT_GROUP_TOL) -> Supermatrix:
    """Diagonalize, build channels and assemble the site-basis generator in one call."""
    basis = diagonalize(net, tol)
    channels = build_channels(net, basis, bath)
    return build_supermatrix(net, channels)


def to_exciton_basis(sm: Supermatrix | np.ndarray, basis: ExcitonBasis) -> np.ndarray:
    m = sm.matrix if isinstance(sm, Supermatrix) else sm
    c = basis.coefficients
    s = np.kron(c.conj(), c)
    return s.conj().T @ m @ s


def classical_projection(sm: Supermatrix, basis: ExcitonBasis) -> np.ndarray:
    """Population-to-population block of the generator in the exciton basis.

    Off-diagonal entries are exciton transfer rates; columns sum to minus the
    trap plus loss rate of the source exciton.
    """
    n = basis.dim
    m = to_exciton_basis(sm, basis)
    idx = [a * n + a for a in range(n)]
    return m[np.ix_(idx, idx)].real.copy()
