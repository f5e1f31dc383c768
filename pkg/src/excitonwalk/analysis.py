"""Transfer efficiency, transfer time and their sensitivities.

The efficiency is the total probability absorbed by the acceptor,
``eta = c . int_0^inf vec(rho) dt`` with ``c . vec(rho) = sum_m k_m rho_mm``.
Sensitivities are taken with respect to uniform scalings ``lambda_k`` of the
named generator parts, evaluated at ``lambda = 1``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import partial
from typing import Sequence

import numpy as np
import scipy.linalg

from .dynamics import check_hurwitz, quadrature_integrals, stationary_integrals
from .liouville import Supermatrix, build_model, sandwich, left, right, vectorize
from .model import HBAR, BathSpec, DensityState, NetworkSpec


@dataclass(frozen=True)
class EfficiencyReport:
    eta: float
    tau: float
    eta_loss: float
    residual: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class SusceptibilityReport:
    channels: tuple[str, ...]
    values: np.ndarray
    method: str
    hessian: np.ndarray | None = None

    def as_dict(self) -> dict[str, float]:
        return {k: float(v) for k, v in zip(self.channels, self.values)}

    @property
    def total(self) -> float:
        return float(np.sum(self.values))


def _efficiency_from(sm: Supermatrix, s1: np.ndarray, s2: np.ndarray) -> EfficiencyReport:
    c = sm.trap_functional()
    eta = float((c @ vectorize(s1)).real)
    eta_loss = float((sm.loss_functional() @ vectorize(s1)).real)
    tau = float((c @ vectorize(s2)).real) / eta if eta > 0 else math.nan
    return EfficiencyReport(eta, tau, eta_loss, 1.0 - eta - eta_loss)


def ete(sm: Supermatrix, rho0: DensityState) -> EfficiencyReport:
    """Efficiency and mean transfer time from the stationary integrals."""
    s1, s2 = stationary_integrals(sm, rho0)
    report = _efficiency_from(sm, s1, s2)
    if not (-1e-8 <= report.eta <= 1 + 1e-8):
        raise ArithmeticError(f"efficiency {report.eta} outside [0, 1]")
    return report


def ete_quadrature(sm: Supermatrix, rho0: DensityState, **kwargs) -> EfficiencyReport:
    """Time-domain cross-check of :func:`ete`."""
    s1, s2 = quadrature_integrals(sm, rho0, **kwargs)
    return _efficiency_from(sm, s1, s2)


def _eta(sm: Supermatrix, rho0: DensityState) -> float:
    return ete(sm, rho0).eta


def susceptibility(sm: Supermatrix, rho0: DensityState, method: str = "analytic",
                   step: float = 1e-4, channels: Sequence[str] | None = None) -> SusceptibilityReport:
    """First derivatives of the efficiency with respect to each part scaling."""
    names = tuple(channels) if channels is not None else sm.names
    if method == "analytic":
        check_hurwitz(sm)
        lu = scipy.linalg.lu_factor(sm.matrix)
        v0 = vectorize(rho0)
        x = scipy.linalg.lu_solve(lu, v0)                      # M^-1 v0
        c = sm.trap_functional()
        w = scipy.linalg.lu_solve(lu, c.astype(complex), trans=1)  # c M^-1 (as a column)
        eta = -(c @ x).real
        values = []
        for k in names:
            val = (w @ (sm.parts[k] @ x)).real
            if k == "trap":
                val += eta / sm.scalings["trap"]
            values.append(val)
    elif method == "finite-difference":
        values = []
        for k in names:
            lam = sm.scalings[k]
            up = _eta(sm.scaled(**{k: lam + step}), rho0)
            down = _eta(sm.scaled(**{k: lam - step}), rho0)
            values.append((up - down) / (2 * step))
    else:
        raise ValueError(f"unknown method {method!r}")
    return SusceptibilityReport(names, np.array(values, float), method)


def hessian(sm: Supermatrix, rho0: DensityState, method: str = "finite-difference",
            step: float = 1e-3, channels: Sequence[str] | None = None) -> SusceptibilityReport:
    """Second derivatives of the efficiency in the part scalings.

    The default uses central second differences; ``method="analytic"`` uses
    resolvent identities.
    """
    names = tuple(channels) if channels is not None else sm.names
    k = len(names)
    hess = np.zeros((k, k))
    if method == "finite-difference":
        base = _eta(sm, rho0)
        lam = sm.scalings

        def at(**shift):
            return _eta(sm.scaled(**{n: lam[n] + d for n, d in shift.items()}), rho0)

        for i, a in enumerate(names):
            hess[i, i] = (at(**{a: step}) - 2 * base + at(**{a: -step})) / step**2
            for j in range(i + 1, k):
                b = names[j]
                val = (at(**{a: step, b: step}) - at(**{a: step, b: -step})
                       - at(**{a: -step, b: step}) + at(**{a: -step, b: -step})) / (4 * step**2)
                hess[i, j] = hess[j, i] = val
    elif method == "analytic":
        check_hurwitz(sm)
        m = sm.matrix
        lu = scipy.linalg.lu_factor(m)
        v0 = vectorize(rho0)
        c = sm.trap_functional()
        lam_t = sm.scalings["trap"]
        c0 = c / lam_t
        # G = -M^-1;  dG/dl_j = G L_j G;  d2G/dl_j dl_k = G L_k G L_j G + G L_j G L_k G
        g_v = -scipy.linalg.lu_solve(lu, v0)
        c_g = -scipy.linalg.lu_solve(lu, c.astype(complex), trans=1)
        c0_g = c_g / lam_t
        g_l_g_v = {n: -scipy.linalg.lu_solve(lu, sm.parts[n] @ g_v) for n in names}
        for i, a in enumerate(names):
            for j, b in enumerate(names):
                val = c_g @ sm.parts[b] @ g_l_g_v[a] + c_g @ sm.parts[a] @ g_l_g_v[b]
                if a == "trap":
                    val += c0_g @ sm.parts[b] @ g_v
                if b == "trap":
                    val += c0_g @ sm.parts[a] @ g_v
                hess[i, j] = val.real
    else:
        raise ValueError(f"unknown method {method!r}")
    grad = susceptibility(sm, rho0, "analytic", channels=names).values
    return SusceptibilityReport(names, grad, method, hess)


def site_pair_part(sm: Supermatrix, m: int, n: int) -> np.ndarray:
    """Generator of phonon jumps from site ``m`` to site ``n`` with their own damping.

    ``r (W_nm rho W_nm^† - 1/2 {|m><m|, rho})`` with ``r = gamma[n, m, n, m]``.
    The term is trace preserving, so it only redirects population.
    """
    if sm.gamma is None:
        raise ValueError("supermatrix carries no phonon jump tensor")
    size = sm.n_sites
    if not (0 <= m < size and 0 <= n < size) or m == n:
        raise ValueError(f"invalid site pair ({m}, {n})")
    rate = sm.gamma[n, m, n, m].real
    w = np.zeros((size, size))
    w[n, m] = 1.0
    proj = np.zeros((size, size))
    proj[m, m] = 1.0
    return rate * (sandwich(w, w) - 0.5 * (left(proj) + right(proj)))


def site_pair_susceptibility(sm: Supermatrix, rho0: DensityState, m: int, n: int) -> float:
    """Efficiency sensitivity to scaling the ``m -> n`` site jump (0-based)."""
    part = site_pair_part(sm, m, n)
    check_hurwitz(sm)
    lu = scipy.linalg.lu_factor(sm.matrix)
    x = scipy.linalg.lu_solve(lu, vectorize(rho0))
    w = scipy.linalg.lu_solve(lu, sm.trap_functional().astype(complex), trans=1)
    return float((w @ (part @ x)).real)


def pathway_map(sm: Supermatrix, rho0: DensityState) -> list[tuple[int, int, float]]:
    """Susceptibility of every ordered site pair ``(m, n)``, ``m -> n``, 0-based."""
    check_hurwitz(sm)
    lu = scipy.linalg.lu_factor(sm.matrix)
    x = scipy.linalg.lu_solve(lu, vectorize(rho0))
    w = scipy.linalg.lu_solve(lu, sm.trap_functional().astype(complex), trans=1)
    out = []
    size = sm.n_sites
    for m in range(size):
        for n in range(size):
            if m != n:
                out.append((m, n, float((w @ (site_pair_part(sm, m, n) @ x)).real)))
    return out


@dataclass(frozen=True)
class GroverReport:
    max_overlap: float
    time_of_max: float
    alpha: float
    beta: float
    conditions: dict

    def to_dict(self) -> dict:
        return asdict(self)


def grover_check(net: NetworkSpec, rho0: DensityState, target_site: int, t_max: float = 10.0,
                 dt: float = 1e-3, tol: float = 0.1) -> GroverReport:
    """Test the unitary channel dynamics against the conditions for a quantum search.

    ``alpha = 1 - <psi_ES|rho0|psi_ES>`` with ``psi_ES`` the uniform superposition,
    and ``beta = 1 - max_t <target|U(t) rho0 U(t)^†|target>`` over a grid of step
    ``dt`` up to ``t_max`` (ps). Conditions (i) and (ii) hold when the
    respective quantity is below ``tol``. Condition (iii) concerns scaling with
    network size and is left undecided (``None``) for a single network;
    ``time_of_max``, the first peak within 1e-6 of the maximum, is reported instead.
    """
    size = net.n_sites
    if not (0 <= target_site < size):
        raise ValueError(f"invalid target index {target_site}")
    if t_max <= 0 or dt <= 0:
        raise ValueError("t_max and dt must be positive")
    energies, vecs = np.linalg.eigh(net.hamiltonian())
    times = np.arange(0.0, t_max + 0.5 * dt, dt)
    rho_exc = vecs.T @ rho0.matrix @ vecs
    row = vecs[target_site, :]
    phases = np.exp(-1j * np.outer(times, energies) / HBAR)  # (T, N)
    amp = phases * row[None, :]
    overlap = np.einsum("ta,ab,tb->t", amp, rho_exc, amp.conj()).real
    # periodic dynamics revisit the same peak; report its first occurrence
    k = int(np.argmax(overlap >= overlap.max() - 1e-6))
    while k + 1 < overlap.size and overlap[k + 1] > overlap[k]:
        k += 1
    psi_es = np.full(size, 1 / math.sqrt(size))
    alpha = 1.0 - float((psi_es @ rho0.matrix @ psi_es).real)
    best = float(overlap.max())
    beta = 1.0 - best
    conditions = {"i": alpha < tol, "ii": beta < tol, "iii": None}
    return GroverReport(best, float(times[k]), alpha, beta, conditions)


SWEEP_PARAMETERS = ("temperature", "reorg_energy", "trap_rate")


def _sweep_point(value: float, net: NetworkSpec, bath: BathSpec, parameter: str,
                 rho0: DensityState, trap_site: int | None) -> EfficiencyReport:
    if parameter == "temperature":
        bath = bath.replace(temperature=value)
    elif parameter == "reorg_energy":
        bath = bath.replace(reorg_energy=value)
    else:
        traps = np.array(net.trap_rates)
        traps[trap_site] = value
        net = net.replace(trap_rates=traps)
    return ete(build_model(net, bath), rho0)


def sweep(net: NetworkSpec, bath: BathSpec, parameter: str, grid: Sequence[float],
          rho0: DensityState, trap_site: int | None = None, jobs: int = 1) -> list[EfficiencyReport]:
    """Efficiency at each grid value of one parameter, in grid order.

    ``trap_rate`` sets the rate of ``trap_site``; by default the single site
    with a nonzero trap rate.
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"unknown sweep parameter {parameter!r}")
    grid = [float(g) for g in grid]
    if any(g < 0 for g in grid):
        raise ValueError("sweep grid values must be non-negative")
    if parameter == "trap_rate" and trap_site is None:
        sites = np.flatnonzero(net.trap_rates)
        if sites.size != 1:
            raise ValueError("trap_site is required unless exactly one site traps")
        trap_site = int(sites[0])
    work = partial(_sweep_point, net=net, bath=bath, parameter=parameter, rho0=rho0,
                   trap_site=trap_site)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(work, grid))
    return [work(g) for g in grid]
