"""Time propagation and infinite-horizon integrals of the Liouville dynamics."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .liouville import Supermatrix, devectorize, vectorize
from .model import DensityState


class NotHurwitzError(RuntimeError):
    """The generator has an eigenvalue with non-negative real part."""


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    rho: np.ndarray  # (T, N, N)
    trapped: np.ndarray
    lost: np.ndarray
    trapped_flux: np.ndarray
    lost_flux: np.ndarray

    @property
    def states(self) -> list[DensityState]:
        return [DensityState(r, t, l) for r, t, l in zip(self.rho, self.trapped, self.lost)]

    @property
    def total_weight(self) -> np.ndarray:
        return np.einsum("tii->t", self.rho).real + self.trapped + self.lost

    def to_csv(self, path) -> None:
        n = self.rho.shape[1]
        upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
        header = (["time_ps"] + [f"p{i + 1}" for i in range(n)]
                  + [f"abs_c{i + 1}_{j + 1}" for i, j in upper] + ["trapped", "lost"])
        cols = [self.times]
        cols += [self.rho[:, i, i].real for i in range(n)]
        cols += [np.abs(self.rho[:, i, j]) for i, j in upper]
        cols += [self.trapped, self.lost]
        table = np.column_stack(cols)
        with Path(path).open("w") as fh:
            fh.write(",".join(header) + "\n")
            for row in table:
                fh.write(",".join(f"{x:.12g}" for x in row) + "\n")


def spectral_abscissa(sm: Supermatrix | np.ndarray) -> float:
    m = sm.matrix if isinstance(sm, Supermatrix) else np.asarray(sm)
    return float(np.linalg.eigvals(m).real.max())


def _augmented(sm: Supermatrix) -> np.ndarray:
    # extra rows integrate the trapping and loss fluxes into the two sinks
    m = sm.matrix
    d = m.shape[0]
    g = np.zeros((d + 2, d + 2), complex)
    g[:d, :d] = m
    g[d, :d] = sm.trap_functional()
    g[d + 1, :d] = sm.loss_functional()
    return g


def propagate(sm: Supermatrix, rho0: DensityState, times) -> Trajectory:
    """Evolve ``rho0`` through the sampled ``times`` (ps) with exact matrix exponentials.

    The sinks are integrated inside the same exponential, so trace plus
    trapped plus lost weight is conserved to rounding.
    """
    times = np.asarray(times, float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty vector")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be ascending and start at t >= 0")
    g = _augmented(sm)
    d = g.shape[0] - 2
    n = sm.n_sites
    state = np.concatenate([vectorize(rho0), [rho0.trapped_weight, rho0.lost_weight]])
    cache: dict[float, np.ndarray] = {}
    out = np.empty((times.size, d + 2), complex)
    prev = 0.0
    for k, t in enumerate(times):
        dt = t - prev
        if dt > 0:
            key = round(dt, 12)
            step = cache.get(key)
            if step is None:
                step = scipy.linalg.expm(g * dt)
                cache[key] = step
            state = step @ state
        out[k] = state
        prev = t
    rho = np.moveaxis(devectorize(out[:, :d].T, n), 2, 0)
    rho = 0.5 * (rho + np.conj(np.swapaxes(rho, 1, 2)))
    vecs = out[:, :d]
    return Trajectory(
        times=times,
        rho=rho,
        trapped=out[:, d].real,
        lost=out[:, d + 1].real,
        trapped_flux=(vecs @ sm.trap_functional()).real,
        lost_flux=(vecs @ sm.loss_functional()).real,
    )


def check_hurwitz(sm: Supermatrix) -> float:
    m = sm.matrix
    abscissa = spectral_abscissa(m)
    tol = 1e-10 * max(1.0, float(np.abs(m).max()))
    if abscissa >= -tol:
        raise NotHurwitzError(
            f"generator is not Hurwitz (spectral abscissa {abscissa:.3g} ps^-1); "
            "enable loss or trapping")
    return abscissa


def stationary_integrals(sm: Supermatrix, rho0: DensityState) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(int_0^inf rho dt, int_0^inf t rho dt)`` as density matrices.

    Solves ``M x = -vec(rho0)`` and ``M y = -x``.
    """
    check_hurwitz(sm)
    lu = scipy.linalg.lu_factor(sm.matrix)
    x = scipy.linalg.lu_solve(lu, -vectorize(rho0))
    y = scipy.linalg.lu_solve(lu, -x)
    n = sm.n_sites
    return devectorize(x, n), devectorize(y, n)


def default_horizon(sm: Supermatrix) -> float:
    return 20.0 / abs(check_hurwitz(sm))


def quadrature_integrals(sm: Supermatrix, rho0: DensityState, horizon: float | None = None,
                         panels: int = 400, order: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Time-domain estimates of the same two integrals.

    Composite Gauss-Legendre over geometrically growing panels on
    ``[0, horizon]``, with states from matrix exponentials. Independent of the
    linear solve in :func:`stationary_integrals`.
    """
    if horizon is None:
        horizon = default_horizon(sm)
    m = sm.matrix
    first = min(1e-3, horizon / panels)
    edges = np.concatenate([[0.0], np.geomspace(first, horizon, panels)])
    nodes, weights = np.polynomial.legendre.leggauss(order)
    v = vectorize(rho0)
    s1 = np.zeros_like(v)
    s2 = np.zeros_like(v)
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        ts = a + half * (nodes + 1.0)
        for t, w in zip(ts, weights):
            vt = scipy.linalg.expm(m * (t - a)) @ v
            s1 += half * w * vt
            s2 += half * w * t * vt
        v = scipy.linalg.expm(m * (b - a)) @ v
    n = sm.n_sites
    return devectorize(s1, n), devectorize(s2, n)
