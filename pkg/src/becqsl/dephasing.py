"""Dephasing function Gamma(t), its time derivative, and the reduced qubit state."""
from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .numerics import DEFAULT_SPEC, NonConvergence, QuadratureSpec, integrate_semi_infinite
from .reservoir import ReservoirModel, group_velocity, k_cutoff


@dataclass(frozen=True)
class QubitState:
    """Bloch vector of the impurity pseudo-spin."""

    x: float = 1.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if self.x**2 + self.y**2 + self.z**2 > 1 + 1e-12:
            raise ValueError(f"Bloch vector ({self.x}, {self.y}, {self.z}) lies outside the unit ball")

    @property
    def coherence(self) -> float:
        return self.x**2 + self.y**2

    def density_matrix(self) -> np.ndarray:
        return evolve(self, 0.0)


class GammaValue(NamedTuple):
    value: float
    error: float


class GammaPair(NamedTuple):
    gamma: float
    gamma_dot: float
    err_gamma: float
    err_gamma_dot: float


def gamma_pair(r: ReservoirModel, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> GammaPair:
    """Gamma(t) and dGamma/dt from one shared quadrature partition.

    Results are memoized on (model, t, spec); all three are immutable.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    return _gamma_pair(r, float(t), spec)


@functools.lru_cache(maxsize=1 << 16)
def _gamma_pair(r: ReservoirModel, t: float, spec: QuadratureSpec) -> GammaPair:
    if t == 0 or r.L == 0:
        return GammaPair(0.0, 0.0, 0.0, 0.0)
    D, ng, m_b, sigma, L = r.dimension, r.ng, r.m_B, r.sigma, r.L

    def integrand(k):
        return np.vstack(kernels.gamma_integrands(k, D, ng, m_b, sigma, L, t))

    def phase_rate(k):
        return t * group_velocity(r, k)

    k_max = k_cutoff(r, min(spec.rel_tol, spec.abs_tol))
    try:
        res = integrate_semi_infinite(integrand, k_max, phase_rate, spec, norm="l1")
    except NonConvergence as exc:
        raise NonConvergence(f"Gamma quadrature failed at t={t!r}, D={D}: {exc}", exc.result) from exc
    pref = r.prefactor
    g, gd = res.value
    eg, egd = res.error_estimate
    return GammaPair(pref * g, pref * gd, pref * eg, pref * egd)


def gamma(r: ReservoirModel, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> GammaValue:
    p = gamma_pair(r, t, spec)
    return GammaValue(p.gamma, p.err_gamma)


def gamma_dot(r: ReservoirModel, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> GammaValue:
    p = gamma_pair(r, t, spec)
    return GammaValue(p.gamma_dot, p.err_gamma_dot)


def gamma_curvature0(r: ReservoirModel, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Second derivative of Gamma at t = 0, the limit of Gamma-dot^2 / (2 Gamma)."""
    if r.L == 0:
        return 0.0
    D, ng, m_b, sigma, L = r.dimension, r.ng, r.m_B, r.sigma, r.L

    def integrand(k):
        # d/dt of the Gamma-dot integrand at t = 0: sin(w t) -> w
        eps = k * k / (2.0 * m_b)
        w = np.sqrt(eps * (2.0 * ng + eps))
        shape = kernels.angular_factor(D, k * L)
        return k ** (D - 1) * shape * np.exp(-0.5 * (k * sigma) ** 2) * w / (2.0 * (2.0 * ng + eps))

    k_max = k_cutoff(r, min(spec.rel_tol, spec.abs_tol))
    return r.prefactor * integrate_semi_infinite(integrand, k_max, None, spec).value


def evolve(state0: QubitState, gamma_value: float) -> np.ndarray:
    """Reduced density matrix in the (|e>, |g>) basis after dephasing by ``gamma_value``."""
    if gamma_value < 0:
        raise ValueError("Gamma must be >= 0")
    c = 0.5 * math.exp(-gamma_value)
    return np.array([
        [0.5 * (1 + state0.z), (state0.x - 1j * state0.y) * c],
        [(state0.x + 1j * state0.y) * c, 0.5 * (1 - state0.z)],
    ])


def default_time_grid(r: ReservoirModel, n: int = 64) -> np.ndarray:
    return r.time_scale * np.logspace(-2, 3, n)


@dataclass
class DephasingCurve:
    times: np.ndarray
    gamma: np.ndarray
    gamma_dot: np.ndarray
    err_gamma: np.ndarray
    err_gamma_dot: np.ndarray
    model: ReservoirModel
    failed: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.failed is None:
            self.failed = np.zeros(len(self.times), dtype=bool)


def sample_curve(r: ReservoirModel, t_grid, spec: QuadratureSpec = DEFAULT_SPEC) -> DephasingCurve:
    """Evaluate Gamma and dGamma/dt on a strictly increasing, non-negative grid.

    Points whose quadrature fails are set to NaN and flagged in ``failed``;
    the remaining points are still evaluated.
    """
    t = np.asarray(t_grid, dtype=float).ravel()
    if t.size == 0 or np.any(t < 0) or np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be non-empty, non-negative and strictly increasing")
    out = np.full((4, t.size), np.nan)
    failed = np.zeros(t.size, dtype=bool)
    for i, ti in enumerate(t):
        try:
            out[:, i] = gamma_pair(r, float(ti), spec)
        except NonConvergence:
            failed[i] = True
    return DephasingCurve(t, out[0], out[1], out[2], out[3], r, failed)


CURVE_COLUMNS = ("t_internal", "t_si_seconds", "gamma", "gamma_dot", "err_gamma", "err_gamma_dot")


def fmt(v: float) -> str:
    """17 significant digits, the fixed float format of every data file."""
    return format(float(v), ".17g")


def write_curve_csv(curve: DephasingCurve, stream, time_unit: float, preamble: str | None = None) -> None:
    if preamble:
        for line in preamble.splitlines():
            stream.write(f"# {line}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for i in range(curve.times.size):
        t = curve.times[i]
        w.writerow([fmt(t), fmt(t * time_unit), fmt(curve.gamma[i]), fmt(curve.gamma_dot[i]),
                    fmt(curve.err_gamma[i]), fmt(curve.err_gamma_dot[i])])
