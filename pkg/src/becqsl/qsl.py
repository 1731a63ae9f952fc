"""Quantum Fisher information, Bures angle and the dephasing speed limit."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .dephasing import QubitState, evolve, gamma_pair
from .numerics import (DEFAULT_SPEC, NoBracket, QuadratureSpec, find_root_monotone,
                       integrate_interval)
from .reservoir import ReservoirModel

_ROUNDOFF = 1e-12


class NegativeDenominator(ArithmeticError):
    """1 - z^2 - C e^{-2 Gamma} < 0, impossible for a valid state."""


def _purity_gap(state: QubitState, g: float) -> float:
    """1 - z^2 - C e^{-2 Gamma}, written so small Gamma keeps full relative accuracy."""
    c = state.coherence
    gap0 = 1.0 - state.z**2 - c
    if -_ROUNDOFF < gap0 < 0:
        gap0 = 0.0
    den = gap0 - c * math.expm1(-2.0 * g)
    if den < 0:
        raise NegativeDenominator(f"purity gap {den!r} < 0 for state {state}")
    return den


def qfi(state: QubitState, g: float, gdot: float, curvature: float | None = None) -> float:
    """Quantum Fisher information with respect to time for the dephased qubit.

    For a pure state at Gamma = 0 the closed form is 0/0. Its limit along
    the trajectory is (1 - z^2) times the second derivative of Gamma at
    t = 0; pass that as ``curvature`` (see ``gamma_curvature0``), otherwise
    NaN is returned there.
    """
    if g < 0:
        raise ValueError("Gamma must be >= 0")
    c = state.coherence
    q = 1.0 - state.z**2
    if c == 0.0 or q == 0.0:
        return 0.0
    den = _purity_gap(state, g)
    if den == 0.0:
        return math.nan if curvature is None else q * curvature
    return q * c * gdot**2 * math.exp(-2.0 * g) / den


class Eigensystem(NamedTuple):
    p_plus: float
    p_minus: float
    psi_plus: np.ndarray
    psi_minus: np.ndarray
    degenerate: bool


def eigensystem(state: QubitState, g: float) -> Eigensystem:
    """Eigenvalues (1 -/+ A)/2 and eigenvectors of the dephased state, (|e>, |g>) basis."""
    z = state.z
    off = (state.x - 1j * state.y) * math.exp(-g)
    A = math.hypot(abs(off), z)   # sqrt(C e^{-2 Gamma} + z^2) without squaring tiny components
    pp, pm = 0.5 * (1.0 - A), 0.5 * (1.0 + A)
    if A == 0.0:
        return Eigensystem(pp, pm, np.array([1.0 + 0j, 0j]), np.array([0j, 1.0 + 0j]), True)
    if off == 0:
        # diagonal state: the general vectors collapse, use the basis directly
        e, gs = np.array([1.0 + 0j, 0j]), np.array([0j, 1.0 + 0j])
        return Eigensystem(pp, pm, gs if z > 0 else e, e if z > 0 else gs, False)
    # scale-free form (divide through by A); each vector has two equivalent
    # expressions, pick the one free of A - |z| cancellation
    u, zeta = off / A, z / A
    n = math.hypot(abs(u), zeta)   # exactly 1 unless A is subnormal
    u, zeta = u / n, zeta / n
    if zeta >= 0:
        plus = np.array([u, -(1.0 + zeta)]) / math.sqrt(2.0 * (1.0 + zeta))
        minus = np.array([1.0 + zeta, np.conj(u)]) / math.sqrt(2.0 * (1.0 + zeta))
    else:
        plus = np.array([1.0 - zeta, -np.conj(u)]) / math.sqrt(2.0 * (1.0 - zeta))
        minus = np.array([u, 1.0 - zeta]) / math.sqrt(2.0 * (1.0 - zeta))
    return Eigensystem(pp, pm, plus, minus, False)


def drho_dt(state: QubitState, g: float, gdot: float) -> np.ndarray:
    off = -0.5 * gdot * math.exp(-g)
    return np.array([[0.0, (state.x - 1j * state.y) * off], [(state.x + 1j * state.y) * off, 0.0]])


def qfi_from_eigensystem(state: QubitState, g: float, gdot: float) -> float:
    """QFI as the sum over eigenpairs of 2/(p_m + p_n) |<m|d rho|n>|^2."""
    es = eigensystem(state, g)
    d = drho_dt(state, g, gdot)
    vecs = (es.psi_plus, es.psi_minus)
    ps = (es.p_plus, es.p_minus)
    total = 0.0
    for i in range(2):
        for j in range(2):
            s = ps[i] + ps[j]
            if s > 0:
                total += 2.0 / s * abs(np.conj(vecs[i]) @ d @ vecs[j]) ** 2
    return total


def bloch_vector(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError("expected a 2x2 density matrix")
    if abs(np.trace(rho) - 1) > _ROUNDOFF or np.max(np.abs(rho - rho.conj().T)) > _ROUNDOFF:
        raise ValueError("density matrix must be Hermitian with unit trace")
    r = np.array([2 * rho[1, 0].real, 2 * rho[1, 0].imag, (rho[0, 0] - rho[1, 1]).real])
    n = float(r @ r)
    if n > 1 + _ROUNDOFF:
        raise ValueError("density matrix is not positive semidefinite")
    return r / math.sqrt(n) if n > 1 else r


def bures_angle(rho0, rho1) -> float:
    """arccos sqrt(F) with the qubit closed form of the Uhlmann fidelity.

    1 - F is evaluated as (|r-s|^2 - |r x s|^2) / (2 (1 - r.s + sqrt((1-r^2)(1-s^2))))
    so that nearby states keep their relative accuracy.
    """
    r, s = bloch_vector(rho0), bloch_vector(rho1)
    root = math.sqrt(max(0.0, 1 - r @ r) * max(0.0, 1 - s @ s))
    rs = float(r @ s)
    den = 2.0 * (1.0 - rs + root)
    num = float((r - s) @ (r - s) - np.cross(r, s) @ np.cross(r, s))
    if den <= 0.0:
        return 0.0
    one_minus_f = num / den
    if one_minus_f < -_ROUNDOFF or one_minus_f > 1 + _ROUNDOFF:
        raise ValueError(f"fidelity out of range: 1 - F = {one_minus_f!r}")
    one_minus_f = min(max(one_minus_f, 0.0), 1.0)
    return math.atan2(math.sqrt(one_minus_f), math.sqrt(1.0 - one_minus_f))


@dataclass(frozen=True)
class QslProblem:
    reservoir: ReservoirModel
    state: QubitState = QubitState()
    distance: float = 0.0
    tolerance: float = 1e-12
    t_max: float | None = None
    spec: QuadratureSpec = field(default=DEFAULT_SPEC)

    def __post_init__(self):
        if not (0 <= self.distance < math.pi / 2):
            raise ValueError("target distance must lie in [0, pi/2)")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.t_max is not None and not self.t_max > 0:
            raise ValueError("t_max must be positive")

    @property
    def horizon(self) -> float:
        return self.t_max if self.t_max is not None else 1e4 * self.reservoir.time_scale


@dataclass(frozen=True)
class QslResult:
    tau: float | None          # None means unreachable within the horizon
    v_qsl: float | None
    achieved: float            # D_UB at tau, or the supremum on the horizon
    sup_dub: float
    iterations: int
    distance: float

    @property
    def reachable(self) -> bool:
        return self.tau is not None


def _dub_integrand(problem: QslProblem):
    state, r, spec = problem.state, problem.reservoir, problem.spec
    c, q = state.coherence, 1.0 - state.z**2
    amp = 0.5 * math.sqrt(q * c)

    def f(ts):
        # row 0: integrand, row 1: its error bound from the Gamma-dot quadrature
        out = np.zeros((2, len(ts)))
        for i, t in enumerate(ts):
            gp = gamma_pair(r, float(t), spec)
            den = _purity_gap(state, gp.gamma)
            if den > 0:
                w = amp * math.exp(-gp.gamma) / math.sqrt(den)
                out[0, i] = w * abs(gp.gamma_dot)
                out[1, i] = w * gp.err_gamma_dot
        return out

    return f


def _dub_segment(problem: QslProblem, f, a: float, b: float, scale: float) -> float:
    if b <= a:
        return 0.0
    spec = problem.spec
    # error budget shared across the scan in proportion to segment width
    share = max(1e-3, (b - a) / problem.horizon)
    seg_spec = QuadratureSpec(rel_tol=spec.rel_tol, abs_tol=max(spec.abs_tol * 1e-3, spec.rel_tol * scale * share),
                              max_panels=spec.max_panels, oscillation_guard=spec.oscillation_guard)
    return float(integrate_interval(f, a, b, seg_spec, n_initial=1, noise_row=True).value[0])


def distance_bound(problem: QslProblem, tau: float) -> float:
    """Upper bound on the Bures angle reached at time ``tau``."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if tau == 0 or problem.state.coherence == 0 or problem.state.z**2 == 1:
        return 0.0
    f = _dub_integrand(problem)
    total = 0.0
    for a, b in _scan_edges(problem.reservoir.time_scale, tau):
        total += _dub_segment(problem, f, a, b, total)
    return total


def _scan_edges(t0: float, t_end: float, first: float = 1e-4):
    """[0, t1], [t1, 2 t1], ... doubling panels up to t_end."""
    a, b = 0.0, first * t0
    while a < t_end:
        b = min(b, t_end)
        yield a, b
        a, b = b, 2 * b


def solve_tau_qsl(problem: QslProblem) -> QslResult:
    """Smallest tau with D_UB(tau) equal to the target distance."""
    D = problem.distance
    if D == 0:
        return QslResult(0.0, 0.0, 0.0, 0.0, 0, D)
    if problem.state.coherence == 0 or problem.state.z**2 == 1:
        return QslResult(None, None, 0.0, 0.0, 0, D)
    f = _dub_integrand(problem)
    cum = 0.0
    for a, b in _scan_edges(problem.reservoir.time_scale, problem.horizon):
        seg = _dub_segment(problem, f, a, b, max(cum, D))
        if cum + seg >= D:
            base = cum

            def g(tau):
                return base + _dub_segment(problem, f, a, tau, max(base, D)) - D

            try:
                tau, iters = find_root_monotone(g, a, b, problem.tolerance, glo=base - D, ghi=base + seg - D)
            except NoBracket:
                break
            achieved = g(tau) + D
            return QslResult(tau, D / tau, achieved, achieved, iters, D)
        cum += seg
    return QslResult(None, None, cum, cum, 0, D)


def distance_bound_curve(problem: QslProblem, times) -> np.ndarray:
    """D_UB at each time of a non-decreasing grid, accumulated in one pass."""
    t = np.asarray(times, dtype=float).ravel()
    if t.size and (t[0] < 0 or np.any(np.diff(t) < 0)):
        raise ValueError("times must be non-negative and non-decreasing")
    out = np.zeros(t.size)
    if t.size == 0 or problem.state.coherence == 0 or problem.state.z**2 == 1:
        return out
    f = _dub_integrand(problem)
    marks = sorted({b for _, b in _scan_edges(problem.reservoir.time_scale, float(t[-1]))} | set(t.tolist()))
    total, prev, j = 0.0, 0.0, 0
    for m in marks:
        total += _dub_segment(problem, f, prev, m, total)
        prev = m
        while j < t.size and t[j] <= m:
            out[j] = total
            j += 1
    return out
