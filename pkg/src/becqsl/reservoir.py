"""Dimension-reduced condensate reservoir and the Bogoliubov kernel functions.

All quantities are in internal units (nm, 1e-26 kg, hbar = 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .units import PhysicalParams, ParameterError


@dataclass(frozen=True)
class ReservoirModel:
    dimension: int
    g: float      # inter-atomic coupling g_D
    n: float      # number density n_D
    eta: float    # impurity-condensate coupling eta_D
    m_B: float
    sigma: float
    L: float

    @property
    def ng(self) -> float:
        return self.n * self.g

    @property
    def sound_speed(self) -> float:
        return math.sqrt(self.n * self.g / self.m_B)

    @property
    def free(self) -> bool:
        return self.g == 0.0

    @property
    def prefactor(self) -> float:
        """8 eta^2 n / (2 pi)^D, the constant in front of the Gamma integral."""
        return 8.0 * self.eta**2 * self.n / (2.0 * math.pi) ** self.dimension

    @property
    def time_scale(self) -> float:
        """m_B sigma^2, the inverse free-particle cutoff frequency."""
        return self.m_B * self.sigma**2


def reduce(p: PhysicalParams) -> ReservoirModel:
    """Build the D-dimensional reservoir from internal-unit parameters."""
    D = p.dimension
    g3 = 4.0 * math.pi * p.a_B / p.m_B
    eta3 = 2.0 * math.pi * p.a_AB / p.m_AB
    if D == 3:
        g, n, eta = g3, p.n3, eta3
    elif D == 2:
        g = g3 / (math.sqrt(2.0 * math.pi) * p.a_z_B)
        n = math.sqrt(math.pi) * p.n3 * p.a_z_B
        eta = eta3 / math.sqrt(math.pi * (p.a_z_A**2 + p.a_z_B**2))
    elif D == 1:
        g = g3 / (2.0 * math.pi * p.a_perp_B**2)
        n = math.pi * p.n3 * p.a_perp_B**2
        eta = eta3 / (math.pi * (p.a_perp_A**2 + p.a_perp_B**2))
    else:
        raise ParameterError(f"dimension must be 1, 2 or 3, got {D!r}")
    return ReservoirModel(dimension=D, g=g, n=n, eta=eta, m_B=p.m_B, sigma=p.sigma, L=p.L)


def free_energy(r: ReservoirModel, k):
    return np.asarray(k, dtype=float) ** 2 / (2.0 * r.m_B)


def dispersion(r: ReservoirModel, k):
    """Bogoliubov frequency sqrt(2 e_k n g + e_k^2)."""
    eps = free_energy(r, k)
    return np.sqrt(eps * (2.0 * r.ng + eps))


def k_of_omega(r: ReservoirModel, omega):
    """Inverse of :func:`dispersion`."""
    omega = np.asarray(omega, dtype=float)
    ng = r.ng
    # sqrt(ng^2 + w^2) - ng, rewritten to avoid cancellation for w << ng
    diff = omega**2 / (np.sqrt(ng * ng + omega**2) + ng) if ng > 0 else omega
    return np.sqrt(2.0 * r.m_B * diff)


def group_velocity(r: ReservoirModel, k):
    """d omega / d k; equals the sound speed at k = 0 for an interacting gas."""
    k = np.asarray(k, dtype=float)
    eps = free_energy(r, k)
    w = dispersion(r, k)
    with np.errstate(invalid="ignore", divide="ignore"):
        v = k * (r.ng + eps) / (r.m_B * w)
    return np.where(k > 0, v, r.sound_speed)


def angular_factor(dim: int, x):
    """Solid-angle average f_D(x) of sin^2(k.L), x = kL."""
    if dim not in (1, 2, 3):
        raise ValueError(f"dimension must be 1, 2 or 3, got {dim!r}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("angular_factor needs x >= 0")
    out = kernels.angular_factor(dim, np.atleast_1d(x))
    return float(out[0]) if x.ndim == 0 else out.reshape(x.shape)


def k_cutoff(r: ReservoirModel, tol: float) -> float:
    """Wavenumber beyond which the exp(-k^2 sigma^2 / 2) envelope is below ``tol``."""
    return max(math.sqrt(2.0 * math.log(1.0 / tol)), 10.0) / r.sigma
