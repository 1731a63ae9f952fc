"""Spectral density of the condensate reservoir and its low-frequency asymptotics."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .dephasing import fmt
from .numerics import DEFAULT_SPEC, QuadratureSpec, integrate_semi_infinite
from .reservoir import ReservoirModel, angular_factor, dispersion, k_cutoff, k_of_omega

OHMIC_BAND = 0.05


class InvalidRegime(ValueError):
    pass


class DegenerateFit(ValueError):
    pass


@dataclass(frozen=True)
class SpectralModel:
    reservoir: ReservoirModel
    regime: str          # "free" or "interacting"
    cutoff: float
    exponent: float
    prefactor: float


def free_prefactor(r: ReservoirModel, with_l2: bool = True) -> float:
    """A_D. ``with_l2=False`` gives the three-dimensional form without the L^2 factor."""
    D, eta, n, m, L = r.dimension, r.eta, r.n, r.m_B, r.L
    if D == 1:
        return eta**2 * n * m**1.5 * L**2 / (math.sqrt(2.0) * math.pi)
    if D == 2:
        return eta**2 * n * m**2 * L**2 / (2.0 * math.pi)
    a3 = math.sqrt(2.0) * eta**2 * n * m**2.5 / (3.0 * math.pi**2)
    return a3 * L**2 if with_l2 else a3


def interacting_prefactor(r: ReservoirModel) -> float:
    """B_D."""
    D, eta, n, g, m, L = r.dimension, r.eta, r.n, r.g, r.m_B, r.L
    if D == 1:
        return eta**2 * L**2 * m**1.5 / (4.0 * math.pi * g**2.5 * n**1.5)
    if D == 2:
        return eta**2 * L**2 * m**2 / (8.0 * math.pi * g**3 * n**2)
    return eta**2 * L**2 * m**2.5 / (12.0 * math.pi**2 * g**3.5 * n**2.5)


def spectral_model(r: ReservoirModel, regime: str | None = None) -> SpectralModel:
    regime = regime or ("free" if r.free else "interacting")
    if regime == "free":
        return SpectralModel(r, "free", 1.0 / r.time_scale, r.dimension / 2.0, free_prefactor(r))
    if regime == "interacting":
        if r.g <= 0:
            raise InvalidRegime("interacting asymptotics need g_D > 0")
        return SpectralModel(r, "interacting", math.sqrt(2.0) * r.sound_speed / r.sigma,
                             float(r.dimension + 2), interacting_prefactor(r))
    raise InvalidRegime(f"unknown regime {regime!r}")


def low_frequency_limit(m: SpectralModel) -> float:
    """Upper end of the window where the asymptotic form is trusted.

    Free: 1e-2 min(omega_c, omega_L) with omega_L = 1/(m_B L^2). Interacting: 1e-2 n g.
    """
    r = m.reservoir
    if m.regime == "free":
        w_l = 1.0 / (r.m_B * r.L**2) if r.L > 0 else math.inf
        return 1e-2 * min(m.cutoff, w_l)
    return 1e-2 * r.ng


def j_exact(r: ReservoirModel, omega):
    """J(omega) through the root k(omega) of the dispersion relation."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise ValueError("omega must be >= 0")
    k = k_of_omega(r, w)
    eps = k * k / (2.0 * r.m_B)
    D = r.dimension
    f = angular_factor(D, k * r.L)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(k > 0, eps / (r.ng + eps), 0.0)
        kf = f * k ** (D - 2) if D > 1 else np.where(k > 0, f / k, 0.0)
    pref = r.eta**2 * r.n * r.m_B / (2.0 * math.pi) ** D
    out = pref * kf * ratio * np.exp(-0.5 * (k * r.sigma) ** 2)
    return float(out) if np.ndim(omega) == 0 else out


def j_asymptotic(m: SpectralModel, omega):
    w = np.asarray(omega, dtype=float)
    if m.regime == "free":
        out = m.prefactor * w**m.exponent * np.exp(-w / m.cutoff)
    else:
        out = m.prefactor * w**m.exponent * np.exp(-((w / m.cutoff) ** 2))
    return float(out) if np.ndim(omega) == 0 else out


@dataclass(frozen=True)
class OhmicityFit:
    exponent: float
    classification: str
    omega_lo: float
    omega_hi: float
    n_points: int


def classify(s: float) -> str:
    if abs(s - 1.0) <= OHMIC_BAND:
        return "ohmic"
    return "sub-ohmic" if s < 1.0 else "super-ohmic"


def fit_ohmicity(r: ReservoirModel, omega_lo: float, omega_hi: float, n_points: int = 32) -> OhmicityFit:
    """Least-squares slope of log J against log omega on a log grid."""
    if not (0 < omega_lo < omega_hi) or n_points < 2:
        raise ValueError("need 0 < omega_lo < omega_hi and n_points >= 2")
    w = np.logspace(math.log10(omega_lo), math.log10(omega_hi), n_points)
    j = j_exact(r, w)
    if np.any(~np.isfinite(j)) or np.any(j <= 0):
        raise DegenerateFit("spectral density vanishes on the fit window")
    s = float(np.polyfit(np.log(w), np.log(j), 1)[0])
    return OhmicityFit(s, classify(s), omega_lo, omega_hi, n_points)


def gamma_from_spectrum(r: ReservoirModel, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Gamma(t) = 8 int_0^inf J(w) sin^2(w t / 2) / w^2 dw."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0 or r.L == 0:
        return 0.0

    def integrand(w):
        # sin^2(w t/2)/w^2 = (t/2)^2 sinc^2(w t / 2 pi) in numpy's sinc convention
        return 8.0 * j_exact(r, w) * (0.5 * t) ** 2 * np.sinc(w * t / (2.0 * math.pi)) ** 2

    w_max = float(dispersion(r, k_cutoff(r, min(spec.rel_tol, spec.abs_tol))))
    return integrate_semi_infinite(integrand, w_max, lambda w: np.full_like(w, t), spec).value


SPECTRUM_COLUMNS = ("omega_internal", "j_exact", "j_asymptotic", "ratio")


def spectrum_table(m: SpectralModel, omegas) -> np.ndarray:
    w = np.asarray(omegas, dtype=float)
    je = j_exact(m.reservoir, w)
    ja = j_asymptotic(m, w)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(ja > 0, je / ja, np.nan)
    return np.column_stack([w, je, ja, ratio])


def write_spectrum_csv(table: np.ndarray, stream, preamble: str | None = None) -> None:
    if preamble:
        for line in preamble.splitlines():
            stream.write(f"# {line}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(SPECTRUM_COLUMNS)
    for row in table:
        w.writerow([fmt(v) for v in row])
