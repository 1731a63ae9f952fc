"""Quadrature, root finding and derivative helpers shared by the physics modules."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# nodes on [-1, 1] in ascending order, with matching weights
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[1:7:2] = _WG[:3]
_GW[7] = _WG[3]
_GW[9:15:2] = _WG[:3][::-1]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


class NonConvergence(RuntimeError):
    """Adaptive quadrature ran out of panels before meeting its tolerance."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NoBracket(ValueError):
    """The target value is not enclosed by the search interval."""


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_panels: int = 1 << 18
    oscillation_guard: float = math.pi

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_panels < 16:
            raise ValueError("max_panels must be at least 16")
        if not self.oscillation_guard > 0:
            raise ValueError("oscillation_guard must be positive")


DEFAULT_SPEC = QuadratureSpec()


@dataclass
class QuadResult:
    value: float | np.ndarray
    error_estimate: float | np.ndarray
    panels_used: int
    converged: bool


def _gk_panels(f, a, b):
    """Kronrod sum, Gauss sum, |f| integral and QUADPACK error per panel.

    ``f`` maps a 1-D array of abscissae to an array of shape ``(n,)`` or
    ``(m, n)``; outputs then have shape ``(npanels,)`` or ``(m, npanels)``.
    """
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    x = center[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float)
    fx = fx.reshape(fx.shape[:-1] + x.shape)
    kron = (fx @ _KW) * half
    gauss = (fx @ _GW) * half
    resabs = (np.abs(fx) @ _KW) * np.abs(half)
    mean = (kron / np.where(half != 0, 2 * half, 1.0))[..., None]
    resasc = (np.abs(fx - mean) @ _KW) * np.abs(half)
    err = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    floor = 50 * _EPS * resabs
    err = np.where(resabs > _TINY / (50 * _EPS), np.maximum(floor, err), err)
    return kron, gauss, resabs, err


def adaptive_gk(f: Callable, edges, spec: QuadratureSpec = DEFAULT_SPEC, norm: str = "value",
                noise_row: bool = False) -> QuadResult:
    """Globally adaptive Gauss-Kronrod over an initial partition ``edges``.

    Panels whose error share exceeds their width share of the tolerance are
    bisected until the total error estimate meets
    ``max(rel_tol * scale, abs_tol)``, where ``scale`` is ``|value|`` for
    ``norm="value"`` or the integral of ``|f|`` for ``norm="l1"`` (useful for
    sign-changing integrands). Vector-valued ``f`` is handled component-wise
    on a shared partition. With ``noise_row`` the last component of ``f`` is
    a pointwise error bound on the others; its integral then acts as a floor
    on their tolerance, so noise in an expensive integrand cannot force
    endless refinement. Raises NonConvergence when ``max_panels`` is hit.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    total_width = float(np.sum(np.abs(b - a)))
    done_val = done_err = done_abs = 0.0
    n_done = 0
    while True:
        kron, _, resabs, err = _gk_panels(f, a, b)
        value = done_val + kron.sum(axis=-1)
        error = done_err + err.sum(axis=-1)
        l1 = done_abs + resabs.sum(axis=-1)
        scale = np.abs(value) if norm == "value" else l1
        tol = np.maximum(spec.rel_tol * scale, spec.abs_tol)
        if noise_row:
            tol = tol.copy()
            tol[:-1] = np.maximum(tol[:-1], 2.0 * np.abs(value[-1]))
            tol[-1] = np.inf
        n_panels = n_done + a.size
        if np.all(error <= tol):
            return QuadResult(_squeeze(value), _squeeze(error), n_panels, True)
        # per-panel share of the budget, worst component decides
        width = np.abs(b - a)
        share = err / (tol[..., None] if np.ndim(tol) else tol)
        share = share.max(axis=0) if share.ndim == 2 else share
        refine = share > 0.5 * width / total_width
        tiny = width <= 64 * _EPS * np.maximum(np.abs(a), np.abs(b))
        refine &= ~tiny
        if not refine.any():
            _fail(value, error, n_panels)
        if n_panels + int(refine.sum()) > spec.max_panels:
            _fail(value, error, n_panels)
        keep = ~refine
        done_val = done_val + kron[..., keep].sum(axis=-1)
        done_err = done_err + err[..., keep].sum(axis=-1)
        done_abs = done_abs + resabs[..., keep].sum(axis=-1)
        n_done += int(keep.sum())
        ra, rb = a[refine], b[refine]
        mid = 0.5 * (ra + rb)
        a = np.concatenate([ra, mid])
        b = np.concatenate([mid, rb])


def _squeeze(v):
    return float(v) if np.ndim(v) == 0 else v


def _fail(value, error, n_panels):
    raise NonConvergence(
        f"adaptive quadrature did not converge with {n_panels} panels (error estimate {error})",
        QuadResult(_squeeze(value), _squeeze(error), n_panels, False),
    )


def phase_partition(a: float, b: float, phase_rate: Callable | None, guard: float, n_coarse: int = 64) -> np.ndarray:
    """Breakpoints on [a, b] such that each panel advances the phase by at most ``guard``.

    ``phase_rate(k)`` bounds |dphi/dk| and must be non-decreasing on each
    of ``n_coarse`` equal cells (the value at the cell's right end is used).
    """
    coarse = np.linspace(a, b, n_coarse + 1)
    if phase_rate is None:
        return coarse
    rate = np.maximum(np.abs(np.asarray(phase_rate(coarse), dtype=float)), 0.0)
    cell_rate = np.maximum(rate[:-1], rate[1:])
    width = np.diff(coarse)
    counts = np.maximum(1, np.ceil(cell_rate * width / guard)).astype(np.int64)
    cell = np.repeat(np.arange(n_coarse), counts)
    offset = np.arange(cell.size) - np.repeat(np.cumsum(counts) - counts, counts)
    edges = coarse[cell] + offset * (width[cell] / counts[cell])
    return np.append(edges, b)


def integrate_interval(f: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_SPEC,
                       phase_rate: Callable | None = None, norm: str = "value", n_initial: int = 4,
                       noise_row: bool = False) -> QuadResult:
    if a == b:
        probe = np.asarray(f(np.array([a])), dtype=float)
        zero = 0.0 if probe.ndim <= 1 else np.zeros(probe.shape[0])
        return QuadResult(zero, zero if np.ndim(zero) == 0 else zero.copy(), 0, True)
    edges = phase_partition(a, b, phase_rate, spec.oscillation_guard, n_coarse=n_initial)
    return adaptive_gk(f, edges, spec, norm, noise_row)


def integrate_semi_infinite(f: Callable, k_max_hint: float, phase_rate: Callable | None = None,
                            spec: QuadratureSpec = DEFAULT_SPEC, norm: str = "value",
                            max_doublings: int = 60) -> QuadResult:
    """Integral of ``f`` over [0, inf).

    The domain is truncated at ``k_max_hint`` and extended by doubling while
    a sampled bound on the next segment's contribution exceeds a tenth of
    the tolerance. Panels are sized by :func:`phase_partition`.
    """
    if not k_max_hint > 0:
        raise ValueError("k_max_hint must be positive")
    k_hi = float(k_max_hint)
    res = adaptive_gk(f, phase_partition(0.0, k_hi, phase_rate, spec.oscillation_guard), spec, norm)
    value, error, panels = res.value, res.error_estimate, res.panels_used
    for _ in range(max_doublings):
        probe = np.linspace(k_hi, 2 * k_hi, 65)
        fv = np.abs(np.asarray(f(probe), dtype=float))
        bound = fv.max(axis=-1) * k_hi
        scale = np.abs(value) if norm == "value" else np.abs(value) + error
        if np.all(bound <= 0.1 * np.maximum(spec.rel_tol * scale, spec.abs_tol)):
            return QuadResult(value, error, panels, True)
        seg = adaptive_gk(f, phase_partition(k_hi, 2 * k_hi, phase_rate, spec.oscillation_guard), spec, norm)
        value = value + seg.value
        error = error + seg.error_estimate
        panels += seg.panels_used
        k_hi *= 2
        if panels > spec.max_panels:
            break
    raise NonConvergence("integrand tail did not decay within the doubling budget",
                         QuadResult(value, error, panels, False))


def find_root_monotone(g: Callable[[float], float], lo: float, hi: float, tol: float,
                       max_iter: int = 200, glo: float | None = None, ghi: float | None = None):
    """Root of a non-decreasing ``g`` on [lo, hi] with |g(root)| <= tol.

    Illinois-type regula falsi with a bisection step whenever the secant
    estimate stalls. Returns ``(root, iterations)``.
    """
    glo = g(lo) if glo is None else glo
    if glo > 0:
        raise NoBracket(f"g(lo)={glo!r} > 0")
    if abs(glo) <= tol:
        return lo, 0
    ghi = g(hi) if ghi is None else ghi
    if ghi < 0:
        raise NoBracket(f"g(hi)={ghi!r} < 0: target not reached on [{lo}, {hi}]")
    if abs(ghi) <= tol:
        return hi, 0
    wlo, whi = glo, ghi  # Illinois-weighted copies used only for the secant
    side = 0
    for it in range(1, max_iter + 1):
        x = (lo * whi - hi * wlo) / (whi - wlo)
        if not (lo < x < hi) or it % 4 == 0:
            x = 0.5 * (lo + hi)
        gx = g(x)
        if abs(gx) <= tol:
            return x, it
        if gx < 0:
            lo, glo, wlo = x, gx, gx
            if side == -1:
                whi *= 0.5
            side = -1
        else:
            hi, ghi, whi = x, gx, gx
            if side == 1:
                wlo *= 0.5
            side = 1
        if hi - lo <= 4 * _EPS * max(abs(lo), abs(hi)):
            return (lo if -glo < ghi else hi), it
    raise NonConvergence(f"root finder exceeded {max_iter} iterations")


def bessel_j0(x):
    """Bessel J0 for real x; scalar in, scalar out."""
    out = kernels.j0(np.atleast_1d(np.asarray(x, dtype=float)))
    return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


def finite_diff(f: Callable[[float], float], t: float, h: float) -> float:
    """Five-point central difference, O(h^4)."""
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)
