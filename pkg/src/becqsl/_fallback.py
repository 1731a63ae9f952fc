"""Pure numpy implementations of the hot kernels.

These mirror ``_native.pyx`` function for function and are used when the
compiled extension is missing or ``BECQSL_PURE_PYTHON`` is set.
"""
import numpy as np

_SERIES_TERMS = 32
_TRAP_NODES = 64
_HANKEL_TERMS = 24
_SERIES_MAX = 8.0
_TRAP_MAX = 25.0
K_SMALL = 1e-10  # below this k the Gamma integrands take their k -> 0 limit


def _hankel_coeffs(n):
    # a_k = prod_{j<=k} (2j-1)^2 / (k! 8^k)
    a = [1.0]
    for k in range(1, n):
        a.append(a[-1] * (2 * k - 1) ** 2 / (k * 8.0))
    return np.array(a)


_HANKEL = _hankel_coeffs(_HANKEL_TERMS)
_TRAP_THETA = np.pi * (np.arange(_TRAP_NODES) + 0.5) / _TRAP_NODES


def _series_one_minus_j0(x):
    # 1 - J0(x) = -sum_{k>=1} (-x^2/4)^k / (k!)^2, no leading-1 cancellation
    q = -0.25 * x * x
    term = np.ones_like(x)
    acc = np.zeros_like(x)
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * k)
        acc = acc + term
    return -acc


def _trap_j0(x):
    # J0(x) = (1/pi) int_0^pi cos(x sin t) dt; midpoint rule is spectrally accurate here
    return np.cos(np.multiply.outer(x, np.sin(_TRAP_THETA))).mean(axis=-1)


def _hankel_j0(x):
    inv = 1.0 / x
    inv2 = inv * inv
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    # P = sum (-1)^k a_{2k} x^{-2k}, Q = -sum (-1)^k a_{2k+1} x^{-2k-1}
    for k in reversed(range(_HANKEL_TERMS // 2)):
        sign = -1.0 if k % 2 else 1.0
        p = p * inv2 + sign * _HANKEL[2 * k]
        q = q * inv2 + sign * _HANKEL[2 * k + 1]
    q = -q * inv
    c, s = np.cos(x), np.sin(x)
    # cos(x - pi/4), sin(x - pi/4) without forming x - pi/4
    cchi = (c + s) * np.sqrt(0.5)
    schi = (s - c) * np.sqrt(0.5)
    return np.sqrt(2.0 / (np.pi * x)) * (p * cchi - q * schi)


def j0(x):
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    a = x < _SERIES_MAX
    b = (~a) & (x < _TRAP_MAX)
    c = x >= _TRAP_MAX
    out[a] = 1.0 - _series_one_minus_j0(x[a])
    out[b] = _trap_j0(x[b])
    out[c] = _hankel_j0(x[c])
    return out


def one_minus_j0(x):
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    a = x < _SERIES_MAX
    out[a] = _series_one_minus_j0(x[a])
    out[~a] = 1.0 - j0(x[~a])
    return out


def one_minus_sinc(y):
    """1 - sin(y)/y, with a series below y = 0.5."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    small = np.abs(y) < 0.5
    ys = y[small] ** 2
    out[small] = ys * (1 / 6 - ys * (1 / 120 - ys * (1 / 5040 - ys * (1 / 362880 - ys * (1 / 39916800 - ys / 6227020800)))))
    yl = y[~small]
    out[~small] = 1.0 - np.sin(yl) / yl
    return out


def angular_factor(dim, x):
    x = np.asarray(x, dtype=float)
    if dim == 1:
        return np.sin(x) ** 2
    if dim == 2:
        return np.pi * one_minus_j0(2.0 * x)
    if dim == 3:
        return 2.0 * np.pi * one_minus_sinc(2.0 * x)
    raise ValueError(f"dimension must be 1, 2 or 3, got {dim!r}")


def gamma_integrands(k, dim, ng, m_b, sigma, L, t):
    """Prefactor-free integrands of Gamma(t) and dGamma/dt at wavenumbers ``k``.

    Returns ``(g, gd)`` with
    g  = k^(D-1) f_D(kL) exp(-k^2 s^2/2) sin^2(w t/2) / (w (2 n g + e))
    gd = k^(D-1) f_D(kL) exp(-k^2 s^2/2) sin(w t) / (2 (2 n g + e)).
    """
    k = np.asarray(k, dtype=float)
    # both integrands vanish as k -> 0 for every D, free or not
    small = k < K_SMALL
    k = np.where(small, 1.0, k)
    eps = k * k / (2.0 * m_b)
    den = 2.0 * ng + eps
    w = np.sqrt(eps * den)
    base = k ** (dim - 1) * angular_factor(dim, k * L) * np.exp(-0.5 * (k * sigma) ** 2) / den
    s = np.sin(0.5 * w * t)
    g = np.where(small, 0.0, base * s * (s / w))
    gd = np.where(small, 0.0, 0.5 * base * np.sin(w * t))
    return g, gd
