import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import j0 as scipy_j0

from becqsl import kernels
from becqsl.kernels import backend_module
from becqsl.numerics import (DEFAULT_SPEC, NoBracket, NonConvergence, QuadratureSpec, adaptive_gk,
                             bessel_j0, find_root_monotone, finite_diff, integrate_interval,
                             integrate_semi_infinite, phase_partition)

BACKENDS = ["python"] + (["native"] if kernels.BACKEND == "native" else [])


def test_gaussian_semi_infinite():
    res = integrate_semi_infinite(lambda k: np.exp(-k * k), 1.0)
    assert res.converged
    assert res.value == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-12, abs=1e-12)


def test_oscillatory_against_closed_form_and_riemann():
    f = lambda k: np.sin(k) ** 2 * np.exp(-0.5 * k * k)  # noqa: E731
    exact = 0.5 * math.sqrt(math.pi / 2) * (1 - math.exp(-2.0))
    res = integrate_semi_infinite(f, 10.0, lambda k: np.full_like(k, 2.0))
    assert res.value == pytest.approx(exact, rel=1e-12)
    n, kmax = 10_000_000, 12.0
    k = (np.arange(n) + 0.5) * (kmax / n)
    riemann = f(k).sum() * (kmax / n)
    assert res.value == pytest.approx(riemann, rel=1e-9)


def test_zero_integrand():
    res = integrate_semi_infinite(lambda k: np.zeros_like(k), 1.0)
    assert res.value == 0.0 and res.converged


def test_polynomials_exact_per_panel():
    rng = np.random.default_rng(1)
    for deg in range(11):
        c = rng.normal(size=deg + 1)
        p = np.polynomial.Polynomial(c)
        res = adaptive_gk(p, np.array([-0.3, 1.7]))
        exact = p.integ()(1.7) - p.integ()(-0.3)
        assert res.panels_used == 1
        assert res.value == pytest.approx(exact, abs=1e-14 * max(1, abs(exact)))


def test_converged_error_within_tolerance():
    f = lambda x: np.cos(30 * x) * np.exp(-x)  # noqa: E731
    res = integrate_interval(f, 0.0, 5.0)
    assert res.converged and res.error_estimate >= 0
    assert res.error_estimate <= max(DEFAULT_SPEC.rel_tol * abs(res.value), DEFAULT_SPEC.abs_tol)
    exact = (1 - math.exp(-5) * (math.cos(150) - 30 * math.sin(150))) / (1 + 900)
    assert res.value == pytest.approx(exact, rel=1e-10)


def test_doubling_max_panels_is_stable():
    f = lambda x: np.sqrt(x) * np.sin(40 * x)  # noqa: E731
    a = integrate_interval(f, 0.0, 3.0, QuadratureSpec(max_panels=4096))
    b = integrate_interval(f, 0.0, 3.0, QuadratureSpec(max_panels=8192))
    assert abs(a.value - b.value) <= a.error_estimate + b.error_estimate


def test_nonconvergence_is_reported():
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-300, max_panels=16)
    with pytest.raises(NonConvergence) as info:
        integrate_interval(lambda x: np.abs(np.sin(1 / (x + 1e-3))), 0.0, 1.0, spec)
    assert info.value.result is not None and not info.value.result.converged


def test_spec_validation():
    for bad in (dict(rel_tol=0), dict(abs_tol=-1), dict(max_panels=8), dict(oscillation_guard=0)):
        with pytest.raises(ValueError):
            QuadratureSpec(**bad)


def test_phase_partition_guard():
    rate = lambda k: 50.0 * k  # noqa: E731
    edges = phase_partition(0.0, 4.0, rate, math.pi)
    assert edges[0] == 0.0 and edges[-1] == 4.0 and np.all(np.diff(edges) > 0)
    assert np.all(rate(edges[1:]) * np.diff(edges) <= math.pi * (1 + 1e-12))


def test_vector_integrand_l1_norm():
    f = lambda x: np.vstack([np.exp(-x), np.sin(20 * x) * np.exp(-x)])  # noqa: E731
    res = integrate_interval(f, 0.0, 30.0, norm="l1")
    assert res.value[0] == pytest.approx(1 - math.exp(-30), rel=1e-12)
    assert res.value[1] == pytest.approx(20 / 401, rel=1e-9)


# ------------------------------------------------------------------ roots

def test_root_examples():
    assert find_root_monotone(lambda t: t - 1, 0.0, 2.0, 1e-14)[0] == pytest.approx(1.0, abs=1e-14)
    g = lambda t: 0.5 * math.acos(math.exp(-t * t)) - 0.1  # noqa: E731
    root, it = find_root_monotone(g, 0.0, 2.0, 1e-14)
    assert root == pytest.approx(math.sqrt(-math.log(math.cos(0.2))), rel=1e-12)
    with pytest.raises(NoBracket):
        find_root_monotone(lambda t: -1.0 - t, 0.0, 2.0, 1e-12)


def test_root_independent_of_hi():
    g = lambda t: math.tanh(t - 0.7) + 0.01 * t  # noqa: E731
    r1, _ = find_root_monotone(g, 0.0, 2.0, 1e-15)
    r2, _ = find_root_monotone(g, 0.0, 50.0, 1e-15)
    assert r1 == pytest.approx(r2, abs=1e-13)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 100), st.floats(0.1, 10), st.integers(1, 7))
def test_root_property(target, scale, power):
    g = lambda t: (t / scale) ** power - target  # noqa: E731
    hi = scale * (target ** (1 / power)) * 3 + 1
    root, _ = find_root_monotone(g, 0.0, hi, 1e-12)
    assert abs(g(root)) <= 1e-12 or root == pytest.approx(scale * target ** (1 / power), rel=1e-12)


# ------------------------------------------------------------------ Bessel

def test_j0_examples():
    assert bessel_j0(0.0) == 1.0
    assert abs(bessel_j0(2.404825557695773)) < 1e-10
    series = float(mpmath.nsum(lambda m: (-1) ** m * (2.5 ** (2 * m)) / mpmath.factorial(m) ** 2, [0, 64]))
    assert bessel_j0(5.0) == pytest.approx(series, abs=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_j0_against_mpmath(backend):
    mod = backend_module(backend)
    x = np.concatenate([np.linspace(0, 40, 4001), np.logspace(1.6, 4, 2000), [7.999999, 8.0, 24.99999, 25.0]])
    ref = np.array([float(mpmath.besselj(0, v)) for v in x])
    assert np.max(np.abs(mod.j0(x) - ref)) < 1e-12


@pytest.mark.parametrize("backend", BACKENDS)
def test_one_minus_j0_relative(backend):
    mod = backend_module(backend)
    x = np.logspace(-8, 0.5, 200)
    with mpmath.workdps(40):
        ref = np.array([float(1 - mpmath.besselj(0, mpmath.mpf(v))) for v in x])
    np.testing.assert_allclose(mod.one_minus_j0(x), ref, rtol=1e-13)


@pytest.mark.parametrize("backend", BACKENDS)
def test_one_minus_sinc_relative(backend):
    mod = backend_module(backend)
    y = np.logspace(-8, 2, 300)
    with mpmath.workdps(40):
        ref = np.array([float(1 - mpmath.sin(mpmath.mpf(v)) / mpmath.mpf(v)) for v in y])
    np.testing.assert_allclose(mod.one_minus_sinc(y), ref, rtol=1e-13)
    assert mod.one_minus_sinc(np.array([0.0]))[0] == 0.0


def test_j0_matches_scipy_dense():
    x = np.linspace(0, 1e4, 200001)
    assert np.max(np.abs(bessel_j0(x) - scipy_j0(x))) < 1e-12


@pytest.mark.skipif(kernels.BACKEND != "native", reason="compiled extension not built")
def test_backends_agree():
    py, nat = backend_module("python"), backend_module("native")
    k = np.linspace(0, 0.4, 20001)
    for dim in (1, 2, 3):
        for ng in (0.0, 7.7e-7):
            a = np.array(py.gamma_integrands(k, dim, ng, 14.45, 45.0, 150.0, 3e4))
            b = np.array(nat.gamma_integrands(k, dim, ng, 14.45, 45.0, 150.0, 3e4))
            assert np.max(np.abs(a - b)) <= 1e-13 * np.max(np.abs(a))
        x = np.linspace(0, 60, 10001)
        np.testing.assert_allclose(py.angular_factor(dim, x), nat.angular_factor(dim, x), rtol=1e-13, atol=1e-300)


def test_unknown_backend():
    with pytest.raises(ValueError):
        backend_module("fortran")


# ------------------------------------------------------------------ finite differences

def test_finite_diff():
    assert finite_diff(lambda t: 4.2, 1.0, 0.1) == pytest.approx(0.0, abs=1e-12)
    assert finite_diff(lambda t: t * t, 3.0, 0.1) == pytest.approx(6.0, abs=1e-10)
    assert finite_diff(lambda t: t**4, 1.0, 0.1) == pytest.approx(4.0, abs=1e-12)
