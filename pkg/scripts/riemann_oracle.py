"""Brute-force midpoint-rule values of the dephasing function.

Independent of the package on purpose: SI units throughout, scipy's J0,
its own dimensional reduction, and a fixed uniform grid on [0, 10/sigma].
The output is committed as tests/data/riemann_oracle.json.

    python3 scripts/riemann_oracle.py --panels 10000000 --out tests/data/riemann_oracle.json
"""
import argparse
import json
import math

import numpy as np
from scipy.special import j0

HBAR = 1.054571817e-34
A0 = 5.29177210903e-11
A_RB = 5.3e-9

BASE = dict(n3=1e20, m_B=14.45e-26, m_AB=3.02e-26, a_AB=55 * A0, a_perp=100 * A_RB, a_z=100 * A_RB,
            sigma=45e-9, L=150e-9)
CHECKPOINTS = (0.1, 1.0, 10.0, 100.0, 1000.0)  # multiples of m_B sigma^2 / hbar


def couplings(p, dim):
    """(g, n, eta) of the D-dimensional gas, SI."""
    g = 4 * math.pi * HBAR**2 * p["a_B"] / p["m_B"]
    eta = 2 * math.pi * HBAR**2 * p["a_AB"] / p["m_AB"]
    n = p["n3"]
    if dim == 2:
        g /= math.sqrt(2 * math.pi) * p["a_z"]
        eta /= math.sqrt(math.pi * 2 * p["a_z"] ** 2)
        n *= math.sqrt(math.pi) * p["a_z"]
    elif dim == 1:
        g /= 2 * math.pi * p["a_perp"] ** 2
        eta /= math.pi * 2 * p["a_perp"] ** 2
        n *= math.pi * p["a_perp"] ** 2
    return g, n, eta


def shape(dim, x):
    """Angular integral of sin^2(k.L) at |k| L = x (polar angle in 2D, solid angle in 3D)."""
    if dim == 1:
        return np.sin(x) ** 2
    if dim == 2:
        return math.pi * (1 - j0(2 * x))
    return 2 * math.pi * (1 - np.sin(2 * x) / (2 * x))


def gamma_midpoint(p, dim, times, panels, chunk=1_000_000):
    g, n, eta = couplings(p, dim)
    sigma, L, m = p["sigma"], p["L"], p["m_B"]
    kmax = 10.0 / sigma
    h = kmax / panels
    total = np.zeros(len(times))
    for start in range(0, panels, chunk):
        k = (np.arange(start, min(start + chunk, panels)) + 0.5) * h
        e = HBAR**2 * k**2 / (2 * m)
        energy = np.sqrt(e * (e + 2 * n * g))
        w = energy / HBAR
        base = k ** (dim - 1) * shape(dim, k * L) * np.exp(-0.5 * (k * sigma) ** 2) / (energy * (2 * n * g + e))
        for i, t in enumerate(times):
            total[i] += np.sum(base * np.sin(0.5 * w * t) ** 2)
    return 8 * eta**2 * n / (2 * math.pi) ** dim * h * total


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--panels", type=int, default=10_000_000)
    ap.add_argument("--out", default="tests/data/riemann_oracle.json")
    args = ap.parse_args()
    t_scale = BASE["m_B"] * BASE["sigma"] ** 2 / HBAR
    times = [c * t_scale for c in CHECKPOINTS]
    presets = {}
    for regime, a_b in (("free", 0.0), ("interacting", A_RB)):
        for dim in (1, 2, 3):
            p = dict(BASE, a_B=a_b)
            vals = gamma_midpoint(p, dim, times, args.panels)
            presets[f"{regime}-{dim}d"] = {"a_B": a_b, "dimension": dim, "gamma": [float(v) for v in vals]}
            print(f"{regime}-{dim}d", " ".join(f"{v:.12e}" for v in vals), flush=True)
    out = {"panels": args.panels, "k_max_times_sigma": 10.0, "params_si": BASE,
           "checkpoint_multiples": list(CHECKPOINTS), "t_seconds": times, "presets": presets}
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main()
