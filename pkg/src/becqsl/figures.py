"""Parameter presets behind each reproduced figure.

All values here are SI; convert with :func:`becqsl.units.to_internal`.
"""
from __future__ import annotations

from .units import A_RB, PhysicalParams, default_params

NM = 1e-9

# a_B upper limits per dimension, in units of the natural Rb scattering length
A_B_CAPS = {3: 3.0, 2: 2.0, 1: 1.0}

FIG4_AB_FACTORS = (0.2, 0.4, 0.6, 0.8, 1.0)
FIG4_DISTANCES = {1: (4.5e-5, 4e-5, 3.5e-5), 2: (8e-5, 7e-5, 6e-5), 3: (13e-5, 12e-5, 11e-5)}

FIG5_SIGMAS = tuple(s * NM for s in (45, 60, 80, 100))
FIG5_SIGMA_DISTANCES = (12e-5, 11e-5, 10e-5)
FIG5_LS = tuple(x * NM for x in range(50, 401, 50))
FIG5_L_DISTANCES = (15.5e-5, 15e-5, 14e-5)

# (sigma, L) pairs of the three curves comparing trap geometries
FIG3_GEOMETRIES = ((50 * NM, 150 * NM), (100 * NM, 150 * NM), (50 * NM, 300 * NM))

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5", "appendixA")


def preset(regime: str, dimension: int, base: PhysicalParams | None = None) -> PhysicalParams:
    """Figure parameters for a free (a_B = 0) or interacting (a_B = a_Rb) reservoir."""
    if regime not in ("free", "interacting"):
        raise ValueError(f"regime must be 'free' or 'interacting', got {regime!r}")
    base = base or default_params()
    return base.replace(dimension=dimension, a_B=0.0 if regime == "free" else A_RB)


def preset_grid(base: PhysicalParams | None = None) -> dict[str, PhysicalParams]:
    """The six regime x dimension presets, keyed like ``free-1d``."""
    return {f"{reg}-{d}d": preset(reg, d, base) for reg in ("free", "interacting") for d in (1, 2, 3)}


def a_b_cap(dimension: int) -> float:
    return A_B_CAPS[dimension] * A_RB


NAMED_PRESETS = {
    "default": lambda: default_params(),
    "fig2": lambda: default_params(),
    "fig3": lambda: default_params().replace(sigma=50 * NM),
    "fig4": lambda: default_params(),
    "fig5": lambda: default_params(),
}
