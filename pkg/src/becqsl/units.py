"""Physical inputs and the fixed SI <-> internal unit conversion.

Internal units: length 1 nm, mass 1e-26 kg, hbar = 1. Time and energy
units follow from those three choices. In these units the condensate
coupling products stay within a few decades of unity, whereas raw SI
values of eta**2 are around 1e-101.
"""
from __future__ import annotations

import dataclasses
import math
from decimal import Decimal
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path

HBAR = 1.054571817e-34  # J s
BOHR_RADIUS = 5.29177210903e-11  # m
A_RB = 5.3e-9  # natural 87Rb scattering length, m

_SUFFIXES = {"nm": 1e-9, "um": 1e-6, "kg": 1.0, "s": 1.0}


class ParameterError(ValueError):
    """Invalid physical parameter set or parameter file."""


@dataclass(frozen=True)
class UnitSystem:
    length_unit: float = 1e-9
    mass_unit: float = 1e-26

    @property
    def time_unit(self) -> float:
        """Seconds per internal time unit (m * l**2 / hbar)."""
        return self.mass_unit * self.length_unit**2 / HBAR

    @property
    def energy_unit(self) -> float:
        return HBAR / self.time_unit

    @property
    def frequency_unit(self) -> float:
        """rad/s per internal angular frequency."""
        return 1.0 / self.time_unit


INTERNAL = UnitSystem()

# dimension exponents (length, mass, time) of each field; omega0 is a frequency
_FIELD_DIMS = {
    "m_A": (0, 1, 0),
    "m_B": (0, 1, 0),
    "m_AB": (0, 1, 0),
    "n3": (-3, 0, 0),
    "a_B": (1, 0, 0),
    "a_AB": (1, 0, 0),
    "a_perp_A": (1, 0, 0),
    "a_perp_B": (1, 0, 0),
    "a_z_A": (1, 0, 0),
    "a_z_B": (1, 0, 0),
    "sigma": (1, 0, 0),
    "L": (1, 0, 0),
    "omega0": (0, 0, -1),
}


@dataclass(frozen=True)
class PhysicalParams:
    """Raw experimental inputs.

    Values are SI unless the instance came out of :func:`to_internal`.
    ``m_AB`` is derived from ``m_A`` and ``m_B`` when left as None. If it
    is supplied and disagrees with the derived value by more than 2 %, a
    warning is issued and the supplied value is kept. ``omega0`` is carried
    along for completeness only: it drops out in the interaction picture.
    """

    m_A: float
    m_B: float
    n3: float
    a_B: float
    a_AB: float
    a_perp_A: float
    a_perp_B: float
    a_z_A: float
    a_z_B: float
    sigma: float
    L: float
    m_AB: float | None = None
    omega0: float = 0.0
    dimension: int = 3

    def __post_init__(self):
        derived = self.m_A * self.m_B / (self.m_A + self.m_B) if self.m_A + self.m_B > 0 else 0.0
        if self.m_AB is None:
            object.__setattr__(self, "m_AB", derived)
        elif derived > 0 and abs(self.m_AB - derived) > 0.02 * derived:
            warnings.warn(
                f"supplied m_AB={self.m_AB!r} differs from m_A*m_B/(m_A+m_B)={derived!r} by more than 2%",
                stacklevel=3,
            )
        self.validate()

    def validate(self) -> None:
        positive = ("m_A", "m_B", "m_AB", "n3", "a_AB", "a_perp_A", "a_perp_B", "a_z_A", "a_z_B", "sigma")
        for name in positive:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {v!r}")
        for name in ("a_B", "L"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ParameterError(f"{name} must be finite and >= 0, got {v!r}")
        if not math.isfinite(self.omega0):
            raise ParameterError("omega0 must be finite")
        if self.dimension not in (1, 2, 3):
            raise ParameterError(f"dimension must be 1, 2 or 3, got {self.dimension!r}")

    def replace(self, **changes) -> PhysicalParams:
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def default_params() -> PhysicalParams:
    """Baseline parameters: 23Na impurity in a 87Rb condensate."""
    return PhysicalParams(
        m_A=3.82e-26,
        m_B=14.45e-26,
        m_AB=3.02e-26,
        n3=1e20,
        a_B=A_RB,
        a_AB=55 * BOHR_RADIUS,
        a_perp_A=100 * A_RB,
        a_perp_B=100 * A_RB,
        a_z_A=100 * A_RB,
        a_z_B=100 * A_RB,
        sigma=45e-9,
        L=150e-9,
        dimension=3,
    )


def _scale(name: str, u: UnitSystem) -> float:
    dl, dm, dt = _FIELD_DIMS[name]
    return u.length_unit**dl * u.mass_unit**dm * u.time_unit**dt


def to_internal(p: PhysicalParams, u: UnitSystem = INTERNAL) -> PhysicalParams:
    return dataclasses.replace(p, **{n: getattr(p, n) / _scale(n, u) for n in _FIELD_DIMS})


def to_si(p: PhysicalParams, u: UnitSystem = INTERNAL) -> PhysicalParams:
    return dataclasses.replace(p, **{n: getattr(p, n) * _scale(n, u) for n in _FIELD_DIMS})


FIELD_NAMES = tuple(f.name for f in fields(PhysicalParams))


def parse_value(text: str) -> float:
    """Parse ``"45nm"``, ``"1e-7"``, ``"3.82e-26kg"`` into an SI float."""
    s = text.strip()
    for suffix, factor in sorted(_SUFFIXES.items(), key=lambda kv: -len(kv[0])):
        if s.endswith(suffix):
            try:
                # decimal scaling keeps "45nm" exactly equal to 45e-9
                return float(Decimal(s[: -len(suffix)].strip()) * Decimal(str(factor)))
            except (ValueError, ArithmeticError):
                break
    try:
        return float(s)
    except ValueError:
        raise ParameterError(f"cannot parse value {text!r}") from None


def parse_param_text(text: str) -> dict:
    """Parse flat ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in FIELD_NAMES:
            raise ParameterError(f"line {lineno}: unknown parameter {key!r}")
        out[key] = int(parse_value(value)) if key == "dimension" else parse_value(value)
    return out


def load_params(path: str | Path | None = None, overrides: dict | None = None,
                base: PhysicalParams | None = None) -> PhysicalParams:
    """Defaults, then file values, then explicit overrides."""
    values = (base or default_params()).as_dict()
    if path is not None:
        values.update(parse_param_text(Path(path).read_text()))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    if "dimension" in values:
        d = values["dimension"]
        if float(d) != int(d):
            raise ParameterError(f"dimension must be an integer, got {d!r}")
        values["dimension"] = int(d)
    return PhysicalParams(**values)


def format_params(p: PhysicalParams) -> str:
    """Render as a parameter file that :func:`parse_param_text` reads back exactly."""
    lines = []
    for name in FIELD_NAMES:
        v = getattr(p, name)
        lines.append(f"{name}={v}" if name == "dimension" else f"{name}={float(v)!r}")
    return "\n".join(lines) + "\n"
