"""Dephasing dynamics and quantum speed limit of an impurity qubit in a Bose-Einstein condensate."""

__version__ = "0.1.0"

from .units import PhysicalParams, UnitSystem, default_params, load_params, to_internal, to_si  # noqa: E402
from .reservoir import ReservoirModel, reduce  # noqa: E402
from .dephasing import QubitState, gamma, gamma_dot, gamma_pair, sample_curve  # noqa: E402
from .spectrum import fit_ohmicity, j_asymptotic, j_exact, spectral_model  # noqa: E402
from .qsl import QslProblem, QslResult, bures_angle, distance_bound, qfi, solve_tau_qsl  # noqa: E402
from .kernels import BACKEND  # noqa: E402
