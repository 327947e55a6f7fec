"""CSL collapse-model damping of neutrino flavor oscillations.

Submodules
----------
constants     physical constants, units and the ``Quantity`` type
model         mass/mixing model, scenarios and kinematics
damping       CSL decay rates and damped transition probabilities
diosi_penrose gravity-induced collapse damping estimate
decoherence   environmental decoherence rates
oracles       quadrature checks of the momentum-integral approximations
phase_noise   Monte Carlo of the shared relative-phase noise
cli           command-line interface
"""
from .constants import CONSTANTS, PhysicalConstants, Quantity, convert
from .damping import (ADLER, GRW, CollapseParams, DampingMode, PerturbativeBoundError, oscillate,
                      table1, transition_probability, transition_probability_decaying, xi)
from .model import NeutrinoModel, Scenario, energy, energy_gap, ur_expansion_error_rate

__version__ = "0.1.0"

__all__ = [
    "ADLER",
    "CONSTANTS",
    "CollapseParams",
    "DampingMode",
    "GRW",
    "NeutrinoModel",
    "PerturbativeBoundError",
    "PhysicalConstants",
    "Quantity",
    "Scenario",
    "__version__",
    "convert",
    "energy",
    "energy_gap",
    "oscillate",
    "table1",
    "transition_probability",
    "transition_probability_decaying",
    "ur_expansion_error_rate",
    "xi",
]
