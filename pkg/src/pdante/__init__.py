"""DANTE and p-DANTE selective-excitation simulation.

Submodules
----------
su2        spin-1/2 algebra and Cayley-Klein helpers
pulse      single-pulse propagators and average Hamiltonians
sequences  pulse-train realizations and delay laws
aht        sequence-level average Hamiltonians and resonance predictions
profiles   exact and AHT profile sweeps, ensembles, validity maps
serialize  CSV and manifest output
cli        ``pdante`` command-line entry point
"""

from .errors import ConvergenceError
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "ConvergenceError", "__version__"]
