"""Certified bounds on lattice free energies via sequential cavity recursions.

The public surface re-exports the main entry points; see the individual
modules for the full API:

- lattice: Z^d geometry, lexicographic order, sublattice regions
- cavity: depth-bounded phi/psi recursions and marginal brackets
- bounds: free-energy and surface-pressure intervals, decay certificates
- oracle: exact small-instance validation (enumeration, transfer matrix)
- cli: command-line front end
"""

from .bounds import (BoundInterval, DecayCertificate, DepthAdvice, Refusal,
                     decay_certificate, depth_for_accuracy, dimer_free_energy,
                     exp_interval, free_energy, hardcore_free_energy,
                     surface_pressure)
from .cavity import (CavityState, ModelSpec, cavity_pair, dimer_cavity,
                     dimer_model, hardcore_cavity, hardcore_model,
                     marginal_bounds, memo_key)
from .interval import ConsistencyError

__version__ = "0.1.0"

__all__ = [
    "BoundInterval", "CavityState", "ConsistencyError", "DecayCertificate",
    "DepthAdvice", "ModelSpec", "Refusal", "cavity_pair", "decay_certificate",
    "depth_for_accuracy", "dimer_cavity", "dimer_free_energy", "dimer_model",
    "exp_interval", "free_energy", "hardcore_cavity", "hardcore_free_energy",
    "hardcore_model", "marginal_bounds", "memo_key", "surface_pressure",
]
