"""Trapped-ion cat states and characteristic-function tomography beyond the RWA."""

from . import catgen, dynamics, fock, kernels, metrics, records, tomography
from .catgen import cat_protocol, cat_time, conditional_measure, even_odd_cat
from .dynamics import (
    AtomPrep,
    DriveParams,
    brute_force_propagator,
    evolve,
    exact_propagator,
    hamiltonian,
)
from .fock import IonState, Operator, coherent_state, displacement, fock_state, herm_exp
from .metrics import fidelity, trace_distance
from .tomography import (
    QuadSpec,
    char_fn_exact,
    exact_grid,
    ground_probability,
    reconstruct,
    scan_plan,
    simulate_scan,
)

__version__ = "0.1.0"

__all__ = [
    "AtomPrep",
    "DriveParams",
    "IonState",
    "Operator",
    "QuadSpec",
    "brute_force_propagator",
    "cat_protocol",
    "cat_time",
    "catgen",
    "char_fn_exact",
    "coherent_state",
    "conditional_measure",
    "displacement",
    "dynamics",
    "evolve",
    "even_odd_cat",
    "exact_grid",
    "exact_propagator",
    "fidelity",
    "fock",
    "fock_state",
    "ground_probability",
    "hamiltonian",
    "herm_exp",
    "kernels",
    "metrics",
    "reconstruct",
    "records",
    "scan_plan",
    "simulate_scan",
    "tomography",
    "trace_distance",
]
