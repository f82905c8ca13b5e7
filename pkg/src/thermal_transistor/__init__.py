"""Steady-state simulation of a superconducting qubit-qutrit quantum thermal transistor."""
from .bath import BathSpec, RatePair, golden_rule_rates, make_baths, spectral_density
from .circuit import (
    DerivedDeviceParams,
    RawCircuitParams,
    check_suppression,
    derive_device_params,
    dispersive_coupling,
    invert_capacitance_matrix,
    transmon_levels,
)
from .config import RunConfig, parse_config, serialize_config
from .lindblad import build_rate_matrix, evolve, liouvillian, steady_state
from .spectrum import TransistorSpec, build_hamiltonian, collapse_channels, eigensystem
from .sweep import run_sweep
from .thermo import (
    AmplificationCurve,
    HeatReport,
    OperatingConditions,
    amplification,
    heat_currents,
    solve_point,
    switch_characterize,
)

__version__ = "0.1.0"
