"""Stability certification toolkit for port-Hamiltonian boundary systems.

Certifies well-posedness (contraction-semigroup generation) and stability
(exponential / asymptotic, via boundary dissipation coefficients) of N-th
order linear port-Hamiltonian PDEs on (0, 1), including closed loops with
strictly-input-passive finite-dimensional controllers.  Discretized spectra,
resolvent sweeps and energy-conserving time integration provide numerical
evidence alongside the algebraic certificates.
"""

from .core import (
    BoundaryCondition,
    HamiltonianDensity,
    PHSDefinition,
    PortMap,
    StateFunction,
    ValidationReport,
    build_port_map,
    validate_phs,
)
from .wellposed import (
    GenerationCertificate,
    StabilityCertificate,
    TraceSelector,
    boundary_dissipation_coefficient,
    check_generation,
    classify_stability,
    verify_energy_balance,
)
from .discretize import (
    CollocationGrid,
    DiscreteOperator,
    assemble_discrete_generator,
    chebyshev_operator,
    discrete_dissipativity,
)
from .spectral import (
    ResolventSweep,
    SpectrumReport,
    compute_spectrum,
    gearhart_scan,
    imaginary_axis_eigens,
    resolvent_norm,
    trust_limit_for,
)
from .timesim import (
    DecayFit,
    EnergyTrace,
    default_initial_state,
    energy_trace,
    fit_decay_rate,
    integrate_midpoint,
)
from .hybrid import (
    ClosedLoopSystem,
    Controller,
    IOSplit,
    assemble_hybrid_generator,
    build_closed_loop,
    closed_loop_dissipativity,
    sip_check,
    sip_stability_classify,
    verify_hybrid_passivity,
)
from .models import (
    PRESET_NAMES,
    PresetModel,
    preset_model,
    schrodinger_highfreq_limit,
    schrodinger_resolvent_oracle,
)
from .config import (
    ModelConfig,
    model_to_config,
    parse_model_config,
    serialize_model_config,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "HamiltonianDensity",
    "PHSDefinition",
    "PortMap",
    "StateFunction",
    "ValidationReport",
    "build_port_map",
    "validate_phs",
    "GenerationCertificate",
    "StabilityCertificate",
    "TraceSelector",
    "boundary_dissipation_coefficient",
    "check_generation",
    "classify_stability",
    "verify_energy_balance",
    "CollocationGrid",
    "DiscreteOperator",
    "assemble_discrete_generator",
    "chebyshev_operator",
    "discrete_dissipativity",
    "ResolventSweep",
    "SpectrumReport",
    "compute_spectrum",
    "gearhart_scan",
    "imaginary_axis_eigens",
    "resolvent_norm",
    "trust_limit_for",
    "DecayFit",
    "EnergyTrace",
    "default_initial_state",
    "energy_trace",
    "fit_decay_rate",
    "integrate_midpoint",
    "ClosedLoopSystem",
    "Controller",
    "IOSplit",
    "assemble_hybrid_generator",
    "build_closed_loop",
    "closed_loop_dissipativity",
    "sip_check",
    "sip_stability_classify",
    "verify_hybrid_passivity",
    "PRESET_NAMES",
    "PresetModel",
    "preset_model",
    "schrodinger_highfreq_limit",
    "schrodinger_resolvent_oracle",
    "ModelConfig",
    "model_to_config",
    "parse_model_config",
    "serialize_model_config",
    "__version__",
]
