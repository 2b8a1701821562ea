"""Simulation and certification toolkit for n-setting high-dimensional EPR steering."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .finitefield import Field, FieldElement, field_create, gf_add, gf_inv, gf_mul, gf_trace
from .mub import MubFamily, build_mubs, conjugate_family, verify_mub
from .states import (BipartiteState, crosstalk, isotropic, max_entangled, mode_labels,
                     procrustean_concentrate, spdc_state)
from .steering import (SteeringReport, conditional_state, joint_prob, lhs_bound, lhs_max_numeric,
                       p_min_theory, p_min_two_setting, quantum_bound, s_iso_theory,
                       steering_functional, two_setting_violation_max, violation, violation_from_S)
from .expsim import (CoincidenceTable, ExperimentConfig, HologramPool, SweepResult, estimate_functional,
                     hologram_pool, pool_average_state, run_experiment, simulate_coincidences,
                     simulate_pool_run, sweep_and_fit)
