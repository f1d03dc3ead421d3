"""Planar Lagrangian transport: flow maps, membership, kernel quadrature."""

from .evolve import (DEFAULT_DT, DomainDepartureError, FlowState, ProbeReport,
                     Trajectory, eulerian_theta, evolve, exp_map,
                     fd_smoothness_probe)
from .fields import (DECAY_FLOOR, DecayViolationError, GAUSSIAN_SUPPORT,
                     PRESET_NAMES, ScalarField2D, axis_coords,
                     catmull_rom_weights, interp_bicubic, preset_theta0,
                     probe_bump, radial_window, smoothstep5)
from .maps import FlowMap, gradient_arrays, jacobian_det
from .membership import (CHORD_ARC_LAMBDA, DET_FLOOR, GRAD_INV_CAP,
                         HOLDER_CAP, MembershipReport, chord_arc_lambda,
                         grad_inverse_bound, holder_norm, membership)
from .velocity import (MembershipError, N_ALPHA, N_RADIAL, RHO, RHO0,
                       eval_F, eval_gradF, interaction_energy,
                       riesz_velocity, riesz_velocity_grid)

__all__ = [
    "DEFAULT_DT", "DomainDepartureError", "FlowState", "ProbeReport",
    "Trajectory", "eulerian_theta", "evolve", "exp_map",
    "fd_smoothness_probe",
    "DECAY_FLOOR", "DecayViolationError", "GAUSSIAN_SUPPORT", "PRESET_NAMES",
    "ScalarField2D", "axis_coords", "catmull_rom_weights", "interp_bicubic",
    "preset_theta0", "probe_bump", "radial_window", "smoothstep5",
    "FlowMap", "gradient_arrays", "jacobian_det",
    "CHORD_ARC_LAMBDA", "DET_FLOOR", "GRAD_INV_CAP", "HOLDER_CAP",
    "MembershipReport", "chord_arc_lambda", "grad_inverse_bound",
    "holder_norm", "membership",
    "MembershipError", "N_ALPHA", "N_RADIAL", "RHO", "RHO0",
    "eval_F", "eval_gradF", "interaction_energy", "riesz_velocity",
    "riesz_velocity_grid",
]
