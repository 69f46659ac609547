"""Adaptive integration of the full and reduced equations, plus energy audits."""

from ._backend import BACKEND, available as available_backends
from .dense import DenseOutput
from .energy import CHANNELS, EnergyAudit, channel_integrands, energy_audit
from .ode import OdeSolution, solve_ode
from .reduced import ReducedTrajectory, integrate_reduced
from .trajectory import (
    BLOWUP,
    COLLAPSE,
    REACHED_T_END,
    IntegratorConfig,
    TerminalEvent,
    Trajectory,
    integrate_rpe,
)

__all__ = [
    "BACKEND", "available_backends", "DenseOutput", "CHANNELS", "EnergyAudit",
    "channel_integrands", "energy_audit", "OdeSolution", "solve_ode",
    "ReducedTrajectory", "integrate_reduced", "BLOWUP", "COLLAPSE", "REACHED_T_END",
    "IntegratorConfig", "TerminalEvent", "Trajectory", "integrate_rpe",
]
