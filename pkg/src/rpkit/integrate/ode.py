"""Generic adaptive integration for small systems (flows, reduced ODEs)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernel_py
from .dense import DenseOutput


@dataclass
class OdeSolution:
    ts: np.ndarray
    ys: np.ndarray
    status: int
    n_accept: int
    n_reject: int
    dense: DenseOutput | None

    @property
    def success(self) -> bool:
        return self.status == _kernel_py.STATUS_DONE


def solve_ode(rhs, t0, y0, t1, rtol=1e-10, atol=1e-12, pos_index=-1, floor=0.0,
              h_init=None, h_max=math.inf, max_steps=1_000_000) -> OdeSolution:
    """DOPRI5 on ``y' = rhs(t, y)`` with sequences in and tuples out."""
    y0 = [float(v) for v in y0]
    direction = 1.0 if t1 >= t0 else -1.0
    if h_init is None:
        h_init = _kernel_py.initial_step(rhs, t0, y0, direction, rtol, atol, h_max)
    ts, ys, ks, status, na, nr = _kernel_py.solve(
        rhs, t0, y0, t1, rtol, atol, h_init, h_max, pos_index, floor, max_steps
    )
    dense = DenseOutput(ts, ys, ks) if len(ts) > 1 else None
    return OdeSolution(ts, ys, status, na, nr, dense)
