"""Energy bookkeeping: the equation multiplied by R^3 Rdot.

    d/dt(R^3 Rdot^2 / 2) + Re_inv R Rdot^2 + We R Rdot + Th p R^2 Rdot - p_n R^(2-3k) Rdot = 0

Each channel is integrated over the trajectory; their sum is the closure
defect, which vanishes for an exact solution.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.interpolate import BPoly

from ..core_model import RpeParams
from .trajectory import Trajectory

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(6)

CHANNELS = ("kinetic", "viscous", "surface", "forcing", "gas")


@dataclass(frozen=True)
class EnergyAudit:
    t0: float
    t1: float
    kinetic: float
    viscous: float
    surface: float
    forcing: float
    gas: float
    closure_defect: float

    @property
    def max_channel(self) -> float:
        return max(abs(getattr(self, c)) for c in CHANNELS)

    @property
    def relative_defect(self) -> float:
        m = self.max_channel
        return abs(self.closure_defect) / m if m > 0 else abs(self.closure_defect)

    def to_json(self) -> dict:
        d = asdict(self)
        d["max_channel"] = self.max_channel
        d["relative_defect"] = self.relative_defect
        return d


def channel_integrands(p: RpeParams, t, r, v) -> dict:
    """Pointwise integrands of the four non-kinetic channels."""
    t = np.asarray(t, dtype=float)
    force = np.array([p.forcing.value(float(x)) for x in np.atleast_1d(t)]).reshape(t.shape)
    return {
        "viscous": float(p.re_inv) * r * v * v,
        "surface": float(p.we) * r * v,
        "forcing": float(p.th) * force * r * r * v,
        "gas": -float(p.p_n) * r ** (2 - 3 * float(p.k)) * v,
    }


def _hermite(tr: Trajectory, p: RpeParams):
    """Quintic Hermite reconstruction from samples and the equation's R''."""
    from ..core_model import State, rhs

    acc = np.array([rhs(p, State(t, r, v)) for t, r, v in zip(tr.ts, tr.rs, tr.rdots)])
    ts, rs, vs = tr.ts, tr.rs, tr.rdots
    if ts[0] > ts[-1]:
        ts, rs, vs, acc = ts[::-1], rs[::-1], vs[::-1], acc[::-1]
    poly = BPoly.from_derivatives(ts, np.stack([rs, vs, acc], axis=1))
    dpoly = poly.derivative()

    def state(t):
        return np.stack([poly(t), dpoly(t)], axis=-1)

    return state


def energy_audit(tr: Trajectory, p: RpeParams) -> EnergyAudit:
    """Integrate every channel with 6-point Gauss-Legendre per sample interval."""
    if len(tr.ts) < 2:
        raise ValueError("energy audit needs at least two samples")
    state = tr.dense if tr.dense is not None else _hermite(tr, p)
    a, b = tr.ts[:-1], tr.ts[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    if tr.dense is not None:
        lo, hi = sorted((tr.ts[0], tr.ts[-1]))
        nodes = np.clip(nodes, lo, hi)
    y = state(nodes)
    parts = channel_integrands(p, nodes, y[:, 0], y[:, 1])
    w = (half[:, None] * _WEIGHTS[None, :]).ravel()
    totals = {k: float(np.sum(w * v)) for k, v in parts.items()}
    kinetic = 0.5 * (tr.rs[-1] ** 3 * tr.rdots[-1] ** 2 - tr.rs[0] ** 3 * tr.rdots[0] ** 2)
    defect = kinetic + totals["viscous"] + totals["surface"] + totals["forcing"] + totals["gas"]
    return EnergyAudit(float(tr.ts[0]), float(tr.ts[-1]), float(kinetic), totals["viscous"],
                       totals["surface"], totals["forcing"], totals["gas"], float(defect))
