"""Full Rayleigh-Plesset integration with collapse detection."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..core_model import Constant, PowerLaw, RpeParams, State
from ..errors import DomainError
from . import _backend, _kernel_py
from .dense import DenseOutput

REACHED_T_END = "REACHED_T_END"
COLLAPSE = "COLLAPSE"
BLOWUP = "BLOWUP"


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    h_init: float | None = None
    h_max: float = math.inf
    r_floor: float = 1e-6
    max_steps: int = 2_000_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not 0 <= self.r_floor < 1:
            raise ValueError("r_floor must lie in [0, 1)")
        if not self.h_max > 0:
            raise ValueError("h_max must be positive")
        if self.h_init is not None and not self.h_init > 0:
            raise ValueError("h_init must be positive")


@dataclass(frozen=True)
class TerminalEvent:
    kind: str
    t: float

    def to_json(self) -> dict:
        return {"kind": self.kind, "t": self.t}


@dataclass
class Trajectory:
    """Accepted samples plus (optionally) the dense output that produced them."""

    ts: np.ndarray
    rs: np.ndarray
    rdots: np.ndarray
    terminal_event: TerminalEvent
    n_accept: int = 0
    n_reject: int = 0
    dense: DenseOutput | None = field(default=None, repr=False)
    backend: str = ""

    @property
    def samples(self) -> list:
        return [State(float(t), float(r), float(v)) for t, r, v in zip(self.ts, self.rs, self.rdots)]

    @property
    def t_final(self) -> float:
        return float(self.ts[-1])

    def __len__(self):
        return len(self.ts)

    def _check_range(self, t):
        lo, hi = sorted((self.ts[0], self.ts[-1]))
        tt = np.atleast_1d(t)
        span = max(hi - lo, 1.0)
        if np.any(tt < lo - 1e-12 * span) or np.any(tt > hi + 1e-12 * span):
            raise ValueError(f"time outside trajectory range [{lo}, {hi}]")

    def __call__(self, t):
        """(R, Rdot) from dense output."""
        if self.dense is None:
            raise ValueError("trajectory has no dense output")
        self._check_range(t)
        return self.dense(t)

    def acceleration(self, t):
        if self.dense is None:
            raise ValueError("trajectory has no dense output")
        self._check_range(t)
        d = self.dense.derivative(t)
        return d[..., 1]

    def stats(self) -> dict:
        return {
            "n_samples": len(self.ts),
            "accepted_steps": self.n_accept,
            "rejected_steps": self.n_reject,
            "terminal_event": self.terminal_event.to_json(),
            "backend": self.backend,
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "R", "Rdot"])
            for row in zip(self.ts, self.rs, self.rdots):
                w.writerow([repr(float(x)) for x in row])

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["t", "R", "Rdot"]:
            raise ValueError("trajectory CSV must have header t,R,Rdot")
        data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
        if data.ndim != 2 or len(data) < 2:
            raise ValueError("trajectory CSV needs at least two samples")
        dt = np.diff(data[:, 0])
        if not (np.all(dt > 0) or np.all(dt < 0)):
            raise ValueError("sample times must be strictly monotone")
        return cls(data[:, 0], data[:, 1], data[:, 2], TerminalEvent(REACHED_T_END, float(data[-1, 0])))


def _forcing_args(f):
    if isinstance(f, Constant):
        return 0, float(f.p0), 0.0, 0.0, 0.0
    if isinstance(f, PowerLaw):
        return 1, float(f.c), float(f.a), float(f.b), float(f.e)
    raise TypeError(f"unsupported forcing {f!r}")


def _check_forcing_domain(f, t0, t1):
    if isinstance(f, PowerLaw):
        for tt in (t0, t1):
            if float(f.a) * tt + float(f.b) <= 0:
                raise DomainError(f"power-law forcing undefined at t={tt}")


def integrate_rpe(p: RpeParams, s0: State, t_end: float, cfg: IntegratorConfig | None = None,
                  backend: str | None = None) -> Trajectory:
    """Integrate the full equation from ``s0`` to ``t_end`` (either direction)."""
    cfg = cfg or IntegratorConfig()
    if not s0.r > cfg.r_floor:
        raise DomainError("initial radius must exceed r_floor")
    _check_forcing_domain(p.forcing, s0.t, t_end)
    kind, fc, fa, fb, fe = _forcing_args(p.forcing)
    coeffs = (float(p.re_inv), float(p.we), float(p.th), float(p.p_n), p.gas_exponent)
    direction = 1.0 if t_end >= s0.t else -1.0
    h0 = cfg.h_init
    if h0 is None:
        rhs = _kernel_py.rpe_rhs(*coeffs, kind, fc, fa, fb, fe)
        h0 = _kernel_py.initial_step(rhs, s0.t, [s0.r, s0.r_dot], direction, cfg.rel_tol, cfg.abs_tol, cfg.h_max)
    impl = _backend.kernel(backend)
    ts, ys, ks, status, na, nr = impl.rpe_solve(
        float(s0.t), float(s0.r), float(s0.r_dot), float(t_end), cfg.rel_tol, cfg.abs_tol,
        float(h0), float(cfg.h_max), float(cfg.r_floor), *coeffs, kind, fc, fa, fb, fe, int(cfg.max_steps),
    )
    dense = DenseOutput(ts, ys, ks) if len(ts) > 1 else None
    name = backend or _backend.BACKEND
    if status == _kernel_py.STATUS_DONE:
        ev = TerminalEvent(REACHED_T_END, float(ts[-1]))
    elif status == _kernel_py.STATUS_FLOOR:
        t_a, t_b = ts[-2], ts[-1]
        g = lambda tt: dense(tt)[0] - cfg.r_floor  # noqa: E731
        t_ev = t_b if g(t_b) >= 0 else brentq(g, t_a, t_b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        y_ev = dense(t_ev)
        ts = ts.copy()
        ys = ys.copy()
        ts[-1] = t_ev
        ys[-1] = (cfg.r_floor, y_ev[1])
        ev = TerminalEvent(COLLAPSE, float(t_ev))
    else:
        ev = TerminalEvent(BLOWUP, float(ts[-1]))
    return Trajectory(ts, ys[:, 0].copy(), ys[:, 1].copy(), ev, int(na), int(nr), dense, name)
