"""The first-order ODE for y(x) = Rdot as a function of x = R (constant forcing).

    2 x^2 y y' + 3 x y^2 + 2 Re_inv y - 2 p_n x^(1-3k) + 2 p0 Th x + 2 We = 0

Near y = 0 the y-form is singular, so ``u = y^2`` can be integrated instead:

    x^2 u' = 2 p_n x^(1-3k) - 3 x u - 2 Re_inv sigma sqrt(u) - 2 We - 2 p0 Th x

with ``sigma`` the sign of y on the branch being followed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core_model import Constant, RpeParams
from ..errors import DomainError, UnsupportedForcing
from .dense import DenseOutput
from .ode import solve_ode
from .trajectory import IntegratorConfig


@dataclass
class ReducedTrajectory:
    xs: np.ndarray
    values: np.ndarray
    mode: str
    branch: float
    dense: DenseOutput | None

    @property
    def u(self) -> np.ndarray:
        return self.values if self.mode == "u" else self.values ** 2

    @property
    def y(self) -> np.ndarray:
        if self.mode == "y":
            return self.values
        return self.branch * np.sqrt(np.maximum(self.values, 0.0))

    def u_at(self, x):
        v = self.dense(x)[..., 0]
        return v if self.mode == "u" else v ** 2


def _p0(p: RpeParams, p0):
    if p0 is not None:
        return float(p0)
    if not isinstance(p.forcing, Constant):
        raise UnsupportedForcing("the reduction needs constant forcing")
    return float(p.forcing.p0)


def integrate_reduced(p: RpeParams, p0=None, x_range=(1.0, 0.5), y0: float = 0.0,
                      cfg: IntegratorConfig | None = None, mode: str = "auto",
                      branch: float = -1.0, allow_negative_u: bool = False) -> ReducedTrajectory:
    """Integrate from ``x_range[0]`` to ``x_range[1]`` starting at y = ``y0``.

    ``mode='auto'`` uses u = y^2 when ``y0 == 0`` and y otherwise.
    ``allow_negative_u`` continues the u-equation through u < 0 as a formal
    solution; it is linear in u only when Re_inv = 0, so it is refused otherwise.
    """
    cfg = cfg or IntegratorConfig()
    x0, x1 = (float(v) for v in x_range)
    if not (x0 > 0 and x1 > 0):
        raise DomainError("x must stay positive")
    pth = _p0(p, p0) * float(p.th)
    re, we, pn = float(p.re_inv), float(p.we), float(p.p_n)
    gas = 1 - 3 * float(p.k)
    if mode == "auto":
        mode = "u" if y0 == 0 else "y"
    if allow_negative_u and re != 0:
        raise DomainError("formal continuation through u < 0 needs Re_inv = 0")
    if mode == "u":
        sigma = -1.0 if branch < 0 else 1.0

        def rhs(x, v):
            u = v[0]
            root = math.sqrt(u) if u > 0 else 0.0
            return ((2 * pn * x ** gas - 3 * x * u - 2 * re * sigma * root - 2 * we - 2 * pth * x) / (x * x),)

        start = y0 * y0
    elif mode == "y":
        if y0 == 0:
            raise DomainError("the y-form is singular at y = 0; use mode='u'")
        sigma = 1.0 if y0 > 0 else -1.0

        def rhs(x, v):
            y = v[0]
            if y == 0:
                return (math.nan,)
            b = 3 * x * y * y + 2 * re * y - 2 * pn * x ** gas + 2 * pth * x + 2 * we
            return (-b / (2 * x * x * y),)

        start = y0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    sol = solve_ode(rhs, x0, [start], x1, cfg.rel_tol, cfg.abs_tol, h_init=cfg.h_init, h_max=cfg.h_max)
    if not sol.success:
        raise DomainError(f"reduced integration stopped at x={sol.ts[-1]}")
    vals = sol.ys[:, 0]
    if mode == "u" and not allow_negative_u and np.any(vals < -10 * cfg.abs_tol):
        bad = sol.ts[np.argmax(vals < -10 * cfg.abs_tol)]
        raise DomainError(f"u = y^2 became negative at x={bad} (unphysical branch)")
    if mode == "y" and np.any(np.sign(vals) != sigma):
        raise DomainError("y changed sign; restart in mode='u'")
    return ReducedTrajectory(sol.ts, vals, mode, sigma, sol.dense)
