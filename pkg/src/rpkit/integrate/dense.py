"""Piecewise dense output over accepted steps."""

from __future__ import annotations

import numpy as np

from .tableau import P

_P = np.array(P)  # (7, 4)


class DenseOutput:
    """Quartic continuous extension of a DOPRI5 run.

    ``ts`` are step boundaries (monotone in either direction), ``ys`` the
    states there and ``ks[i]`` the stage slopes of step ``i``.
    """

    def __init__(self, ts, ys, ks):
        self.ts = np.asarray(ts, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.ks = np.asarray(ks, dtype=float)
        if len(self.ts) < 2 or len(self.ks) != len(self.ts) - 1:
            raise ValueError("dense output needs at least one step")
        self.direction = 1.0 if self.ts[-1] >= self.ts[0] else -1.0
        self._keys = self.direction * self.ts

    @property
    def t_min(self) -> float:
        return float(min(self.ts[0], self.ts[-1]))

    @property
    def t_max(self) -> float:
        return float(max(self.ts[0], self.ts[-1]))

    def _locate(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        lo, hi = self.t_min, self.t_max
        span = max(hi - lo, 1.0)
        if np.any(t < lo - 1e-12 * span) or np.any(t > hi + 1e-12 * span):
            raise ValueError(f"time outside dense-output range [{lo}, {hi}]")
        idx = np.searchsorted(self._keys, self.direction * t, side="right") - 1
        idx = np.clip(idx, 0, len(self.ks) - 1)
        h = self.ts[idx + 1] - self.ts[idx]
        theta = (t - self.ts[idx]) / h
        return t, idx, h, theta

    def __call__(self, t):
        """State at ``t`` (scalar gives shape (dim,), array gives (n, dim))."""
        scalar = np.ndim(t) == 0
        t, idx, h, th = self._locate(t)
        powers = np.stack([th, th ** 2, th ** 3, th ** 4], axis=1)
        w = powers @ _P.T  # (n, 7)
        y = self.ys[idx] + h[:, None] * np.einsum("nj,njd->nd", w, self.ks[idx])
        return y[0] if scalar else y

    def derivative(self, t):
        """Time derivative of the interpolant."""
        scalar = np.ndim(t) == 0
        t, idx, h, th = self._locate(t)
        powers = np.stack([np.ones_like(th), 2 * th, 3 * th ** 2, 4 * th ** 3], axis=1)
        w = powers @ _P.T
        dy = np.einsum("nj,njd->nd", w, self.ks[idx])
        return dy[0] if scalar else dy
