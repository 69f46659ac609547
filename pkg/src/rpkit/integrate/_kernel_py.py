"""Pure-Python adaptive Dormand-Prince loop.

``solve`` is generic over the right-hand side.  ``rpe_solve`` is the
Rayleigh-Plesset specialisation and mirrors ``_kernel.pyx`` operation for
operation, so both backends produce the same floating-point results.
"""

from __future__ import annotations

import math

import numpy as np

from .tableau import A, C, E

STATUS_DONE = 0
STATUS_FLOOR = 1
STATUS_UNDERFLOW = 2
STATUS_MAX_STEPS = 3

SAFETY = 0.9
BETA = 0.04
EXPO1 = 0.2 - BETA * 0.75
FAC_MIN = 0.2
FAC_MAX = 10.0
SHRINK_ON_DOMAIN = 0.25
EPS = 2.220446049250313e-16


def error_norm(y, y_new, err, rtol, atol):
    """RMS of err / (atol + rtol max(|y|, |y_new|))."""
    n = len(y)
    acc = 0.0
    for i in range(n):
        sk = atol + rtol * max(abs(y[i]), abs(y_new[i]))
        q = err[i] / sk
        acc += q * q
    return math.sqrt(acc / n)


def initial_step(rhs, t0, y0, direction, rtol, atol, h_max):
    """Hairer's starting-step heuristic."""
    n = len(y0)
    f0 = rhs(t0, y0)
    sk = [atol + rtol * abs(v) for v in y0]
    d0 = math.sqrt(sum((y0[i] / sk[i]) ** 2 for i in range(n)) / n)
    d1 = math.sqrt(sum((f0[i] / sk[i]) ** 2 for i in range(n)) / n)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, h_max)
    y1 = [y0[i] + direction * h0 * f0[i] for i in range(n)]
    try:
        f1 = rhs(t0 + direction * h0, y1)
        d2 = math.sqrt(sum(((f1[i] - f0[i]) / sk[i]) ** 2 for i in range(n)) / n) / h0
    except (ValueError, ZeroDivisionError, OverflowError):
        return min(h0 * 1e-3, h_max)
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 5)
    return min(100 * h0, h1, h_max)


def solve(rhs, t0, y0, t_end, rtol, atol, h0, h_max, pos_index=-1, floor=0.0, max_steps=1_000_000):
    """Adaptive DOPRI5 from ``t0`` to ``t_end`` (either direction).

    Component ``pos_index`` (if >= 0) must stay positive at every stage;
    a stage that violates this, or produces a non-finite value, rejects the
    step and shrinks it fourfold.  The run stops early (status 1) on the
    first accepted step whose endpoint has ``y[pos_index] <= floor``.

    Returns ``(ts, ys, ks, status, n_accept, n_reject)`` where ``ks[i]`` holds
    the seven stage slopes of step ``i`` (for dense output).
    """
    n = len(y0)
    direction = 1.0 if t_end >= t0 else -1.0
    t = float(t0)
    y = [float(v) for v in y0]
    ts = [t]
    ys = [list(y)]
    ks = []
    n_accept = 0
    n_reject = 0
    if t == t_end:
        return _pack(ts, ys, ks, n, STATUS_DONE, 0, 0)
    h = min(abs(h0), h_max)
    facold = 1e-4
    last_rejected = False
    K = [[0.0] * n for _ in range(7)]
    k1 = rhs(t, y)
    for i in range(n):
        K[0][i] = k1[i]
    status = STATUS_MAX_STEPS
    while n_accept + n_reject < max_steps:
        if h < 16 * EPS * max(abs(t), 1.0):
            status = STATUS_UNDERFLOW
            break
        last = False
        if (t + direction * h - t_end) * direction >= 0:
            h = abs(t_end - t)
            last = True
        hs = direction * h
        ok = True
        ynew = y
        for s in range(1, 7):
            ystage = [0.0] * n
            for i in range(n):
                acc = 0.0
                row = A[s]
                for j in range(s):
                    acc += row[j] * K[j][i]
                ystage[i] = y[i] + hs * acc
            if not _admissible(ystage, pos_index):
                ok = False
                break
            ks_ = rhs(t + C[s] * hs, ystage)
            for i in range(n):
                K[s][i] = ks_[i]
            if not all(math.isfinite(v) for v in ks_):
                ok = False
                break
            if s == 6:
                ynew = ystage
        if not ok:
            n_reject += 1
            h *= SHRINK_ON_DOMAIN
            last_rejected = True
            continue
        err = [0.0] * n
        for i in range(n):
            acc = 0.0
            for j in range(7):
                acc += E[j] * K[j][i]
            err[i] = hs * acc
        enorm = error_norm(y, ynew, err, rtol, atol)
        if not math.isfinite(enorm):
            n_reject += 1
            h *= SHRINK_ON_DOMAIN
            last_rejected = True
            continue
        fac11 = enorm ** EXPO1
        if enorm <= 1.0:
            fac = fac11 / facold ** BETA
            fac = max(1.0 / FAC_MAX, min(1.0 / FAC_MIN, fac / SAFETY))
            hnew = h / fac
            if last_rejected:
                hnew = min(hnew, h)
            facold = max(enorm, 1e-4)
            n_accept += 1
            ks.append([list(row) for row in K])
            t = t_end if last else t + hs
            y = ynew
            ts.append(t)
            ys.append(list(y))
            for i in range(n):
                K[0][i] = K[6][i]
            last_rejected = False
            if pos_index >= 0 and y[pos_index] <= floor:
                status = STATUS_FLOOR
                break
            if last:
                status = STATUS_DONE
                break
            h = min(hnew, h_max)
        else:
            n_reject += 1
            h = h / min(1.0 / FAC_MIN, fac11 / SAFETY)
            last_rejected = True
    return _pack(ts, ys, ks, n, status, n_accept, n_reject)


def _admissible(y, pos_index):
    for v in y:
        if not math.isfinite(v):
            return False
    return pos_index < 0 or y[pos_index] > 0.0


def _pack(ts, ys, ks, n, status, n_accept, n_reject):
    ks_arr = np.array(ks, dtype=float).reshape(len(ks), 7, n)
    return np.array(ts, dtype=float), np.array(ys, dtype=float), ks_arr, status, n_accept, n_reject


def rpe_rhs(re_inv, we, th, p_n, gexp, forcing_kind, fc, fa, fb, fe):
    """Closure f(t, (R, Rdot)) matching the compiled kernel's arithmetic."""
    if forcing_kind == 0:
        def rhs(t, y):
            r = y[0]
            v = y[1]
            return (v, p_n / r ** gexp - 1.5 * v * v / r - re_inv * v / (r * r) - we / (r * r) - th * fc / r)
    else:
        def rhs(t, y):
            r = y[0]
            v = y[1]
            p = fc * (fa * t + fb) ** fe
            return (v, p_n / r ** gexp - 1.5 * v * v / r - re_inv * v / (r * r) - we / (r * r) - th * p / r)
    return rhs


def rpe_solve(t0, r0, v0, t_end, rtol, atol, h0, h_max, r_floor,
              re_inv, we, th, p_n, gexp, forcing_kind, fc, fa, fb, fe, max_steps):
    rhs = rpe_rhs(re_inv, we, th, p_n, gexp, forcing_kind, fc, fa, fb, fe)
    return solve(rhs, t0, (r0, v0), t_end, rtol, atol, h0, h_max, 0, r_floor, max_steps)
