# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Rayleigh-Plesset DOPRI5 loop; twin of ``_kernel_py.rpe_solve``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, sqrt, fabs, isfinite

from .tableau import A as _A, C as _C, E as _E

cnp.import_array()

cdef double A[7][6]
cdef double C[7]
cdef double E[7]

for _s in range(7):
    C[_s] = _C[_s]
    E[_s] = _E[_s]
    for _j in range(6):
        A[_s][_j] = _A[_s][_j] if _j < len(_A[_s]) else 0.0

cdef double SAFETY = 0.9
cdef double BETA = 0.04
cdef double EXPO1 = 0.2 - 0.04 * 0.75
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 10.0
cdef double SHRINK_ON_DOMAIN = 0.25
cdef double EPS = 2.220446049250313e-16


cdef inline double _fmax(double a, double b) nogil:
    return a if a >= b else b


cdef inline double _fmin(double a, double b) nogil:
    return a if a <= b else b


cdef inline void _rhs(double t, double r, double v, double re_inv, double we, double th,
                      double p_n, double gexp, int kind, double fc, double fa, double fb,
                      double fe, double* out) nogil:
    cdef double p
    out[0] = v
    if kind == 0:
        out[1] = p_n / pow(r, gexp) - 1.5 * v * v / r - re_inv * v / (r * r) - we / (r * r) - th * fc / r
    else:
        p = fc * pow(fa * t + fb, fe)
        out[1] = p_n / pow(r, gexp) - 1.5 * v * v / r - re_inv * v / (r * r) - we / (r * r) - th * p / r


def rpe_solve(double t0, double r0, double v0, double t_end, double rtol, double atol,
              double h0, double h_max, double r_floor, double re_inv, double we, double th,
              double p_n, double gexp, int forcing_kind, double fc, double fa, double fb,
              double fe, long max_steps):
    cdef double direction = 1.0 if t_end >= t0 else -1.0
    cdef double t = t0
    cdef double y[2]
    cdef double ynew[2]
    cdef double ystage[2]
    cdef double err[2]
    cdef double K[7][2]
    cdef double kout[2]
    cdef double h, hs, acc, enorm, fac, fac11, hnew, sk, q
    cdef double facold = 1e-4
    cdef bint last, ok, last_rejected = False
    cdef int s, i, j
    cdef long n_accept = 0, n_reject = 0, cap = 256, n = 0
    cdef int status = 3

    ts_arr = np.empty(cap + 1)
    ys_arr = np.empty((cap + 1, 2))
    ks_arr = np.empty((cap, 7, 2))
    cdef double[::1] ts = ts_arr
    cdef double[:, ::1] ys = ys_arr
    cdef double[:, :, ::1] ks = ks_arr

    y[0] = r0
    y[1] = v0
    ts[0] = t
    ys[0, 0] = r0
    ys[0, 1] = v0
    if t == t_end:
        return ts_arr[:1].copy(), ys_arr[:1].copy(), ks_arr[:0].copy(), 0, 0, 0

    h = _fmin(fabs(h0), h_max)
    _rhs(t, y[0], y[1], re_inv, we, th, p_n, gexp, forcing_kind, fc, fa, fb, fe, kout)
    K[0][0] = kout[0]
    K[0][1] = kout[1]

    while n_accept + n_reject < max_steps:
        if h < 16 * EPS * _fmax(fabs(t), 1.0):
            status = 2
            break
        last = False
        if (t + direction * h - t_end) * direction >= 0:
            h = fabs(t_end - t)
            last = True
        hs = direction * h
        ok = True
        for s in range(1, 7):
            for i in range(2):
                acc = 0.0
                for j in range(s):
                    acc += A[s][j] * K[j][i]
                ystage[i] = y[i] + hs * acc
            if not (isfinite(ystage[0]) and isfinite(ystage[1])) or not ystage[0] > 0.0:
                ok = False
                break
            _rhs(t + C[s] * hs, ystage[0], ystage[1], re_inv, we, th, p_n, gexp,
                 forcing_kind, fc, fa, fb, fe, kout)
            K[s][0] = kout[0]
            K[s][1] = kout[1]
            if not (isfinite(kout[0]) and isfinite(kout[1])):
                ok = False
                break
            if s == 6:
                ynew[0] = ystage[0]
                ynew[1] = ystage[1]
        if not ok:
            n_reject += 1
            h *= SHRINK_ON_DOMAIN
            last_rejected = True
            continue
        for i in range(2):
            acc = 0.0
            for j in range(7):
                acc += E[j] * K[j][i]
            err[i] = hs * acc
        acc = 0.0
        for i in range(2):
            sk = atol + rtol * _fmax(fabs(y[i]), fabs(ynew[i]))
            q = err[i] / sk
            acc += q * q
        enorm = sqrt(acc / 2)
        if not isfinite(enorm):
            n_reject += 1
            h *= SHRINK_ON_DOMAIN
            last_rejected = True
            continue
        fac11 = pow(enorm, EXPO1)
        if enorm <= 1.0:
            fac = fac11 / pow(facold, BETA)
            fac = _fmax(1.0 / FAC_MAX, _fmin(1.0 / FAC_MIN, fac / SAFETY))
            hnew = h / fac
            if last_rejected:
                hnew = _fmin(hnew, h)
            facold = _fmax(enorm, 1e-4)
            n_accept += 1
            if n >= cap:
                cap *= 2
                ts_arr = np.resize(ts_arr, cap + 1)
                ys_arr = np.resize(ys_arr, (cap + 1, 2))
                ks_arr = np.resize(ks_arr, (cap, 7, 2))
                ts = ts_arr
                ys = ys_arr
                ks = ks_arr
            for s in range(7):
                ks[n, s, 0] = K[s][0]
                ks[n, s, 1] = K[s][1]
            if last:
                t = t_end
            else:
                t = t + hs
            y[0] = ynew[0]
            y[1] = ynew[1]
            n += 1
            ts[n] = t
            ys[n, 0] = y[0]
            ys[n, 1] = y[1]
            K[0][0] = K[6][0]
            K[0][1] = K[6][1]
            last_rejected = False
            if y[0] <= r_floor:
                status = 1
                break
            if last:
                status = 0
                break
            h = _fmin(hnew, h_max)
        else:
            n_reject += 1
            h = h / _fmin(1.0 / FAC_MIN, fac11 / SAFETY)
            last_rejected = True

    return (ts_arr[:n + 1].copy(), ys_arr[:n + 1].copy(), ks_arr[:n].copy(),
            status, n_accept, n_reject)
