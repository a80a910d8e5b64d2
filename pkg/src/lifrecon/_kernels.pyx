# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: LIF sampling of atom signals and discrepancy scans.

Function signatures and return conventions match ``_kernels_py``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, exp, fabs, isfinite, M_PI

cnp.import_array()

SINC = 0
PHI = 1

cdef double SERIES_CUTOFF = 1e-3


cdef struct AtomSignal:
    int kind
    int n
    double *centers
    double *weights
    double *s0     # sin(pi * p0 * c_n)
    double *c0     # cos(pi * p0 * c_n)
    double *s1
    double *c1
    double p0
    double p1
    double p2


cdef inline double sinc_from(double s, double x) nogil:
    # s = sin(pi x)
    cdef double p2
    if fabs(x) < SERIES_CUTOFF:
        p2 = (M_PI * x) * (M_PI * x)
        return 1.0 - p2 / 6.0 + p2 * p2 / 120.0
    return s / (M_PI * x)


cdef inline double dsinc_from(double s, double c, double x) nogil:
    # s = sin(pi x), c = cos(pi x)
    cdef double p2
    if fabs(x) < SERIES_CUTOFF:
        p2 = M_PI * M_PI
        return -p2 * x / 3.0 + p2 * p2 * x * x * x / 30.0
    return (c - s / (M_PI * x)) / x


cdef double eval_signal(AtomSignal *sig, double t) nogil:
    cdef int i
    cdef double acc = 0.0
    cdef double x, ax, bx, sa, ca, sb, cb, snA, csA, snB, csB
    cdef double A = sig.p0
    cdef double B = sig.p1
    cdef double alpha = sig.p2
    cdef double sincA, sincB
    if sig.kind == 0:
        snA = sin(M_PI * A * t)
        csA = cos(M_PI * A * t)
        for i in range(sig.n):
            x = A * (t - sig.centers[i])
            # angle subtraction: sin(pi A (t - c)) from precomputed tables
            sa = snA * sig.c0[i] - csA * sig.s0[i]
            acc += sig.weights[i] * sinc_from(sa, x)
        return acc
    snA = sin(M_PI * A * t)
    csA = cos(M_PI * A * t)
    snB = sin(M_PI * B * t)
    csB = cos(M_PI * B * t)
    for i in range(sig.n):
        x = t - sig.centers[i]
        ax = A * x
        bx = B * x
        sa = snA * sig.c0[i] - csA * sig.s0[i]
        ca = csA * sig.c0[i] + snA * sig.s0[i]
        sb = snB * sig.c1[i] - csB * sig.s1[i]
        cb = csB * sig.c1[i] + snB * sig.s1[i]
        sincA = sinc_from(sa, ax)
        sincB = sinc_from(sb, bx)
        acc += sig.weights[i] * (
            A * A * dsinc_from(sa, ca, ax) * sincB
            + A * B * sincA * dsinc_from(sb, cb, bx)
            + alpha * A * sincA * sincB)
    return acc


cdef double GL3_X = 0.7745966692414834  # sqrt(3/5)


cdef inline double gl3(AtomSignal *sig, double y, double t, double tau,
                       double alpha) nogil:
    # y(t + tau) for y' = f - alpha y: exact decay plus 3-point Gauss-Legendre
    # quadrature of int_0^tau f(t + u) exp(alpha (u - tau)) du
    cdef double u0 = 0.5 * tau * (1.0 - GL3_X)
    cdef double u1 = 0.5 * tau
    cdef double u2 = 0.5 * tau * (1.0 + GL3_X)
    cdef double acc = (5.0 / 9.0) * eval_signal(sig, t + u0) * exp(alpha * (u0 - tau))
    acc += (8.0 / 9.0) * eval_signal(sig, t + u1) * exp(alpha * (u1 - tau))
    acc += (5.0 / 9.0) * eval_signal(sig, t + u2) * exp(alpha * (u2 - tau))
    return exp(-alpha * tau) * y + 0.5 * tau * acc


def lif_sample_atoms(int kind, centers, weights, double p0, double p1,
                     double p2, double t_start, double t_end, double theta,
                     double alpha, double step, double tol,
                     double grazing_slope):
    """LIF sampling of a sinc-sum (``kind=SINC``) or phi-sum (``kind=PHI``).

    Returns ``(times, signs, grazing, max_state)``.
    """
    if kind != 0 and kind != 1:
        raise ValueError(f"unknown signal kind {kind!r}")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c_arr = np.ascontiguousarray(centers, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w_arr = np.ascontiguousarray(weights, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s0 = np.ascontiguousarray(np.sin(np.pi * p0 * c_arr))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c0 = np.ascontiguousarray(np.cos(np.pi * p0 * c_arr))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s1 = np.ascontiguousarray(np.sin(np.pi * p1 * c_arr))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c1 = np.ascontiguousarray(np.cos(np.pi * p1 * c_arr))
    cdef AtomSignal sig
    sig.kind = kind
    sig.n = c_arr.shape[0]
    sig.centers = &c_arr[0] if sig.n else NULL
    sig.weights = &w_arr[0] if sig.n else NULL
    sig.s0 = &s0[0] if sig.n else NULL
    sig.c0 = &c0[0] if sig.n else NULL
    sig.s1 = &s1[0] if sig.n else NULL
    sig.c1 = &c1[0] if sig.n else NULL
    sig.p0 = p0
    sig.p1 = p1
    sig.p2 = p2

    times = []
    signs = []
    grazing = []
    cdef double max_state = 0.0
    cdef double t = t_start
    cdef double y = 0.0
    cdef double h, y_new, lo, hi, y_lo, y_hi, mid, ym, tk, s, span, frac
    if not isfinite(eval_signal(&sig, t)):
        raise FloatingPointError(f"non-finite signal value at t={t!r}")
    while t < t_end:
        h = step if step < t_end - t else t_end - t
        if h <= 0.0:
            break
        y_new = gl3(&sig, y, t, h, alpha)
        if not isfinite(y_new):
            raise FloatingPointError(f"non-finite signal value near t={t!r}")
        if fabs(y_new) >= theta:
            lo = 0.0
            hi = h
            y_lo = y
            y_hi = y_new
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                ym = gl3(&sig, y, t, mid, alpha)
                if fabs(ym) >= theta:
                    hi = mid
                    y_hi = ym
                else:
                    lo = mid
                    y_lo = ym
            # linear interpolation of |y| inside the final bracket
            span = fabs(y_hi) - fabs(y_lo)
            frac = (theta - fabs(y_lo)) / span if span > 0.0 else 1.0
            frac = min(max(frac, 0.0), 1.0)
            tk = t + lo + (hi - lo) * frac
            if tk <= t:
                tk = t + hi
            s = 1.0 if y_hi > 0 else -1.0
            times.append(tk)
            signs.append(s)
            grazing.append(s * (eval_signal(&sig, tk) - alpha * y_hi) < grazing_slope)
            t = tk
            y = 0.0
        else:
            if fabs(y_new) > max_state:
                max_state = fabs(y_new)
            t = t + h
            y = y_new
    return (np.array(times, dtype=float), np.array(signs, dtype=float),
            np.array(grazing, dtype=bool), max_state)


def eval_atoms(int kind, centers, weights, double p0, double p1, double p2, ts):
    """Vectorised evaluation of an atom signal at the times ``ts``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c_arr = np.ascontiguousarray(centers, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w_arr = np.ascontiguousarray(weights, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s0 = np.ascontiguousarray(np.sin(np.pi * p0 * c_arr))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c0 = np.ascontiguousarray(np.cos(np.pi * p0 * c_arr))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s1 = np.ascontiguousarray(np.sin(np.pi * p1 * c_arr))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c1 = np.ascontiguousarray(np.cos(np.pi * p1 * c_arr))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t_arr = np.ascontiguousarray(ts, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(t_arr.shape[0])
    cdef AtomSignal sig
    cdef Py_ssize_t i
    sig.kind = kind
    sig.n = c_arr.shape[0]
    sig.centers = &c_arr[0] if sig.n else NULL
    sig.weights = &w_arr[0] if sig.n else NULL
    sig.s0 = &s0[0] if sig.n else NULL
    sig.c0 = &c0[0] if sig.n else NULL
    sig.s1 = &s1[0] if sig.n else NULL
    sig.c1 = &c1[0] if sig.n else NULL
    sig.p0 = p0
    sig.p1 = p1
    sig.p2 = p2
    for i in range(t_arr.shape[0]):
        out[i] = eval_signal(&sig, t_arr[i])
    return out


def event_discrepancy_bruteforce(u, va, has_a, vb, has_b, double alpha,
                                 bint merged=False):
    """Discrepancy over all intervals ``[u[p], u[q]]``.

    Each side is anchored at its own last event in the interval, or at
    ``u[q]`` for both when ``merged`` is set. Returns ``(value, p, q)``;
    ``p = q = -1`` for the empty interval.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a = np.ascontiguousarray(va, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b = np.ascontiguousarray(vb, dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] ha = np.ascontiguousarray(has_a, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] hb = np.ascontiguousarray(has_b, dtype=np.uint8)
    cdef Py_ssize_t n = uu.shape[0]
    cdef Py_ssize_t p, q, best_p = -1, best_q = -1
    cdef double best = 0.0
    cdef double sa, sb, anchor_a, anchor_b, val
    cdef bint seen_a, seen_b
    with nogil:
        for q in range(n):
            sa = 0.0
            sb = 0.0
            seen_a = False
            seen_b = False
            anchor_a = uu[q]
            anchor_b = uu[q]
            if merged:
                seen_a = True
                seen_b = True
            p = q
            while p >= 0:
                if ha[p]:
                    if not seen_a:
                        seen_a = True
                        anchor_a = uu[p]
                    sa += exp(alpha * (uu[p] - anchor_a)) * a[p]
                if hb[p]:
                    if not seen_b:
                        seen_b = True
                        anchor_b = uu[p]
                    sb += exp(alpha * (uu[p] - anchor_b)) * b[p]
                val = fabs(sa - sb)
                if val > best or (val == best and p < best_p):
                    best = val
                    best_p = p
                    best_q = q
                p -= 1
    return best, best_p, best_q


def event_discrepancy_streaming(u, c, double alpha):
    """Merged-anchor discrepancy of the difference sequence ``c`` at ``u``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cc = np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t j, sM = 0, sm = 0, best_p = -1, best_q = -1
    cdef double best = 0.0, M = 0.0, m = 0.0, decay, dM, dm
    for j in range(uu.shape[0]):
        decay = exp(-alpha * (uu[j] - uu[j - 1])) if j else 0.0
        dM = decay * M
        dm = decay * m
        if j and dM > 0.0:
            M = cc[j] + dM
        else:
            M = cc[j]
            sM = j
        if j and dm < 0.0:
            m = cc[j] + dm
        else:
            m = cc[j]
            sm = j
        if M > best:
            best = M
            best_p = sM
            best_q = j
        if -m > best:
            best = -m
            best_p = sm
            best_q = j
    return best, best_p, best_q


def grid_discrepancy(d, double h, double alpha):
    """Streaming grid discrepancy; returns ``(value, i_left, i_right)``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dd = np.ascontiguousarray(d, dtype=np.float64)
    cdef double decay = exp(-alpha * h)
    cdef double best = 0.0, U = 0.0, L = 0.0, w, dU, dL
    cdef Py_ssize_t i, sU = 0, sL = 0, bl = -1, br = -1
    for i in range(1, dd.shape[0]):
        w = 0.5 * h * (dd[i - 1] * decay + dd[i])
        dU = decay * U
        dL = decay * L
        if i > 1 and dU > 0.0:
            U = dU + w
        else:
            U = w
            sU = i - 1
        if i > 1 and dL < 0.0:
            L = dL + w
        else:
            L = w
            sL = i - 1
        if U > best:
            best = U
            bl = sU
            br = i
        if -L > best:
            best = -L
            bl = sL
            br = i
    return best, bl, br
