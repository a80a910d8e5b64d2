"""Pure-Python implementations of the numerical kernels.

This module mirrors ``_kernels.pyx`` function by function and is used
whenever the compiled extension is unavailable (or disabled through the
``LIFRECON_PURE_PYTHON`` environment variable).
"""

import math

import numpy as np

SINC = 0
PHI = 1

_SERIES_CUTOFF = 1e-3


def _sinc(x):
    if abs(x) < _SERIES_CUTOFF:
        p2 = (math.pi * x) ** 2
        return 1.0 - p2 / 6.0 + p2 * p2 / 120.0
    px = math.pi * x
    return math.sin(px) / px


def _dsinc(x):
    # d/dx sin(pi x)/(pi x)
    if abs(x) < _SERIES_CUTOFF:
        p2 = math.pi * math.pi
        return -p2 * x / 3.0 + p2 * p2 * x ** 3 / 30.0
    px = math.pi * x
    return (math.cos(px) - math.sin(px) / px) / x


def sinc_sum(t, centers, amps, scale):
    """Evaluate ``sum(amps * sinc(scale * (t - centers)))`` at scalar ``t``."""
    return float(np.dot(amps, np.sinc(scale * (t - centers))))


def phi_sum(t, centers, weights, A, B, alpha):
    """Evaluate ``sum(weights * phi(t - centers))`` at scalar ``t``.

    ``phi(x) = psi'(x) + alpha * psi(x)`` with
    ``psi(x) = A * sinc(A x) * sinc(B x)``.
    """
    x = t - centers
    return float(np.dot(weights, phi_values(x, A, B, alpha)))


def dsinc_values(x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < _SERIES_CUTOFF
    xs = x[small]
    p2 = math.pi * math.pi
    out[small] = -p2 * xs / 3.0 + p2 * p2 * xs ** 3 / 30.0
    xl = x[~small]
    px = math.pi * xl
    out[~small] = (np.cos(px) - np.sin(px) / px) / xl
    return out


def psi_values(x, A, B):
    x = np.asarray(x, dtype=float)
    return A * np.sinc(A * x) * np.sinc(B * x)


def phi_values(x, A, B, alpha):
    x = np.asarray(x, dtype=float)
    sa = np.sinc(A * x)
    sb = np.sinc(B * x)
    dpsi = A * A * dsinc_values(A * x) * sb + A * B * sa * dsinc_values(B * x)
    return dpsi + alpha * A * sa * sb


def make_evaluator(kind, centers, weights, p0, p1=0.0, p2=0.0):
    centers = np.ascontiguousarray(centers, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    if kind == SINC:
        return lambda t: sinc_sum(t, centers, weights, p0)
    if kind == PHI:
        return lambda t: phi_sum(t, centers, weights, p0, p1, p2)
    raise ValueError(f"unknown signal kind {kind!r}")


def eval_atoms(kind, centers, weights, p0, p1, p2, ts):
    """Vectorised evaluation of an atom signal at the times ``ts``."""
    ts = np.asarray(ts, dtype=float)
    centers = np.asarray(centers, dtype=float)
    weights = np.asarray(weights, dtype=float)
    out = np.empty(ts.shape[0])
    # chunked to bound the (len(ts), len(centers)) temporary
    for lo in range(0, ts.shape[0], 4096):
        x = ts[lo:lo + 4096, None] - centers[None, :]
        if kind == SINC:
            vals = np.sinc(p0 * x)
        elif kind == PHI:
            vals = phi_values(x, p0, p1, p2)
        else:
            raise ValueError(f"unknown signal kind {kind!r}")
        out[lo:lo + 4096] = vals @ weights
    return out


_GL3_X = (-math.sqrt(0.6), 0.0, math.sqrt(0.6))
_GL3_W = (5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0)


def _gl3(f, y, t, tau, alpha):
    # y(t + tau) for y' = f - alpha y: exact decay plus 3-point Gauss-Legendre
    # quadrature of int_0^tau f(t + u) exp(alpha (u - tau)) du
    acc = 0.0
    for x, w in zip(_GL3_X, _GL3_W):
        u = 0.5 * tau * (1.0 + x)
        acc += w * f(t + u) * math.exp(alpha * (u - tau))
    return math.exp(-alpha * tau) * y + 0.5 * tau * acc


def lif_sample_callable(f, t_start, t_end, theta, alpha, step, tol,
                        grazing_slope):
    """Leaky integrate-and-fire sampling of an arbitrary scalar callable.

    Integrates ``y' = f(t) - alpha * y`` in steps of ``step`` with an
    exponential 3-point Gauss-Legendre rule, resetting ``y`` to zero at every
    event. A step whose end state reaches ``|y| >= theta`` is refined by
    bisection on the sub-step length until the bracket is narrower than
    ``tol``; the event time is then interpolated linearly inside the bracket.

    Returns ``(times, signs, grazing, max_state)`` where ``max_state`` is the
    largest ``|y|`` seen at a non-event step boundary.
    """
    times = []
    signs = []
    grazing = []
    max_state = 0.0
    t = float(t_start)
    y = 0.0
    if not math.isfinite(f(t)):
        raise FloatingPointError(f"non-finite signal value at t={t!r}")
    while t < t_end:
        h = min(step, t_end - t)
        if h <= 0.0:
            break
        y_new = _gl3(f, y, t, h, alpha)
        if not math.isfinite(y_new):
            raise FloatingPointError(f"non-finite signal value near t={t!r}")
        if abs(y_new) >= theta:
            lo, hi, y_lo, y_hi = 0.0, h, y, y_new
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                ym = _gl3(f, y, t, mid, alpha)
                if abs(ym) >= theta:
                    hi, y_hi = mid, ym
                else:
                    lo, y_lo = mid, ym
            # linear interpolation of |y| inside the final bracket
            span = abs(y_hi) - abs(y_lo)
            frac = (theta - abs(y_lo)) / span if span > 0.0 else 1.0
            tk = t + lo + (hi - lo) * min(max(frac, 0.0), 1.0)
            if tk <= t:
                tk = t + hi
            s = 1.0 if y_hi > 0 else -1.0
            times.append(tk)
            signs.append(s)
            grazing.append(s * (f(tk) - alpha * y_hi) < grazing_slope)
            t, y = tk, 0.0
        else:
            if abs(y_new) > max_state:
                max_state = abs(y_new)
            t, y = t + h, y_new
    return (np.array(times, dtype=float), np.array(signs, dtype=float),
            np.array(grazing, dtype=bool), max_state)


def lif_sample_atoms(kind, centers, weights, p0, p1, p2, t_start, t_end,
                     theta, alpha, step, tol, grazing_slope):
    f = make_evaluator(kind, centers, weights, p0, p1, p2)
    return lif_sample_callable(f, t_start, t_end, theta, alpha, step, tol,
                               grazing_slope)


def event_discrepancy_bruteforce(u, va, has_a, vb, has_b, alpha,
                                 merged=False):
    """Discrepancy over all intervals ``[u[p], u[q]]``.

    ``u`` is the sorted union of event times; ``va``/``vb`` hold each
    sequence's value at ``u`` (0 where ``has_*`` is False). Each side is
    anchored at its own last event in the interval, or at ``u[q]`` for both
    when ``merged`` is set. Returns ``(value, p, q)``; ``p = q = -1`` when the
    maximum is the empty interval.
    """
    n = len(u)
    best, best_p, best_q = 0.0, -1, -1
    u = np.asarray(u, dtype=float)
    for q in range(n):
        # contributions of each side for left endpoints p = q, q-1, ..., 0
        seg = slice(0, q + 1)
        sa = _anchored_suffix(u[seg], va[seg], has_a[seg], alpha, merged)
        sb = _anchored_suffix(u[seg], vb[seg], has_b[seg], alpha, merged)
        diff = np.abs(sa - sb)
        p = int(np.argmax(diff))
        val = float(diff[p])
        if val > best or (val == best and best_p >= 0 and p < best_p):
            best, best_p, best_q = val, p, q
    return best, best_p, best_q


def _anchored_suffix(u, v, has, alpha, merged):
    # S[p] = sum_{j >= p, has[j]} exp(alpha (u_j - anchor)) v_j
    idx = np.flatnonzero(has)
    out = np.zeros(len(u))
    if idx.size == 0:
        return out
    anchor = u[-1] if merged else u[idx[-1]]
    w = np.zeros(len(u))
    w[idx] = np.exp(alpha * (u[idx] - anchor)) * v[idx]
    out[:] = np.cumsum(w[::-1])[::-1]
    return out


def event_discrepancy_streaming(u, c, alpha):
    """Merged-anchor discrepancy of the difference sequence ``c`` at times ``u``.

    Returns ``(value, p, q)`` like :func:`event_discrepancy_bruteforce`.
    """
    best, best_p, best_q = 0.0, -1, -1
    M = m = 0.0
    sM = sm = 0
    for j in range(len(u)):
        decay = math.exp(-alpha * (u[j] - u[j - 1])) if j else 0.0
        dM = decay * M
        dm = decay * m
        if j and dM > 0.0:
            M = c[j] + dM
        else:
            M, sM = c[j], j
        if j and dm < 0.0:
            m = c[j] + dm
        else:
            m, sm = c[j], j
        if M > best:
            best, best_p, best_q = M, sM, j
        if -m > best:
            best, best_p, best_q = -m, sm, j
    return best, best_p, best_q


def grid_discrepancy(d, h, alpha):
    """Streaming maximum of ``|int_I d(s) exp(alpha (s - right(I))) ds|``.

    Interval endpoints are restricted to grid nodes and the integral uses
    the trapezoid rule with decay. Returns ``(value, i_left, i_right)``.
    """
    decay = math.exp(-alpha * h)
    best, bl, br = 0.0, -1, -1
    U = L = 0.0
    sU = sL = 0
    for i in range(1, len(d)):
        w = 0.5 * h * (d[i - 1] * decay + d[i])
        dU = decay * U
        dL = decay * L
        if i > 1 and dU > 0.0:
            U = dU + w
        else:
            U, sU = w, i - 1
        if i > 1 and dL < 0.0:
            L = dL + w
        else:
            L, sL = w, i - 1
        if U > best:
            best, bl, br = U, sU, i
        if -L > best:
            best, bl, br = -L, sL, i
    return best, bl, br
