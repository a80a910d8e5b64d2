"""Weyl discrepancy between faded interval measures of signals and event sequences.

For a leak rate ``alpha`` the interval measure of a signal is
``mu_f((r, s]) = int_r^s f(tau) exp(alpha (tau - s)) dtau`` and the one of
an event sequence is ``mu_eta(I) = sum_{t_j in I} exp(alpha (t_j - t_n)) v_j``
with ``t_n`` the last event inside ``I``. The discrepancy of two measures is
the supremum over intervals of the absolute difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .exceptions import ParameterError
from .signal_core import reference_leaky_average

PER_SEQUENCE = "per-sequence-anchor"
MERGED = "merged-anchor"


@dataclass(frozen=True)
class DiscrepancyResult:
    value: float
    interval: tuple[float, float]
    semantics: str = PER_SEQUENCE
    anchor_gap: float | None = None

    def to_dict(self):
        out = {"value": self.value, "interval": list(self.interval),
               "semantics": self.semantics}
        if self.anchor_gap is not None:
            out["anchor_gap"] = self.anchor_gap
        return out

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["value"]), tuple(d["interval"]), d["semantics"],
                   d.get("anchor_gap"))


def oplus(x, y, alpha, s, t):
    """Faded concatenation of a measure on ``(r, s]`` with one on ``(s, t]``."""
    return math.exp(alpha * (s - t)) * x + y


def mu_f_interval(f, interval, alpha, step=None):
    """``mu_f((l, r])`` by quadrature."""
    l, r = interval
    if l > r:
        raise ParameterError(f"interval must satisfy l <= r, got {interval!r}")
    if l == r:
        return 0.0
    return reference_leaky_average(f, r, alpha, l, step=step)


def mu_eta_interval(eta, interval, alpha=None):
    """Faded sum of the events in the closed interval, anchored at the last one.

    Returns 0 when the interval holds no event.
    """
    l, r = interval
    if l > r:
        raise ParameterError(f"interval must satisfy l <= r, got {interval!r}")
    alpha = eta.alpha if alpha is None else alpha
    inside = (eta.times >= l) & (eta.times <= r)
    if not np.any(inside):
        return 0.0
    t = eta.times[inside]
    return float(np.sum(np.exp(alpha * (t - t[-1])) * eta.values[inside]))


def _shared_alpha(a, b, alpha):
    if alpha is None:
        if a.alpha != b.alpha:
            raise ParameterError(f"sequences have different alpha ({a.alpha} vs {b.alpha})")
        return a.alpha
    for s in (a, b):
        if s.alpha != alpha:
            raise ParameterError(f"sequence alpha {s.alpha} differs from requested {alpha}")
    return alpha


def merge_events(a, b):
    """Union time grid with each sequence's value and presence mask on it."""
    u = np.union1d(a.times, b.times)
    ia = np.searchsorted(u, a.times)
    ib = np.searchsorted(u, b.times)
    va = np.zeros(u.size)
    vb = np.zeros(u.size)
    ha = np.zeros(u.size, dtype=bool)
    hb = np.zeros(u.size, dtype=bool)
    va[ia] = a.values
    vb[ib] = b.values
    ha[ia] = True
    hb[ib] = True
    return u, va, ha, vb, hb


def _empty_interval(a, b):
    t = min(a.t0, b.t0)
    return (t, t)


def event_discrepancy_bruteforce(a, b, alpha=None, anchor=PER_SEQUENCE):
    """Discrepancy of two event sequences by enumerating all intervals.

    Every interval whose endpoints are event times of either sequence is
    examined, O(N^2) in the size of the merged time set. With
    ``anchor="per-sequence-anchor"`` each measure is anchored at its own last
    event inside the interval; with ``anchor="merged-anchor"`` both are
    anchored at the interval's right end, which makes the event measure the
    exact discrete analogue of the faded signal integral over the same
    interval.
    """
    if anchor not in (PER_SEQUENCE, MERGED):
        raise ParameterError(f"unknown anchor semantics {anchor!r}")
    alpha = _shared_alpha(a, b, alpha)
    u, va, ha, vb, hb = merge_events(a, b)
    value, p, q = kernels.event_discrepancy_bruteforce(
        u, va, ha, vb, hb, alpha, anchor == MERGED)
    interval = _empty_interval(a, b) if p < 0 else (float(u[p]), float(u[q]))
    return DiscrepancyResult(float(value), interval, anchor)


def event_discrepancy_streaming(a, b, alpha=None):
    """Linear-time discrepancy of the merged difference sequence.

    Both measures are anchored at the last merged event of the interval, so
    the value equals the merged-anchor brute force for every ``alpha``. It
    equals the per-sequence brute force when ``alpha == 0`` or when both
    sequences share their time stamps; otherwise ``anchor_gap`` reports the
    largest distance between a sequence's own last event and the merged
    anchor in the maximising interval, which bounds the per-term weight
    mismatch against per-sequence anchoring by ``exp(alpha * anchor_gap)``.
    """
    alpha = _shared_alpha(a, b, alpha)
    u, va, ha, vb, hb = merge_events(a, b)
    value, p, q = kernels.event_discrepancy_streaming(u, va - vb, alpha)
    if p < 0:
        return DiscrepancyResult(float(value), _empty_interval(a, b), MERGED, 0.0)
    gap = 0.0
    for has in (ha, hb):
        own = np.flatnonzero(has[p:q + 1])
        if own.size:
            gap = max(gap, float(u[q] - u[p + own[-1]]))
    return DiscrepancyResult(float(value), (float(u[p]), float(u[q])), MERGED, gap)


def event_discrepancy_prefix(a, b):
    """Undecayed discrepancy as max minus min of prefix sums (alpha = 0 only)."""
    u, va, ha, vb, hb = merge_events(a, b)
    s = np.concatenate(([0.0], np.cumsum(va - vb)))
    return float(np.max(s) - np.min(s))


def signal_discrepancy_grid(fa, fb, alpha):
    """Grid approximation of the signal-space discrepancy ``d_F``.

    Interval endpoints are restricted to grid nodes; the faded integral of
    the difference uses the trapezoid rule with exact per-step decay. Both
    signals are faded towards the interval's right end, so the result is
    labelled with the merged-anchor semantics.
    """
    if not fa.same_layout(fb):
        raise ParameterError("grids differ in t0, step or length")
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha!r}")
    d = fa.values - fb.values
    value, il, ir = kernels.grid_discrepancy(d, fa.h, alpha)
    if il < 0:
        return DiscrepancyResult(float(value), (fa.t0, fa.t0), MERGED)
    t = fa.times
    return DiscrepancyResult(float(value), (float(t[il]), float(t[ir])), MERGED)
