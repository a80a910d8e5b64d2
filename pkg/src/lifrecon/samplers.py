"""Leaky integrate-and-fire (LIF) and send-on-delta (SOD) samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._backend import kernels, python_kernels
from .exceptions import MissedCrossingError, ParameterError, SignalEvaluationError

DEFAULT_CROSSING_TOL = 1e-10
# |d|y|/dt| below this at a crossing marks the event as a grazing contact
GRAZING_SLOPE = 1e-6
_SOD_RTOL = 1e-12


def default_step(omega, alpha):
    return min(1.0 / (32.0 * omega), 0.1 / max(alpha, 1.0))


@dataclass(frozen=True)
class SamplerConfig:
    theta: float
    alpha: float
    horizon: tuple[float, float]
    step: float | None = None
    crossing_tol: float = DEFAULT_CROSSING_TOL

    def __post_init__(self):
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise ParameterError(f"theta must be positive, got {self.theta!r}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ParameterError(f"alpha must be >= 0, got {self.alpha!r}")
        if not self.crossing_tol > 0:
            raise ParameterError("crossing_tol must be positive")
        if self.step is not None and not self.step > 0:
            raise ParameterError("step must be positive")
        lo, hi = self.horizon
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
            raise ParameterError(f"horizon must have positive length, got {self.horizon!r}")
        object.__setattr__(self, "horizon", (float(lo), float(hi)))

    def resolved_step(self, omega=None):
        if self.step is not None:
            return self.step
        return default_step(1.0 if omega is None else omega, self.alpha)

    def with_horizon(self, lo, hi):
        return replace(self, horizon=(lo, hi))

    def to_dict(self):
        return {"theta": self.theta, "alpha": self.alpha,
                "horizon": list(self.horizon), "step": self.step,
                "crossing_tol": self.crossing_tol}


@dataclass
class EventSequence:
    """Signed threshold events ``(t_k, v_k)`` with ``|v_k| = theta``.

    The initial instant ``t0`` (where ``v_0 = 0``) is kept as a field, not
    as an entry of ``times``.
    """

    times: np.ndarray
    values: np.ndarray
    theta: float
    alpha: float
    t0: float
    t_end: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float).reshape(-1)
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.times.shape != self.values.shape:
            raise ParameterError("times and values must have equal length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ParameterError("event times must be strictly increasing")
        if not np.allclose(np.abs(self.values), self.theta, rtol=1e-12, atol=0):
            raise ParameterError("every event value must be +theta or -theta")

    def __len__(self):
        return self.times.size

    @property
    def signs(self):
        return np.sign(self.values)

    def restrict(self, lo, hi):
        """Events with ``lo <= t <= hi``, re-based to start at ``lo``."""
        keep = (self.times >= lo) & (self.times <= hi)
        return EventSequence(self.times[keep], self.values[keep], self.theta,
                             self.alpha, lo, hi, dict(self.meta))

    def metadata(self):
        out = {"theta": self.theta, "alpha": self.alpha, "t0": self.t0,
               "horizon": [self.t0, self.t_end]}
        for key in ("step", "crossing_tol", "grazing", "backend"):
            if key in self.meta:
                out[key] = self.meta[key]
        return out


def _omega_of(f):
    return getattr(f, "omega", None)


def lif_sample(f, cfg):
    """Leaky integrate-and-fire sampling of ``f`` over ``cfg.horizon``.

    The internal state follows ``y' = f(t) - alpha y`` from ``y = 0`` at the
    horizon start and after each event. An event fires at the first instant
    with ``|y| >= theta``; its value is ``sign(y) * theta``.

    ``f`` is either an object with ``kernel_repr()`` (sinc-sum signals and
    reconstructions; these run in the compiled kernel when available) or a
    scalar callable.
    """
    lo, hi = cfg.horizon
    step = cfg.resolved_step(_omega_of(f))
    repr_fn = getattr(f, "kernel_repr", None)
    try:
        if repr_fn is not None:
            kind, centers, weights, p0, p1, p2 = repr_fn()
            times, signs, grazing, max_state = kernels.lif_sample_atoms(
                kind, centers, weights, p0, p1, p2, lo, hi, cfg.theta,
                cfg.alpha, step, cfg.crossing_tol, GRAZING_SLOPE)
        else:
            times, signs, grazing, max_state = python_kernels.lif_sample_callable(
                lambda t: float(f(t)), lo, hi, cfg.theta, cfg.alpha, step,
                cfg.crossing_tol, GRAZING_SLOPE)
    except FloatingPointError as exc:
        raise SignalEvaluationError(str(exc)) from exc
    meta = {"step": step, "crossing_tol": cfg.crossing_tol,
            "grazing": [int(i) for i in np.flatnonzero(grazing)],
            "max_interevent_state": float(max_state)}
    return EventSequence(times, signs * cfg.theta, cfg.theta, cfg.alpha, lo, hi, meta)


def sod_sample(g, theta, horizon, step, crossing_tol=DEFAULT_CROSSING_TOL):
    """Send-on-delta sampling: events where ``|g(t) - g(t_k)|`` first reaches theta.

    ``g`` is a scalar callable. The difference is scanned at ``step`` and
    bracketed crossings are refined by bisection, with a final linear
    interpolation inside the bracket so that event times do not drift by
    ``crossing_tol`` per event. A difference within round-off
    (relative ``1e-12``) of theta counts as reaching it.
    """
    cfg = SamplerConfig(theta, 0.0, horizon, step, crossing_tol)
    lo, hi = cfg.horizon
    level = theta * (1.0 - _SOD_RTOL)
    times, signs = [], []
    t = lo
    ref = float(g(t))
    if not math.isfinite(ref):
        raise SignalEvaluationError(f"non-finite signal value at t={t!r}")
    while t < hi:
        h = min(step, hi - t)
        d = float(g(t + h)) - ref
        if not math.isfinite(d):
            raise SignalEvaluationError(f"non-finite signal value near t={t!r}")
        if abs(d) >= level:
            a, b, da, db = 0.0, h, 0.0, d
            while b - a > crossing_tol:
                mid = 0.5 * (a + b)
                dm = float(g(t + mid)) - ref
                if abs(dm) >= level:
                    b, db = mid, dm
                else:
                    a, da = mid, dm
            span = abs(db) - abs(da)
            frac = (theta - abs(da)) / span if span > 0 else 1.0
            tc = t + a + (b - a) * min(max(frac, 0.0), 1.0)
            if times and tc <= times[-1]:
                tc = t + b
            t = tc
            times.append(t)
            signs.append(1.0 if db > 0 else -1.0)
            ref = float(g(t))
        else:
            t = t + h
    meta = {"step": step, "crossing_tol": crossing_tol, "grazing": []}
    return EventSequence(np.array(times), np.array(signs) * theta, theta, 0.0,
                         lo, hi, meta)


def refinement_deviation(f, cfg, eta=None):
    """Largest event-time shift when the integration step is halved.

    Raises :class:`MissedCrossingError` if halving the step changes the
    number of events, which means a crossing was skipped inside a step.
    """
    if eta is None:
        eta = lif_sample(f, cfg)
    step = cfg.resolved_step(_omega_of(f))
    fine = lif_sample(f, replace(cfg, step=0.5 * step))
    if len(fine) != len(eta):
        raise MissedCrossingError(
            f"event count changed from {len(eta)} to {len(fine)} on step refinement")
    if len(eta) == 0:
        return 0.0
    if np.any(fine.values != eta.values):
        raise MissedCrossingError("event polarity changed on step refinement")
    return float(np.max(np.abs(fine.times - eta.times)))
