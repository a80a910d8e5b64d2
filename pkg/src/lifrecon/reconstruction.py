"""Approximate reconstruction of a bandlimited signal from its LIF events.

The leaky average ``F(t) = int_{-inf}^t f(s) exp(alpha (s - t)) ds`` is
bandlimited like ``f`` and satisfies ``f = F' + alpha F``. Oversampled
interpolation of ``F`` with a window ``psi`` whose spectrum is flat on the
band therefore gives ``f(t) = T sum_n F(nT) phi(t - nT)`` with
``phi = psi' + alpha psi``. The samples ``F(nT)`` are replaced by values
``a_n`` computed from the events alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels, python_kernels
from .exceptions import ParameterError
from .signal_core import SampledGrid

PHI = 1


@dataclass(frozen=True)
class WindowSpec:
    """Trapezoid-spectrum window: flat on ``[-omega, omega]``, zero beyond ``omega_stop``."""

    omega: float
    omega_stop: float
    T: float
    alpha: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ParameterError(f"omega must be positive, got {self.omega!r}")
        if not 0 < self.T < 1.0 / (2.0 * self.omega):
            raise ParameterError(
                f"T must lie in (0, 1/(2 omega)) = (0, {1 / (2 * self.omega)}), got {self.T!r}")
        if not self.omega < self.omega_stop <= 1.0 / self.T - self.omega * (1 - 1e-12):
            raise ParameterError(
                f"omega_stop must lie in (omega, 1/T - omega], got {self.omega_stop!r}")
        if not self.alpha >= 0:
            raise ParameterError(f"alpha must be >= 0, got {self.alpha!r}")

    @classmethod
    def default(cls, omega, T, alpha):
        return cls(omega, min(1.0 / T - omega, 2.0 * omega), T, alpha)

    @property
    def sum_width(self):
        return self.omega_stop + self.omega

    @property
    def diff_width(self):
        return self.omega_stop - self.omega

    def to_dict(self):
        return {"omega": self.omega, "omega_stop": self.omega_stop,
                "T": self.T, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["omega"]), float(d["omega_stop"]), float(d["T"]),
                   float(d["alpha"]))


def psi(t, spec):
    """Window in time: ``A sinc(A t) sinc(B t)``, ``A = omega_stop + omega``, ``B = omega_stop - omega``."""
    return python_kernels.psi_values(t, spec.sum_width, spec.diff_width)


def psi_prime(t, spec):
    A, B = spec.sum_width, spec.diff_width
    t = np.asarray(t, dtype=float)
    return (A * A * python_kernels.dsinc_values(A * t) * np.sinc(B * t)
            + A * B * np.sinc(A * t) * python_kernels.dsinc_values(B * t))


def phi(t, spec):
    """Synthesis kernel ``psi'(t) + alpha psi(t)``."""
    return python_kernels.phi_values(t, spec.sum_width, spec.diff_width, spec.alpha)


def psi_hat(w, spec):
    """Trapezoid spectrum of :func:`psi`."""
    w = np.abs(np.asarray(w, dtype=float))
    return np.clip((spec.omega_stop - w) / spec.diff_width, 0.0, 1.0)


def phi_hat(w, spec):
    return (2j * np.pi * np.asarray(w) + spec.alpha) * psi_hat(w, spec)


@dataclass
class CoefficientSeries:
    """Estimates ``a_n`` of the leaky average at ``origin + n T``."""

    n: np.ndarray
    a: np.ndarray
    T: float
    origin: float = 0.0
    extrapolated: np.ndarray = field(default=None)

    def __post_init__(self):
        self.n = np.asarray(self.n, dtype=int)
        self.a = np.asarray(self.a, dtype=float)
        if self.extrapolated is None:
            self.extrapolated = np.zeros(self.n.size, dtype=bool)
        if self.n.size and np.any(np.diff(self.n) != 1):
            raise ParameterError("coefficient indices must be consecutive")
        if not np.all(np.isfinite(self.a)):
            raise ParameterError("coefficients must be finite")

    @property
    def r(self):
        if self.n.size == 0 or self.n[0] != -self.n[-1]:
            raise ParameterError("coefficient index range is not symmetric")
        return int(self.n[-1])

    @property
    def times(self):
        return self.origin + self.n * self.T

    def truncate(self, r):
        """Sub-series with ``|n| <= r``."""
        if self.n.size == 0 or self.n[0] > -r or self.n[-1] < r:
            raise ParameterError(f"series does not cover n in [-{r}, {r}]")
        keep = np.abs(self.n) <= r
        return CoefficientSeries(self.n[keep], self.a[keep], self.T, self.origin,
                                 self.extrapolated[keep])


def estimate_coefficients(eta, spec, n_range, origin=0.0):
    """Estimate the leaky average at ``origin + n T`` for ``n`` in ``n_range``.

    The faded event sum ``z_{k+1} = exp(-alpha (t_{k+1} - t_k)) z_k + v_{k+1}``
    (``z = 0`` at the sampling start) is decayed from the last event to the
    grid point. Under ``|F(t)| <= theta`` for times before sampling begins,
    each estimate is within ``2 theta`` of the true value. Grid points before
    the sampling start or after its end are flagged as extrapolated.
    """
    if eta.alpha != spec.alpha:
        raise ParameterError(f"event alpha {eta.alpha} differs from window alpha {spec.alpha}")
    n_lo, n_hi = n_range
    if n_lo > n_hi:
        raise ParameterError(f"empty index range {n_range!r}")
    alpha = spec.alpha
    t = eta.times
    z = np.empty(t.size)
    acc = 0.0
    for k in range(t.size):
        if k:
            acc *= math.exp(-alpha * (t[k] - t[k - 1]))
        acc += eta.values[k]
        z[k] = acc
    n = np.arange(n_lo, n_hi + 1)
    tn = origin + n * spec.T
    k = np.searchsorted(t, tn, side="right") - 1
    a = np.zeros(n.size)
    has = k >= 0
    a[has] = np.exp(-alpha * (tn[has] - t[k[has]])) * z[k[has]]
    before = tn < eta.t0
    a[before] = 0.0
    extrapolated = before.copy()
    if eta.t_end is not None:
        extrapolated |= tn > eta.t_end
    return CoefficientSeries(n, a, spec.T, origin, extrapolated)


class ReconstructedSignal:
    """Truncated synthesis ``T sum_n a_n phi(t - origin - n T)``."""

    def __init__(self, coeffs, spec):
        if not math.isclose(coeffs.T, spec.T, rel_tol=1e-12):
            raise ParameterError("coefficient grid period differs from window T")
        self.coeffs = coeffs
        self.spec = spec
        self.omega = spec.omega
        self._centers = np.ascontiguousarray(coeffs.times, dtype=float)
        self._weights = np.ascontiguousarray(spec.T * coeffs.a, dtype=float)

    def kernel_repr(self):
        return (PHI, self._centers, self._weights, self.spec.sum_width,
                self.spec.diff_width, self.spec.alpha)

    def evaluate(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = kernels.eval_atoms(PHI, self._centers, self._weights,
                                 self.spec.sum_width, self.spec.diff_width,
                                 self.spec.alpha, t_arr.ravel())
        if t_arr.ndim == 0:
            return float(out[0])
        return out.reshape(t_arr.shape)

    __call__ = evaluate


def reconstruct(coeffs, spec, t0, h, n_points):
    """Evaluate the truncated synthesis on the grid ``t0 + i h``."""
    sig = ReconstructedSignal(coeffs, spec)
    times = t0 + h * np.arange(n_points)
    return SampledGrid(t0, h, sig.evaluate(times))


def phi_sup(spec, n=20001):
    """Numerical ``max |phi|`` over a dense grid around the origin."""
    span = 20.0 / spec.diff_width
    return float(np.max(np.abs(phi(np.linspace(-span, span, n), spec))))


def tail_bound(coeffs, r, spec):
    """``T * sum_{|n| > r} |a_n| * max|phi|``: what dropping the tail can change."""
    tail = np.abs(coeffs.n) > r
    return float(spec.T * np.sum(np.abs(coeffs.a[tail])) * phi_sup(spec))
