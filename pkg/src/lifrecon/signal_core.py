"""Bandlimited test signals, uniform grids and reference quadrature."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import sici

from ._backend import kernels
from .exceptions import ParameterError

SINC = 0

# composite Gauss-Legendre panels per 1/Omega time unit
QUAD_PANELS_PER_UNIT = 64
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


@dataclass(frozen=True)
class BandlimitedSignal:
    """Finite sum of shifted sinc atoms, ``sum_m a_m sinc(2 omega (t - c_m))``.

    Every such sum lies in the Paley-Wiener space of bandwidth ``omega``.
    """

    omega: float
    centers: tuple[float, ...]
    amps: tuple[float, ...]
    _c: np.ndarray = field(init=False, repr=False, compare=False)
    _a: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise ParameterError(f"omega must be positive, got {self.omega!r}")
        if len(self.centers) == 0 or len(self.centers) != len(self.amps):
            raise ParameterError("atom list must be non-empty with matching centers/amps")
        c = np.asarray(self.centers, dtype=float)
        a = np.asarray(self.amps, dtype=float)
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a))):
            raise ParameterError("atom centers and amplitudes must be finite")
        object.__setattr__(self, "centers", tuple(float(x) for x in c))
        object.__setattr__(self, "amps", tuple(float(x) for x in a))
        object.__setattr__(self, "_c", c)
        object.__setattr__(self, "_a", a)

    @classmethod
    def from_atoms(cls, omega, atoms):
        atoms = list(atoms)
        return cls(omega, tuple(c for c, _ in atoms), tuple(a for _, a in atoms))

    @property
    def atoms(self):
        return list(zip(self.centers, self.amps))

    def kernel_repr(self):
        return (SINC, self._c, self._a, 2.0 * self.omega, 0.0, 0.0)

    def evaluate(self, t):
        """Evaluate at a scalar or array of times (closed form)."""
        t_arr = np.asarray(t, dtype=float)
        out = kernels.eval_atoms(SINC, self._c, self._a, 2.0 * self.omega,
                                 0.0, 0.0, t_arr.ravel())
        if t_arr.ndim == 0:
            return float(out[0])
        return out.reshape(t_arr.shape)

    __call__ = evaluate

    def antiderivative(self, t):
        """``int_0^t f(s) ds`` in closed form via the sine integral."""
        t = np.asarray(t, dtype=float)
        w = 2.0 * np.pi * self.omega
        si_t = sici(w * (t[..., None] - self._c))[0]
        si_0 = sici(w * (0.0 - self._c))[0]
        return ((si_t - si_0) @ self._a) / w

    def sup_bound(self):
        """Crude upper bound on ``||f||_inf`` (sum of absolute amplitudes)."""
        return float(np.sum(np.abs(self._a)))

    def to_dict(self):
        return {"omega": self.omega,
                "atoms": [{"c": c, "a": a} for c, a in self.atoms]}

    @classmethod
    def from_dict(cls, d):
        try:
            omega = d["omega"]
            atoms = [(float(x["c"]), float(x["a"])) for x in d["atoms"]]
        except (KeyError, TypeError) as exc:
            raise ParameterError(f"malformed signal document: missing {exc}") from exc
        return cls.from_atoms(float(omega), atoms)


def generate_random_bandlimited(omega, n_atoms, amp_range, time_window, seed):
    """Draw a random sinc-sum signal with ``n_atoms`` atoms.

    Centers are uniform on ``time_window`` and amplitudes uniform on
    ``amp_range``; a range with equal endpoints pins the value.
    """
    if not omega > 0:
        raise ParameterError(f"omega must be positive, got {omega!r}")
    if int(n_atoms) != n_atoms or n_atoms < 1:
        raise ParameterError(f"n_atoms must be a positive integer, got {n_atoms!r}")
    for name, (lo, hi) in (("amp_range", amp_range), ("time_window", time_window)):
        if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
            raise ParameterError(f"{name} must satisfy lo <= hi, got {(lo, hi)!r}")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(time_window[0], time_window[1], int(n_atoms))
    amps = rng.uniform(amp_range[0], amp_range[1], int(n_atoms))
    return BandlimitedSignal(float(omega), tuple(centers), tuple(amps))


def evaluate(f, t):
    return f.evaluate(t)


@dataclass
class SampledGrid:
    """Values of a signal on the uniform grid ``t0 + i*h``."""

    t0: float
    h: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not self.h > 0:
            raise ParameterError(f"grid step must be positive, got {self.h!r}")
        if self.values.ndim != 1 or self.values.size < 2:
            raise ParameterError("grid needs at least two values")

    @property
    def times(self):
        return self.t0 + self.h * np.arange(self.values.size)

    def __len__(self):
        return self.values.size

    def same_layout(self, other):
        return (self.t0 == other.t0 and self.h == other.h
                and self.values.size == other.values.size)


def sample_grid(f, t0, h, n):
    """Evaluate ``f`` (array-capable callable) on ``n`` grid nodes."""
    g = SampledGrid(t0, h, np.zeros(max(n, 2)))
    g.values = np.asarray(f(g.times), dtype=float)
    return g


def grid_over(f, lo, hi, h):
    """Grid covering ``[lo, hi]`` with step at most ``h`` and both ends as nodes."""
    n = int(np.ceil((hi - lo) / h - 1e-12)) + 1
    n = max(n, 2)
    return sample_grid(f, lo, (hi - lo) / (n - 1), n)


def _quad_step(f, omega):
    if omega is None:
        omega = getattr(f, "omega", 1.0)
    return 1.0 / (QUAD_PANELS_PER_UNIT * omega)


def reference_leaky_average(f, t, alpha, t_start, step=None, omega=None):
    """Quadrature of ``int_{t_start}^t f(s) exp(alpha (s - t)) ds``.

    Composite 5-point Gauss-Legendre with panel width at most ``step``
    (default ``1/(64 omega)``). ``f`` must accept numpy arrays. ``t`` may be
    an array, in which case each entry is integrated independently from
    ``t_start``.
    """
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha!r}")
    step = _quad_step(f, omega) if step is None else step
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts <= t_start):
        raise ParameterError("reference_leaky_average needs t_start < t")
    out = np.empty(ts.size)
    for i, ti in enumerate(ts):
        n = int(np.ceil((ti - t_start) / step))
        edges = np.linspace(t_start, ti, n + 1)
        half = 0.5 * np.diff(edges)
        mids = 0.5 * (edges[1:] + edges[:-1])
        s = (mids[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        out[i] = np.dot(w, np.asarray(f(s), dtype=float) * np.exp(alpha * (s - ti)))
    if np.ndim(t) == 0:
        return float(out[0])
    return out


def leaky_average_on_grid(f, times, alpha, t_start, step=None, omega=None):
    """Leaky average at increasing ``times``, chained segment by segment.

    ``F(t_{i+1}) = exp(-alpha (t_{i+1} - t_i)) F(t_i) + int_{t_i}^{t_{i+1}} ...``
    so the cost is one pass over ``[t_start, times[-1]]`` instead of one
    quadrature per point.
    """
    times = np.asarray(times, dtype=float)
    if times.size and np.any(np.diff(times) <= 0):
        raise ParameterError("times must be strictly increasing")
    out = np.empty(times.size)
    prev, acc = t_start, 0.0
    for i, ti in enumerate(times):
        seg = reference_leaky_average(f, ti, alpha, prev, step, omega)
        acc = np.exp(-alpha * (ti - prev)) * acc + seg
        out[i] = acc
        prev = ti
    return out


def leaky_truncation_bound(sup_norm, alpha, t, t_start):
    """Bound on the part of the leaky integral lost by starting at ``t_start``."""
    if alpha <= 0:
        return float("inf")
    return sup_norm * np.exp(-alpha * (t - t_start)) / alpha


def max_norm_distance(a, b):
    """``max_i |a_i - b_i|`` for two grids of identical layout."""
    if not a.same_layout(b):
        raise ParameterError("grids differ in t0, step or length")
    return float(np.max(np.abs(a.values - b.values)))
