"""Sample-space estimation of the reconstruction error.

The events of the original signal are compared with the events obtained by
re-sampling the reconstruction. Because LIF sampling preserves discrepancy
distances up to an additive ``8 theta``, the event-space discrepancy tracks
the signal-space error without access to the original signal, and can be
used to tune the truncation index of the reconstruction.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .discrepancy import (MERGED, PER_SEQUENCE, event_discrepancy_bruteforce,
                          signal_discrepancy_grid)
from .exceptions import ParameterError
from .reconstruction import ReconstructedSignal, estimate_coefficients
from .samplers import lif_sample
from .signal_core import SampledGrid, grid_over, max_norm_distance

# additive constant of the quasi-isometry, in units of theta
QI_CONSTANT = 8.0
DEFAULT_AUDIT_TOL = 1e-4
# grid nodes per 1/omega for signal-space discrepancies
GRID_NODES_PER_UNIT = 256


def burn_in(alpha, decay_lengths=5.0):
    """Prefix length after which a wrong initial state has faded by ``exp(-5)``."""
    return decay_lengths / alpha if alpha > 0 else 0.0


@dataclass(frozen=True)
class ErrorTriple:
    d_sample: float
    d_signal: float
    max_norm: float
    d_sample_per_sequence: float | None = None


@dataclass
class SweepResult:
    entries: list  # [(r, ErrorTriple)], r increasing
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        rs = [r for r, _ in self.entries]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise ParameterError("sweep indices must be strictly increasing")

    @property
    def r(self):
        return np.array([r for r, _ in self.entries])

    def column(self, name):
        return np.array([getattr(e, name) for _, e in self.entries])


@dataclass(frozen=True)
class QuasiAuditReport:
    d_F: float
    d_E: float
    bound: float
    slack_upper: float   # d_E + bound - d_F
    slack_lower: float   # d_F + bound - d_E
    tol: float
    semantics: str = MERGED
    d_E_per_sequence: float | None = None
    n_events: tuple = (0, 0)

    @property
    def violations(self):
        return int(self.slack_upper < -self.tol) + int(self.slack_lower < -self.tol)

    def to_dict(self):
        out = asdict(self)
        out["n_events"] = list(self.n_events)
        out["violations"] = self.violations
        return out


def _as_callable(f_recon):
    if isinstance(f_recon, SampledGrid):
        spline = CubicSpline(f_recon.times, f_recon.values)
        return lambda t: float(spline(t))
    return f_recon


def resample_error(eta_a, f_recon, cfg, anchor=MERGED):
    """Re-sample a reconstruction over ``cfg.horizon`` and compare event sequences.

    Returns ``(eta_b, d_sample)``.
    """
    if cfg.theta != eta_a.theta or cfg.alpha != eta_a.alpha:
        raise ParameterError("sampler threshold/leak differ from those of eta_a")
    eta_b = lif_sample(_as_callable(f_recon), cfg)
    return eta_b, event_discrepancy_bruteforce(eta_a, eta_b, anchor=anchor).value


def error_triple(f, f_recon, eta_a, eta_b, alpha, anchor=MERGED):
    """Sample-space discrepancy, grid signal discrepancy and max-norm error.

    ``f_recon`` is a grid; ``f`` is evaluated on the same nodes. ``d_sample``
    uses the requested anchor semantics; the per-sequence value is always
    kept alongside for comparison.
    """
    f_grid = SampledGrid(f_recon.t0, f_recon.h, f(f_recon.times))
    return ErrorTriple(
        d_sample=event_discrepancy_bruteforce(eta_a, eta_b, alpha, anchor).value,
        d_signal=signal_discrepancy_grid(f_grid, f_recon, alpha).value,
        max_norm=max_norm_distance(f_grid, f_recon),
        d_sample_per_sequence=event_discrepancy_bruteforce(
            eta_a, eta_b, alpha, PER_SEQUENCE).value,
    )


def _sweep_entry(args):
    r, f, coeffs, spec, cfg, window, grid_step, eta_win, anchor = args
    recon = ReconstructedSignal(coeffs.truncate(r), spec)
    eta_b = lif_sample(recon, cfg.with_horizon(*window))
    recon_grid = grid_over(recon, window[0], window[1], grid_step)
    return r, error_triple(f, recon_grid, eta_win, eta_b, cfg.alpha, anchor)


def sweep_truncation(f, cfg, spec, r_range, window=None, grid_step=None,
                     origin=None, jobs=1, anchor=MERGED):
    """Error triples of the truncated reconstruction for every ``r`` in ``r_range``.

    ``f`` is sampled over ``cfg.horizon``; errors are measured on ``window``
    (default: the horizon minus a burn-in prefix of ``5/alpha``). The
    coefficient grid is centred on the window unless ``origin`` is given.
    Coefficients are estimated once and truncated per ``r``.
    """
    r_lo, r_hi = r_range
    if r_lo > r_hi or r_lo < 0:
        raise ParameterError(f"invalid truncation range {r_range!r}")
    if window is None:
        window = (cfg.horizon[0] + burn_in(cfg.alpha), cfg.horizon[1])
    if not cfg.horizon[0] <= window[0] < window[1] <= cfg.horizon[1]:
        raise ParameterError("evaluation window must lie inside the sampling horizon")
    if origin is None:
        origin = 0.5 * (window[0] + window[1])
    if grid_step is None:
        grid_step = 1.0 / (GRID_NODES_PER_UNIT * spec.omega)

    eta_a = lif_sample(f, cfg)
    coeffs = estimate_coefficients(eta_a, spec, (-r_hi, r_hi), origin)
    eta_win = eta_a.restrict(*window)
    tasks = [(r, f, coeffs, spec, cfg, window, grid_step, eta_win, anchor)
             for r in range(r_lo, r_hi + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_sweep_entry, tasks))
    else:
        entries = [_sweep_entry(t) for t in tasks]
    entries.sort(key=lambda e: e[0])
    config = {"theta": cfg.theta, "alpha": cfg.alpha,
              "horizon": list(cfg.horizon), "window": list(window),
              "origin": origin, "grid_step": grid_step, "spec": spec.to_dict(),
              "anchor": anchor, "n_events": len(eta_a)}
    return SweepResult(entries, config)


def resolved_argmin(values, r, tie_tol=0.0):
    """Smallest ``r`` whose value is within ``tie_tol`` of the minimum."""
    values = np.asarray(values, dtype=float)
    best = np.min(values)
    return int(r[np.flatnonzero(values <= best + tie_tol)[0]])


def tune(sweep, tie_tol=0.0, basin_factor=1.1, column="d_sample"):
    """Pick the truncation index from the sample-space error curve.

    ``r_star`` is the smallest index whose error is within ``tie_tol`` of the
    minimum (``tie_tol = 0`` gives the plain argmin, ties to the smallest r).
    The basin is the maximal run of consecutive indices around ``r_star``
    with error at most ``basin_factor`` times the minimum.
    """
    if not sweep.entries:
        raise ParameterError("empty sweep")
    r = sweep.r
    d = sweep.column(column)
    r_star = resolved_argmin(d, r, tie_tol)
    limit = basin_factor * np.min(d)
    i = j = int(np.flatnonzero(r == r_star)[0])
    while i > 0 and d[i - 1] <= limit:
        i -= 1
    while j < len(d) - 1 and d[j + 1] <= limit:
        j += 1
    return r_star, (int(r[i]), int(r[j]))


def quasi_isometry_audit(f, g, cfg, grid_step=None, tol=DEFAULT_AUDIT_TOL,
                         anchor=MERGED):
    """Check both additive-``8 theta`` inequalities between ``d_F`` and ``d_E``.

    ``d_F`` is the grid discrepancy of ``f`` and ``g`` over ``cfg.horizon``;
    ``d_E`` the brute-force discrepancy of their LIF event sequences.
    Violations beyond ``tol`` are reported, never raised.
    """
    omega = max(getattr(f, "omega", 1.0), getattr(g, "omega", 1.0))
    if grid_step is None:
        grid_step = 1.0 / (2 * GRID_NODES_PER_UNIT * omega)
    lo, hi = cfg.horizon
    ef, eg = lif_sample(f, cfg), lif_sample(g, cfg)
    fg, gg = grid_over(f, lo, hi, grid_step), grid_over(g, lo, hi, grid_step)
    d_F = signal_discrepancy_grid(fg, gg, cfg.alpha).value
    d_E = event_discrepancy_bruteforce(ef, eg, anchor=anchor).value
    other = PER_SEQUENCE if anchor == MERGED else MERGED
    d_E_other = event_discrepancy_bruteforce(ef, eg, anchor=other).value
    bound = QI_CONSTANT * cfg.theta
    return QuasiAuditReport(
        d_F=d_F, d_E=d_E, bound=bound,
        slack_upper=d_E + bound - d_F, slack_lower=d_F + bound - d_E,
        tol=tol, semantics=anchor,
        d_E_per_sequence=d_E if anchor == PER_SEQUENCE else d_E_other,
        n_events=(len(ef), len(eg)))


def estimate_within_bound(sweep, tol=DEFAULT_AUDIT_TOL):
    """Largest ``|d_sample - d_signal| - 8 theta`` over a sweep (<= tol is sound)."""
    theta = sweep.config["theta"]
    gap = np.abs(sweep.column("d_sample") - sweep.column("d_signal"))
    return float(np.max(gap) - QI_CONSTANT * theta)


def spearman(x, y):
    """Spearman rank correlation with average ranks for ties."""
    from scipy.stats import spearmanr

    rho = spearmanr(x, y)[0]
    return float(rho) if not math.isnan(rho) else 0.0
