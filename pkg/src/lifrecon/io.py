"""Readers and writers for the on-disk artifacts.

Floats are written with ``%.17g`` so that every file round-trips exactly,
and JSON is emitted with sorted keys so reruns produce identical bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .discrepancy import DiscrepancyResult
from .estimator import ErrorTriple, QuasiAuditReport, SweepResult
from .exceptions import ParameterError
from .reconstruction import CoefficientSeries, WindowSpec
from .samplers import EventSequence
from .signal_core import BandlimitedSignal, SampledGrid

FLOAT_FMT = "%.17g"


def _fmt(x):
    return FLOAT_FMT % x


def write_json(path, obj):
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read {path}: {exc}") from exc


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _read_rows(path, header):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            got = next(reader, None)
            if got != list(header):
                raise ParameterError(f"{path}: expected header {','.join(header)}, got {got}")
            return [row for row in reader if row]
    except OSError as exc:
        raise ParameterError(f"cannot read {path}: {exc}") from exc


# signals

def write_signal(path, signal):
    write_json(path, signal.to_dict())


def read_signal(path):
    d = read_json(path)
    try:
        return BandlimitedSignal.from_dict(d)
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"{path}: malformed signal file ({exc})") from exc


# events

def _sidecar(path):
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_events(path, eta, extra=None):
    """``t,v`` CSV plus a ``<name>.json`` sidecar with the sampler settings."""
    _write_rows(path, ("t", "v"),
                ((_fmt(t), _fmt(v)) for t, v in zip(eta.times, eta.values)))
    meta = {"theta": eta.theta, "alpha": eta.alpha, "t0": eta.t0,
            "horizon": [eta.t0, eta.t_end],
            "step": eta.meta.get("step"),
            "crossing_tol": eta.meta.get("crossing_tol"),
            "grazing": eta.meta.get("grazing", [])}
    if extra:
        meta.update(extra)
    write_json(_sidecar(path), meta)


def read_events(path):
    rows = _read_rows(path, ("t", "v"))
    meta = read_json(_sidecar(path))
    times = np.array([float(r[0]) for r in rows])
    values = np.array([float(r[1]) for r in rows])
    try:
        return EventSequence(times, values, float(meta["theta"]), float(meta["alpha"]),
                             float(meta["t0"]), meta["horizon"][1],
                             {k: meta[k] for k in ("step", "crossing_tol", "grazing")
                              if k in meta})
    except KeyError as exc:
        raise ParameterError(f"{path}: sidecar lacks field {exc}") from exc


# grids and coefficients

def write_grid(path, grid):
    _write_rows(path, ("t", "value"),
                ((_fmt(t), _fmt(v)) for t, v in zip(grid.times, grid.values)))
    write_json(_sidecar(path), {"t0": grid.t0, "h": grid.h, "n": len(grid)})


def read_grid(path):
    rows = _read_rows(path, ("t", "value"))
    if len(rows) < 2:
        raise ParameterError(f"{path}: a grid needs at least two nodes")
    side = _sidecar(path)
    if side.exists():
        meta = read_json(side)
        t0, h = float(meta["t0"]), float(meta["h"])
    else:
        t = np.array([float(r[0]) for r in rows])
        t0, h = float(t[0]), float((t[-1] - t[0]) / (len(t) - 1))
    return SampledGrid(t0, h, np.array([float(r[1]) for r in rows]))


def write_coefficients(path, coeffs, spec=None):
    _write_rows(path, ("n", "a_n"),
                ((str(int(n)), _fmt(a)) for n, a in zip(coeffs.n, coeffs.a)))
    meta = {"T": coeffs.T, "origin": coeffs.origin,
            "extrapolated": [int(n) for n in coeffs.n[coeffs.extrapolated]]}
    if spec is not None:
        meta["window"] = spec.to_dict()
    write_json(_sidecar(path), meta)


def read_coefficients(path):
    rows = _read_rows(path, ("n", "a_n"))
    meta = read_json(_sidecar(path))
    n = np.array([int(r[0]) for r in rows], dtype=int)
    flagged = set(meta.get("extrapolated", []))
    return CoefficientSeries(n, np.array([float(r[1]) for r in rows]),
                             float(meta["T"]), float(meta.get("origin", 0.0)),
                             np.array([k in flagged for k in n], dtype=bool))


def write_window(path, spec):
    write_json(path, spec.to_dict())


def read_window(path):
    return WindowSpec.from_dict(read_json(path))


# estimator outputs

SWEEP_HEADER = ("r", "d_sample", "d_signal", "max_norm")


def write_sweep(path, sweep):
    """Sweep CSV in the ``r,d_sample,d_signal,max_norm`` layout, config in a sidecar."""
    _write_rows(path, SWEEP_HEADER,
                ((str(r), _fmt(e.d_sample), _fmt(e.d_signal), _fmt(e.max_norm))
                 for r, e in sweep.entries))
    extra = {str(r): e.d_sample_per_sequence for r, e in sweep.entries
             if e.d_sample_per_sequence is not None}
    write_json(_sidecar(path), {"config": sweep.config,
                                "d_sample_per_sequence": extra})


def read_sweep(path):
    rows = _read_rows(path, SWEEP_HEADER)
    side = _sidecar(path)
    meta = read_json(side) if side.exists() else {}
    per_seq = meta.get("d_sample_per_sequence", {})
    entries = [(int(r[0]), ErrorTriple(float(r[1]), float(r[2]), float(r[3]),
                                       per_seq.get(r[0])))
               for r in rows]
    return SweepResult(entries, meta.get("config", {}))


def write_audit(path, reports, extra=None):
    obj = {"reports": [r.to_dict() for r in reports],
           "violations": sum(r.violations for r in reports)}
    if extra:
        obj.update(extra)
    write_json(path, obj)


def read_audit(path):
    obj = read_json(path)
    out = []
    for d in obj["reports"]:
        d = dict(d)
        d.pop("violations", None)
        d["n_events"] = tuple(d["n_events"])
        out.append(QuasiAuditReport(**d))
    return out


def write_discrepancy(path, result):
    write_json(path, result.to_dict())


def read_discrepancy(path):
    return DiscrepancyResult.from_dict(read_json(path))
