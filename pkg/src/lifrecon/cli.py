"""Command-line entry point: ``lifrecon {generate,sample,reconstruct,sweep,audit}``.

Settings come from built-in defaults, then an optional JSON config file
(``--config``), then command-line flags; later sources win. Exit codes are
0 on success (reported audit violations included), 2 for configuration or
I/O errors and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .estimator import (DEFAULT_AUDIT_TOL, burn_in, quasi_isometry_audit,
                        sweep_truncation, tune)
from .exceptions import MissedCrossingError, ParameterError, SignalEvaluationError
from .reconstruction import WindowSpec, estimate_coefficients, reconstruct
from .samplers import SamplerConfig, lif_sample, refinement_deviation
from .signal_core import generate_random_bandlimited

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
# allowed event-time shift under step halving, in units of crossing_tol
REFINEMENT_FACTOR = 10.0

DEFAULTS = {
    "seed": 0,
    "signal": {"n_atoms": 16, "amp_range": [-1.0, 1.0], "time_window": [-14.0, 14.0]},
    "sampler": {"theta": 0.01, "alpha": 0.1, "step": None, "crossing_tol": 1e-10,
                "horizon": None},
    "window": {"T": 0.25, "omega_stop": None},
    "sweep": {"r_min": 30, "r_max": 54, "eval_window": [-10.5, 10.5],
              "grid_step": None},
    "audit": {"pairs": 20, "alphas": [0.0, 0.1, 1.0], "tol": DEFAULT_AUDIT_TOL,
              "grid_step": None, "margin": 2.0, "identical": False},
    "output_dir": "out",
}

REQUIRED = ("signal.omega",)


class ConfigError(Exception):
    pass


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _get(d, dotted):
    for part in dotted.split("."):
        if not isinstance(d, dict) or part not in d or d[part] is None:
            raise ConfigError(f"missing required config field '{dotted}'")
        d = d[part]
    return d


@dataclass
class RunConfig:
    """Resolved run settings; every value is re-validated by the owning module."""

    raw: dict

    @classmethod
    def load(cls, path=None, overrides=None):
        doc = DEFAULTS
        if path is not None:
            try:
                user = json.loads(Path(path).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
            if not isinstance(user, dict):
                raise ConfigError("config must be a JSON object")
            doc = _merge(doc, user)
        doc = _merge(doc, overrides or {})
        for key in REQUIRED:
            _get(doc, key)
        return cls(doc)

    def __getitem__(self, dotted):
        return _get(self.raw, dotted)

    def get(self, dotted, default=None):
        try:
            return _get(self.raw, dotted)
        except ConfigError:
            return default

    @property
    def omega(self):
        return float(self["signal.omega"])

    @property
    def out(self):
        p = Path(self["output_dir"])
        p.mkdir(parents=True, exist_ok=True)
        return p

    def signal(self, seed=None):
        s = self.raw["signal"]
        return generate_random_bandlimited(
            self.omega, int(s["n_atoms"]), tuple(s["amp_range"]),
            tuple(s["time_window"]), self["seed"] if seed is None else seed)

    def eval_window(self):
        lo, hi = self["sweep.eval_window"]
        return float(lo), float(hi)

    def sampler(self, alpha=None, horizon=None):
        s = self.raw["sampler"]
        alpha = float(s["alpha"] if alpha is None else alpha)
        if horizon is None:
            horizon = s.get("horizon")
        if horizon is None:
            lo, hi = self.eval_window()
            horizon = (lo - burn_in(alpha), hi)
        return SamplerConfig(float(s["theta"]), alpha, tuple(horizon), s.get("step"),
                             float(s["crossing_tol"]))

    def window_spec(self):
        w = self.raw["window"]
        alpha = float(self["sampler.alpha"])
        if w.get("omega_stop") is None:
            return WindowSpec.default(self.omega, float(w["T"]), alpha)
        return WindowSpec(self.omega, float(w["omega_stop"]), float(w["T"]), alpha)


def _load_signal(cfg, args):
    if getattr(args, "signal", None):
        return io.read_signal(args.signal)
    return cfg.signal()


def _time_map(origin, T):
    # coefficient index n sits at time origin + n T
    return {"origin": origin, "T": T, "t_of_n": "origin + n*T"}


def cmd_generate(cfg, args):
    sig = cfg.signal()
    path = Path(args.output) if args.output else cfg.out / "signal.json"
    io.write_signal(path, sig)
    print(f"wrote {path} ({len(sig.atoms)} atoms)")


def cmd_sample(cfg, args):
    sig = _load_signal(cfg, args)
    scfg = cfg.sampler()
    eta = lif_sample(sig, scfg)
    extra = None
    if args.verify:
        dev = refinement_deviation(sig, scfg, eta)
        if dev > REFINEMENT_FACTOR * scfg.crossing_tol:
            raise MissedCrossingError(
                f"event times moved by {dev:.3g} when the step was halved")
        extra = {"refinement_deviation": dev}
    path = Path(args.output) if args.output else cfg.out / "events.csv"
    io.write_events(path, eta, extra)
    print(f"wrote {path} ({len(eta)} events)")


def cmd_reconstruct(cfg, args):
    spec = cfg.window_spec()
    if args.events:
        eta = io.read_events(args.events)
    else:
        eta = lif_sample(_load_signal(cfg, args), cfg.sampler())
    if eta.alpha != spec.alpha:
        spec = WindowSpec(spec.omega, spec.omega_stop, spec.T, eta.alpha)
    lo, hi = cfg.eval_window()
    origin = 0.5 * (lo + hi)
    r = int(cfg["sweep.r_max"]) if args.r is None else args.r
    coeffs = estimate_coefficients(eta, spec, (-r, r), origin)
    step = cfg.get("sweep.grid_step") or 1.0 / (256 * spec.omega)
    n = int(np.ceil((hi - lo) / step - 1e-12)) + 1
    grid = reconstruct(coeffs, spec, lo, (hi - lo) / (n - 1), n)
    out = cfg.out
    io.write_coefficients(out / "coefficients.csv", coeffs, spec)
    io.write_window(out / "window.json", spec)
    io.write_grid(out / "reconstruction.csv", grid)
    io.write_json(out / "time_map.json", _time_map(origin, spec.T))
    print(f"wrote {out}/coefficients.csv, reconstruction.csv (r={r}, "
          f"{int(np.sum(coeffs.extrapolated))} extrapolated)")


def cmd_sweep(cfg, args):
    sig = _load_signal(cfg, args)
    scfg = cfg.sampler()
    spec = cfg.window_spec()
    window = cfg.eval_window()
    rng = (int(cfg["sweep.r_min"]), int(cfg["sweep.r_max"]))
    sweep = sweep_truncation(sig, scfg, spec, rng, window=window,
                             grid_step=cfg.get("sweep.grid_step"), jobs=args.jobs)
    sweep.config["time_map"] = _time_map(sweep.config["origin"], spec.T)
    out = cfg.out
    io.write_sweep(out / "sweep.csv", sweep)
    r_star, basin = tune(sweep, tie_tol=scfg.theta)
    r_sig, basin_sig = tune(sweep, tie_tol=scfg.theta, column="d_signal")
    io.write_json(out / "tune.json", {
        "r_star": r_star, "basin": list(basin), "tie_tol": scfg.theta,
        "r_star_signal": r_sig, "basin_signal": list(basin_sig)})
    print(f"wrote {out}/sweep.csv ({len(sweep.entries)} rows); "
          f"r_star={r_star} basin={basin[0]}..{basin[1]} r_star_signal={r_sig}")


def cmd_audit(cfg, args):
    a = cfg.raw["audit"]
    s = cfg.raw["signal"]
    lo, hi = s["time_window"]
    horizon = (lo - a["margin"], hi + a["margin"])
    alphas = [float(x) for x in a["alphas"]]
    seeds = np.random.SeedSequence(int(cfg["seed"])).generate_state(2 * int(a["pairs"]))
    reports, pairs = [], []
    for i in range(int(a["pairs"])):
        f = cfg.signal(int(seeds[2 * i]))
        g = f if a["identical"] else cfg.signal(int(seeds[2 * i + 1]))
        alpha = alphas[i % len(alphas)]
        rep = quasi_isometry_audit(f, g, cfg.sampler(alpha, horizon),
                                   grid_step=a["grid_step"], tol=float(a["tol"]))
        reports.append(rep)
        pairs.append({"pair": i, "alpha": alpha, "seed_f": int(seeds[2 * i]),
                      "seed_g": int(seeds[2 * i + (0 if a["identical"] else 1)])})
    path = cfg.out / "audit.json"
    k = sum(r.violations for r in reports)
    io.write_audit(path, reports, {"pairs": pairs, "horizon": list(horizon),
                                   "tol": float(a["tol"])})
    print(f"wrote {path}")
    print(f"violations={k}")


COMMANDS = {"generate": cmd_generate, "sample": cmd_sample,
            "reconstruct": cmd_reconstruct, "sweep": cmd_sweep, "audit": cmd_audit}


def build_parser():
    p = argparse.ArgumentParser(prog="lifrecon", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config document")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--omega", type=float)
        sp.add_argument("--n-atoms", type=int)
        sp.add_argument("--theta", type=float)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--step", type=float, help="integration step of the sampler")
        sp.add_argument("--T", type=float, dest="T")
        sp.add_argument("--out", help="output directory")
        if name in ("sample", "reconstruct", "sweep"):
            sp.add_argument("--signal", help="signal JSON (default: generate from config)")
        if name in ("generate", "sample"):
            sp.add_argument("--output", help="output file")
        if name == "sample":
            sp.add_argument("--verify", action="store_true",
                            help="re-run with half the step and fail (exit 3) on drift")
        if name == "reconstruct":
            sp.add_argument("--events", help="event CSV (default: sample the signal)")
            sp.add_argument("--r", type=int, help="truncation index (default: sweep.r_max)")
        if name == "sweep":
            sp.add_argument("--r-min", type=int)
            sp.add_argument("--r-max", type=int)
            sp.add_argument("--jobs", type=int, default=1)
        if name == "audit":
            sp.add_argument("--pairs", type=int)
            sp.add_argument("--tol", type=float)
            sp.add_argument("--grid-step", type=float)
            sp.add_argument("--identical", action="store_true", default=None,
                            help="audit f against itself")
    return p


def _overrides(args):
    flags = {"seed": ("seed",), "omega": ("signal", "omega"),
             "n_atoms": ("signal", "n_atoms"), "theta": ("sampler", "theta"),
             "alpha": ("sampler", "alpha"), "T": ("window", "T"),
             "step": ("sampler", "step"),
             "out": ("output_dir",), "r_min": ("sweep", "r_min"),
             "r_max": ("sweep", "r_max"), "pairs": ("audit", "pairs"),
             "tol": ("audit", "tol"), "grid_step": ("audit", "grid_step"),
             "identical": ("audit", "identical")}
    out = {}
    for attr, keys in flags.items():
        val = getattr(args, attr, None)
        if val is None:
            continue
        d = out
        for k in keys[:-1]:
            d = d.setdefault(k, {})
        d[keys[-1]] = val
    return out


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config, _overrides(args))
        COMMANDS[args.command](cfg, args)
    except (ConfigError, ParameterError, OSError, KeyError, TypeError) as exc:
        print(f"lifrecon: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MissedCrossingError, SignalEvaluationError) as exc:
        print(f"lifrecon: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
