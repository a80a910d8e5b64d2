import numpy as np
import pytest
from scipy.special import sici

from lifrecon import (BandlimitedSignal, ErrorTriple, ParameterError, SampledGrid,
                      SamplerConfig, SweepResult, WindowSpec, error_triple,
                      event_discrepancy_bruteforce, lif_sample, quasi_isometry_audit,
                      resample_error, sweep_truncation, tune)
from lifrecon.discrepancy import MERGED, PER_SEQUENCE
from lifrecon.estimator import QI_CONSTANT, resolved_argmin
from lifrecon.signal_core import grid_over

from conftest import corpus_signal

TH = 0.01


def sweep_of(values, r0=30):
    return SweepResult([(r0 + i, ErrorTriple(v, v, v)) for i, v in enumerate(values)],
                       {"theta": TH})


@pytest.fixture(scope="module")
def small_sweep():
    f = corpus_signal(0, n_atoms=10, window=(-8, 8))
    cfg = SamplerConfig(TH, 0.1, (-57.0, 7.0))
    spec = WindowSpec.default(1.0, 0.25, 0.1)
    return f, cfg, spec, sweep_truncation(f, cfg, spec, (24, 40))


def test_resample_identity_and_zero(corpus):
    f = corpus[0]
    cfg = SamplerConfig(TH, 0.1, (-2, 22))
    eta = lif_sample(f, cfg)
    eta_b, d = resample_error(eta, f, cfg)
    assert d == 0.0 and len(eta_b) == len(eta)
    zero = BandlimitedSignal.from_atoms(1.0, [(0.0, 0.0)])
    eta_z, d0 = resample_error(eta, zero, cfg)
    assert len(eta_z) == 0
    assert d0 == event_discrepancy_bruteforce(eta, eta_z, anchor=MERGED).value > 0
    with pytest.raises(ParameterError):
        resample_error(eta, f, SamplerConfig(2 * TH, 0.1, (-2, 22)))


def test_resample_from_grid(corpus):
    f = corpus[1]
    cfg = SamplerConfig(TH, 0.1, (0, 20))
    eta = lif_sample(f, cfg)
    _, d = resample_error(eta, grid_over(f, 0, 20, 1 / 64), cfg)
    assert d <= QI_CONSTANT * TH


def test_error_triple_identity(corpus):
    f = corpus[2]
    eta = lif_sample(f, SamplerConfig(TH, 0.1, (0, 20)))
    g = grid_over(f, 0, 20, 1 / 64)
    e = error_triple(f, g, eta, eta, 0.1)
    assert (e.d_sample, e.d_signal, e.max_norm) == (0.0, 0.0, 0.0)


def test_error_triple_constant_perturbation(corpus):
    f = corpus[2]
    eta = lif_sample(f, SamplerConfig(TH, 0.0, (0, 20)))
    g = grid_over(f, 0, 20, 1 / 64)
    vals = g.values.copy()
    i0, i1, c = 200, 520, -0.3
    vals[i0:i1 + 1] += c
    e = error_triple(f, SampledGrid(g.t0, g.h, vals), eta, eta, 0.0)
    L = (i1 - i0 + 1) * g.h
    assert e.d_signal == pytest.approx(abs(c) * L, rel=1e-12)
    assert e.max_norm == pytest.approx(abs(c), rel=1e-12)


def test_tune_examples():
    assert tune(sweep_of([5, 4, 3, 2, 1]))[0] == 34
    r, basin = tune(sweep_of([3, 1, 2]))
    assert r == 31 and basin == (31, 31)
    assert tune(sweep_of([3, 1.0, 1.05, 1.2, 1.08]))[1] == (31, 32)
    # ties go to the smallest index
    assert tune(sweep_of([2, 1, 1, 3]))[0] == 31
    with pytest.raises(ParameterError):
        tune(SweepResult([], {}))


def test_resolved_argmin():
    r = np.arange(30, 35)
    assert resolved_argmin([5, 1.005, 1.002, 1.0, 2], r, tie_tol=0.01) == 31
    assert resolved_argmin([5, 1.005, 1.002, 1.0, 2], r) == 33


def test_sweep_single_entry_and_validation(small_sweep):
    f, cfg, spec, _ = small_sweep
    one = sweep_truncation(f, cfg, spec, (30, 30))
    assert [r for r, _ in one.entries] == [30]
    with pytest.raises(ParameterError):
        sweep_truncation(f, cfg, spec, (31, 30))
    with pytest.raises(ParameterError):
        sweep_truncation(f, cfg, spec, (30, 31), window=(-100, 0))
    with pytest.raises(ParameterError):
        SweepResult([(3, ErrorTriple(0, 0, 0)), (3, ErrorTriple(0, 0, 0))])


def test_sweep_soundness_and_tail(small_sweep):
    _, _, _, sw = small_sweep
    ds, df = sw.column("d_sample"), sw.column("d_signal")
    assert np.all(np.isfinite(ds)) and np.all(ds >= 0)
    assert np.all(np.abs(ds - df) <= QI_CONSTANT * TH + 1e-4)
    assert list(sw.r) == list(range(24, 41))
    # errors plateau once the window is covered
    tail = df[-5:]
    assert (tail.max() - tail.min()) / tail.max() < 0.05 or tail.max() < 2 * TH
    assert ds[0] > 5 * ds[-1] and df[0] > 5 * df[-1]


def test_sweep_tuning_is_deterministic(small_sweep):
    f, cfg, spec, sw = small_sweep
    again = sweep_truncation(f, cfg, spec, (24, 40))
    assert again.entries == sw.entries
    assert tune(again) == tune(sw)


def test_parallel_sweep_matches_serial(small_sweep):
    f, cfg, spec, sw = small_sweep
    par = sweep_truncation(f, cfg, spec, (24, 40), jobs=2)
    assert par.entries == sw.entries


def test_audit_identity(corpus):
    f = corpus[0]
    rep = quasi_isometry_audit(f, f, SamplerConfig(TH, 0.1, (-2, 22)))
    assert rep.d_F == 0.0 and rep.d_E == 0.0
    assert rep.slack_upper == rep.slack_lower == pytest.approx(8 * TH)
    assert rep.violations == 0


@pytest.mark.parametrize("alpha", [0.0, 0.1, 1.0])
def test_audit_random_pairs(alpha):
    for seed in range(3):
        f, g = corpus_signal(2 * seed + 10), corpus_signal(2 * seed + 11)
        rep = quasi_isometry_audit(f, g, SamplerConfig(TH, alpha, (-2, 22)))
        assert rep.violations == 0
        assert rep.semantics == MERGED
        assert np.isfinite(rep.slack_upper) and np.isfinite(rep.slack_lower)
        d = rep.to_dict()
        assert d["violations"] == 0 and d["d_E_per_sequence"] >= 0


def test_audit_constructed_perturbation():
    f = corpus_signal(5)
    c, tc = 0.05, 9.3
    g = BandlimitedSignal(1.0, f.centers + (tc,), f.amps + (c,))
    lo, hi = -2.0, 22.0
    # closed form at alpha = 0: sup over intervals of |int c sinc(2(t - tc))|
    t = np.linspace(lo, hi, 200001)
    G = c * sici(2 * np.pi * (t - tc))[0] / (2 * np.pi)
    closed = G.max() - G.min()
    rep = quasi_isometry_audit(f, g, SamplerConfig(TH, 0.0, (lo, hi)))
    assert rep.d_F == pytest.approx(closed, abs=1e-5)
    assert abs(rep.d_E - closed) <= 8 * TH
    assert rep.violations == 0


def test_audit_reports_instead_of_raising(corpus):
    f, g = corpus[0], corpus[1]
    rep = quasi_isometry_audit(f, g, SamplerConfig(TH, 0.1, (-2, 22)), grid_step=0.5,
                               tol=0.0, anchor=PER_SEQUENCE)
    assert rep.violations in (0, 1, 2)
    assert rep.tol == 0.0
