import math

import numpy as np
import pytest
from scipy.special import sici

from lifrecon import (CoefficientSeries, EventSequence, ParameterError, ReconstructedSignal,
                      SamplerConfig, WindowSpec, estimate_coefficients, lif_sample,
                      max_norm_distance, phi, psi, reconstruct, signal_discrepancy_grid)
from lifrecon.reconstruction import phi_hat, psi_hat, psi_prime, tail_bound
from lifrecon.signal_core import grid_over, leaky_average_on_grid

from conftest import corpus_signal

TH = 0.01
SPEC = WindowSpec.default(1.0, 0.25, 0.1)


def leaky_average_exact(f, times, alpha, deep=400.0):
    """F(t) = int_{-inf}^t f(s) exp(alpha (s - t)) ds.

    Closed form through the sine integral for alpha = 0; otherwise
    quadrature from ``deep / alpha`` before the first time.
    """
    times = np.asarray(times, dtype=float)
    if alpha == 0:
        w = 2 * np.pi * f.omega
        si = sici(w * (times[:, None] - np.asarray(f.centers)))[0]
        return ((si + np.pi / 2) @ np.asarray(f.amps)) / w
    return leaky_average_on_grid(f, times, alpha, times[0] - min(deep, 40.0 / alpha))


def test_window_spec_validation():
    assert SPEC.omega_stop == 2.0
    assert WindowSpec.default(1.0, 0.4, 0.0).omega_stop == pytest.approx(1.5)
    for args in ((1.0, 2.0, 0.5, 0.1), (1.0, 0.9, 0.25, 0.1), (1.0, 3.5, 0.25, 0.1),
                 (1.0, 2.0, 0.25, -1.0), (0.0, 2.0, 0.25, 0.1)):
        with pytest.raises(ParameterError):
            WindowSpec(*args)
    assert WindowSpec.from_dict(SPEC.to_dict()) == SPEC


def test_psi_examples():
    A = SPEC.omega_stop + SPEC.omega
    assert float(psi(0.0, SPEC)) == pytest.approx(A)
    k = np.array([1, 2, -3, 7])
    np.testing.assert_allclose(psi(k / A, SPEC), 0.0, atol=1e-14)


def _ft(fn, freqs, L=1000.0, h=1 / 16):
    t = np.arange(-L, L + h / 2, h)
    vals = fn(t)
    return np.array([h * np.sum(vals * np.exp(-2j * np.pi * w * t)) for w in freqs])


def test_psi_spectrum_is_trapezoid():
    freqs = np.linspace(-3, 3, 61)
    got = _ft(lambda t: psi(t, SPEC), freqs)
    assert np.max(np.abs(got - psi_hat(freqs, SPEC))) < 1e-3


def test_phi_hat_identity():
    freqs = np.linspace(-3, 3, 61)
    got = _ft(lambda t: phi(t, SPEC), freqs)
    assert np.max(np.abs(got - phi_hat(freqs, SPEC))) < 2e-3


def test_phi_at_origin():
    spec0 = WindowSpec.default(1.0, 0.25, 0.0)
    assert abs(float(phi(0.0, spec0))) < 1e-15
    assert float(phi(0.0, SPEC)) == pytest.approx(0.1 * 3.0, abs=1e-14)


def test_phi_central_difference():
    h = 1e-5
    t = np.concatenate((np.linspace(-6, 6, 401), [1e-7, -3e-4, 2e-3]))
    fd = (psi(t + h, SPEC) - psi(t - h, SPEC)) / (2 * h) + 0.1 * psi(t, SPEC)
    assert np.max(np.abs(phi(t, SPEC) - fd)) <= 1e-6
    np.testing.assert_allclose(phi(t, SPEC), psi_prime(t, SPEC) + 0.1 * psi(t, SPEC),
                               atol=1e-13)


def test_coefficients_without_events():
    eta = EventSequence([], [], TH, 0.1, 0.0, 10.0)
    c = estimate_coefficients(eta, SPEC, (1, 30))
    assert np.all(c.a == 0.0)


def test_coefficients_single_event():
    eta = EventSequence([1.1], [TH], TH, 0.1, 0.0, 10.0)
    c = estimate_coefficients(eta, SPEC, (0, 30))
    tn = c.times
    expect = np.where(tn >= 1.1, TH * np.exp(-0.1 * (tn - 1.1)), 0.0)
    np.testing.assert_allclose(c.a, expect, rtol=1e-15, atol=0)


def test_coefficients_flag_extrapolation():
    eta = EventSequence([1.1], [TH], TH, 0.1, 0.0, 5.0)
    c = estimate_coefficients(eta, SPEC, (-4, 30))
    assert np.all(c.extrapolated[c.times < 0])
    assert np.all(c.a[c.times < 0] == 0.0)
    assert np.all(c.extrapolated[c.times > 5.0])
    assert not np.any(c.extrapolated[(c.times >= 0) & (c.times <= 5.0)])


def test_alpha_mismatch_rejected():
    eta = EventSequence([1.0], [TH], TH, 1.0, 0.0)
    with pytest.raises(ParameterError):
        estimate_coefficients(eta, SPEC, (0, 3))


@pytest.mark.parametrize("alpha", [0.0, 0.1, 1.0])
def test_coefficient_bound(alpha):
    spec = WindowSpec.default(1.0, 0.25, alpha)
    t0 = -60.0
    for seed in range(3):
        f = corpus_signal(seed)
        eta = lif_sample(f, SamplerConfig(TH, alpha, (t0, 25.0)))
        assert abs(leaky_average_exact(f, [t0], alpha)[0]) <= TH  # precondition
        c = estimate_coefficients(eta, spec, (-238, 99))
        F = leaky_average_exact(f, c.times, alpha)
        assert np.max(np.abs(c.a - F)) <= 2 * TH + 1e-6


@pytest.mark.parametrize("alpha", [0.0, 0.1])
def test_oversampling_identity(alpha):
    spec = WindowSpec.default(1.0, 0.25, alpha)
    f = corpus_signal(4)
    n = np.arange(-400, 481)
    F = leaky_average_exact(f, n * spec.T, alpha)
    c = CoefficientSeries(n, F, spec.T)
    t = np.linspace(2, 18, 801)
    err = np.max(np.abs(ReconstructedSignal(c, spec)(t) - f(t)))
    assert err <= 1e-2


def test_reconstruct_trivial_cases():
    n = np.arange(-3, 4)
    zero = reconstruct(CoefficientSeries(n, np.zeros(7), SPEC.T), SPEC, -1.0, 0.01, 201)
    assert np.all(zero.values == 0.0)
    unit = CoefficientSeries(n, (n == 0).astype(float), SPEC.T)
    g = reconstruct(unit, SPEC, -1.0, 0.01, 201)
    # the synthesis carries the grid period T as quadrature weight
    np.testing.assert_allclose(g.values, SPEC.T * phi(g.times, SPEC), atol=1e-13)


def test_truncate_and_symmetric_range():
    c = CoefficientSeries(np.arange(-5, 6), np.arange(11.0), SPEC.T, origin=2.0)
    t = c.truncate(2)
    assert t.r == 2 and list(t.a) == [3.0, 4.0, 5.0, 6.0, 7.0]
    assert t.times[0] == pytest.approx(2.0 - 0.5)
    with pytest.raises(ParameterError):
        c.truncate(6)
    with pytest.raises(ParameterError):
        CoefficientSeries([0, 2], [1.0, 1.0], SPEC.T)


def test_doubling_r_respects_tail_bound():
    f = corpus_signal(1, window=(-8, 8))
    eta = lif_sample(f, SamplerConfig(TH, 0.1, (-60, 12)))
    c = estimate_coefficients(eta, SPEC, (-80, 80), origin=0.0)
    fg = grid_over(f, -10, 10, 1 / 128)
    # the tail bound caps |f_2r - f_r| pointwise; interval integrals over the
    # window pick up at most its length as a factor
    length = 20.0
    for r in (10, 20, 40):
        d = []
        for rr in (r, 2 * r):
            g = grid_over(ReconstructedSignal(c.truncate(rr), SPEC), -10, 10, 1 / 128)
            d.append(signal_discrepancy_grid(fg, g, 0.1).value)
        assert d[1] <= d[0] + length * tail_bound(c, r, SPEC) + 1e-12


def test_compiled_and_python_synthesis_agree():
    c = CoefficientSeries(np.arange(-20, 21), np.random.default_rng(0).normal(size=41), SPEC.T)
    rec = ReconstructedSignal(c, SPEC)
    t = np.linspace(-6, 6, 333)
    direct = SPEC.T * (phi(t[:, None] - c.times[None, :], SPEC) @ c.a)
    np.testing.assert_allclose(rec(t), direct, atol=1e-12)
    scalar = SPEC.T * float(phi(0.3 - c.times, SPEC) @ c.a)
    assert rec(0.3) == pytest.approx(scalar, abs=1e-12)
