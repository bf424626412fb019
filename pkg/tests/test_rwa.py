"""Rotating-frame predictor checks: indices, frequencies, CDT, Rabi."""

import math

import numpy as np
import pytest

from drivenqubit.analysis import extract_frequency
from drivenqubit.dynamics import DriveParams, QubitState, propagate_exact
from drivenqubit.errors import ConfigError
from drivenqubit.rwa import (
    cdt_amplitudes,
    rabi_weak_driving,
    rwa_frequency,
    rwa_predict,
    rwa_resonant_index,
    rwa_width,
)
from drivenqubit.specfun import bessel_j0_zero, bessel_jn


def _p(eps0, amp, omega):
    return DriveParams(delta=1.0, epsilon0=eps0, amplitude=amp, omega=omega)


@pytest.mark.parametrize(
    "eps0, omega, expected",
    [
        (0.0, 1.0, 0),
        (3.0, 1.0, -3),
        (3.0, 3.0, -1),
        (7.0, 3.0, -2),
        (0.4, 1.0, 0),
        (0.6, 1.0, -1),
        # exact tie between -2 and -3: the smaller |n| wins
        (2.5, 1.0, -2),
        (3.0, 2.0, -1),
    ],
)
def test_resonant_index(eps0, omega, expected):
    assert rwa_resonant_index(_p(eps0, amp=1.0, omega=omega)) == expected


def test_resonant_index_minimizes_detuning():
    rng = np.random.RandomState(5)
    for _ in range(100):
        p = _p(float(rng.uniform(0, 10)), 1.0, float(rng.uniform(0.2, 20)))
        n = rwa_resonant_index(p)
        d = abs(n * p.omega + p.epsilon0)
        for m in (n - 1, n + 1):
            assert d <= abs(m * p.omega + p.epsilon0) + 1e-12


def test_rwa_frequency_is_bessel_weighted():
    p = _p(3.0, 10.0, 3.0)
    assert rwa_frequency(p, -1) == pytest.approx(abs(bessel_jn(1, 10.0 / 3.0)), rel=1e-12)
    assert rwa_frequency(p, 0) == pytest.approx(abs(bessel_jn(0, 10.0 / 3.0)), rel=1e-12)
    with pytest.raises(ValueError):
        rwa_frequency(p, 201)


def test_rwa_frequency_envelope_bound():
    # |J_n(z)| <= ~sqrt(2/(pi z)) for z well above n: Omega is bounded by
    # delta * 1.1 * sqrt(2 omega/(pi A)).
    for amp, omega in ((30.0, 1.0), (40.0, 2.0), (50.0, 5.0)):
        p = _p(2.0, amp, omega)
        n = rwa_resonant_index(p)
        bound = 1.1 * math.sqrt(2.0 * omega / (math.pi * amp))
        assert rwa_frequency(p, n) <= bound


def test_rwa_width_scale():
    assert rwa_width(0.4, 2) == pytest.approx(0.2)
    assert rwa_width(0.4, -2) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        rwa_width(0.4, 0)
    with pytest.raises(ValueError):
        rwa_width(-0.1, 1)


def test_cdt_amplitudes_sit_on_j0_zeros():
    omega = 5.0
    amps = cdt_amplitudes(omega, 6)
    assert len(amps) == 6
    for k, a in enumerate(amps, start=1):
        assert a == pytest.approx(omega * bessel_j0_zero(k), rel=1e-12)
        assert abs(bessel_jn(0, a / omega)) < 1e-10
    assert np.all(np.diff(amps) > 0.0)


def test_cdt_amplitudes_validation():
    with pytest.raises(ConfigError):
        cdt_amplitudes(0.0, 3)
    with pytest.raises(ConfigError):
        cdt_amplitudes(5.0, 0)
    with pytest.raises(ConfigError):
        cdt_amplitudes(5.0, 21)


def test_rabi_weak_driving_formulas():
    p = _p(3.0, 0.15, math.hypot(1.0, 3.0))
    pred = rabi_weak_driving(p)
    assert pred.omega_res == pytest.approx(math.sqrt(10.0))
    assert pred.omega_rabi == pytest.approx(0.15 * 1.0 / (2.0 * math.sqrt(10.0)), rel=1e-12)
    assert pred.weak_driving
    strong = rabi_weak_driving(_p(3.0, 5.0, math.sqrt(10.0)))
    assert not strong.weak_driving


def test_rabi_prediction_against_exact_trace():
    # Weakly driven resonant point: extracted envelope frequency matches
    # the Rabi formula A*sin(alpha)/2 within a few percent.
    p = _p(3.0, 0.15, math.hypot(1.0, 3.0))
    pred = rabi_weak_driving(p)
    t_end = 4.0 * 2.0 * math.pi / pred.omega_rabi
    ts = propagate_exact(p, QubitState.up(), t_end, steps_per_period=128)
    est = extract_frequency(ts, band=(0.2 * pred.omega_rabi, 5.0 * pred.omega_rabi), drive_period=p.period)
    assert est.omega_est == pytest.approx(pred.omega_rabi, rel=0.05)
    assert est.amplitude > 0.5


@pytest.mark.parametrize(
    "omega, quality, valid",
    [(0.5, "invalid", False), (2.0, "marginal", True), (5.0, "ok", True)],
)
def test_rwa_predict_quality_ladder(omega, quality, valid):
    pred = rwa_predict(_p(1.0, 4.0, omega))
    assert pred.quality == quality
    assert pred.valid is valid
    assert pred.reason


def test_rwa_predict_fields_consistent():
    p = _p(3.0, 15.0, 3.0)
    pred = rwa_predict(p)
    assert pred.n == -1
    assert pred.detuning == pytest.approx(pred.n * p.omega + p.epsilon0)
    assert pred.omega_osc == pytest.approx(abs(bessel_jn(1, 5.0)), rel=1e-12)
    assert pred.width == pytest.approx(pred.omega_osc)
    zero_n = rwa_predict(_p(0.0, 4.0, 3.0))
    assert zero_n.n == 0
    assert zero_n.width is None
