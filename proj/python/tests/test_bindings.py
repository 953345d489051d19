import math

import numpy as np
import pytest

import spikedet


def test_goe_limits():
    w = 0.5
    lm = spikedet.limiting_moments(w)
    assert lm["v0"] == pytest.approx(2 * (lm["m_plus"] - lm["m0"]))
    e2 = -math.log(1 - w)
    assert spikedet.theoretical_error(w) == pytest.approx(math.erfc(math.sqrt(e2) / 4), rel=1e-12)
    assert spikedet.critical_value(w) == pytest.approx(0.5 * (lm["m0"] + lm["m_plus"]))


def test_simulate_is_reproducible_and_symmetric():
    a = spikedet.simulate(64, 0.3, seed=5)
    b = spikedet.simulate(64, 0.3, seed=5)
    assert a.shape == (64, 64)
    assert np.array_equal(a, b)
    assert np.array_equal(a, a.T)
    assert not np.array_equal(a, spikedet.simulate(64, 0.3, seed=6))


def test_detect_statistic_matches_numpy():
    m = spikedet.simulate(128, 0.0, seed=1)
    w = 0.4
    r = spikedet.detect(m, w)
    n = m.shape[0]
    sign, logdet = np.linalg.slogdet((1 + w) * np.eye(n) - math.sqrt(w) * m)
    assert sign > 0
    # GOE (w2 = 2, w4 = 3): the trace corrections vanish.
    ref = -logdet + w * n / 2
    assert r["statistic"] == pytest.approx(ref, rel=1e-9, abs=1e-9)
    assert isinstance(r["reject"], bool)


def test_strong_spike_is_rejected():
    m = spikedet.simulate(200, 0.0, seed=3)
    x = np.ones(200) / math.sqrt(200)
    m = m + 9.0 * np.outer(x, x)
    r = spikedet.detect(m, 0.5)
    assert r["reject"]
    assert r["signal_certain"]


def test_sech_fisher_constants():
    fi = spikedet.fisher_functionals("sech")
    assert fi["F"] == pytest.approx(math.pi**2 / 8, abs=1e-8)
    assert fi["G"] == pytest.approx(math.pi**2 / 16, abs=1e-8)
    assert fi["w4t"] == pytest.approx(1.5, abs=1e-8)


def test_adaptive_optimum():
    t, err = spikedet.optimize_t()
    assert t == pytest.approx(0.671, abs=0.005)
    assert err == pytest.approx(0.771, abs=0.005)


def test_error_curve_small():
    rows = spikedet.error_curve("n = 32\nomegas = 0, 0.5\ntrials = 100\nseed = 9\nnoise = goe\n")
    assert [r["omega"] for r in rows] == [0.0, 0.5]
    assert rows[0]["err_empirical"] == 1.0
    assert 0.0 <= rows[1]["type1"] <= 1.0


def test_invalid_config_raises():
    with pytest.raises(ValueError):
        spikedet.error_curve("n = 32\nomegas = 1.5\ntrials = 100\n")
