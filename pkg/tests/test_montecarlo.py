import json
import math

import numpy as np
import pytest

from cbcdiv.montecarlo import (
    MCResult,
    g_factor,
    mc_estimate,
    pd_sample,
    survival_table,
    worker_stream,
)


class _FixedRng:
    def __init__(self, value):
        self.value = value

    def random(self, shape):
        return np.full(shape, self.value)


def test_pd_sample_halving():
    y = pd_sample(_FixedRng(0.5), 1, 6)[0]
    assert np.allclose(y, [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625])


def test_pd_sample_telescoping():
    rng = worker_stream(123, 0)
    u = rng.random((500, 20))
    y = np.empty_like(u)
    rest = np.ones(500)
    for j in range(20):
        y[:, j] = rest * u[:, j]
        rest *= 1.0 - u[:, j]
    total = y.sum(axis=1) + rest
    assert np.allclose(total, 1.0)
    # the module's sampler agrees with the hand-rolled recursion
    y2 = pd_sample(worker_stream(123, 0), 500, 20)
    assert np.allclose(y, y2)


def test_pd_sample_first_moment():
    y = pd_sample(worker_stream(9, 0), 10**6, 1)
    assert abs(y[:, 0].mean() - 0.5) < 3 * 0.29 / 1000


def test_g_factor_examples():
    assert g_factor(np.array([0.4]), 1)[0] == 0.5
    assert g_factor(np.array([0.6]), 1)[0] == 0.0
    assert g_factor(np.array([0.2]), 2)[0] == pytest.approx(0.6875)


def test_g_factor_cutoff_region():
    # any component above 1/(ell+1) kills the sample
    y = np.linspace(0.51, 0.99, 20)
    assert np.all(g_factor(y, 1) == 0)


def test_g_factor_rejects_nonpositive():
    with pytest.raises(ValueError):
        g_factor(np.array([0.0]), 1)


def test_survival_table_monotone():
    t = survival_table(2)
    assert t[2] == 0.0  # m <= ell has too few flips
    assert np.all(np.diff(t[3:]) >= 0)
    assert t[-1] > 0.9999


def test_mc_reproducible_and_worker_split():
    a = mc_estimate(1, samples=20000, seed=5, workers=2)
    b = mc_estimate(1, samples=20000, seed=5, workers=2)
    assert a == b
    c = mc_estimate(1, samples=20000, seed=5, workers=1)
    assert c.mean != a.mean  # different substream layout, documented


def test_mc_matches_reference_density():
    r = mc_estimate(1, samples=200000, seed=11)
    assert abs(r.mean - 0.114247430222950932) < 5 * r.std_error


def test_mc_validates_inputs():
    with pytest.raises(ValueError):
        mc_estimate(0)
    with pytest.raises(ValueError):
        mc_estimate(1, samples=1)
    with pytest.raises(ValueError):
        mc_estimate(1, samples=10, workers=0)


def test_mc_json_schema():
    r = mc_estimate(2, samples=5000, seed=3)
    rec = json.loads(r.to_json())
    assert list(rec) == [
        "ell", "samples", "mean", "std_error", "seed", "depth", "workers",
    ]
    assert isinstance(rec["mean"], str)
    assert float(rec["mean"]) == r.mean
