import numpy as np
import pytest
from scipy import stats

from ecvol.elliptical import Kotz, PearsonII, PearsonVII
from ecvol.errors import InvalidParameterError
from ecvol.meanvol import MeanSpec, VolSpec, filter_variance, residuals
from ecvol.simulate import SimSpec, simulate

GARCH = VolSpec("garch", 1, 1)
THETA = (0.05, 0.10, 0.85)


def test_same_seed_same_bits():
    spec = SimSpec(T=500, vol=GARCH, theta=THETA, seed=3)
    assert simulate(spec).values.tobytes() == simulate(spec).values.tobytes()
    assert simulate(spec) != simulate(SimSpec(T=500, vol=GARCH, theta=THETA, seed=4))


def test_standardized_variance_near_one():
    y = simulate(SimSpec(T=5000, vol=GARCH, theta=THETA, seed=1)).values
    z = filter_variance(y, GARCH, THETA).standardized
    assert 0.95 <= np.var(z) <= 1.05


def test_constant_variance_when_alpha1_is_zero():
    T, a0 = 4000, 0.3
    y = simulate(SimSpec(T=T, vol=VolSpec.arch(1), theta=(a0, 0.0), seed=2)).values
    se = a0 * np.sqrt(2.0 / (T - 1))
    assert abs(np.var(y, ddof=1) - a0) < 3 * se
    assert stats.kstest(y / np.sqrt(a0), "norm").pvalue > 1e-3


def test_dependent_t_has_heavy_tails():
    vol = VolSpec("garch", 1, 1)
    # a single shared mixing draw leaves each path Gaussian given w, so pool across paths
    all_z = np.concatenate([
        filter_variance(simulate(SimSpec(T=2000, vol=vol, theta=THETA, law=PearsonVII(4.0), dependent=True, seed=s)).values, vol, THETA).standardized
        for s in range(20)
    ])
    assert stats.kurtosis(all_z, fisher=False) > 3.0


def test_independent_t_innovations():
    y = simulate(SimSpec(T=20000, vol=VolSpec.arch(1), theta=(1.0, 0.0), law=PearsonVII(5.0), seed=5)).values
    assert stats.kstest(y, "t", args=(5,)).pvalue > 1e-3


def test_ar_mean():
    spec = SimSpec(T=3000, vol=VolSpec.arch(1), theta=(0.1, 0.0), mean=MeanSpec(1), beta=(0.2, 0.5), seed=6)
    y = simulate(spec).values
    eps = residuals(y, MeanSpec(1), [0.2, 0.5])
    assert abs(np.mean(eps)) < 4 * np.sqrt(0.1 / eps.size)
    assert np.mean(y) == pytest.approx(0.4, abs=0.05)


def test_egarch_and_tgarch_paths_are_finite():
    for vol, theta in ((VolSpec("egarch", 1, 1), (-0.1, 0.2, -0.05, 0.95)), (VolSpec("tgarch", 1, 1), (0.05, 0.05, 0.85, 0.1))):
        y = simulate(SimSpec(T=1000, vol=vol, theta=theta, seed=7)).values
        assert np.all(np.isfinite(y)) and y.size == 1000


def test_invalid_specs():
    with pytest.raises(InvalidParameterError):
        SimSpec(T=0, vol=GARCH, theta=THETA)
    with pytest.raises(InvalidParameterError):
        SimSpec(T=10, vol=GARCH, theta=(0.05, 0.1))
    with pytest.raises(InvalidParameterError):
        SimSpec(T=10, vol=GARCH, theta=THETA, law=Kotz(Q=0.8))
    with pytest.raises(InvalidParameterError):
        SimSpec(T=10, vol=GARCH, theta=THETA, law=PearsonII(1.0))
    with pytest.raises(InvalidParameterError):
        SimSpec(T=10, vol=GARCH, theta=THETA, dependent=True)
    with pytest.raises(InvalidParameterError):
        SimSpec(T=10, vol=GARCH, theta=(-0.05, 0.1, 0.8))
    with pytest.raises(InvalidParameterError):
        simulate(SimSpec(T=10, vol=VolSpec("egarch", 1, 1), theta=(0, 0.1, 0, 0.5), law=PearsonVII(1.0)))
