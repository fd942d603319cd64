import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ecvol.estimate as est
from ecvol.elliptical import Kotz, PearsonVII
from ecvol.errors import EstimationError, InputError, InvalidParameterError
from ecvol.estimate import FitConfig, ModelSpec, ParamTransform, central_gradient, fit, profile_shape
from ecvol.likelihood import loglik
from ecvol.meanvol import MeanSpec, VolSpec, filter_variance, ols_beta, residuals
from ecvol.select import bic_star, caic
from ecvol.simulate import SimSpec, simulate

GARCH = VolSpec("garch", 1, 1)
ARCH = VolSpec.arch(1)


@pytest.fixture(scope="module")
def garch_data():
    return simulate(SimSpec(T=2000, vol=GARCH, theta=(0.05, 0.10, 0.85), seed=42))


@pytest.fixture(scope="module")
def garch_fit(garch_data):
    return fit(garch_data, MeanSpec(0), GARCH)


def _random_theta(spec, rng):
    mean, vol = spec.mean, spec.vol
    beta = list(rng.normal(0, 1, mean.n_params))
    p, q = vol.p, vol.q
    if vol.family == "egarch":
        theta = list(rng.normal(0, 1, vol.n_params))
    else:
        alpha = rng.uniform(0.001, 0.999, p)
        theta = [rng.uniform(1e-4, 10.0)] + list(alpha) + list(rng.uniform(0.001, 0.999, q))
        if vol.family == "tgarch":
            theta += list(rng.uniform(0.001, 1.999, p) - alpha)
    if spec.estimate_shape:
        theta.append(rng.uniform(0.51, 8.0))
    return np.array(beta + theta)


@settings(max_examples=200, deadline=None)
@given(
    st.sampled_from(["arch", "garch", "tgarch", "egarch"]),
    st.integers(1, 3),
    st.integers(0, 2),
    st.integers(0, 2),
    st.booleans(),
    st.integers(0, 2**32 - 1),
)
def test_transform_round_trip(family, p, q, k, est_shape, seed):
    q = 0 if family == "arch" else max(q, 1)
    spec = ModelSpec(MeanSpec(k), VolSpec(family, p, q), Kotz(), "independent", est_shape)
    t = ParamTransform(spec)
    theta = _random_theta(spec, np.random.default_rng(seed))
    np.testing.assert_allclose(t.constrain(t.unconstrain(theta)), theta, rtol=1e-12, atol=1e-12)


def test_transform_rejects_out_of_range():
    t = ParamTransform(ModelSpec(MeanSpec(0), GARCH, Kotz()))
    with pytest.raises(InvalidParameterError):
        t.unconstrain([0.0, -1.0, 0.1, 0.8])
    with pytest.raises(InvalidParameterError):
        t.unconstrain([0.0, 1.0, 1.2, 0.8])


def test_central_gradient_on_quadratic():
    f = lambda x: float(x @ x + 3 * x[0])
    np.testing.assert_allclose(central_gradient(f, np.array([1.0, -2.0])), [5.0, -4.0], atol=1e-8)


def test_recovery_single_seed(garch_fit):
    p = garch_fit.params
    assert abs(p["alpha0"] - 0.05) < 0.05
    assert abs(p["alpha1"] - 0.10) < 0.05
    assert abs(p["gamma1"] - 0.85) < 0.05
    assert garch_fit.converged and garch_fit.stationary


def test_gradient_small_at_smooth_optimum(garch_fit):
    assert garch_fit.grad_norm < 1e-4 * (1 + abs(garch_fit.loglik))


def test_criteria_recompute_exactly(garch_fit):
    r = garch_fit
    assert r.n == 2000 and r.n_p == 4
    assert bic_star(r.loglik, r.n, r.n_p) == r.bic_star
    assert caic(r.loglik, r.n, r.n_p) == r.caic


def test_loglik_matches_path(garch_data, garch_fit):
    path = garch_fit.volatility_path(garch_data)
    assert loglik(path, Kotz()) == garch_fit.loglik


def test_optimum_beats_start(garch_data, garch_fit):
    y = garch_data.values
    beta = ols_beta(y, MeanSpec(0))
    eps = residuals(y, MeanSpec(0), beta)
    var = float(np.mean(eps**2))
    start = filter_variance(eps, GARCH, [0.5 * var, 0.05, 0.8])
    assert garch_fit.loglik >= loglik(start, Kotz())


def test_scale_equivariance(garch_data, garch_fit):
    scaled = fit(garch_data.values * 100.0, MeanSpec(0), GARCH)
    assert scaled.params["alpha0"] == pytest.approx(garch_fit.params["alpha0"] * 1e4, rel=1e-6)
    assert scaled.params["gamma1"] == pytest.approx(garch_fit.params["gamma1"], rel=1e-6)
    assert scaled.loglik == pytest.approx(garch_fit.loglik - 2000 * math.log(100.0), rel=1e-10)


def test_multistart_monotone(garch_data):
    data = garch_data.values[:800]
    Ms = [fit(data, MeanSpec(0), VolSpec("tgarch", 1, 1), FitConfig(multistart=m, seed=7)).loglik for m in (1, 2, 4)]
    assert Ms[0] <= Ms[1] <= Ms[2]


def test_deterministic(garch_data):
    a = fit(garch_data.values[:500], MeanSpec(1), ARCH, FitConfig(multistart=2, seed=3))
    b = fit(garch_data.values[:500], MeanSpec(1), ARCH, FitConfig(multistart=2, seed=3))
    assert a.params == b.params and a.loglik == b.loglik


def test_constant_series_is_input_error():
    with pytest.raises(InputError):
        fit(np.full(200, 0.3), MeanSpec(0), ARCH)
    with pytest.raises(InputError):
        fit(np.array([0.1, 0.2]), MeanSpec(1), ARCH)


def test_pearson_shape_cannot_be_estimated():
    with pytest.raises(InvalidParameterError):
        ModelSpec(MeanSpec(0), ARCH, PearsonVII(3.0), "independent", True)


def test_all_starts_failing_raises(monkeypatch, garch_data):
    monkeypatch.setattr(est, "_converged", lambda *a: False)
    with pytest.raises(EstimationError) as info:
        fit(garch_data.values[:300], MeanSpec(0), ARCH, FitConfig(multistart=2))
    assert len(info.value.diagnostics) == 2
    assert {"index", "loglik", "grad_norm", "converged", "message"} <= set(info.value.diagnostics[0])


@pytest.mark.parametrize("family", ["arch", "garch", "tgarch", "egarch"])
@pytest.mark.parametrize("law,kind", [(PearsonVII(1.0), "dependent"), (PearsonVII(5.0), "independent"), (Kotz(), "independent")])
def test_every_family_converges(family, law, kind):
    vol = VolSpec.arch(1) if family == "arch" else VolSpec(family, 1, 1)
    y = simulate(SimSpec(T=1000, vol=VolSpec("garch", 1, 1), theta=(0.05, 0.1, 0.85), law=PearsonVII(5.0), seed=11))
    res = fit(y, MeanSpec(1), vol, FitConfig(law=law, likelihood=kind))
    assert res.converged
    assert res.nonstandard_eabs == (family == "egarch" and law == PearsonVII(1.0))


def test_kotz_shape_estimate_and_profile_consistency():
    y = simulate(SimSpec(T=1500, vol=ARCH, theta=(0.5, 0.4), seed=11))
    joint = fit(y, MeanSpec(0), ARCH, FitConfig(estimate_shape=True))
    Q = joint.params["Q"]
    assert joint.n_p == 4 and 0.8 < Q < 1.2
    prof = profile_shape(y, MeanSpec(0), ARCH, FitConfig(), [Q - 0.05, Q, Q + 0.05])
    assert prof[1].loglik == pytest.approx(joint.loglik, abs=1e-6)
    assert max(p.loglik for p in prof) == pytest.approx(joint.loglik, abs=1e-6)


def test_profile_single_gaussian_point_matches_fit(garch_data):
    data = garch_data.values[:600]
    prof = profile_shape(data, MeanSpec(0), ARCH, FitConfig(), [1.0])
    assert prof[0].loglik == fit(data, MeanSpec(0), ARCH).loglik


def test_pearson_profile_peaks_near_truth():
    y = simulate(SimSpec(T=4000, vol=ARCH, theta=(0.5, 0.3), law=PearsonVII(5.0), seed=2))
    prof = profile_shape(y, MeanSpec(0), ARCH, FitConfig(law=PearsonVII(1.0)), [2.0, 5.0, 20.0])
    assert max(prof, key=lambda p: p.loglik).shape == 5.0


def test_profile_records_failures():
    y = simulate(SimSpec(T=300, vol=ARCH, theta=(0.5, 0.3), seed=2))
    prof = profile_shape(y, MeanSpec(0), ARCH, FitConfig(), [0.3, 1.0])
    assert prof[0].error is not None and math.isnan(prof[0].loglik)
    assert prof[1].error is None


def test_model_spec_round_trip():
    spec = ModelSpec(MeanSpec(2), VolSpec("tgarch", 2, 1), Kotz(Q=0.9), "dependent", True)
    assert ModelSpec.from_dict(spec.to_dict()) == spec
    assert spec.model_id == "kotz(Q=est)/dependent/Tgarch(2,1)/k=2"
    assert dataclasses.replace(spec, estimate_shape=False).n_params == spec.n_params - 1
