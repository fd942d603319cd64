import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special, stats

from ecvol.elliptical import (
    GAUSSIAN_EABS,
    Bessel,
    Kotz,
    PearsonII,
    PearsonVII,
    bessel_i_series,
    bessel_k_integer,
    expected_abs_standardized,
    log_density,
    log_norm_const,
)
from ecvol.errors import DomainError, InvalidParameterError

LAWS = [
    Kotz(),
    Kotz(Q=0.882733),
    Kotz(Q=2.0),
    Kotz(Q=1.5, r=1.0, s=2.0),
    Kotz(Q=0.7, r=0.3, s=0.8),
    PearsonVII(r=1.0),
    PearsonVII(r=3.0),
    PearsonVII(r=30.0),
    PearsonII(Q=0.0),
    PearsonII(Q=2.5),
    PearsonII(Q=-0.5),
    Bessel(Q=0, r=1.0),
    Bessel(Q=1, r=0.5),
    Bessel(Q=3, r=2.0),
]


def _univariate_mass(law):
    def pdf(z):
        return math.exp(log_density(law, z * z, 1))

    if isinstance(law, PearsonII):
        # (1 - z)^Q goes into the quadrature weight; the rest is smooth on [0, 1]
        smooth = lambda z: pdf(z) / (1.0 - z) ** law.Q if z < 1.0 else 0.0
        mass, _ = integrate.quad(smooth, 0.0, 1.0, limit=200, weight="alg", wvar=(0.0, law.Q))
        return 2.0 * mass
    pieces = [(0.0, 1e-6), (1e-6, 1.0), (1.0, 10.0), (10.0, np.inf)]
    return 2.0 * sum(integrate.quad(pdf, a, b, limit=400, epsabs=1e-13, epsrel=1e-11)[0] for a, b in pieces)


@pytest.mark.parametrize("law", LAWS, ids=repr)
def test_univariate_density_integrates_to_one(law):
    if isinstance(law, PearsonVII) and law.r == 1.0:
        # Cauchy: closed-form tail beyond 1e6
        pdf = lambda z: math.exp(log_density(law, z * z, 1))
        body = sum(integrate.quad(pdf, a, b, limit=400)[0] for a, b in [(0, 1), (1, 1e3), (1e3, 1e6)])
        tail = math.atan(1e300) - math.atan(1e6)
        assert 2.0 * (body + tail / math.pi) == pytest.approx(1.0, abs=1e-6)
        return
    assert _univariate_mass(law) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("law", [Kotz(Q=1.3), PearsonVII(r=4.0), Bessel(Q=1, r=1.0)], ids=repr)
def test_bivariate_density_integrates_to_one(law):
    # radial integral in the plane: 2*pi * int rho f(rho^2) d rho
    f = lambda rho: 2.0 * math.pi * rho * math.exp(log_density(law, rho * rho, 2))
    mass = sum(integrate.quad(f, a, b, limit=400)[0] for a, b in [(0, 1), (1, 20), (20, np.inf)])
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_norm_const_examples():
    assert log_norm_const(Kotz(), 1) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-14)
    assert log_norm_const(PearsonVII(r=1.0), 1) == pytest.approx(-math.log(math.pi), abs=1e-14)
    Q = 0.882733
    direct = (0.5 - Q) * math.log(2.0) - special.gammaln(Q - 0.5)
    assert log_norm_const(Kotz(Q=Q), 1) == pytest.approx(direct, abs=1e-14)


def test_cauchy_normalisation_by_quadrature():
    mass, _ = integrate.quad(lambda z: 1.0 / (1.0 + z * z), -np.inf, np.inf)
    assert log_norm_const(PearsonVII(r=1.0), 1) == pytest.approx(-math.log(mass), abs=1e-12)


def test_density_examples():
    assert log_density(PearsonVII(r=1.0), 0.0, 1) == pytest.approx(-1.144730, abs=1e-6)
    assert log_density(Kotz(), 1.0, 1) == pytest.approx(-1.418939, abs=1e-6)
    # Pearson II with Q=0 in one dimension is uniform on [-1, 1]
    assert log_density(PearsonII(Q=0.0), 1.0, 1) == pytest.approx(-math.log(2.0), abs=1e-14)
    assert log_density(PearsonII(Q=0.0), 0.3, 1) == pytest.approx(-math.log(2.0), abs=1e-14)


def test_pearson2_support_is_enforced():
    with pytest.raises(DomainError):
        log_density(PearsonII(Q=1.0), 1.0001, 1)
    with pytest.raises(DomainError):
        log_density(Kotz(), -0.1, 1)


def test_invalid_parameters():
    with pytest.raises(InvalidParameterError):
        Kotz(r=-1.0)
    with pytest.raises(InvalidParameterError):
        PearsonVII(r=0.0)
    with pytest.raises(InvalidParameterError):
        PearsonII(Q=-1.0)
    with pytest.raises(InvalidParameterError):
        log_norm_const(Kotz(Q=0.4), 1)  # 2Q + m must exceed 2
    log_norm_const(Kotz(Q=0.4), 2)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=400.0))
def test_gaussian_member_matches_normal(v):
    z = math.sqrt(v)
    assert log_density(Kotz(), v, 1) == pytest.approx(stats.norm.logpdf(z), abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.0, max_value=1e4), st.floats(min_value=0.2, max_value=60.0))
def test_pearson7_matches_student_t(v, r):
    expected = stats.t.logpdf(math.sqrt(v), df=r)
    assert log_density(PearsonVII(r=r), v, 1) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("law", [Kotz(Q=0.6), Kotz(Q=1.0), Kotz(Q=0.9, r=2.0, s=1.7), PearsonVII(r=2.0), PearsonVII(r=0.5)], ids=repr)
def test_log_density_nonincreasing(law):
    v = np.linspace(0.0, 50.0, 2001)[1:]
    d = np.asarray(log_density(law, v, 1))
    assert np.all(np.diff(d) <= 1e-12)


def test_bessel_series_and_k_against_scipy():
    for nu in (0, 1, 2, 5):
        for z in (1e-3, 0.5, 1.7, 2.0, 6.0, 30.0):
            assert bessel_i_series(nu, z) == pytest.approx(special.iv(nu, z), rel=1e-13)
            assert bessel_k_integer(nu, z) == pytest.approx(special.kv(nu, z), rel=1e-12)


def test_expected_abs_examples():
    assert expected_abs_standardized(Kotz()) == pytest.approx(GAUSSIAN_EABS, abs=1e-9)
    r = 3.0
    closed = 2 * math.sqrt(r) * math.gamma((r + 1) / 2) / ((r - 1) * math.sqrt(math.pi) * math.gamma(r / 2))
    assert closed == pytest.approx(1.102658, abs=1e-6)
    assert expected_abs_standardized(PearsonVII(r=3.0)) == pytest.approx(closed, abs=1e-9)
    assert not math.isfinite(expected_abs_standardized(PearsonVII(r=1.0)))
    assert not math.isfinite(expected_abs_standardized(PearsonVII(r=0.7)))


def test_expected_abs_student_t_limit():
    assert abs(expected_abs_standardized(PearsonVII(r=200.0)) - GAUSSIAN_EABS) < 5e-3


@pytest.mark.parametrize("law", [Kotz(Q=0.882733), Kotz(Q=2.0, r=1.0, s=0.5), PearsonII(Q=1.0), Bessel(Q=2, r=1.0)], ids=repr)
def test_expected_abs_against_direct_quadrature(law):
    pdf = lambda z: z * math.exp(log_density(law, z * z, 1))
    top = 1.0 if isinstance(law, PearsonII) else np.inf
    direct = 2.0 * sum(integrate.quad(pdf, a, min(b, top), limit=400)[0] for a, b in [(0, 1), (1, np.inf)] if a < top)
    assert expected_abs_standardized(law) == pytest.approx(direct, rel=1e-8)
