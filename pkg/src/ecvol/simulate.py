"""Synthetic return series for recovery studies.

Random numbers come from numpy's PCG64 bit generator seeded with
``SimSpec.seed``, which is portable across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ecvol.elliptical import EllipticalLaw, Kotz, PearsonVII, expected_abs_standardized
from ecvol.errors import InvalidParameterError
from ecvol.meanvol import MeanSpec, VolSpec
from ecvol.series import ReturnSeries

__all__ = ["SimSpec", "simulate"]


@dataclass(frozen=True)
class SimSpec:
    """What to simulate.

    ``law`` is ``Kotz()`` (Gaussian) or ``PearsonVII(r)``; with ``dependent``
    a single inverse-gamma mixing draw is shared by the whole path, which
    makes the residual vector jointly multivariate t.
    """

    T: int
    vol: VolSpec
    theta: tuple
    mean: MeanSpec = field(default_factory=MeanSpec)
    beta: tuple = (0.0,)
    law: EllipticalLaw = field(default_factory=Kotz)
    dependent: bool = False
    seed: int = 0
    burn: int = 500

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(x) for x in self.theta))
        object.__setattr__(self, "beta", tuple(float(x) for x in self.beta))
        if self.T < 1:
            raise InvalidParameterError("T must be >= 1")
        if self.burn < 0:
            raise InvalidParameterError("burn-in must be >= 0")
        if len(self.beta) != self.mean.n_params:
            raise InvalidParameterError(f"mean model expects {self.mean.n_params} coefficients")
        alpha0, alpha, gamma, delta = self.vol.split(self.theta)
        if self.vol.family != "egarch":
            if alpha0 <= 0 or np.any(alpha < 0) or np.any(gamma < 0) or np.any(alpha + delta < 0):
                raise InvalidParameterError(f"invalid {self.vol.label} parameters {self.theta}")
        if isinstance(self.law, Kotz):
            if not self.law.is_gaussian:
                raise InvalidParameterError("only the Gaussian member of the Kotz family can be simulated")
            if self.dependent:
                raise InvalidParameterError("dependent simulation needs a Pearson VII law")
        elif not isinstance(self.law, PearsonVII):
            raise InvalidParameterError(f"cannot simulate from {self.law.name}")


def _initial_variance(vol: VolSpec, theta) -> float:
    alpha0, alpha, gamma, delta = vol.split(theta)
    if vol.family == "egarch":
        d = float(np.sum(delta))
        return math.exp(alpha0 / (1.0 - d)) if abs(d) < 1 else math.exp(alpha0)
    persistence = float(np.sum(alpha) + np.sum(gamma) + 0.5 * np.sum(delta))
    return alpha0 / (1.0 - persistence) if persistence < 1 else alpha0


def simulate(spec: SimSpec) -> ReturnSeries:
    rng = np.random.default_rng(spec.seed)
    vol, mean = spec.vol, spec.mean
    alpha0, alpha, gamma, delta = vol.split(spec.theta)
    p, q, k = vol.p, vol.q, mean.k
    total = spec.T + spec.burn
    law = spec.law

    normals = rng.standard_normal(total)
    if isinstance(law, PearsonVII):
        if spec.dependent:
            w = law.r / rng.chisquare(law.r)
            z = normals * math.sqrt(w)
        else:
            z = normals * np.sqrt(law.r / rng.chisquare(law.r, size=total))
    else:
        z = normals

    e_abs = expected_abs_standardized(law) if vol.family == "egarch" else 0.0
    if not math.isfinite(e_abs):
        raise InvalidParameterError("Egarch simulation needs an innovation law with finite E|z|")

    s2_init = _initial_variance(vol, spec.theta)
    lag = max(p, q)
    eps = np.zeros(total + lag)
    sig2 = np.full(total + lag, s2_init)
    eps[:lag] = 0.0
    zz = np.zeros(total + lag)
    for t in range(lag, total + lag):
        if vol.family == "egarch":
            acc = alpha0
            for i in range(p):
                acc += alpha[i] * (abs(zz[t - i - 1]) - e_abs)
            for i in range(q):
                acc += gamma[i] * zz[t - i - 1]
            for i in range(p):
                acc += delta[i] * math.log(sig2[t - i - 1])
            s2 = math.exp(acc)
        else:
            s2 = alpha0
            for i in range(p):
                e = eps[t - i - 1] if t - i - 1 >= lag else math.sqrt(s2_init)
                e2 = e * e
                s2 += alpha[i] * e2 + delta[i] * (e2 if e < 0 else 0.0)
            for i in range(q):
                s2 += gamma[i] * sig2[t - i - 1]
        sig2[t] = s2
        zz[t] = z[t - lag]
        eps[t] = math.sqrt(s2) * zz[t]

    eps = eps[lag:]
    beta = np.asarray(spec.beta)
    phi = beta[int(mean.intercept) :]
    c0 = beta[0] if mean.intercept else 0.0
    ar_sum = float(np.sum(phi))
    y0 = c0 / (1.0 - ar_sum) if abs(ar_sum) < 1 else 0.0
    y = np.full(total + k, y0)
    for t in range(k, total + k):
        acc = c0
        for j in range(k):
            acc += phi[j] * y[t - j - 1]
        y[t] = acc + eps[t - k]
    return ReturnSeries(y[k + spec.burn :])
