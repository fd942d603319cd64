"""Independent-sample and dependent-sample log-likelihoods of a variance path.

With ``v_t = eps_t**2 / sigma_t**2``:

* independent: ``T log c_1 - 1/2 sum log sigma_t^2 + sum log h(v_t)``
* dependent:   ``log c_T - 1/2 sum log sigma_t^2 + log h(sum v_t)``

The dependent form treats the whole residual vector as one draw from a
T-dimensional elliptical law with diagonal dispersion.
"""

from __future__ import annotations

import math

import numpy as np

from ecvol.elliptical import EllipticalLaw, Kotz, PearsonVII
from ecvol.errors import InvalidParameterError, LikelihoodError
from ecvol.meanvol import VolPath, backcast_variance

__all__ = [
    "DEPENDENT",
    "INDEPENDENT",
    "KINDS",
    "RESIDUAL_FLOOR",
    "loglik",
    "loglik_dependent",
    "loglik_independent",
]

INDEPENDENT = "independent"
DEPENDENT = "dependent"
KINDS = (INDEPENDENT, DEPENDENT)

# squared residuals are floored at this multiple of the mean square inside logs
RESIDUAL_FLOOR = 1e-12


def _eps2_floor(eps: np.ndarray) -> float:
    floor = RESIDUAL_FLOOR * backcast_variance(eps)
    return floor if floor > 0 else np.finfo(float).tiny


def _first_bad(values: np.ndarray) -> int:
    return int(np.argmax(~np.isfinite(values)))


def _summer(compensated: bool):
    return math.fsum if compensated else (lambda a: float(np.sum(a)))


def loglik_independent(path: VolPath, law: EllipticalLaw, compensated: bool = True) -> float:
    """Independent-sample log-likelihood.

    ``compensated=False`` swaps the error-free sum for numpy's pairwise sum;
    the optimiser uses it for speed and reports the compensated value.
    """
    eps, sigma2 = path.eps, path.sigma2
    T = eps.size
    log_c1 = law.log_norm_const(1)
    log_s2 = np.log(sigma2)
    v = eps * eps / sigma2
    v_floor = _eps2_floor(eps) / sigma2 if isinstance(law, Kotz) else 0.0
    log_h = law.log_kernel(v, 1, v_floor)
    terms = -0.5 * log_s2 + log_h
    if not np.all(np.isfinite(terms)):
        t = _first_bad(terms)
        raise LikelihoodError(
            f"nonfinite log-likelihood contribution at t={t} "
            f"(eps={float(eps[t])!r}, sigma2={float(sigma2[t])!r})",
            t=t,
        )
    return T * log_c1 + _summer(compensated)(terms)


def loglik_dependent(path: VolPath, law: EllipticalLaw, compensated: bool = True) -> float:
    if not isinstance(law, (Kotz, PearsonVII)):
        raise InvalidParameterError(f"dependent likelihood is implemented for Kotz and Pearson VII, not {law.name}")
    eps, sigma2 = path.eps, path.sigma2
    T = eps.size
    log_s2 = np.log(sigma2)
    if not np.all(np.isfinite(log_s2)):
        t = _first_bad(log_s2)
        raise LikelihoodError(f"nonfinite log variance at t={t}", t=t)
    v = eps * eps / sigma2
    if not np.all(np.isfinite(v)):
        t = _first_bad(v)
        raise LikelihoodError(f"nonfinite standardized residual at t={t}", t=t)
    total = _summer(compensated)
    V = total(v)
    V_floor = total(_eps2_floor(eps) / sigma2) if isinstance(law, Kotz) else 0.0
    log_h = float(law.log_kernel(V, T, V_floor))
    out = law.log_norm_const(T) - 0.5 * total(log_s2) + log_h
    if not math.isfinite(out):
        raise LikelihoodError(f"nonfinite joint log-likelihood (sum of v = {V!r})")
    return out


def loglik(path: VolPath, law: EllipticalLaw, kind: str = INDEPENDENT, compensated: bool = True) -> float:
    if kind == INDEPENDENT:
        return loglik_independent(path, law, compensated)
    if kind == DEPENDENT:
        return loglik_dependent(path, law, compensated)
    raise InvalidParameterError(f"unknown likelihood kind {kind!r}")
