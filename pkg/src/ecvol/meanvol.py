"""Mean-model residuals and the Arch/Garch/Tgarch/Egarch variance recursions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ecvol.elliptical import GAUSSIAN_EABS
from ecvol.errors import FilterError, InputError, InvalidParameterError
from ecvol.series import as_values

__all__ = [
    "FAMILIES",
    "MeanSpec",
    "VolPath",
    "VolSpec",
    "backcast_variance",
    "design_matrix",
    "filter_variance",
    "ols_beta",
    "residuals",
]

FAMILIES = ("arch", "garch", "tgarch", "egarch")


@dataclass(frozen=True)
class MeanSpec:
    """Intercept plus ``k`` autoregressive lags of the observed series."""

    k: int = 0
    intercept: bool = True

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise InvalidParameterError(f"AR order k must be a nonnegative integer; got {self.k}")

    @property
    def n_params(self) -> int:
        return self.k + int(self.intercept)

    def param_names(self) -> list[str]:
        names = ["beta0"] if self.intercept else []
        names += [f"beta{j}" for j in range(1, self.k + 1)]
        return names

    def to_dict(self) -> dict:
        return {"k": self.k, "intercept": self.intercept}


@dataclass(frozen=True)
class VolSpec:
    family: str = "garch"
    p: int = 1
    q: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameterError(f"unknown volatility family {self.family!r}")
        if int(self.p) != self.p or self.p < 1:
            raise InvalidParameterError(f"ARCH order p must be >= 1; got {self.p}")
        if int(self.q) != self.q or self.q < 0:
            raise InvalidParameterError(f"GARCH order q must be >= 0; got {self.q}")
        if self.family == "arch" and self.q != 0:
            raise InvalidParameterError("Arch models take q = 0")

    @classmethod
    def arch(cls, p: int = 1) -> "VolSpec":
        return cls("arch", p, 0)

    @property
    def n_params(self) -> int:
        n = 1 + self.p + self.q
        if self.family in ("tgarch", "egarch"):
            n += self.p
        return n

    def param_names(self) -> list[str]:
        names = [f"alpha{i}" for i in range(self.p + 1)]
        names += [f"gamma{i}" for i in range(1, self.q + 1)]
        if self.family in ("tgarch", "egarch"):
            names += [f"delta{i}" for i in range(1, self.p + 1)]
        return names

    def split(self, theta) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise InvalidParameterError(
                f"{self.label} expects {self.n_params} parameters, got {theta.size}"
            )
        p, q = self.p, self.q
        alpha0 = float(theta[0])
        alpha = theta[1 : p + 1].copy()
        gamma = theta[p + 1 : p + 1 + q].copy()
        if self.family in ("tgarch", "egarch"):
            delta = theta[p + 1 + q :].copy()
        else:
            delta = np.zeros(p)
        return alpha0, alpha, gamma, delta

    @property
    def label(self) -> str:
        name = {"arch": "Arch", "garch": "Garch", "tgarch": "Tgarch", "egarch": "Egarch"}[self.family]
        return f"{name}({self.p})" if self.family == "arch" else f"{name}({self.p},{self.q})"

    def to_dict(self) -> dict:
        return {"family": self.family, "p": self.p, "q": self.q}


@dataclass(frozen=True, eq=False)
class VolPath:
    """Residuals and conditional variances over the effective sample.

    ``start`` is the index in the original series of the first residual.
    """

    eps: np.ndarray
    sigma2: np.ndarray
    start: int = 0

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=float)
        sigma2 = np.asarray(self.sigma2, dtype=float)
        if eps.shape != sigma2.shape or eps.ndim != 1:
            raise ValueError("eps and sigma2 must be 1-d arrays of equal length")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "sigma2", sigma2)

    def __len__(self) -> int:
        return self.eps.size

    @property
    def standardized(self) -> np.ndarray:
        return self.eps / np.sqrt(self.sigma2)


def design_matrix(y, mean: MeanSpec) -> np.ndarray:
    """Rows ``(1, y_{t-1}, ..., y_{t-k})`` for ``t = k .. T-1``."""
    y = as_values(y)
    k = mean.k
    T = y.size
    if T < k + 1:
        raise InputError(f"series of length {T} is too short for {k} AR lags")
    cols = []
    if mean.intercept:
        cols.append(np.ones(T - k))
    for j in range(1, k + 1):
        cols.append(y[k - j : T - j])
    if not cols:
        return np.empty((T - k, 0))
    return np.column_stack(cols)


def residuals(series, mean: MeanSpec, beta) -> np.ndarray:
    """``eps_t = y_t - row_t . beta``; the first ``k`` observations only feed lags."""
    y = as_values(series)
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    if beta.size != mean.n_params:
        raise InvalidParameterError(f"mean model expects {mean.n_params} coefficients, got {beta.size}")
    X = design_matrix(y, mean)
    target = y[mean.k :]
    if beta.size == 0:
        return target.copy()
    return target - X @ beta


def ols_beta(series, mean: MeanSpec) -> np.ndarray:
    y = as_values(series)
    X = design_matrix(y, mean)
    if X.shape[1] == 0:
        return np.empty(0)
    beta, *_ = np.linalg.lstsq(X, y[mean.k :], rcond=None)
    return beta


def backcast_variance(eps) -> float:
    """Presample variance: mean of squared residuals (innovations are zero-mean)."""
    eps = np.asarray(eps, dtype=float)
    return float(np.mean(eps * eps))


@njit(cache=True)
def _garch_kernel(eps, alpha0, alpha, gamma, delta, backcast):
    T = eps.shape[0]
    p = alpha.shape[0]
    q = gamma.shape[0]
    sigma2 = np.empty(T)
    for t in range(T):
        acc = alpha0
        for i in range(p):
            j = t - i - 1
            if j >= 0:
                e2 = eps[j] * eps[j]
                neg = e2 if eps[j] < 0.0 else 0.0
            else:
                e2 = backcast
                neg = 0.5 * backcast
            acc += alpha[i] * e2 + delta[i] * neg
        for i in range(q):
            j = t - i - 1
            if j >= 0:
                acc += gamma[i] * sigma2[j]
            else:
                acc += gamma[i] * backcast
        sigma2[t] = acc
    return sigma2


@njit(cache=True)
def _egarch_kernel(eps, alpha0, alpha, gamma, delta, backcast, e_abs):
    T = eps.shape[0]
    p = alpha.shape[0]
    q = gamma.shape[0]
    log_b = np.log(backcast)
    lsig = np.empty(T)
    z = np.empty(T)
    for t in range(T):
        acc = alpha0
        for i in range(p):
            j = t - i - 1
            zz = z[j] if j >= 0 else 0.0
            acc += alpha[i] * (abs(zz) - e_abs)
        for i in range(q):
            j = t - i - 1
            zz = z[j] if j >= 0 else 0.0
            acc += gamma[i] * zz
        for i in range(p):
            j = t - i - 1
            acc += delta[i] * (lsig[j] if j >= 0 else log_b)
        lsig[t] = acc
        z[t] = eps[t] * np.exp(-0.5 * acc)
    return lsig


def filter_variance(eps, vol: VolSpec, theta, e_abs: float = GAUSSIAN_EABS, start: int = 0) -> VolPath:
    """Run the conditional-variance recursion of ``vol`` over residuals ``eps``.

    Presample squared residuals and variances are set to the mean squared
    residual; presample Egarch standardized residuals are 0. ``e_abs`` is
    E|z| of the innovation law and only enters the Egarch recursion.
    """
    eps = np.ascontiguousarray(eps, dtype=float)
    if eps.ndim != 1 or eps.size == 0:
        raise InputError("residual vector must be 1-d and nonempty")
    alpha0, alpha, gamma, delta = vol.split(theta)
    backcast = backcast_variance(eps)
    if not (backcast > 0 and math.isfinite(backcast)):
        raise InputError("residuals have zero or nonfinite variance")

    if vol.family == "egarch":
        if not math.isfinite(e_abs):
            raise InvalidParameterError("Egarch needs a finite E|z|")
        with np.errstate(over="ignore"):
            lsig = _egarch_kernel(eps, alpha0, alpha, gamma, delta, backcast, float(e_abs))
            sigma2 = np.exp(lsig)
    else:
        sigma2 = _garch_kernel(eps, alpha0, alpha, gamma, delta, backcast)

    bad = ~(np.isfinite(sigma2) & (sigma2 > 0))
    if bad.any():
        t = int(np.argmax(bad))
        raise FilterError(f"{vol.label}: variance {float(sigma2[t])!r} at t={t} is not positive and finite", t=t)
    return VolPath(eps, sigma2, start)
