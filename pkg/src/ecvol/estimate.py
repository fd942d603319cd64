"""Maximum-likelihood fitting and shape-parameter profiles.

Optimisation runs on a standardized copy of the series (divided by its
standard deviation) in unconstrained coordinates:

* beta and all Egarch coefficients: identity
* alpha_0 (Arch/Garch/Tgarch): log
* alpha_i: ``ALPHA_MAX * logistic(u)``; gamma_i: ``GAMMA_MAX * logistic(u)``
* Tgarch delta_i: ``ASYM_MAX * logistic(u) - alpha_i`` so that alpha_i + delta_i > 0
* Kotz shape Q: ``1/2 + exp(u)``

Each start is polished by Nelder-Mead followed by BFGS with central-difference
gradients. Estimates are mapped back to the original scale and the
log-likelihood is re-evaluated on the original data.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import optimize
from scipy.special import expit, logit

from ecvol.elliptical import GAUSSIAN_EABS, EllipticalLaw, Kotz, PearsonVII, expected_abs_standardized
from ecvol.errors import EcvolError, EstimationError, InputError, InvalidParameterError
from ecvol.likelihood import INDEPENDENT, KINDS, loglik
from ecvol.meanvol import MeanSpec, VolSpec, design_matrix, filter_variance, ols_beta, residuals
from ecvol.select import bic_star, caic
from ecvol.series import as_values

__all__ = [
    "FitConfig",
    "FitResult",
    "ModelSpec",
    "ParamTransform",
    "ProfilePoint",
    "StartDiagnostics",
    "central_gradient",
    "egarch_eabs",
    "fit",
    "profile_shape",
]

ALPHA_MAX = 1.0
GAMMA_MAX = 1.0
ASYM_MAX = 2.0
PERTURB_SD = 0.5


def law_from_dict(d: dict) -> EllipticalLaw:
    from ecvol.elliptical import Bessel, PearsonII

    family = d["family"]
    if family == "kotz":
        return Kotz(Q=d["Q"], r=d["r"], s=d["s"])
    if family == "pearson7":
        return PearsonVII(r=d["r"])
    if family == "pearson2":
        return PearsonII(Q=d["Q"])
    if family == "bessel":
        return Bessel(Q=d["Q"], r=d["r"])
    raise InvalidParameterError(f"unknown law family {family!r}")


@dataclass(frozen=True)
class ModelSpec:
    """Everything that identifies a fitted model apart from the data."""

    mean: MeanSpec
    vol: VolSpec
    law: EllipticalLaw
    likelihood: str = INDEPENDENT
    estimate_shape: bool = False

    def __post_init__(self):
        if self.likelihood not in KINDS:
            raise InvalidParameterError(f"unknown likelihood kind {self.likelihood!r}")
        if not isinstance(self.law, (Kotz, PearsonVII)):
            raise InvalidParameterError("fitting is implemented for Kotz and Pearson VII laws only")
        if self.estimate_shape and not isinstance(self.law, Kotz):
            raise InvalidParameterError("only the Kotz shape Q can be estimated; Pearson VII r is fixed")

    @property
    def n_params(self) -> int:
        return self.mean.n_params + self.vol.n_params + int(self.estimate_shape)

    def param_names(self) -> list[str]:
        names = self.mean.param_names() + self.vol.param_names()
        if self.estimate_shape:
            names.append("Q")
        return names

    @property
    def law_tag(self) -> str:
        if isinstance(self.law, Kotz):
            q = "est" if self.estimate_shape else f"{self.law.Q:g}"
            return f"kotz(Q={q})"
        return f"pearson7(r={self.law.r:g})"

    @property
    def model_id(self) -> str:
        return f"{self.law_tag}/{self.likelihood}/{self.vol.label}/k={self.mean.k}"

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.to_dict(),
            "volatility": self.vol.to_dict(),
            "law": self.law.to_dict(),
            "likelihood": self.likelihood,
            "estimate_shape": self.estimate_shape,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(
            mean=MeanSpec(**d["mean"]),
            vol=VolSpec(**d["volatility"]),
            law=law_from_dict(d["law"]),
            likelihood=d["likelihood"],
            estimate_shape=d["estimate_shape"],
        )


@dataclass(frozen=True)
class FitConfig:
    """Likelihood choice plus optimiser settings.

    ``law`` carries fixed hyperparameters (Pearson ``r``, or Kotz ``Q`` when
    the shape is not estimated; with ``estimate_shape`` its ``Q`` is ignored
    and the search starts from Q=1).
    """

    law: EllipticalLaw = field(default_factory=Kotz)
    likelihood: str = INDEPENDENT
    estimate_shape: bool = False
    multistart: int = 1
    tol: float = 1e-7
    maxiter: int = 4000
    seed: int = 0

    def __post_init__(self):
        if self.multistart < 1:
            raise InvalidParameterError("multistart must be >= 1")
        if not self.tol > 0:
            raise InvalidParameterError("tolerance must be positive")
        if self.maxiter < 1:
            raise InvalidParameterError("maxiter must be >= 1")


@dataclass(frozen=True)
class StartDiagnostics:
    index: int
    loglik: float
    grad_norm: float
    converged: bool
    message: str

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True, eq=False)
class FitResult:
    spec: ModelSpec
    params: dict
    loglik: float
    n: int
    n_p: int
    bic_star: float
    caic: float
    converged: bool
    grad_norm: float
    start_index: int
    nonstandard_eabs: bool = False
    persistence: float = math.nan
    starts: tuple = ()

    @property
    def model_id(self) -> str:
        return self.spec.model_id

    @property
    def theta(self) -> np.ndarray:
        return np.array(list(self.params.values()), dtype=float)

    @property
    def stationary(self) -> bool:
        return bool(self.persistence < 1.0)

    def law(self) -> EllipticalLaw:
        """Law at the estimate (Kotz Q replaced by its estimate when estimated)."""
        if self.spec.estimate_shape:
            return dataclasses.replace(self.spec.law, Q=self.params["Q"])
        return self.spec.law

    def volatility_path(self, series):
        """Residuals and conditional variances at the estimate."""
        beta, theta, _ = _split_natural(self.spec, self.theta)
        law = self.law()
        e_abs, _ = egarch_eabs(law)
        eps = residuals(series, self.spec.mean, beta)
        return filter_variance(eps, self.spec.vol, theta, e_abs, start=self.spec.mean.k)


class ProfilePoint(NamedTuple):
    shape: float
    loglik: float
    bic_star: float
    error: str | None = None


def egarch_eabs(law: EllipticalLaw) -> tuple[float, bool]:
    """E|z| for the Egarch recursion and whether a Gaussian stand-in was used.

    When the law has no first absolute moment (Pearson VII with r <= 1) the
    Gaussian value sqrt(2/pi) is substituted and the flag is set.
    """
    value = expected_abs_standardized(law)
    if math.isfinite(value):
        return value, False
    return GAUSSIAN_EABS, True


def _split_natural(spec: ModelSpec, theta: np.ndarray):
    nb = spec.mean.n_params
    nv = spec.vol.n_params
    beta = theta[:nb]
    vol_theta = theta[nb : nb + nv]
    Q = float(theta[nb + nv]) if spec.estimate_shape else None
    return beta, vol_theta, Q


class ParamTransform:
    """Map between natural parameters and unconstrained optimiser coordinates."""

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        self.n = spec.n_params

    def constrain(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        spec = self.spec
        vol = spec.vol
        p, q = vol.p, vol.q
        nb = spec.mean.n_params
        out = u.copy()
        if vol.family != "egarch":
            v = u[nb:]
            out[nb] = math.exp(v[0])
            alpha = ALPHA_MAX * expit(v[1 : p + 1])
            out[nb + 1 : nb + 1 + p] = alpha
            out[nb + 1 + p : nb + 1 + p + q] = GAMMA_MAX * expit(v[p + 1 : p + 1 + q])
            if vol.family == "tgarch":
                j = nb + 1 + p + q
                out[j : j + p] = ASYM_MAX * expit(v[p + 1 + q : p + 1 + q + p]) - alpha
        if spec.estimate_shape:
            out[-1] = 0.5 + math.exp(u[-1])
        return out

    def unconstrain(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        spec = self.spec
        vol = spec.vol
        p, q = vol.p, vol.q
        nb = spec.mean.n_params
        out = theta.copy()
        if vol.family != "egarch":
            v = theta[nb:]
            if v[0] <= 0:
                raise InvalidParameterError("alpha0 must be positive")
            out[nb] = math.log(v[0])
            alpha = v[1 : p + 1]
            gamma = v[p + 1 : p + 1 + q]
            if np.any(alpha <= 0) or np.any(alpha >= ALPHA_MAX):
                raise InvalidParameterError(f"alpha_i must lie in (0, {ALPHA_MAX})")
            if np.any(gamma <= 0) or np.any(gamma >= GAMMA_MAX):
                raise InvalidParameterError(f"gamma_i must lie in (0, {GAMMA_MAX})")
            out[nb + 1 : nb + 1 + p] = logit(alpha / ALPHA_MAX)
            out[nb + 1 + p : nb + 1 + p + q] = logit(gamma / GAMMA_MAX)
            if vol.family == "tgarch":
                j = nb + 1 + p + q
                s = (v[p + 1 + q : p + 1 + q + p] + alpha) / ASYM_MAX
                if np.any(s <= 0) or np.any(s >= 1):
                    raise InvalidParameterError(f"alpha_i + delta_i must lie in (0, {ASYM_MAX})")
                out[j : j + p] = logit(s)
        if spec.estimate_shape:
            if theta[-1] <= 0.5:
                raise InvalidParameterError("Kotz shape Q must exceed 1/2")
            out[-1] = math.log(theta[-1] - 0.5)
        return out


def central_gradient(f, x, rel_step: float = 1e-5) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        h = rel_step * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2.0 * h)
    return g


def _rescale(spec: ModelSpec, theta: np.ndarray, c: float) -> np.ndarray:
    """Map parameters fitted on ``y / c`` back to parameters for ``y``."""
    out = theta.copy()
    mean, vol = spec.mean, spec.vol
    if mean.intercept:
        out[0] *= c
    nb = mean.n_params
    if vol.family == "egarch":
        _, _, _, delta = vol.split(theta[nb : nb + vol.n_params])
        out[nb] += (1.0 - float(np.sum(delta))) * math.log(c * c)
    else:
        out[nb] *= c * c
    return out


def _persistence(vol: VolSpec, theta: np.ndarray) -> float:
    _, alpha, gamma, delta = vol.split(theta)
    if vol.family == "egarch":
        return float(abs(np.sum(delta)))
    out = float(np.sum(alpha) + np.sum(gamma))
    if vol.family == "tgarch":
        out += 0.5 * float(np.sum(delta))
    return out


def _start_values(spec: ModelSpec, y: np.ndarray) -> np.ndarray:
    mean, vol = spec.mean, spec.vol
    beta = ols_beta(y, mean)
    eps = residuals(y, mean, beta)
    var = float(np.mean(eps * eps))
    if not var > 0:
        raise InputError("degenerate series: residual variance is zero")
    p, q = vol.p, vol.q
    if vol.family == "egarch":
        # coefficient roles differ: delta carries persistence of log sigma^2
        theta = [0.2 * math.log(var)] + [0.1 / p] * p + [0.0] * q + [0.8 / p] * p
    else:
        theta = [0.5 * var] + [0.05 / p] * p + ([0.8 / q] * q if q else [])
        if vol.family == "tgarch":
            theta += [0.0] * p
    natural = list(beta) + theta
    if spec.estimate_shape:
        natural.append(1.0)
    return np.asarray(natural, dtype=float)


def _make_negloglik(spec: ModelSpec, y: np.ndarray, transform: ParamTransform, n: int):
    if spec.vol.family != "egarch":
        fixed_eabs = (GAUSSIAN_EABS, False)
    elif not spec.estimate_shape:
        fixed_eabs = egarch_eabs(spec.law)
    else:
        fixed_eabs = None

    def law_at(Q):
        return spec.law if Q is None else dataclasses.replace(spec.law, Q=Q)

    X = design_matrix(y, spec.mean)
    target = y[spec.mean.k :]

    def negll(u):
        try:
            theta = transform.constrain(u)
            beta, vol_theta, Q = _split_natural(spec, theta)
            law = law_at(Q)
            e_abs = fixed_eabs[0] if fixed_eabs else egarch_eabs(law)[0]
            eps = target - X @ beta if beta.size else target
            path = filter_variance(eps, spec.vol, vol_theta, e_abs)
            value = -loglik(path, law, spec.likelihood, compensated=False) / n
        except (EcvolError, OverflowError, FloatingPointError, ZeroDivisionError):
            return math.inf
        return value if math.isfinite(value) else math.inf

    return negll, law_at


_COMPASS_STEPS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)


def _compass(f, u, fu, max_sweeps: int = 500):
    """Coordinate pattern search; also reports whether the finest level is stationary.

    Needed because the Kotz log-residual term makes the objective kinked in
    the mean coefficients whenever Q != 1.
    """
    u = np.array(u, dtype=float)
    moved = True
    for step in _COMPASS_STEPS:
        for _ in range(max_sweeps):
            moved = False
            for i in range(u.size):
                h = step * max(1.0, abs(u[i]))
                for sign in (1.0, -1.0):
                    trial = u.copy()
                    trial[i] += sign * h
                    ft = f(trial)
                    if ft < fu:
                        u, fu, moved = trial, ft, True
                        break
            if not moved:
                break
    return u, fu, not moved


def _polish_once(f, u0, config: FitConfig):
    nm = optimize.minimize(
        f,
        u0,
        method="Nelder-Mead",
        options={"maxiter": config.maxiter, "maxfev": 4 * config.maxiter, "xatol": 1e-6, "fatol": 1e-12, "adaptive": True},
    )
    best_x, best_f, msg = nm.x, nm.fun, f"nelder-mead: {nm.message}"
    if not math.isfinite(best_f):
        return best_x, best_f, msg
    bfgs = optimize.minimize(
        f,
        best_x,
        jac=lambda x: central_gradient(f, x),
        method="BFGS",
        options={"gtol": config.tol, "maxiter": config.maxiter},
    )
    if bfgs.fun <= best_f:
        best_x, best_f = bfgs.x, bfgs.fun
    return best_x, best_f, msg + f"; bfgs: {bfgs.message}"


def _polish(f, u0, config: FitConfig, rounds: int = 3):
    """Simplex, quasi-Newton and compass search, restarted while they keep improving."""
    u, fu, stationary, msg = np.asarray(u0, dtype=float), math.inf, False, ""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for _ in range(rounds):
            x, fx, msg = _polish_once(f, u, config)
            if not math.isfinite(fx):
                return x, fx, msg, False
            x, fx, stationary = _compass(f, x, fx)
            improved = fu - fx
            u, fu = x, fx
            grad = np.linalg.norm(central_gradient(f, u))
            if stationary or grad <= config.tol or improved <= 1e-12 * (1.0 + abs(fu)):
                break
    return u, fu, msg, stationary


@dataclass
class _Optimum:
    index: int
    f: float
    u: np.ndarray
    grad_norm: float
    converged: bool
    diagnostics: list


def _converged(grad_norm: float, M: float, stationary: bool) -> bool:
    return bool(grad_norm <= 1e-4 * (1.0 + abs(M)) or stationary)


def _optimize(spec: ModelSpec, ys: np.ndarray, n: int, log_c: float, config: FitConfig) -> _Optimum:
    """Multistart search with every shape parameter held fixed."""
    transform = ParamTransform(spec)
    f, _ = _make_negloglik(spec, ys, transform, n)
    u0 = transform.unconstrain(_start_values(spec, ys))
    rng = np.random.default_rng(config.seed)
    starts = [u0] + [u0 + rng.normal(0.0, PERTURB_SD, u0.size) for _ in range(config.multistart - 1)]

    diagnostics = []
    best = None
    for i, u_start in enumerate(starts):
        u, fval, msg, stationary = _polish(f, u_start, config)
        if not math.isfinite(fval):
            diagnostics.append(StartDiagnostics(i, math.nan, math.nan, False, msg + "; objective not finite"))
            continue
        M = -fval * n - n * log_c
        gnorm = float(np.linalg.norm(central_gradient(f, u) * n))
        ok = _converged(gnorm, M, stationary)
        diagnostics.append(StartDiagnostics(i, float(M), gnorm, ok, msg))
        if best is None or fval < best.f:
            best = _Optimum(i, fval, u, gnorm, ok, diagnostics)

    if best is None or not any(d.converged for d in diagnostics):
        raise EstimationError(
            f"no start converged for {spec.model_id}",
            [d.to_dict() for d in diagnostics],
        )
    return best


SHAPE_BOUNDS = (math.log(0.02), math.log(10.0))
SHAPE_SCAN = 8


def fit(series, mean: MeanSpec, vol: VolSpec, config: FitConfig | None = None) -> FitResult:
    """Maximise the configured log-likelihood over mean, variance and shape parameters.

    With ``estimate_shape`` the Kotz Q is found by a bounded scalar search
    over ``log(Q - 1/2)`` of the maximised log-likelihood at fixed Q, so the
    joint estimate coincides with the maximiser of the profile.
    """
    config = config or FitConfig()
    spec = ModelSpec(mean, vol, config.law, config.likelihood, config.estimate_shape)
    y = as_values(series)
    if y.size < mean.k + max(vol.p, vol.q) + 2:
        raise InputError(f"series of length {y.size} is too short for {spec.model_id}")
    if not np.all(np.isfinite(y)):
        raise InputError("series contains nonfinite values")
    c = float(np.std(y))
    if np.ptp(y) == 0 or not c > 1e-12 * float(np.max(np.abs(y))):
        raise InputError("degenerate series: zero variance")
    ys = y / c
    n = y.size - mean.k
    log_c = math.log(c)

    if not spec.estimate_shape:
        best = _optimize(spec, ys, n, log_c, config)
        u_full = best.u
        gnorm = best.grad_norm
    else:
        inner = {}

        def fixed_spec(uq):
            law = dataclasses.replace(spec.law, Q=0.5 + math.exp(uq))
            return dataclasses.replace(spec, law=law, estimate_shape=False)

        def profile_negll(uq):
            try:
                inner[uq] = _optimize(fixed_spec(uq), ys, n, log_c, config)
            except EcvolError:
                return math.inf
            return inner[uq].f

        # coarse scan first: the profile can have several local maxima
        for uq in np.linspace(*SHAPE_BOUNDS, SHAPE_SCAN):
            profile_negll(float(uq))
        scanned = sorted(inner, key=lambda k: inner[k].f)
        if not scanned:
            raise EstimationError(f"no shape value could be fitted for {spec.model_id}")
        step = (SHAPE_BOUNDS[1] - SHAPE_BOUNDS[0]) / (SHAPE_SCAN - 1)
        lo = max(SHAPE_BOUNDS[0], scanned[0] - step)
        hi = min(SHAPE_BOUNDS[1], scanned[0] + step)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = optimize.minimize_scalar(profile_negll, bounds=(lo, hi), method="bounded", options={"xatol": 1e-5})
        if float(res.x) not in inner:
            profile_negll(float(res.x))
        uq = min(inner, key=lambda k: inner[k].f)
        best = inner[uq]
        u_full = np.append(best.u, uq)
        f_joint, _ = _make_negloglik(spec, ys, ParamTransform(spec), n)
        gnorm = float(np.linalg.norm(central_gradient(f_joint, u_full) * n))

    transform = ParamTransform(spec)
    theta = _rescale(spec, transform.constrain(u_full), c)
    beta, vol_theta, Q = _split_natural(spec, theta)
    law = spec.law if Q is None else dataclasses.replace(spec.law, Q=Q)
    e_abs, nonstandard = egarch_eabs(law) if vol.family == "egarch" else (GAUSSIAN_EABS, False)
    eps = residuals(y, mean, beta)
    path = filter_variance(eps, vol, vol_theta, e_abs, start=mean.k)
    M = loglik(path, law, spec.likelihood)
    n_p = spec.n_params
    return FitResult(
        spec=spec,
        params=dict(zip(spec.param_names(), (float(x) for x in theta))),
        loglik=M,
        n=n,
        n_p=n_p,
        bic_star=bic_star(M, n, n_p),
        caic=caic(M, n, n_p),
        converged=best.converged,
        grad_norm=gnorm,
        start_index=best.index,
        nonstandard_eabs=nonstandard,
        persistence=_persistence(vol, vol_theta),
        starts=tuple(best.diagnostics),
    )


def profile_shape(series, mean: MeanSpec, vol: VolSpec, config: FitConfig, grid) -> list[ProfilePoint]:
    """Profile log-likelihood over the Kotz Q (or Pearson VII r) in ``grid``.

    Every grid point is an independent refit with the shape held fixed; a
    failed point is reported with NaN values and its error message.
    """
    out = []
    for g in grid:
        g = float(g)
        try:
            if isinstance(config.law, Kotz):
                law = dataclasses.replace(config.law, Q=g)
            elif isinstance(config.law, PearsonVII):
                law = PearsonVII(r=g)
            else:
                raise InvalidParameterError(f"no profile for {config.law.name}")
            res = fit(series, mean, vol, dataclasses.replace(config, law=law, estimate_shape=False))
            out.append(ProfilePoint(g, res.loglik, res.bic_star))
        except EcvolError as exc:
            out.append(ProfilePoint(g, math.nan, math.nan, f"{type(exc).__name__}: {exc}"))
    return out
