"""Ruin with re-insured large claims.

Claims ``B_i`` arrive one per unit of premium (``A_i = 1/c``), so the net
increment is ``B_i - 1`` and claims of size at least ``a x`` are paid by the
re-insurer. ``RuinModel.claim_spec`` is the law of ``X = B - 1``.

Quantities:

* ``P_a(x)``, the all-time ruin probability with re-insurance;
* ``P_{a,T}(x)``, ruin within ``floor(T x)`` claims while no claim reaches
  ``a x``; a lower bound for ``P_a(x)``;
* the upper bound ``P_{a,T}(x) / P(B < a x)^{floor(T x)} + 2 P(M(a x) > T x / 2)``
  with the last term controlled by the beta-moment bound;
* the constant ``C`` of the ``(L x^{-(alpha-1)})^k`` asymptotics, ``k = ceil(1/a)``.
"""

from dataclasses import dataclass, field
import math
import time
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .bounds import theorem1_certificate, theorem1_bound
from .dist import DistributionSpec, Family, pareto_shift, stream
from .errors import ConfigError, DegenerateRetention, InsufficientSignal
from .lundberg import TruncatedWalkModel
from .montecarlo import (BUFFER, DEFAULT_EPS, DEFAULT_STEP_CAP, MCEstimate, barrier_for,
                         run_blocks, simulate_suprema)

CSV_HEADER = ("x", "a", "T", "p_hat", "std_err", "bound_rhs", "slope_target")


def retention_count(a: float) -> int:
    """k = ceil(1/a), the number of large claims needed for ruin."""
    v = 1.0 / a
    r = round(v)
    return int(r) if abs(v - r) <= 1e-12 * v else math.ceil(v)


def is_degenerate(a: float) -> bool:
    v = 1.0 / a
    return abs(v - round(v)) <= 1e-12 * v


def default_beta(alpha: float) -> float:
    return 0.5 * (1.0 + alpha)


def default_horizon(alpha: float, a: float, beta: Optional[float] = None) -> float:
    """T = 2 a k (alpha - 1) / (beta - 1) + 1.

    The long-horizon term decays like x^{-(beta - 1) T / (2a)}, so this T makes
    it o(x^{-(alpha - 1) k}), and T > 1 + a as the integral for C requires.
    """
    beta = default_beta(alpha) if beta is None else beta
    return 2.0 * a * retention_count(a) * (alpha - 1.0) / (beta - 1.0) + 1.0


@dataclass(frozen=True)
class RuinModel:
    """Re-insurance scenario; ``claim_spec`` is the law of X = B - 1."""

    claim_spec: DistributionSpec
    a: float
    T: Optional[float] = None
    premium_rate: float = 1.0
    beta: Optional[float] = None

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigError(f"retention fraction a must be positive, got {self.a}")
        if not self.premium_rate > 0:
            raise ConfigError("premium rate must be positive")
        if self.claim_spec.support_inf < -1.0:
            raise ConfigError("claims B = X + 1 must be non-negative")
        if not self.claim_spec.mean() + 1.0 < 1.0:
            raise ConfigError("premium income must exceed the mean claim")
        alpha = self.alpha
        if self.beta is None:
            object.__setattr__(self, "beta", default_beta(alpha))
        if not 1 < self.beta < alpha:
            raise ConfigError(f"beta must lie in (1, alpha) = (1, {alpha}), got {self.beta}")
        if self.T is None:
            object.__setattr__(self, "T", default_horizon(alpha, self.a, self.beta))
        if not self.T > 0:
            raise ConfigError("horizon scale T must be positive")

    @property
    def alpha(self) -> float:
        return self.claim_spec.tail_index

    @property
    def inter_arrival(self) -> float:
        return 1.0 / self.premium_rate

    @property
    def k(self) -> int:
        return retention_count(self.a)

    @property
    def x_min_component(self) -> float:
        """1 - (k - 1) a: the smallest size any of the k big claims can have."""
        return 1.0 - (self.k - 1) * self.a

    @property
    def slowly_varying_constant(self) -> Optional[float]:
        """L with P(B > b) = L b^{-alpha} for a plain Pareto claim, else None."""
        s = self.claim_spec
        if s.family is Family.PARETO_SHIFT and s.slowly_varying is None:
            return s.scale ** s.alpha
        return None

    def slope_target(self) -> float:
        return -(self.alpha - 1.0) * self.k

    def n_steps(self, x: float, T: Optional[float] = None) -> int:
        return int(math.floor((self.T if T is None else T) * x))

    def dominating_walk(self, x: float) -> TruncatedWalkModel:
        """The capped walk min(X_i, a x) that dominates the re-insured one."""
        return TruncatedWalkModel(self.claim_spec, self.a * x)

    def to_dict(self):
        return {"claim_spec": self.claim_spec.to_dict(), "a": self.a, "T": self.T,
                "premium_rate": self.premium_rate, "beta": self.beta}


def ruin_model(alpha: float, a: float, scale: float = 0.5, T: Optional[float] = None,
               premium_rate: float = 1.0, beta: Optional[float] = None) -> RuinModel:
    """Pareto claims on (scale, inf) with tail index alpha."""
    return RuinModel(pareto_shift(alpha, 1.0, scale=scale), a, T, premium_rate, beta)


def ruin_prob_mc(model: RuinModel, x: float, n_paths: int, eps: Optional[float] = None,
                 seed: int = 0, workers: int = 1,
                 step_cap: int = DEFAULT_STEP_CAP) -> MCEstimate:
    """Estimate of P_a(x) from walks with increments B I(B < a x) - 1."""
    eps = DEFAULT_EPS if eps is None else eps
    t0 = time.perf_counter()
    y = model.a * x
    if y <= model.claim_spec.support_inf + 1.0:
        # every claim is re-insured: the walk decreases by 1 per step
        return MCEstimate.from_count(0, n_paths, seed=seed, barrier_B=0.0,
                                     truncation_error_bound=0.0, wall_time_s=0.0,
                                     x=x, y=y, workers=workers)
    g = model.dominating_walk(x).gamma
    barrier = barrier_for(g, eps)
    counts, kmax = simulate_suprema(model.claim_spec, y, [x], n_paths, seed, barrier,
                                    workers, step_cap, mode=_kernels.MODE_REINSURE,
                                    drift=1.0)
    return MCEstimate.from_count(
        int(counts[0]), n_paths, seed=seed, barrier_B=barrier,
        truncation_error_bound=math.exp(-g * barrier),
        wall_time_s=time.perf_counter() - t0, x=x, y=y, workers=workers, max_steps=kmax)


def _finite_block(spec, seed, block, n, n_steps, x, cap):
    rng = stream(seed, block)
    state = np.zeros(5)
    buf = np.empty(BUFFER)
    while state[0] < n:
        spec.fill(rng, buf)
        _kernels.advance_finite_horizon(buf, state, n, n_steps, x, cap, 1.0)
    return int(state[4])


def finite_horizon_ruin_mc(model: RuinModel, x: float, n_paths: int, seed: int = 0,
                           workers: int = 1, T: Optional[float] = None) -> MCEstimate:
    """Estimate of P_{a,T}(x): floor(T x) claims, some partial sum of B_i - 1
    reaching x, and no claim reaching a x."""
    t0 = time.perf_counter()
    n_steps = model.n_steps(x, T)
    if n_steps < 1:
        return MCEstimate.from_count(0, n_paths, seed=seed, barrier_B=0.0,
                                     truncation_error_bound=0.0, wall_time_s=0.0,
                                     x=x, y=model.a * x, workers=workers)
    spec, cap = model.claim_spec, float(model.a * x)
    wins = sum(run_blocks(lambda b, n: _finite_block(spec, seed, b, n, n_steps, float(x), cap),
                          n_paths, workers))
    return MCEstimate.from_count(wins, n_paths, seed=seed, barrier_B=0.0,
                                 truncation_error_bound=0.0,
                                 wall_time_s=time.perf_counter() - t0, x=x,
                                 y=model.a * x, workers=workers, max_steps=n_steps)


@dataclass(frozen=True)
class UpperBoundTerms:
    """Pieces of the bound P_a <= P_{a,T} / correction + bound_term.

    Iterates as ``(p_aT, correction, bound_term)`` with ``p_aT`` the point
    estimate; the full estimate is kept in ``p_aT_estimate``.
    """

    p_aT_estimate: MCEstimate
    correction: float
    bound_term: float

    @property
    def p_aT(self) -> float:
        return self.p_aT_estimate.p_hat

    @property
    def rhs(self) -> float:
        return self.p_aT / self.correction + self.bound_term

    def rhs_upper(self, n_sigma=3.0) -> float:
        """Right side with the Monte Carlo part raised by ``n_sigma`` standard errors."""
        e = self.p_aT_estimate
        return (e.p_hat + n_sigma * e.std_err) / self.correction + self.bound_term

    def __iter__(self):
        return iter((self.p_aT, self.correction, self.bound_term))


def correction_factor(model: RuinModel, x: float, T: Optional[float] = None) -> float:
    """P(B < a x)^{floor(T x)} = P(max of the first floor(T x) claims < a x)."""
    n = model.n_steps(x, T)
    log_below = math.log1p(-float(model.claim_spec.tail(model.a * x - 1.0)))
    return math.exp(n * log_below)


def long_horizon_term(model: RuinModel, x: float, T: Optional[float] = None,
                      taylor_bounds: str = "exact") -> float:
    """2 (a x)^{-(beta - 1) T / (2a)}, i.e. twice the beta-moment bound at (T x / 2, a x)."""
    T = model.T if T is None else T
    cert = theorem1_certificate(model.claim_spec.moments(model.beta), taylor_bounds)
    return 2.0 * theorem1_bound(cert, T * x / 2.0, model.a * x)


def upper_bound_decomposition(model: RuinModel, x: float, T: Optional[float] = None,
                              n_paths: int = 10 ** 6, seed: int = 0,
                              workers: int = 1) -> UpperBoundTerms:
    """Terms of the upper bound on P_a(x); ThresholdViolation if a x <= y_beta."""
    bound_term = long_horizon_term(model, x, T)
    est = finite_horizon_ruin_mc(model, x, n_paths, seed, workers, T)
    return UpperBoundTerms(est, correction_factor(model, x, T), bound_term)


# -- the constant C ------------------------------------------------------------


@dataclass(frozen=True)
class ConstantCEstimate:
    """Importance-sampled value of the k-fold integral defining C."""

    value: float
    std_err: float
    n_samples: int
    seed: int
    T: float
    k: int
    x_min: float
    weight: float
    hits: int
    wall_time_s: float = 0.0


def jump_indicator(xs: np.ndarray, us: np.ndarray, drift: float = 1.0) -> np.ndarray:
    """Rowwise test of sup_t sum_i x_i I(u_i <= t) - drift t >= 1.

    Between jumps the path decreases, so the supremum is attained right
    after one of the jumps (or at t = 0, where it is 0 < 1).
    """
    order = np.argsort(us, axis=1, kind="stable")
    u_sorted = np.take_along_axis(us, order, axis=1)
    x_sorted = np.take_along_axis(xs, order, axis=1)
    level = np.cumsum(x_sorted, axis=1) - drift * u_sorted
    return np.any(level >= 1.0, axis=1)


def estimate_constant_C(model: RuinModel, T: Optional[float] = None,
                        n_samples: int = 10 ** 6, seed: int = 0, drift: float = 1.0,
                        chunk: int = 1 << 18) -> ConstantCEstimate:
    """Monte Carlo value of

        C = int alpha^k prod x_i^{-1-alpha} I(sup_t sum x_i I(u_i <= t) - t >= 1;
            max x_i <= a) du dx  over u in [0, T]^k, x in (0, inf)^k.

    Ruin needs all k claims (any k - 1 of them sum to at most (k-1) a < 1), so
    each x_i lies in [1 - (k-1) a, a]; the x_i are drawn from the normalised
    Pareto density on that interval and u_i uniformly on [0, T]. ``drift``
    scales the -t term and defaults to the formula above.
    """
    if is_degenerate(model.a):
        raise DegenerateRetention(f"1/a = {1.0 / model.a:.12g} is an integer")
    T = model.T if T is None else float(T)
    if not T > 0:
        raise ConfigError("T must be positive")
    t0 = time.perf_counter()
    alpha, k, a = model.alpha, model.k, model.a
    lo = model.x_min_component
    mass = lo ** -alpha - a ** -alpha
    weight = (T * mass) ** k
    rng = stream(seed, 0)
    hits = 0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        v = rng.random((m, k))
        # inverse CDF of the Pareto density restricted to [lo, a]
        xs = (lo ** -alpha - v * mass) ** (-1.0 / alpha)
        us = T * rng.random((m, k))
        hits += int(np.count_nonzero(jump_indicator(xs, us, drift)))
        done += m
    p = hits / n_samples
    return ConstantCEstimate(
        value=weight * p, std_err=weight * math.sqrt(p * (1.0 - p) / n_samples),
        n_samples=n_samples, seed=seed, T=T, k=k, x_min=lo, weight=weight, hits=hits,
        wall_time_s=time.perf_counter() - t0)


def constant_C_single_claim(alpha: float, a: float, drift: float = 1.0) -> float:
    """Closed form of C when a > 1 (k = 1): int_0^{(a-1)/drift} ((1 + drift u)^{-alpha} - a^{-alpha}) du."""
    if not a > 1:
        raise ValueError("the single-claim formula needs a > 1")
    top = (a - 1.0) / drift
    return ((1.0 - a ** (1.0 - alpha)) / ((alpha - 1.0) * drift)) - top * a ** -alpha


# -- slope of the finite-horizon probabilities -------------------------------


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    target: float
    estimates: tuple = field(default=())

    @property
    def deviation(self) -> float:
        return self.slope - self.target


def fit_slope(model: RuinModel, x_grid: Sequence[float], n_paths, seed: int = 0,
              workers: int = 1, max_rel_err: float = 0.3) -> SlopeFit:
    """Least-squares slope of log P_{a,T}(x) against log x.

    ``n_paths`` is a count per grid point or a sequence of counts. Requires a
    constant slowly varying factor, since otherwise L(x)^k bends the line.
    """
    if model.claim_spec.slowly_varying is not None:
        raise ConfigError("slope check needs a constant slowly varying factor")
    xs = [float(v) for v in x_grid]
    if len(xs) < 4:
        raise ConfigError("slope check needs at least four grid points")
    ns = list(n_paths) if isinstance(n_paths, (list, tuple, np.ndarray)) else [n_paths] * len(xs)
    if len(ns) != len(xs):
        raise ConfigError("one path count per grid point")
    ests = []
    for i, (x, n) in enumerate(zip(xs, ns)):
        # distinct seeds per grid point keep the estimates independent
        e = finite_horizon_ruin_mc(model, x, int(n), seed=seed + 1000003 * i, workers=workers)
        if e.p_hat == 0 or e.std_err / e.p_hat > max_rel_err:
            raise InsufficientSignal(
                f"P_aT({x:g}) = {e.p_hat:.3g} +- {e.std_err:.2g} is too noisy for a slope")
        ests.append(e)
    lx = np.log(xs)
    lp = np.log([e.p_hat for e in ests])
    slope, intercept = np.polyfit(lx, lp, 1)
    return SlopeFit(float(slope), float(intercept), model.slope_target(), tuple(ests))


def asymptotic_slope_check(model: RuinModel, x_grid: Sequence[float], n_paths,
                           seed: int = 0, workers: int = 1) -> float:
    """Fitted slope of log P_{a,T}(x) vs log x, for comparison with -(alpha-1) k."""
    return fit_slope(model, x_grid, n_paths, seed, workers).slope
