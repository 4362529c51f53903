"""Heavy-tailed increment laws X = B - c, their tails, moments and samplers.

Four families are supported:

* ``PARETO_SHIFT``: B is Pareto on (scale, inf) with survival
  ``L(b) * (b / scale) ** -alpha``; ``scale`` defaults to 1 and ``L`` to 1.
* ``WEIBULL_SHIFT``: ``P(B > b) = exp(-b ** xi)``, ``0 < xi < 1``.
* ``LOGNORMAL_TYPE_SHIFT``: ``P(B > b) = exp(-(log b) ** xi)`` on b >= 1,
  ``xi > 1``.
* ``CUSTOM``: a tabulated tail ``P(X > x)``, interpolated linearly in
  log-space between knots and continued as a power law past the last knot.
"""

from dataclasses import dataclass
import enum
import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special

from . import _kernels
from ._quad import integrate_pieces
from .errors import ConfigError, InfiniteMoment

__all__ = [
    "Family",
    "DistributionSpec",
    "MomentSet",
    "pareto_shift",
    "weibull_shift",
    "lognormal_type_shift",
    "custom_table",
    "tail",
    "hazard_q",
    "moments",
    "sample",
    "stream",
]


class Family(str, enum.Enum):
    PARETO_SHIFT = "pareto_shift"
    WEIBULL_SHIFT = "weibull_shift"
    LOGNORMAL_TYPE_SHIFT = "lognormal_type_shift"
    CUSTOM = "custom"


_FAMILY_CODE = {
    Family.PARETO_SHIFT: _kernels.PARETO,
    Family.WEIBULL_SHIFT: _kernels.WEIBULL,
    Family.LOGNORMAL_TYPE_SHIFT: _kernels.LOGNORMAL,
    Family.CUSTOM: _kernels.TABLE,
}


def stream(seed: int, worker: int = 0) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by ``(seed, worker)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(worker),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class MomentSet:
    """Moments of X at exponent ``beta`` and at ``delta = min(2, beta)``.

    A ``None`` value for ``mu2`` means ``E[X^2]`` is infinite.
    """

    mu: float
    mu_plus: float
    mu_minus: float
    beta: float
    delta: float
    mu_beta_plus: float
    mu_beta_minus: float
    mu_beta: float
    mu_delta_plus: float
    mu_delta_minus: float
    mu2: Optional[float] = None
    mu2_plus: Optional[float] = None
    mu2_minus: Optional[float] = None

    def __post_init__(self):
        if not self.mu < 0:
            raise ConfigError(f"mean must be negative, got {self.mu}")
        if not self.beta > 1:
            raise ConfigError(f"beta must exceed 1, got {self.beta}")
        if self.delta != min(2.0, self.beta):
            raise ConfigError("delta must equal min(2, beta)")

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True, eq=False)
class DistributionSpec:
    """Description of the increment law X = B - c (or a tabulated X).

    Build instances with :func:`pareto_shift`, :func:`weibull_shift`,
    :func:`lognormal_type_shift` or :func:`custom_table`; construction
    validates the parameters and rejects laws with non-negative mean.
    """

    family: Family
    drift_c: float = 0.0
    alpha: Optional[float] = None
    scale: float = 1.0
    slowly_varying: Optional[Callable] = None
    weibull_exponent: Optional[float] = None
    log_exponent: Optional[float] = None
    table_x: Optional[tuple] = None
    table_tail: Optional[tuple] = None
    heavy_tail_assumed: bool = False

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if fam is not Family.CUSTOM and not self.drift_c > 0:
            raise ConfigError(f"drift_c must be positive, got {self.drift_c}")
        if fam is Family.PARETO_SHIFT:
            if self.alpha is None or not self.alpha > 1:
                raise ConfigError("pareto_shift needs alpha > 1 for a finite mean")
            if not self.scale > 0:
                raise ConfigError("scale must be positive")
        elif fam is Family.WEIBULL_SHIFT:
            xi = self.weibull_exponent
            if xi is None or not 0 < xi < 1:
                raise ConfigError("weibull_exponent must lie in (0, 1)")
        elif fam is Family.LOGNORMAL_TYPE_SHIFT:
            xi = self.log_exponent
            if xi is None or not xi > 1:
                raise ConfigError("log_exponent must exceed 1")
        else:
            self._check_table()
        if self.slowly_varying is not None and fam is not Family.PARETO_SHIFT:
            raise ConfigError("slowly_varying applies to pareto_shift only")
        if self.slowly_varying is not None:
            grid = self.support_inf + np.geomspace(1e-3, 1e8, 400) * self.scale
            t = self.tail(grid)
            if np.any(np.diff(t) > 1e-15):
                raise ConfigError("tail with this slowly varying factor is not monotone")
        m = self.mean()
        if not m < 0:
            raise ConfigError(f"mean of X must be negative, got {m}")

    def _check_table(self):
        if self.table_x is None or self.table_tail is None:
            raise ConfigError("custom family needs table_x and table_tail")
        xs = np.asarray(self.table_x, dtype=float)
        ts = np.asarray(self.table_tail, dtype=float)
        if xs.ndim != 1 or xs.shape != ts.shape or xs.size < 2:
            raise ConfigError("table_x and table_tail must be equal-length 1-d")
        if np.any(np.diff(xs) <= 0):
            raise ConfigError("table_x must be strictly increasing")
        if ts[0] != 1.0 or np.any(np.diff(ts) >= 0) or ts[-1] <= 0:
            raise ConfigError("table_tail must start at 1 and decrease strictly to a positive value")
        if not xs[-1] > 0:
            raise ConfigError("last table knot must be positive for the power-law continuation")
        if self.alpha is None or not self.alpha > 1:
            raise ConfigError("custom family needs a tail index alpha > 1 beyond the table")
        object.__setattr__(self, "table_x", tuple(float(v) for v in xs))
        object.__setattr__(self, "table_tail", tuple(float(v) for v in ts))
        object.__setattr__(self, "heavy_tail_assumed", True)

    # -- basic shape ---------------------------------------------------------

    @property
    def support_inf(self) -> float:
        """Infimum of the support of X."""
        fam = self.family
        if fam is Family.PARETO_SHIFT:
            return self.scale - self.drift_c
        if fam is Family.WEIBULL_SHIFT:
            return -self.drift_c
        if fam is Family.LOGNORMAL_TYPE_SHIFT:
            return 1.0 - self.drift_c
        return self.table_x[0]

    @property
    def concave_from(self) -> Optional[float]:
        """Point x0 above which q(x) = -log P(X > x) is concave (None if unknown)."""
        fam = self.family
        if fam is Family.WEIBULL_SHIFT:
            return -self.drift_c
        if fam is Family.LOGNORMAL_TYPE_SHIFT:
            return max(1.0, math.exp(self.log_exponent - 1.0)) - self.drift_c
        if fam is Family.PARETO_SHIFT and self.slowly_varying is None:
            return self.support_inf
        return None

    @property
    def tail_index(self) -> float:
        """Supremum of the exponents p with E[(X^+)^p] finite."""
        if self.family in (Family.PARETO_SHIFT, Family.CUSTOM):
            return self.alpha
        return math.inf

    def log_tail(self, x):
        """log P(X > x), vectorised; -inf never occurs for these laws."""
        x = np.asarray(x, dtype=float)
        fam = self.family
        with np.errstate(divide="ignore", invalid="ignore"):
            if fam is Family.PARETO_SHIFT:
                b = np.maximum(x + self.drift_c, self.scale)
                out = -self.alpha * np.log(b / self.scale)
                if self.slowly_varying is not None:
                    out = out + np.log(self.slowly_varying(b))
            elif fam is Family.WEIBULL_SHIFT:
                b = np.maximum(x + self.drift_c, 0.0)
                out = -(b ** self.weibull_exponent)
            elif fam is Family.LOGNORMAL_TYPE_SHIFT:
                b = np.maximum(x + self.drift_c, 1.0)
                out = -(np.log(b) ** self.log_exponent)
            else:
                xs = np.asarray(self.table_x)
                lt = np.log(np.asarray(self.table_tail))
                out = np.interp(x, xs, lt)
                beyond = x > xs[-1]
                if np.any(beyond):
                    xb = np.where(beyond, x, xs[-1])
                    out = np.where(beyond, lt[-1] - self.alpha * np.log(xb / xs[-1]), out)
        out = np.minimum(out, 0.0)
        return out if out.ndim else float(out)

    def log_tail_scalar(self, x: float) -> float:
        """Scalar ``log_tail`` built on ``math``; the hot path of quadrature."""
        fam = self.family
        if fam is Family.PARETO_SHIFT:
            b = x + self.drift_c
            if b <= self.scale:
                return 0.0
            out = -self.alpha * math.log(b / self.scale)
            if self.slowly_varying is not None:
                out += math.log(float(self.slowly_varying(b)))
            return min(out, 0.0)
        if fam is Family.WEIBULL_SHIFT:
            b = x + self.drift_c
            return -(b ** self.weibull_exponent) if b > 0 else 0.0
        if fam is Family.LOGNORMAL_TYPE_SHIFT:
            b = x + self.drift_c
            return -(math.log(b) ** self.log_exponent) if b > 1 else 0.0
        return float(self.log_tail(x))

    def tail(self, x):
        """P(X > x)."""
        return np.exp(self.log_tail(x))

    def hazard_q(self, x):
        """q(x) = -log P(X > x)."""
        return -self.log_tail(x)

    def quantile_tail(self, u):
        """Inverse of the tail: the x with P(X > x) = u, for u in (0, 1]."""
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0) | (u > 1)):
            raise ValueError("tail levels must lie in (0, 1]")
        if self.slowly_varying is not None:
            out = self._invert_numerically(u)
        else:
            code, p0, p1, p2, xs, lt = self._kernel_params()
            out = np.array([_kernels.tail_quantile(code, p0, p1, p2, xs, lt, v)
                            for v in u.ravel()]).reshape(u.shape)
        return out if out.ndim else float(out)

    def _invert_numerically(self, u):
        # bisection on log(b - scale/2) keeps relative precision over many decades
        lo = np.full(u.shape, self.support_inf)
        hi = np.full(u.shape, self.support_inf + self.scale)
        target = np.log(u)
        while True:
            low = self.log_tail(hi) > target
            if not np.any(low):
                break
            hi = np.where(low, self.support_inf + 2 * (hi - self.support_inf), hi)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            above = self.log_tail(mid) > target
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        return hi

    def _kernel_params(self):
        fam = self.family
        empty = np.zeros(1)
        if fam is Family.PARETO_SHIFT:
            return _kernels.PARETO, self.alpha, self.scale, self.drift_c, empty, empty
        if fam is Family.WEIBULL_SHIFT:
            return _kernels.WEIBULL, self.weibull_exponent, 0.0, self.drift_c, empty, empty
        if fam is Family.LOGNORMAL_TYPE_SHIFT:
            return _kernels.LOGNORMAL, self.log_exponent, 0.0, self.drift_c, empty, empty
        xs = np.asarray(self.table_x)
        lt = np.log(np.asarray(self.table_tail))
        return _kernels.TABLE, self.alpha, 0.0, 0.0, xs, lt

    def fill(self, rng: np.random.Generator, out: np.ndarray) -> np.ndarray:
        """Overwrite ``out`` with i.i.d. exact samples of X drawn from ``rng``."""
        if self.slowly_varying is not None:
            out[:] = self._invert_numerically(1.0 - rng.random(out.size))
        else:
            _kernels.fill_samples(rng, *self._kernel_params(), out)
        return out

    def sample(self, rng: np.random.Generator, size=None):
        n = 1 if size is None else int(np.prod(size))
        out = self.fill(rng, np.empty(n))
        return float(out[0]) if size is None else out.reshape(size)

    # -- moments -------------------------------------------------------------

    def _tail_breaks(self):
        levels = (1e-2, 1e-5, 1e-10, 1e-20, 1e-40)
        out = []
        for u in levels:
            try:
                out.append(float(self.quantile_tail(u)))
            except (ValueError, OverflowError):
                pass
        return [b for b in out if math.isfinite(b)]

    def positive_moment(self, p: float) -> float:
        """E[(X^+)^p] for p > 0."""
        if p >= self.tail_index:
            raise InfiniteMoment(f"E[(X+)^{p}] is infinite (tail index {self.tail_index})")
        fam = self.family
        if fam is Family.PARETO_SHIFT and self.slowly_varying is None:
            # E[(B' - c')^+ ^p] for a unit Pareto B', c' = c / scale
            cp = self.drift_c / self.scale
            a = self.alpha
            val = a * cp ** (p - a) * special.beta(a - p, p + 1)
            if cp < 1:
                val *= special.betainc(a - p, p + 1, cp)
            return float(self.scale ** p * val)
        lo = max(self.support_inf, 0.0)
        breaks = [lo] + [b for b in self._tail_breaks() if b > lo] + [math.inf]

        def f(x):
            return p * x ** (p - 1) * math.exp(self.log_tail_scalar(x)) if x > 0 else (
                math.exp(self.log_tail_scalar(x)) if p == 1 else 0.0)

        base = lo ** p if lo > 0 else 0.0
        return base + integrate_pieces(f, breaks, epsabs=1e-13, epsrel=1e-12)

    def negative_moment(self, p: float) -> float:
        """E[((-X)^+)^p] for p > 0; the negative part is bounded by -support_inf."""
        top = -self.support_inf
        if top <= 0:
            return 0.0
        breaks = [0.0, top]
        if self.family is Family.CUSTOM:
            breaks += [-v for v in self.table_x if v < 0]

        def f(t):
            cdf = -math.expm1(self.log_tail_scalar(-t))
            return p * t ** (p - 1) * cdf if t > 0 else (cdf if p == 1 else 0.0)

        return integrate_pieces(f, breaks, epsabs=1e-14, epsrel=1e-13)

    def mean(self) -> float:
        if self.family is Family.PARETO_SHIFT and self.slowly_varying is None:
            return self.scale * self.alpha / (self.alpha - 1) - self.drift_c
        return self.positive_moment(1.0) - self.negative_moment(1.0)

    def moments(self, beta: float) -> MomentSet:
        """All moments used by the bounds at exponent ``beta`` (> 1)."""
        if not beta > 1:
            raise ValueError(f"beta must exceed 1, got {beta}")
        if beta >= self.tail_index:
            raise InfiniteMoment(
                f"beta={beta} is not below the tail index {self.tail_index}")
        delta = min(2.0, float(beta))
        mp, mm = self.positive_moment(1.0), self.negative_moment(1.0)
        bp, bm = self.positive_moment(beta), self.negative_moment(beta)
        dp, dm = self.positive_moment(delta), self.negative_moment(delta)
        mu2 = m2p = m2m = None
        if self.tail_index > 2:
            m2p, m2m = self.positive_moment(2.0), self.negative_moment(2.0)
            mu2 = m2p + m2m
        return MomentSet(
            mu=mp - mm, mu_plus=mp, mu_minus=mm, beta=float(beta), delta=delta,
            mu_beta_plus=bp, mu_beta_minus=bm, mu_beta=bp + bm,
            mu_delta_plus=dp, mu_delta_minus=dm,
            mu2=mu2, mu2_plus=m2p, mu2_minus=m2m)

    # -- serialisation -------------------------------------------------------

    def to_dict(self) -> dict:
        d = {"family": self.family.value}
        if self.family is not Family.CUSTOM:
            d["drift_c"] = self.drift_c
        if self.family in (Family.PARETO_SHIFT, Family.CUSTOM):
            d["alpha"] = self.alpha
        if self.family is Family.PARETO_SHIFT:
            d["scale"] = self.scale
        if self.weibull_exponent is not None:
            d["weibull_exponent"] = self.weibull_exponent
        if self.log_exponent is not None:
            d["log_exponent"] = self.log_exponent
        if self.family is Family.CUSTOM:
            d["table_x"] = list(self.table_x)
            d["table_tail"] = list(self.table_tail)
        return d

    @classmethod
    def from_dict(cls, d) -> "DistributionSpec":
        d = dict(d)
        try:
            fam = Family(d.pop("family"))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"unknown or missing distribution family: {exc}") from None
        known = {"drift_c", "alpha", "scale", "weibull_exponent", "log_exponent",
                 "table_x", "table_tail"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown distribution keys: {sorted(extra)}")
        if "table_x" in d:
            d["table_x"] = tuple(d["table_x"])
            d["table_tail"] = tuple(d.get("table_tail", ()))
        return cls(family=fam, **d)

    def __eq__(self, other):
        if not isinstance(other, DistributionSpec):
            return NotImplemented
        return (self.to_dict() == other.to_dict()
                and self.slowly_varying is other.slowly_varying)

    def __hash__(self):
        return hash(repr(sorted(self.to_dict().items(), key=lambda kv: kv[0])))


def pareto_shift(alpha, c, scale=1.0, slowly_varying=None) -> DistributionSpec:
    """X = B - c with ``P(B > b) = L(b) (b / scale)^-alpha`` for b >= scale."""
    return DistributionSpec(Family.PARETO_SHIFT, drift_c=float(c), alpha=float(alpha),
                            scale=float(scale), slowly_varying=slowly_varying)


def weibull_shift(xi, c) -> DistributionSpec:
    """X = B - c with ``P(B > b) = exp(-b^xi)``."""
    return DistributionSpec(Family.WEIBULL_SHIFT, drift_c=float(c),
                            weibull_exponent=float(xi))


def lognormal_type_shift(xi, c) -> DistributionSpec:
    """X = B - c with ``P(B > b) = exp(-(log b)^xi)`` on b >= 1."""
    return DistributionSpec(Family.LOGNORMAL_TYPE_SHIFT, drift_c=float(c),
                            log_exponent=float(xi))


def custom_table(xs: Sequence[float], tails: Sequence[float], alpha: float) -> DistributionSpec:
    """Tabulated ``P(X > x)`` with a power-law continuation of index ``alpha``.

    The condition that X has no exponential moment cannot be checked from a
    table; it is recorded on the result as ``heavy_tail_assumed``.
    """
    return DistributionSpec(Family.CUSTOM, alpha=float(alpha),
                            table_x=tuple(xs), table_tail=tuple(tails))


def tail(spec: DistributionSpec, x):
    return spec.tail(x)


def hazard_q(spec: DistributionSpec, x):
    """-log P(X > x); raises ValueError where the tail vanishes."""
    q = spec.hazard_q(x)
    if np.any(~np.isfinite(q)):
        raise ValueError("tail is zero; hazard undefined")
    return q


def moments(spec: DistributionSpec, beta: float) -> MomentSet:
    return spec.moments(beta)


def sample(spec: DistributionSpec, rng_stream: np.random.Generator, size=None):
    return spec.sample(rng_stream, size)
