"""Truncated-increment MGF and the Cramér–Lundberg rate gamma(y).

For Z = min(X, y) with support infimum ``a`` the MGF is written in tail form,

    E[e^{sZ}] = e^{sa} + int_a^y s e^{sx} P(X > x) dx,

which absorbs the atom of Z at ``y`` exactly and never integrates across it.
"""

from dataclasses import dataclass
from functools import cached_property
import math

from ._quad import integrate_pieces
from .dist import DistributionSpec
from .errors import ConfigError, ConvergenceError, NoPositiveRoot

# exponents above this are treated as overflow
LOG_OVERFLOW = 700.0
MGF_TOL = 1e-10


def _breakpoints(spec: DistributionSpec, y: float, s: float):
    a = spec.support_inf
    pts = [a, y]
    if a < 0.0 < y:
        pts.append(0.0)
    if spec.family.value == "custom":
        pts += list(spec.table_x)
    pts += spec._tail_breaks()
    # geometric points towards y, and a few e-folds of e^{sx} below it
    lo = max(a, 1.0)
    v = y
    while v / 4.0 > lo:
        v /= 4.0
        pts.append(v)
    if s > 0:
        pts += [y - j / s for j in (1.0, 4.0, 16.0, 64.0)]
    return [p for p in pts if a <= p <= y]


@dataclass(frozen=True)
class TruncatedWalkModel:
    """The walk with increments ``min(X_i, y)`` for X_i distributed as ``spec``."""

    spec: DistributionSpec
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ConfigError(f"truncation level must be positive, got {self.y}")
        object.__setattr__(self, "y", float(self.y))
        if self.spec.support_inf >= self.y:
            raise ConfigError("truncation level lies below the support of X")
        if not self.truncated_mean < 0:
            raise ConfigError(
                f"E[min(X, y)] = {self.truncated_mean} is not negative at y = {self.y}")

    @cached_property
    def truncated_mean(self) -> float:
        """E[min(X, y)] = a + int_a^y P(X > x) dx."""
        a = self.spec.support_inf
        lt = self.spec.log_tail_scalar
        return a + integrate_pieces(lambda x: math.exp(lt(x)), _breakpoints(self.spec, self.y, 0.0))

    @property
    def atom(self) -> float:
        """Mass of min(X, y) at y."""
        return float(self.spec.tail(self.y))

    def mgf_minus_one(self, s: float) -> float:
        """E[e^{s min(X, y)}] - 1, accurate near s = 0; inf on overflow."""
        if s < 0:
            raise ValueError("the truncated MGF is evaluated for s >= 0 only")
        if s == 0:
            return 0.0
        y = self.y
        lt = self.spec.log_tail_scalar
        if s * y + lt(y) > LOG_OVERFLOW:
            return math.inf
        a = self.spec.support_inf
        body = integrate_pieces(lambda x: s * math.exp(s * x + lt(x)),
                                _breakpoints(self.spec, y, s), epsabs=1e-14)
        return math.expm1(s * a) + body

    def mgf_derivative(self, s: float) -> float:
        """d/ds E[e^{s min(X, y)}] = a e^{sa} + int_a^y (1 + sx) e^{sx} P(X > x) dx."""
        y = self.y
        lt = self.spec.log_tail_scalar
        if s * y + lt(y) > LOG_OVERFLOW:
            return math.inf
        a = self.spec.support_inf
        body = integrate_pieces(lambda x: (1.0 + s * x) * math.exp(s * x + lt(x)),
                                _breakpoints(self.spec, y, s), epsabs=1e-14)
        return a * math.exp(s * a) + body

    def mgf(self, s: float) -> float:
        return 1.0 + self.mgf_minus_one(s)

    @cached_property
    def gamma(self) -> float:
        """gamma(y), solved once and cached."""
        return _solve_gamma(self)


def _solve_gamma(model: TruncatedWalkModel) -> float:
    if model.spec.tail(0.0) == 0.0:
        raise NoPositiveRoot("min(X, y) has no positive part; the MGF never returns to 1")
    f = model.mgf_minus_one
    s = 1.0 / model.y
    fs = f(s)
    if fs > 0:
        hi, lo = s, s / 2.0
        for _ in range(1100):
            if f(lo) < 0:
                break
            hi, lo = lo, lo / 2.0
        else:
            raise NoPositiveRoot("could not find s > 0 with E[e^{sZ}] < 1")
    else:
        lo, hi = s, 2.0 * s
        for _ in range(200):
            if f(hi) > 0:
                break
            lo, hi = hi, 2.0 * hi
        else:
            raise NoPositiveRoot(
                f"E[e^(sZ)] <= 1 for all probed s up to {hi:.3g}; no positive root")
    while hi - lo > 1e-8 * hi:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    # Newton from the right of the root: convexity keeps iterates above it,
    # and any step leaving the bracket falls back to bisection
    s = hi
    for _ in range(60):
        fs = f(s)
        if abs(fs) <= 1e-14:
            break
        if fs > 0:
            hi = s
        else:
            lo = s
        d = model.mgf_derivative(s) if math.isfinite(fs) else math.inf
        s_new = s - fs / d if math.isfinite(d) and d > 0 else math.nan
        if not lo <= s_new <= hi:
            s_new = 0.5 * (lo + hi)
        if abs(s_new - s) <= 4e-16 * s:
            s = s_new
            break
        s = s_new
    res = f(s)
    if not abs(res) <= MGF_TOL:
        raise ConvergenceError(f"Newton polish stalled with residual {res:.3e}")
    return s


def truncated_mgf(model: TruncatedWalkModel, s: float) -> float:
    """E[exp(s min(X1, y))]."""
    return model.mgf(s)


def gamma(model: TruncatedWalkModel) -> float:
    """The positive root of E[exp(s min(X1, y))] = 1."""
    return model.gamma


def cl_bound(model: TruncatedWalkModel, x: float) -> float:
    """Cramér–Lundberg bound exp(-gamma(y) x) on P(M(y) > x)."""
    if x < 0:
        raise ValueError("the bound is stated for x >= 0")
    return math.exp(-model.gamma * x)


def log_cl_bound(model: TruncatedWalkModel, x: float) -> float:
    return -model.gamma * x
