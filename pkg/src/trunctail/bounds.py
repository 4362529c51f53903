"""Explicit bounds on P(M(y) > x) for the truncated walk.

Two certificates are built from a :class:`~trunctail.dist.MomentSet`:

* :class:`Theorem1Certificate` for finite moments of order beta > 1, giving
  ``P(M(y) > x) <= y ** (-(beta - 1) x / y)`` above a threshold ``y_beta``;
* :class:`Theorem2Certificate` for tails with hazard ``q`` squeezed between
  ``(log y) ** (1 + kappa)`` and ``y ** (1 - kappa)``, giving
  ``(y P(X > y) / (eta |mu|)) ** (x / y)`` above ``y_eta_star``.

Thresholds can be astronomically large, so every certificate also keeps them
in log form, and every bound is evaluated in log space.
"""

from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np

from . import taylor
from .dist import DistributionSpec, MomentSet
from .errors import ConfigError, HypothesisViolation, NumericalFailure, ThresholdViolation

__all__ = [
    "Theorem1Certificate",
    "Theorem2Certificate",
    "theorem1_certificate",
    "theorem1_bound",
    "theorem1_bound_all_y",
    "theorem1_bound_sharper",
    "log_theorem1_bound",
    "theorem2_certificate",
    "theorem2_bound",
    "log_theorem2_bound",
    "find_y_kappa",
    "mgf_upper_bound_thm1",
    "mgf_upper_bound_thm2",
]

LOG_MAX = math.log(np.finfo(float).max)


def _exp(v):
    return math.exp(v) if v < LOG_MAX else math.inf


def _r15(v):
    if v is None or isinstance(v, (str, bool)):
        return v
    return float(f"{float(v):.15g}")


def _check_x(x):
    if not x >= 0:
        raise ValueError(f"x must be non-negative, got {x}")


# -- beta-moment bound ------------------------------------------------------


@dataclass(frozen=True)
class Theorem1Certificate:
    """Constants behind the bound y^{-(beta-1) x / y}, valid for y > y_beta."""

    beta: float
    delta: float
    mu: float
    K: float
    L: float
    C_max: float
    log_y_beta: float
    MG: float
    ME: float
    mu_delta_minus: float
    mu_delta_plus: float
    taylor_bounds: str = "exact"
    sharper_offset_xi: Optional[float] = None
    sharper_threshold: Optional[float] = None

    @property
    def y_beta(self) -> float:
        return _exp(self.log_y_beta)

    def rate(self, y):
        """s1(y) = (beta - 1) log(y) / y."""
        return (self.beta - 1.0) * math.log(y) / y

    def Q_of_y(self, y):
        """mu + K s1^{delta-1} + L / ((beta - 1) log y), the bracket of the MGF bound."""
        if not y > 1:
            raise ValueError("Q is defined for y > 1")
        s = self.rate(y)
        return self.mu + self.K * s ** (self.delta - 1.0) + self.L / ((self.beta - 1.0) * math.log(y))

    def certified(self, y) -> bool:
        return y > 1 and math.log(y) > self.log_y_beta

    def sharper_rate(self, y):
        """((beta - 1) log y + log log y + xi) / y."""
        if self.sharper_offset_xi is None:
            raise ConfigError("certificate has no sharper_offset_xi")
        return ((self.beta - 1.0) * math.log(y) + math.log(math.log(y))
                + self.sharper_offset_xi) / y

    def sharper_Q_of_y(self, y):
        """Bracket of the exact-remainder MGF bound at the sharper rate."""
        s = self.sharper_rate(y)
        return _thm1_bracket(self, y, s)

    def to_dict(self):
        d = {k: _r15(getattr(self, k)) for k in (
            "beta", "delta", "mu", "K", "L", "C_max", "log_y_beta", "MG", "ME",
            "mu_delta_minus", "mu_delta_plus", "taylor_bounds", "sharper_offset_xi",
            "sharper_threshold")}
        d["y_beta"] = _r15(self.y_beta)
        d["kind"] = "theorem1"
        return d


def _thm1_bracket(cert, y, s):
    """mu + K s^{delta-1} + (e^{sy} - 1 - sy) / (s y^beta) L, valid for every s > 0."""
    sy = s * y
    if sy < 1e-5:
        rem = sy * sy / 2.0 * (1.0 + sy / 3.0)
    else:
        rem = math.expm1(sy) - sy if sy < LOG_MAX else math.inf
    # rem / (s y^beta), in logs to survive large y
    tail_term = 0.0 if cert.L == 0 else _exp(math.log(rem) - math.log(s) - cert.beta * math.log(y)) * cert.L
    return cert.mu + cert.K * s ** (cert.delta - 1.0) + tail_term


def theorem1_certificate(moments: MomentSet, taylor_bounds: str = "exact",
                         sharper_offset_xi: Optional[float] = None,
                         sharper_threshold: Optional[float] = None) -> Theorem1Certificate:
    """Build the certificate from moments of order beta.

    ``taylor_bounds`` picks the Taylor constants in K: ``exact`` (Newton, the
    smallest threshold), ``closed`` or ``simple``. The sharper variant needs
    ``sharper_offset_xi`` with ``e^xi < (beta - 1)|mu| / mu_beta^+`` and a
    user-chosen ``sharper_threshold``; no closed formula for the latter is
    available, so that bound is only checked, not certified, above it.
    """
    beta, delta = moments.beta, moments.delta
    mg, me = taylor.select(delta, taylor_bounds)
    r_m, r_p = moments.mu_delta_minus, moments.mu_delta_plus
    K = r_m * mg + math.exp(beta) * me * r_p
    L = moments.mu_beta_plus
    absmu = -moments.mu
    if delta > 1:
        C_max = (delta / ((delta - 1.0) * math.e)) ** delta
        top = L + K * ((beta - 1.0) / (delta - 1.0) * delta / math.e) ** delta
    else:
        raise ConfigError("beta must exceed 1")
    log_y_beta = top / ((beta - 1.0) * absmu)
    if sharper_offset_xi is not None:
        if L > 0 and not math.exp(sharper_offset_xi) < (beta - 1.0) * absmu / L:
            raise HypothesisViolation(
                "sharper_offset_xi",
                f"e^xi = {math.exp(sharper_offset_xi):.6g} must be below "
                f"(beta-1)|mu|/mu_beta^+ = {(beta - 1.0) * absmu / L:.6g}")
        if sharper_threshold is None:
            raise ConfigError("the sharper bound needs an explicit sharper_threshold")
    return Theorem1Certificate(
        beta=beta, delta=delta, mu=moments.mu, K=K, L=L, C_max=C_max,
        log_y_beta=log_y_beta, MG=mg, ME=me, mu_delta_minus=r_m, mu_delta_plus=r_p,
        taylor_bounds=taylor_bounds, sharper_offset_xi=sharper_offset_xi,
        sharper_threshold=None if sharper_threshold is None else float(sharper_threshold))


def log_theorem1_bound(cert: Theorem1Certificate, x, y):
    _check_x(x)
    if not cert.certified(y):
        raise ThresholdViolation(
            f"y = {y:.6g} does not exceed y_beta = {cert.y_beta:.6g}; bound not certified")
    return -(cert.beta - 1.0) * x * math.log(y) / y


def theorem1_bound(cert: Theorem1Certificate, x, y):
    """y^{-(beta-1) x / y} for y > y_beta."""
    return math.exp(log_theorem1_bound(cert, x, y))


def theorem1_bound_all_y(cert: Theorem1Certificate, x, y):
    """(y / y_beta)^{-(beta-1) x / y}, clamped to 1; valid for all y > 0."""
    _check_x(x)
    if not y > 0:
        raise ValueError("y must be positive")
    v = -(cert.beta - 1.0) * x / y * (math.log(y) - cert.log_y_beta)
    return math.exp(min(v, 0.0))


def theorem1_bound_sharper(cert: Theorem1Certificate, x, y):
    """y^{-(beta-1)x/y} (log y)^{-x/y} e^{-xi x/y} above the user threshold.

    The caller-supplied threshold is not derived analytically; the function
    only refuses points where the bracket of the MGF bound is not negative.
    """
    _check_x(x)
    if cert.sharper_offset_xi is None or cert.sharper_threshold is None:
        raise ConfigError("certificate was built without the sharper-bound settings")
    if not (y > cert.sharper_threshold and y > math.e):
        raise ThresholdViolation(f"y = {y:.6g} is not above the sharper threshold "
                                 f"{cert.sharper_threshold:.6g}")
    if not cert.sharper_Q_of_y(y) < 0:
        raise ThresholdViolation(f"MGF bracket is non-negative at y = {y:.6g} for the sharper rate")
    return math.exp(-cert.sharper_rate(y) * x)


def mgf_upper_bound_thm1(moments: MomentSet, y, s=None, taylor_bounds="exact"):
    """Upper bound on E[e^{s min(X, y)}].

    At the rate ``s = s1(y)`` (the default) this is ``1 + s Q`` with Q the
    bracket of :meth:`Theorem1Certificate.Q_of_y`. For other ``s > 0`` the
    exact remainder ``(e^{sy} - 1 - sy) / (s y^beta)`` replaces its bound
    ``1 / ((beta - 1) log y)``.
    """
    if not y > 1:
        raise ValueError("the bound is stated for y > 1")
    cert = theorem1_certificate(moments, taylor_bounds)
    s1 = cert.rate(y)
    if s is None or math.isclose(s, s1, rel_tol=1e-13):
        return 1.0 + s1 * cert.Q_of_y(y)
    if not s > 0:
        raise ValueError("s must be positive")
    return 1.0 + s * _thm1_bracket(cert, y, s)


# -- hazard-rate bound ------------------------------------------------------


@dataclass(frozen=True)
class Theorem2Certificate:
    """Constants behind (y P(X>y) / (eta|mu|))^{x/y}, valid for y > y_eta_star."""

    eta: float
    kappa: float
    y_kappa: float
    mu: float
    mu2: float
    r: float
    log_y_sup: Optional[float]
    log_y_r: float
    log_y_eta_star: float
    spec: DistributionSpec = field(repr=False, compare=False)

    @property
    def y_r(self):
        return _exp(self.log_y_r)

    @property
    def y_eta_star(self):
        return _exp(self.log_y_eta_star)

    def rate(self, y):
        """s2(y) = (q(y) - log y + r) / y."""
        return (float(self.spec.hazard_q(y)) - math.log(y) + self.r) / y

    def Q_of_y(self, y):
        """mu + s (e/2) mu2 + max{y e^{1 - q(1/s)}, e^r} at s = s2(y)."""
        s = self.rate(y)
        if not s > 0:
            raise ValueError(f"rate s2({y}) = {s} is not positive")
        big = max(math.log(y) + 1.0 - float(self.spec.hazard_q(1.0 / s)), self.r)
        return self.mu + s * math.e / 2.0 * self.mu2 + _exp(big)

    def certified(self, y) -> bool:
        return y > 1 and math.log(y) > self.log_y_eta_star

    def to_dict(self):
        d = {k: _r15(getattr(self, k)) for k in (
            "eta", "kappa", "y_kappa", "mu", "mu2", "r", "log_y_sup", "log_y_r",
            "log_y_eta_star")}
        d["y_r"] = _r15(self.y_r)
        d["y_eta_star"] = _r15(self.y_eta_star)
        d["kind"] = "theorem2"
        return d


def _q_bounds_hold(spec, ys, kappa):
    ly = np.log(ys)
    q = spec.hazard_q(ys)
    lower = q >= ly ** (1.0 + kappa) * (1 - 1e-12)
    upper = q <= np.exp((1.0 - kappa) * ly) * (1 + 1e-12)
    return lower, upper


def find_y_kappa(spec: DistributionSpec, kappa: float, y_max: float = 1e300,
                 n_grid: int = 20001) -> float:
    """Smallest y >= 1 (to grid resolution, refined by bisection) from which
    ``(log y)^{1+kappa} <= q(y) <= y^{1-kappa}`` holds on a grid up to ``y_max``."""
    ys = np.geomspace(1.0, y_max, n_grid)
    lower, upper = _q_bounds_hold(spec, ys, kappa)
    ok = lower & upper
    if not ok[-1]:
        raise HypothesisViolation("q_bounds", f"hazard bounds fail at y = {ys[-1]:.3g}")
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        return 1.0
    lo, hi = ys[bad[-1]], ys[bad[-1] + 1]
    for _ in range(100):
        mid = math.sqrt(lo * hi)
        lw, up = _q_bounds_hold(spec, np.array([mid]), kappa)
        if lw[0] and up[0]:
            hi = mid
        else:
            lo = mid
    return float(hi)


def _check_theorem2_hypotheses(spec, moments, eta, kappa, y_kappa, n_grid=4001):
    if moments.mu2 is None:
        raise HypothesisViolation("mu2_finite", "the second moment of X is infinite")
    if not 0 < eta < 1:
        raise HypothesisViolation("eta_range", f"eta must lie in (0, 1), got {eta}")
    if not 0 < kappa < 1:
        raise HypothesisViolation("kappa_range", f"kappa must lie in (0, 1), got {kappa}")
    if not y_kappa >= 1:
        raise HypothesisViolation("y_kappa_range", f"y_kappa must be at least 1, got {y_kappa}")
    ys = np.geomspace(y_kappa, 1e300, n_grid)
    lower, upper = _q_bounds_hold(spec, ys, kappa)
    if not lower.all():
        y = ys[np.argmin(lower)]
        raise HypothesisViolation("q_lower", f"q(y) < (log y)^(1+kappa) at y = {y:.6g}")
    if not upper.all():
        y = ys[np.argmin(upper)]
        raise HypothesisViolation("q_upper", f"q(y) > y^(1-kappa) at y = {y:.6g}")
    # concavity: second differences of q against log-spaced points
    x0 = spec.concave_from
    if x0 is None or x0 > y_kappa ** kappa:
        zs = np.geomspace(max(y_kappa ** kappa, 1e-3), 1e12, n_grid)
        q = spec.hazard_q(zs)
        dq = np.diff(q) / np.diff(zs)
        if np.any(np.diff(dq) > 1e-9 * np.maximum(1.0, np.abs(dq[:-1]))):
            i = int(np.argmax(np.diff(dq)))
            raise HypothesisViolation("q_concave", f"q is not concave near y = {zs[i + 1]:.6g}")


def _log_sup_clause(kappa, r):
    """log of sup{y >= 1: y exp(-(kappa ln y)^{kappa+1}) >= e^{r-1}}, or None if empty.

    In t = ln y the condition reads h(t) = t - (kappa t)^{kappa+1} >= r - 1
    with h concave; the sup is the root on the decreasing branch.
    """
    target = r - 1.0

    def h(t):
        return t - (kappa * t) ** (kappa + 1.0)

    t_peak = (1.0 / (kappa ** (kappa + 1.0) * (kappa + 1.0))) ** (1.0 / kappa)
    if h(t_peak) < target:
        return None
    lo, hi = t_peak, 2.0 * t_peak + 1.0
    while h(hi) >= target:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if h(mid) >= target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return lo


def theorem2_certificate(spec: DistributionSpec, moments: MomentSet, eta: float,
                         kappa: float, y_kappa: Optional[float] = None) -> Theorem2Certificate:
    """Certificate for the hazard-based bound; ``y_kappa`` is searched if omitted.

    Raises :class:`HypothesisViolation` naming the failing clause.
    """
    if y_kappa is None:
        y_kappa = find_y_kappa(spec, kappa)
    _check_theorem2_hypotheses(spec, moments, eta, kappa, y_kappa)
    absmu = -moments.mu
    r = math.log(eta * absmu)
    t_sup = _log_sup_clause(kappa, r)
    parts = [r, math.log(y_kappa) / kappa]
    if t_sup is not None:
        parts.append(t_sup)
    log_y_r = max(parts)
    log_second = math.log(math.e * moments.mu2 / 2.0 / (absmu * (1.0 - eta))) / kappa
    return Theorem2Certificate(
        eta=eta, kappa=kappa, y_kappa=float(y_kappa), mu=moments.mu, mu2=moments.mu2,
        r=r, log_y_sup=t_sup, log_y_r=log_y_r, log_y_eta_star=max(log_y_r, log_second),
        spec=spec)


def log_theorem2_bound(cert: Theorem2Certificate, spec: DistributionSpec, x, y):
    _check_x(x)
    if not cert.certified(y):
        raise ThresholdViolation(
            f"y = {y:.6g} does not exceed y_eta_star = {cert.y_eta_star:.6g}; bound not certified")
    direct = x / y * (math.log(y) + float(spec.log_tail(y)) - math.log(cert.eta * -cert.mu))
    via_rate = -cert.rate(y) * x
    if not math.isclose(direct, via_rate, rel_tol=1e-12, abs_tol=1e-300):
        raise NumericalFailure(f"bound forms disagree: {direct!r} vs {via_rate!r}")
    return direct


def theorem2_bound(cert: Theorem2Certificate, spec: DistributionSpec, x, y):
    """(y P(X > y) / (eta |mu|))^{x / y} for y > y_eta_star."""
    return math.exp(log_theorem2_bound(cert, spec, x, y))


def mgf_upper_bound_thm2(spec: DistributionSpec, moments: MomentSet, y, s):
    """1 + s (mu + s (e/2) mu2 + y max{e^{1 - q(1/s)}, e^{sy - q(y)}}), for s > 0, y > 1/s."""
    if not s > 0:
        raise ValueError("s must be positive")
    if not y > 1.0 / s:
        raise ValueError("the bound needs y > 1/s")
    if moments.mu2 is None:
        raise HypothesisViolation("mu2_finite", "the second moment of X is infinite")
    big = math.log(y) + max(1.0 - float(spec.hazard_q(1.0 / s)),
                            s * y - float(spec.hazard_q(y)))
    return 1.0 + s * (moments.mu + s * math.e / 2.0 * moments.mu2 + _exp(big))
