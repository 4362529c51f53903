"""Extremal constants of first-order Taylor remainders of the exponential.

``ME(delta) = max_{s >= 0} (1 - (1 + s) e^{-s}) / s^delta`` on [0, 2] and
``MG(delta) = max_{u >= 0} (e^{-u} - 1 + u) / u^delta`` on [1, 2], together
with their closed-form majorants ``UE``, ``UG`` and the simple bounds
``1 / (1 + delta / 2)`` and ``1 / delta``.
"""

import csv
from dataclasses import dataclass
import math
from typing import Optional

from scipy.special import xlogy

from .errors import ConvergenceError

MAX_NEWTON = 100
EPS = 2.220446049250313e-16


def _series(x, sign, weight, terms=30):
    total = 0.0
    term = x * x / 2.0
    for k in range(2, terms):
        total += sign ** k * weight(k) * term
        term *= x / (k + 1)
    return total


def exp_remainder(s):
    """e^s - 1 - s without cancellation near 0."""
    if abs(s) < 0.5:
        return _series(s, 1.0, lambda k: 1.0)
    return math.expm1(s) - s


def e_numerator(s):
    """1 - (1 + s) e^{-s}."""
    if s < 0.5:
        return _series(s, -1.0, lambda k: k - 1.0)
    return -math.expm1(-s) - s * math.exp(-s)


def g_numerator(u):
    """e^{-u} - 1 + u."""
    return exp_remainder(-u)


def e_objective(delta, s):
    """E_delta(s), the function maximised by ME."""
    if s == 0.0:
        return 0.5 if delta == 2 else (0.0 if delta < 2 else math.inf)
    return e_numerator(s) / s ** delta


def g_objective(delta, u):
    """G_delta(u), the function maximised by MG."""
    if u == 0.0:
        return 0.5 if delta == 2 else (0.0 if delta < 2 else math.inf)
    return g_numerator(u) / u ** delta


def me_stationarity(delta, s):
    """Residual of the stationarity equation e^s = 1 + s + s^2 / delta."""
    return exp_remainder(s) - s * s / delta


def mg_stationarity(delta, u):
    """Residual of e^{-u} = 1 - delta u / (u + delta).

    Written as e^{-u} - 1 + delta u / (u + delta), whose terms stay O(1)
    even when u* is large (delta close to 1).
    """
    return math.exp(-u) - 1.0 + delta * u / (u + delta)


def log_me_rhs(delta, s):
    """log(1 + s + s^2 / delta), finite even for subnormal delta."""
    if s < 1.0:
        return math.log1p(s + s * s / delta)
    return 2.0 * math.log(s) - math.log(delta) + math.log1p(delta * (1.0 + s) / (s * s))


def _newton(func, deriv, x0, what, scale=lambda x: max(1.0, x)):
    """Newton iteration stopped at evaluation noise ``16 eps scale(x)``."""
    x = x0
    for it in range(1, MAX_NEWTON + 1):
        f = func(x)
        if abs(f) <= 16.0 * EPS * scale(x):
            return x, it
        x_new = x - f / deriv(x)
        if not x_new > 0:
            # never jump onto the trivial root at 0
            x_new = 0.5 * x
        if abs(x_new - x) <= 4.0 * EPS * x_new:
            return x_new, it
        x = x_new
    raise ConvergenceError(f"Newton for {what} did not converge in {MAX_NEWTON} iterations")


def me_start(delta):
    # ln(2/delta) split so that 2/delta cannot overflow for subnormal delta
    return math.log(2.0) - math.log(delta) + (2.0 - delta)


def mg_start(delta):
    return (2.0 - delta) * delta / (delta - 1.0) - math.log(delta - 1.0)


def solve_me(delta):
    """Return (ME, s*, iterations); s* is None at the endpoints."""
    if not 0.0 <= delta <= 2.0:
        raise ValueError(f"ME is defined for delta in [0, 2], got {delta}")
    if delta == 0.0:
        return 1.0, None, 0
    if delta == 2.0:
        return 0.5, None, 0
    # Newton on the log form s = log(1 + s + s^2/delta): same root, and the
    # iteration stays stable where e^s - 1 - s - s^2/delta is nearly flat.
    s, it = _newton(lambda s: s - log_me_rhs(delta, s),
                    lambda s: 1.0 - (delta + 2.0 * s) / (delta + delta * s + s * s),
                    me_start(delta), f"ME({delta})")
    return e_objective(delta, s), s, it


def solve_mg(delta):
    """Return (MG, u*, iterations); u* is None at the endpoints."""
    if not 1.0 <= delta <= 2.0:
        raise ValueError(f"MG is defined for delta in [1, 2], got {delta}")
    if delta == 1.0:
        return 1.0, None, 0
    if delta == 2.0:
        return 0.5, None, 0
    u, it = _newton(lambda u: mg_stationarity(delta, u),
                    lambda u: (delta / (u + delta)) ** 2 - math.exp(-u),
                    mg_start(delta), f"MG({delta})", scale=lambda u: 1.0)
    return g_objective(delta, u), u, it


def me_delta(delta):
    return solve_me(delta)[0]


def mg_delta(delta):
    return solve_mg(delta)[0]


def ue_delta(delta):
    """(2 - delta)^(2 - delta) / (4 - delta), with 0^0 = 1."""
    if not 0.0 <= delta <= 2.0:
        raise ValueError(f"UE is defined for delta in [0, 2], got {delta}")
    return (2.0 - delta) ** (2.0 - delta) / (4.0 - delta)


def ug_delta(delta):
    """((delta - 1) / delta)^(delta - 1) (2 - delta)^(2 - delta), with 0^0 = 1."""
    if not 1.0 <= delta <= 2.0:
        raise ValueError(f"UG is defined for delta in [1, 2], got {delta}")
    return ((delta - 1.0) / delta) ** (delta - 1.0) * (2.0 - delta) ** (2.0 - delta)


def simple_e(delta):
    return 1.0 / (1.0 + 0.5 * delta)


def simple_g(delta):
    return 1.0 / delta


def f_e(delta):
    """log(UE / simple_E); non-positive on [0, 2]."""
    return (math.log1p(0.5 * delta) + float(xlogy(2.0 - delta, 2.0 - delta))
            - math.log(4.0 - delta))


def f_g(delta):
    """log(UG / simple_G); non-positive on [1, 2]."""
    return (float(xlogy(2.0 - delta, delta)) + float(xlogy(delta - 1.0, delta - 1.0))
            + float(xlogy(2.0 - delta, 2.0 - delta)))


@dataclass(frozen=True)
class TaylorConstants:
    delta: float
    ME: float
    UE: float
    simple_E: float
    s_star: Optional[float]
    MG: Optional[float] = None
    UG: Optional[float] = None
    simple_G: Optional[float] = None
    u_star: Optional[float] = None
    newton_iterations: int = 0

    @property
    def me_residual(self):
        """|1 - (1 + s* + s*^2/delta) e^{-s*}|, the stationarity residual scaled by e^{-s*}."""
        if self.s_star is None:
            return 0.0
        return abs(math.expm1(log_me_rhs(self.delta, self.s_star) - self.s_star))

    @property
    def mg_residual(self):
        if self.u_star is None:
            return 0.0
        return abs(mg_stationarity(self.delta, self.u_star))


def taylor_constants(delta) -> TaylorConstants:
    """All constants at ``delta``; the MG family is filled in on [1, 2] only."""
    me, s, it_e = solve_me(delta)
    mg = ug = sg = u = None
    it_g = 0
    if 1.0 <= delta <= 2.0:
        mg, u, it_g = solve_mg(delta)
        ug, sg = ug_delta(delta), simple_g(delta)
    return TaylorConstants(delta=delta, ME=me, UE=ue_delta(delta), simple_E=simple_e(delta),
                           s_star=s, MG=mg, UG=ug, simple_G=sg, u_star=u,
                           newton_iterations=max(it_e, it_g))


def select(delta, mode="exact"):
    """(MG, ME) used in the bound constant K, by ``mode``.

    ``exact`` uses the Newton values, ``closed`` the majorants UG/UE and
    ``simple`` the bounds 1/delta and 1/(1 + delta/2).
    """
    if mode == "exact":
        return mg_delta(delta), me_delta(delta)
    if mode == "closed":
        return ug_delta(delta), ue_delta(delta)
    if mode == "simple":
        return simple_g(delta), simple_e(delta)
    raise ValueError(f"unknown taylor bound mode {mode!r}")


FIGURE1_HEADER = ("delta", "ME", "UE", "simple_E")
FIGURE2_HEADER = ("delta", "MG", "UG", "simple_G")


def figure_tables(delta_grid):
    """Rows behind the two constant plots.

    Returns ``(rows_e, rows_g)``: every grid point contributes to the first
    table, and points inside [1, 2] to the second.
    """
    rows_e, rows_g = [], []
    for d in delta_grid:
        d = float(d)
        if not 0.0 <= d <= 2.0:
            raise ValueError(f"delta {d} outside [0, 2]")
        tc = taylor_constants(d)
        rows_e.append((d, tc.ME, tc.UE, tc.simple_E))
        if tc.MG is not None:
            rows_g.append((d, tc.MG, tc.UG, tc.simple_G))
    return rows_e, rows_g


def write_table(fh, header, rows, digits=12):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.{digits}g}" for v in row])
