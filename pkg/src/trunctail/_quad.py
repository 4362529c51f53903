"""Thin wrapper over QUADPACK that turns silent failures into exceptions."""

import math
import warnings

from scipy import integrate

from .errors import QuadratureFailure

EPSABS = 1e-12
EPSREL = 1e-12


def integrate_pieces(func, breakpoints, epsabs=EPSABS, epsrel=EPSREL, limit=400,
                     max_abserr=None):
    """Integrate ``func`` over consecutive intervals of ``breakpoints``.

    The last breakpoint may be ``math.inf``. Breakpoints are sorted and
    de-duplicated; empty intervals are skipped. Raises
    :class:`QuadratureFailure` if QUADPACK reports a hard failure, or if the
    accumulated error estimate exceeds ``max_abserr`` (default: a thousand
    times the larger of ``epsabs`` and ``epsrel * |result|``).
    """
    pts = sorted(set(float(b) for b in breakpoints))
    total = 0.0
    err = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if not hi > lo:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, abserr, *info = integrate.quad(
                func, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit,
                full_output=1)
        # QUADPACK warnings (roundoff, subdivision limit) are judged by the
        # error estimate below rather than rejected outright.
        if not (math.isfinite(val) and math.isfinite(abserr)):
            msg = info[1] if len(info) > 1 else ""
            raise QuadratureFailure(
                f"quad failed on [{lo}, {hi}]: value={val}, abserr={abserr} {msg}")
        total += val
        err += abserr
    allowed = max_abserr
    if allowed is None:
        allowed = 1e3 * max(epsabs, epsrel * abs(total))
    if err > allowed:
        raise QuadratureFailure(
            f"quadrature error estimate {err:.3e} exceeds {allowed:.3e}")
    return total
