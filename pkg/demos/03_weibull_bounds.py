"""Supremum tail for a Weibull-type walk.

X = B - 7 with P(B > b) = exp(-sqrt(b)), so E[X] = -5. The hazard exponent
q(x) = -log P(X > x) grows like sqrt(x). The hazard-rate bound
(y P(X > y) / (eta |mu|))^{x/y} uses q directly, and its rate s2(y) ends up
within a few percent of gamma(y).

Run with ``python demos/03_weibull_bounds.py`` (under ten seconds).
"""

import math

import numpy as np

from trunctail import (TruncatedWalkModel, cl_bound, estimate_sup_tail_grid, theorem2_bound,
                       theorem2_certificate, weibull_shift)

spec = weibull_shift(0.5, 7.0)
moments = spec.moments(2.0)
print(f"mean {moments.mu:.3f}, second moment {moments.mu2:.3f}")

# The certificate checks the hazard hypotheses numerically (y_kappa, the
# sandwich (log y)^{1+kappa} <= q(y) <= y^{1-kappa}, concavity of q) and
# returns the threshold y_eta_star in log space.
cert = theorem2_certificate(spec, moments, eta=0.5, kappa=0.49)
print(f"r = {cert.r:.4f}  y_kappa = {cert.y_kappa:.4g}  y_eta* = {cert.y_eta_star:.6g}")

# Above y_eta_star the rate s2(y) = (q(y) - log y + r) / y is certified, and
# gamma/s2 tends to 1.
print("\n        y      gamma(y)       s2(y)   gamma/s2")
for y in np.geomspace(1.05 * cert.y_eta_star, 1e6, 6):
    m = TruncatedWalkModel(spec, y)
    s2 = cert.rate(y)
    print(f"{y:9.0f}  {m.gamma:.5e}  {s2:.5e}  {m.gamma / s2:7.3f}")

# Simulation at y = 2 y_eta_star. The exponential rate is small here, so the
# drawdown barrier is long (thousands of steps per path).
y = 2.0 * cert.y_eta_star
model = TruncatedWalkModel(spec, y)
xs = [0, 100, 200, 400]
ests = estimate_sup_tail_grid(model, xs, 200000, eps=1e-8, seed=7)
print(f"\ny = {y:.0f}: gamma = {model.gamma:.4e}, barrier B = {ests[0].barrier_B:g}")
print("   x      p_hat     std_err    CL bound   hazard bound")
for x, e in zip(xs, ests):
    print(f"{x:4d}  {e.p_hat:.3e}  {e.std_err:.2e}  {cl_bound(model, x):.3e}  "
          f"{theorem2_bound(cert, spec, x, y):.3e}")

# The true tail decays much faster than either bound at this y: M(y) > x needs
# a few large claims, each of which costs about exp(-sqrt(size)).
print("\nP(X > 100) =", float(spec.tail(100.0)), " exp(-sqrt(107)) =", math.exp(-math.sqrt(107)))
