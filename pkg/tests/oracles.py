"""Independent reference computations used by the tests.

None of these share code paths with the library: Taylor maxima come from
grid search plus golden-section refinement, MGFs from mpmath tanh-sinh
quadrature of the density form, supremum tails from a lattice dynamic
program, and finite-horizon ruin from explicit claim matrices.
"""

import math

import mpmath as mp
import numpy as np
from scipy import integrate, optimize, signal, stats


# -- Taylor maxima -------------------------------------------------------------


def _e_obj(delta, s):
    s = np.asarray(s, dtype=float)
    return (1.0 - (1.0 + s) * np.exp(-s)) / s ** delta


def _g_obj(delta, u):
    u = np.asarray(u, dtype=float)
    return (np.exp(-u) - 1.0 + u) / u ** delta


def brute_max(obj, delta, lo=1e-3, hi=1e6, n=200001):
    """Coarse geometric grid on [lo, hi], then golden-section refinement around the best point.

    The geometric grid matters for MG near delta = 1, where the maximiser runs off to
    large u.
    """
    grid = np.geomspace(lo, hi, n)
    vals = obj(delta, grid)
    i = int(np.nanargmax(vals))
    if i == 0 or i == grid.size - 1:
        raise ValueError(f"maximum at the grid edge for delta={delta}")
    res = optimize.minimize_scalar(lambda t: -float(obj(delta, t)),
                                   bracket=(grid[i - 1], grid[i], grid[i + 1]),
                                   method="golden", tol=1e-12)
    return max(-res.fun, float(vals[i]))


def brute_me(delta, **kw):
    return brute_max(_e_obj, delta, **kw)


def brute_mg(delta, **kw):
    return brute_max(_g_obj, delta, **kw)


def fine_grid_max(obj, delta, hi=100.0, step=1e-5):
    """Plain grid search at a fine step, in chunks to bound memory."""
    best = -math.inf
    edges = np.arange(0.0, hi, 10.0)
    for a in edges:
        g = np.arange(max(a, step), min(a + 10.0, hi) + step / 2, step)
        best = max(best, float(np.max(obj(delta, g))))
    return best


# -- MGF and gamma with mpmath ------------------------------------------------------


def pareto_density_mgf(alpha, c, y, s, scale=1.0, dps=30):
    """E[exp(s min(X, y))] for X = B - c, B Pareto(alpha) on (scale, inf),
    from the density form  int_{a}^{y} e^{sx} f(x) dx + e^{sy} P(X > y)."""
    with mp.workdps(dps):
        alpha, c, y, s, scale = (mp.mpf(v) for v in (alpha, c, y, s, scale))
        a = scale - c

        def f(x):
            return mp.e ** (s * x) * alpha * scale ** alpha * (x + c) ** (-alpha - 1)

        pts = [a] + [p for p in (0, a + 1, a + 10) if a < p < y] + [y]
        body = mp.quad(f, pts)
        atom = mp.e ** (s * y) * (scale / (y + c)) ** alpha
        return body + atom


def weibull_density_mgf(xi, c, y, s, dps=30):
    """Same for X = B - c with P(B > b) = exp(-b^xi).

    Written in v = B^xi, which is standard exponential, so the integrand
    has no singularity at B = 0.
    """
    with mp.workdps(dps):
        xi, c, y, s = (mp.mpf(v) for v in (xi, c, y, s))
        v_max = (y + c) ** xi

        def f(v):
            return mp.e ** (s * (v ** (1 / xi) - c) - v)

        pts = [mp.mpf(0)] + [p for p in (1, 4, 16, 64) if p < v_max] + [v_max]
        body = mp.quad(f, pts)
        atom = mp.e ** (s * y - v_max)
        return body + atom


def bisect_gamma(mgf, lo, hi, tol=1e-13):
    """Root of mgf(s) = 1 on (lo, hi) with mgf(lo) < 1 < mgf(hi), by plain bisection."""
    assert mgf(lo) < 1 < mgf(hi)
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if mgf(mid) > 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def pareto_moment_mp(alpha, c, p, part, scale=1.0):
    """E[(X^+)^p] (part='+') or E[((-X)^+)^p] (part='-') by mpmath quadrature of the density."""
    with mp.workdps(30):
        alpha, c, p, scale = (mp.mpf(v) for v in (alpha, c, p, scale))
        a = scale - c

        def f(x):
            return alpha * scale ** alpha * (x + c) ** (-alpha - 1)

        if part == "+":
            # t = 1 / (x + c) maps (lo, inf) onto (0, 1 / (lo + c)]; the integrand then has
            # only an integrable power singularity at t = 0
            lo = max(a, mp.mpf(0))
            return mp.quad(lambda t: (1 / t - c) ** p * f(1 / t - c) / t ** 2,
                           [0, 1 / (lo + c)])
        if a >= 0:
            return mp.mpf(0)
        return mp.quad(lambda x: (-x) ** p * f(x), [a, 0])


# -- lattice dynamic program for P(M(y) > x) -------------------------------------


def lattice_sup_tail(cdf, lo, y, x_levels, h=0.005, u_max=None, tol=1e-13, max_iter=200000):
    """Lower and upper bounds on P(M(y) > x) for Z = min(X, y).

    ``cdf`` is the CDF of X with support bounded below by ``lo``. Rounding Z
    down (up) to the lattice hZ gives walks whose supremum is stochastically
    smaller (larger). For each, psi(u) = P(sup > u) is the minimal fixed point
    of psi(u) = E[psi(u - Z)], psi = 1 on u < 0, reached by iterating from 0;
    levels beyond ``u_max`` are set to 0, which only lowers the lower bound
    and is negligible for the upper one when u_max is far in the tail.
    """
    if u_max is None:
        u_max = 3 * max(x_levels) + 20 * y
    k_lo = int(math.floor(lo / h))
    k_hi = int(math.ceil(y / h))
    edges = np.arange(k_lo, k_hi + 1) * h
    cdf_vals = np.clip(np.asarray([cdf(min(e, y - 1e-15)) for e in edges]), 0, 1)
    cdf_vals[-1] = 1.0
    # mass of Z in (edges[i], edges[i+1]]
    cell = np.diff(np.concatenate([[0.0], cdf_vals]))
    # round down: mass of (e_i, e_{i+1}] moves to e_i; round up: to e_{i+1}
    p_down = np.zeros(edges.size)
    p_up = np.zeros(edges.size)
    p_down[0] = cell[0]
    p_up[0] = cell[0]
    p_down[:-1] += cell[1:]
    p_up[1:] += cell[1:]
    n_u = int(math.ceil(u_max / h)) + 1
    out = []
    for p in (p_down, p_up):
        out.append(_solve_psi(p, k_lo, n_u, tol, max_iter))
    res = []
    for x in x_levels:
        # both walks live on hZ, so M > x iff M reaches the next lattice point above x
        j = min(int(math.floor(x / h)) + 1, n_u - 1)
        res.append((float(out[0][j]), float(out[1][j])))
    return res


def _solve_psi(p, k_lo, n_u, tol, max_iter):
    # psi(j) = P(sup >= j h) solves psi(j) = sum_i p_i psi(j - z_i) for j >= 1 with
    # psi(j) = 1 for j <= 0, where z_i = k_lo + i is the i-th increment in lattice units
    m = p.size
    z_max = k_lo + m - 1
    psi = np.zeros(n_u)
    psi[0] = 1.0
    for _ in range(max_iter):
        # ext[t] = psi(t - z_max) for t in [0, n_u + m - 1)
        ext = np.concatenate([np.ones(max(z_max, 0)), psi, np.zeros(max(-k_lo, 0))])
        conv = signal.fftconvolve(ext, p, mode="valid")
        # conv[t] = sum_i p_i ext[t + m - 1 - i] = sum_i p_i psi(t + m - 1 - i - z_max)
        #         = sum_i p_i psi(t - z_i) with the shift chosen so that conv[j] pairs with psi(j)
        new = np.clip(conv[:n_u], 0.0, 1.0)
        new[0] = 1.0
        if np.max(np.abs(new - psi)) <= tol:
            return new
        psi = new
    raise RuntimeError("lattice iteration did not converge")


# -- finite-horizon ruin with claim matrices ---------------------------------------


def finite_horizon_claim_matrix(alpha, scale, a, T, x, n_paths, seed, chunk=20000):
    """P_{a,T}(x) from explicit (paths x steps) claim matrices drawn with scipy.stats."""
    n_steps = int(math.floor(T * x))
    rng = np.random.default_rng(seed)
    wins = 0
    done = 0
    while done < n_paths:
        m = min(chunk, n_paths - done)
        claims = stats.pareto.rvs(alpha, scale=scale, size=(m, n_steps), random_state=rng)
        ok = claims.max(axis=1) < a * x
        hit = np.cumsum(claims - 1.0, axis=1).max(axis=1) >= x
        wins += int(np.count_nonzero(ok & hit))
        done += m
    return wins / n_paths


def constant_c_k1_quadrature(alpha, a, T):
    """k = 1 value of C by 2-d quadrature over (u, x) of alpha x^{-1-alpha} I(x - u >= 1, x <= a)."""
    val, _ = integrate.dblquad(lambda x, u: alpha * x ** (-1.0 - alpha),
                               0.0, T, lambda u: min(1.0 + u, a), lambda u: a,
                               epsabs=1e-13, epsrel=1e-12)
    return val


def dense_indicator(xs, us, T, drift=1.0, step_frac=1e-3):
    """sup over a dense time grid (plus each row's jump times) of
    sum_i x_i I(u_i <= t) - drift t, compared with 1."""
    grid = np.arange(0.0, T + 1e-12, step_frac * T)
    out = np.empty(xs.shape[0], dtype=bool)
    for r in range(xs.shape[0]):
        ts = np.concatenate([grid, us[r]])
        level = (us[r][None, :] <= ts[:, None]) @ xs[r] - drift * ts
        out[r] = np.any(level >= 1.0)
    return out
