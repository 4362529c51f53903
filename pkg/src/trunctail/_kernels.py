"""Compiled inner loops: inverse-CDF sampling and walk simulation.

Everything here works on plain floats and arrays; the Python modules own the
validation and the bookkeeping.
"""

import math

import numpy as np
from numba import njit

PARETO = 0
WEIBULL = 1
LOGNORMAL = 2
TABLE = 3


@njit(nogil=True, cache=True)
def tail_quantile(code, p0, p1, p2, xs, logt, u):
    """Return x with P(X > x) = u for u in (0, 1]."""
    if code == PARETO:
        # p0 = alpha, p1 = scale, p2 = drift
        return p1 * math.exp(-math.log(u) / p0) - p2
    if code == WEIBULL:
        return (-math.log(u)) ** (1.0 / p0) - p2
    if code == LOGNORMAL:
        return math.exp((-math.log(u)) ** (1.0 / p0)) - p2
    # tabulated: logt strictly decreasing, xs increasing; p0 = tail index
    lu = math.log(u)
    n = xs.size
    if lu >= logt[n - 1]:
        hi = n - 1
        lo = 0
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if logt[mid] >= lu:
                lo = mid
            else:
                hi = mid
        w = (lu - logt[lo]) / (logt[hi] - logt[lo])
        return xs[lo] + w * (xs[hi] - xs[lo])
    return xs[n - 1] * math.exp((logt[n - 1] - lu) / p0)


@njit(nogil=True, cache=True)
def fill_samples(rng, code, p0, p1, p2, xs, logt, out):
    # 1 - U lies in (0, 1], so u = 1 maps to the support infimum
    n = out.size
    if code == PARETO:
        inv = 1.0 / p0
        for i in range(n):
            out[i] = p1 * math.exp(-math.log(1.0 - rng.random()) * inv) - p2
    elif code == WEIBULL:
        inv = 1.0 / p0
        for i in range(n):
            out[i] = (-math.log(1.0 - rng.random())) ** inv - p2
    elif code == LOGNORMAL:
        inv = 1.0 / p0
        for i in range(n):
            out[i] = math.exp((-math.log(1.0 - rng.random())) ** inv) - p2
    else:
        for i in range(n):
            out[i] = tail_quantile(code, p0, p1, p2, xs, logt, 1.0 - rng.random())


MODE_TRUNCATE = 0
MODE_REINSURE = 1


@njit(nogil=True, cache=True)
def advance_suprema(buf, state, xs_sorted, counts, n_paths, y, drift, mode,
                    x_cap, barrier, step_cap):
    """Consume ``buf`` driving paths of the capped walk.

    ``state`` holds (paths done, S, running max, steps, max steps seen).
    A path stops when its running max exceeds ``x_cap`` or when it falls
    more than ``barrier`` below its running max; ``counts[j]`` is then
    incremented for each ``xs_sorted[j]`` strictly below the running max.
    Returns -1 if a path hits ``step_cap``, else the number of samples used.
    """
    done = int(state[0])
    s = state[1]
    m = state[2]
    k = int(state[3])
    kmax = int(state[4])
    used = 0
    for j in range(buf.size):
        if done >= n_paths:
            break
        z = buf[j]
        used += 1
        if mode == MODE_TRUNCATE:
            if z > y:
                z = y
        elif z + drift >= y:
            z = -drift
        s += z
        k += 1
        finished = False
        if s > m:
            m = s
            if m > x_cap:
                finished = True
        elif s < m - barrier:
            finished = True
        if finished:
            c = np.searchsorted(xs_sorted, m, side="left")
            for i in range(c):
                counts[i] += 1
            if k > kmax:
                kmax = k
            done += 1
            s = 0.0
            m = 0.0
            k = 0
        elif k >= step_cap:
            state[0] = done
            state[1] = s
            state[2] = m
            state[3] = k
            state[4] = kmax
            return -1
    state[0] = done
    state[1] = s
    state[2] = m
    state[3] = k
    state[4] = kmax
    return used


@njit(nogil=True, cache=True)
def advance_finite_horizon(buf, state, n_paths, n_steps, x, cap, drift):
    """Consume ``buf`` for the fixed-horizon joint event.

    A path of ``n_steps`` increments X_i = B_i - drift succeeds when some
    partial sum reaches ``x`` and every B_i stays below ``cap``; the first
    claim at or above ``cap`` ends the path as a failure.
    ``state`` holds (paths done, S, steps, hit flag, successes).
    """
    done = int(state[0])
    s = state[1]
    k = int(state[2])
    hit = state[3] > 0.5
    wins = int(state[4])
    for j in range(buf.size):
        if done >= n_paths:
            break
        z = buf[j]
        k += 1
        if z + drift >= cap:
            done += 1
            s = 0.0
            k = 0
            hit = False
            continue
        s += z
        if s >= x:
            hit = True
        if k >= n_steps:
            if hit:
                wins += 1
            done += 1
            s = 0.0
            k = 0
            hit = False
    state[0] = done
    state[1] = s
    state[2] = k
    state[3] = 1.0 if hit else 0.0
    state[4] = wins
    return wins
