"""Direct simulation of P(M(y) > x) with a certified truncation budget.

A path of the capped walk is run until its running maximum passes the largest
requested level, or until it drops ``B`` below its running maximum. In the
second case the remaining chance to climb again is at most ``exp(-gamma B)``
by the Cramér–Lundberg bound applied at the current maximum, so choosing
``B = ceil(log(1/eps) / gamma)`` bounds the bias of every estimate by ``eps``.
"""

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import asdict, dataclass
import math
import time
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .dist import DistributionSpec, stream
from .errors import BudgetExceeded
from .lundberg import TruncatedWalkModel

DEFAULT_EPS = 1e-8
DEFAULT_STEP_CAP = 10 ** 9
BUFFER = 1 << 16
BLOCK_PATHS = 1 << 14

CSV_HEADER = ("x", "y", "p_hat", "std_err", "n_paths", "barrier_B", "trunc_eps", "seed")


@dataclass(frozen=True)
class MCEstimate:
    """Success fraction of simulated paths with its binomial standard error."""

    p_hat: float
    std_err: float
    n_paths: int
    seed: int
    barrier_B: float
    truncation_error_bound: float
    wall_time_s: float
    x: Optional[float] = None
    y: Optional[float] = None
    workers: int = 1
    max_steps: int = 0

    @classmethod
    def from_count(cls, hits, n_paths, **kw):
        p = hits / n_paths if n_paths else 0.0
        se = math.sqrt(p * (1.0 - p) / n_paths) if n_paths else 0.0
        return cls(p_hat=p, std_err=se, n_paths=n_paths, **kw)

    def to_dict(self):
        return asdict(self)

    def csv_row(self):
        return (self.x, self.y, self.p_hat, self.std_err, self.n_paths, self.barrier_B,
                self.truncation_error_bound, self.seed)


def path_blocks(n_paths: int, block: int = BLOCK_PATHS):
    """(block index, path count) pairs; block ``b`` always draws from stream (seed, b)."""
    return [(b, min(block, n_paths - b * block)) for b in range(-(-n_paths // block))]


def run_blocks(job, n_paths: int, workers: int):
    """Apply ``job(block_index, n)`` to every path block, spread over ``workers`` threads.

    Blocks go round-robin to threads and results come back in block order,
    so any reduction over them is independent of the worker count.
    """
    blocks = path_blocks(n_paths)
    if workers <= 1 or len(blocks) <= 1:
        return [job(b, n) for b, n in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda bn: job(*bn), blocks))


def barrier_for(gamma: float, eps: float) -> float:
    """Smallest integer B with exp(-gamma B) <= eps."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return float(math.ceil(math.log(1.0 / eps) / gamma))


def _run_block(spec: DistributionSpec, seed, block, n, xs, y, drift, mode, x_cap,
               barrier, step_cap):
    counts = np.zeros(xs.size, dtype=np.int64)
    rng = stream(seed, block)
    state = np.zeros(5)
    buf = np.empty(BUFFER)
    while state[0] < n:
        spec.fill(rng, buf)
        used = _kernels.advance_suprema(buf, state, xs, counts, n, y, drift, mode,
                                        x_cap, barrier, step_cap)
        if used < 0:
            raise BudgetExceeded(f"a path exceeded the step cap of {step_cap} steps")
    return counts, int(state[4])


def simulate_suprema(spec: DistributionSpec, y: float, xs, n_paths: int, seed: int,
                     barrier: float, workers: int = 1, step_cap: int = DEFAULT_STEP_CAP,
                     mode: int = _kernels.MODE_TRUNCATE, drift: float = 0.0):
    """Counts of paths whose supremum exceeds each level in sorted ``xs``.

    ``mode`` selects the increment: ``min(X, y)`` or, for re-insurance,
    ``X`` with claims ``X + drift >= y`` replaced by ``-drift``.
    Returns ``(counts, max_steps)``; neither depends on ``workers``.
    """
    xs = np.ascontiguousarray(xs, dtype=float)
    x_cap = float(xs[-1]) if xs.size else 0.0

    def job(block, n):
        return _run_block(spec, seed, block, n, xs, float(y), float(drift), mode, x_cap,
                          float(barrier), int(step_cap))

    results = run_blocks(job, n_paths, workers)
    if not results:
        return np.zeros(xs.size, dtype=np.int64), 0
    counts = np.sum([r[0] for r in results], axis=0)
    return counts, max(r[1] for r in results)


def estimate_sup_tail_grid(model: TruncatedWalkModel, xs: Sequence[float], n_paths: int,
                           eps: Optional[float] = None, seed: int = 0, workers: int = 1,
                           step_cap: int = DEFAULT_STEP_CAP):
    """Estimates of P(M(y) > x) for every x in ``xs`` from one ensemble of paths.

    Results come back in the order of ``xs``. Levels below 0 have probability
    1 (M(y) >= S_0 = 0) and need no simulation.
    """
    eps = DEFAULT_EPS if eps is None else eps
    t0 = time.perf_counter()
    xs = [float(v) for v in xs]
    pos = sorted({v for v in xs if v >= 0})
    if pos:
        g = model.gamma
        barrier = barrier_for(g, eps)
        trunc = math.exp(-g * barrier)
        counts, kmax = simulate_suprema(model.spec, model.y, pos, n_paths, seed, barrier,
                                        workers, step_cap)
    else:
        barrier, trunc, counts, kmax = 0.0, 0.0, [], 0
    wall = time.perf_counter() - t0
    by_x = dict(zip(pos, counts))
    out = []
    for v in xs:
        hits = n_paths if v < 0 else int(by_x[v])
        out.append(MCEstimate.from_count(
            hits, n_paths, seed=seed, barrier_B=barrier,
            truncation_error_bound=trunc if v >= 0 else 0.0, wall_time_s=wall,
            x=v, y=model.y, workers=workers, max_steps=kmax))
    return out


def estimate_sup_tail(model: TruncatedWalkModel, x: float, n_paths: int,
                      eps: Optional[float] = None, seed: int = 0, workers: int = 1,
                      step_cap: int = DEFAULT_STEP_CAP) -> MCEstimate:
    """Estimate of P(M(y) > x)."""
    return estimate_sup_tail_grid(model, [x], n_paths, eps, seed, workers, step_cap)[0]


def write_csv(fh, estimates, digits=15):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for e in estimates:
        w.writerow([_fmt(v, digits) for v in e.csv_row()])


def _fmt(v, digits=15):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if v is None:
        return ""
    return f"{float(v):.{digits}g}"
