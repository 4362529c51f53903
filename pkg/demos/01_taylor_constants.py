"""Taylor-remainder constants ME_delta and MG_delta.

Run with ``python demos/01_taylor_constants.py``. Writes figure1.csv and
figure2.csv to demos/output/.
"""

from pathlib import Path

import numpy as np

from trunctail import taylor

# ME(delta) = max_s (1 - (1 + s) e^{-s}) / s^delta and
# MG(delta) = max_u (e^{-u} - 1 + u) / u^delta. The endpoints are exact and
# need no solve.
print("ME_0 =", taylor.me_delta(0.0), " ME_2 =", taylor.me_delta(2.0))
print("MG_1 =", taylor.mg_delta(1.0), " MG_2 =", taylor.mg_delta(2.0))

# Inside (0, 2) a Newton solve locates the maximiser s*; the constants come
# with the iteration count and the residual of the stationarity condition.
for d in (0.5, 1.0, 1.5):
    tc = taylor.taylor_constants(d)
    print(f"delta={d}: ME={tc.ME:.12f} (s*={tc.s_star:.6f}, {tc.newton_iterations} steps), "
          f"UE={tc.UE:.6f}, simple={tc.simple_E:.6f}")

# MG only makes sense for delta in [1, 2]. Close to 1 the maximiser u* escapes
# to infinity like 1 / (delta - 1), which is why MG_1 is a limit.
for d in (1.001, 1.01, 1.1, 1.5):
    tc = taylor.taylor_constants(d)
    print(f"delta={d}: MG={tc.MG:.10f}, u*={tc.u_star:.1f}")

# Both constants are log-convex in delta, but not monotone: each dips below
# the shared right endpoint 1/2 before climbing back.
grid = np.linspace(0.0, 2.0, 401)
me = np.array([taylor.me_delta(d) for d in grid])
i = int(np.argmin(me))
print(f"min ME = {me[i]:.5f} at delta ~ {grid[i]:.3f}")
g_grid = np.linspace(1.0, 2.0, 201)
mg = np.array([taylor.mg_delta(d) for d in g_grid])
j = int(np.argmin(mg))
print(f"min MG = {mg[j]:.5f} at delta ~ {g_grid[j]:.3f}")

# The figure tables compare the exact constants with the closed-form
# majorants UE, UG and the simple bounds 1/(1 + delta/2), 1/delta.
out = Path(__file__).resolve().parent / "output"
out.mkdir(exist_ok=True)
rows_e, rows_g = taylor.figure_tables(grid)
with open(out / "figure1.csv", "w", newline="") as fh:
    taylor.write_table(fh, taylor.FIGURE1_HEADER, rows_e)
with open(out / "figure2.csv", "w", newline="") as fh:
    taylor.write_table(fh, taylor.FIGURE2_HEADER, rows_g)
print("wrote", out / "figure1.csv", "and", out / "figure2.csv")
