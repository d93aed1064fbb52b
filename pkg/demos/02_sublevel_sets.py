"""How fast do the sublevel sets {V < lambda} thin out far away?

Run with ``python3 demos/02_sublevel_sets.py``.

omega_lambda(a) is the measure of {x in B_a : V(x) < lambda}.  For x0^2 x1^2 it
decays like 1/|a| along an axis, which is enough for condition (i).  The
bump_holes potential has holes of radius 2^-k at 4^k; the integral of omega
over the holes converges, and omega itself decays.
"""

import numpy as np

from spectralgate.criteria import check_eq1_consistency, check_remark2
from spectralgate.measure import QuadConfig, loglog_slope, omega_lambda
from spectralgate.potential import builtin

V = builtin("cross_xy")
radii = [8, 16, 32, 64]
cfg = QuadConfig(method="monte_carlo", samples=200_000, seed=0)
vals = [omega_lambda(V, [A, 0.0], 1.0, cfg) for A in radii]
for A, e in zip(radii, vals):
    print(f"omega_1(({A}, 0)) = {e.value:.5f} +- {e.stderr:.5f}")
print("log-log slope:", round(loglog_slope(radii, [e.value for e in vals]), 3))

rep = check_eq1_consistency(V)
print("\ncondition (i):", rep.verdict("condition_i"), "| weak-vanishing integral:", rep.verdict("eq1"))

r2 = check_remark2(builtin("bump_holes"))
lad = r2.hypothesis_verdicts["omega_p_integral"]["evidence"]["ladder"]
print("\nbump_holes truncated p-integrals:", np.round(lad["values"], 8).tolist())
print("exact limit sum 4^(1-k), k=1..5 :", sum(4.0 ** (1 - k) for k in range(1, 6)))
print("consistent:", r2.consistent, "-", r2.rule)
