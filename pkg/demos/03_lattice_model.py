"""The finite group Z_N as a stand-in for the line.

Run with ``python3 demos/03_lattice_model.py``.

H = h(P) + V(Q) + 1 on Z_N with the self-dual spacing sqrt(2 pi / N).  As N grows
the regularity norms shrink, and for a confining V the translated resolvent
U_a R U_a* fades weakly.  With V = 0 it does not fade at all, since U_a commutes
with h(P).
"""

from spectralgate.criteria import check_prop4_pipeline, check_theorem2, lattice_probes
from spectralgate.lattice import LatticeModel

for potential in ("x0^4", "zero"):
    print(f"V = {potential}")
    print(f"  {'N':>4} {'modulation':>11} {'translation':>12} {'weak terminal':>14}")
    for N in (16, 32, 64):
        p = lattice_probes(LatticeModel(N, potential=potential))
        print(f"  {N:>4} {p['modulation']:>11.4f} {p['translation']:>12.4f} {p['weak'][-1]:>14.3e}")

for label, rep in (("theorem 2, confining", check_theorem2()),
                   ("theorem 2, free", check_theorem2({"potential": "zero"})),
                   ("prop 4, confining", check_prop4_pipeline())):
    print(f"{label:<22} consistent={rep.consistent}  ({rep.rule})")
