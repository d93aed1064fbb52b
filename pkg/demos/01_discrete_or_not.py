"""Counting eigenvalues on growing boxes: which potentials give discrete spectrum?

Run with ``python3 demos/01_discrete_or_not.py``.  Takes about ten seconds.

For a confining potential the number of eigenvalues below a fixed energy E stops
changing once the box is large enough.  With V = 0 it keeps growing like the
box volume (Weyl's law).  The interesting case is V = x0^2 x1^2, which vanishes
along both axes yet still behaves like the confining one.
"""

from spectralgate.continuum import schrodinger
from spectralgate.eigensolve import counting_ladder, smallest_eigs
from spectralgate.potential import builtin

ho = smallest_eigs(schrodinger("harmonic_n", 10.0, 0.01), k=5)
print("lowest eigenvalues of -d^2/dx^2 + x^2:", ho.values.round(5), f"({ho.method})")

cases = [
    ("x0^2", builtin("harmonic_n"), 10.0, (4, 6, 8, 12), 0.05),
    ("0 (1-D)", builtin("zero", 1), 1.0, (5, 10, 20, 40), 0.05),
    ("x0^2 x1^2", builtin("cross_xy"), 5.0, (4, 8, 12, 16), 0.1),
    ("0 (2-D)", builtin("zero", 2), 5.0, (4, 8, 12, 16), 0.1),
]
print(f"\n{'V':<12} {'E':>5}  {'counts on L ladder':<24} verdict")
for label, V, E, Ls, h in cases:
    lad = counting_ladder(V, E, Ls, h)
    print(f"{label:<12} {E:>5g}  {str(lad.counts):<24} {lad.verdict} (exponent {lad.exponent:.2f})")
