"""Zero portraits of p_40 across the phase transition.

For the varying weight e^{i n lambda z}, the degree-40 zeros accumulate on
a single arc when lambda is subcritical (lambda < lambda_c ~ 1.3255) and
split onto two disjoint arcs hanging from -1 and +1 once lambda passes
lambda_c.  This script renders the three classic portraits
(lambda = 1, 3, 10) as SVGs and prints where each zero cloud lives.

Run:  python demos/01_zero_portraits.py   (outputs in demo_out/)
"""

import os

import numpy as np

from kisspoly._io import SvgCanvas
from kisspoly.polynomials import monic_op, zeros_of
from kisspoly.spectral import lambda_crit

OUT = os.path.join(os.path.dirname(__file__), "..", "demo_out")
os.makedirs(OUT, exist_ok=True)

print(f"lambda_c = {lambda_crit():.6f}")
for lam in (1.0, 3.0, 10.0):
    p = monic_op(40, 40 * lam)
    zs = zeros_of(p).zeros
    regime = "subcritical" if lam < lambda_crit() else "supercritical"
    print(f"lambda = {lam:4} ({regime}): zeros span "
          f"Re [{zs.real.min():+.3f}, {zs.real.max():+.3f}], "
          f"Im [{zs.imag.min():+.3f}, {zs.imag.max():+.3f}] "
          f"(precision: {'double' if p.dps is None else f'{p.dps} digits'})")

    canvas = SvgCanvas()
    canvas.polyline([-1.0, 1.0], stroke="#bbbbbb", width=0.8)
    canvas.markers([-1.0 + 0j, 1.0 + 0j], fill="#000000", radius=3.0)
    canvas.markers(zs)
    path = os.path.join(OUT, f"zeros_p40_lambda{lam:g}.svg")
    canvas.write(path)
    print(f"  -> {path}")
