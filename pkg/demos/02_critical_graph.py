"""Critical graphs of -Q dz^2 with polynomial zeros overlaid.

The traced trajectories organize the plane: one arc falls from z_* into
the pole at +1 (this is gamma_2, the right half of the zero attractor),
its mirror image is gamma_1, one trajectory connects z_* to -conj z_*
across the imaginary axis, and one escapes horizontally.  Overlaying the
zeros of p_40 shows them hugging gamma_1 U gamma_2 to a few parts in a
thousand at degree 40.

Run:  python demos/02_critical_graph.py
"""

import os

import numpy as np

from kisspoly import solve_boutroux
from kisspoly._io import SvgCanvas
from kisspoly.polynomials import monic_op, zeros_of
from kisspoly.trajectories import build_critical_graph, zero_distance_stats

OUT = os.path.join(os.path.dirname(__file__), "..", "demo_out")
os.makedirs(OUT, exist_ok=True)

for lam in (2.0, 5.0, 10.0):
    curve = solve_boutroux(lam)
    graph = build_critical_graph(curve)
    print(f"lambda = {lam}: x_* = {curve.x_star:.6f}, "
          f"mass(gamma_2) = {graph.mu_mass_gamma2:.8f}, "
          f"escape leaves at arg = {abs(np.angle(graph.escape.points[-1])):.4f}")

    canvas = SvgCanvas()
    clip = graph.escape.points[np.abs(graph.escape.points) < 4.0]
    canvas.polyline(graph.gamma1.points, stroke="#1f77b4", width=2.2)
    canvas.polyline(graph.gamma2.points, stroke="#1f77b4", width=2.2)
    canvas.polyline(graph.gamma_hat_traj.points, stroke="#2ca02c", width=1.4)
    canvas.polyline(clip, stroke="#9467bd", width=1.2)
    canvas.polyline(-np.conj(clip), stroke="#9467bd", width=1.2)
    canvas.markers([1.0 + 0j, -1.0 + 0j, curve.z_star, -np.conj(curve.z_star)],
                   fill="#000000", radius=3.0)

    zs = zeros_of(monic_op(40, 40 * lam)).zeros
    canvas.markers(zs, fill="#d62728", radius=2.0)
    mx, mean, _ = zero_distance_stats(zs, graph)
    print(f"  zeros of p_40: max/mean distance to the arcs = {mx:.2e} / {mean:.2e}")

    path = os.path.join(OUT, f"critical_graph_lambda{lam:g}.svg")
    canvas.write(path)
    print(f"  -> {path}")
