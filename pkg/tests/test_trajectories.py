import numpy as np
import pytest

from kisspoly import solve_boutroux
from kisspoly.errors import ValidationError
from kisspoly.geometry import point_to_polyline_distance
from kisspoly.polynomials import monic_op, zeros_of
from kisspoly.spectral import PhiFunction, phi
from kisspoly.trajectories import (arc_csv_rows, build_critical_graph,
                                   critical_directions, density_samples,
                                   gamma2_mass, gamma_hat, q_prime_at_zero,
                                   trace, zero_distance_stats)


def _angles_from_qprime(qp):
    base = (np.pi - np.angle(qp)) / 3.0
    return sorted((base + 2 * np.pi * k / 3.0) % (2 * np.pi) for k in range(3))


def test_direction_formula_positive_real():
    assert np.allclose(_angles_from_qprime(1.0),
                       [np.pi / 3, np.pi, 5 * np.pi / 3], atol=1e-12)


def test_direction_formula_negative_real():
    assert np.allclose(_angles_from_qprime(-1.0),
                       [0.0, 2 * np.pi / 3, 4 * np.pi / 3], atol=1e-12)


def test_directions_spacing(curve3):
    th = critical_directions(curve3, curve3.z_star)
    assert th[1] - th[0] == pytest.approx(2 * np.pi / 3, abs=1e-10)
    assert th[2] - th[1] == pytest.approx(2 * np.pi / 3, abs=1e-10)
    # consistency with the synthetic formula on the actual curve
    assert np.allclose(th, _angles_from_qprime(q_prime_at_zero(curve3, curve3.z_star)),
                       atol=1e-12)


def test_directions_need_simple_zero(curve3):
    with pytest.raises(ValidationError):
        critical_directions(curve3, 0.5 + 0.5j)


def test_trace_classification(curve3):
    kinds = set()
    for th in critical_directions(curve3, curve3.z_star):
        arc = trace(curve3, curve3.z_star, th)
        kinds.add(arc.end_kind)
        assert np.max(np.abs(arc.cum_integral.real)) < 1e-8
    assert kinds == {"pole+1", "axis", "escape"}


def test_graph_invariants(graph3):
    g = graph3
    assert abs(g.gamma2.points[-1] - 1.0) < 1e-12
    assert abs(g.mu_mass_gamma2 - 0.5) < 1e-5
    # gamma1 is the mirror of gamma2
    mirror = -np.conj(g.gamma2.points[::-1])
    assert np.max(np.abs(mirror - g.gamma1.points)) < 1e-14
    # escape goes out horizontally
    assert abs(np.angle(g.escape.points[-1])) < 0.05
    # connecting trajectory ends at the mirrored zero
    assert abs(g.gamma_hat_traj.points[-1] + np.conj(g.curve.z_star)) < 1e-12


def test_reflection_principle(curve3, graph3):
    # reflecting gamma2 gives another arc of trajectory: its cumulative
    # int Q^{1/2} ds stays purely imaginary
    pts = -np.conj(graph3.gamma2.points[::-1])[1:-1]  # interior, avoids poles
    w = np.sqrt(np.asarray([complex((-(curve3.lam ** 2) / 4.0)
                                    * (z - curve3.z_star) * (z + np.conj(curve3.z_star))
                                    / (z * z - 1.0)) for z in pts]))
    # fix a continuous branch along the polyline
    for k in range(1, len(w)):
        if abs(w[k] + w[k - 1]) < abs(w[k] - w[k - 1]):
            w[k] = -w[k]
    seg = np.diff(pts)
    cum = np.cumsum(0.5 * (w[1:] + w[:-1]) * seg)
    # trapezoid discretization of the test itself limits this
    assert np.max(np.abs(cum.real)) < 1e-4


def test_halved_step_stability(curve3, graph3):
    g2 = build_critical_graph(curve3, h_scale=0.5)
    n1 = len(graph3.gamma_hat_traj.points)
    n2 = len(g2.gamma_hat_traj.points)
    assert abs(graph3.gamma2.points[-1] - g2.gamma2.points[-1]) < 1e-6
    ax1 = graph3.gamma_hat_traj.points[(n1 - 1) // 2]
    ax2 = g2.gamma_hat_traj.points[(n2 - 1) // 2]
    assert abs(ax1 - ax2) < 1e-6


def test_density_positive(graph3):
    _, dens = density_samples(graph3.arc_curve, "gamma2")
    assert np.all(dens > 0)


def test_mass_from_refined_quadrature(graph3):
    m1 = gamma2_mass(graph3.arc_curve, tol=1e-8)
    m2 = gamma2_mass(graph3.arc_curve, tol=1e-11)
    assert abs(m1 - m2) < 1e-8
    assert abs(m1 - 0.5) < 1e-6


def test_gamma_hat_properties(curve3, graph3, ghat3):
    pts = np.asarray(ghat3.vertices)
    assert pts[0] == pytest.approx(-np.conj(curve3.z_star), abs=1e-14)
    assert pts[-1] == pytest.approx(curve3.z_star, abs=1e-14)
    refl = -np.conj(pts[::-1])
    assert np.max(np.abs(refl - pts)) < 1e-8
    pf = PhiFunction(curve=graph3.arc_curve, gamma_hat=pts)
    for k in np.linspace(2, len(pts) - 3, 7).astype(int):
        val = phi(pts[k], pf, tol=1e-9, via=[pts[k] + 0.05j])
        assert val.real > 0


def test_zero_distance_stats(graph3):
    # zeros sampled on the arc itself: zero distance
    sample = graph3.gamma2.points[3:-3:5]
    mx, mean, outl = zero_distance_stats(sample, graph3)
    assert mx < 1e-12 and outl is None
    # odd polynomial: the imaginary-axis outlier is reported separately
    zs = zeros_of(monic_op(11, 33.0)).zeros
    mx, mean, outl = zero_distance_stats(zs, graph3)
    assert outl is not None and abs(outl.real) < 1e-8


def test_zero_attraction_n20_vs_n40(graph3):
    d = {}
    for n in (20, 40):
        zs = zeros_of(monic_op(n, 3.0 * n)).zeros
        d[n], _, _ = zero_distance_stats(zs, graph3)
    assert d[40] < d[20]


def test_csv_rows(graph3):
    rows = arc_csv_rows(graph3, "gamma2")
    assert len(rows) == len(graph3.gamma2.points)
    assert all(len(r) == 4 for r in rows)
    # interior density positive, cumulative integral imaginary part monotone
    dens = [r[3] for r in rows[1:-1]]
    assert all(v > 0 for v in dens)


def test_multiple_lambdas():
    for lam in (2.0, 5.0, 10.0):
        c = solve_boutroux(lam)
        g = build_critical_graph(c)
        assert abs(g.mu_mass_gamma2 - 0.5) < 1e-5
        assert abs(np.angle(g.escape.points[-1])) < 0.05
