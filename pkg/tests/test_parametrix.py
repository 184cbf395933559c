import numpy as np
import pytest

from kisspoly.errors import ThetaStarError
from kisspoly.parametrix import (Parametrix, PeriodEngine, parity_nu,
                                 parity_sigma, theta_star_scan)


def test_parity_maps():
    assert parity_nu(0, 1) == 2 and parity_nu(1, 1) == 1
    assert parity_nu(0, 2) == 1 and parity_nu(1, 2) == 2
    assert parity_sigma(1) == 2 and parity_sigma(2) == 1


def test_m_period_symmetries(engine3, curve3):
    mA0, mA1 = engine3.m_A(0), engine3.m_A(1)
    mB0, mB1 = engine3.m_B(0), engine3.m_B(1)
    assert abs(mA0.real) < 1e-8
    assert abs(mA1.imag) < 1e-8
    assert abs(mB0.imag) < 1e-8
    assert abs(mA0) > 1e-6 and abs(mB0) > 1e-6
    # the B-side odd moment carries the residue at infinity exactly
    assert mB1.real == pytest.approx(np.pi / curve3.lam, abs=1e-10)


@pytest.mark.xfail(strict=True, reason="Re m_B^(1) = pi/lambda exactly (residue "
                   "of z Lambda_0 at infinity); the claimed vanishing cannot "
                   "hold -- see the decisions ledger")
def test_m_period_b1_vanishing_as_stated(engine3):
    assert abs(engine3.m_B(1).real) < 1e-8


def test_lambda_a_period_identities(engine3):
    for nu in (1, 2):
        A, B = engine3.lambda_a_periods(2.7j, nu)
        assert abs(A.real) < 1e-8
        # B carries a +pi/2 offset from the residue at infinity on the
        # contracted sheet; the offsets cancel in the Omega combination
        assert B.imag == pytest.approx((-1) ** nu * np.pi / 2, abs=1e-8)
        res = engine3.residue_check(2.7j, nu)
        assert res == pytest.approx(1.0, abs=1e-8)
    # the paper's combination-level identity holds as printed
    _, Bom, _ = engine3.omega_periods(2.7, 1, 2)
    assert Bom.imag == pytest.approx(((-1) ** 1 - (-1) ** 2) * np.pi / 2,
                                     abs=1e-8)


@pytest.mark.xfail(strict=True, reason="Im oint_B Lambda_a^(nu) carries a "
                   "+pi/2 infinity-residue offset; the printed single-"
                   "differential identity cannot hold -- see the ledger")
def test_lambda_a_b_period_as_stated(engine3):
    _, B = engine3.lambda_a_periods(2.7j, 1)
    assert B.imag == pytest.approx(((-1) ** 1 - 1) * np.pi / 2, abs=1e-8)


def test_c_constant_purity_and_consistency(engine3):
    vals = {}
    for nu, sg in ((1, 2), (2, 2), (1, 1), (2, 1)):
        c, re_defect = engine3.c_constant(nu, sg)
        assert re_defect < 1e-6
        vals[(nu, sg)] = c
    # the odd-degree combinations sit at half-period exactly
    assert vals[(1, 2)] == pytest.approx(np.pi, abs=1e-8)
    assert vals[(2, 1)] == pytest.approx(-np.pi, abs=1e-8)
    # c agrees with the direct tau -> infinity limit of the A-period phase
    A, _, _ = engine3.omega_periods(4000.0, 1, 2)
    assert abs(A.imag - vals[(1, 2)]) < 1e-3


def test_c_independent_of_probe_tau(engine3):
    # the defining limit is approached from either tau direction
    Ap, _, _ = engine3.omega_periods(6000.0, 2, 2)
    Am, _, _ = engine3.omega_periods(-6000.0, 2, 2)
    assert abs(Ap.imag - Am.imag) < 1e-3


def test_solve_periods_residuals(pmx3):
    for n in (4, 5):
        for k in (1, 2):
            sol = pmx3.solution(n, k)
            assert sol.residual_A < 1e-6
            assert sol.residual_B < 1e-6
            assert abs(sol.a_star.real) < 1e-10


def test_a_star_tracks_spurious_zero(pmx3):
    from kisspoly.polynomials import monic_op, zeros_of
    sol = pmx3.solution(11, 1)
    zero = zeros_of(monic_op(11, 33.0)).imaginary_zero
    assert abs(sol.a_star - zero) < 0.05


def test_theta_star_refusal(engine3, curve3):
    # at the theta point 2 n kappa - c hits 2 pi Z; engineer one by degree:
    # find n with proximity below a loose tolerance and check the error path
    raised = False
    for n in range(1, 400):
        try:
            engine3.solve(n, 1, theta_tolerance=2e-2)
        except ThetaStarError as exc:
            assert exc.proximity < 2e-2
            raised = True
            break
        except Exception:
            continue
    assert raised


def test_eta_properties(pmx3, curve3):
    ys = curve3.y_star
    e = pmx3.eta(ys)
    assert e * e == pytest.approx(1.0, abs=1e-8)
    R = 1000.0
    e2 = pmx3.eta(1j * R)
    assert abs(e2 ** 2 - (1.0 + (1.0 - curve3.x_star) / (1j * R))) < 1e-4
    # quartic two-sided ratio at a gamma2 midpoint
    arc = pmx3.curve.gamma2
    k = len(arc) // 2
    t = arc[k + 1] - arc[k - 1]
    t /= abs(t)
    from kisspoly.parametrix import _continue_quartic
    p0p, p0m = arc[k] + 0.05j * t, arc[k] - 0.05j * t
    ep = _continue_quartic(pmx3.eta4, pmx3.eta(p0p), p0p, arc[k] + 1e-6j * t)
    em = _continue_quartic(pmx3.eta4, pmx3.eta(p0m), p0m, arc[k] - 1e-6j * t)
    ratio = ep / em
    assert abs(abs(ratio) - 1.0) < 1e-4
    assert min(abs(ratio - 1j), abs(ratio + 1j)) < 1e-3


def test_N_matrix(pmx3):
    N = pmx3.N_matrix(2.0 + 2.0j)
    assert abs(np.linalg.det(N) - 1.0) < 1e-12
    Nfar = pmx3.N_matrix(1e3 + 200j)
    assert np.max(np.abs(Nfar - np.eye(2))) < 1e-2


def test_N_jump(pmx3):
    from kisspoly.parametrix import _continue_quartic
    arc = pmx3.curve.gamma2
    k = len(arc) // 2
    t = arc[k + 1] - arc[k - 1]
    t /= abs(t)

    def N_of(e):
        return np.array([[0.5 * (e + 1 / e), (e - 1 / e) / (-2j)],
                         [(e - 1 / e) / (2j), 0.5 * (e + 1 / e)]])

    vals = {}
    for sgn in (1, -1):
        p0 = arc[k] + sgn * 0.05j * t
        vals[sgn] = [
            _continue_quartic(pmx3.eta4, pmx3.eta(p0), p0, arc[k] + sgn * d * 1j * t)
            for d in (2e-3, 1e-3, 5e-4)]

    def extrap(seq, deltas=(2e-3, 1e-3, 5e-4)):
        l0 = ((0 - deltas[1]) * (0 - deltas[2])) / ((deltas[0] - deltas[1]) * (deltas[0] - deltas[2]))
        l1 = ((0 - deltas[0]) * (0 - deltas[2])) / ((deltas[1] - deltas[0]) * (deltas[1] - deltas[2]))
        l2 = ((0 - deltas[0]) * (0 - deltas[1])) / ((deltas[2] - deltas[0]) * (deltas[2] - deltas[1]))
        return l0 * seq[0] + l1 * seq[1] + l2 * seq[2]

    Np = N_of(extrap(vals[1]))
    Nm = N_of(extrap(vals[-1]))
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert np.max(np.abs(Np - Nm @ J)) < 1e-6


def test_u11_jump_on_real_ray(pmx3):
    # u_{1,+} = u_{1,-} (mod 2 pi i) across (1, inf)
    sol = pmx3.solution(4, 1)
    x = 1.8
    up = pmx3.u_value(x + 1e-4j, sol, sheet=1)
    um = pmx3.u_value(x - 1e-4j, sol, sheet=1)
    d = (up - um).imag % (2 * np.pi)
    assert min(d, 2 * np.pi - d) + abs((up - um).real) < 1e-3


def test_u11_jump_on_gamma_hat(pmx3):
    # u_+ - u_- = i pi n (mod 2 pi i) across gamma_hat
    n = 4
    sol = pmx3.solution(n, 1)
    gv = pmx3.gamma_hat
    k = len(gv) // 2
    t = gv[k + 1] - gv[k - 1]
    t /= abs(t)
    zp, zm = gv[k] + 1e-4j * t, gv[k] - 1e-4j * t
    up = pmx3.u_value(zp, sol, sheet=1,
                      path=pmx3.u_path(zp, 1, approach=gv[k] + 0.05j * t))
    um = pmx3.u_value(zm, sol, sheet=1,
                      path=pmx3.u_path(zm, 1, approach=gv[k] - 0.05j * t))
    d = (up - um - 1j * np.pi * n).imag % (2 * np.pi)
    assert min(d, 2 * np.pi - d) + abs((up - um).real) < 1e-3


def test_u_bounded_at_infinity(pmx3):
    sol = pmx3.solution(4, 1)
    u1 = pmx3.u_value(400j, sol, sheet=1)
    u2 = pmx3.u_value(800j, sol, sheet=1)
    u4 = pmx3.u_value(1600j, sol, sheet=1)
    assert abs(u2 - u1) < 2e-2
    assert abs(u4 - u2) < abs(u2 - u1)


def test_M_jumps_and_zero_structure(pmx3, curve3, graph3):
    kappa = curve3.kappa

    def target(which, n):
        ek = np.exp(1j * n * kappa)
        if which == "gamma1":
            return np.array([[0, ek], [-1 / ek, 0]])
        if which == "gamma2":
            return np.array([[0, 1 / ek], [-ek, 0]])
        return (-1.0) ** n * np.eye(2)

    for n in (4, 5):
        for which, arc in (("gamma1", graph3.arc_curve.gamma1),
                           ("gamma2", graph3.arc_curve.gamma2),
                           ("gamma_hat", pmx3.gamma_hat)):
            k = len(arc) // 2
            t = arc[k + 1] - arc[k - 1]
            t /= abs(t)
            Mp = pmx3.M_boundary(arc[k], 1j * t, n)
            Mm = pmx3.M_boundary(arc[k], -1j * t, n)
            assert np.max(np.abs(Mp - Mm @ target(which, n))) < 1e-6, (n, which)
    # even degree: M11 bounded away from zero on a sample grid
    pts = [2 + 2j, -1.5 + 2.2j, 0.4 + 1.9j, 3 - 1j, -1.2j]
    vals = [abs(pmx3.M_entry(z, 4, 1, 1)) for z in pts]
    assert min(vals) > 1e-2
    # odd degree: M11 has a simple zero at a_*
    sol = pmx3.solution(5, 1)
    eps = 1e-3
    up = pmx3.M_entry(sol.a_star + eps, 5, 1, 1)
    um = pmx3.M_entry(sol.a_star - eps, 5, 1, 1)
    assert abs(up + um) < 0.2 * abs(up - um)
    assert abs(up) < 0.05


def test_strong_asymptotic_path_independence(pmx3):
    a = pmx3.strong_log(6, 2.0 + 2.0j)
    b = pmx3.strong_log(6, 2.0 + 2.0j, extra_via=0.2 + 2.6j)
    assert abs(np.exp(a - b) - 1.0) < 1e-8


def test_strong_asymptotic_accuracy(pmx3):
    import mpmath as mp
    from kisspoly.polynomials import monic_op
    for n in (6, 12):
        p = monic_op(n, 3.0 * n)
        with mp.workdps((p.dps or 15) + 20):
            ref = mp.log(p(2.0 + 2.0j) if p.dps else complex(p(2.0 + 2.0j)))
        err = abs(complex(mp.exp(complex(pmx3.strong_log(n, 2.0 + 2.0j)) - ref)) - 1)
        assert err < 0.05 / n


def test_conformal_f_B(pmx3):
    fB = pmx3.f_B
    h = 1e-5
    deriv = (fB(1.0 + h) - fB(1.0 - h)) / (2 * h)
    assert abs(deriv - pmx3.f_B_prime_formula()) < 1e-6
    assert abs(fB(1.0 + 1e-12)) < 1e-10
    # two-sided continuity at matched points across the local cut direction
    for dz in (0.03 + 0.02j, -0.04 + 0.01j):
        a = fB(1.0 + dz)
        b = fB(1.0 + np.conj(dz))  # reflected probe: still single-valued map
        assert np.isfinite(a.real) and np.isfinite(b.real)


def test_conformal_f_A_true_derivative(pmx3, curve3):
    p = -np.conj(curve3.z_star)
    lam, x = curve3.lam, curve3.x_star
    A = -(lam * lam / 4.0) * (p - curve3.z_star) / (p * p - 1.0)
    h = 1e-5
    deriv = (pmx3.f_A(p + h) - pmx3.f_A(p - h)) / (2 * h)
    assert abs(deriv - A ** (1.0 / 3.0)) < 1e-6
    assert abs(pmx3.f_A(p + 1e-12)) < 1e-10


@pytest.mark.xfail(strict=True, reason="the paper's closed form for the edge "
                   "coefficient is i*lambda*x/h_true; f_A' = Q'(p)^(1/3) does "
                   "not match it on any branch -- see the decisions ledger")
def test_conformal_f_A_printed_form(pmx3):
    p = -np.conj(pmx3.curve.z_star)
    h = 1e-5
    deriv = (pmx3.f_A(p + h) - pmx3.f_A(p - h)) / (2 * h)
    assert abs(deriv - pmx3.h_edge_formula()) < 1e-6


@pytest.mark.slow
def test_theta_scan_continuity():
    lams, vals, crossings = theta_star_scan(2.0, 2.6, 13)
    assert np.max(np.abs(np.diff(vals))) < np.pi
    for lam0 in crossings:
        assert 2.0 <= lam0 <= 2.6
