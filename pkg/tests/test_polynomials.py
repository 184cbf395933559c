import numpy as np
import pytest

from kisspoly.contour import integrate_contour
from kisspoly.errors import ValidationError
from kisspoly.geometry import Path
from kisspoly.moments import raw_moments
from kisspoly.polynomials import (existence_scan, monic_legendre_coeffs,
                                  monic_op, zeros_of)


def test_degree_zero():
    p = monic_op(0, 7.0)
    assert p.coeffs_complex().tolist() == [1.0 + 0j]
    assert complex(p.norm_sq) == pytest.approx(raw_moments(7.0, 0)[0])


def test_legendre_limit_degree_two():
    p = monic_op(2, 0.0)
    assert np.allclose(p.coeffs_complex(), [-1.0 / 3.0, 0.0, 1.0], atol=1e-14)


def test_degree_one_single_condition():
    m = raw_moments(10.0, 1)
    p = monic_op(1, 10.0)
    assert p.coeffs_complex()[0] == pytest.approx(-m[1] / m[0], abs=1e-13)


def test_orthogonality_residuals():
    for n, om in ((5, 10.0), (12, 40.0), (20, 60.0)):
        p = monic_op(n, om)
        assert p.residual < 1e-10


def test_coefficient_reflection_symmetry():
    # p_n(z) = (-1)^n conj(p_n(-conj z)): c_j real for j = n mod 2, else imaginary
    for n, om in ((7, 21.0), (12, 30.0)):
        c = monic_op(n, om).coeffs_complex()
        for j, cj in enumerate(c):
            if (n - j) % 2 == 0:
                assert abs(cj.imag) < 1e-10 * (1 + abs(cj))
            else:
                assert abs(cj.real) < 1e-10 * (1 + abs(cj))


def test_hankel_vs_modified_agreement():
    # both constructions escalate precision on their own diagnostics and
    # then agree; the 1e-8 contract covers n <= 15, omega <= 60
    for n, om in ((5, 10.0), (10, 30.0), (12, 40.0), (15, 60.0), (15, 5.0)):
        a = monic_op(n, om, method="modified")
        b = monic_op(n, om, method="hankel")
        d = np.max(np.abs(a.coeffs_complex() - b.coeffs_complex()))
        assert d < 1e-8, (n, om, d)


def test_norm_sq_matches_direct_quadrature():
    p = monic_op(6, 9.0)
    om = p.omega

    def integrand(z):
        val = np.zeros_like(z)
        for c in reversed(p.coeffs_complex()):
            val = val * z + c
        return val * val * np.exp(1j * om * z)

    direct = integrate_contour(integrand, Path((-1.0, 1.0)), tol=1e-12)
    assert complex(p.norm_sq) == pytest.approx(direct, abs=1e-10)


def test_zeros_simple_cases():
    z1 = zeros_of(monic_op(1, 0.0))
    assert abs(z1.zeros[0]) < 1e-14
    z2 = zeros_of(monic_op(2, 0.0))
    assert np.allclose(sorted(z.real for z in z2.zeros),
                       [-1 / np.sqrt(3), 1 / np.sqrt(3)], atol=1e-12)


def test_odd_degree_imaginary_zero():
    zs = zeros_of(monic_op(3, 9.0))  # p_3 at lambda = 3
    assert zs.imaginary_axis_index is not None
    assert abs(zs.imaginary_zero.real) < 1e-8
    others = [z for i, z in enumerate(zs.zeros) if i != zs.imaginary_axis_index]
    assert all(abs(z.real) > 1e-3 for z in others)


def test_zeros_approach_pm1_at_large_omega():
    def spread(n, om):
        zs = zeros_of(monic_op(n, om)).zeros
        return max(min(abs(z - 1.0), abs(z + 1.0)) for z in zs)

    assert spread(4, 200.0) < spread(4, 20.0)


def test_validation():
    with pytest.raises(ValidationError):
        monic_op(-1, 3.0)
    with pytest.raises(ValidationError):
        zeros_of(monic_op(0, 3.0))


def test_existence_scan_degree_one():
    # m_0 = 2 sin(omega)/omega -> conditioning blows up near omega = pi
    pts = existence_scan(1, 3.0, 3.3, 31)
    conds = [p.cond for p in pts]
    peak = max(range(len(pts)), key=lambda i: conds[i])
    assert abs(pts[peak].lam - np.pi) < 0.05
    # approaching the zero of m_0, the diagnostic crosses the flag threshold
    close = existence_scan(1, np.pi - 1e-10, np.pi + 1e-10, 3)
    assert any(p.flagged for p in close)


def test_existence_scan_legendre_benign():
    pts = existence_scan(2, 1e-6, 0.5, 8)
    assert not any(p.flagged for p in pts)


def test_existence_scan_finitely_many_flags():
    pts = existence_scan(5, 2.0, 10.0, 100)
    flagged = [p for p in pts if p.flagged]
    assert len(flagged) < 25  # isolated near-singular rates, not a plateau
