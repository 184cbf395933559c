import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import spherical_jn

from kisspoly.contour import integrate_contour
from kisspoly.geometry import Path
from kisspoly.moments import (modified_moments, moments, raw_moments,
                              spherical_jn_sequence)


def test_small_omega_limit():
    m = raw_moments(1e-9, 4)
    assert m[0] == pytest.approx(2.0, abs=1e-12)
    assert m[1] == pytest.approx(0.0, abs=1e-8)
    assert m[2] == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_omega_pi_m0_vanishes():
    assert abs(raw_moments(np.pi, 0)[0]) < 1e-15


def test_m1_closed_form():
    m = raw_moments(10.0, 1)
    want = -2j * (np.cos(10.0) / 10.0 - np.sin(10.0) / 100.0)
    assert m[1] == pytest.approx(want, abs=1e-14)


def test_m1_oracle_quadrature():
    om = 10.0
    oracle = integrate_contour(lambda z: z * np.exp(1j * om * z), Path((-1, 1)),
                               tol=1e-13)
    assert raw_moments(om, 1)[1] == pytest.approx(oracle, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.01, max_value=80.0))
def test_weight_conjugation_symmetry(om):
    K = 8
    plus = raw_moments(om, K)
    minus = raw_moments(-om, K)
    for a, b in zip(plus, minus):
        assert np.conj(a) == pytest.approx(b, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.01, max_value=80.0))
def test_parity_structure(om):
    m = raw_moments(om, 7)
    for k in range(8):
        if k % 2 == 0:
            assert abs(m[k].imag) < 1e-12
        else:
            assert abs(m[k].real) < 1e-12


def test_spherical_bessel_vs_scipy():
    for om in (0.25, 2.0, np.pi, 31.4, 120.0):
        ours = np.array(spherical_jn_sequence(om, 30))
        ref = spherical_jn(np.arange(31), om)
        assert np.max(np.abs(ours - ref)) < 5e-15


def test_modified_equals_bessel_identity():
    om = 17.0
    mu = modified_moments(om, 12)
    js = spherical_jn(np.arange(13), om)
    for k in range(13):
        assert mu[k] == pytest.approx(2.0 * 1j ** k * js[k], abs=1e-14)


def test_modified_vs_quadrature_oracle():
    from numpy.polynomial.legendre import Legendre
    om = 23.0
    mu = modified_moments(om, 6)
    for k in (0, 3, 6):
        Pk = Legendre.basis(k)
        oracle = integrate_contour(lambda z: Pk(z.real) * np.exp(1j * om * z),
                                   Path((-1, 1)), tol=1e-13)
        assert mu[k] == pytest.approx(oracle, abs=1e-12)


def test_mp_double_agreement():
    a = raw_moments(37.0, 20)
    b = raw_moments(37.0, 20, dps=40)
    for x, y in zip(a, b):
        assert abs(x - complex(y)) < 1e-13


def test_table_container():
    t = moments(5.0, 6)
    assert t.K == 6
    assert len(t.raw) == 7 and len(t.modified) == 7
    assert t.raw_array().shape == (7,)
