"""Construction of the kissing polynomials p_n^omega.

p_n^omega is the monic degree-n polynomial satisfying

    int_{-1}^{1} p_n(z) z^k e^{i omega z} dz = 0,    k = 0..n-1.

Two constructions are provided:

* ``hankel``  -- solve the raw-moment Hankel system directly.  Simple and
  a good cross-check, but its conditioning deteriorates catastrophically
  with n (well before n = 40).
* ``modified`` (default) -- Wheeler's algorithm run on monic-Legendre
  modified moments, producing the complex recurrence coefficients
  (alpha_k, beta_k) and from them the monic polynomial.  This is the
  standard cure for the Hankel conditioning problem and reaches the
  degrees the zero-attractor experiments need.

Because the weight is complex, the polynomials can fail to exist (the
relevant Hankel determinant can vanish).  In floating point that exact
degeneration is invisible; it is operationalized here as a conditioning
diagnostic: the worst cancellation ratio in the Wheeler pivots.  When the
diagnostic exceeds ``precision.AUTO_ESCALATE_COND`` the construction is
automatically redone in extended precision.
"""

from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import ExistenceError, NumericalError, ValidationError
from .moments import modified_moments, raw_moments
from .precision import AUTO_ESCALATE_COND, EXTENDED_DPS, workdps
from .rootfind import polynomial_roots, polynomial_roots_mp

__all__ = ["ComplexPolynomial", "ZeroSet", "monic_op", "zeros_of",
           "existence_scan", "monic_legendre_coeffs", "legendre_leading_coeff"]


def legendre_leading_coeff(n, dps=None):
    """Leading coefficient (2n)! / (2^n n!^2) of the standard Legendre P_n."""
    if dps is None:
        out = 1.0
        for k in range(1, n + 1):
            out *= (2 * k - 1) / k  # telescoping product form of the ratio
        return out
    with workdps(dps):
        return mp.factorial(2 * n) / (mp.mpf(2) ** n * mp.factorial(n) ** 2)


def monic_legendre_coeffs(n):
    """Ascending coefficients of the monic Legendre polynomial of degree n.

    Classical three-term recurrence with a_l = 0, b_l = l^2/(4l^2 - 1);
    used as the independent oracle for omega = 0 constructions.
    """
    prev = np.array([1.0])
    if n == 0:
        return prev
    cur = np.array([0.0, 1.0])
    for l in range(1, n):
        b = l * l / (4.0 * l * l - 1.0)
        nxt = np.zeros(l + 2)
        nxt[1:] = cur
        nxt[:l] -= b * prev
        prev, cur = cur, nxt
    return cur


@dataclass(frozen=True)
class ZeroSet:
    """Zeros of a kissing polynomial, deterministically ordered.

    ``imaginary_axis_index`` points at the single purely imaginary zero of
    an odd-degree polynomial (None when no zero qualifies).
    """

    zeros: np.ndarray
    imaginary_axis_index: object = None
    re_tol: float = 1e-8

    def __len__(self):
        return len(self.zeros)

    def __iter__(self):
        return iter(self.zeros)

    @property
    def imaginary_zero(self):
        if self.imaginary_axis_index is None:
            return None
        return self.zeros[self.imaginary_axis_index]


@dataclass(frozen=True)
class ComplexPolynomial:
    """Monic polynomial with complex coefficients, plus build diagnostics.

    coeffs are ascending; ``norm_sq`` is int p_n^2 e^{i omega z} dz (the
    reciprocal of kappa_n^2); ``cond`` is the conditioning diagnostic of
    the defining linear system; ``residual`` is the worst relative
    orthogonality defect actually achieved.
    """

    coeffs: tuple
    degree: int
    omega: float
    norm_sq: complex
    cond: float
    residual: float
    method: str = "modified"
    dps: object = None

    def __call__(self, z):
        if self.dps is not None and not isinstance(z, (np.ndarray,)):
            with workdps(self.dps):
                acc = mp.mpc(0)
                zz = mp.mpc(z)
                for c in reversed(self.coeffs):
                    acc = acc * zz + c
                return acc
        acc = np.zeros_like(np.asarray(z, dtype=complex))
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    def coeffs_complex(self):
        return np.asarray([complex(c) for c in self.coeffs])


def _wheeler(nu, n, dps=None):
    """Wheeler's algorithm on monic-Legendre modified moments.

    Returns (alphas, betas, sigma_diag, cond) where sigma_diag[k] is
    int p_k^2 dmu and cond is the worst row-scale / pivot cancellation
    ratio (a lower bound for the conditioning; the construction-level
    sensitivity probe in _build_modified supplies the escalation trigger).
    """
    need = 2 * n + 2
    if len(nu) < need:
        raise ValidationError("not enough modified moments for this degree")

    def aux_b(l):
        return l * l / (4.0 * l * l - 1.0) if dps is None else \
            mp.mpf(l * l) / (4 * l * l - 1)

    zero = 0.0 + 0.0j if dps is None else mp.mpc(0)
    sig_prev = {}
    sig_cur = {l: nu[l] for l in range(need)}
    alphas = [nu[1] / nu[0]]
    betas = [nu[0]]
    diag = [nu[0]]
    row_scale = max(abs(v) for v in sig_cur.values()) + 1e-300
    cond = max(1.0, float(row_scale / (abs(nu[0]) + 1e-300)))
    for k in range(1, n + 1):
        sig_new = {}
        lmax = need - k - 1
        for l in range(k, lmax + 1):
            sig_new[l] = (sig_cur[l + 1]
                          - alphas[k - 1] * sig_cur[l]
                          - betas[k - 1] * sig_prev.get(l, zero)
                          + aux_b(l) * sig_cur[l - 1])
        pivot = sig_new.get(k, zero)
        row_scale = max(abs(v) for v in sig_new.values()) + 1e-300
        cond = max(cond, float(row_scale / (abs(pivot) + 1e-300)))
        diag.append(pivot)
        if k <= n - 1:
            if abs(pivot) == 0.0:
                raise ExistenceError(
                    f"Wheeler pivot sigma_{k},{k} vanished", cond=float("inf"))
            alphas.append(sig_new[k + 1] / pivot - sig_cur[k] / sig_cur[k - 1])
            betas.append(pivot / sig_cur[k - 1])
        sig_prev, sig_cur = sig_cur, sig_new
    return alphas, betas, diag, cond


def _poly_from_recurrence(alphas, betas, n, dps=None):
    """Monic p_n from p_{k+1} = (z - alpha_k) p_k - beta_k p_{k-1}."""
    zero = 0.0 + 0.0j if dps is None else mp.mpc(0)
    one = 1.0 + 0.0j if dps is None else mp.mpc(1)
    prev = [one]
    if n == 0:
        return prev
    cur = [-alphas[0], one]
    for k in range(1, n):
        nxt = [zero] * (k + 2)
        for j, c in enumerate(cur):
            nxt[j + 1] += c
            nxt[j] -= alphas[k] * c
        for j, c in enumerate(prev):
            nxt[j] -= betas[k] * c
        prev, cur = cur, nxt
    return cur


def _orthogonality_residual(coeffs, raw, n):
    """Worst relative defect |sum_j c_j m_{k+j}| over k = 0..n-1."""
    worst = 0.0
    for k in range(n):
        num = abs(sum(c * raw[k + j] for j, c in enumerate(coeffs)))
        den = sum(abs(c) * abs(raw[k + j]) for j, c in enumerate(coeffs)) + 1e-300
        worst = max(worst, float(num / den))
    return worst


def _build_modified(n, omega, dps):
    K = 2 * n + 2
    nu_std = modified_moments(omega, K, dps=dps)
    with workdps(dps):
        nu = []
        for l in range(K + 1):
            nu.append(nu_std[l] / legendre_leading_coeff(l, dps=dps))
        alphas, betas, diag, cond = _wheeler(nu, n, dps=dps)
        coeffs = _poly_from_recurrence(alphas, betas, n, dps=dps)
        norm_sq = diag[n]
        cond = max(cond, _sensitivity_probe(nu, n, coeffs, dps))
    return coeffs, norm_sq, cond


def _sensitivity_probe(nu, n, coeffs, dps=None):
    """Measured conditioning of the moments -> coefficients map.

    Reruns the construction with eps-scale relative perturbations of the
    moments in two fixed (seed-free, reproducible) sign patterns and
    reports the amplification of the coefficient response.  This is the
    honest escalation trigger: the orthogonality residual alone cannot see
    forward error, because it is normalized by the same inflated
    coefficient scale that the error lives on.
    """
    if dps is None:
        eps = float(np.finfo(float).eps)
        base = np.asarray(coeffs)
        scale = np.abs(base) + 1.0
    else:
        eps = mp.mpf(10) ** (1 - dps)
    worst = 1.0
    for pattern in (lambda l: 1.0 if l % 2 == 0 else -1.0,
                    lambda l: 1.0 if l % 3 != 1 else -1.0):
        nu_p = [v * (1.0 + 8 * eps * pattern(l)) for l, v in enumerate(nu)]
        try:
            a_p, b_p, _, _ = _wheeler(nu_p, n, dps=dps)
            c_p = _poly_from_recurrence(a_p, b_p, n, dps=dps)
        except (ExistenceError, ZeroDivisionError, FloatingPointError):
            return float("inf")
        if dps is None:
            sens = float(np.max(np.abs(np.asarray(c_p) - base) / scale)) / (8 * eps)
        else:
            sens = float(max(abs(cp - c0) / (abs(c0) + 1.0)
                             for cp, c0 in zip(c_p, coeffs)) / (8 * eps))
        worst = max(worst, sens)
    return worst


def _build_hankel(n, omega, dps):
    raw = raw_moments(omega, 2 * n + 1, dps=dps)
    if n == 0:
        return [1.0 + 0.0j], raw[0], 1.0
    if dps is None:
        H = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                H[i, j] = raw[i + j]
        rhs = -np.asarray(raw[n:2 * n])
        cond = float(np.linalg.cond(H))
        if not np.isfinite(cond) or cond > AUTO_ESCALATE_COND:
            raise ExistenceError("raw Hankel system too ill-conditioned for "
                                 "doubles", cond=cond)
        c = np.linalg.solve(H, rhs)
        coeffs = list(c) + [1.0 + 0.0j]
    else:
        with workdps(dps):
            H = mp.matrix(n, n)
            for i in range(n):
                for j in range(n):
                    H[i, j] = raw[i + j]
            rhs = mp.matrix([-raw[n + k] for k in range(n)])
            c = mp.lu_solve(H, rhs)
            coeffs = [c[k] for k in range(n)] + [mp.mpc(1)]
            cond = float("nan")  # no cheap mp condition estimate; residual rules
    norm_sq = sum(coeffs[j] * raw[n + j] for j in range(n + 1))
    return coeffs, norm_sq, cond


def monic_op(n, omega, dps=None, method="modified", cond_threshold=AUTO_ESCALATE_COND):
    """Monic kissing polynomial of degree n for the weight e^{i omega z}.

    Parameters
    ----------
    n : int
    omega : float
    dps : int or None
        None for doubles; digits for mpmath.  Doubles escalate to
        ``EXTENDED_DPS`` automatically when the conditioning diagnostic
        crosses ``cond_threshold``.
    method : {"modified", "hankel"}

    Raises
    ------
    ExistenceError
        When the defining system is numerically singular at the working
        precision (the operational stand-in for honest nonexistence).
    """
    if n < 0:
        raise ValidationError("degree must be >= 0")
    omega = float(omega)
    if n == 0:
        raw = raw_moments(omega, 0, dps=dps)
        return ComplexPolynomial(coeffs=(1.0 + 0.0j,) if dps is None else (mp.mpc(1),),
                                 degree=0, omega=omega, norm_sq=raw[0], cond=1.0,
                                 residual=0.0, method=method, dps=dps)
    build = _build_modified if method == "modified" else _build_hankel
    next_dps = max(EXTENDED_DPS, 30 + n) if dps is None else dps + 20 + n // 4
    try:
        coeffs, norm_sq, cond = build(n, omega, dps)
    except ExistenceError:
        if dps is None or dps < 400:
            return monic_op(n, omega, dps=next_dps, method=method,
                            cond_threshold=cond_threshold)
        raise
    raw = raw_moments(omega, 2 * n + 1, dps=dps)
    with workdps(dps):
        residual = _orthogonality_residual(coeffs, raw, n)
    # escalate until the measured forward amplification leaves >= 12
    # digits of headroom at the working precision
    headroom = cond_threshold if dps is None else 10.0 ** (dps - 12)
    if cond > headroom or residual > (1e-7 if dps is None else 10.0 ** (10 - dps)):
        if (dps or 0) < 400:
            return monic_op(n, omega, dps=next_dps, method=method,
                            cond_threshold=cond_threshold)
        raise ExistenceError(
            f"degree-{n} system at omega={omega} stays singular even at "
            f"dps={dps} (diagnostic {cond:.3g})", cond=cond)
    return ComplexPolynomial(coeffs=tuple(coeffs), degree=n, omega=omega,
                             norm_sq=norm_sq, cond=cond, residual=residual,
                             method=method, dps=dps)


def zeros_of(p, re_tol=1e-8):
    """Deterministically ordered zeros; flags the purely imaginary one.

    For odd degree the reflection symmetry forces exactly one zero onto
    the imaginary axis (when zeros are simple); its index is reported.
    Polynomials built in extended precision get their zeros extracted in
    extended precision too (the monomial basis is too ill-conditioned in
    doubles at those degrees).
    """
    if p.degree < 1:
        raise ValidationError("need degree >= 1 to have zeros")
    if p.dps is not None:
        try:
            warm = polynomial_roots(p.coeffs_complex())
        except NumericalError:
            warm = None
        roots = np.asarray([complex(z) for z in
                            polynomial_roots_mp(p.coeffs, dps=p.dps, start=warm)])
    else:
        roots = polynomial_roots(p.coeffs_complex())
    idx = None
    if p.degree % 2 == 1:
        k = int(np.argmin(np.abs(roots.real)))
        if abs(roots[k].real) < re_tol:
            idx = k
    return ZeroSet(zeros=roots, imaginary_axis_index=idx, re_tol=re_tol)


@dataclass(frozen=True)
class ScanPoint:
    lam: float
    cond: float
    flagged: bool


def existence_scan(n, lambda_lo, lambda_hi, steps, flag_threshold=AUTO_ESCALATE_COND):
    """Conditioning of the degree-n system across a lambda grid (omega = n*lambda).

    Near-singular points are data, not failures: every grid point returns
    a ScanPoint, with ``flagged`` marking conditioning above the threshold.
    """
    if n < 1:
        raise ValidationError("existence scan needs n >= 1")
    out = []
    for lam in np.linspace(lambda_lo, lambda_hi, steps):
        omega = n * float(lam)
        try:
            K = 2 * n + 2
            nu_std = modified_moments(omega, K)
            nu = [nu_std[l] / legendre_leading_coeff(l) for l in range(K + 1)]
            _, _, _, cond = _wheeler(nu, n)
        except (ExistenceError, ZeroDivisionError, OverflowError):
            cond = float("inf")
        out.append(ScanPoint(lam=float(lam), cond=float(cond),
                             flagged=bool(cond > flag_threshold)))
    return out
