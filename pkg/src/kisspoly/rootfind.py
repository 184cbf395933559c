"""Scalar and polynomial root finders.

find_root_bracketed is a guarded hybrid of bisection and secant steps: the
secant step is taken whenever it lands inside the current bracket,
otherwise the step falls back to bisection, so convergence is never worse
than bisection.

polynomial_roots implements the Aberth-Ehrlich simultaneous iteration with
a deterministic, seed-free initialization (all starting points on a circle
whose radius comes from the Cauchy coefficient bound), so repeated runs
and CI are bit-for-bit reproducible.
"""

import mpmath as mp
import numpy as np

from .errors import NumericalError, ValidationError
from .precision import workdps

__all__ = ["find_root_bracketed", "polynomial_roots", "polynomial_roots_mp"]


def find_root_bracketed(f, lo, hi, tol=1e-12, max_iter=200):
    """Root of a continuous real function on a sign-changing bracket.

    Returns x with bracket width < tol and |f| small.  Raises
    ValidationError if f(lo) and f(hi) do not have opposite signs.
    """
    lo, hi = float(lo), float(hi)
    flo, fhi = float(f(lo)), float(f(hi))
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValidationError(
            f"no sign change on [{lo}, {hi}]: f={flo:.3g}, {fhi:.3g}")
    for _ in range(max_iter):
        if hi - lo < tol:
            break
        # secant proposal from the bracket endpoints
        x = hi - fhi * (hi - lo) / (fhi - flo)
        margin = 0.01 * (hi - lo)
        if not (lo + margin < x < hi - margin):
            x = 0.5 * (lo + hi)
        fx = float(f(x))
        if fx == 0.0:
            return x
        if flo * fx < 0.0:
            hi, fhi = x, fx
        else:
            lo, flo = x, fx
    return 0.5 * (lo + hi)


def _cauchy_radius(coeffs):
    """Cauchy bound: all roots lie in |z| < 1 + max|a_k/a_n|."""
    an = coeffs[-1]
    return 1.0 + float(np.max(np.abs(coeffs[:-1] / an), initial=0.0))


def polynomial_roots(coeffs, tol=1e-13, max_iter=400):
    """All roots of a polynomial, by Aberth-Ehrlich simultaneous iteration.

    Parameters
    ----------
    coeffs : sequence of complex
        Coefficients in ascending degree order; the leading one nonzero.
    tol : float
        Residual target, relative to the coefficient scale at each root.

    Returns
    -------
    ndarray of complex
        Roots sorted by real part, then imaginary part.

    Raises
    ------
    NumericalError
        Listing the unconverged roots if the iteration cap is reached.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or c.size < 2:
        raise ValidationError("need a polynomial of degree >= 1")
    if c[-1] == 0:
        raise ValidationError("leading coefficient must be nonzero")
    n = c.size - 1
    dc = c[1:] * np.arange(1, n + 1)

    # deterministic ring of starting points; the irrational phase offset
    # avoids symmetric stalls on polynomials with ring-symmetric roots
    r = 0.8 * _cauchy_radius(c)
    angles = 2.0 * np.pi * np.arange(n) / n + 0.4
    z = r * np.exp(1j * angles)

    def horner(x, cf):
        acc = np.zeros_like(x)
        for a in cf[::-1]:
            acc = acc * x + a
        return acc

    scale_coeff = np.abs(c)
    for it in range(max_iter):
        p = horner(z, c)
        dp = horner(z, dc)
        scale = np.polyval(scale_coeff[::-1], np.abs(z)) + 1e-300
        done = np.abs(p) <= tol * scale
        if np.all(done):
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = np.where(dp != 0, p / dp, 0.0)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            sums = np.sum(1.0 / diff, axis=1)
            denom = 1.0 - newton * sums
            step = np.where(np.abs(denom) > 1e-300, newton / denom, newton)
        step = np.where(done, 0.0, step)
        # damp absurd steps (near-multiple roots early in the iteration)
        big = np.abs(step) > 2.0 * r
        step[big] *= (2.0 * r) / np.abs(step[big])
        z = z - step
    else:
        p = horner(z, c)
        scale = np.polyval(scale_coeff[::-1], np.abs(z)) + 1e-300
        bad = np.abs(p) > tol * scale
        if np.any(bad):
            raise NumericalError(
                f"Aberth iteration did not converge for {int(bad.sum())} roots: "
                f"{z[bad]}")

    order = np.lexsort((z.imag, z.real))
    return z[order]


def polynomial_roots_mp(coeffs, dps=50, max_iter=400, start=None):
    """Aberth-Ehrlich in mpmath; needed once the monomial-basis root
    condition number exceeds what doubles can represent (degree ~ 30+ for
    the kissing polynomials at large omega).

    ``start`` may supply warm-start points (e.g. the double-precision
    Aberth output); otherwise the same deterministic circle as the double
    version is used.  Returns a list of mp.mpc roots in lexicographic
    order.
    """
    with workdps(dps):
        c = [mp.mpc(v) for v in coeffs]
        n = len(c) - 1
        if n < 1 or c[-1] == 0:
            raise ValidationError("need degree >= 1 with nonzero leading coefficient")
        dc = [c[k] * k for k in range(1, n + 1)]
        r = 0.8 * (1.0 + max((abs(v) for v in c[:-1]), default=0.0) / abs(c[-1]))
        if start is not None and len(start) == n:
            z = [mp.mpc(v) for v in start]
        else:
            z = [mp.mpc(r) * mp.exp(mp.mpc(0, 2 * mp.pi * k / n + 0.4))
                 for k in range(n)]
        tol = mp.mpf(10) ** (10 - dps)
        cabs = [float(abs(a)) for a in c]

        def horner(x, cf):
            acc = mp.mpc(0)
            for a in reversed(cf):
                acc = acc * x + a
            return acc

        done = [False] * n
        for _ in range(max_iter):
            progressed = False
            for i in range(n):
                if done[i]:
                    continue
                progressed = True
                pv = horner(z[i], c)
                az = float(abs(z[i]))
                scale = 0.0
                power = 1.0
                for a in cabs:
                    scale += a * power
                    power *= az
                if abs(pv) <= tol * scale:
                    done[i] = True
                    continue
                dpv = horner(z[i], dc)
                if dpv == 0:
                    z[i] = z[i] * (1 + mp.mpf("1e-3"))
                    continue
                w = pv / dpv
                s = mp.fsum((1 / (z[i] - z[j]) for j in range(n) if j != i))
                denom = 1 - w * s
                step = w / denom if abs(denom) > mp.mpf("1e-300") else w
                if abs(step) > 2 * r:
                    step *= 2 * r / abs(step)
                z[i] = z[i] - step
            if not progressed:
                break
        if not all(done):
            raise NumericalError(
                f"mp Aberth did not converge for {done.count(False)} roots")
        z.sort(key=lambda v: (mp.mpf(v.real), mp.mpf(v.imag)))
        return z
