"""Moments of the oscillatory weight e^{i omega z} on [-1, 1].

Raw power moments

    m_k = int_{-1}^{1} z^k e^{i omega z} dz

satisfy the integration-by-parts recurrence

    m_0 = 2 sin(omega)/omega,
    m_k = (e^{i omega} - (-1)^k e^{-i omega})/(i omega) - (k/(i omega)) m_{k-1},

which is exact but increasingly ill-suited to large k (this is the
reference path; the better-behaved default uses Legendre moments).  For
|omega| < 1e-3 the recurrence divides by a near-zero and the moments are
computed from their Taylor series in omega instead.

Legendre (modified) moments reduce to spherical Bessel functions,

    mu_k = int_{-1}^{1} P_k(z) e^{i omega z} dz = 2 i^k j_k(omega),

and the j_k are generated by Miller's downward recurrence normalized with
sum_k (2k+1) j_k^2 = 1, which stays valid at the zeros of j_0.

Both paths run in doubles by default and in mpmath when ``dps`` is given.
"""

from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import ValidationError
from .precision import workdps

__all__ = ["MomentTable", "moments", "raw_moments", "modified_moments",
           "spherical_jn_sequence"]

_SMALL_OMEGA = 1e-3


@dataclass(frozen=True)
class MomentTable:
    """Raw and Legendre moments of e^{i omega z} up to index K."""

    omega: float
    K: int
    raw: tuple
    modified: tuple
    dps: object = None

    def raw_array(self):
        return np.asarray([complex(m) for m in self.raw])

    def modified_array(self):
        return np.asarray([complex(m) for m in self.modified])


def _raw_taylor(omega, K, ctx):
    """Taylor series in omega; used when the recurrence would divide by ~0."""
    out = []
    iw = ctx.mpc(0, omega) if ctx is mp else 1j * omega
    for k in range(K + 1):
        term = ctx.mpf(1) if ctx is mp else 1.0
        total = ctx.mpc(0) if ctx is mp else 0.0 + 0.0j
        j = 0
        while True:
            if (k + j) % 2 == 0:
                total += term * 2 / (k + j + 1)
            j += 1
            term = term * iw / j
            if abs(term) < 1e-25 * (1 + abs(total)) and j > 4:
                break
        out.append(total)
    return out


def raw_moments(omega, K, dps=None):
    """m_k for k = 0..K by the integration-by-parts recurrence."""
    if K < 0:
        raise ValidationError("K must be >= 0")
    omega = float(omega)
    with workdps(dps):
        ctx = mp if dps is not None else None
        if abs(omega) < _SMALL_OMEGA:
            vals = _raw_taylor(omega, K, mp if dps is not None else np)
            return tuple(vals)
        if dps is None:
            iw = 1j * omega
            eplus, eminus = np.exp(iw), np.exp(-iw)
            m = [2.0 * np.sin(omega) / omega + 0.0j]
            for k in range(1, K + 1):
                bdry = (eplus - (-1) ** k * eminus) / iw
                m.append(bdry - (k / iw) * m[-1])
            return tuple(m)
        iw = mp.mpc(0, omega)
        eplus, eminus = mp.exp(iw), mp.exp(-iw)
        m = [mp.mpc(2 * mp.sin(omega) / omega)]
        for k in range(1, K + 1):
            bdry = (eplus - (-1) ** k * eminus) / iw
            m.append(bdry - (k / iw) * m[-1])
        return tuple(m)


def spherical_jn_sequence(omega, K, dps=None):
    """j_0..j_K at omega via Miller's downward recurrence.

    Normalization uses sum_k (2k+1) j_k(omega)^2 = 1 with a sign fixed
    against j_0 = sin(omega)/omega (or j_1 when omega is near a zero of
    sin), so the sequence stays accurate at omega = n*pi as well.
    """
    if K < 0:
        raise ValidationError("K must be >= 0")
    omega = float(omega)
    if dps is None:
        return _miller_double(omega, K)
    with workdps(dps):
        return _miller_mp(omega, K)


def _jn_smallarg(omega, K, ctx):
    # j_k = omega^k / (2k+1)!! * (1 - omega^2/(2(2k+3)) + omega^4/(8(2k+3)(2k+5)))
    out = []
    w2 = omega * omega
    dfact = 1.0 if ctx is np else mp.mpf(1)
    power = 1.0 if ctx is np else mp.mpf(1)
    for k in range(K + 1):
        if k > 0:
            dfact *= (2 * k + 1)
            power *= omega
        corr = 1 - w2 / (2 * (2 * k + 3)) + w2 * w2 / (8 * (2 * k + 3) * (2 * k + 5))
        out.append(power / dfact * corr)
    return out


def _miller_double(omega, K):
    if abs(omega) < 1e-6:
        return tuple(_jn_smallarg(omega, K, np))
    start = K + 26 + int(1.3 * abs(omega))
    jp, jc = 0.0, 1.0
    vals = np.zeros(start + 1)
    vals[start] = jc
    for k in range(start, 0, -1):
        jm = (2 * k + 1) / omega * jc - jp
        jp, jc = jc, jm
        vals[k - 1] = jc
        if abs(jc) > 1e120:  # keep squares representable for the norm sum
            vals[k - 1:] /= 1e120
            jp /= 1e120
            jc /= 1e120
    peak = np.max(np.abs(vals))
    if peak > 0:
        vals /= peak
    norm = np.sum((2 * np.arange(start + 1) + 1) * vals ** 2)
    vals /= np.sqrt(norm)
    ref0 = np.sin(omega) / omega
    if abs(ref0) > 0.1 / (1 + abs(omega)):
        flip = vals[0] * ref0 < 0
    else:
        ref1 = np.sin(omega) / omega ** 2 - np.cos(omega) / omega
        flip = vals[1] * ref1 < 0
    if flip:
        vals = -vals
    return tuple(vals[:K + 1])


def _miller_mp(omega, K):
    w = mp.mpf(omega)
    if abs(w) < mp.mpf("1e-6"):
        return tuple(_jn_smallarg(w, K, mp))
    start = K + 30 + int(1.3 * abs(omega)) + mp.mp.dps
    jp, jc = mp.mpf(0), mp.mpf(1)
    vals = [mp.mpf(0)] * (start + 1)
    vals[start] = jc
    for k in range(start, 0, -1):
        jm = (2 * k + 1) / w * jc - jp
        jp, jc = jc, jm
        vals[k - 1] = jc
    norm = mp.fsum((2 * k + 1) * vals[k] ** 2 for k in range(start + 1))
    scale = 1 / mp.sqrt(norm)
    vals = [v * scale for v in vals]
    ref = mp.sin(w) / w
    if abs(ref) > mp.mpf("0.1") / (1 + abs(w)):
        flip = vals[0] * ref < 0
    else:
        ref1 = mp.sin(w) / w ** 2 - mp.cos(w) / w
        flip = vals[1] * ref1 < 0
    if flip:
        vals = [-v for v in vals]
    return tuple(vals[:K + 1])


def modified_moments(omega, K, dps=None):
    """mu_k = int P_k(z) e^{i omega z} dz = 2 i^k j_k(omega), k = 0..K."""
    js = spherical_jn_sequence(omega, K, dps=dps)
    if dps is None:
        return tuple(2.0 * (1j ** k) * js[k] for k in range(K + 1))
    with workdps(dps):
        return tuple(2 * mp.mpc(0, 1) ** k * js[k] for k in range(K + 1))


def moments(omega, K, dps=None):
    """Full moment table (raw + modified) for the weight e^{i omega z}."""
    return MomentTable(omega=float(omega), K=int(K),
                       raw=raw_moments(omega, K, dps=dps),
                       modified=modified_moments(omega, K, dps=dps),
                       dps=dps)
