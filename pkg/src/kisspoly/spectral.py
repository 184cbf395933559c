"""The spectral curve xi^2 = Q(z) and its scalar functions.

Q is the rational function

    Q(z; lambda, x) = -(lambda^2/4) (z - z_l)(z + conj(z_l)) / (z^2 - 1),
    z_l = x + 2i/lambda,

with simple poles at +-1 and, for x > 0, simple zeros at z_l and
-conj(z_l).  The branch of Q^{1/2} used everywhere is the one fixed by

    Q^{1/2}(z) = -i lambda/2 - 1/z + O(1/z^2),    z -> infinity.

It is realized in closed form as a product of two Moebius-ratio square
roots, each single-valued off the straight segment joining a zero of Q to
the adjacent pole.  Those two segments ("segment mode") are the initial
cut system; once the critical trajectories have been traced, the cuts can
be swapped for the curved arcs ("arc mode"), in which case the closed form
is corrected by a locally constant sign inside each lens bounded by an arc
and its chord.

The Boutroux condition fixes the free real parameter x: psi(x) is the real
part of the segment integral of the cut boundary value Q_+^{1/2} from z_l
to 1, and x_* is its unique root in (0, 1) for supercritical lambda.
kappa is then the (purely imaginary) segment integral between the two
zeros, and phi(z) is the normalized antiderivative of Q^{1/2} based at 1.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .contour import integrate_contour
from .errors import NumericalError, ValidationError
from .geometry import ObstacleSet, Path, plan_path, point_in_polygon
from .rootfind import find_root_bracketed

__all__ = ["lambda_crit", "Q", "z_lambda", "psi", "psi0_closed_form",
           "solve_boutroux", "SpectralCurve", "PhiFunction", "phi", "phi2",
           "ell_constant", "q_sqrt_plus_segment"]

_RAY_FAR = 1e4


def lambda_crit(tol=1e-12):
    """The critical rate: unique positive root of
    2 log((2 + sqrt(l^2+4))/l) - sqrt(l^2+4) = 0  (approx 1.32549)."""

    def f(lam):
        s = np.sqrt(lam * lam + 4.0)
        return 2.0 * np.log((2.0 + s) / lam) - s

    return find_root_bracketed(f, 0.5, 3.0, tol=tol)


def z_lambda(x, lam):
    return x + 2j / lam


def Q(z, lam, x):
    """The rational function Q(z; lambda, x); poles at +-1 rejected."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.minimum(np.abs(z - 1.0), np.abs(z + 1.0)) < 1e-14):
        raise ValidationError("Q has poles at +-1")
    zl = z_lambda(x, lam)
    val = -(lam * lam / 4.0) * (z - zl) * (z + np.conj(zl)) / (z * z - 1.0)
    return val if val.shape else complex(val)


def _ratio_sqrt(z, a, b):
    """sqrt((z-a)/(z-b)), single-valued off the segment [a,b], -> 1 at infinity.

    The Moebius map (z-a)/(z-b) sends the segment onto (-inf, 0], so the
    principal square root of the ratio has exactly that segment as its cut.
    """
    return np.sqrt((z - a) / (z - b))


def q_sqrt_closed(z, lam, x):
    """Segment-mode branch of Q^{1/2} with the -i*lambda/2 - 1/z normalization."""
    zl = z_lambda(x, lam)
    return (-0.5j * lam) * _ratio_sqrt(z, zl, 1.0) * _ratio_sqrt(z, -np.conj(zl), -1.0)


def _q_plus_candidate(s, lam, x, which):
    """One of the two boundary branches of Q^{1/2} on a straight cut.

    The cut factor (s-a)/(s-b) is negative real on the open cut, so its
    square root there is +-i sqrt(|.|); this returns the +i choice times
    the off-cut factor, exactly evaluated.
    """
    s = np.asarray(s, dtype=complex)
    zl = z_lambda(x, lam)
    if which == "right":
        w_cut = (s - zl) / (s - 1.0)
        other = _ratio_sqrt(s, -np.conj(zl), -1.0)
    else:
        w_cut = (s + np.conj(zl)) / (s + 1.0)
        other = _ratio_sqrt(s, zl, 1.0)
    transverse = 1j * np.sqrt(np.maximum(-w_cut.real, 0.0))
    return (-0.5j * lam) * transverse * other


def q_sqrt_plus_segment(s, lam, x, which):
    """Boundary value Q_+^{1/2} on the straight cuts of segment mode.

    ``which`` is "right" for the cut z_l -> 1 or "left" for -1 -> -conj(z_l);
    + is the left-hand side of those orientations.  Exact on the open cut:
    the transverse square root is resolved analytically, only its overall
    sign is anchored numerically just off the cut midpoint.
    """
    if which not in ("right", "left"):
        raise ValidationError("which must be 'right' or 'left'")
    zl = z_lambda(x, lam)
    a, b = (zl, 1.0 + 0.0j) if which == "right" else (-1.0 + 0.0j, -np.conj(zl))
    mid = 0.5 * (a + b)
    normal = 1j * (b - a) / abs(b - a)
    eps = 1e-6 * max(1.0, abs(b - a))
    probe = q_sqrt_closed(mid + eps * normal, lam, x)
    ref = complex(_q_plus_candidate(mid, lam, x, which))
    sign = 1.0 if abs(probe - ref) < abs(probe + ref) else -1.0
    return sign * _q_plus_candidate(s, lam, x, which)


@dataclass(frozen=True)
class SpectralCurve:
    """Solved Boutroux data for one supercritical lambda.

    In segment mode the branch cuts of q_sqrt are the straight segments of
    the initial cut system; attach_arcs() swaps in traced trajectory arcs.
    """

    lam: float
    x_star: float
    kappa: float
    gamma1: object = None      # polyline -1 -> -conj z_*, or None in segment mode
    gamma2: object = None      # polyline z_*  -> 1
    _lens_polys: tuple = field(default=(), repr=False, compare=False)

    @property
    def z_star(self):
        return self.x_star + 2j / self.lam

    @property
    def y_star(self):
        return 2j / (self.lam * (1.0 - self.x_star))

    @property
    def arc_mode(self):
        return self.gamma2 is not None

    def attach_arcs(self, gamma1_pts, gamma2_pts):
        """Arc-mode copy of the curve with cuts on the traced trajectories."""
        g1 = np.asarray(gamma1_pts, dtype=complex)
        g2 = np.asarray(gamma2_pts, dtype=complex)
        lenses = []
        for arc in (g1, g2):
            if len(arc) >= 3:
                lenses.append(arc)  # closing edge of the pip polygon is the chord
        return replace(self, gamma1=g1, gamma2=g2, _lens_polys=tuple(lenses))

    def lens_sign(self, z):
        """+1 outside, -1 inside an odd number of arc/chord lenses."""
        if not self.arc_mode:
            return np.ones(np.shape(z)) if np.shape(z) else 1.0
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        sign = np.ones(zs.shape)
        for poly in self._lens_polys:
            inside = np.array([point_in_polygon(zz, poly) for zz in zs])
            sign = np.where(inside, -sign, sign)
        return sign if np.shape(z) else float(sign[0])

    def q_sqrt(self, z):
        """The normalized branch of Q^{1/2} with cuts on the current system."""
        base = q_sqrt_closed(z, self.lam, self.x_star)
        if not self.arc_mode:
            return base
        return base * self.lens_sign(z)

    def w(self, z):
        """W(z) = Q^{1/2}(z) (z^2 - 1); square root of a quartic polynomial."""
        z = np.asarray(z, dtype=complex)
        return self.q_sqrt(z) * (z * z - 1.0)

    def q_sqrt_plus(self, s, which):
        """Boundary value Q_+^{1/2} at samples s on (or beside) a cut.

        which: "gamma1"/"gamma2" in arc mode (samples should lie on the
        stored polylines), "left"/"right" in segment mode.

        In arc mode the + branch is carried along the arc by continuity of
        sqrt(Q) (the arc interior stays away from the other zeros/poles),
        anchored once at the arc midpoint from the + side.
        """
        if not self.arc_mode:
            return q_sqrt_plus_segment(s, self.lam, self.x_star,
                                       "right" if which in ("right", "gamma2") else "left")
        which = "gamma2" if which in ("gamma2", "right") else "gamma1"
        arc, wvals = self._arc_branch(which)
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        raw = np.sqrt(Q(s, self.lam, self.x_star))
        # sign-match each sample against the nearest interior arc vertex
        idx = 1 + np.argmin(np.abs(s[:, None] - arc[None, 1:-1]), axis=1)
        ref = wvals[idx]
        flip = np.abs(raw + ref) < np.abs(raw - ref)
        out = np.where(flip, -raw, raw)
        return out if s.shape != (1,) else complex(out[0])

    def _arc_branch(self, which):
        """Per-vertex values of Q_+^{1/2} along an arc polyline (cached)."""
        cache = getattr(self, "_branch_cache", None)
        if cache is None:
            cache = {}
            object.__setattr__(self, "_branch_cache", cache)
        if which in cache:
            return cache[which]
        arc = self.gamma2 if which == "gamma2" else self.gamma1
        mid_idx = len(arc) // 2
        mid = arc[mid_idx]
        tangent = arc[mid_idx + 1] - arc[mid_idx - 1]
        tangent /= abs(tangent)
        eps = 1e-4 * max(1.0, abs(mid))
        probe = complex(self.q_sqrt(mid + eps * 1j * tangent))
        w = np.empty(len(arc), dtype=complex)
        w[mid_idx] = np.sqrt(complex(Q(mid, self.lam, self.x_star)))
        if abs(w[mid_idx] - probe) > abs(w[mid_idx] + probe):
            w[mid_idx] = -w[mid_idx]
        for k in range(mid_idx + 1, len(arc)):
            cand = np.sqrt(complex(Q(arc[k], self.lam, self.x_star))) \
                if 0 < k < len(arc) - 1 else 0.0
            w[k] = _match_sign(cand, w[k - 1])
        for k in range(mid_idx - 1, -1, -1):
            cand = np.sqrt(complex(Q(arc[k], self.lam, self.x_star))) \
                if 0 < k < len(arc) - 1 else 0.0
            w[k] = _match_sign(cand, w[k + 1])
        cache[which] = (arc, w)
        return arc, w


def _match_sign(cand, ref):
    """cand or -cand, whichever continues ref; 0 passes through."""
    if cand == 0.0:
        return 0.0
    return -cand if abs(cand + ref) < abs(cand - ref) else cand


def segment_cut_integral(lam, x, which, tol=1e-13):
    """int of Q_+^{1/2}(s) ds along a straight cut, cancellation-free.

    With s(t) = a + t(b-a) the transverse root is exactly
    i sqrt(t/(1-t)) ("right" cut) or i sqrt((1-t)/t) ("left"), so both
    endpoint singularities can be removed by u^2 substitutions evaluated
    in exact parameter arithmetic; no (s - pole) difference is ever
    formed, which keeps the roundoff floor at machine epsilon even for
    large lambda.
    """
    zl = z_lambda(x, lam)
    a, b = (zl, 1.0 + 0.0j) if which == "right" else (-1.0 + 0.0j, -np.conj(zl))

    def other(s):
        if which == "right":
            return _ratio_sqrt(s, -np.conj(zl), -1.0)
        return _ratio_sqrt(s, zl, 1.0)

    # orientation sign of the + boundary value, anchored off the midpoint
    mid = 0.5 * (a + b)
    normal = 1j * (b - a) / abs(b - a)
    eps = 1e-6 * max(1.0, abs(b - a))
    probe = q_sqrt_closed(mid + eps * normal, lam, x)
    ref = complex(_q_plus_candidate(mid, lam, x, which))
    sign = 1.0 if abs(probe - ref) < abs(probe + ref) else -1.0
    pref = sign * (-0.5j * lam) * 1j * (b - a)

    # transverse(t) = sqrt(t/(1-t)) for "right", sqrt((1-t)/t) for "left";
    # combined with the 2u du measure every half-integrand below is smooth
    def lower_half(u):  # t = u^2
        u = np.asarray(u).real
        s = a + (b - a) * (u * u)
        if which == "right":
            fac = 2.0 * u * u / np.sqrt(1.0 - u * u)
        else:
            fac = 2.0 * np.sqrt(1.0 - u * u)
        return pref * fac * other(s)

    def upper_half(u):  # t = 1 - u^2
        u = np.asarray(u).real
        s = b - (b - a) * (u * u)
        if which == "right":
            fac = 2.0 * np.sqrt(1.0 - u * u)
        else:
            fac = 2.0 * u * u / np.sqrt(1.0 - u * u)
        return pref * fac * other(s)

    um = 1.0 / np.sqrt(2.0)
    lo = integrate_contour(lower_half, Path((0.0, um)), tol=0.5 * tol)
    hi = integrate_contour(upper_half, Path((um, 0.0)), tol=0.5 * tol)
    return lo - hi


def psi(x, lam, tol=1e-13):
    """psi(x) = Re int_{z_l}^{1} Q_+^{1/2}(s) ds along the straight cut."""
    if not (0.0 <= x <= 1.0) or lam <= 0:
        raise ValidationError("psi needs 0 <= x <= 1 and lambda > 0")
    return float(segment_cut_integral(lam, x, "right", tol=tol).real)


def psi0_closed_form(lam):
    """psi(0) = log((2 + sqrt(4+lambda^2))/lambda) - sqrt(4+lambda^2)/2."""
    s = np.sqrt(4.0 + lam * lam)
    return float(np.log((2.0 + s) / lam) - 0.5 * s)


def solve_boutroux(lam, xtol=1e-12, check_tol=1e-8):
    """Solve the Boutroux condition for x_* and build the spectral curve.

    Asserts the defining identities before returning: psi(x_*) ~ 0, the
    half-mass identity int_{z_*}^1 Q_+^{1/2} = pi i/2, and kappa real.
    """
    lam = float(lam)
    lc = lambda_crit()
    if lam <= lc:
        raise ValidationError(f"supercritical regime needs lambda > {lc:.6f}")
    x_star = find_root_bracketed(lambda x: psi(x, lam), 0.0, 1.0, tol=xtol)

    zs = z_lambda(x_star, lam)
    seg = Path((-np.conj(zs), zs))
    mid_int = integrate_contour(lambda s: q_sqrt_closed(s, lam, x_star), seg,
                                tol=1e-13, singular_endpoints=(seg.start, seg.end))
    if abs(mid_int.real) > check_tol:
        raise NumericalError(
            f"kappa integral has real part {mid_int.real:.3e}; branch bug?")
    kappa = float(mid_int.imag)

    half = segment_cut_integral(lam, x_star, "right", tol=1e-13)
    if abs(half - 0.5j * np.pi) > 1e-6:
        raise NumericalError(
            f"half-mass identity violated: got {half:.8f}, want pi i/2")
    return SpectralCurve(lam=lam, x_star=float(x_star), kappa=kappa)


@dataclass
class PhiFunction:
    """phi(z) = int_1^z Q^{1/2} + i kappa/2 (mod pi i) and friends.

    Paths of integration avoid (-inf, -1], the cuts, and (when present)
    the connecting contour gamma_hat.  Values are canonical representatives
    for the fixed planner route; comparisons should be made modulo pi*i.
    """

    curve: SpectralCurve
    gamma_hat: object = None
    clearance: float = 1e-3
    modulus: complex = np.pi * 1j
    _obstacles: object = field(default=None, repr=False)

    def obstacles(self):
        if self._obstacles is None:
            obs = [np.array([-_RAY_FAR + 0j, -1.0 + 0j])]
            if self.curve.arc_mode:
                obs.append(self.curve.gamma1)
                obs.append(self.curve.gamma2)
            else:
                zs = self.curve.z_star
                obs.append(np.array([-1.0 + 0j, -np.conj(zs)]))
                obs.append(np.array([zs, 1.0 + 0j]))
            if self.gamma_hat is not None:
                obs.append(np.asarray(self.gamma_hat, dtype=complex))
            self._obstacles = ObstacleSet(obs, clearance=self.clearance)
        return self._obstacles

    def plan(self, src, dst, via=None):
        # via points here are always approach hints pinning a side
        return plan_path(src, dst, self.obstacles(), clearance=self.clearance,
                         via=via, final_leg_direct=via is not None)

    def integral_from(self, base, z, tol=1e-11, via=None, path=None):
        """int_base^z Q^{1/2} ds along a planned (or given) admissible path."""
        z, base = complex(z), complex(base)
        if path is None:
            if z == base:
                return 0.0 + 0.0j
            if (via is None and abs(z - base) < 0.05
                    and not self.obstacles().segment_crosses(base, z)):
                path = Path((base, z))  # micro-leg off a branch point
            else:
                path = self.plan(base, z, via=via)
        return integrate_contour(self.curve.q_sqrt, path, tol=tol,
                                 singular_endpoints=(base,))


def phi(z, pf, tol=1e-11, via=None, path=None):
    """phi(z) = int_1^z Q^{1/2} ds + i kappa/2; value for the planned route."""
    val = pf.integral_from(1.0 + 0.0j, z, tol=tol, via=via, path=path)
    return val + 0.5j * pf.curve.kappa


def phi2(z, pf, tol=1e-11, via=None, path=None):
    """phi^(2)(z) = int_{-conj z_*}^z Q^{1/2} ds - i kappa/2."""
    base = -np.conj(pf.curve.z_star)
    val = pf.integral_from(base, z, tol=tol, via=via, path=path)
    return val - 0.5j * pf.curve.kappa


def ell_constant(pf, R=1000.0, tol=1e-6):
    """The constant l in phi(z) = -i lam z/2 - log z + i kappa/2 - l + O(1/z).

    Sampled at z = iR, 2iR, 4iR on the imaginary axis with quadratic
    Richardson extrapolation; the two successive extrapolants must agree
    to tol or the computation is rejected.
    """
    lam = pf.curve.lam

    def g(Rv):
        z = 1j * Rv
        ph = phi(z, pf, tol=1e-10)
        return -0.5j * lam * z - np.log(z) + 0.5j * pf.curve.kappa - ph

    g1, g2, g4 = g(R), g(2 * R), g(4 * R)
    lin1 = 2.0 * g2 - g1
    lin2 = 2.0 * g4 - g2
    quad = (8.0 * g4 - 6.0 * g2 + g1) / 3.0
    if abs(lin2 - lin1) > 50 * tol or abs(quad - lin2) > 10 * tol:
        raise NumericalError(
            f"ell extrapolation unstable: {lin1:.8f} vs {lin2:.8f}")
    return quad
