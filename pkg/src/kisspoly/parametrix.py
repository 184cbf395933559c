"""Genus-1 global parametrix: elliptic periods, the model-problem solution,
and the strong-asymptotic evaluator.

The spectral curve xi^2 = Q(z) is a genus-1 surface with branch points
-1, -conj z_*, z_*, 1.  On it,

    Lambda_0          = dz / (xi (z^2-1))                (holomorphic)
    Lambda_a^{(nu)}   = (1/2) (1/(z-a)) (1 + xi(a^{(nu)}) (a^2-1)
                        / (xi(z)(z^2-1))) dz             (third kind)

and the differential used to build the parametrix entries is

    Omega(a, b) = Lambda_a^{(nu)} - Lambda_{y_*}^{(sigma)} + b Lambda_0 ,

with y_* = 2i/(lambda (1-x_*)) the finite zero of eta - 1/eta.  The
A-cycle is realized as the straight segment between -conj z_* and z_*
covered on both sheets, the B-cycle as a loop around the left cut that
stays off the imaginary axis; both cycle integrals contract to explicit
cut/segment integrals of W(s) = Q^{1/2}(s)(s^2-1).

Matching the periods (mod 2 pi i) to

    oint_A Omega = 2 kappa i,      oint_B Omega = n pi i,

fixes a pole location a_* = i tau_* in iR and a real coefficient b_*:
the real part of the B-period is killed by the linear b(tau), and tau is
found by a bracketed solve on the continuous lift of the A-period phase
Psi_A(tau), which is injective with total range 1.  The solve degenerates
exactly when 2 kappa - c falls in 2 pi Z (the theta-divisor set of rates),
where a_* escapes to infinity; such requests are refused with a distinct
error carrying the proximity.

u_1^{(1)}(z) = int_1^z Omega restricted to the first sheet, along paths
that never cross the cuts, the connecting contour gamma_hat, or the real
rays, gives the model solution entry

    M_11(z) = ((eta + 1/eta)/2) exp(u_1^{(1)}(z) - u_1^{(1)}(infinity)),

and the degree-n polynomial is reproduced to leading order by

    p_n(z) ~ M_11(z) exp(n (i kappa/2 - i lambda z/2 - l - phi(z))).

The pi*i ambiguity of phi and the 2 pi i ambiguity of u are resolved by
evaluating both integrals over the same planned path, which makes the
product single-valued (their jumps across gamma_hat cancel exactly).
"""

from dataclasses import dataclass, field

import numpy as np

from .contour import integrate_contour
from .errors import NumericalError, ThetaStarError, ValidationError
from .geometry import ObstacleSet, Path, plan_path
from .rootfind import find_root_bracketed
from .spectral import PhiFunction, phi

__all__ = ["PeriodData", "PeriodSolution", "PeriodEngine", "Parametrix",
           "theta_star_scan", "parity_nu", "parity_sigma"]

THETA_TOLERANCE = 1e-3


def parity_nu(n_parity, k):
    """nu_{n,k} = n + k + 1 mod 2, valued in {1, 2} (0 maps to 2)."""
    r = (n_parity + k + 1) % 2
    return 2 if r == 0 else 1


def parity_sigma(k):
    """sigma_k = k + 1 mod 2, valued in {1, 2}."""
    r = (k + 1) % 2
    return 2 if r == 0 else 1


def sheet_sign(nu):
    """xi on sheet nu is (+1 for nu=1, -1 for nu=2) times the base branch."""
    return 1.0 if nu == 1 else -1.0


@dataclass(frozen=True)
class PeriodData:
    """Periods of the holomorphic differential and the constant c."""

    mA0: complex
    mA1: complex
    mB0: complex
    mB1: complex
    c_const: float
    parity_nu: int
    parity_sigma: int


@dataclass(frozen=True)
class PeriodSolution:
    """Pole/coefficient data solving the degree-n period-matching problem."""

    periods: PeriodData
    a_star: complex
    b_star: float
    n: int
    n_parity: int
    k: int
    theta_proximity: float
    residual_A: float
    residual_B: float


def _mod_2pi_dist(x):
    """Distance of a real number to the lattice 2 pi Z."""
    r = np.remainder(x, 2.0 * np.pi)
    return float(min(r, 2.0 * np.pi - r))


class PeriodEngine:
    """Cycle integrals on the spectral curve (either cut realization).

    All periods are homology invariants, so the engine runs identically on
    a segment-mode curve (cheap; no trajectory tracing needed) and on an
    arc-mode curve (used when the parametrix itself is being assembled).
    """

    def __init__(self, curve, tol=1e-10):
        self.curve = curve
        self.tol = tol
        self._cache = {}
        zs = curve.z_star
        self._seg = Path((-np.conj(zs), zs))
        if curve.arc_mode:
            pts = [curve.gamma1[0]]
            for p in curve.gamma1[1:]:
                if p != pts[-1]:
                    pts.append(p)
            self._cut_left = Path(tuple(pts))
        else:
            self._cut_left = Path((-1.0 + 0.0j, -np.conj(zs)))

    # -- basic building blocks -------------------------------------------
    def w_plus_left(self, s):
        which = "gamma1" if self.curve.arc_mode else "left"
        s = np.asarray(s, dtype=complex)
        return self.curve.q_sqrt_plus(s, which) * (s * s - 1.0)

    def w_sheet1(self, s):
        return self.curve.w(s)

    def _a_segment_path(self, pole=None):
        """The A-cycle's sheet-1 leg, detoured if a pole sits on it."""
        zs = self.curve.z_star
        lam = self.curve.lam
        cross = 2j / lam
        if pole is None or abs(pole - cross) > 0.45 * min(self.curve.x_star,
                                                          2.0 / lam):
            return self._seg
        r = 0.3 * min(self.curve.x_star, 2.0 / lam)
        return Path((-np.conj(zs), cross - r, cross - r - 1j * r,
                     cross + r - 1j * r, cross + r, zs))

    def seg_integral(self, extra=None, pole=None, tol=None):
        """int over the A segment of extra(s)/W(s) ds (sheet 1)."""
        path = self._a_segment_path(pole)
        ends = (path.start, path.end)

        def f(s):
            with np.errstate(divide="ignore", invalid="ignore"):
                w = self.w_sheet1(s)
                return (extra(s) if extra else 1.0) / w

        return integrate_contour(f, path, tol=tol or self.tol,
                                 singular_endpoints=ends)

    def cut_integral(self, extra=None, tol=None):
        """int over the left cut of extra(s)/W_+(s) ds."""
        path = self._cut_left
        ends = (path.start, path.end)

        def f(s):
            with np.errstate(divide="ignore", invalid="ignore"):
                w = self.w_plus_left(s)
                return (extra(s) if extra else 1.0) / w

        return integrate_contour(f, path, tol=tol or self.tol,
                                 singular_endpoints=ends)

    # -- periods of the holomorphic differential --------------------------
    def m_A(self, j):
        key = ("mA", j)
        if key not in self._cache:
            self._cache[key] = self.seg_integral(lambda s: s ** j)
        return self._cache[key]

    def m_B(self, j):
        key = ("mB", j)
        if key not in self._cache:
            self._cache[key] = self.cut_integral(lambda s: s ** j)
        return self._cache[key]

    # -- periods of the third-kind differentials --------------------------
    def xi_at(self, p, nu):
        return sheet_sign(nu) * complex(self.curve.q_sqrt(p))

    def lambda_a_periods(self, a, nu, tol=None):
        """(oint_A, oint_B) of Lambda_a^{(nu)}, reduced to cut integrals."""
        a = complex(a)
        coef = self.xi_at(a, nu) * (a * a - 1.0)
        A = coef * self.seg_integral(lambda s: 1.0 / (s - a), pole=a, tol=tol)
        B = -coef * self.cut_integral(lambda s: 1.0 / (s - a), tol=tol)
        return A, B

    def y_periods(self, sigma):
        key = ("y", sigma)
        if key not in self._cache:
            self._cache[key] = self.lambda_a_periods(self.curve.y_star, sigma)
        return self._cache[key]

    def residue_check(self, a, nu, radius=1e-3, n_pts=200):
        """(1/2 pi i) oint of Lambda_a^{(nu)} around a on its own sheet."""
        a = complex(a)
        sgn = sheet_sign(nu)
        circle = a + radius * np.exp(2j * np.pi * np.arange(n_pts) / n_pts)

        def f(z):
            w = sgn * self.curve.q_sqrt(z) * (z * z - 1.0)
            return 0.5 / (z - a) * (1.0 + self.xi_at(a, nu) * (a * a - 1.0) / w)

        val = integrate_contour(f, Path(tuple(circle), closed=True), tol=1e-10)
        return val / (2j * np.pi)

    # -- the constant c and the theta-divisor distance ---------------------
    def c_constant(self, nu, sigma):
        """The limit constant c(lambda; nu, sigma) of the A-period phase.

        Only Im m_B^{(1)} may enter here: the full m_B^{(1)} carries the
        residue-at-infinity contribution Re m_B^{(1)} = pi/lambda exactly,
        and including it would break both the purity of the combination
        and its agreement with the direct tau -> infinity limit of the
        A-period (checked in the tests).  The combination is then purely
        imaginary; its real part is returned as a diagnostic.
        """
        yA, yB = self.y_periods(sigma)
        mA0, mA1 = self.m_A(0), self.m_A(1)
        mB0, mB1 = self.m_B(0), self.m_B(1)
        lam = self.curve.lam
        combo = (-yA - (mA0 / mB0) * yB.real
                 + (-1.0) ** nu * (0.5j * lam)
                 * (mA0 * (1j * mB1.imag) / mB0 - mA1))
        return float(combo.imag), float(abs(combo.real))

    def two_kappa_minus_c(self, nu=1, sigma=2, n=1):
        """2 n kappa - c: the phase margin of the degree-n A-period solve.

        The A-period target scales with the full degree n (the e^{i n kappa}
        jumps of the model problem force oint_A Omega_n = 2 n kappa i mod
        2 pi i; a parity-only target cannot reproduce them), so the
        degeneration set is where 2 n kappa - c falls in 2 pi Z.
        """
        c, _ = self.c_constant(nu, sigma)
        return 2.0 * n * self.curve.kappa - c

    def theta_proximity(self, nu=1, sigma=2, n=1):
        return _mod_2pi_dist(self.two_kappa_minus_c(nu, sigma, n=n))

    # -- the period-matching solve -----------------------------------------
    def b_of_tau(self, tau, nu, sigma):
        aA, aB = self.lambda_a_periods(1j * tau, nu)
        yA, yB = self.y_periods(sigma)
        mB0 = self.m_B(0)
        if abs(mB0.imag) > 1e-6 * abs(mB0):
            raise NumericalError("m_B^(0) is not real; branch inconsistency")
        b = (aB - yB).real / (2.0 * mB0.real)
        return b, (aA, aB), (yA, yB)

    def omega_periods(self, tau, nu, sigma):
        """(oint_A, oint_B) of Omega(i tau, b(tau)) plus b(tau)."""
        b, (aA, aB), (yA, yB) = self.b_of_tau(tau, nu, sigma)
        A = aA - yA + 2.0 * b * self.m_A(0)
        B = aB - yB - 2.0 * b * self.m_B(0)
        return A, B, b

    def psi_A(self, tau, nu, sigma, re_tol=1e-6):
        A, _, b = self.omega_periods(tau, nu, sigma)
        if abs(A.real) > re_tol * (1.0 + abs(A)):
            raise NumericalError(
                f"A-period of Omega not purely imaginary: {A:.3e}")
        return A.imag / (2.0 * np.pi), b

    def solve(self, n, k, theta_tolerance=THETA_TOLERANCE,
              tau_span=60.0, grid=141, residual_tol=1e-6):
        """Find (a_*, b_*) matching oint_A = 2 n kappa i, oint_B = n pi i
        (both mod 2 pi i) for the degree-n model problem.

        Raises ThetaStarError when 2 n kappa - c is within theta_tolerance
        of 2 pi Z (there the solution escapes to infinity).
        """
        n = int(n)
        n_parity = n % 2
        nu = parity_nu(n_parity, k)
        sigma = parity_sigma(k)
        prox = self.theta_proximity(nu, sigma, n=n)
        if prox < theta_tolerance:
            raise ThetaStarError(
                f"2*n*kappa - c within {prox:.2e} of 2 pi Z: model problem "
                "degenerates (theta divisor)", proximity=prox,
                lam=self.curve.lam)

        target = n * self.curve.kappa / np.pi

        # continuous lift of Psi_A over a tan-spaced grid of tau
        thetas = np.linspace(-np.pi / 2 * 0.985, np.pi / 2 * 0.985, grid)
        taus = np.tan(thetas) * tau_span / np.tan(thetas[-1])
        lift = np.empty(grid)
        raw0, _ = self.psi_A(taus[0], nu, sigma)
        lift[0] = raw0
        for i in range(1, grid):
            raw, _ = self.psi_A(taus[i], nu, sigma)
            lift[i] = raw + np.round(lift[i - 1] - raw)

        sol_tau = None
        for m in range(int(np.floor(lift.min() - target)) - 1,
                       int(np.ceil(lift.max() - target)) + 2):
            g = lift - (target + m)
            idx = np.nonzero(g[:-1] * g[1:] <= 0)[0]
            for i in idx:
                lo, hi = taus[i], taus[i + 1]
                anchor = lift[i]

                def f(tau):
                    raw, _ = self.psi_A(tau, nu, sigma)
                    return raw + np.round(anchor - raw) - (target + m)

                try:
                    sol_tau = find_root_bracketed(f, lo, hi, tol=1e-11)
                except ValidationError:
                    continue
                break
            if sol_tau is not None:
                break
        if sol_tau is None:
            raise NumericalError(
                "no tau bracket found for the A-period condition; "
                f"Psi_A range [{lift.min():.4f}, {lift.max():.4f}], "
                f"target {target:.4f} (mod 1)")

        A, B, b_star = self.omega_periods(sol_tau, nu, sigma)
        resA = _mod_2pi_dist(A.imag - 2.0 * n * self.curve.kappa) + abs(A.real)
        resB = _mod_2pi_dist(B.imag - n * np.pi) + abs(B.real)
        if max(resA, resB) > residual_tol:
            raise NumericalError(
                f"period residuals too large: A {resA:.2e}, B {resB:.2e}")
        c_val, _ = self.c_constant(nu, sigma)
        data = PeriodData(mA0=self.m_A(0), mA1=self.m_A(1),
                          mB0=self.m_B(0), mB1=self.m_B(1),
                          c_const=c_val, parity_nu=nu, parity_sigma=sigma)
        return PeriodSolution(periods=data, a_star=1j * sol_tau,
                              b_star=float(b_star), n=n, n_parity=n_parity,
                              k=k, theta_proximity=prox, residual_A=float(resA),
                              residual_B=float(resB))


def theta_star_scan(lambda_lo, lambda_hi, steps, jump_tol=0.5):
    """Continuous lift of (2 kappa - c)(lambda) and its 2 pi Z crossings.

    Returns (lams, lift, crossings).  Crossings are refined by bracketed
    root finding; an empty list is a perfectly valid outcome.
    """
    from .spectral import solve_boutroux

    def g(lam):
        eng = PeriodEngine(solve_boutroux(lam))
        return eng.two_kappa_minus_c()

    lams = np.linspace(lambda_lo, lambda_hi, steps)
    vals = np.array([g(l) for l in lams])
    if np.max(np.abs(np.diff(vals))) > jump_tol * 2 * np.pi:
        raise NumericalError("theta scan grid too coarse for a continuous lift")
    crossings = []
    for m in range(int(np.floor(vals.min() / (2 * np.pi))) - 1,
                   int(np.ceil(vals.max() / (2 * np.pi))) + 2):
        h = vals - 2.0 * np.pi * m
        for i in np.nonzero(h[:-1] * h[1:] < 0)[0]:
            lam0 = find_root_bracketed(lambda l: g(l) - 2 * np.pi * m,
                                       lams[i], lams[i + 1], tol=1e-8)
            crossings.append(float(lam0))
    return lams, vals, sorted(crossings)


class Parametrix:
    """Assembled global-parametrix evaluators for one solved critical graph.

    Needs the traced arcs (cuts in arc mode) and a verified gamma_hat.
    Evaluations are pure once the period solutions are in place, so grids
    of z may be processed in parallel by the caller.
    """

    def __init__(self, graph, gamma_hat_path, clearance=1e-3):
        self.graph = graph
        self.curve = graph.arc_curve
        self.gamma_hat = np.asarray(
            gamma_hat_path.vertices if isinstance(gamma_hat_path, Path)
            else gamma_hat_path, dtype=complex)
        self.clearance = clearance
        self.engine = PeriodEngine(self.curve)
        self.pf = PhiFunction(curve=self.curve, gamma_hat=self.gamma_hat,
                              clearance=clearance)
        self._eta_cache = {}
        self._u_inf_cache = {}
        self._ell = None
        self._solutions = {}
        scale = max(1.0, abs(self.curve.z_star))
        self._chain = np.concatenate([
            np.array([-1e4 + 0j]),
            graph.arc_curve.gamma1,          # -1 -> -conj z_*   (prepend ray end)
            self.gamma_hat,
            graph.arc_curve.gamma2,
            np.array([1e4 + 0j])])
        self._u_obstacles = ObstacleSet(
            [np.array([-1e4 + 0j, -1.0 + 0j]),
             graph.arc_curve.gamma1, graph.arc_curve.gamma2, self.gamma_hat,
             np.array([1.0 + 0j, 1e4 + 0j])], clearance=clearance)
        self._scale = scale

    # -- geometry helpers ---------------------------------------------------
    def is_above_chain(self, z):
        """True if z lies in the unbounded region above the barrier
        (-inf,-1] U gamma_1 U gamma_hat U gamma_2 U [1, inf)."""
        z = complex(z)
        pts = self._chain
        x1, y1 = pts[:-1].real, pts[:-1].imag
        x2, y2 = pts[1:].real, pts[1:].imag
        x = z.real
        strad = (x1 <= x) != (x2 <= x)
        with np.errstate(divide="ignore", invalid="ignore"):
            yc = y1 + (x - x1) * (y2 - y1) / (x2 - x1)
        crossings = np.sum(strad & (yc > z.imag))
        return crossings % 2 == 0

    def y_star(self):
        return self.curve.y_star

    # -- eta and N ----------------------------------------------------------
    def eta4(self, z):
        zs = self.curve.z_star
        z = np.asarray(z, dtype=complex)
        return ((z + 1.0) * (z - zs)) / ((z + np.conj(zs)) * (z - 1.0))

    def eta(self, z, approach=None):
        """The quartic root of eta4 with cuts on the arcs, eta(inf) = 1.

        Continued from a far anchor along a planned path; values cached.
        """
        z = complex(z)
        key = (round(z.real, 12), round(z.imag, 12))
        if key in self._eta_cache:
            return self._eta_cache[key]
        d1 = np.min(np.abs(self.curve.gamma1 - z))
        d2 = np.min(np.abs(self.curve.gamma2 - z))
        if min(d1, d2) < 1e-9:
            raise ValidationError("eta is cut on the arcs; pick a side")
        anchor = 40j * self._scale
        if not hasattr(self, "_eta_obstacles"):
            self._eta_obstacles = ObstacleSet(
                [self.curve.gamma1, self.curve.gamma2],
                clearance=self.clearance)
        obstacles = self._eta_obstacles
        path = plan_path(anchor, z, obstacles, clearance=self.clearance,
                         via=[approach] if approach is not None else None,
                         final_leg_direct=approach is not None)
        val = complex(self.eta4(anchor)) ** 0.25
        pts = path.as_array()
        prev_pt = pts[0]
        prev = val
        for a, b in zip(pts[:-1], pts[1:]):
            n_steps = max(2, int(abs(b - a) / (0.2 * self._scale)) + 1)
            for t in np.linspace(0, 1, n_steps + 1)[1:]:
                pt = a + (b - a) * t
                w4 = complex(self.eta4(pt))
                cand = w4 ** 0.25
                best, gap = None, 1e9
                for m in range(4):
                    c = cand * (1j ** m)
                    g = abs(np.angle(c / prev))
                    if g < gap:
                        best, gap = c, g
                if gap > np.pi / 3:
                    # refine locally
                    sub = np.linspace(0, 1, 9)[1:]
                    for tt in sub:
                        ptt = prev_pt + (pt - prev_pt) * tt
                        w4s = complex(self.eta4(ptt)) ** 0.25
                        bb, gg = None, 1e9
                        for m in range(4):
                            c = w4s * (1j ** m)
                            g = abs(np.angle(c / prev))
                            if g < gg:
                                bb, gg = c, g
                        prev = bb
                    best = prev
                prev = best
                prev_pt = pt
        self._eta_cache[key] = prev
        return prev

    def N_matrix(self, z):
        e = self.eta(z)
        a = 0.5 * (e + 1.0 / e)
        b = (e - 1.0 / e) / (-2j)
        c = (e - 1.0 / e) / (2j)
        return np.array([[a, b], [c, a]])

    # -- period solutions ----------------------------------------------------
    def solution(self, n, k):
        key = (int(n), k)
        if key not in self._solutions:
            self._solutions[key] = self.engine.solve(*key)
        return self._solutions[key]

    # -- u integrand on either sheet ----------------------------------------
    def omega_integrand(self, sol, sheet=1):
        """Omega restricted to one sheet, as a vectorized function of s."""
        a = sol.a_star
        y = self.y_star()
        nu, sg = sol.periods.parity_nu, sol.periods.parity_sigma
        ca = self.engine.xi_at(a, nu) * (a * a - 1.0)
        cy = self.engine.xi_at(y, sg) * (y * y - 1.0)
        b = sol.b_star
        flip = 1.0 if sheet == 1 else -1.0

        def f(s):
            w = flip * self.curve.w(s)
            return (b / w
                    + 0.5 / (s - a) * (1.0 + ca / w)
                    - 0.5 / (s - y) * (1.0 + cy / w))

        return f

    # -- path prescriptions ---------------------------------------------------
    def _depart(self, sheet):
        """First waypoint leaving z = 1 into the correct region."""
        base = 1.0 + 0.0j
        sgn = 1.0 if sheet == 1 else -1.0
        for ang in (np.pi / 3, np.pi / 4, np.pi / 2.2, np.pi / 6):
            cand = base + 0.15 * self._scale * np.exp(1j * sgn * ang)
            if self._u_obstacles.segment_clear(base, cand,
                                               trim_start=0.02 * self._scale):
                return cand
        raise NumericalError("could not leave z = 1 cleanly")

    def u_path(self, z, sheet=1, approach=None, region=None, extra_via=None):
        """Path of integration from 1 to z per the sheet prescription.

        Sheet 1: stay above the barrier; reach below-the-barrier points by
        crossing (-inf, -1) once from above.  Sheet 2 is the mirror rule.
        ``approach`` forces a final standoff waypoint (used to pin the side
        when z hugs a cut); ``region`` overrides the above/below test for
        such near-cut targets ("above"/"below").
        """
        z = complex(z)
        if region is None:
            above = self.is_above_chain(approach if approach is not None else z)
        else:
            above = region == "above"
        via = [self._depart(sheet)]
        if extra_via is not None:
            via.append(complex(extra_via))
        direct = (above == (sheet == 1))
        if not direct:
            H = (max(self.gamma_hat.imag.max(), abs(self.curve.z_star)) + 2.0
                 * self._scale)
            X = 2.5 * max(1.0, abs(self.curve.z_star.real)) + 1.5
            if sheet == 1:
                via += [1.0 + 1j * H, -X + 1j * H, -X - 1j * H]
            else:
                via += [1.0 - 1j * H, -X - 1j * H, -X + 1j * H]
        if approach is not None:
            via.append(complex(approach))
        return plan_path(1.0 + 0.0j, z, self._u_obstacles,
                         clearance=self.clearance, via=via,
                         final_leg_direct=approach is not None)

    def u_value(self, z, sol, sheet=1, tol=1e-10, path=None):
        """u_j^{(k)}(z) for j = sheet; the -i n kappa shift of u_2 is left
        to the caller (it depends on n itself, not only its parity)."""
        if path is None:
            path = self.u_path(z, sheet)
        f = self.omega_integrand(sol, sheet)
        return integrate_contour(f, path, tol=tol,
                                 singular_endpoints=(1.0 + 0.0j,))

    def u_at_infinity(self, sol, sheet=1, R=400.0):
        """k_{j,k}: the finite limit of u at infinity.

        Quadratic Richardson over R, 2R, 4R kills the 1/R and 1/R^2 tails.
        """
        key = (sol.n, sol.k, sheet, R)
        if key not in self._u_inf_cache:
            u1 = self.u_value(1j * R * self._scale, sol, sheet)
            u2 = self.u_value(2j * R * self._scale, sol, sheet)
            u4 = self.u_value(4j * R * self._scale, sol, sheet)
            self._u_inf_cache[key] = (8.0 * u4 - 6.0 * u2 + u1) / 3.0
        return self._u_inf_cache[key]

    # -- assembled model-problem matrix ---------------------------------------
    def M_entry(self, z, n, i, j, tol=1e-10, path=None):
        """Entry M_{ij}(z) = c_i^{-1} N_{ij}(z) v_j^{(i)}(z) for degree n.

        The superscript (i) selects the period solution Omega_n^{(i)}; the
        subscript j selects the sheet of the u-path.  c_i normalizes the
        diagonal entry to 1 at infinity.
        """
        sol = self.solution(n, i)
        u = self.u_value(z, sol, sheet=j, tol=tol, path=path)
        if j == 2:
            u = u - 1j * n * self.curve.kappa
        cinf = self.u_at_infinity(sol, sheet=i)
        if i == 2:
            cinf = cinf - 1j * n * self.curve.kappa
        Nmat = self.N_matrix(z)
        return Nmat[i - 1, j - 1] * np.exp(u - cinf)

    def M_matrix(self, z, n, tol=1e-10):
        return np.array([[self.M_entry(z, n, 1, 1, tol), self.M_entry(z, n, 1, 2, tol)],
                         [self.M_entry(z, n, 2, 1, tol), self.M_entry(z, n, 2, 2, tol)]])

    def M_boundary(self, s, normal, n, standoff=0.05, deltas=(2e-3, 1e-3, 5e-4),
                   tol=1e-9):
        """One-sided boundary value of M at a cut point s from side ``normal``.

        Evaluates M at s + delta*normal for three deltas sharing a planned
        route to the standoff point (so the side is pinned and only short
        transverse legs differ), then extrapolates delta -> 0 quadratically.
        """
        s = complex(s)
        normal = complex(normal) / abs(normal)
        p0 = s + standoff * normal
        region = "above" if self.is_above_chain(p0) else "below"

        mats = []
        base_u = {}
        for sheet in (1, 2):
            for k in (1, 2):
                sol = self.solution(n, k)
                path = self.u_path(p0, sheet, region=region)
                base_u[(sheet, k)] = (self.u_value(p0, sol, sheet=sheet,
                                                   tol=tol, path=path), sol)
        eta0 = self.eta(p0)
        for d in deltas:
            z = s + d * normal
            leg = Path((p0, z))
            e = _continue_quartic(self.eta4, eta0, p0, z)
            Nmat = np.array([[0.5 * (e + 1 / e), (e - 1 / e) / (-2j)],
                             [(e - 1 / e) / (2j), 0.5 * (e + 1 / e)]])
            M = np.empty((2, 2), dtype=complex)
            for i in (1, 2):
                for j in (1, 2):
                    u0, sol = base_u[(j, i)]
                    du = integrate_contour(self.omega_integrand(sol, j), leg,
                                           tol=tol)
                    u = u0 + du
                    if j == 2:
                        u = u - 1j * n * self.curve.kappa
                    cinf = self.u_at_infinity(sol, sheet=i)
                    if i == 2:
                        cinf = cinf - 1j * n * self.curve.kappa
                    M[i - 1, j - 1] = Nmat[i - 1, j - 1] * np.exp(u - cinf)
            mats.append(M)
        d1, d2, d3 = deltas
        M1, M2, M3 = mats
        # quadratic extrapolation to delta = 0 through three samples
        def lag(d):
            others = [x for x in deltas if x != d]
            return np.prod([(0.0 - o) / (d - o) for o in others])
        return lag(d1) * M1 + lag(d2) * M2 + lag(d3) * M3

    # -- strong asymptotics ----------------------------------------------------
    def ell(self):
        if self._ell is None:
            from .spectral import ell_constant
            self._ell = ell_constant(self.pf)
        return self._ell

    def psi_amplitude(self, z, n, tol=1e-10, path=None):
        """Psi(z) = M_11(z): the amplitude of the degree-n asymptotics."""
        sol = self.solution(n, 1)
        if path is None:
            path = self.u_path(z, 1)
        u = self.u_value(z, sol, sheet=1, tol=tol, path=path)
        k11 = self.u_at_infinity(sol, sheet=1)
        e = self.eta(z)
        return 0.5 * (e + 1.0 / e) * np.exp(u - k11)

    def strong_log(self, n, z, tol=1e-10, extra_via=None):
        """log p_n(z) predicted to leading order (additive O(1/n) defect).

        extra_via inserts an admissible detour waypoint; the result must be
        unchanged (the phi and u integrals share the path, so their mod-pi-i
        and mod-2-pi-i ambiguities cancel identically).
        """
        z = complex(z)
        path = self.u_path(z, 1, extra_via=extra_via)
        amp = self.psi_amplitude(z, n, tol=tol, path=path)
        ph = phi(z, self.pf, tol=tol, path=path)
        lam = self.curve.lam
        E = 0.5j * self.curve.kappa - 0.5j * lam * z - self.ell() - ph
        return np.log(amp) + n * E

    def strong_asymptotic(self, n, z, tol=1e-10):
        """Leading-order prediction of p_n^lambda(z) off the cuts."""
        return np.exp(self.strong_log(n, z, tol=tol))

    # -- conformal maps near the edges ------------------------------------------
    def f_B(self, z):
        """f_B(z) = (1/4)(int_1^z Q^{1/2})^2, analytic on |z-1| < 0.1."""
        if abs(z - 1.0) > 0.1:
            raise ValidationError("f_B is only defined on the disc |z-1| <= 0.1")
        lam, x = self.curve.lam, self.curve.x_star
        B = _pole_coeff_B(lam, x)

        def ratio(u):
            s = 1.0 + (z - 1.0) * u * u
            return _P_B(s, lam, x) / B

        integral = _tracked_u_integral(ratio, power=0)
        return (z - 1.0) * B * integral ** 2

    def f_B_prime_formula(self):
        lam, x = self.curve.lam, self.curve.x_star
        return _pole_coeff_B(lam, x)

    def f_A(self, z):
        """f_A(z) = [ (3/2) (phi2 + i kappa/2) ]^{2/3} near -conj z_*."""
        p = -np.conj(self.curve.z_star)
        if abs(z - p) > 0.1:
            raise ValidationError("f_A is only defined on the disc around "
                                  "-conj z_*")
        lam, x = self.curve.lam, self.curve.x_star
        A = _zero_coeff_A(lam, x, p)
        zs = x + 2j / lam

        def ratio(u):
            # Q(s)/(s-p) with the vanishing factor (s + conj z_*) = (s - p)
            # cancelled symbolically: finite all the way into z = p
            s = p + (z - p) * u * u
            return -(lam * lam / 4.0) * (s - zs) / (s * s - 1.0) / A

        integral = _tracked_u_integral(ratio, power=2)
        return (z - p) * (3.0 * np.sqrt(A) * integral) ** (2.0 / 3.0)

    def h_edge_formula(self):
        """The closed-form edge coefficient sqrt(2x(4+4ix lam+lam^2(1-x^2)))/lam."""
        lam, x = self.curve.lam, self.curve.x_star
        return np.sqrt(2 * x * (4 + 4j * x * lam + lam * lam * (1 - x * x))
                       + 0j) / lam


def _pole_coeff_B(lam, x):
    """Q(z) ~ B/(z-1) near z = 1; B = (4 + lam(4i + lam(x^2-1)))/8."""
    return (4.0 + lam * (4j + lam * (x * x - 1.0))) / 8.0


def _zero_coeff_A(lam, x, p):
    """Q(z) ~ A (z - p) near the simple zero p = -conj z_*."""
    zs = x + 2j / lam
    return -(lam * lam / 4.0) * (p - zs) / (p * p - 1.0)


def _P_B(s, lam, x):
    """P(s) = Q(s)(s-1), analytic and nonzero near s = 1."""
    zs = x + 2j / lam
    return -(lam * lam / 4.0) * (s - zs) * (s + np.conj(zs)) / (s + 1.0)


def _P_A(s, lam, x, p):
    """P(s) = Q(s)/(s-p), analytic and nonzero near p."""
    zs = x + 2j / lam
    out = -(lam * lam / 4.0) * (s - zs) * (s + np.conj(zs)) / (s * s - 1.0)
    return out / (s - p)


def _continue_quartic(f4, val, a, b, n_steps=24):
    """Continue a quartic root of f4 from value val at a to the point b."""
    prev = val
    for t in np.linspace(0.0, 1.0, n_steps + 1)[1:]:
        pt = a + (b - a) * t
        w = complex(f4(pt)) ** 0.25
        best, gap = None, 9.0
        for m in range(4):
            c = w * (1j ** m)
            g = abs(np.angle(c / prev))
            if g < gap:
                best, gap = c, g
        prev = best
    return prev


def _tracked_u_integral(ratio, power, panels=8):
    """int_0^1 u^power sqrt(ratio(u)) du on fixed composite GK panels.

    ratio stays near 1 on the small discs where this is used, so the
    square root is continuity-tracked along the ordered u-grid
    (deterministic; no adaptivity needed for analytic integrands).
    """
    from .contour import _NODES, _WK_FULL
    total = 0.0 + 0.0j
    prev = 1.0 + 0.0j
    for p0 in range(panels):
        a, b = p0 / panels, (p0 + 1) / panels
        h, c = 0.5 * (b - a), 0.5 * (b + a)
        u = c + h * _NODES
        vals = np.sqrt(np.asarray(ratio(u), dtype=complex))
        for i in range(len(vals)):
            if abs(vals[i] + prev) < abs(vals[i] - prev):
                vals[i] = -vals[i]
            prev = vals[i]
        total += h * np.dot(vals * u ** power, _WK_FULL)
    return total
