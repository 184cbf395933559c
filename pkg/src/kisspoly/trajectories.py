"""Trajectories of the quadratic differential -Q dz^2 and the critical graph.

An arc along which int Q^{1/2} ds is purely imaginary is traced by
integrating the unit-speed field

    z'(t) = i sigma conj(w(z)) / |w(z)|,      w = branch-tracked Q^{1/2},

with a transverse Newton projection after every step that pushes the
accumulated Re int Q^{1/2} ds back to zero (the defining condition of a
trajectory, restated at sample level).  Three critical trajectories leave
each simple zero of Q at mutual angles 2 pi/3; the expected global picture
for the solved spectral curve is: one trajectory from z_* is captured by
the simple pole at z = 1, one crosses the imaginary axis (and so connects
to -conj z_* by reflection symmetry), and one escapes horizontally to
infinity.  The traced gamma_2 (z_* -> 1) and its mirror gamma_1 carry the
zero-counting measure with density |Q_+^{1/2}|/pi and mass 1/2 each.
"""

from dataclasses import dataclass

import numpy as np

from .contour import integrate_contour
from .errors import NumericalError, ValidationError
from .geometry import Path, point_to_polyline_distance
from .spectral import PhiFunction, SpectralCurve, phi

__all__ = ["TrajectoryArc", "CriticalGraph", "critical_directions", "trace",
           "build_critical_graph", "gamma_hat", "zero_distance_stats",
           "arc_csv_rows"]

# Im z grows like (2/lambda) log|z| along the escape trajectory, so the
# final |arg z| < 0.05 classification check needs a radius beyond ~150
# for lambda near 2; 50 would misclassify a correct trace.
R_ESCAPE = 200.0
ARCLEN_CAP = 500.0
POLE_CAPTURE = 1e-4
SEED_OFFSET = 1e-4


def q_prime_at_zero(curve, p):
    """Q'(p) at a simple zero p of Q, from the factored form."""
    lam, zs = curve.lam, curve.z_star
    other = -np.conj(zs) if abs(p - zs) < abs(p + np.conj(zs)) else zs
    return -(lam * lam / 4.0) * (p - other) / (p * p - 1.0)


def critical_directions(curve, at):
    """The three angles theta with arg Q'(p) + 3 theta = pi (mod 2 pi).

    These are the directions of the critical trajectories leaving the
    simple zero p; consecutive ones differ by 2 pi/3.
    """
    at = complex(at)
    if abs(_q(curve, at)) > 1e-8:
        raise ValidationError("point is not a zero of Q")
    qp = q_prime_at_zero(curve, at)
    if abs(qp) < 1e-12:
        raise ValidationError("point is not a simple zero of Q")
    base = (np.pi - np.angle(qp)) / 3.0
    thetas = sorted((base + 2.0 * np.pi * k / 3.0) % (2.0 * np.pi) for k in range(3))
    return tuple(thetas)


@dataclass(frozen=True)
class TrajectoryArc:
    """Traced polyline with the branch-tracked cumulative int Q^{1/2} ds."""

    points: np.ndarray
    cum_integral: np.ndarray
    start_kind: str
    end_kind: str

    def length(self):
        return float(np.sum(np.abs(np.diff(self.points))))

    def as_path(self):
        pts = [self.points[0]]
        for p in self.points[1:]:
            if p != pts[-1]:
                pts.append(p)
        return Path(tuple(pts))


def _matched_sqrt(curve, z, w_ref):
    w = np.sqrt(_q(curve, z))
    if abs(w + w_ref) < abs(w - w_ref):
        w = -w
    return w


def _q(curve, z):
    lam, zs = curve.lam, curve.z_star
    return -(lam * lam / 4.0) * (z - zs) * (z + np.conj(zs)) / (z * z - 1.0)


def trace(curve, start, direction, h_scale=1.0, re_tol=1e-10):
    """Trace one critical trajectory of -Q dz^2 from a simple zero.

    Parameters
    ----------
    curve : SpectralCurve
    start : complex
        The critical point (z_* or -conj z_*); the actual seed is offset
        by SEED_OFFSET*|start| along the direction, where the local
        expansion of Q fixes the branch.
    direction : float
        One of the angles from critical_directions.
    h_scale : float
        Step-size multiplier (0.5 for the convergence re-trace).

    Returns
    -------
    TrajectoryArc with end_kind in {"pole+1", "pole-1", "axis", "escape"}.
    """
    start = complex(start)
    eps = SEED_OFFSET * max(abs(start), 0.1)
    z = start + eps * np.exp(1j * direction)
    qp = q_prime_at_zero(curve, start)
    w = np.sqrt(qp * (z - start))  # local model Q ~ Q'(p)(z - p)
    v = 1j * np.conj(w) / abs(w)
    if (v * np.exp(-1j * direction)).real < 0:
        w = -w
        v = -v

    scale = max(abs(start - 1.0), abs(start + 1.0), 0.5)
    h0 = h_scale * 0.01 * scale
    pts = [start, z]
    # seed integral from the local model: int_p^z sqrt(Q'(p)(s-p)) ds
    cum = [0.0 + 0.0j, (2.0 / 3.0) * w * (z - start)]
    arclen = abs(z - start)
    end_kind = None
    guard = 0
    while end_kind is None:
        guard += 1
        if guard > 200000:
            raise NumericalError("tracer stalled")
        d_pole = min(abs(z - 1.0), abs(z + 1.0))
        d_zero = abs(z - start)
        h = min(h0, 0.3 * d_pole + 1e-9, 0.3 * d_zero + 1e-6 * scale)
        if abs(z) > 5 * scale:
            h = min(h0 * (abs(z) / scale), 2.0)
        v = 1j * np.conj(w) / abs(w)
        if start.real > 0 and z.real < 0.2 * scale and v.real < -1e-3:
            # closing in on the imaginary axis: land on it smoothly
            h = min(h, max(0.5 * z.real / (-v.real), 1e-10))
        h = max(h, 1e-10)

        ok, z_new, w_new, dI = _rk4_step(curve, z, w, h)
        if not ok:
            h0 *= 0.5
            if h0 < 1e-12:
                raise NumericalError("step size underflow in tracer")
            continue
        # transverse projection: drive Re cum back to zero
        cum_new = cum[-1] + dI
        drift = cum_new.real
        corr = -drift * np.conj(w_new) / (abs(w_new) ** 2)
        z_new = z_new + corr
        cum_new = cum_new - drift
        w_new = _matched_sqrt(curve, z_new, w_new)

        # direction continuity governs the step size
        turn = abs(np.angle((1j * np.conj(w_new) / abs(w_new))
                            / (1j * np.conj(w) / abs(w))))
        if turn > 0.2:
            h0 *= 0.6
            continue
        if turn < 0.03:
            h0 = min(h0 * 1.3, h_scale * 0.01 * scale * (1 + abs(z) / scale))

        z, w = z_new, w_new
        pts.append(z)
        cum.append(cum_new)
        arclen += h

        if abs(z - 1.0) < POLE_CAPTURE:
            pts.append(1.0 + 0.0j)
            cum.append(cum[-1])  # tail handled analytically by consumers
            end_kind = "pole+1"
        elif abs(z + 1.0) < POLE_CAPTURE:
            pts.append(-1.0 + 0.0j)
            cum.append(cum[-1])
            end_kind = "pole-1"
        elif z.real * start.real < 0 or abs(z.real) < re_tol:
            if abs(z.real) > re_tol:
                z = _bisect_axis(curve, pts[-2], z, w)
            pts[-1] = complex(0.0, z.imag)
            end_kind = "axis"
        elif abs(z) > R_ESCAPE:
            end_kind = "escape"
        elif arclen > ARCLEN_CAP:
            raise NumericalError(
                f"arc-length cap reached at z={z:.4f} without termination")

    arc = TrajectoryArc(points=np.asarray(pts, dtype=complex),
                        cum_integral=np.asarray(cum, dtype=complex),
                        start_kind="zero", end_kind=end_kind)
    return arc


def _rk4_step(curve, z, w, h):
    """Classical RK4 on the unit-speed trajectory field, with a Simpson
    accumulation of int Q^{1/2} dz along the step."""

    def field(zz, wref):
        ww = _matched_sqrt(curve, zz, wref)
        return 1j * np.conj(ww) / abs(ww), ww

    try:
        k1, w1 = field(z, w)
        k2, w2 = field(z + 0.5 * h * k1, w1)
        k3, w3 = field(z + 0.5 * h * k2, w2)
        k4, w4 = field(z + h * k3, w3)
    except (ZeroDivisionError, FloatingPointError):
        return False, z, w, 0.0
    for wa, wb in ((w, w2), (w2, w4)):
        if abs(np.angle(wb / wa)) > 0.5 * np.pi:
            return False, z, w, 0.0
    z_new = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    w_new = _matched_sqrt(curve, z_new, w4)
    zm = z + 0.5 * h * k2
    wm = _matched_sqrt(curve, zm, w2)
    dI = (w + 4.0 * wm + w_new) / 6.0 * (z_new - z)
    return True, z_new, w_new, dI


def _bisect_axis(curve, za, zb, w):
    """Land the endpoint on Re z = 0 between the last two samples."""
    fa, fb = za.real, zb.real
    for _ in range(80):
        zm = 0.5 * (za + zb)
        if abs(zm.real) < 1e-13:
            return complex(0.0, zm.imag)
        if fa * zm.real < 0:
            zb = zm
        else:
            za, fa = zm, zm.real
    zm = 0.5 * (za + zb)
    return complex(0.0, zm.imag)


@dataclass(frozen=True)
class CriticalGraph:
    """The classified critical trajectories of -Q dz^2 for a solved curve."""

    curve: SpectralCurve          # segment-mode curve used for tracing
    arc_curve: SpectralCurve      # same curve with cuts moved to the arcs
    gamma2: TrajectoryArc         # z_* -> 1
    gamma1: TrajectoryArc         # -1 -> -conj z_* (mirror of gamma2)
    gamma_hat_traj: TrajectoryArc  # z_* -> -conj z_* connecting trajectory
    escape: TrajectoryArc         # z_* -> infinity
    mu_mass_gamma2: float

    def gamma1_points(self):
        return self.gamma1.points

    def gamma2_points(self):
        return self.gamma2.points


def build_critical_graph(curve, h_scale=1.0, mass_tol=1e-5):
    """Trace and classify the three trajectories from z_*.

    The classification must come out exactly as the theory prescribes
    (one pole capture at +1, one axis crossing, one horizontal escape);
    anything else signals a wrong x_* or a branch bug and raises.
    """
    zs = curve.z_star
    arcs = {}
    for th in critical_directions(curve, zs):
        arc = trace(curve, zs, th, h_scale=h_scale)
        if arc.end_kind in arcs:
            raise NumericalError(
                f"two trajectories from z_* share end kind {arc.end_kind}")
        arcs[arc.end_kind] = arc
    expected = {"pole+1", "axis", "escape"}
    if set(arcs) != expected:
        raise NumericalError(
            f"critical graph classification mismatch: got {sorted(arcs)}")

    g2 = arcs["pole+1"]
    conn = arcs["axis"]
    esc = arcs["escape"]
    if esc.points[-1].real < 0 or abs(np.angle(esc.points[-1])) > 0.05:
        raise NumericalError("escape trajectory is not horizontal to the right")

    # full connecting trajectory via reflection symmetry
    left = -np.conj(conn.points[::-1])
    full = np.concatenate([conn.points, left[1:]])
    cum_left = conn.cum_integral[-1] + (conn.cum_integral[-1]
                                        - np.conj(conn.cum_integral[::-1]))
    ghat_traj = TrajectoryArc(points=full,
                              cum_integral=np.concatenate(
                                  [conn.cum_integral, cum_left[1:]]),
                              start_kind="zero", end_kind="zero")

    g1_pts = -np.conj(g2.points[::-1])
    g1 = TrajectoryArc(points=g1_pts,
                       cum_integral=-np.conj(g2.cum_integral[::-1]),
                       start_kind="pole-1", end_kind="zero")

    arc_curve = curve.attach_arcs(g1_pts, g2.points)
    mass = gamma2_mass(arc_curve)
    if abs(mass - 0.5) > mass_tol:
        raise NumericalError(f"gamma_2 mass {mass:.8f} is not 1/2")
    return CriticalGraph(curve=curve, arc_curve=arc_curve, gamma2=g2,
                         gamma1=g1, gamma_hat_traj=ghat_traj, escape=esc,
                         mu_mass_gamma2=float(mass))


def gamma2_mass(arc_curve, tol=1e-9):
    """mu_*(gamma_2) = (1/pi i) int_{gamma_2} Q_+^{1/2} ds over the traced arc."""
    pts = arc_curve.gamma2
    path = TrajectoryArc(points=pts, cum_integral=np.zeros(len(pts)),
                         start_kind="", end_kind="").as_path()
    val = integrate_contour(lambda s: arc_curve.q_sqrt_plus(s, "gamma2"),
                            path, tol=tol,
                            singular_endpoints=(pts[0], pts[-1]))
    return float((val / (1j * np.pi)).real)


def density_samples(arc_curve, which="gamma2"):
    """(point, density) pairs of the zero-counting measure along an arc."""
    pts = arc_curve.gamma2 if which == "gamma2" else arc_curve.gamma1
    interior = pts[1:-1]
    dens = np.abs(arc_curve.q_sqrt_plus(interior, which)) / np.pi
    return interior, dens


def gamma_hat(curve, graph, n_samples=21, clearance=1e-3):
    """A contour from -conj z_* to z_* strictly inside the upper sector.

    Built by bowing the connecting trajectory upward and verified by the
    sign condition Re phi_+ > 0 at its interior samples (phi evaluated
    from the + side).  The bow height starts at a fraction of the gap to
    the escape arcs and is bisected down until the verification passes.
    """
    traj = graph.gamma_hat_traj.points[::-1]  # orient -conj z_* -> z_*
    esc_pts = np.concatenate([graph.escape.points,
                              -np.conj(graph.escape.points)])
    t = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(traj)))])
    t /= t[-1]
    gap = float(np.min(point_to_polyline_distance(traj, esc_pts)))
    h = 0.45 * gap
    for _ in range(7):
        cand = traj + 1j * h * np.sin(np.pi * t)
        cand[0], cand[-1] = traj[0], traj[-1]
        if _gamma_hat_ok(curve, graph, cand, n_samples, clearance):
            return Path(tuple(_dedupe(cand)))
        h *= 0.55
    raise NumericalError("could not verify Re phi_+ > 0 on any candidate gamma_hat")


def _dedupe(pts):
    out = [pts[0]]
    for p in pts[1:]:
        if p != out[-1]:
            out.append(p)
    return out


def _gamma_hat_ok(curve, graph, cand, n_samples, clearance):
    pf = PhiFunction(curve=graph.arc_curve, gamma_hat=cand, clearance=clearance)
    idx = np.unique(np.linspace(1, len(cand) - 2, n_samples).astype(int))
    for k in idx:
        s = cand[k]
        try:
            val = phi(s, pf, tol=1e-9, via=[s + 0.05j])
        except Exception:
            return False
        if val.real <= 0:
            return False
    return True


def zero_distance_stats(zeros, graph, re_tol=1e-8):
    """Distance of each zero to gamma_1 U gamma_2, outlier reported apart.

    Returns (max_distance, mean_distance, outlier) where outlier is the
    purely imaginary zero of an odd-degree polynomial (or None).
    """
    zeros = np.asarray(zeros, dtype=complex)
    outlier = None
    mask = np.ones(len(zeros), dtype=bool)
    if len(zeros) % 2 == 1:
        k = int(np.argmin(np.abs(zeros.real)))
        if abs(zeros[k].real) < re_tol:
            outlier = zeros[k]
            mask[k] = False
    dist = _distances(zeros[mask], graph)
    return float(np.max(dist)), float(np.mean(dist)), outlier


def _distances(zeros, graph):
    d1 = point_to_polyline_distance(zeros, graph.gamma1.points)
    d2 = point_to_polyline_distance(zeros, graph.gamma2.points)
    return np.minimum(np.atleast_1d(d1), np.atleast_1d(d2))


def arc_csv_rows(graph, which="gamma2"):
    """Rows (re, im, cum_integral_im, density) for CSV export of an arc."""
    arc = getattr(graph, which)
    pts = arc.points
    dens = np.zeros(len(pts))
    if which in ("gamma1", "gamma2"):
        inner = np.abs(graph.arc_curve.q_sqrt_plus(pts[1:-1], which)) / np.pi
        dens[1:-1] = inner
    rows = []
    for p, c, d in zip(pts, arc.cum_integral, dens):
        rows.append((p.real, p.imag, c.imag, d))
    return rows
