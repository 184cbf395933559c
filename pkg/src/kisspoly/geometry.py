"""Piecewise-linear paths in the complex plane and obstacle-avoiding routing.

A :class:`Path` is an ordered polyline of complex vertices, optionally
closed, parametrized by arc length.  Contours of integration, branch cuts
and traced trajectory arcs are all carried around as ``Path`` objects (or
raw vertex arrays convertible to one).

:func:`plan_path` routes a polyline from one point to another keeping a
prescribed clearance from a set of obstacle polylines.  It builds a small
visibility graph over offset rings around the convex hulls of the
obstacles and runs Dijkstra on it.  The geometry here is desk scale (a few
obstacles, hundreds of vertices), so this is deliberately simple rather
than clever.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import PathBlockedError, ValidationError

__all__ = ["Path", "ObstacleSet", "plan_path", "point_to_polyline_distance",
           "point_in_polygon", "polyline_length"]


@dataclass(frozen=True)
class Path:
    """Piecewise-linear contour with at least 2 vertices (3 if closed)."""

    vertices: tuple
    closed: bool = False

    def __post_init__(self):
        verts = tuple(complex(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        minimum = 3 if self.closed else 2
        if len(verts) < minimum:
            raise ValidationError(
                f"path needs at least {minimum} vertices, got {len(verts)}")
        for a, b in zip(verts, verts[1:]):
            if a == b:
                raise ValidationError("consecutive path vertices must be distinct")
        if self.closed and verts[0] == verts[-1]:
            raise ValidationError("closed paths must not repeat the first vertex")

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[0] if self.closed else self.vertices[-1]

    def edges(self):
        """Yield (a, b) pairs for every straight edge, including the closing one."""
        verts = self.vertices
        for a, b in zip(verts, verts[1:]):
            yield a, b
        if self.closed:
            yield verts[-1], verts[0]

    def length(self):
        return sum(abs(b - a) for a, b in self.edges())

    def reversed(self):
        if self.closed:
            return Path(tuple(reversed(self.vertices)), closed=True)
        return Path(tuple(reversed(self.vertices)))

    def as_array(self):
        verts = list(self.vertices)
        if self.closed:
            verts.append(self.vertices[0])
        return np.asarray(verts, dtype=complex)

    def point_at(self, s):
        """Point at arc length s from the start (clamped to the path)."""
        if s <= 0:
            return self.start
        for a, b in self.edges():
            seg = abs(b - a)
            if s <= seg:
                return a + (b - a) * (s / seg)
            s -= seg
        return self.end


def as_path(obj):
    if isinstance(obj, Path):
        return obj
    return Path(tuple(obj))


def polyline_length(pts):
    pts = np.asarray(pts, dtype=complex)
    return float(np.sum(np.abs(np.diff(pts))))


def _point_seg_dist(p, a, b):
    """Distance from points p (array) to the single segment [a, b]."""
    p = np.asarray(p, dtype=complex)
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0.0:
        return np.abs(p - a)
    t = np.clip(((p - a) * np.conj(d)).real / L2, 0.0, 1.0)
    return np.abs(p - (a + t * d))


def point_to_polyline_distance(p, pts):
    """Min distance from complex point(s) p to the polyline with vertices pts."""
    pts = np.asarray(pts, dtype=complex)
    if pts.size == 1:
        return np.abs(np.asarray(p) - pts[0])
    a = pts[:-1]
    b = pts[1:]
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    d = b - a
    L2 = np.abs(d) ** 2
    L2 = np.where(L2 == 0.0, 1.0, L2)
    t = ((p[:, None] - a[None, :]) * np.conj(d)[None, :]).real / L2[None, :]
    t = np.clip(t, 0.0, 1.0)
    proj = a[None, :] + t * d[None, :]
    dist = np.abs(p[:, None] - proj).min(axis=1)
    return dist if dist.size > 1 else float(dist[0])


def _orient(a, b, c):
    return np.sign((b.real - a.real) * (c.imag - a.imag)
                   - (b.imag - a.imag) * (c.real - a.real))


def segments_intersect(a, b, c, d):
    """Proper or touching intersection of segments [a,b] and [c,d]."""
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    # collinear touching cases
    for p, q, r in ((a, b, c), (a, b, d), (c, d, a), (c, d, b)):
        if _orient(p, q, r) == 0:
            if (min(p.real, q.real) - 1e-300 <= r.real <= max(p.real, q.real) + 1e-300
                    and min(p.imag, q.imag) - 1e-300 <= r.imag <= max(p.imag, q.imag) + 1e-300):
                return True
    return False


def seg_to_polyline_distance(a, b, pts):
    """Min distance between segment [a,b] and a polyline (0 if they cross)."""
    pts = np.asarray(pts, dtype=complex)
    if pts.size == 1:
        return float(_point_seg_dist(pts, a, b)[0])
    p, q = pts[:-1], pts[1:]
    # crossing test, vectorized orientation signs
    def orient(u, v, w):
        return np.sign((v.real - u.real) * (w.imag - u.imag)
                       - (v.imag - u.imag) * (w.real - u.real))
    o1 = orient(a, b, p)
    o2 = orient(a, b, q)
    o3 = orient(p, q, np.full_like(p, a))
    o4 = orient(p, q, np.full_like(p, b))
    if np.any((o1 != o2) & (o3 != o4)):
        return 0.0
    d1 = _point_seg_dist(pts, a, b).min()
    d2 = point_to_polyline_distance(np.array([a, b]), pts)
    return float(min(d1, np.min(d2)))


def point_in_polygon(z, poly):
    """Even-odd rule point-in-polygon test; poly is a closed vertex loop."""
    x, y = z.real, z.imag
    verts = np.asarray(poly, dtype=complex)
    x1, y1 = verts.real, verts.imag
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    cond = (y1 > y) != (y2 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xin = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    crossings = np.sum(cond & (x < xin))
    return bool(crossings % 2)


def _decimate(pts, max_pts=24):
    """Keep a geometric sketch of a polyline for visibility testing."""
    pts = np.asarray(pts, dtype=complex)
    if len(pts) <= max_pts:
        return pts
    idx = np.unique(np.round(np.linspace(0, len(pts) - 1, max_pts)).astype(int))
    return pts[idx]


def _convex_hull(points):
    """Andrew monotone chain; returns hull vertices counterclockwise."""
    pts = sorted(set((p.real, p.imag) for p in points))
    if len(pts) <= 2:
        return [complex(*p) for p in pts]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return [complex(*p) for p in hull]


def _cross(u, v):
    return u.real * v.imag - u.imag * v.real


def _batch_pair_clear(P1, P2, Q1, Q2, clearance):
    """clear[k] for query segments (P1[k], P2[k]) against edges (Q1[e], Q2[e]).

    Exact segment-segment distances (0 on crossing), fully vectorized with
    a K x E broadcast.
    """
    P1 = P1[:, None]
    P2 = P2[:, None]
    Q1 = Q1[None, :]
    Q2 = Q2[None, :]
    d1 = _cross(P2 - P1, Q1 - P1)
    d2 = _cross(P2 - P1, Q2 - P1)
    d3 = _cross(Q2 - Q1, P1 - Q1)
    d4 = _cross(Q2 - Q1, P2 - Q1)
    inter = (d1 * d2 < 0) & (d3 * d4 < 0)

    def pt_seg(P, A, B):
        d = B - A
        L2 = np.abs(d) ** 2
        L2 = np.where(L2 == 0.0, 1.0, L2)
        t = np.clip(((P - A) * np.conj(d)).real / L2, 0.0, 1.0)
        return np.abs(P - (A + t * d))

    dist = np.minimum(np.minimum(pt_seg(P1, Q1, Q2), pt_seg(P2, Q1, Q2)),
                      np.minimum(pt_seg(Q1, P1, P2), pt_seg(Q2, P1, P2)))
    dist = np.where(inter, 0.0, dist)
    return dist.min(axis=1) >= clearance


class ObstacleSet:
    """Preprocessed obstacles plus a cached visibility graph.

    Collision queries and the waypoint graph are built once; individual
    plan_path calls then only have to connect their two endpoints.
    """

    def __init__(self, obstacles, clearance=1e-3):
        self.clearance = float(clearance)
        self.polylines = []
        for obs in obstacles:
            pts = obs.as_array() if isinstance(obs, Path) else np.asarray(obs, dtype=complex)
            if pts.size >= 1:
                self.polylines.append(pts)
        self._sketches = [_decimate(p) for p in self.polylines]
        edges1, edges2 = [], []
        for pts in self.polylines:
            if len(pts) == 1:
                edges1.append(pts[0])
                edges2.append(pts[0])
            else:
                edges1.extend(pts[:-1])
                edges2.extend(pts[1:])
        self._e1 = np.asarray(edges1, dtype=complex)
        self._e2 = np.asarray(edges2, dtype=complex)
        self._waypoints = None
        self._graph = None

    def distance(self, z):
        if not self.polylines:
            return np.inf
        return min(float(np.min(point_to_polyline_distance(np.atleast_1d(z), p)))
                   for p in self.polylines)

    def segment_clear(self, a, b, clearance=None, trim_start=0.0, trim_end=0.0):
        """True if [a,b] keeps the clearance from every obstacle.

        trim_start/trim_end shrink the tested portion away from endpoints
        that legitimately sit close to (or on) an obstacle; the trims are
        capped by the endpoints' own obstacle distances, so a trimmed
        segment can never silently pierce a cut.
        """
        if self._e1.size == 0:
            return True
        clearance = self.clearance if clearance is None else clearance
        length = abs(b - a)
        if length == 0.0:
            return True
        t0 = min(trim_start / length, 0.49)
        t1 = 1.0 - min(trim_end / length, 0.49)
        aa = a + (b - a) * t0
        bb = a + (b - a) * t1
        return bool(_batch_pair_clear(np.array([aa]), np.array([bb]),
                                      self._e1, self._e2, clearance)[0])

    def segment_crosses(self, a, b):
        """True if the open segment [a,b] intersects any obstacle edge."""
        if self._e1.size == 0:
            return False
        P1 = np.array([a])[:, None]
        P2 = np.array([b])[:, None]
        Q1 = self._e1[None, :]
        Q2 = self._e2[None, :]
        d1 = _cross(P2 - P1, Q1 - P1)
        d2 = _cross(P2 - P1, Q2 - P1)
        d3 = _cross(Q2 - Q1, P1 - Q1)
        d4 = _cross(Q2 - Q1, P2 - Q1)
        inter = (d1 * d2 < 0) & (d3 * d4 < 0)
        return bool(np.any(inter))

    def endpoint_trim(self, z):
        """Clearance exemption length for a leg ending at or near an obstacle.

        Piercing is prevented separately by the proper-crossing test, so the
        exemption only waives the standoff distance near the endpoint.
        """
        return max(self.distance(z) * 0.95, 2.0 * self.clearance)

    def _build_waypoints(self):
        scale = 1.0
        allpts = [p for pts in self.polylines for p in (pts[0], pts[-1])]
        if self.polylines:
            lo = min(p.real for pts in self.polylines for p in pts)
            hi = max(p.real for pts in self.polylines for p in pts)
            lo_i = min(p.imag for pts in self.polylines for p in pts)
            hi_i = max(p.imag for pts in self.polylines for p in pts)
            scale = max(hi - lo, hi_i - lo_i, 1.0)
        cand = []
        radii = (max(6 * self.clearance, 0.02 * scale), 0.12 * scale)
        for sketch in self._sketches:
            hull = _convex_hull(_decimate(sketch, 12))
            center = np.mean(sketch)
            for v in hull:
                d = v - center
                d = d / abs(d) if abs(d) > 1e-12 else 1.0
                for u in (d, 1j * d, -1j * d):
                    for r in radii:
                        cand.append(v + r * u)
        for p in allpts:  # ring around free endpoints opens thin corridors
            for r in radii:
                cand.extend(p + r * np.exp(2j * np.pi * (np.arange(6) + 0.5) / 6))
        keep = [z for z in cand if self.distance(z) >= self.clearance * 1.5]
        seen, way = set(), []
        for z in keep:
            key = (round(z.real, 9), round(z.imag, 9))
            if key not in seen:
                seen.add(key)
                way.append(z)
        return np.asarray(way, dtype=complex)

    def _build_graph(self):
        way = self._build_waypoints()
        n = len(way)
        if n == 0:
            return way, csr_matrix((0, 0))
        ii, jj = np.triu_indices(n, k=1)
        ok = np.empty(len(ii), dtype=bool)
        chunk = 20000
        for s in range(0, len(ii), chunk):
            sl = slice(s, s + chunk)
            ok[sl] = _batch_pair_clear(way[ii[sl]], way[jj[sl]],
                                       self._e1, self._e2, self.clearance)
        ii, jj = ii[ok], jj[ok]
        w = np.abs(way[ii] - way[jj])
        graph = csr_matrix((np.concatenate([w, w]),
                            (np.concatenate([ii, jj]),
                             np.concatenate([jj, ii]))), shape=(n, n))
        return way, graph

    def graph(self):
        if self._graph is None:
            self._waypoints, self._graph = self._build_graph()
        return self._waypoints, self._graph


def _connect(obset, z, way):
    """Edges from a query endpoint into the waypoint graph.

    The portion of each candidate edge within the endpoint's own distance
    to the obstacles is exempt from the clearance test, so points lying on
    or near a cut stay reachable, but a leg can never pierce a cut.
    """
    trim = obset.endpoint_trim(z)
    out = []
    for j, w in enumerate(way):
        if obset.segment_clear(z, w, trim_start=trim) \
                and not obset.segment_crosses(z, w):
            out.append((j, abs(z - w)))
    return out


def plan_path(src, dst, obstacles, clearance=1e-3, via=None,
              final_leg_direct=False):
    """Polyline from src to dst with interior clearance from the obstacles.

    Parameters
    ----------
    src, dst : complex
        Endpoints.  They may lie close to (or on) an obstacle; only the
        interior of the route is held to the clearance.
    obstacles : ObstacleSet or iterable of Path / vertex arrays
    clearance : float
        Minimum distance the route interior keeps from every obstacle.
    via : sequence of complex, optional
        Forced intermediate waypoints, visited in order.
    final_leg_direct : bool
        Take the last leg (via[-1] -> dst) as a straight segment checked
        only for cut crossings; used to pin the approach side of targets
        that sit closer to a cut than the clearance.

    Raises
    ------
    PathBlockedError
        If no admissible corridor exists at this clearance.
    """
    src, dst = complex(src), complex(dst)
    if not isinstance(obstacles, ObstacleSet):
        obstacles = ObstacleSet(obstacles, clearance=clearance)
    legs = [src] + [complex(v) for v in (via or [])] + [dst]
    verts = [src]
    for i, (a, b) in enumerate(zip(legs, legs[1:])):
        final_hinted = final_leg_direct and via and i == len(legs) - 2
        if final_hinted:
            # the caller pinned the approach: take the straight leg as long
            # as it does not cross a cut (clearance is legitimately small)
            if obstacles.segment_crosses(a, b):
                raise PathBlockedError("hinted final leg crosses an obstacle")
            verts.append(b)
            continue
        verts.extend(_plan_leg(a, b, obstacles)[1:])
    # drop exact duplicates produced by leg stitching
    out = [verts[0]]
    for v in verts[1:]:
        if v != out[-1]:
            out.append(v)
    if len(out) == 1:
        raise ValidationError("plan_path needs distinct endpoints")
    return Path(tuple(out))


def _plan_leg(src, dst, obset):
    if src == dst:
        return [src]
    trim_s = obset.endpoint_trim(src)
    trim_d = obset.endpoint_trim(dst)
    if obset.segment_clear(src, dst, trim_start=trim_s, trim_end=trim_d) \
            and not obset.segment_crosses(src, dst):
        return [src, dst]
    way, graph = obset.graph()
    if len(way) == 0:
        raise PathBlockedError("no waypoints available and direct segment blocked")
    src_edges = _connect(obset, src, way)
    dst_edges = _connect(obset, dst, way)
    if not src_edges or not dst_edges:
        raise PathBlockedError("endpoint cannot see any waypoint at this clearance")
    dist_from_src = np.full(len(way), np.inf)
    for j, w in src_edges:
        dist_from_src[j] = w
    dmat, pred = dijkstra(graph, indices=[j for j, _ in src_edges],
                          return_predecessors=True)
    best = (np.inf, None, None)
    for row, (j0, w0) in enumerate(src_edges):
        for j1, w1 in dst_edges:
            total = w0 + dmat[row, j1] + w1
            if total < best[0]:
                best = (total, row, j1)
    total, row, j1 = best
    if not np.isfinite(total):
        raise PathBlockedError("obstacles separate the endpoints at this clearance")
    chain = [j1]
    while pred[row, chain[-1]] >= 0:
        chain.append(pred[row, chain[-1]])
    chain.reverse()
    pts = [src] + [way[j] for j in chain] + [dst]
    return _shortcut(pts, obset)


def _shortcut(pts, obset):
    """Greedy shortcutting pass; keeps clearance, shrinks the detour."""
    out = [pts[0]]
    i = 0
    while i < len(pts) - 1:
        j = len(pts) - 1
        while j > i + 1:
            trim_s = obset.endpoint_trim(pts[i])
            trim_d = obset.endpoint_trim(pts[j])
            if obset.segment_clear(pts[i], pts[j], trim_start=trim_s,
                                   trim_end=trim_d) \
                    and not obset.segment_crosses(pts[i], pts[j]):
                break
            j -= 1
        out.append(pts[j])
        i = j
    return out
