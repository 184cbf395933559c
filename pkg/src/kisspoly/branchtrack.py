"""Branch-tracked analytic continuation of square and quartic roots.

Given a single-valued function g and a path avoiding the zeros and poles
of g, the function g^(1/order) has exactly ``order`` analytic branches
along the path.  :func:`continue_branch` follows the one selected by the
initial value, refining the step until consecutive samples differ in
argument by less than pi/4 (which guarantees the pi/2 continuity invariant
with margin and rules out silently hopping branches).
"""

from dataclasses import dataclass

import numpy as np

from .errors import BranchAmbiguityError, ValidationError
from .geometry import Path

__all__ = ["BranchTrack", "continue_branch"]

_MAX_REFINE = 48


@dataclass(frozen=True)
class BranchTrack:
    """Samples (point, value) of one analytic branch of g^(1/order) along a path."""

    base_point: complex
    base_value: complex
    order: int
    points: tuple
    values: tuple

    @property
    def final_value(self):
        return self.values[-1]

    def value_near(self, z):
        """Tracked value at the sample closest to z."""
        pts = np.asarray(self.points)
        return self.values[int(np.argmin(np.abs(pts - z)))]


def _step_root(g, order, z_new, prev_val, gz_new=None):
    """Branch of g(z_new)^(1/order) closest in angle to prev_val."""
    w = g(z_new) if gz_new is None else gz_new
    r = abs(w)
    if r == 0.0:
        raise BranchAmbiguityError(f"g vanishes at {z_new}; branch undetermined")
    mag = r ** (1.0 / order)
    base = np.angle(w) / order
    best, best_gap = None, np.inf
    for k in range(order):
        cand = mag * np.exp(1j * (base + 2.0 * np.pi * k / order))
        gap = abs(np.angle(cand / prev_val))
        if gap < best_gap:
            best, best_gap = cand, gap
    return best, best_gap


def continue_branch(g, root_order, path, initial, min_clearance=1e-12,
                    samples_per_edge=8):
    """Continue the branch of g^(1/root_order) along a path.

    Parameters
    ----------
    g : callable
        Single-valued function (scalar in, scalar out is fine).
    root_order : {2, 4}
        Order of the root being tracked.
    path : Path or sequence of complex
    initial : complex
        Branch value at the start of the path; must satisfy
        initial**root_order == g(start) to ~1e-6 relative.

    Returns
    -------
    BranchTrack

    Raises
    ------
    BranchAmbiguityError
        If the path passes through (numerically: too close to) a zero or
        pole of g, making the branch choice ambiguous.
    """
    if root_order not in (2, 4):
        raise ValidationError("root_order must be 2 or 4")
    if not isinstance(path, Path):
        path = Path(tuple(path))
    z0 = path.start
    g0 = complex(g(z0))
    if abs(g0) < min_clearance:
        raise BranchAmbiguityError("path starts at a zero of g")
    initial = complex(initial)
    rel = abs(initial ** root_order - g0) / max(abs(g0), 1e-300)
    if rel > 1e-6:
        raise ValidationError(
            f"initial value is not a {root_order}-th root of g(start): rel err {rel:.2e}")

    pts = [z0]
    vals = [initial]
    verts = list(path.vertices) + ([path.vertices[0]] if path.closed else [])
    for a, b in zip(verts, verts[1:]):
        n = samples_per_edge
        for _ in range(_MAX_REFINE):
            seg_pts = a + (b - a) * (np.arange(1, n + 1) / n)
            ok = True
            trial_vals = []
            prev = vals[-1]
            for z in seg_pts:
                w = complex(g(z))
                if abs(w) < min_clearance:
                    raise BranchAmbiguityError(
                        f"path passes through a zero/pole of g near {z}")
                cand, gap = _step_root(g, root_order, z, prev, gz_new=w)
                if gap >= np.pi / 4:
                    ok = False
                    break
                trial_vals.append(cand)
                prev = cand
            if ok:
                pts.extend(seg_pts)
                vals.extend(trial_vals)
                break
            n *= 2
        else:
            raise BranchAmbiguityError(
                "branch continuation could not resolve the argument continuity "
                f"between {a} and {b}")
    return BranchTrack(base_point=z0, base_value=initial, order=root_order,
                       points=tuple(pts), values=tuple(vals))
