"""Complex Gaussian quadrature for oscillatory integrals on [-1, 1].

The rule with 2n nodes takes the zeros x_j of the kissing polynomial
p_{2n}^omega and weights solving the interpolatory moment conditions

    sum_j w_j x_j^k = m_k(omega),      k = 0 .. 2n-1,

which by orthogonality is exact for k up to 4n-1 (full Gaussian degree for
the bilinear form).  Applied to analytic f, the error of

    sum_j w_j f(x_j)  ~  int_{-1}^1 f(x) e^{i omega x} dx

decays like O(omega^{-2n-1}) as omega grows, while the rule collapses to
plain Gauss-Legendre as omega -> 0.  Node/weight solves run in extended
precision; the error oracle is adaptive contour quadrature at tolerances
far below the rule's error floor.
"""

from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .contour import integrate_contour
from .errors import ValidationError
from .geometry import Path
from .moments import raw_moments
from .polynomials import monic_op
from .precision import EXTENDED_DPS, workdps
from .rootfind import polynomial_roots, polynomial_roots_mp

__all__ = ["QuadratureRule", "build_rule", "apply_rule", "order_fit",
           "oscillatory_oracle", "gauss_legendre_reference"]


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes (zeros of p_{2n}^omega), complex weights, and the frequency."""

    omega: float
    n_half: int
    nodes: np.ndarray
    weights: np.ndarray
    nodes_mp: tuple = None
    weights_mp: tuple = None

    def __post_init__(self):
        if len(self.nodes) != 2 * self.n_half:
            raise ValidationError("rule must have 2*n_half nodes")


def build_rule(n_half, omega, dps=EXTENDED_DPS):
    """Complex Gaussian rule with 2*n_half nodes for the weight e^{i omega z}.

    Nodes are the zeros of p_{2n}^omega; weights solve the moment
    Vandermonde system in extended precision.  Nonexistence of the
    polynomial (conditioning blow-up) propagates as ExistenceError.
    """
    if n_half < 1:
        raise ValidationError("n_half must be >= 1")
    n = 2 * n_half
    p = monic_op(n, omega)
    work = max(dps, p.dps or 0)
    try:
        warm = polynomial_roots([complex(c) for c in p.coeffs])
    except Exception:
        warm = None
    nodes_mp = polynomial_roots_mp(p.coeffs, dps=work, start=warm)
    raw = raw_moments(omega, 2 * n, dps=work)
    with workdps(work):
        V = mp.matrix(n, n)
        for k in range(n):
            for j in range(n):
                V[k, j] = nodes_mp[j] ** k
        rhs = mp.matrix([raw[k] for k in range(n)])
        w = mp.lu_solve(V, rhs)
        weights_mp = tuple(w[j] for j in range(n))
    nodes = np.asarray([complex(z) for z in nodes_mp])
    weights = np.asarray([complex(v) for v in weights_mp])
    return QuadratureRule(omega=float(omega), n_half=n_half, nodes=nodes,
                          weights=weights, nodes_mp=tuple(nodes_mp),
                          weights_mp=weights_mp)


def interpolatory_weights(rule):
    """Independent weight construction through Lagrange basis integrals.

    w_j = int l_j(x) e^{i omega x} dx with l_j = p/( (x - x_j) p'(x_j) );
    the quotient polynomial comes from synthetic division, its moments from
    the raw moment table.  Cross-validates the Vandermonde solve.
    """
    n = 2 * rule.n_half
    p = monic_op(n, rule.omega)
    work = max(EXTENDED_DPS, p.dps or 0)
    raw = raw_moments(rule.omega, n, dps=work)
    out = []
    with workdps(work):
        coeffs = [mp.mpc(c) for c in p.coeffs]
        dcoeffs = [k * c for k, c in enumerate(coeffs)][1:]
        for xj in rule.nodes_mp:
            # synthetic division p(x) / (x - xj), quotient ascending
            q = [mp.mpc(0)] * n
            acc = coeffs[n]
            for k in range(n - 1, -1, -1):
                q[k] = acc
                acc = coeffs[k] + xj * acc
            dp = mp.mpc(0)
            for c in reversed(dcoeffs):
                dp = dp * xj + c
            integral = mp.fsum(q[k] * raw[k] for k in range(n))
            out.append(integral / dp)
    return np.asarray([complex(v) for v in out])


def apply_rule(rule, f):
    """sum_j w_j f(x_j) for f evaluable at the complex nodes."""
    vals = np.asarray([f(z) for z in rule.nodes], dtype=complex)
    return complex(np.sum(rule.weights * vals))


def oscillatory_oracle(f, omega, tol=1e-14, dps=None):
    """Reference value of int_{-1}^{1} f(x) e^{i omega x} dx.

    Adaptive panels in double for moderate omega; mpmath Gauss-Legendre on
    half-period panels when omega is large or the tolerance is extreme.
    """
    if dps is None and abs(omega) <= 100 and tol >= 1e-14:
        return integrate_contour(lambda z: f(z) * np.exp(1j * omega * z),
                                 Path((-1.0, 1.0)), tol=tol)
    work = dps or 40
    with workdps(work):
        om = mp.mpf(omega)
        n_panels = max(8, int(abs(omega) / 3) + 4)
        edges = [mp.mpf(-1) + mp.mpf(2) * k / n_panels for k in range(n_panels + 1)]
        total = mp.mpc(0)
        for a, b in zip(edges[:-1], edges[1:]):
            total += mp.quad(lambda x: f(complex(x)) * mp.exp(1j * om * x), [a, b])
        return complex(total)


def gauss_legendre_reference(n_pts, f, omega):
    """Plain Gauss-Legendre control: same node count, real nodes."""
    x, w = np.polynomial.legendre.leggauss(n_pts)
    return complex(np.sum(w * f(x) * np.exp(1j * omega * x)))


def order_fit(n_half, f, omega_grid, skip_cond=1e12):
    """Least-squares slope of log|error| vs log omega for the 2n-node rule.

    Rules at near-nonexistence frequencies (conditioning above skip_cond)
    are skipped and reported.  Returns (slope, used, skipped) where used is
    a list of (omega, abs_error).
    """
    omega_grid = [float(w) for w in omega_grid]
    if len(omega_grid) < 6:
        raise ValidationError("need at least 6 frequencies for a slope fit")
    used, skipped = [], []
    for om in omega_grid:
        try:
            rule = build_rule(n_half, om)
        except Exception as exc:
            skipped.append((om, str(exc)))
            continue
        p = monic_op(2 * n_half, om)
        if p.cond > skip_cond:
            skipped.append((om, f"conditioning {p.cond:.2e}"))
            continue
        approx = apply_rule(rule, f)
        truth = oscillatory_oracle(f, om, tol=1e-14,
                                   dps=40 if om > 100 else None)
        used.append((om, abs(approx - truth)))
    if len(used) < 4:
        raise ValidationError(f"too few usable frequencies: {len(used)}")
    lo = np.log([u[0] for u in used])
    le = np.log([max(u[1], 1e-300) for u in used])
    slope = float(np.polyfit(lo, le, 1)[0])
    return slope, used, skipped
