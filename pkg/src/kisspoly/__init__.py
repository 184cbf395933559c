"""Kissing polynomials, their supercritical zero attractors, and complex
Gaussian quadrature for oscillatory integrals on [-1, 1].

The package is organized bottom-up:

* numerics core: ``geometry`` (paths, routing), ``contour`` (adaptive
  Gauss-Kronrod), ``branchtrack`` (root continuation), ``rootfind``
  (bracketed scalar roots, Aberth-Ehrlich polynomial roots),
  ``precision`` (double / mpmath switching);
* ``moments`` and ``polynomials``: the polynomials p_n orthogonal to
  lower powers against e^{i omega z} on [-1, 1];
* ``spectral``: the curve xi^2 = Q(z), the Boutroux solver and phi;
* ``trajectories``: critical graph of -Q dz^2 and the zero-attractor arcs;
* ``parametrix``: genus-1 model problem, elliptic periods, strong
  asymptotics;
* ``quadrature``: complex Gaussian rules built on kissing-polynomial
  zeros;
* ``cli``: reproducible command-line front end.
"""

from .errors import (BranchAmbiguityError, ExistenceError, KisspolyError,
                     NonConvergenceError, NumericalError, PathBlockedError,
                     ThetaStarError, ValidationError)
from .geometry import Path, plan_path
from .contour import integrate_contour
from .branchtrack import BranchTrack, continue_branch
from .rootfind import find_root_bracketed, polynomial_roots
from .moments import MomentTable, moments
from .polynomials import ComplexPolynomial, existence_scan, monic_op, zeros_of
from .spectral import (PhiFunction, SpectralCurve, ell_constant, lambda_crit,
                       phi, phi2, psi, solve_boutroux)

__version__ = "0.1.0"

__all__ = [
    "BranchAmbiguityError", "ExistenceError", "KisspolyError",
    "NonConvergenceError", "NumericalError", "PathBlockedError",
    "ThetaStarError", "ValidationError",
    "Path", "plan_path", "integrate_contour", "BranchTrack",
    "continue_branch", "find_root_bracketed", "polynomial_roots",
    "MomentTable", "moments", "ComplexPolynomial", "existence_scan",
    "monic_op", "zeros_of", "PhiFunction", "SpectralCurve", "ell_constant",
    "lambda_crit", "phi", "phi2", "psi", "solve_boutroux",
    "__version__",
]
