"""Exact geometry of polytopes and piecewise linear convex functions.

The package computes translation invariant valuations on convex bodies in
dimension d = n+1 and their epi-translation invariant counterparts on convex
functions of n variables, for n = 1, 2.  Vertex and halfspace data are kept
in exact rational arithmetic; measure-theoretic quantities that have no
closed form are estimated by quadrature or Monte Carlo with seeded RNG.
"""

from .bodies import Polytope
from .functions import PLConvexFunction

__all__ = ["Polytope", "PLConvexFunction"]

__version__ = "0.1.0"
