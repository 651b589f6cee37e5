"""Numerical toolkit for sharp log-weighted Trudinger-Moser and Hardy-type
inequalities on the unit ball, reduced to one-dimensional weighted Sobolev
spaces of radial profiles.

Subpackages:

- ``constants``      closed-form sharp constants and the digamma machinery
- ``quadrature``     weighted singular quadrature and incomplete gamma functions
- ``profiles``       radial profile model, norms, exponential functionals,
                     extremal families and the log-variable transport
- ``hardy``          decision oracle for log-weighted Hardy inequalities
- ``optimizer``      constrained maximization of the exponential functional
- ``admissibility``  radial Hessian-cone checks and kink smoothing
- ``cli``            command-line interface
"""

from logtm.constants import Params, SharpConstants, Weight, compute_constants, digamma_bound

__all__ = [
    "Params",
    "SharpConstants",
    "Weight",
    "compute_constants",
    "digamma_bound",
]

__version__ = "0.1.0"
