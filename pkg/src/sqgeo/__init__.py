"""Geodesic geometry of surface quasi-geostrophic flow.

Three computational arenas, one metric (the F(p) = |p| inertia operator on
stream functions):

* :mod:`sqgeo.spectral` / :mod:`sqgeo.curvature` — exact mode algebra and
  sectional curvature on the flat torus;
* :mod:`sqgeo.sphere` — Jacobi-field modes and conjugate-point clustering
  along the rigid rotation of the sphere;
* :mod:`sqgeo.flow` — the desingularized Lagrangian flow and exponential
  map on the plane.

``sqgeo.cli`` exposes all of it as the ``sqgeo`` command.
"""

from .curvature import (
    CurvatureReport,
    ModePair,
    closed_form_curvature,
    curvature_scan,
    four_term_curvature,
    normalized_curvature,
)
from .spectral import (
    SQRT_LAPLACIAN,
    LatticeVector,
    MetricSymbol,
    TrigField,
    ad,
    ad_star,
    euler_arnold_rhs,
    inner_product,
    poisson_bracket,
    sobolev_symbol,
)
from .sphere import (
    CLUSTER_LIMIT,
    ConjugatePoint,
    JacobiModeSolution,
    SphericalHarmonicIndex,
    cluster_scan,
    conjugate_time,
    integrate_jacobi_ode,
    lambda_n,
    mode_solution,
    steady_background_check,
)

__version__ = "0.1.0"

_LAZY_SUBMODULES = ("backend", "cli", "flow", "io", "verify")


def __getattr__(name):
    # the flow stack pulls in the quadrature backends; keep `import sqgeo`
    # light by loading these on first attribute access
    if name in _LAZY_SUBMODULES:
        import importlib

        return importlib.import_module("." + name, __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(globals()) | set(_LAZY_SUBMODULES))
