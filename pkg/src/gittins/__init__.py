"""Gittins indices for normal reward processes under geometric discounting."""

from .model import (AffineMap, ConfigurationError, Discounting, NormalArm,
                    ScaledState, SolverError, make_discounting, normalize,
                    posterior_update, time_change)
from .boundary import (BoundarySolverConfig, BoundaryTable, asymptotic_b,
                       boundary_value, psi, solve_boundary, wiener_index)
from .exact import (DpConfig, IndexResult, constrained_boundary, gittins_exact,
                    index_exact)
from .approx import (RHO, RhoEstimate, corrected_boundary, estimate_rho,
                     index_avg, index_ca, index_ca_prime, index_ua,
                     index_ua_prime, spacing_delta, upper_bound_gittins,
                     upper_bound_thm2)
from .sim import (BanditConfig, IndexCache, SimResult, compare, index_of,
                  simulate)

__all__ = [
    "AffineMap", "BanditConfig", "BoundarySolverConfig", "BoundaryTable",
    "ConfigurationError", "Discounting", "DpConfig", "IndexCache",
    "IndexResult", "NormalArm", "RHO", "RhoEstimate", "ScaledState",
    "SimResult", "SolverError", "asymptotic_b", "boundary_value", "compare",
    "constrained_boundary", "corrected_boundary", "estimate_rho",
    "gittins_exact", "index_avg", "index_ca", "index_ca_prime", "index_exact",
    "index_of", "index_ua", "index_ua_prime", "make_discounting", "normalize",
    "posterior_update", "psi", "simulate", "solve_boundary", "spacing_delta",
    "time_change", "upper_bound_gittins", "upper_bound_thm2", "wiener_index",
]
