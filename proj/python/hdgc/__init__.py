"""High-dimensional Granger causality testing.

Thin wrapper over the compiled extension: simulate sparse VAR panels, run
post-double-selection Granger causality tests (LM, Wald and
heteroskedasticity-robust variants), estimate daily MedRV from intraday
returns, build all-pairs spillover networks with edge-betweenness
communities, and reproduce size/power experiments.
"""

from ._hdgc import (
    __version__,
    bivariate_gc_test,
    chi2_sf,
    edge_betweenness,
    f_sf,
    gc_test,
    girvan_newman,
    medrv,
    medrv_panel,
    norm_cdf,
    norm_quantile,
    run_montecarlo,
    simulate_dgp,
    simulate_var,
    spillover_network,
    stability,
)

__all__ = [
    "__version__",
    "bivariate_gc_test",
    "chi2_sf",
    "edge_betweenness",
    "f_sf",
    "gc_test",
    "girvan_newman",
    "medrv",
    "medrv_panel",
    "norm_cdf",
    "norm_quantile",
    "run_montecarlo",
    "simulate_dgp",
    "simulate_var",
    "spillover_network",
    "stability",
]
