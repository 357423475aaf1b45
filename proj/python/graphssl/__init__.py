"""Graph-based Bayesian semi-supervised learning: graphs, Matérn priors, pCN sampling."""

from ._core import (
    InvalidArgument,
    NumericalError,
    Unsupported,
    default_connectivity,
    epsilon_graph,
    knn_graph,
    laplacian_spectrum,
    pcn,
    regression_posterior,
    sample_prior,
    spectrum_vs_circle,
    tl2_distance,
    two_moons,
)

__all__ = [
    "InvalidArgument",
    "NumericalError",
    "Unsupported",
    "default_connectivity",
    "epsilon_graph",
    "knn_graph",
    "laplacian_spectrum",
    "pcn",
    "regression_posterior",
    "sample_prior",
    "spectrum_vs_circle",
    "tl2_distance",
    "two_moons",
]
