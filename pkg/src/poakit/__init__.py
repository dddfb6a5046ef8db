"""Principal observable analysis of finite metric-measure spaces."""

from .embedding import Embedding, classical_mds, compare_poa_mds, distortion_report, embed
from .extension import extend, extend_many, leave_k_out
from .mmspace import (FiniteMetricSpace, ProbabilityMeasure, WeightedGraph, build_graph_metric,
                      normalize_measure, uniform_measure, validate_metric)
from .observables import center, check_lipschitz, correlation, covariance, mean, variance
from .signals import analyze, orthonormalize, synthesize
from .solver import (PrincipalObservableSet, SolverConfig, brute_force_po, build_polytope,
                     lp_maximize, solve_poa, solve_principal_observable)
from .stability import (correspondence_distortion, covariance_stability_audit, empirical_sample,
                        functional_hausdorff, mean_stability_audit, wasserstein1)

__version__ = "0.1.0"
