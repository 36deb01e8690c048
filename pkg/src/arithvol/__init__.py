"""Exact desk-scale toolkit for filtered rational vector spaces, normed
integer lattices and graded linear series: slope and minimum filtrations,
inequality audits, and volume experiments on closed-form models."""

from .exactlog import ExactLog, as_float
from .measure import DiracMixture, PiecewiseLinear, cdf_distance, dominates
from .filtration import (
    FilteredSpace,
    check_exact_sequence,
    check_shift_domination,
)
from .lattice import (
    BaseField,
    BudgetExhausted,
    DiagonalMaxNorm,
    Enclosure,
    EuclideanNorm,
    HNFlag,
    NormedLattice,
    PolyhedralMaxNorm,
    UnsupportedNorm,
    UnverifiedCertificate,
    arakelov_degree,
    audit_inequalities,
    distortion,
    dual,
    h0,
    height_of_map,
    minimum_filtration,
    slope_filtration,
    slope_invariants,
    successive_minima,
)
from .graded import (
    AsymptoticTrace,
    ExplicitSeries,
    GradedSeries,
    WeightedMonomialSeries,
    approximation_ratio,
    arithmetic_volume_estimate,
    asymptotic_trace,
    fujita_experiment,
    metric_comparison_experiment,
    quasi_filtered_audit,
    truncation_comparison,
    volume_estimate,
    volume_identity_check,
)
from .models import ModelSpec, build, oracle
from .report import AuditEntry, AuditReport

__version__ = "0.1.0"
