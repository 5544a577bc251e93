"""Parametric continued fractions, approximation pairs, and the folded
geometry of their joint range.

For each parameter k > 0, points of (0,1) expand in digits through the
shift x -> k/x - k - a.  Successive approximation coefficients pair up
through a single rational map of the orbit state, and the set of all
pairs is a union of strip images: quadrangles wherever the map does not
fold, and one five-curve region for the digit-0 strip when k < 1, where
the fold breaks injectivity.  This package computes all of it in three
arithmetic modes, verifies the structural claims by Monte Carlo and
exact-rational oracles, and emits plot-ready CSV data.
"""

from .scalar import (
    EXACT,
    EXTENDED,
    HARDWARE,
    DomainError,
    Mode,
    NumericContext,
    TolerancePolicy,
    snap_floor,
)
from .cf import (
    ConvergentState,
    DEFAULT_DEPTH,
    Expansion,
    OrbitEnded,
    convergent_step,
    convergents,
    eval_finite,
    expand,
    future,
    gauss_step,
    past_direct,
    past_step,
)
from .jager import (
    ApproximationCoefficient,
    DynamicPair,
    JagerPoint,
    Orbit,
    approximation_pair,
    correspondence_residual,
    dynamic_pair,
    theta,
    theta_sequence,
)
from .geometry import (
    GammaMode,
    LabeledCurve,
    Location,
    QuadRegion,
    Strip,
    corollary_quad,
    gamma_contains,
    gamma_piecewise_contains,
    hyperbola_arc,
    p0_boundary_curves,
    p0_sharp_contains,
    pa_sharp_quad,
    psi,
    psi_preimage,
    reflect,
    strip_contains,
)
from .experiments import (
    DEFAULT_K_GRID,
    ExperimentConfig,
    PairRecord,
    VerificationReport,
    Witness,
    emit_plot_data,
    injectivity_witness,
    iter_jager_pairs,
    run_verification,
    sample_jager_pairs,
)

__version__ = "0.1.0"
