"""Joint quadrature measurements with minimal retrodictive error.

Measurement matrices in SL(2, R), their informational-equivalence classes and
the generalized Husimi outcome distributions they produce.
"""

from .husimi import (
    HusimiResult,
    Method,
    husimi_closed_grid,
    husimi_convolution,
    husimi_gaussian_closed,
    husimi_overlap,
    husimi_overlap_grid,
    outcome_covariance_m,
    rho_m_view,
    smoothing_scales,
)
from .sampler import OutcomeBatch, outcome_stats, sample_fock, sample_gaussian
from .sl2r import (
    CanonicalParams,
    Decomposition,
    MetricTensor,
    Sl2Matrix,
    accuracies,
    are_equivalent,
    canonical_orthogonal,
    canonical_orthogonal_balanced,
    decompose,
    is_rotation,
    matrix_from_params,
    metric_of,
    mod_half_pi,
    orthogonal_matrix,
    params_from_matrix,
    pointer_transform,
    rebalance,
)
from .states import (
    FockDensity,
    FockVector,
    GaussianState,
    PhaseSpaceGrid,
    coherent,
    gaussian_to_fock,
    squeezed_gaussian,
    squeezed_state,
    vacuum,
    wigner_fock,
    wigner_gaussian,
)

__version__ = "0.1.0"
