"""Extrinsic antimeans, means and two-sample tests on Kendall planar shape space."""
from .cxlinalg import (
    EigenDecomposition,
    canonical_phase,
    chi2_quantile,
    chi2_sf,
    hermitian_eig,
    solve_spd,
    sym_inv_sqrt,
)
from .errors import *  # noqa: F401,F403
from .estimators import (
    Location,
    LocationEstimate,
    OneSampleResult,
    Sample,
    extrinsic_estimate,
    frechet_function,
    one_sample_statistic,
    sample_anticovariance,
)
from .landmarks import Format, LandmarkFile, parse_landmarks, write_landmarks
from .manifolds import (
    Mode,
    Sphere,
    TangentFrame,
    VeroneseWhitney,
    chord_distance_sq,
    farthest_projection,
    nearest_projection,
    projection_differential,
    tangent_frame_at,
    vw_embed,
)
from .shapes import KAdConfig, ShapePoint, helmert_submatrix, shape_distance, to_shape
from .twosample import (
    Policy,
    Pooling,
    TwoSampleReport,
    generic_two_sample_statistic,
    pooled_estimate,
    two_sample_test,
    vw_two_sample_statistic,
)

__version__ = "0.1.0"
