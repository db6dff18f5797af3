"""Subspace-migration imaging of thin, curve-like electromagnetic inclusions
from far-field multi-static response data.
"""
from .bessel import (
    bessel_j,
    closed_form_multi,
    closed_form_single,
    discrete_sum_scalar,
    discrete_sum_vector,
    lambda_fn,
)
from .forward import (
    DirectionSet,
    FactorizationParts,
    MSRMatrix,
    NoiseSpec,
    add_noise,
    assemble_msr,
    build_factorization,
    load_msr,
    make_directions,
    save_msr,
)
from .geometry import (
    CurveSample,
    ParametricCurve,
    ThinInclusion,
    polarization_tensor,
    sample_curve,
    sigma1,
    sigma2,
)
from .imaging import (
    MULTI_FILTER,
    SINGLE_FILTER,
    ImageMap,
    ImagingGrid,
    TestVectorSpec,
    apply_filter,
    closed_form_map,
    evaluate_functional,
    normalize_map,
    region_split_filter,
)
from .spectral import SpectralDecomposition, decompose, select_signal_dim

__version__ = "0.1.0"
