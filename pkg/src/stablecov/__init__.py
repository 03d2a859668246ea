"""Dependence measures, memory diagnostics, and simulation tools for
symmetric alpha-stable processes and random fields.

The package is organised around four layers:

* `stablecov.spectral` — discrete spectral measures on the circle and
  the dependence functionals defined from them,
* `stablecov.linear_process` / `stablecov.linear_field` — lag
  dependence of linear processes and product lattice fields with
  certified truncation error,
* `stablecov.integrals` — the same functionals for moving averages
  given by integral kernels, plus Ornstein-Uhlenbeck closed forms,
* `stablecov.memory` — partial-sum scales, memory classification,
  simulation, and Levy-measure summaries.

Everything numeric is deterministic for a fixed seed and returns an
explicit error certificate wherever truncation is involved.
"""

from .exceptions import (
    CertificateError,
    DegenerateError,
    NumericalError,
    StablecovError,
    ToleranceError,
    UnstableLogError,
    UnsupportedOrderError,
    ValidationError,
)
from .integrals import (
    COUNTING,
    LEBESGUE,
    Asymptote,
    KernelPair,
    OUParams,
    alpha_corr_integral,
    alpha_cov_integral,
    codifference_integral,
    covariation_integral,
    moving_average_pair,
    ou_codifference,
    ou_codifference_normalized,
    ou_codifference_normalized_asymptote,
    ou_kernels,
    ou_rho,
    ou_rho_asymptote,
    ou_rho_normalized,
)
from .linear_field import (
    DecayLaw2D,
    Explicit2D,
    Filter2D,
    Product,
    ProductHyperbolic,
    field_batch,
    predicted_decay_2d,
    rho_nm,
    rho_tilde_nm,
)
from .linear_process import (
    DecayLaw,
    Explicit,
    Filter1D,
    Geometric,
    Hyperbolic,
    alpha_coefficient_sum,
    codifference_n,
    covariation_n,
    dependence_batch,
    pair_spectral_measure,
    predicted_decay,
    rho_n,
    rho_tilde_n,
)
from .memory import (
    ClassicReport,
    CodiffEstimate,
    GrowthFit,
    InnovationLaw,
    LevyPolarMeasure,
    MemoryReport,
    classic_memory_class,
    classify_directional,
    classify_memory,
    discretize_polar,
    empirical_codifference,
    estimate_growth_exponent,
    exact_norm_A_alpha,
    exact_variance_A2,
    field_scale_Z,
    loglog_slope,
    q_covariance,
    sample_sas,
    simulate_process,
)
from .spectral import (
    DependenceSummary,
    SpectralMeasure,
    alpha_corr_matrix,
    alpha_correlation,
    alpha_cov_matrix,
    alpha_covariance,
    char_function,
    codifference,
    covariation,
    dependence_summary,
    estimate_spectral_from_samples,
    subgaussian_spectral,
    symmetrize,
)

__version__ = "0.1.0"
