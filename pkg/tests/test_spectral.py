import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablecov import (
    DegenerateError,
    SpectralMeasure,
    UnsupportedOrderError,
    ValidationError,
    alpha_corr_matrix,
    alpha_correlation,
    alpha_cov_matrix,
    alpha_covariance,
    char_function,
    codifference,
    covariation,
    dependence_summary,
    estimate_spectral_from_samples,
    sample_sas,
    subgaussian_spectral,
    symmetrize,
)

AXIS = SpectralMeasure([(1, 0), (-1, 0), (0, 1), (0, -1)],
                       [0.5, 0.5, 0.5, 0.5], 1.5)


def random_measure(rng, alpha=None, n=8):
    """Random atom cloud; directions from the normal, positive weights."""
    pts = rng.normal(size=(n, 2))
    w = rng.uniform(0.2, 2.0, size=n)
    if alpha is None:
        alpha = rng.uniform(0.1, 2.0)
    return SpectralMeasure(pts, w, alpha)


# ---------------------------------------------------------------- basics


def test_constructor_folds_norm_into_weight():
    # an atom seeded off the unit circle keeps the law invariant:
    # weight picks up |v|^alpha and the direction is normalized
    g = SpectralMeasure([(2.0, 0.0)], [1.0], 1.5)
    assert g.points[0] == pytest.approx((1.0, 0.0))
    assert g.weights[0] == pytest.approx(2.0 ** 1.5)


def test_axis_atoms_give_independent_coordinates():
    assert alpha_covariance(AXIS) == 0.0
    assert alpha_correlation(AXIS) == 0.0
    assert codifference(AXIS) == 0.0
    assert covariation(AXIS) == 0.0


def test_single_line_support_gives_correlation_one():
    g = SpectralMeasure([(1, 1), (-1, -1), (2, 2)], [0.3, 0.3, 0.1], 1.2)
    assert alpha_correlation(g) == pytest.approx(1.0, abs=1e-14)


def test_zero_marginal_moment_is_degenerate():
    g = SpectralMeasure([(1, 0), (-1, 0)], [0.5, 0.5], 1.5)
    with pytest.raises(DegenerateError):
        alpha_correlation(g)


def test_cov_matrix_matches_direct_summation():
    rng = np.random.default_rng(11)
    g = random_measure(rng, n=8)
    oracle = np.einsum("k,ki,kj->ij", g.weights, g.points, g.points)
    assert np.allclose(alpha_cov_matrix(g), oracle, atol=1e-14)
    ev = np.linalg.eigvalsh(alpha_cov_matrix(g))
    assert ev.min() >= -1e-10


def test_axis_atoms_cov_matrix_is_identity():
    assert np.allclose(alpha_cov_matrix(AXIS), np.eye(2))


def test_single_symmetric_pair_is_rank_one():
    g = SpectralMeasure([(0.6, 0.8), (-0.6, -0.8)], [1.0, 1.0], 1.7)
    m = alpha_cov_matrix(g)
    assert np.linalg.matrix_rank(m, tol=1e-12) == 1


def test_diagonal_codifference_value():
    # atoms +-(1,1)/sqrt(2) with weight w each: the summand is
    # 2(1/sqrt2)^alpha - 0, summed over both atoms
    for alpha in (0.5, 1.0, 1.5, 2.0):
        w = 0.7
        s = 1.0 / math.sqrt(2.0)
        g = SpectralMeasure([(s, s), (-s, -s)], [w, w], alpha)
        assert codifference(g) == pytest.approx(2 * w * 2 ** (1 - alpha / 2))


def test_covariation_is_asymmetric_in_its_arguments():
    g = SpectralMeasure([(0.8, 0.6), (-0.8, -0.6), (0.0, 1.0)],
                        [1.0, 1.0, 0.5], 1.5)
    forward = covariation(g)
    flipped = covariation(SpectralMeasure(g.points[:, ::-1], g.weights, 1.5))
    assert forward != pytest.approx(flipped)


def test_covariation_rejects_low_alpha():
    g = SpectralMeasure([(0.6, 0.8)], [1.0], 1.0)
    with pytest.raises(UnsupportedOrderError):
        covariation(g)


def test_alpha_two_identities():
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = random_measure(rng, alpha=2.0)
        rho = alpha_covariance(g)
        assert codifference(g) == pytest.approx(2.0 * rho, rel=1e-12)
        assert covariation(g) == pytest.approx(rho, rel=1e-12)


def test_char_function_matches_definition():
    g = SpectralMeasure([(0.6, 0.8), (0.0, -1.0)], [0.4, 1.1], 1.3)
    t = (0.7, -2.0)
    expo = (0.4 * abs(0.7 * 0.6 - 2.0 * 0.8) ** 1.3
            + 1.1 * abs(2.0) ** 1.3)
    assert char_function(g, t) == pytest.approx(math.exp(-expo))


def test_char_function_even_for_symmetric_measure():
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(5, 2))
    g = symmetrize(SpectralMeasure(pts, rng.uniform(0.5, 1, 5), 1.4))
    for t in [(1.0, 0.3), (-0.4, 2.0)]:
        assert char_function(g, t) == pytest.approx(
            char_function(g, (-t[0], -t[1])), rel=1e-14)


def test_dependence_summary_bundles_the_four_measures():
    g = SpectralMeasure([(0.6, 0.8), (-0.6, -0.8)], [1.0, 1.0], 1.6)
    d = dependence_summary(g)
    assert d.rho == pytest.approx(alpha_covariance(g))
    assert d.rho_tilde == pytest.approx(alpha_correlation(g))
    assert d.codifference == pytest.approx(codifference(g))
    assert d.covariation == pytest.approx(covariation(g))


# ------------------------------------------------------------ properties


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=60, deadline=None)
def test_correlation_is_bounded(seed):
    g = random_measure(np.random.default_rng(seed))
    try:
        assert abs(alpha_correlation(g)) <= 1.0 + 1e-12
    except DegenerateError:
        pass


@given(st.integers(0, 2 ** 32 - 1),
       st.floats(1e-3, 1e3, allow_nan=False))
@settings(max_examples=60, deadline=None)
def test_mass_rescaling(seed, c):
    g = random_measure(np.random.default_rng(seed))
    scaled = g.scaled(c)
    assert alpha_covariance(scaled) == pytest.approx(
        c * alpha_covariance(g), rel=1e-12)
    assert alpha_correlation(scaled) == pytest.approx(
        alpha_correlation(g), rel=1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.1, 2.0),
       st.floats(0.1, 2.0))
@settings(max_examples=40, deadline=None)
def test_correlation_ignores_the_alpha_field(seed, a1, a2):
    g = random_measure(np.random.default_rng(seed), alpha=a1)
    r1 = alpha_correlation(g)
    r2 = alpha_correlation(g.with_alpha(a2))
    assert r1 == r2  # bit-identical: the ratio never touches alpha


def test_symmetrize_halves_and_mirrors():
    g = SpectralMeasure([(1.0, 0.0)], [2.0], 1.5)
    s = symmetrize(g)
    assert s.symmetric
    assert len(s) == 2
    assert s.total_mass == pytest.approx(2.0)
    assert alpha_covariance(s) == pytest.approx(alpha_covariance(g))


# ------------------------------------------------------------ round trip


def test_csv_round_trip():
    rng = np.random.default_rng(7)
    g = random_measure(rng, alpha=1.25)
    buf = io.StringIO()
    g.to_csv(buf)
    buf.seek(0)
    back = SpectralMeasure.from_csv(buf)
    assert back.alpha == g.alpha
    assert np.allclose(back.points, g.points)
    assert np.allclose(back.weights, g.weights)


# ------------------------------------------------------------ sub-Gaussian


def test_subgaussian_correlation_matches_r():
    for r in (0.0, 0.5, -0.7):
        g = subgaussian_spectral(1.0, 1.0, r, 1.5, n_atoms=4096)
        assert alpha_correlation(g) == pytest.approx(r, abs=1e-3)


def test_subgaussian_char_function_normalization():
    # calibration point t=(1,0): exp(-sigma1^alpha)
    for alpha in (0.7, 1.5):
        g = subgaussian_spectral(1.0, 2.0, 0.3, alpha, n_atoms=4096)
        want = math.exp(-1.0)
        assert char_function(g, (1.0, 0.0)) == pytest.approx(want, rel=1e-6)


def test_subgaussian_against_monte_carlo_projection():
    # oracle: project N(0, Sigma) draws radially with squared-norm
    # weight, bin on the circle, and compare the scale-free correlation
    sigma1, sigma2, r, alpha = 1.0, 2.0, 0.3, 1.4
    rng = np.random.default_rng(101)
    cov = [[sigma1 ** 2, r * sigma1 * sigma2],
           [r * sigma1 * sigma2, sigma2 ** 2]]
    draws = rng.multivariate_normal([0, 0], cov, size=1_000_000)
    norms = np.hypot(draws[:, 0], draws[:, 1])
    theta = np.arctan2(draws[:, 1], draws[:, 0])
    bins = np.linspace(-math.pi, math.pi, 257)
    mass, _ = np.histogram(theta, bins=bins, weights=norms ** 2)
    centers = 0.5 * (bins[:-1] + bins[1:])
    keep = mass > 0
    oracle = SpectralMeasure(
        np.column_stack([np.cos(centers[keep]), np.sin(centers[keep])]),
        mass[keep], alpha)
    got = alpha_correlation(subgaussian_spectral(sigma1, sigma2, r, alpha))
    assert got == pytest.approx(alpha_correlation(oracle), abs=5e-3)


def test_subgaussian_rejects_degenerate_r():
    with pytest.raises(ValidationError):
        subgaussian_spectral(1.0, 1.0, 1.0, 1.5)


# ------------------------------------------------------- tail estimation


def _one_sided_stable(rho, size, rng):
    """Positive stable with Laplace transform exp(-s**rho) (Kanter)."""
    u = rng.uniform(0.0, math.pi, size)
    w = rng.exponential(1.0, size)
    return (np.sin(rho * u) / np.sin(u) ** (1.0 / rho)
            * (np.sin((1.0 - rho) * u) / w) ** ((1.0 - rho) / rho))


def test_one_sided_stable_oracle_is_sound():
    rng = np.random.default_rng(8)
    a = _one_sided_stable(0.75, 100_000, rng)
    assert np.mean(np.exp(-a)) == pytest.approx(math.exp(-1.0), abs=0.01)


def test_estimate_independent_pair_is_uncorrelated():
    rng = np.random.default_rng(21)
    x = sample_sas(1.5, 100_000, rng)
    y = sample_sas(1.5, 100_000, rng)
    g = estimate_spectral_from_samples(np.column_stack([x, y]))
    assert abs(alpha_correlation(g)) < 0.1


def test_estimate_identical_pair_is_fully_dependent():
    rng = np.random.default_rng(22)
    x = sample_sas(1.5, 100_000, rng)
    g = estimate_spectral_from_samples(np.column_stack([x, x]))
    assert alpha_correlation(g) == pytest.approx(1.0, abs=0.05)


def test_estimate_subgaussian_recovers_r():
    alpha, r = 1.5, 0.7
    rng = np.random.default_rng(23)
    a = _one_sided_stable(alpha / 2.0, 100_000, rng)
    gauss = rng.multivariate_normal([0, 0], [[1, r], [r, 1]], size=100_000)
    samples = np.sqrt(a)[:, None] * gauss
    g = estimate_spectral_from_samples(samples)
    assert alpha_correlation(g) == pytest.approx(r, abs=0.1)
    assert g.alpha == pytest.approx(alpha, abs=0.25)


def test_estimate_validates_window():
    rng = np.random.default_rng(1)
    xy = rng.normal(size=(50, 2))
    with pytest.raises(ValidationError):
        estimate_spectral_from_samples(xy, k=100)
    with pytest.raises(ValidationError):
        estimate_spectral_from_samples(xy, k=5)
