import math

import pytest

from stablecov import (
    COUNTING,
    DegenerateError,
    Explicit,
    KernelPair,
    OUParams,
    ToleranceError,
    UnsupportedOrderError,
    ValidationError,
    alpha_corr_integral,
    alpha_cov_integral,
    codifference_integral,
    codifference_n,
    covariation_integral,
    covariation_n,
    moving_average_pair,
    ou_codifference,
    ou_codifference_normalized,
    ou_codifference_normalized_asymptote,
    ou_kernels,
    ou_rho,
    ou_rho_asymptote,
    ou_rho_normalized,
    rho_n,
)


def test_ou_quadrature_reproduces_closed_forms():
    for lam in (0.5, 2.0):
        for alpha in (0.6, 1.0, 1.5, 2.0):
            p = OUParams(lam, alpha)
            for t in (0.0, 0.3, 2.0):
                k = ou_kernels(t, p)
                assert alpha_cov_integral(k) == pytest.approx(
                    ou_rho(t, p), abs=1e-8)
                assert codifference_integral(k) == pytest.approx(
                    ou_codifference(t, p), abs=1e-8)
                if alpha > 1.0:
                    # exclusive-region split done by hand:
                    # int_{-inf}^0 e^{lam s} e^{lam(a-1)(s-t)} ds
                    want = math.exp(-lam * (alpha - 1.0) * t) / (alpha * lam)
                    assert covariation_integral(k) == pytest.approx(
                        want, abs=1e-8)


def test_window_average_closed_forms():
    # unit moving-average window: overlap of length 1 - t
    f = lambda u: 1.0
    for alpha in (0.7, 1.3, 2.0):
        for t in (0.0, 0.25, 0.8):
            k = moving_average_pair(f, t, alpha, support=(0.0, 1.0))
            ov = 1.0 - t
            assert alpha_cov_integral(k) == pytest.approx(
                2.0 ** ((alpha - 2.0) / 2.0) * ov, abs=1e-9)
            assert codifference_integral(k) == pytest.approx(
                2.0 * ov, abs=1e-9)
            want = 2.0 ** ((alpha - 2.0) / 2.0) * ov
            want /= 2.0 ** ((alpha - 2.0) / 2.0) * ov + t
            assert alpha_corr_integral(k) == pytest.approx(want, abs=1e-9)
        k = moving_average_pair(f, 1.5, alpha, support=(0.0, 1.0))
        assert alpha_cov_integral(k) == pytest.approx(0.0, abs=1e-10)


def test_counting_control_matches_filter_route():
    coeffs = [1.0, 0.5, -0.25]
    c = lambda j: coeffs[int(j)] if 0 <= int(j) < len(coeffs) else 0.0
    for alpha in (0.8, 1.5, 2.0):
        filt = Explicit(coeffs, alpha)
        for n in (0, 1, 2):
            k = KernelPair(c, lambda s: c(s + n), alpha,
                           domain=(-5, 5), control=COUNTING)
            assert alpha_cov_integral(k) == pytest.approx(
                rho_n(filt, n), abs=1e-13)
            assert codifference_integral(k) == pytest.approx(
                codifference_n(filt, n), abs=1e-13)
            if alpha > 1.0:
                # covariation is asymmetric: the lagged series sits in
                # the linear slot
                k_rev = KernelPair(lambda s: c(s + n), c, alpha,
                                   domain=(-5, 5), control=COUNTING)
                assert covariation_integral(k_rev) == pytest.approx(
                    covariation_n(filt, n), abs=1e-13)


def test_counting_control_rejects_infinite_lattice():
    with pytest.raises(ValidationError):
        KernelPair(lambda s: 1.0, lambda s: 1.0, 1.5,
                   domain=(0, math.inf), control=COUNTING)


def test_disjoint_supports_give_zero():
    f1 = lambda s: 1.0 if 0.0 <= s <= 1.0 else 0.0
    f2 = lambda s: 1.0 if 2.0 <= s <= 3.0 else 0.0
    k = KernelPair(f1, f2, 1.5, domain=(-1.0, 4.0),
                   breakpoints=(0.0, 1.0, 2.0, 3.0))
    assert alpha_cov_integral(k) == pytest.approx(0.0, abs=1e-12)
    assert alpha_corr_integral(k) == pytest.approx(0.0, abs=1e-12)
    assert codifference_integral(k) == pytest.approx(0.0, abs=1e-10)
    assert covariation_integral(k) == pytest.approx(0.0, abs=1e-12)


def test_identical_kernels_correlate_to_one():
    p = OUParams(1.0, 1.3)
    k = ou_kernels(0.0, p)
    assert alpha_corr_integral(k) == pytest.approx(1.0, abs=1e-10)


def test_zero_kernel_is_degenerate():
    k = KernelPair(lambda s: math.exp(-abs(s)), lambda s: 0.0, 1.5,
                   domain=(-5.0, 5.0))
    with pytest.raises(DegenerateError):
        alpha_corr_integral(k)


def test_ou_values_at_zero_lag():
    for lam in (0.5, 1.0, 3.0):
        for alpha in (0.5, 1.0, 1.7, 2.0):
            p = OUParams(lam, alpha)
            want = 2.0 ** ((alpha - 2.0) / 2.0) / (alpha * lam)
            assert ou_rho(0.0, p) == pytest.approx(want, rel=1e-14)
            assert ou_rho_normalized(0.0, p) == 1.0
            assert ou_codifference_normalized(0.0, p) == pytest.approx(
                2.0, rel=1e-14)


def test_ou_gaussian_reductions():
    p = OUParams(0.7, 2.0)
    for t in (0.0, 0.4, 1.0, 5.0):
        assert ou_rho_normalized(t, p) == pytest.approx(
            math.exp(-p.lam * t), rel=1e-14)
        assert ou_codifference(t, p) == pytest.approx(
            2.0 * ou_rho(t, p), rel=1e-13)


def test_ou_lag_is_folded():
    p = OUParams(1.2, 1.4)
    for t in (0.3, 1.7):
        assert ou_rho(-t, p) == ou_rho(t, p)
        assert ou_codifference(-t, p) == ou_codifference(t, p)


def test_rho_asymptote_reached():
    for lam in (0.5, 2.0):
        for alpha in (0.5, 1.0, 1.5, 2.0):
            p = OUParams(lam, alpha)
            t = 20.0 / lam
            lifted = ou_rho_normalized(t, p) * math.exp(lam * t)
            assert lifted == pytest.approx(ou_rho_asymptote(p), abs=1e-8)


def test_codifference_asymptote_rate_and_constant():
    # the decay of the normalized codifference changes character at
    # alpha = 1 -- both sides are checked against the pair it reports
    for lam in (0.5, 2.0):
        for alpha in (0.5, 1.0, 1.5):
            p = OUParams(lam, alpha)
            rate, const = ou_codifference_normalized_asymptote(p)
            t = 20.0 / lam
            lifted = ou_codifference_normalized(t, p) * math.exp(rate * t)
            assert lifted == pytest.approx(const, rel=1e-4)


def test_codifference_asymptote_jumps_at_one():
    p = OUParams(1.0, 1.0)
    assert ou_codifference_normalized_asymptote(p) == (1.0, 2.0)
    below = ou_codifference_normalized_asymptote(OUParams(1.0, 0.999))
    above = ou_codifference_normalized_asymptote(OUParams(1.0, 1.001))
    assert below.rate == pytest.approx(0.999)
    assert below.constant == 1.0
    assert above.rate == 1.0
    assert above.constant == pytest.approx(1.001)
    # the alpha-covariance shows no such jump
    assert ou_rho_asymptote(OUParams(1.0, 0.999)) == pytest.approx(
        ou_rho_asymptote(OUParams(1.0, 1.001)), abs=1e-3)


def test_faster_reversion_decorrelates():
    for alpha in (0.6, 1.5):
        vals = [ou_rho_normalized(1.0, OUParams(lam, alpha))
                for lam in (0.25, 0.5, 1.0, 2.0, 4.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_covariation_needs_alpha_above_one():
    k = ou_kernels(1.0, OUParams(1.0, 0.9))
    with pytest.raises(UnsupportedOrderError):
        covariation_integral(k)


def test_quadrature_error_certificate():
    k = ou_kernels(0.7, OUParams(1.3, 1.5))
    loose, e_loose = alpha_cov_integral(k, tol=1e-6, full_output=True)
    tight, e_tight = alpha_cov_integral(k, tol=1e-10, full_output=True)
    assert e_loose <= 1e-6
    assert abs(loose - tight) <= e_loose + e_tight


def test_kernel_pair_validation():
    with pytest.raises(ValidationError):
        KernelPair(lambda s: 1.0, lambda s: 1.0, 2.5)
    with pytest.raises(ValidationError):
        KernelPair(lambda s: 1.0, lambda s: 1.0, 1.5, control="riemann")
    with pytest.raises(ValidationError):
        KernelPair(lambda s: 1.0, lambda s: 1.0, 1.5, domain=(2.0, 2.0))
    with pytest.raises(ValidationError):
        OUParams(-1.0, 1.5)
    with pytest.raises(ValidationError):
        moving_average_pair(lambda u: 1.0, 1.0, 1.5, support=(3.0, 3.0))


def test_hard_oscillation_raises_tolerance_error():
    wild = lambda s: math.sin(1e7 * s) / (1e-9 + abs(s)) ** 0.999
    k = KernelPair(wild, wild, 0.4, domain=(-1.0, 1.0))
    with pytest.raises(ToleranceError):
        alpha_cov_integral(k, tol=1e-13)
