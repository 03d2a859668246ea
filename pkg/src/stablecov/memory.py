"""Memory diagnostics for heavy-tailed linear processes.

The scale of the partial sum ``S_n = X_1 + ... + X_n`` of a linear
process grows like ``n^{1/alpha + delta}``; the deviation ``delta``
from the iid rate is the process's memory.  This module measures it
two ways:

* exactly, through the deterministic coefficient functionals -- the
  Gaussian variance ``A_n^2 = sum_u b_u^2`` of the partial-sum
  coefficients ``b_u``, and its alpha-norm analogue for stable
  innovations -- with certified truncation tails;
* empirically, by simulating replications of the process, taking the
  across-replication median of ``|S_n|`` on a geometric grid of
  horizons, and fitting the growth exponent by least squares.

``classify_memory`` turns a fitted exponent into one of five labels
(positive, zero, negative, strongly negative, boundary), and
``classify_directional`` applies the same taxonomy per axis to a
product filter on the lattice.  Also here: the classical
summed-autocovariance label for alpha = 2, an empirical codifference
estimator for sample pairs, and the quadratic covariation functional
of a two-dimensional Levy measure in either atomic or polar form.
"""

import math
from collections import namedtuple

import numpy as np
from scipy.signal import fftconvolve

from ._series import _EXACT, _LIB_EPS, Tail, em_tail, ratio_power_k2
from .exceptions import (
    NumericalError,
    ToleranceError,
    UnstableLogError,
    ValidationError,
)
from .linear_process import (
    C0_ZERO_SUM,
    SIGN_ALTERNATING,
    Filter1D,
    _check_lag,
    _check_tol,
)
from .linear_field import Filter2D
from .spectral import SpectralMeasure, alpha_covariance

__all__ = [
    "InnovationLaw",
    "MemoryReport",
    "GrowthFit",
    "ClassicReport",
    "CodiffEstimate",
    "LevyPolarMeasure",
    "exact_variance_A2",
    "exact_norm_A_alpha",
    "field_scale_Z",
    "sample_sas",
    "simulate_process",
    "estimate_growth_exponent",
    "loglog_slope",
    "classify_memory",
    "classify_directional",
    "classic_memory_class",
    "empirical_codifference",
    "q_covariance",
    "discretize_polar",
]

_HEAD_CAP = 1 << 23

MemoryReport = namedtuple(
    "MemoryReport",
    ["memory_class", "delta_hat", "exponent_hat", "stderr", "n_grid",
     "replications", "note"],
)

GrowthFit = namedtuple("GrowthFit", ["slope", "stderr", "scales", "values",
                                     "bounds"])

ClassicReport = namedtuple("ClassicReport", ["label", "ratio", "note"])

CodiffEstimate = namedtuple("CodiffEstimate", ["value", "stderr", "size"])


# ----------------------------------------------------------------------
# exact partial-sum scales
# ----------------------------------------------------------------------


def _window_tail(f, n, p, head, tol):
    """Certified ``sum_{k >= head} |P(k)|^p`` for the windowed sums
    ``P(k) = c_{k+1} + ... + c_{k+n}``."""
    if f.family == "explicit":
        return _EXACT  # head is past the filter's support
    if f.family == "geometric":
        q = 1.0 / f.base
        g = q * (1.0 - q**n) / (1.0 - q)
        r = q**p
        value = g**p * r**head / (1.0 - r)
        return Tail(value, _LIB_EPS * value)
    beta = f.beta
    j = np.arange(1.0, n + 1.0)
    if f.sign == SIGN_ALTERNATING:
        # |P(k)| is an alternating sum that pairs into positive
        # differences; the paired form sharpens the derivative ratios
        # by one power
        sgn = np.where(j % 2.0 == 1.0, 1.0, -1.0)
        c1, c2 = beta + 1.0, (beta + 1.0) * (beta + 2.0)
    else:
        sgn = np.ones(n)
        c1, c2 = beta, beta * (beta + 1.0)

    def t(x):
        return float(np.dot(sgn, (x + j) ** -beta)) ** p

    return em_tail(t, head - 1, ratio_power_k2(p, c1, c2), epsabs=tol / 8.0)


def _partial_sum_stat(f, n, p, tol):
    """``sum_{k>=0} |P(k)|^p + sum_{v=0}^{n-1} |C(v)|^p`` with a
    certified bound, where ``C(v)`` are the coefficient prefix sums."""
    if not isinstance(f, Filter1D):
        raise ValidationError("expected a one-dimensional filter")
    n = _check_lag(n, minimum=1)
    _check_tol(tol)
    if f.family == "explicit":
        head = max(len(f.coeffs) + 1, 1024)
    elif f.family == "geometric":
        head = max(n + 1, 1024)
    else:
        head = max(4 * n, 1 << 16)
    while True:
        tail = _window_tail(f, n, p, head, tol)
        if f.family != "hyperbolic" or tail.bound <= 0.5 * tol:
            break
        if 2 * head > _HEAD_CAP:
            raise ToleranceError(
                "tail certificate %.3g still exceeds tol=%.3g at the "
                "truncation cap; loosen tol" % (tail.bound, tol)
            )
        head *= 2
    coeffs = f.coefficients(head + n)
    prefix = np.cumsum(coeffs)
    windows = prefix[n:] - prefix[:head]
    if p == 2.0:
        h1 = float(np.dot(windows, windows))
        h2 = float(np.dot(prefix[:n], prefix[:n]))
    else:
        h1 = float(np.sum(np.abs(windows) ** p))
        h2 = float(np.sum(np.abs(prefix[:n]) ** p))
    value = h1 + h2 + tail.value
    bound = tail.bound + _LIB_EPS * (h1 + h2 + abs(tail.value))
    return value, bound


def exact_variance_A2(f, n, tol=1e-8, full_output=False):
    """Variance of ``S_n`` under unit-variance independent innovations.

    ``A_n^2 = sum_{k>=0} (c_{k+1}+...+c_{k+n})^2
              + sum_{v=0}^{n-1} (c_0+...+c_v)^2``,

    evaluated through coefficient prefix sums with the outer tail
    certified below ``tol``.

    Parameters
    ----------
    f : Filter1D
    n : int >= 1
    tol : float
        Absolute certificate target for the truncated tail.
    full_output : bool
        Also return the certified bound.
    """
    value, bound = _partial_sum_stat(f, n, 2.0, tol)
    return (value, bound) if full_output else value


def exact_norm_A_alpha(f, n, alpha, tol=1e-8, full_output=False):
    """Alpha-norm analogue ``sum |.|^alpha`` of `exact_variance_A2`;
    the two agree at ``alpha = 2``.  ``A_n = (value)^{1/alpha}`` is the
    scale of ``S_n`` under standard SaS innovations."""
    alpha = float(alpha)
    if not 0.0 < alpha <= 2.0:
        raise ValidationError("alpha must lie in (0, 2]")
    value, bound = _partial_sum_stat(f, n, alpha, tol)
    return (value, bound) if full_output else value


def _variance_direct_2d(matrix, n, m):
    """Brute variance of the rectangular partial sum of a field with an
    explicit coefficient matrix, via two-dimensional prefix sums."""
    rows, cols = matrix.shape
    padded = np.zeros((rows + 1, cols + 1))
    padded[1:, 1:] = np.cumsum(np.cumsum(matrix, axis=0), axis=1)

    def at(p, q):
        # prefix sum over i <= p, j <= q with clamped indices
        p = np.clip(p, -1, rows - 1) + 1
        q = np.clip(q, -1, cols - 1) + 1
        return padded[np.ix_(p, q)]

    u = np.arange(2 - rows, n + 1)
    v = np.arange(2 - cols, m + 1)
    b = (at(n - u, m - v) - at(-u, m - v) - at(n - u, -v) + at(-u, -v))
    return float(np.sum(b * b))


def field_scale_Z(f, n, m, tol=1e-8, full_output=False):
    """Variance of the rectangular partial sum ``S_{n,m}`` of a lattice
    field with alpha = 2 innovations.

    Product filters factorize exactly into the two marginal variances;
    an explicit coefficient matrix is handled by direct double
    summation (meant for small grids -- the certificate is then just
    accumulated rounding).
    """
    if not isinstance(f, Filter2D):
        raise ValidationError("expected a two-dimensional filter")
    if f.alpha != 2.0:
        raise ValidationError(
            "the field variance scale is a second-moment object; it "
            "needs alpha = 2"
        )
    n = _check_lag(n, minimum=1)
    m = _check_lag(m, minimum=1)
    _check_tol(tol)
    if f.family == "product":
        rough_b = exact_variance_A2(f.f_b, m, tol=1.0)
        v_a, b_a = exact_variance_A2(
            f.f_a, n, tol=tol / (4.0 * (abs(rough_b) + 1.0)),
            full_output=True)
        v_b, b_b = exact_variance_A2(
            f.f_b, m, tol=tol / (4.0 * (abs(v_a) + 1.0)), full_output=True)
        value = v_a * v_b
        bound = b_a * abs(v_b) + b_b * abs(v_a) + b_a * b_b
        return (value, bound) if full_output else value
    rows, cols = f.matrix.shape
    cells = (n + rows) * (m + cols)
    if cells > (1 << 24):
        raise ValidationError(
            "direct field variance needs (n + rows) * (m + cols) <= 2^24; "
            "use a product filter for large horizons"
        )
    value = _variance_direct_2d(f.matrix, n, m)
    bound = _LIB_EPS * cells * max(1.0, value)
    return (value, bound) if full_output else value


# ----------------------------------------------------------------------
# innovation sampling and process simulation
# ----------------------------------------------------------------------


def sample_sas(alpha, size=None, rng=None):
    """Draw standard symmetric alpha-stable variates.

    Uses the trigonometric transform of a uniform angle and an
    exponential: ``sin(alpha U)/cos(U)^{1/alpha} *
    (cos((1-alpha)U)/W)^{(1-alpha)/alpha}``.  The scale convention is
    characteristic function ``exp(-|t|^alpha)``; alpha = 2 therefore
    gives variance 2, not 1.

    ``rng`` may be a seed or a ``numpy.random.Generator``.
    """
    alpha = float(alpha)
    if not 0.0 < alpha <= 2.0:
        raise ValidationError("alpha must lie in (0, 2]")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    u = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size)
    if alpha == 1.0:
        return np.tan(u)
    w = rng.exponential(1.0, size)
    if alpha == 2.0:
        return 2.0 * np.sin(u) * np.sqrt(w)
    out = np.sin(alpha * u) / np.cos(u) ** (1.0 / alpha)
    out *= (np.cos((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha)
    return out


class InnovationLaw:
    """Symmetric innovation distribution for process simulation.

    Kinds: ``sas`` (standard SaS, ch.f. ``exp(-|t|^alpha)``),
    ``gaussian`` (mean zero, given variance), and ``symmetric_pareto``
    (``+-scale * U^{-1/alpha}``, exact power tail).
    """

    def __init__(self, kind, alpha=None, variance=None, scale=1.0):
        if kind not in ("sas", "gaussian", "symmetric_pareto"):
            raise ValidationError("unknown innovation kind %r" % (kind,))
        self.kind = kind
        if kind == "sas":
            alpha = float(alpha)
            if not 0.0 < alpha <= 2.0:
                raise ValidationError("alpha must lie in (0, 2]")
            self.alpha = alpha
        elif kind == "gaussian":
            variance = 1.0 if variance is None else float(variance)
            if not variance > 0.0:
                raise ValidationError("variance must be positive")
            self.variance = variance
            self.alpha = 2.0
        else:
            alpha = float(alpha)
            if not alpha > 0.0:
                raise ValidationError("tail index must be positive")
            scale = float(scale)
            if not scale > 0.0:
                raise ValidationError("scale must be positive")
            self.alpha = alpha
            self.scale = scale

    @classmethod
    def sas(cls, alpha):
        return cls("sas", alpha=alpha)

    @classmethod
    def gaussian(cls, variance=1.0):
        return cls("gaussian", variance=variance)

    @classmethod
    def symmetric_pareto(cls, alpha, scale=1.0):
        return cls("symmetric_pareto", alpha=alpha, scale=scale)

    def sample(self, size=None, rng=None):
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        if self.kind == "sas":
            return sample_sas(self.alpha, size, rng)
        if self.kind == "gaussian":
            return rng.normal(0.0, math.sqrt(self.variance), size)
        signs = 2.0 * rng.integers(0, 2, size) - 1.0
        return signs * self.scale * (1.0 - rng.random(size)) ** (-1.0 / self.alpha)


def _advisory_truncation(f):
    """Truncation lag aiming for a discarded alpha mass below 1e-6.

    Advisory only: slowly decaying filters would need astronomically
    many coefficients, so the lag is capped at 2^20 and the achieved
    mass is whatever the cap allows.
    """
    target = 1e-6
    if f.family == "explicit":
        return len(f.coeffs) - 1
    if f.family == "geometric":
        q = f.base**-f.alpha
        lag = math.log(target * (1.0 - q)) / math.log(q)
        return max(int(math.ceil(lag)), 8)
    s = f.beta * f.alpha
    lag = (target * (s - 1.0)) ** (1.0 / (1.0 - s))
    return int(min(max(lag, 1024), 1 << 20))


def simulate_process(f, law, n, j_trunc=None, rng=None):
    """Simulate ``X_1 .. X_n`` of the linear process with filter ``f``.

    The filter is truncated at ``j_trunc`` (default: the advisory lag
    from the 1e-6 alpha-mass rule, capped at 2^20) and the convolution
    runs over ``n + j_trunc`` innovations.
    """
    if not isinstance(f, Filter1D):
        raise ValidationError("expected a one-dimensional filter")
    n = _check_lag(n, minimum=1)
    j = _advisory_truncation(f) if j_trunc is None else int(j_trunc)
    if j < 0:
        raise ValidationError("truncation lag must be nonnegative")
    coeffs = f.coefficients(j + 1)
    eps = law.sample(n + j, rng)
    if j == 0:
        return coeffs[0] * eps
    return fftconvolve(eps, coeffs)[j:j + n]


def loglog_slope(x, y):
    """Least-squares slope and its standard error for ``y`` against
    ``x`` (both already on log scales)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    dof = len(x) - 2
    s2 = float(np.dot(resid, resid)) / max(dof, 1)
    stderr = math.sqrt(s2 / float(np.sum((x - x.mean()) ** 2)))
    return float(slope), stderr


def estimate_growth_exponent(f, law, scales, replications=400, seed=0,
                             j_trunc=None, tol=1e-6):
    """Fit the growth exponent of the partial-sum scale on a grid.

    For alpha = 2 innovations the scale is the exact ``sqrt(A_n^2)``
    and no sampling happens.  Otherwise ``replications`` paths are
    simulated (one long path each, seeded ``seed + r``) and the scale
    statistic is the across-replication median of ``|S_n|``.  Returns a
    `GrowthFit` with the log-log least-squares slope and its standard
    error.
    """
    scales = [int(s) for s in scales]
    if any(s <= 0 for s in scales):
        raise ValidationError("scales must be positive")
    if sorted(set(scales)) != scales:
        raise ValidationError("scales must be strictly increasing")
    if len(scales) < 6:
        raise ValidationError("need at least 6 grid points for the fit")
    exact = law.kind == "gaussian" or (law.kind == "sas" and law.alpha == 2.0)
    if exact:
        values, bounds = [], []
        for s in scales:
            v, b = exact_variance_A2(f, s, tol=tol, full_output=True)
            values.append(math.sqrt(v))
            bounds.append(0.5 * b / math.sqrt(v) if v > 0 else b)
        reps = 0
    else:
        idx = np.asarray(scales) - 1
        stats = np.empty((replications, len(scales)))
        for r in range(replications):
            path = simulate_process(f, law, scales[-1], j_trunc,
                                    np.random.default_rng(seed + r))
            stats[r] = np.abs(np.cumsum(path)[idx])
        values = np.median(stats, axis=0).tolist()
        bounds = [0.0] * len(scales)
        reps = replications
    if min(values) <= 0.0:
        raise NumericalError("degenerate scale statistic (zero median)")
    slope, stderr = loglog_slope(np.log(np.asarray(scales, float)),
                                 np.log(np.asarray(values)))
    return GrowthFit(slope, stderr, tuple(scales), tuple(values),
                     tuple(bounds))


# ----------------------------------------------------------------------
# classification
# ----------------------------------------------------------------------


def classify_memory(slope, stderr, alpha, band=0.05, n_grid=(),
                    replications=0):
    """Label a fitted growth exponent.

    ``delta = slope - 1/alpha`` is compared against the half-width
    ``band`` (widened by twice the fit standard error, so noisy
    estimates fall back to the conservative label): Zero within the
    band, Positive above it (only meaningful for alpha > 1, and capped
    at the stationarity edge ``1 - 1/alpha``), Negative below it,
    StronglyNegative when the scale does not grow at all
    (``slope <= band``), Boundary otherwise.
    """
    alpha = float(alpha)
    if not 0.0 < alpha <= 2.0:
        raise ValidationError("alpha must lie in (0, 2]")
    slope = float(slope)
    stderr = float(stderr)
    band = float(band) + 2.0 * stderr
    delta = slope - 1.0 / alpha
    note = ""
    if slope <= band:
        label = "StronglyNegative"
    elif abs(delta) <= band:
        label = "Zero"
    elif delta > band:
        if alpha <= 1.0:
            label = "Boundary"
            note = ("positive memory is defined only for alpha > 1; the "
                    "iid rate 1/alpha is already the maximal growth")
        elif delta < 1.0 - 1.0 / alpha + band:
            label = "Positive"
        else:
            label = "Boundary"
            note = "exponent at or beyond the stationarity edge"
    else:
        label = "Negative"
    return MemoryReport(label, delta, slope, float(stderr), tuple(n_grid),
                        int(replications), note)


def classify_directional(f, grids=None, band=0.05, tol=1e-5,
                         full_output=False):
    """Per-axis memory labels for a product filter on the lattice.

    The rectangular partial-sum scale of a product filter factorizes,
    so each axis is profiled by its marginal scale along ``grids``
    (default 2^6 .. 2^13) while the other axis sits at the largest grid
    value and contributes a constant factor.  Returns one
    `MemoryReport` per axis; with ``full_output`` also the per-axis
    scale profiles as ``(grid value, scale, certified bound)`` rows.
    """
    if not isinstance(f, Filter2D) or f.family != "product":
        raise ValidationError(
            "per-axis classification needs a product filter"
        )
    alpha = f.alpha
    if grids is None:
        grids = tuple(2**k for k in range(6, 14))
    grids = [int(g) for g in grids]
    if len(grids) < 6 or any(g <= 0 for g in grids):
        raise ValidationError("need at least 6 positive grid points")
    reports = []
    profiles = []
    for axis, other in ((f.f_a, f.f_b), (f.f_b, f.f_a)):
        fixed = exact_norm_A_alpha(other, grids[-1], alpha, tol=tol)
        values, bounds = [], []
        for g in grids:
            v, b = exact_norm_A_alpha(axis, g, alpha, tol=tol,
                                      full_output=True)
            scale = (v * fixed) ** (1.0 / alpha)
            values.append(scale)
            # d(x^{1/a})/dx propagated through the product
            bounds.append(scale * b / (alpha * v) if v > 0.0 else b)
        slope, stderr = loglog_slope(np.log(np.asarray(grids, float)),
                                     np.log(np.asarray(values)))
        reports.append(classify_memory(slope, stderr, alpha, band,
                                       n_grid=grids))
        profiles.append(list(zip(grids, values, bounds)))
    if full_output:
        return tuple(reports), profiles
    return tuple(reports)


def _coefficient_sum(f):
    """Family-exact ``sum_j c_j`` (may be infinite)."""
    if f.family == "explicit":
        return math.fsum(f.coeffs)
    if f.family == "geometric":
        return 1.0 / (1.0 - 1.0 / f.base)
    if f.c0_mode == C0_ZERO_SUM:
        return 0.0
    import mpmath

    if f.sign == SIGN_ALTERNATING:
        return f.c0 - float(mpmath.altzeta(f.beta))
    if f.beta <= 1.0:
        return math.inf
    return f.c0 + float(mpmath.zeta(f.beta))


def classic_memory_class(f):
    """Second-order memory label from summed autocovariances.

    Computes ``gamma_k = sum_j c_j c_{j+k}`` over a long truncation and
    compares the growth of ``T(K) = sum_{k<=K} |gamma_k|`` against
    ``T(2K)``: a ratio above ``1 + 1/ln K`` flags a divergent
    autocovariance series (Long).  A convergent series splits on the
    coefficient sum: exactly zero means Negative, otherwise Short.  The
    note flags ratios in the grey zone around the threshold.
    """
    if not isinstance(f, Filter1D):
        raise ValidationError("expected a one-dimensional filter")
    length = 1 << 16
    c = f.coefficients(length)
    gamma = fftconvolve(c, c[::-1])[length - 1:]
    k = 4096
    t1 = float(np.sum(np.abs(gamma[:k + 1])))
    t2 = float(np.sum(np.abs(gamma[:2 * k + 1])))
    ratio = t2 / t1
    threshold = 1.0 + 1.0 / math.log(k)
    grey = abs(ratio - threshold) <= 0.5 / math.log(k)
    note = "growth ratio near the summability threshold" if grey else ""
    if ratio > threshold:
        return ClassicReport("Long", ratio, note)
    total = _coefficient_sum(f)
    if not math.isfinite(total):
        return ClassicReport("Long", ratio,
                             note or "divergent coefficient sum")
    scale = float(np.sum(np.abs(c)))
    if abs(total) <= 1e-9 * (1.0 + scale):
        return ClassicReport("Negative", ratio, note)
    return ClassicReport("Short", ratio, note)


# ----------------------------------------------------------------------
# empirical codifference
# ----------------------------------------------------------------------


def empirical_codifference(samples):
    """Codifference estimate from a sample pair.

    ``samples`` is a pair of equal-length arrays (at least 1000
    points).  The estimator is ``ln f(1,-1) - ln f(1,0) - ln f(0,-1)``
    with ``f`` the real part of the empirical characteristic function;
    the standard error propagates the three sample variances through
    the logarithms.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or 2 not in arr.shape:
        raise ValidationError("samples must be a pair of 1-d arrays")
    if arr.shape[0] != 2:
        arr = arr.T
    size = arr.shape[1]
    if size < 1000:
        raise ValidationError("need at least 1000 sample pairs")
    x, y = arr
    terms = []
    var_sum = 0.0
    for u, v in ((1.0, -1.0), (1.0, 0.0), (0.0, -1.0)):
        cos = np.cos(u * x + v * y)
        mean = float(cos.mean())
        if mean <= 0.0:
            raise UnstableLogError(
                "empirical characteristic function is not positive; "
                "the log-based estimator is unstable at this sample size"
            )
        terms.append(math.log(mean))
        var_sum += float(cos.var(ddof=1)) / size / mean**2
    return CodiffEstimate(terms[0] - terms[1] - terms[2],
                          math.sqrt(var_sum), size)


# ----------------------------------------------------------------------
# quadratic covariation of Levy measures
# ----------------------------------------------------------------------


class LevyPolarMeasure:
    """Levy measure of a two-dimensional stable or compound-Poisson
    vector, either as a finite atom cloud or in polar form
    ``r^{-1-alpha} dr x Gamma(ds)`` with a spectral measure on the
    circle."""

    def __init__(self, kind, points=None, masses=None, alpha=None,
                 spectral=None):
        if kind not in ("atoms", "polar"):
            raise ValidationError("kind must be 'atoms' or 'polar'")
        self.kind = kind
        if kind == "atoms":
            points = np.asarray(points, dtype=float)
            masses = np.asarray(masses, dtype=float).ravel()
            if points.ndim != 2 or points.shape[1] != 2:
                raise ValidationError("points must be an (N, 2) array")
            if len(points) != len(masses):
                raise ValidationError("points and masses disagree in length")
            if not (np.all(np.isfinite(points))
                    and np.all(np.isfinite(masses))):
                raise ValidationError("points and masses must be finite")
            if np.any(masses < 0.0):
                raise ValidationError("masses must be nonnegative")
            self.points = points
            self.masses = masses
        else:
            alpha = float(alpha)
            if not 0.0 < alpha < 2.0:
                raise ValidationError(
                    "polar form needs alpha strictly inside (0, 2)"
                )
            if not isinstance(spectral, SpectralMeasure):
                raise ValidationError("spectral must be a SpectralMeasure")
            if spectral.alpha != alpha:
                raise ValidationError(
                    "spectral measure carries alpha=%g, not %g"
                    % (spectral.alpha, alpha)
                )
            self.alpha = alpha
            self.spectral = spectral

    @classmethod
    def from_atoms(cls, points, masses):
        return cls("atoms", points=points, masses=masses)

    @classmethod
    def polar(cls, alpha, spectral):
        return cls("polar", alpha=alpha, spectral=spectral)


def q_covariance(measure):
    """Quadratic covariation functional ``int x1 x2 / max(1, |x|^2)``.

    Atomic measures are summed exactly; the polar form has the closed
    value ``rho(Gamma) * (1/(2-alpha) + 1/alpha)`` from integrating the
    radial part on either side of the unit circle.
    """
    if not isinstance(measure, LevyPolarMeasure):
        raise ValidationError("expected a LevyPolarMeasure")
    if measure.kind == "atoms":
        x1 = measure.points[:, 0]
        x2 = measure.points[:, 1]
        weight = x1 * x2 / np.maximum(1.0, x1 * x1 + x2 * x2)
        return float(np.sum(weight * measure.masses))
    rho = alpha_covariance(measure.spectral)
    a = measure.alpha
    return rho * (1.0 / (2.0 - a) + 1.0 / a)


def discretize_polar(measure, n_atoms=10000, r_min=None, r_max=None):
    """Atomize a polar measure on geometric radial bands.

    Each band carries its exact mass ``(r_lo^{-a} - r_hi^{-a}) / a``
    and a representative radius chosen to preserve the band's
    contribution to the quadratic covariation (the mean of ``r^2``
    under the band below radius 1, the geometric mean above it, where
    the functional no longer depends on the radius).  The only
    discretization error in `q_covariance` is therefore the trimmed
    radial range.
    """
    if measure.kind != "polar":
        raise ValidationError("only polar measures can be discretized")
    a = measure.alpha
    if r_max is None:
        r_max = (1e-5 * a) ** (-1.0 / a)
    if r_min is None:
        r_min = (1e-5 * (2.0 - a)) ** (1.0 / (2.0 - a))
    if not 0.0 < r_min < 1.0 < r_max:
        raise ValidationError("radial range must straddle 1")
    directions = measure.spectral.points
    weights = measure.spectral.weights
    bands = max(n_atoms // max(len(directions), 1), 2)
    edges = np.geomspace(r_min, r_max, bands + 1)
    edges = np.unique(np.concatenate([edges, [1.0]]))
    lo, hi = edges[:-1], edges[1:]
    mass_r = (lo**-a - hi**-a) / a
    r2_mean = (hi ** (2.0 - a) - lo ** (2.0 - a)) / (2.0 - a) / mass_r
    rep = np.where(hi <= 1.0, np.sqrt(r2_mean), np.sqrt(lo * hi))
    points = (rep[:, None, None] * directions[None, :, :]).reshape(-1, 2)
    masses = (mass_r[:, None] * weights[None, :]).ravel()
    return LevyPolarMeasure.from_atoms(points, masses)
