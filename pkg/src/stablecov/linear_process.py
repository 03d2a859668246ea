"""Dependence measures of symmetric alpha-stable linear processes.

A one-sided linear process ``X_t = sum_{j>=0} c_j e_{t-j}`` driven by
standard SaS innovations has, at every lag ``n``, an explicit pair
spectral measure: innovations shared by ``X_0`` and ``X_n`` contribute
atoms along ``(c_j, c_{j+n})``, and the ``n`` innovations seen only by
the later coordinate contribute axis atoms.  The dependence measures are
series in the coefficients:

    rho_n    = sum_j c_j c_{j+n} (c_j^2 + c_{j+n}^2)^{(a-2)/2}
    tau_n    = sum_j |c_j|^a + |c_{j+n}|^a - |c_j - c_{j+n}|^a
    covar_n  = sum_j c_{j+n} c_j^{<a-1>}                     (a > 1)

with ``rho~_n`` the normalized variant of ``rho_n``.  Three coefficient
families are supported:

* ``Explicit`` -- finite lists; every series is a finite sum (exact).
* ``Geometric`` -- ``c_j = base^{-j}``; every series collapses to a
  geometric closed form (exact up to roundoff).
* ``Hyperbolic`` -- ``c_j = j^{-beta}`` for ``j >= 1`` with a free
  ``c_0``, optionally alternating in sign; series are evaluated as an
  exact head plus a certified midpoint-rule tail (see ``_series``).

Every evaluator accepts ``full_output=True`` to also return the
certified absolute truncation bound of the reported value.
"""

import math
import operator
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.special import zeta as _zeta

from ._series import (
    _LIB_EPS,
    Tail,
    em_tail,
    fsum,
    hurwitz_tail,
    power_kernel_k2,
    ratio_power_k2,
)
from .exceptions import (
    CertificateError,
    DegenerateError,
    ToleranceError,
    UnsupportedOrderError,
    ValidationError,
)
from .spectral import SpectralMeasure

__all__ = [
    "Filter1D",
    "Explicit",
    "Geometric",
    "Hyperbolic",
    "DecayLaw",
    "pair_spectral_measure",
    "rho_n",
    "rho_tilde_n",
    "codifference_n",
    "covariation_n",
    "predicted_decay",
    "dependence_batch",
    "alpha_coefficient_sum",
]

DEFAULT_TOL = 1e-10

#: head size before any tail is certified; doubles adaptively
_J0 = 4096
_JMAX = 1 << 22


DecayLaw = namedtuple("DecayLaw", ["exponent", "log_factor", "kind"])
DecayLaw.__doc__ = """Asymptotic lag decay of |rho_n|.

kind "power":       |rho_n| ~ C n^exponent, times ln(n) if log_factor.
kind "exponential": |rho_n| ~ C exp(-exponent * n) with exponent > 0.
"""


def _check_tol(tol):
    if not (isinstance(tol, (int, float)) and 0.0 < tol < math.inf):
        raise ValidationError("tol must be a positive real")
    return float(tol)


def _check_lag(n, minimum=0):
    try:
        n = operator.index(n)
    except TypeError:
        raise ValidationError("lag must be an integer") from None
    if n < minimum:
        raise ValidationError("lag must be >= %d" % minimum)
    return n


class Filter1D:
    """Coefficient sequence of a one-sided linear process, plus alpha.

    Subclasses provide ``coefficients(count)`` (the array ``c_0`` ..
    ``c_{count-1}``) and the scalar accessor ``c(j)``; ``c(j) = 0``
    beyond an Explicit filter's length.
    """

    family = None

    def __init__(self, alpha):
        alpha = float(alpha)
        if not 0.0 < alpha <= 2.0:
            raise ValidationError("alpha must lie in (0, 2]")
        self.alpha = alpha

    def coefficients(self, count):
        raise NotImplementedError

    def c(self, j):
        j = _check_lag(j)
        return float(self.coefficients(j + 1)[j])


class Explicit(Filter1D):
    """Finite coefficient list; all-zero filters are rejected only where
    a normalization would divide by zero."""

    family = "explicit"

    def __init__(self, coeffs, alpha):
        super().__init__(alpha)
        coeffs = np.asarray(coeffs, dtype=float).ravel()
        if coeffs.size == 0:
            raise ValidationError("coefficient list must be nonempty")
        if not np.all(np.isfinite(coeffs)):
            raise ValidationError("coefficients must be finite")
        self.coeffs = coeffs

    def coefficients(self, count):
        out = np.zeros(count)
        k = min(count, len(self.coeffs))
        out[:k] = self.coeffs[:k]
        return out


class Geometric(Filter1D):
    """``c_j = base^{-j}`` with ``base > 1``."""

    family = "geometric"

    def __init__(self, base, alpha):
        super().__init__(alpha)
        base = float(base)
        if not base > 1.0:
            raise ValidationError("base must exceed 1")
        self.base = base

    def coefficients(self, count):
        return self.base ** (-np.arange(count, dtype=float))


SIGN_CONSTANT = "constant"
SIGN_ALTERNATING = "alternating"
C0_VALUE = "value"
C0_ZERO_SUM = "zero_sum"


class Hyperbolic(Filter1D):
    """``c_j = s_j j^{-beta}`` for ``j >= 1`` (``s_j = 1`` or ``(-1)^j``).

    ``c_0`` is either a given value (default 1) or, in zero-sum mode,
    ``-sum_{j>=1} c_j``: the constant-sign series needs ``beta > 1``
    (classical zeta), while the alternating series converges for every
    ``beta > 0`` (Dirichlet eta).  The summability certificate
    ``beta * alpha > 1`` is enforced on construction.
    """

    family = "hyperbolic"

    def __init__(self, beta, alpha, sign=SIGN_CONSTANT, c0_mode=C0_VALUE, c0=1.0):
        super().__init__(alpha)
        beta = float(beta)
        if not (0.0 < beta < math.inf):
            raise ValidationError("beta must be a positive real")
        if sign not in (SIGN_CONSTANT, SIGN_ALTERNATING):
            raise ValidationError("sign must be 'constant' or 'alternating'")
        if c0_mode not in (C0_VALUE, C0_ZERO_SUM):
            raise ValidationError("c0_mode must be 'value' or 'zero_sum'")
        if beta * self.alpha <= 1.0:
            raise CertificateError(
                "summability requires beta * alpha > 1 (got %g * %g)"
                % (beta, self.alpha)
            )
        self.beta = beta
        self.sign = sign
        self.c0_mode = c0_mode
        if c0_mode == C0_ZERO_SUM:
            import mpmath

            if sign == SIGN_CONSTANT:
                if beta <= 1.0:
                    raise CertificateError(
                        "constant-sign zero-sum mode needs beta > 1"
                    )
                self.c0 = -float(mpmath.zeta(beta))
            else:
                # sum_{j>=1} (-1)^j j^{-beta} = -eta(beta), beta > 0
                self.c0 = float(mpmath.altzeta(beta))
        else:
            c0 = float(c0)
            if not math.isfinite(c0):
                raise ValidationError("c0 must be finite")
            self.c0 = c0

    def coefficients(self, count):
        if count <= 0:
            return np.zeros(0)
        j = np.arange(1, count, dtype=float)
        mag = j ** -self.beta
        if self.sign == SIGN_ALTERNATING:
            mag[::2] *= -1.0  # odd j first
        return np.concatenate(([self.c0], mag))


# ----------------------------------------------------------------------
# exact family-wide helpers
# ----------------------------------------------------------------------


def alpha_coefficient_sum(f):
    """``A = sum_{j>=0} |c_j|^alpha``, the filter's total alpha mass."""
    a = f.alpha
    if f.family == "explicit":
        return fsum(np.abs(f.coeffs) ** a)
    if f.family == "geometric":
        return 1.0 / (1.0 - f.base**-a)
    return abs(f.c0) ** a + float(_zeta(f.beta * a, 1.0))


def _alpha_mass_head(f, n):
    """``A_{n-1} = sum_{j=0}^{n-1} |c_j|^alpha`` (exact)."""
    if n <= 0:
        return 0.0
    if f.family == "geometric":
        q = f.base**-f.alpha
        return (1.0 - q**n) / (1.0 - q)
    if f.family == "explicit":
        k = min(n, len(f.coeffs))
        return fsum(np.abs(f.coeffs[:k]) ** f.alpha)
    head = abs(f.c0) ** f.alpha
    if n > 1:
        j = np.arange(1, n, dtype=float)
        head += fsum(j ** (-f.beta * f.alpha))
    return head


def _pair_terms(x, y, alpha, kind):
    """Per-index summands of the pair series `kind`, zero where both
    coefficients vanish."""
    if kind == "codiff":
        return np.abs(x) ** alpha + np.abs(y) ** alpha - np.abs(x - y) ** alpha
    if kind == "covar":
        return y * np.sign(x) * np.abs(x) ** (alpha - 1.0)
    norm2 = x * x + y * y
    pw = np.zeros_like(norm2)
    nz = norm2 > 0.0
    pw[nz] = norm2[nz] ** (0.5 * (alpha - 2.0))
    if kind == "rho":
        return x * y * pw
    if kind == "sq1":
        return x * x * pw
    return y * y * pw  # sq2


def _explicit_pair_sum(f, n, kind):
    """Exact finite evaluation for Explicit filters."""
    c = f.coeffs
    L = len(c)
    x = c
    y = np.zeros(L)
    if n < L:
        y[: L - n] = c[n:]
    terms = _pair_terms(x, y, f.alpha, kind)
    return Tail(fsum(terms), _LIB_EPS * fsum(np.abs(terms)))


def _geometric_pair_sum(f, n, kind):
    """Closed forms: every pair series of a geometric filter is itself a
    geometric series with ratio base^(-alpha)."""
    a, b = f.alpha, f.base
    qa = b**-a
    bn = b ** -float(n)
    scale = 1.0 / (1.0 - qa)
    half = 0.5 * (a - 2.0)
    if kind == "rho":
        v = bn * (1.0 + bn * bn) ** half * scale
    elif kind == "sq1":
        v = (1.0 + bn * bn) ** half * scale
    elif kind == "sq2":
        v = bn * bn * (1.0 + bn * bn) ** half * scale
    elif kind == "covar":
        v = bn * scale
    else:  # codiff
        v = (1.0 + bn**a - (1.0 - bn) ** a) * scale
    return Tail(v, _LIB_EPS * abs(v))


def _hyperbolic_pair_sum(f, n, kind, tol):
    """Exact head + certified midpoint-rule tail for Hyperbolic filters.

    Tail kernels are written through ``r = x / (x + n)`` in (0, 1] so
    that they stay finite for arbitrarily large arguments.
    """
    a, beta = f.alpha, f.beta
    half = 0.5 * (a - 2.0)
    alternating = f.sign == SIGN_ALTERNATING
    tail_sign = 1.0
    xmin = 0.0

    if kind == "rho":
        k2 = power_kernel_k2(beta, -beta, -beta, half)
        xmin = n * max(0.0, 1.0 - a) / a
        if alternating:
            tail_sign = (-1.0) ** n

        def t(x):
            r = x / (x + n)
            return x ** (-beta * a) * r**beta * (1.0 + r ** (2 * beta)) ** half

    elif kind == "sq1":
        k2 = power_kernel_k2(beta, -2.0 * beta, 0.0, half)

        def t(x):
            r = x / (x + n)
            return x ** (-beta * a) * (1.0 + r ** (2 * beta)) ** half

    elif kind == "sq2":
        k2 = power_kernel_k2(beta, 0.0, -2.0 * beta, half)
        xmin = n * (2.0 - a) / a

        def t(x):
            r = x / (x + n)
            return x ** (-beta * a) * r ** (2 * beta) * (1.0 + r ** (2 * beta)) ** half

    elif kind == "covar":
        k2 = power_kernel_k2(beta, -beta * (a - 1.0), -beta, 0.0)
        if alternating:
            tail_sign = (-1.0) ** n

        def t(x):
            return x ** (-beta * a) * (x / (x + n)) ** beta

    elif kind == "codiff":
        # three tail pieces; the |c_j - c_{j+n}| piece depends on the
        # sign pattern of the pair
        if alternating and n % 2 == 1:
            c1, c2 = beta, beta * (beta + 1.0)

            def diff(x):
                return x**-beta * (1.0 + (x / (x + n)) ** beta)

        else:
            c1, c2 = beta + 1.0, (beta + 1.0) * (beta + 2.0)

            def diff(x):
                return x**-beta * (1.0 - (x / (x + n)) ** beta)

        k2 = ratio_power_k2(a, c1, c2)

        def t(x):
            return diff(x) ** a

    else:  # pragma: no cover - internal misuse
        raise ValueError(kind)

    j0 = max(_J0, int(math.ceil(xmin)) + 2, n + 2)
    epsabs = min(1e-14, 0.1 * tol)
    J = j0
    while True:
        tail = em_tail(t, J, k2, epsabs=epsabs)
        tail_bound = tail.bound
        tail_value = tail_sign * tail.value
        if kind == "codiff":
            s = beta * a
            z1 = hurwitz_tail(s, J + 1)
            z2 = hurwitz_tail(s, J + 1 + n)
            tail_value = z1.value + z2.value - tail.value
            tail_bound = z1.bound + z2.bound + tail.bound
        if tail_bound <= 0.5 * tol or J * 2 > _JMAX:
            break
        J *= 2
    if tail_bound > tol:
        raise ToleranceError(
            "tail bound %.3g still exceeds tol=%.3g at head size %d"
            % (tail_bound, tol, J)
        )

    c = f.coefficients(J + n + 1)
    terms = _pair_terms(c[: J + 1], c[n : J + n + 1], a, kind)
    head = fsum(terms)
    bound = tail_bound + _LIB_EPS * fsum(np.abs(terms))
    return Tail(head + tail_value, bound)


def _pair_sum(f, n, kind, tol):
    if f.family == "explicit":
        return _explicit_pair_sum(f, n, kind)
    if f.family == "geometric":
        return _geometric_pair_sum(f, n, kind)
    return _hyperbolic_pair_sum(f, n, kind, tol)


def _norm_with_bound(f):
    v = alpha_coefficient_sum(f)
    return Tail(v, _LIB_EPS * abs(v))


# ----------------------------------------------------------------------
# public operations
# ----------------------------------------------------------------------


def rho_n(f, n, tol=DEFAULT_TOL, full_output=False):
    """Lag-``n`` alpha-covariance ``sum_j c_j c_{j+n} ||a_{n,j}||^{a-2}``.

    ``n = 0`` evaluates exactly to ``2^{(a-2)/2} sum_j |c_j|^a``.
    With ``full_output=True`` returns ``(value, bound)`` where ``bound``
    certifies the absolute truncation and roundoff error.
    """
    n = _check_lag(n)
    tol = _check_tol(tol)
    if n == 0:
        norm = _norm_with_bound(f)
        scale = 2.0 ** (0.5 * (f.alpha - 2.0))
        out = Tail(scale * norm.value, scale * norm.bound)
    else:
        out = _pair_sum(f, n, "rho", tol)
    return (out.value, out.bound) if full_output else out.value


def rho_tilde_n(f, n, tol=DEFAULT_TOL, full_output=False):
    """Lag-``n`` alpha-correlation, the normalized ``rho_n`` in [-1, 1].

    The denominator is the product of the marginal second moments of the
    pair spectral measure; ``n = 0`` returns exactly 1.
    """
    n = _check_lag(n)
    tol = _check_tol(tol)
    if f.family == "explicit" and not np.any(f.coeffs):
        raise DegenerateError("all-zero filter has no correlation")
    if n == 0:
        out = Tail(1.0, 0.0)
        return (out.value, out.bound) if full_output else out.value
    part = tol / 2.0
    num = _pair_sum(f, n, "rho", part)
    a1 = _pair_sum(f, n, "sq1", part)
    a2 = _pair_sum(f, n, "sq2", part)
    a0 = _alpha_mass_head(f, n)
    den = a1.value * (a2.value + a0)
    if den <= 0.0:
        raise DegenerateError("degenerate pair measure (zero marginal)")
    value = num.value / math.sqrt(den)
    dden = a1.bound * (a2.value + a0) + a1.value * a2.bound
    bound = num.bound / math.sqrt(den) + 0.5 * abs(num.value) * dden / den**1.5
    value = min(1.0, max(-1.0, value))
    return (value, bound) if full_output else value


def codifference_n(f, n, tol=DEFAULT_TOL, full_output=False):
    """Lag-``n`` codifference ``sum_j |c_j|^a + |c_{j+n}|^a - |c_j - c_{j+n}|^a``."""
    n = _check_lag(n)
    tol = _check_tol(tol)
    if n == 0:
        norm = _norm_with_bound(f)
        out = Tail(2.0 * norm.value, 2.0 * norm.bound)
    else:
        out = _pair_sum(f, n, "codiff", tol)
    return (out.value, out.bound) if full_output else out.value


def covariation_n(f, n, tol=DEFAULT_TOL, full_output=False):
    """Lag-``n`` covariation ``sum_j c_{j+n} c_j^{<a-1>}`` (alpha > 1 only)."""
    n = _check_lag(n)
    tol = _check_tol(tol)
    if f.alpha <= 1.0:
        raise UnsupportedOrderError("covariation is undefined for alpha <= 1")
    if n == 0:
        out = _norm_with_bound(f)
    else:
        out = _pair_sum(f, n, "covar", tol)
    return (out.value, out.bound) if full_output else out.value


def pair_spectral_measure(f, n, tol=DEFAULT_TOL):
    """Spectral measure of the lag pair ``(X_0, X_n)``.

    Atoms sit at the normalized pair directions ``(c_j, c_{j+n})`` (each
    with its mirror, half the mass each) plus ``(0, +-1)`` carrying the
    mass of the innovations exclusive to ``X_n``.  For the Hyperbolic
    family the atom list is truncated with discarded mass <= tol.
    """
    n = _check_lag(n, minimum=1)
    tol = _check_tol(tol)
    a = f.alpha

    if f.family == "explicit":
        c = f.coeffs
        J = len(c) - 1
    elif f.family == "geometric":
        # every shared atom points the same way: fold into one pair
        bn = f.base ** -float(n)
        w = (1.0 + bn * bn) ** (0.5 * a) / (1.0 - f.base**-a)
        u = np.array([1.0, bn]) / math.hypot(1.0, bn)
        pts = [u, -u, [0.0, 1.0], [0.0, -1.0]]
        a0 = _alpha_mass_head(f, n)
        wts = [w / 2.0, w / 2.0, a0 / 2.0, a0 / 2.0]
        return SpectralMeasure(pts, wts, a, symmetric=True, dim=2)
    else:
        s = f.beta * a
        J = _J0
        while True:
            dropped = hurwitz_tail(s, J + 1).value + hurwitz_tail(s, J + 1 + n).value
            if dropped <= tol:
                break
            if 2 * (J + 1) + 2 > (1 << 24):
                raise ToleranceError(
                    "tolerance %.3g needs more than 2^24 atoms; relax tol" % tol
                )
            J *= 2
        c = f.coefficients(J + n + 1)

    if f.family == "explicit":
        x = c
        y = np.zeros(len(c))
        if n < len(c):
            y[: len(c) - n] = c[n:]
    else:
        x = c[: J + 1]
        y = c[n : J + n + 1]
    norm = np.hypot(x, y)
    keep = norm > 0.0
    pts = np.column_stack([x[keep], y[keep]]) / norm[keep][:, None]
    wts = 0.5 * norm[keep] ** a
    points = [pts, -pts]
    weights = [wts, wts]
    a0 = _alpha_mass_head(f, n)
    if a0 > 0.0:
        points.append(np.array([[0.0, 1.0], [0.0, -1.0]]))
        weights.append(np.array([a0 / 2.0, a0 / 2.0]))
    return SpectralMeasure(
        np.vstack(points), np.concatenate(weights), a, symmetric=True, dim=2
    )


def predicted_decay(f):
    """Asymptotic decay law of ``|rho_n|`` (Geometric or constant-sign
    Hyperbolic filters only).

    Geometric filters decay exponentially at rate ``ln(base)``.  For
    constant-sign hyperbolic filters the decay is a power of ``n``: with
    exponent ``1 - beta*alpha`` when ``beta`` is small enough that the
    whole coefficient tail contributes, and ``-beta`` (from finitely
    many early terms) once ``beta >= 1/(alpha-1)``, picking up a
    logarithmic factor exactly at the threshold.
    """
    if f.family == "geometric":
        return DecayLaw(math.log(f.base), False, "exponential")
    if f.family != "hyperbolic":
        raise UnsupportedOrderError(
            "decay law known only for geometric and hyperbolic filters"
        )
    if f.sign != SIGN_CONSTANT or f.c0_mode != C0_VALUE:
        raise UnsupportedOrderError(
            "decay law known only for constant-sign, fixed-c0 filters"
        )
    a, beta = f.alpha, f.beta
    if a <= 1.0:
        return DecayLaw(1.0 - beta * a, False, "power")
    crit = 1.0 / (a - 1.0)
    if beta < crit:
        return DecayLaw(1.0 - beta * a, False, "power")
    return DecayLaw(-beta, beta == crit, "power")


def dependence_batch(f, lags, tol=DEFAULT_TOL, threads=1):
    """All four dependence measures over a lag vector.

    Returns one dict per lag with keys ``n, rho, rho_tilde,
    codifference, covariation, tail_bound``; ``covariation`` is None
    when alpha <= 1.  Lags are computed independently (optionally on a
    thread pool) with a fixed per-lag summation order, so the output is
    identical for any ``threads`` value.
    """
    lags = [_check_lag(n) for n in lags]
    threads = int(threads)
    if threads < 1:
        raise ValidationError("threads must be >= 1")

    def row(n):
        rho, b1 = rho_n(f, n, tol, full_output=True)
        rt, b2 = rho_tilde_n(f, n, tol, full_output=True)
        cd, b3 = codifference_n(f, n, tol, full_output=True)
        if f.alpha > 1.0:
            cv, b4 = covariation_n(f, n, tol, full_output=True)
        else:
            cv, b4 = None, 0.0
        return {
            "n": n,
            "rho": rho,
            "rho_tilde": rt,
            "codifference": cd,
            "covariation": cv,
            "tail_bound": max(b1, b2, b3, b4),
        }

    if threads == 1 or len(lags) <= 1:
        return [row(n) for n in lags]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(row, lags))
