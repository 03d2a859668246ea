"""Dependence measures of 2-D stable linear random fields.

For a field ``X_{k,l} = sum_{i,j>=0} c_{i,j} e_{k-i,l-j}`` the lag pair
``(X_{0,0}, X_{n,m})`` splits the innovation lattice into shared and
exclusive regions, and the alpha-covariance / alpha-correlation follow
as double series.  Two sign patterns of the lag vector are structurally
different and all four quadrants reduce to them:

* ``n >= 0, m >= 0``: pairs ``(c_{i,j}, c_{i+n,j+m})`` over ``i,j >= 0``
  plus the exclusive mass of the region that is *not* ``{i>=n, j>=m}``;
* ``n > 0, m < 0`` (``m' = |m|``): pairs ``(c_{i,j+m'}, c_{i+n,j})``
  plus exclusive masses over the strips ``j < m'`` and ``i < n``;
* ``rho_{n,m} = rho_{-n,-m}`` maps the remaining quadrants onto these.

Filter families: an explicit coefficient matrix (all sums finite), and
products ``c_{i,j} = a_i b_j`` of one-dimensional filters.  Product
fields dispatch on the factor families: everything collapses to closed
forms for geometric x geometric and for alpha = 2; a geometric factor is
truncated (with a certified discarded-mass bound) and treated as
explicit; an explicit factor becomes a finite loop over certified 1-D
sums; and hyperbolic x hyperbolic runs a 2-D head plus midpoint-rule
tail strips in both directions (same certificate pattern as the 1-D
machinery in ``_series``, applied per axis).
"""

import math
import warnings
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.integrate import IntegrationWarning, dblquad, quad

from ._series import (
    _LIB_EPS,
    Tail,
    em_tail,
    fsum,
    power_kernel_k2,
)
from .exceptions import (
    DegenerateError,
    ToleranceError,
    UnsupportedOrderError,
    ValidationError,
)
from .linear_process import (
    DEFAULT_TOL,
    Explicit,
    Filter1D,
    SIGN_ALTERNATING,
    SIGN_CONSTANT,
    C0_VALUE,
    _alpha_mass_head,
    _check_lag,
    _check_tol,
    alpha_coefficient_sum,
    rho_n,
)

__all__ = [
    "Filter2D",
    "Explicit2D",
    "Product",
    "ProductHyperbolic",
    "DecayLaw2D",
    "rho_nm",
    "rho_tilde_nm",
    "predicted_decay_2d",
    "field_batch",
]

#: 2-D head size per axis before tails are certified; doubles adaptively
_HEAD0 = 256
_CELL_MAX = 1 << 24


DecayLaw2D = namedtuple("DecayLaw2D", ["exp_n", "exp_m", "log_n", "log_m"])
DecayLaw2D.__doc__ = """Per-axis power decay of |rho_{n,m}| in the first
quadrant: |rho| ~ C n^exp_n m^exp_m, with a ln(n) (resp. ln(m)) factor
when the matching log flag is set."""


class Filter2D:
    """Coefficient array of a 2-D linear field, plus alpha."""

    family = None

    def __init__(self, alpha):
        alpha = float(alpha)
        if not 0.0 < alpha <= 2.0:
            raise ValidationError("alpha must lie in (0, 2]")
        self.alpha = alpha

    def c(self, i, j):
        raise NotImplementedError


class Explicit2D(Filter2D):
    """Finite coefficient matrix ``c_{i,j}``."""

    family = "explicit2d"

    def __init__(self, matrix, alpha):
        super().__init__(alpha)
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if matrix.size == 0:
            raise ValidationError("coefficient matrix must be nonempty")
        if not np.all(np.isfinite(matrix)):
            raise ValidationError("coefficients must be finite")
        self.matrix = matrix

    def c(self, i, j):
        i = _check_lag(i)
        j = _check_lag(j)
        r, s = self.matrix.shape
        return float(self.matrix[i, j]) if (i < r and j < s) else 0.0


class Product(Filter2D):
    """Separable filter ``c_{i,j} = a_i b_j`` from two 1-D filters."""

    family = "product"

    def __init__(self, f_a, f_b):
        if not isinstance(f_a, Filter1D) or not isinstance(f_b, Filter1D):
            raise ValidationError("product factors must be 1-D filters")
        if f_a.alpha != f_b.alpha:
            raise ValidationError("product factors must share alpha")
        super().__init__(f_a.alpha)
        self.f_a = f_a
        self.f_b = f_b

    def c(self, i, j):
        return self.f_a.c(i) * self.f_b.c(j)


class ProductHyperbolic(Product):
    """``c_{i,j} = i^{-beta1} j^{-beta2}`` (constant sign, c_0 = 1 on
    both axes); the family whose decay exponents have closed forms."""

    def __init__(self, beta1, beta2, alpha):
        from .linear_process import Hyperbolic

        super().__init__(Hyperbolic(beta1, alpha), Hyperbolic(beta2, alpha))


# ----------------------------------------------------------------------
# case reduction and shared assembly
# ----------------------------------------------------------------------


def _reduce_lags(n, m):
    """Map (n, m) onto the two computed sign patterns via
    rho_{n,m} = rho_{-n,-m}; returns (n', m', caseB) with n' >= 0 and
    m' = |m of the reduced pair|."""
    if n < 0 or (n == 0 and m < 0):
        n, m = -n, -m
    return n, abs(m), m < 0


def _pair_arrays_2d(X, Y, alpha, kind):
    """Summand matrix for the three double series, zero where both
    coefficients vanish."""
    N = X * X + Y * Y
    pw = np.zeros_like(N)
    nz = N > 0.0
    pw[nz] = N[nz] ** (0.5 * (alpha - 2.0))
    if kind == "rho":
        return X * Y * pw
    if kind == "sqA":
        return X * X * pw
    return Y * Y * pw


def _exact_tail(v):
    return Tail(v, _LIB_EPS * abs(v))


def _product_tail(t1, t2):
    v = t1.value * t2.value
    b = (
        abs(t1.value) * t2.bound
        + abs(t2.value) * t1.bound
        + t1.bound * t2.bound
    )
    return Tail(v, b + _LIB_EPS * abs(v))


def _total_alpha_mass_2d(f):
    if f.family == "explicit2d":
        return fsum(np.abs(f.matrix) ** f.alpha)
    return alpha_coefficient_sum(f.f_a) * alpha_coefficient_sum(f.f_b)


def _exclusive_masses(f, n, mm, caseB):
    """(extra1, extra2): exclusive spectral mass attached to the first /
    second coordinate of the lag pair.  Exact in every family."""
    if f.family == "explicit2d":
        C = np.abs(f.matrix) ** f.alpha
        if caseB:
            return fsum(C[:, :mm]), fsum(C[:n, :])
        total = fsum(C)
        inner = fsum(C[n:, mm:]) if (n < C.shape[0] and mm < C.shape[1]) else 0.0
        return 0.0, total - inner
    na = alpha_coefficient_sum(f.f_a)
    nb = alpha_coefficient_sum(f.f_b)
    ha = _alpha_mass_head(f.f_a, n)
    hb = _alpha_mass_head(f.f_b, mm)
    if caseB:
        return na * hb, ha * nb
    return 0.0, na * nb - (na - ha) * (nb - hb)


# ----------------------------------------------------------------------
# family-specific evaluators: each returns dict(kind -> Tail) for the
# requested kinds among {"rho", "sqA", "sqB"}
# ----------------------------------------------------------------------


def _explicit2d_sums(f, n, mm, caseB, kinds):
    C = f.matrix
    R, S = C.shape
    X = np.zeros((R, S))
    Y = np.zeros((R, S))
    if caseB:
        if mm < S:
            X[:, : S - mm] = C[:, mm:]
        if n < R:
            Y[: R - n, :] = C[n:, :]
    else:
        X[:, :] = C
        if n < R and mm < S:
            Y[: R - n, : S - mm] = C[n:, mm:]
    out = {}
    for kind in kinds:
        T = _pair_arrays_2d(X, Y, f.alpha, kind)
        out[kind] = Tail(fsum(T), _LIB_EPS * fsum(np.abs(T)))
    return out


def _gaussian_product_sums(f, n, mm, caseB, kinds, tol):
    """alpha = 2: the norm weight is 1 and every double series is a
    product of two 1-D series (the cross-covariance itself is even in
    each lag separately)."""
    fa, fb = f.f_a, f.f_b
    part = tol / 4.0
    sq_a = Tail(*rho_n(fa, 0, part, full_output=True))
    sq_b = Tail(*rho_n(fb, 0, part, full_output=True))
    out = {}
    for kind in kinds:
        if kind == "rho":
            ta = Tail(*rho_n(fa, n, part, full_output=True))
            tb = Tail(*rho_n(fb, mm, part, full_output=True))
        elif kind == "sqA":
            # squares of the first coordinate: a_i and (case B) b_{j+m'}
            ta = sq_a
            tb = Tail(sq_b.value - _alpha_mass_head(fb, mm), sq_b.bound) if caseB else sq_b
        else:
            # squares of the second coordinate: a_{i+n} and b_{j+m} / b_j
            ta = Tail(sq_a.value - _alpha_mass_head(fa, n), sq_a.bound)
            tb = sq_b if caseB else Tail(sq_b.value - _alpha_mass_head(fb, mm), sq_b.bound)
        out[kind] = _product_tail(ta, tb)
    return out


def _geom_geom_sums(f, n, mm, caseB, kinds):
    """Both factors geometric: fully separable closed forms."""
    a = f.alpha
    half = 0.5 * (a - 2.0)
    qa = f.f_a.base ** -1.0
    qb = f.f_b.base ** -1.0
    scale = 1.0 / ((1.0 - qa**a) * (1.0 - qb**a))
    u = qa**n
    v = qb**mm
    if caseB:
        g = u * u + v * v
    else:
        g = 1.0 + (u * v) ** 2
    out = {}
    for kind in kinds:
        if kind == "rho":
            val = u * v * g**half * scale
        elif kind == "sqA":
            val = (v * v if caseB else 1.0) * g**half * scale
        else:
            val = (u * u) * (1.0 if caseB else v * v) * g**half * scale
        out[kind] = _exact_tail(val)
    return out


def _map_kind_y(kind):
    return {"rho": "rho", "sqA": "sq1", "sqB": "sq2"}[kind]


def _weighted_pair_sum(fh, shift, kind, w1, w2, tol, swap=False):
    """Certified ``sum_{j>=0}`` of the weighted 1-D pair kernel for a
    hyperbolic filter: with ``U1 = c_j``, ``U2 = c_{j+shift}`` and
    ``H = w1 U1^2 + w2 U2^2``,

        rho: U1 U2 H^{(a-2)/2},  sq1: U1^2 H^{...},  sq2: U2^2 H^{...}

    ``swap=True`` evaluates the mirrored pairing ``(c_{j+shift}, c_j)``,
    which equals the plain pairing with the weights exchanged and the
    square kinds swapped.
    """
    if swap:
        w1, w2 = w2, w1
        kind = {"rho": "rho", "sq1": "sq2", "sq2": "sq1"}[kind]
    a, beta = fh.alpha, fh.beta
    half = 0.5 * (a - 2.0)
    alternating = fh.sign == SIGN_ALTERNATING

    if kind == "rho":
        k2 = power_kernel_k2(beta, -beta, -beta, half)
        xmin = shift * max(0.0, 1.0 - a) / a
        tail_sign = (-1.0) ** shift if alternating else 1.0

        def t(x):
            r = x / (x + shift)
            return x ** (-beta * a) * r**beta * (w1 + w2 * r ** (2 * beta)) ** half

    elif kind == "sq1":
        k2 = power_kernel_k2(beta, -2.0 * beta, 0.0, half)
        xmin = 0.0
        tail_sign = 1.0

        def t(x):
            r = x / (x + shift)
            return x ** (-beta * a) * (w1 + w2 * r ** (2 * beta)) ** half

    else:
        k2 = power_kernel_k2(beta, 0.0, -2.0 * beta, half)
        xmin = shift * (2.0 - a) / a
        tail_sign = 1.0

        def t(x):
            r = x / (x + shift)
            return (
                x ** (-beta * a)
                * r ** (2 * beta)
                * (w1 + w2 * r ** (2 * beta)) ** half
            )

    epsabs = min(1e-14, 0.1 * tol)
    J = max(_HEAD0 * 4, int(math.ceil(xmin)) + 2, shift + 2)
    while True:
        tail = em_tail(t, J, k2, epsabs=epsabs)
        if tail.bound <= 0.5 * tol or J * 2 > _CELL_MAX:
            break
        J *= 2
    if tail.bound > tol:
        raise ToleranceError(
            "1-D tail bound %.3g exceeds tol=%.3g" % (tail.bound, tol)
        )
    c = fh.coefficients(J + shift + 1)
    U1 = c[: J + 1]
    U2 = c[shift : J + shift + 1]
    H = w1 * U1 * U1 + w2 * U2 * U2
    pw = np.zeros_like(H)
    nz = H > 0.0
    pw[nz] = H[nz] ** half
    if kind == "rho":
        terms = U1 * U2 * pw
    elif kind == "sq1":
        terms = U1 * U1 * pw
    else:
        terms = U2 * U2 * pw
    head = fsum(terms)
    return Tail(head + tail_sign * tail.value, tail.bound + _LIB_EPS * fsum(np.abs(terms)))


def _loop_product_sums(outer, shift_o, inner, shift_i, outer_is_a, caseB, kinds, tol):
    """Explicit factor as a finite outer loop, certified 1-D sums inside.

    ``outer`` is the Explicit factor on its own axis (shift ``shift_o``),
    ``inner`` the hyperbolic one.  ``outer_is_a`` says whether the outer
    axis is the first (i) axis; the case-B pairing swap always acts on
    the second (j) axis.
    """
    oc = outer.coefficients(len(outer.coeffs) + shift_o)
    L = len(outer.coeffs)
    out = {}
    for kind in kinds:
        total = 0.0
        bound = 0.0
        kin = _map_kind_y(kind)
        part = tol / max(1, L)
        for idx in range(L):
            if caseB and not outer_is_a:
                # the mirrored pairing acts on the j axis
                o1, o2 = oc[idx + shift_o], oc[idx]
            else:
                o1, o2 = oc[idx], oc[idx + shift_o]
            if kind == "rho":
                scal = o1 * o2
            elif kind == "sqA":
                scal = o1 * o1
            else:
                scal = o2 * o2
            if scal == 0.0:
                continue
            swap = caseB and outer_is_a
            inner_tail = _weighted_pair_sum(
                inner,
                shift_i,
                kin,
                o1 * o1,
                o2 * o2,
                part / abs(scal),
                swap=swap,
            )
            total += scal * inner_tail.value
            bound += abs(scal) * inner_tail.bound
        out[kind] = Tail(total, bound)
    return out


# ----------------------------------------------------------------------
# hyperbolic x hyperbolic: 2-D head plus certified tail strips
# ----------------------------------------------------------------------


def _hh_profiles(fa, n, fb, mm, caseB, kind):
    """Coupling closure and certificate constants for the core kernel.

    The summand factorises as ``x^{-ba a} y^{-bb a} C(rx, ry)`` with
    ``rx = x/(x+n)``, ``ry = y/(y+m')`` and a coupling ``C`` bounded on
    (0, 1]^2; tails are certified per axis with the second-derivative
    constants of the full kernel and its monotonicity thresholds.
    """
    a = fa.alpha
    ba, bb = fa.beta, fb.beta
    half = 0.5 * (a - 2.0)

    if kind == "rho":
        gx = gy = (-1.0, -1.0)  # in units of beta
        xmin = n * max(0.0, 1.0 - a) / a
        ymin = mm * max(0.0, 1.0 - a) / a
    elif kind == "sqA":
        gx = (-2.0, 0.0)
        xmin = 0.0
        gy = (0.0, -2.0) if caseB else (-2.0, 0.0)
        ymin = mm * (2.0 - a) / a if caseB else 0.0
    else:
        gx = (0.0, -2.0)
        xmin = n * (2.0 - a) / a
        gy = (-2.0, 0.0) if caseB else (0.0, -2.0)
        ymin = 0.0 if caseB else mm * (2.0 - a) / a

    k2x = power_kernel_k2(ba, gx[0] * ba, gx[1] * ba, half)
    k2y = power_kernel_k2(bb, gy[0] * bb, gy[1] * bb, half)

    if caseB:

        def coup(rx, ry):
            u = rx**ba
            v = ry**bb
            w = (u * u + v * v) ** half
            if kind == "rho":
                return u * v * w
            if kind == "sqA":
                return v * v * w
            return u * u * w

    else:

        def coup(rx, ry):
            s = rx**ba * ry**bb
            w = (1.0 + s * s) ** half
            if kind == "rho":
                return s * w
            if kind == "sqA":
                return w
            return s * s * w

    sgn = 1.0
    if kind == "rho":
        if fa.sign == SIGN_ALTERNATING:
            sgn *= (-1.0) ** n
        if fb.sign == SIGN_ALTERNATING:
            sgn *= (-1.0) ** mm
    return coup, k2x, k2y, xmin, ymin, sgn


def _head_2d(fa, n, fb, mm, caseB, kind, I, J, chunk=512):
    av = fa.coefficients(I + n + 1)
    bv = fb.coefficients(J + mm + 1)
    U1 = av[1 : I + 1]
    U2 = av[1 + n : I + n + 1]
    if caseB:
        V1 = bv[1 + mm : J + mm + 1]
        V2 = bv[1 : J + 1]
    else:
        V1 = bv[1 : J + 1]
        V2 = bv[1 + mm : J + mm + 1]
    sums, asums = [], []
    for lo in range(0, I, chunk):
        u1 = U1[lo : lo + chunk, None]
        u2 = U2[lo : lo + chunk, None]
        T = _pair_arrays_2d(u1 * V1[None, :], u2 * V2[None, :], fa.alpha, kind)
        sums.append(fsum(T))
        asums.append(fsum(np.abs(T)))
    return math.fsum(sums), math.fsum(asums)


def _hh_core(fa, n, fb, mm, caseB, kind, tol):
    """Certified sum over the core quadrant i >= 1, j >= 1.

    Head box plus two midpoint-rule tail strips and a corner.  All tail
    integrals are mapped onto the unit square by ``x = X u^{-1/(ba a-1)}``
    (and the same in y), which turns the leading power of the kernel
    into a constant: the integrands become bounded smooth couplings and
    the quadrature errors that enter the certificate stay tiny.
    """
    a = fa.alpha
    ba, bb = fa.beta, fb.beta
    coup, k2x, k2y, xmin, ymin, sgn = _hh_profiles(fa, n, fb, mm, caseB, kind)
    I = max(_HEAD0, int(math.ceil(xmin)) + 2)
    J = max(_HEAD0, int(math.ceil(ymin)) + 2)
    epsabs = min(1e-14, 0.05 * tol)
    pinx = 1.0 / (ba * a - 1.0)
    piny = 1.0 / (bb * a - 1.0)

    while True:
        X, Y = I + 0.5, J + 0.5
        kx = pinx * X ** (1.0 - ba * a)  # int_X^inf x^{-ba a} dx
        ky = piny * Y ** (1.0 - bb * a)
        rxX = X / (X + n)
        ryY = Y / (Y + mm)
        iarr = np.arange(1, I + 1, dtype=float)
        jarr = np.arange(1, J + 1, dtype=float)
        cx, rx_h = iarr ** (-ba * a), iarr / (iarr + n)
        cy, ry_h = jarr ** (-bb * a), jarr / (jarr + mm)

        def ry_of(v):
            return 1.0 / (1.0 + (mm / Y) * v**piny)

        def rx_of(u):
            return 1.0 / (1.0 + (n / X) * u**pinx)

        def unit_eps(scale):
            # the unit-square result is rescaled by `scale`, so the
            # tolerance handed to the quadrature grows by the same factor
            return dict(
                epsabs=min(epsabs / max(scale, 1e-300), 1e6),
                epsrel=1e-11,
                limit=200,
            )

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            # strip j > J under the head rows
            v1, q1 = quad(lambda v: float(np.sum(cx * coup(rx_h, ry_of(v)))), 0.0, 1.0, **unit_eps(ky))
            p1, e1 = ky * v1, ky * q1
            f1Y = float(np.sum(cx * coup(rx_h, ryY))) * Y ** (-bb * a)
            b1 = k2y * (f1Y + p1 + e1) / (24.0 * Y * Y) + e1

            # strip i > I left of the head columns
            v2, q2 = quad(lambda u: float(np.sum(cy * coup(rx_of(u), ry_h))), 0.0, 1.0, **unit_eps(kx))
            p2, e2 = kx * v2, kx * q2
            f2X = float(np.sum(cy * coup(rxX, ry_h))) * X ** (-ba * a)
            b2 = k2x * (f2X + p2 + e2) / (24.0 * X * X) + e2

            # corner i > I, j > J
            ce = unit_eps(kx * ky)
            v12, q12 = dblquad(
                lambda v, u: coup(rx_of(u), ry_of(v)),
                0.0, 1.0, 0.0, 1.0, epsabs=ce["epsabs"], epsrel=1e-9,
            )
            p12, e12 = kx * ky * v12, kx * ky * q12
            vg, qg = quad(lambda v: coup(rxX, ry_of(v)), 0.0, 1.0, **unit_eps(X ** (-ba * a) * ky))
            gX, eg = X ** (-ba * a) * ky * vg, X ** (-ba * a) * ky * qg
            vq, qq = quad(lambda u: coup(rx_of(u), ryY), 0.0, 1.0, **unit_eps(Y ** (-bb * a) * kx))
            edge, ee = Y ** (-bb * a) * kx * vq, Y ** (-bb * a) * kx * qq
        corner = X ** (-ba * a) * Y ** (-bb * a) * coup(rxX, ryY)
        colmass = gX + eg + p12 + e12
        rg = k2x * colmass / (24.0 * X * X)
        ri = k2y * (corner + edge + ee + colmass + rg) / (24.0 * Y * Y)
        b12 = rg + ri + e12

        tail_value = p1 + p2 + p12
        tail_bound = b1 + b2 + b12
        if tail_bound <= 0.5 * tol or 4 * I * J > _CELL_MAX:
            break
        I *= 2
        J *= 2

    if tail_bound > tol:
        raise ToleranceError(
            "2-D tail bound %.3g exceeds tol=%.3g at head %dx%d"
            % (tail_bound, tol, I, J)
        )
    head, ahead = _head_2d(fa, n, fb, mm, caseB, kind, I, J)
    return Tail(head + sgn * tail_value, tail_bound + _LIB_EPS * ahead)


def _hyper_hyper_sums(f, n, mm, caseB, kinds, tol):
    """Full double series = corner + two boundary lines + core."""
    fa, fb = f.f_a, f.f_b
    a = f.alpha
    av = fa.coefficients(n + 1)
    bv = fb.coefficients(mm + 1)
    u1, u2 = av[0], av[n]
    if caseB:
        v1, v2 = bv[mm], bv[0]
    else:
        v1, v2 = bv[0], bv[mm]

    out = {}
    for kind in kinds:
        part = tol / 4.0
        # corner (0, 0)
        T = _pair_arrays_2d(
            np.array([[u1 * v1]]), np.array([[u2 * v2]]), a, kind
        )
        corner = float(T[0, 0])
        total = -corner  # row and column both contain the corner
        bound = 0.0
        # row i = 0 (over all j >= 0) and column j = 0 (over all i >= 0)
        if kind == "rho":
            scal_row, scal_col = u1 * u2, v1 * v2
        elif kind == "sqA":
            scal_row, scal_col = u1 * u1, v1 * v1
        else:
            scal_row, scal_col = u2 * u2, v2 * v2
        if scal_row != 0.0:
            t = _weighted_pair_sum(
                fb, mm, _map_kind_y(kind), u1 * u1, u2 * u2,
                part / abs(scal_row), swap=caseB,
            )
            total += scal_row * t.value
            bound += abs(scal_row) * t.bound
        if scal_col != 0.0:
            t = _weighted_pair_sum(
                fa, n, _map_kind_y(kind), v1 * v1, v2 * v2,
                part / abs(scal_col),
            )
            total += scal_col * t.value
            bound += abs(scal_col) * t.bound
        core = _hh_core(fa, n, fb, mm, caseB, kind, part)
        out[kind] = Tail(total + core.value, bound + core.bound + _LIB_EPS * abs(corner))
    return out


# ----------------------------------------------------------------------
# dispatch
# ----------------------------------------------------------------------


def _truncate_geometric(g, other_mass, tol):
    """Replace a geometric factor by an explicit head whose discarded
    2-D mass is bounded by tol (uniformly over the three series, via
    |summand| <= |c_{i,j}|^alpha + |c_{i+n,j+m}|^alpha)."""
    a = g.alpha
    q = g.base**-a
    budget = tol * (1.0 - q) / (4.0 * max(other_mass, 1e-300))
    if budget >= 1.0:
        L = 8
    else:
        L = int(math.ceil(math.log(budget) / math.log(q))) + 2
    L = max(8, L)
    if L > (1 << 16):
        raise ToleranceError("geometric truncation needs an impractical head")
    extra = 2.0 * other_mass * q**L / (1.0 - q)
    return Explicit(g.coefficients(L), a), extra


def _product_sums(f, n, mm, caseB, kinds, tol):
    fa, fb = f.f_a, f.f_b
    if f.alpha == 2.0:
        return _gaussian_product_sums(f, n, mm, caseB, kinds, tol)
    if fa.family == "geometric" and fb.family == "geometric":
        return _geom_geom_sums(f, n, mm, caseB, kinds)
    if fa.family == "hyperbolic" and fb.family == "hyperbolic":
        return _hyper_hyper_sums(f, n, mm, caseB, kinds, tol)

    extra = 0.0
    if fa.family == "geometric":
        fa, e = _truncate_geometric(fa, alpha_coefficient_sum(fb), tol / 4.0)
        extra += e
    if fb.family == "geometric":
        fb, e = _truncate_geometric(fb, alpha_coefficient_sum(fa), tol / 4.0)
        extra += e

    if fa.family == "explicit" and fb.family == "explicit":
        C = np.outer(fa.coeffs, fb.coeffs)
        out = _explicit2d_sums(Explicit2D(C, f.alpha), n, mm, caseB, kinds)
    elif fa.family == "explicit":
        out = _loop_product_sums(fa, n, fb, mm, True, caseB, kinds, tol / 2.0)
    else:
        out = _loop_product_sums(fb, mm, fa, n, False, caseB, kinds, tol / 2.0)
    if extra:
        out = {k: Tail(t.value, t.bound + extra) for k, t in out.items()}
    return out


def _field_sums(f, n, m, kinds, tol):
    n, mm, caseB = _reduce_lags(n, m)
    if f.family == "explicit2d":
        return _explicit2d_sums(f, n, mm, caseB, kinds), n, mm, caseB
    return _product_sums(f, n, mm, caseB, kinds, tol), n, mm, caseB


def rho_nm(f, n, m, tol=DEFAULT_TOL, full_output=False):
    """Lag-``(n, m)`` alpha-covariance of a 2-D linear field.

    All four lag quadrants are supported; ``(0, 0)`` evaluates to
    ``2^{(a-2)/2} sum |c_{i,j}|^a`` exactly.
    """
    n = _check_lag(n, minimum=-(1 << 62))
    m = _check_lag(m, minimum=-(1 << 62))
    tol = _check_tol(tol)
    if n == 0 and m == 0:
        v = 2.0 ** (0.5 * (f.alpha - 2.0)) * _total_alpha_mass_2d(f)
        out = _exact_tail(v)
    else:
        sums, _, _, _ = _field_sums(f, n, m, ("rho",), tol)
        out = sums["rho"]
    return (out.value, out.bound) if full_output else out.value


def rho_tilde_nm(f, n, m, tol=DEFAULT_TOL, full_output=False):
    """Lag-``(n, m)`` alpha-correlation in [-1, 1].

    The two marginal moments pair the shared-atom series with the
    exclusive innovation mass of the matching coordinate.
    """
    n = _check_lag(n, minimum=-(1 << 62))
    m = _check_lag(m, minimum=-(1 << 62))
    tol = _check_tol(tol)
    if n == 0 and m == 0:
        if _total_alpha_mass_2d(f) <= 0.0:
            raise DegenerateError("all-zero filter has no correlation")
        return (1.0, 0.0) if full_output else 1.0
    sums, rn, rm, caseB = _field_sums(f, n, m, ("rho", "sqA", "sqB"), tol)
    e1, e2 = _exclusive_masses(f, rn, rm, caseB)
    den1 = sums["sqA"].value + e1
    den2 = sums["sqB"].value + e2
    den = den1 * den2
    if den <= 0.0:
        raise DegenerateError("degenerate pair measure (zero marginal)")
    num = sums["rho"]
    value = num.value / math.sqrt(den)
    dden = sums["sqA"].bound * den2 + den1 * sums["sqB"].bound
    bound = num.bound / math.sqrt(den) + 0.5 * abs(num.value) * dden / den**1.5
    value = min(1.0, max(-1.0, value))
    return (value, bound) if full_output else value


def predicted_decay_2d(f):
    """Per-axis power decay of ``|rho_{n,m}|`` in the open first
    quadrant, for constant-sign product-hyperbolic filters.

    Each axis independently follows the 1-D rule: exponent
    ``1 - beta_i alpha`` below the threshold ``1/(alpha-1)`` (and always
    when alpha <= 1), ``-beta_i`` above it, with a logarithmic factor
    exactly at the threshold.
    """
    if f.family != "product":
        raise UnsupportedOrderError("decay law needs a product filter")
    for g in (f.f_a, f.f_b):
        if g.family != "hyperbolic" or g.sign != SIGN_CONSTANT or g.c0_mode != C0_VALUE:
            raise UnsupportedOrderError(
                "decay law known only for constant-sign hyperbolic factors"
            )
    a = f.alpha

    def axis(beta):
        if a <= 1.0:
            return 1.0 - beta * a, False
        crit = 1.0 / (a - 1.0)
        if beta < crit:
            return 1.0 - beta * a, False
        return -beta, beta == crit

    en, ln_ = axis(f.f_a.beta)
    em, lm_ = axis(f.f_b.beta)
    return DecayLaw2D(en, em, ln_, lm_)


def field_batch(f, lag_pairs, tol=DEFAULT_TOL, threads=1):
    """``rho`` and ``rho~`` over a list of (n, m) pairs; one dict per
    pair with the larger of the two certificates.  Pairs are independent
    and may be evaluated on a thread pool without changing the output.
    """
    pairs = [(_check_lag(n, minimum=-(1 << 62)), _check_lag(m, minimum=-(1 << 62)))
             for n, m in lag_pairs]
    threads = int(threads)
    if threads < 1:
        raise ValidationError("threads must be >= 1")

    def row(pair):
        n, m = pair
        r, b1 = rho_nm(f, n, m, tol, full_output=True)
        rt, b2 = rho_tilde_nm(f, n, m, tol, full_output=True)
        return {"n": n, "m": m, "rho": r, "rho_tilde": rt, "tail_bound": max(b1, b2)}

    if threads == 1 or len(pairs) <= 1:
        return [row(p) for p in pairs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(row, pairs))
