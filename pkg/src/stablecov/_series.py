"""Certified evaluation of infinite series.

Every dependence measure in this package is an infinite sum (or integral)
whose head is evaluated exactly and whose tail must be *certified*: the
returned value carries an a-priori bound on the discarded remainder, not a
heuristic stopping rule.  Three tail mechanisms cover all filter families:

* geometric filters: the tail itself is a geometric series, summed in
  closed form (the result is exact up to roundoff);
* pure power sums ``sum j^{-s}``: the tail is a Hurwitz zeta value,
  evaluated by ``scipy.special.zeta`` (exact up to library precision);
* hyperbolic series kernels: the tail is accelerated with the midpoint
  (Euler-Maclaurin) rule,

      sum_{j>J} t(j) = int_X^inf t(x) dx + R,   X = J + 1/2,

  where, for positive decreasing ``t`` with ``|t''(x)| <= K2 t(x)/x^2``,

      |R| <= K2 (t(X) + int_X^inf t) / (24 X^2).

  The bound follows from the per-cell midpoint error ``t''(xi)/24`` and
  monotonicity of ``t``.  The constant ``K2`` is supplied analytically by
  the caller for each kernel shape (see ``power_kernel_k2`` and
  ``ratio_power_k2``).

Heads are accumulated with ``math.fsum`` so that summation order never
contaminates the certificate.
"""

import math
import warnings
from collections import namedtuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .exceptions import ToleranceError

__all__ = [
    "Tail",
    "fsum",
    "geometric_tail",
    "hurwitz_tail",
    "em_tail",
    "power_kernel_k2",
    "ratio_power_k2",
]

#: value: estimate of the discarded tail (added to the head by callers);
#: bound: certified absolute error of that estimate.
Tail = namedtuple("Tail", ["value", "bound"])

_EXACT = Tail(0.0, 0.0)

#: relative slack attributed to library-evaluated closed forms
_LIB_EPS = 4.0 * np.finfo(float).eps


def fsum(values):
    """Compensated sum of an iterable/array (exact float addition)."""
    return math.fsum(np.asarray(values, dtype=float).ravel())


def geometric_tail(first_term, ratio):
    """Tail of ``sum_{k>=0} first_term * ratio^k`` in closed form.

    Exact up to roundoff; the bound only covers the closed-form evaluation.
    """
    if first_term == 0.0:
        return _EXACT
    if not 0.0 < ratio < 1.0:
        raise ValueError("geometric ratio must lie in (0, 1)")
    value = first_term / (1.0 - ratio)
    return Tail(value, _LIB_EPS * abs(value))


def hurwitz_tail(s, start, scale=1.0):
    """``scale * sum_{j>=start} j^{-s}`` via the Hurwitz zeta function.

    Requires ``s > 1``.  Exact up to library precision.
    """
    if s <= 1.0:
        raise ValueError("power-sum tail diverges for s <= 1")
    from scipy.special import zeta

    value = scale * float(zeta(s, start))
    return Tail(value, _LIB_EPS * abs(value) + 1e-300)


def em_tail(t, lastj, k2, epsabs=1e-14):
    """Midpoint-rule tail ``sum_{j>lastj} t(j)`` with a certified bound.

    Parameters
    ----------
    t : callable
        Positive series kernel, evaluable at float arguments, decreasing
        on ``[lastj + 1/2, inf)`` and satisfying ``|t''(x)| <= k2 t(x)/x^2``
        there.  Validity of both properties is the caller's obligation
        (the callers in this package derive them analytically).
    lastj : int
        Index of the last head term included by the caller.
    k2 : float
        The analytic second-derivative constant.
    epsabs : float
        Absolute tolerance handed to the quadrature.

    Returns
    -------
    Tail
        ``value`` is the integral estimate of the tail, ``bound`` the
        certified remainder (midpoint error plus quadrature error).
    """
    x0 = lastj + 0.5
    tx0 = float(t(x0))
    if tx0 == 0.0:
        return _EXACT

    # Integrate over v = x0/x instead of handing quad the infinite
    # range.  The built-in infinite-range transform never samples
    # beyond a fixed multiple of x0, so for slowly decaying kernels
    # the entire tail mass can sit past every node and the routine
    # reports convergence onto (essentially) zero -- with a confident
    # error estimate.  Under v = x0/x a power kernel x^{-s} becomes
    # v^{s-2} on (0, 1]: bounded polynomial variation that adaptive
    # bisection cannot miss.
    def g(v):
        x = x0 / v
        if not math.isfinite(x):
            return 0.0
        tv = t(x)
        if tv == 0.0:
            return 0.0
        return tv * x / v

    with warnings.catch_warnings():
        # slow convergence is harmless here: the reported abserr feeds
        # straight into the certificate
        warnings.simplefilter("ignore", IntegrationWarning)
        integral, quaderr = quad(
            g, 0.0, 1.0, epsabs=epsabs, epsrel=1e-13, limit=400
        )
    if not np.isfinite(integral) or not np.isfinite(quaderr):
        raise ToleranceError("tail quadrature did not converge")
    remainder = k2 * (tx0 + integral + quaderr) / (24.0 * x0 * x0)
    return Tail(integral, remainder + quaderr)


def power_kernel_k2(beta, gamma1, gamma2, gamma3):
    """Second-derivative constant for ``x^g1 (x+n)^g2 h(x)^g3``.

    ``h(x) = w1 x^{-2 beta} + w2 (x+n)^{-2 beta}`` with any positive
    weights ``w1, w2`` and any shift ``n >= 0``.  From
    ``|h'/h| <= 2 beta / x`` and ``|h''/h| <= 2 beta (2 beta + 1) / x^2``:

        |psi'/psi|  <= K1 / x,    K1 = |g1| + |g2| + 2 beta |g3|
        |psi''/psi| <= K2 / x^2,  K2 = K1^2 + |g1| + |g2| + |g3| 2b(4b+1)
    """
    k1 = abs(gamma1) + abs(gamma2) + 2.0 * beta * abs(gamma3)
    k2a = abs(gamma1) + abs(gamma2) + abs(gamma3) * 2.0 * beta * (4.0 * beta + 1.0)
    return k1 * k1 + k2a


def ratio_power_k2(p, c1, c2):
    """Second-derivative constant for ``t = D(x)^p``.

    ``D`` positive with ``|D'/D| <= c1/x`` and ``|D''/D| <= c2/x^2``;
    then ``|t''/t| <= (p|p-1| c1^2 + p c2)/x^2``.
    """
    return p * abs(p - 1.0) * c1 * c1 + p * c2
