"""Integer-order Bessel functions from periodic integral representations.

Both J_n (real argument) and I_n (complex argument) are evaluated with the
trapezoid rule over a full period, which converges geometrically for
analytic periodic integrands.  Where the function is exponentially small
(order well above the argument) the integration contour is shifted into the
complex plane through the saddle point, so the summed terms are of the same
size as the result and no catastrophic cancellation occurs.

``bessel_j_series_oracle`` is an independent reference, summed in extended
precision decimal arithmetic, used only for testing.
"""

from __future__ import annotations

import math
import operator
from decimal import Decimal, localcontext

import numpy as np

from .exceptions import ConvergenceError, DomainError

__all__ = [
    "bessel_j",
    "bessel_i_complex",
    "bessel_j_series_oracle",
    "bessel_i_series_oracle",
    "MAX_ORDER",
]

MAX_ORDER = 200
_MAX_J_ARG = 1.0e4
_SMALL_X = 1.0e-4
_LN2 = math.log(2.0)
_MAX_I_ARG = 1.0e3
_I_REL_TOL = 1.0e-10
_I_MAX_NODES = 2**16
_J_MAX_NODES = 2**17
_EPS = np.finfo(float).eps


def _check_order(order) -> int:
    try:
        n = operator.index(order)
    except TypeError as exc:
        raise DomainError(f"order must be an integer, got {order!r}") from exc
    if abs(n) > MAX_ORDER:
        raise DomainError(f"|order| must be <= {MAX_ORDER}, got {n}")
    return n


def _next_pow2(n: float) -> int:
    return 1 << max(4, math.ceil(math.log2(max(n, 1.0))))


def _j_trapezoid(n: int, x: float, nodes: int) -> float:
    # shifted contour theta -> theta + i*alpha, alpha at the saddle for n > x
    alpha = math.acosh(n / x) if n > x else 0.0
    ch, sh = math.cosh(alpha), math.sinh(alpha)
    theta = (2.0 * np.pi / nodes) * np.arange(nodes)
    expo = x * sh * (np.cos(theta) - 1.0) + (x * sh - n * alpha)
    vals = np.exp(expo) * np.cos(n * theta - x * ch * np.sin(theta))
    return float(vals.mean())


def bessel_j(order: int, x: float) -> float:
    """Bessel function of the first kind J_order(x) for integer order.

    Parameters
    ----------
    order : int
        Signed integer order, ``|order| <= 200``.  Negative orders use
        ``J_{-n}(x) = (-1)^n J_n(x)``.
    x : float
        Real argument, ``|x| <= 1e4``.

    Returns
    -------
    float
        J_order(x).  Values below the double-precision range underflow to 0.

    Raises
    ------
    DomainError
        If the order or argument is out of range or not finite.
    """
    n = _check_order(order)
    x = float(x)
    if not math.isfinite(x) or abs(x) > _MAX_J_ARG:
        raise DomainError(f"|x| must be finite and <= {_MAX_J_ARG:g}, got {x}")
    sign = 1.0
    if n < 0:
        n = -n
        if n % 2:
            sign = -sign
    if x < 0.0:
        x = -x
        if n % 2:
            sign = -sign
    if x == 0.0:
        return sign * (1.0 if n == 0 else 0.0)
    if x < _SMALL_X:
        # two series terms are exact to double precision here
        h = 0.5 * x
        lead = math.exp(n * (math.log(x) - _LN2) - math.lgamma(n + 1)) if n else 1.0
        return sign * lead * (1.0 - h * h / (n + 1))

    nodes = _next_pow2(2.0 * (n + x) + 32.0)
    prev = _j_trapezoid(n, x, nodes)
    # the shifted integrand peaks at exp(scale); agreement is judged against it
    alpha = math.acosh(n / x) if n > x else 0.0
    scale = math.exp(x * math.sinh(alpha) - n * alpha)
    while nodes < _J_MAX_NODES:
        nodes *= 2
        cur = _j_trapezoid(n, x, nodes)
        if abs(cur - prev) <= 16.0 * _EPS * math.sqrt(nodes) * scale:
            return sign * cur
        prev = cur
    raise ConvergenceError(f"J_{n}({x}) did not converge within {_J_MAX_NODES} nodes")


def _i_trapezoid(m: int, z: complex, beta: float, nodes: int) -> tuple[complex, float]:
    theta = (2.0 * np.pi / nodes) * np.arange(nodes)
    w = theta + 1j * beta
    expo = z * np.cos(w) + 1j * m * w
    peak = float(expo.real.max())
    if peak > 700.0:
        raise DomainError(f"I_{m}({z}) overflows double precision")
    vals = np.exp(expo - peak)
    return complex(vals.mean()) * math.exp(peak), math.exp(peak)


def bessel_i_complex(order: int, z: complex) -> complex:
    """Modified Bessel function I_order(z) of complex argument.

    Evaluates ``I_m(z) = (1/pi) int_0^pi exp(z cos t) cos(m t) dt`` with a
    periodic trapezoid rule, doubling the node count until two successive
    estimates agree to 1e-10 relative (or to the round-off floor of the
    integrand when the value itself is close to a zero).

    Raises
    ------
    DomainError
        ``|order| > 200``, ``|z| > 1e3``, non-finite input, or overflow.
    ConvergenceError
        If agreement is not reached within 2**16 nodes.
    """
    m = abs(_check_order(order))  # I_{-m} = I_m
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)) or abs(z) > _MAX_I_ARG:
        raise DomainError(f"|z| must be finite and <= {_MAX_I_ARG:g}, got {z}")
    if z == 0:
        return complex(1.0 if m == 0 else 0.0)

    r = abs(z)
    beta = math.asinh(m / r)
    nodes = _next_pow2(2.0 * (m + r * math.cosh(beta)) + 16.0)
    prev, _ = _i_trapezoid(m, z, beta, nodes)
    while nodes < _I_MAX_NODES:
        nodes *= 2
        cur, scale = _i_trapezoid(m, z, beta, nodes)
        diff = abs(cur - prev)
        if diff <= _I_REL_TOL * abs(cur) or diff <= 16.0 * _EPS * math.sqrt(nodes) * scale:
            if z.imag == 0.0:
                return complex(cur.real, 0.0)
            return cur
        prev = cur
    raise ConvergenceError(f"I_{m}({z}) did not converge within {_I_MAX_NODES} nodes")


def bessel_j_series_oracle(order: int, x: float) -> float:
    """Ascending power series for J_order(x), summed in 80-digit decimals.

    Reference implementation for tests only; restricted to ``0 <= order <= 60``
    and ``|x| <= 30``.
    """
    n = operator.index(order)
    x = float(x)
    if n < 0 or n > 60 or not math.isfinite(x) or abs(x) > 30.0:
        raise DomainError(f"series oracle domain is 0<=order<=60, |x|<=30; got ({n}, {x})")
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    with localcontext() as ctx:
        ctx.prec = 80
        half = Decimal(x) / 2
        q = -(half * half)
        term = half**n / math.factorial(n)
        total = term
        k = 0
        threshold = Decimal(10) ** -18
        while True:
            k += 1
            term = term * q / (k * (k + n))
            total += term
            if abs(term) < threshold * abs(total) and k > abs(half):
                break
        return float(total)


def bessel_i_series_oracle(order: int, x: float) -> float:
    """Ascending power series for I_order(x) of real argument, in 80-digit decimals.

    Reference implementation for tests only; ``0 <= order <= 60``, ``|x| <= 30``.
    """
    n = operator.index(order)
    x = float(x)
    if n < 0 or n > 60 or not math.isfinite(x) or abs(x) > 30.0:
        raise DomainError(f"series oracle domain is 0<=order<=60, |x|<=30; got ({n}, {x})")
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    with localcontext() as ctx:
        ctx.prec = 80
        half = Decimal(x) / 2
        q = half * half
        term = half**n / math.factorial(n)
        total = term
        k = 0
        threshold = Decimal(10) ** -18
        while True:
            k += 1
            term = term * q / (k * (k + n))
            total += term
            if abs(term) < threshold * abs(total) and k > abs(half):
                break
        return float(total)
