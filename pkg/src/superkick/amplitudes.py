"""Amplitude-level quantities for the Bessel x Gaussian collision.

* ``i_squared_exact``: modulus squared of the exact, unregulated overlap on
  the (|P_perp|, dPz) plane.  It is supported on the crescent region only and
  diverges as 1/sin^2(phi*) on its boundary.
* ``j_integral``: the transverse overlap left after the longitudinal
  regulator has been factored out, computed by a periodic trapezoid rule in
  the azimuth of the twisted-beam momentum.
* ``j_closed_form``: the same overlap written through I_m of complex
  argument; used as a cross-check of the quadrature.

The plane-wave amplitude is taken constant throughout.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import ParaxialityWarning
from .kinematics import (
    BesselBeam,
    GaussianPacket,
    MomentumPoint,
    _as_vec2,
    crescent_coefficients,
)
from .specfun import bessel_i_complex

__all__ = [
    "AmplitudeSample",
    "BOUNDARY_EPS",
    "i_squared_exact",
    "i_squared_grid",
    "naive_kick_density",
    "j_nodes",
    "j_integral",
    "j_integral_grid",
    "j_closed_form",
]

BOUNDARY_EPS = 1.0e-6
J_MAX_NODES = 2**18
J_ABS_TOL = 1.0e-10
J_REL_TOL = 1.0e-8
CLOSED_FORM_TRUST = 1.0e-6
_BETA_CLIP = 30.0
_CHUNK = 1 << 22


@dataclass(frozen=True)
class AmplitudeSample:
    """One evaluated amplitude with its diagnostics.

    ``boundary`` marks |I|^2 samples with sin(phi*) below ``BOUNDARY_EPS``;
    ``trusted`` is only meaningful for closed-form samples.
    """

    value: complex | float
    point: MomentumPoint | None
    node_count: int = 0
    converged: bool = True
    boundary: bool = False
    trusted: bool = True


def i_squared_grid(pt, dPz, phi_P, beam: BesselBeam, packet: GaussianPacket):
    """Vectorized |I|^2 over broadcastable arrays of |P_perp|, dPz and azimuth of P_perp.

    Returns
    -------
    value : ndarray
        Exactly 0 outside the open crescent region.
    boundary : ndarray of bool
        True where the point is inside but sin(phi*) < ``BOUNDARY_EPS``.
    """
    pt, dPz, phi_P = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (pt, dPz, phi_P)))
    p = abs(packet.p2z)
    a, c = crescent_coefficients(pt, dPz, beam.kappa, p)
    inside = (np.abs(a) < c) & (dPz >= 0)
    value = np.zeros(pt.shape)
    boundary = np.zeros(pt.shape, dtype=bool)
    if not inside.any():
        return value, boundary
    cos_s = a[inside] / c[inside]
    phs = np.arccos(cos_s)
    sin_s = np.sqrt((1.0 - cos_s) * (1.0 + cos_s))
    sin_bP = np.sin(packet.phi_b - phi_P[inside])
    osc = np.cos(beam.m * phs + beam.kappa * packet.b_mag * sin_s * sin_bP)
    atten = np.exp(-2.0 * packet.sigma**2 * p * dPz[inside])
    value[inside] = atten * osc**2 / (pt[inside] ** 2 * sin_s**2)
    boundary[inside] = sin_s < BOUNDARY_EPS
    return value, boundary


def i_squared_exact(point: MomentumPoint, beam: BesselBeam, packet: GaussianPacket) -> AmplitudeSample:
    """|I|^2 at a single momentum point; 0 outside the crescent, flagged near its edge."""
    value, boundary = i_squared_grid(point.pt, point.dPz, point.phi, beam, packet)
    return AmplitudeSample(float(value), point, boundary=bool(boundary))


def naive_kick_density(pt: float, phi_star: float, beam: BesselBeam, packet: GaussianPacket) -> float:
    """Small-kappa*b P_y density of the unregulated calculation.

    ``-pi |P_perp| kappa b sin(2 m phi*) sin(phi*)``.  It grows linearly with
    b instead of as 1/b, which is the artifact of letting the collision run
    over the whole z axis.
    """
    kb = beam.kappa * packet.b_mag
    if kb > 0.3:
        warnings.warn(f"kappa*b = {kb:.3g} > 0.3; small-kappa*b expansion is unreliable",
                      ParaxialityWarning, stacklevel=2)
    return -math.pi * pt * kb * math.sin(2 * beam.m * phi_star) * math.sin(phi_star)


def j_nodes(m: int, kappa: float, sigma: float, b: float, pt: float) -> int:
    """Starting node count for the azimuthal trapezoid rule."""
    budget = abs(m) + kappa * b + kappa * pt * sigma**2 + (kappa * sigma) ** 2
    return max(64, 8 * math.ceil(budget))


def _j_kernel(m, kappa, sigma, bx, by, Px, Py, nodes):
    """Trapezoid estimate of the overlap on a flat array of points.

    The integrand exp(i m phi + kappa*(A e^{i phi} + B e^{-i phi})/2) is
    integrated along phi + i*beta, beta chosen per point to minimise the
    peak modulus so that exponentially small results are not lost to
    cancellation.
    """
    ux = sigma**2 * Px + 1j * bx
    uy = sigma**2 * Py + 1j * by
    A = ux - 1j * uy
    B = ux + 1j * uy
    if kappa == 0.0:
        # only exp(i m phi) is left under the integral: an exact Kronecker delta
        if m != 0:
            return np.zeros(Px.shape, dtype=complex)
        return np.exp(-1j * (Px * bx + Py * by) - 0.5 * (Px * Px + Py * Py) * sigma**2)
    absA, absB = np.abs(A), np.abs(B)
    mk = m / kappa
    q = np.sqrt(mk * mk + absA * absB)
    with np.errstate(divide="ignore", invalid="ignore"):
        if m >= 0:
            t = (mk + q) / absB
        else:
            t = absA / (q - mk)
        beta = np.log(t)
    beta = np.clip(np.nan_to_num(beta, nan=0.0, posinf=_BETA_CLIP, neginf=-_BETA_CLIP),
                   -_BETA_CLIP, _BETA_CLIP)
    # peak modulus of the shifted integrand, factored out for stability
    peak = 0.5 * kappa * (absA * np.exp(-beta) + absB * np.exp(beta)) - m * beta

    phi = (2.0 * np.pi / nodes) * np.arange(nodes)
    out = np.empty(Px.shape, dtype=complex)
    rows = max(1, _CHUNK // nodes)
    for s in range(0, Px.size, rows):
        sl = slice(s, s + rows)
        bt = beta[sl, None]
        eplus = np.exp(1j * phi)[None, :] * np.exp(-bt)
        eminus = np.exp(-1j * phi)[None, :] * np.exp(bt)
        expo = (1j * m * phi[None, :] - m * bt
                + 0.5 * kappa * (A[sl, None] * eplus + B[sl, None] * eminus)
                - peak[sl, None])
        out[sl] = np.exp(expo).mean(axis=1)

    P2 = Px * Px + Py * Py
    pre = np.exp(-1j * (Px * bx + Py * by) - 0.5 * (P2 + kappa * kappa) * sigma**2 + peak)
    return pre * out


def j_integral_grid(Px, Py, beam: BesselBeam, packet: GaussianPacket, nodes: int | None = None):
    """Overlap J on arrays of transverse momenta.

    Starting from ``nodes`` (default: ``j_nodes`` at the largest |P_perp|),
    the node count is doubled until every point agrees with the previous
    estimate to 1e-10 absolute or 1e-8 relative.

    Returns
    -------
    values : ndarray of complex
    node_count : int
    converged : bool
        False if agreement was not reached within 2**18 nodes.
    """
    Px, Py = np.broadcast_arrays(np.asarray(Px, dtype=float), np.asarray(Py, dtype=float))
    shape = Px.shape
    Px, Py = Px.ravel(), Py.ravel()
    bx, by = packet.b
    kappa, sigma, m = beam.kappa, packet.sigma, beam.m
    if nodes is None:
        ptmax = float(np.sqrt(Px * Px + Py * Py).max()) if Px.size else 0.0
        nodes = j_nodes(m, kappa, sigma, packet.b_mag, ptmax)
    prev = _j_kernel(m, kappa, sigma, bx, by, Px, Py, nodes)
    while nodes < J_MAX_NODES:
        nodes *= 2
        cur = _j_kernel(m, kappa, sigma, bx, by, Px, Py, nodes)
        diff = np.abs(cur - prev)
        if np.all((diff <= J_ABS_TOL) | (diff <= J_REL_TOL * np.abs(cur))):
            return cur.reshape(shape), nodes, True
        prev = cur
    return prev.reshape(shape), nodes, False


def j_integral(P_perp, beam: BesselBeam, packet: GaussianPacket) -> AmplitudeSample:
    """Overlap J at one transverse momentum."""
    Px, Py = _as_vec2(P_perp)
    values, nodes, ok = j_integral_grid(np.array([Px]), np.array([Py]), beam, packet)
    return AmplitudeSample(complex(values[0]), MomentumPoint((Px, Py), 0.0), nodes, ok)


def _closed_form_value(Px: float, Py: float, beam: BesselBeam, packet: GaussianPacket) -> complex:
    bx, by = packet.b
    kappa, sigma, m = beam.kappa, packet.sigma, beam.m
    ux = complex(sigma**2 * Px, bx)
    uy = complex(sigma**2 * Py, by)
    A = ux - 1j * uy
    B = ux + 1j * uy
    pre = cmath.exp(-1j * (Px * bx + Py * by) - 0.5 * (Px * Px + Py * Py + kappa * kappa) * sigma**2)
    n = abs(m)
    # for m < 0 the roles of A and B swap
    num, den = (B, A) if m >= 0 else (A, B)
    if den == 0:
        # I_n(kappa s) (sqrt(num)/sqrt(den))^n -> (kappa num / 2)^n / n!
        return pre * (0.5 * kappa * num) ** n / math.factorial(n)
    rn, rd = cmath.sqrt(num), cmath.sqrt(den)
    return pre * bessel_i_complex(n, kappa * rn * rd) * (rn / rd) ** n


def j_closed_form(P_perp, beam: BesselBeam, packet: GaussianPacket) -> AmplitudeSample:
    """Overlap J via the modified Bessel function of complex argument.

    ``J = exp(-i P.b - (P^2 + kappa^2) sigma^2/2) I_m(kappa sqrt(A) sqrt(B)) (sqrt(B)/sqrt(A))^m``
    with ``u = sigma^2 P + i b``, ``A = u_x - i u_y``, ``B = u_x + i u_y``.
    Taking principal roots of A and B separately (rather than of A*B and
    B/A) keeps the product single-valued for integer m.

    ``trusted`` is True when |closed form| matches |quadrature| to 1e-6
    relative at the same point.
    """
    Px, Py = _as_vec2(P_perp)
    value = _closed_form_value(Px, Py, beam, packet)
    ref = j_integral((Px, Py), beam, packet)
    scale = max(abs(value), abs(ref.value))
    trusted = scale == 0.0 or abs(abs(value) - abs(ref.value)) <= CLOSED_FORM_TRUST * scale
    return AmplitudeSample(value, MomentumPoint((Px, Py), 0.0), ref.node_count, ref.converged,
                           trusted=trusted)
