"""Beam parameterization, two-body phase space and the allowed (P_perp, dPz) region.

Conventions: the twisted (Bessel) beam moves along +z with longitudinal
momentum ``p1z`` and cone momentum ``kappa``; the Gaussian packet moves along
-z (``p2z < 0``) and is centred at the transverse impact vector ``b``.
All momenta share one arbitrary unit U, lengths are in 1/U.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, ParaxialityWarning, RegionError, SingularWeightError

__all__ = [
    "BesselBeam",
    "GaussianPacket",
    "MomentumPoint",
    "PhaseSpaceSolution",
    "kallen",
    "two_body_solutions",
    "solve_longitudinal",
    "phase_space_weight",
    "longitudinal_excess",
    "crescent_coefficients",
    "crescent_bounds",
    "crescent_boundary",
    "in_crescent",
    "phi_star",
    "regulator_g",
    "focal_length",
    "waist_at",
    "valid_regulator",
]

PARAXIAL_RATIO = 10.0
SEPARATION = 5.0


def _as_vec2(v) -> tuple[float, float]:
    if np.ndim(v) == 0:
        return (float(v), 0.0)
    arr = np.asarray(v, dtype=float).ravel()
    if arr.shape != (2,):
        raise DomainError(f"expected a scalar or a 2-vector, got shape {np.shape(v)}")
    return (float(arr[0]), float(arr[1]))


@dataclass(frozen=True)
class BesselBeam:
    """Twisted state with fixed longitudinal momentum, cone momentum and winding."""

    p1z: float
    kappa: float
    m: int

    def __post_init__(self):
        if not (math.isfinite(self.p1z) and math.isfinite(self.kappa)):
            raise DomainError("beam momenta must be finite")
        if self.p1z <= 0:
            raise DomainError(f"p1z must be > 0, got {self.p1z}")
        if self.kappa <= 0:
            raise DomainError(f"kappa must be > 0, got {self.kappa}")
        if self.kappa >= self.p1z:
            raise DomainError(f"kappa must be < p1z for a paraxial beam, got {self.kappa} >= {self.p1z}")
        if int(self.m) != self.m:
            raise DomainError(f"winding number must be an integer, got {self.m}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def energy(self) -> float:
        """Energy of the massless twisted quantum."""
        return math.hypot(self.p1z, self.kappa)


@dataclass(frozen=True)
class GaussianPacket:
    """Monochromatic Gaussian beam of waist ``sigma`` offset by ``b`` from the vortex axis.

    ``b`` may be given as a scalar (taken along +x) or as a 2-vector.
    """

    p2z: float
    sigma: float
    b: tuple = (0.0, 0.0)
    mass: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "b", _as_vec2(self.b))
        if not all(math.isfinite(v) for v in (self.p2z, self.sigma, self.mass, *self.b)):
            raise DomainError("packet parameters must be finite")
        if self.p2z >= 0:
            raise DomainError(f"p2z must be < 0, got {self.p2z}")
        if self.sigma <= 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")
        if self.mass < 0:
            raise DomainError(f"mass must be >= 0, got {self.mass}")
        if self.sigma * abs(self.p2z) < PARAXIAL_RATIO:
            warnings.warn(
                f"sigma*|p2z| = {self.sigma * abs(self.p2z):.3g} < {PARAXIAL_RATIO:g}; "
                "paraxial approximation is marginal",
                ParaxialityWarning,
                stacklevel=3,
            )

    @property
    def E2(self) -> float:
        return math.hypot(self.p2z, self.mass)

    @property
    def b_mag(self) -> float:
        return math.hypot(*self.b)

    @property
    def phi_b(self) -> float:
        return math.atan2(self.b[1], self.b[0])


@dataclass(frozen=True)
class MomentumPoint:
    """Total final momentum: transverse vector and longitudinal deviation dPz."""

    P_perp: tuple
    dPz: float

    def __post_init__(self):
        object.__setattr__(self, "P_perp", _as_vec2(self.P_perp))
        object.__setattr__(self, "dPz", float(self.dPz))
        if not all(math.isfinite(v) for v in (*self.P_perp, self.dPz)):
            raise DomainError("momentum point must be finite")

    @classmethod
    def polar(cls, pt: float, phi: float, dPz: float) -> "MomentumPoint":
        return cls((pt * math.cos(phi), pt * math.sin(phi)), dPz)

    @property
    def pt(self) -> float:
        return math.hypot(*self.P_perp)

    @property
    def phi(self) -> float:
        return math.atan2(self.P_perp[1], self.P_perp[0])


@dataclass(frozen=True)
class PhaseSpaceSolution:
    """Both longitudinal roots k*_1z and the corresponding final energies.

    Empty tuples mean the phase space is closed (M_perp < m1_perp + m2_perp).
    """

    k1z_star: tuple = ()
    E1p: tuple = ()
    E2p: tuple = ()
    sqrt_lambda: float = float("nan")
    m1_perp: float = float("nan")
    m2_perp: float = float("nan")
    M_perp: float = float("nan")
    lam: float = float("nan")

    @property
    def is_empty(self) -> bool:
        return len(self.k1z_star) == 0


def kallen(a, b, c):
    """Kallen triangle function a^2 + b^2 + c^2 - 2ab - 2ac - 2bc."""
    return a * a + b * b + c * c - 2.0 * a * b - 2.0 * a * c - 2.0 * b * c


def two_body_solutions(k1_perp, P_perp, P_z: float, E0: float, m1: float, m2: float) -> PhaseSpaceSolution:
    """Solve energy conservation for k'_1z at fixed k'_1perp and total momentum.

    Raises
    ------
    DomainError
        If ``E0**2 <= P_z**2`` (no real transverse mass for the pair).
    """
    k1 = np.asarray(_as_vec2(k1_perp))
    P = np.asarray(_as_vec2(P_perp))
    M2 = E0 * E0 - P_z * P_z
    if not M2 > 0:
        raise DomainError(f"E0^2 - P_z^2 must be > 0, got {M2}")
    m1p2 = m1 * m1 + float(k1 @ k1)
    m2p2 = m2 * m2 + float((P - k1) @ (P - k1))
    M, m1p, m2p = math.sqrt(M2), math.sqrt(m1p2), math.sqrt(m2p2)
    if M < m1p + m2p:
        return PhaseSpaceSolution(m1_perp=m1p, m2_perp=m2p, M_perp=M)
    # factored form of kallen(M2, m1p2, m2p2): exact zero at threshold
    lam = max((M2 - (m1p + m2p) ** 2) * (M2 - (m1p - m2p) ** 2), 0.0)
    sl = math.sqrt(lam)
    r = (m1p2 - m2p2) / M2
    k_mid, e_mid = 0.5 * P_z * (1.0 + r), 0.5 * E0 * (1.0 + r)
    dk, de = E0 * sl / (2.0 * M2), P_z * sl / (2.0 * M2)
    k1z = (k_mid + dk, k_mid - dk)
    E1 = (e_mid + de, e_mid - de)
    E2 = (E0 - E1[0], E0 - E1[1])
    return PhaseSpaceSolution(k1z, E1, E2, sl, m1p, m2p, M, lam)


def solve_longitudinal(k1_perp, point: MomentumPoint, beam: BesselBeam, packet: GaussianPacket,
                       m1: float, m2: float) -> PhaseSpaceSolution:
    """Longitudinal solutions for a final state with total momentum ``point``.

    The initial energy is that of the massless twisted quantum plus the packet;
    the total longitudinal momentum is ``p1z + p2z + dPz``.
    """
    E0 = beam.energy + packet.E2
    P_z = beam.p1z + packet.p2z + point.dPz
    return two_body_solutions(k1_perp, point.P_perp, P_z, E0, m1, m2)


def phase_space_weight(sol: PhaseSpaceSolution) -> float:
    """Weight 1/(2 sqrt(lambda)) of one longitudinal branch in the final phase space."""
    if sol.is_empty or not sol.sqrt_lambda > 0:
        raise SingularWeightError("phase-space weight diverges at lambda = 0")
    return 0.5 / sol.sqrt_lambda


def longitudinal_excess(dPz, p2z_abs):
    """2|p2z| dPz - dPz^2, the exact combination bounded by (P_perp -+ kappa)^2."""
    return dPz * (2.0 * p2z_abs - dPz)


def crescent_coefficients(pt, dPz, kappa: float, p2z_abs: float):
    """Coefficients (a, c) of the azimuthal constraint a = c cos(phi~)."""
    a = pt * pt + kappa * kappa - longitudinal_excess(dPz, p2z_abs)
    c = 2.0 * pt * kappa
    return a, c


def in_crescent(pt, dPz, kappa: float, p2z_abs: float):
    """Strict membership (P_perp - kappa)^2 < 2|p2z|dPz - dPz^2 < (P_perp + kappa)^2."""
    q = longitudinal_excess(np.asarray(dPz, dtype=float), p2z_abs)
    pt = np.asarray(pt, dtype=float)
    return ((pt - kappa) ** 2 < q) & (q < (pt + kappa) ** 2)


def crescent_bounds(pt: float, beam: BesselBeam, packet: GaussianPacket) -> list[tuple[float, float]]:
    """Allowed dPz intervals at fixed |P_perp|, as a list of (lo, hi) pairs.

    Up to two bands are returned, ordered by dPz: the near band
    ``[p - A, p - B]`` and the far band ``[p + B, p + A]`` with
    ``p = |p2z|``, ``A = sqrt(p^2 - (pt - kappa)^2)``,
    ``B = sqrt(p^2 - (pt + kappa)^2)``.  When ``(pt + kappa) >= p`` the two
    bands merge into one.  Endpoints are boundaries (excluded from the open
    region); a degenerate band ``lo == hi`` is kept, e.g. at ``pt = 0``.
    """
    if pt < 0:
        raise DomainError(f"|P_perp| must be >= 0, got {pt}")
    p, kappa = abs(packet.p2z), beam.kappa
    lo2, hi2 = (pt - kappa) ** 2, (pt + kappa) ** 2
    if lo2 >= p * p:
        return []
    A = math.sqrt(p * p - lo2)
    near_lo = lo2 / (p + A)  # = p - A without cancellation
    if hi2 >= p * p:
        return [(near_lo, p + A)]
    B = math.sqrt(p * p - hi2)
    near_hi = hi2 / (p + B)  # = p - B
    return [(near_lo, near_hi), (p + B, p + A)]


def phi_star(point: MomentumPoint, beam: BesselBeam, packet: GaussianPacket) -> float:
    """Azimuth phi* in [0, pi] fixed by the kinematic constraint, cos(phi*) = a/c.

    Raises
    ------
    RegionError
        If the point is outside the allowed region (|a| > c) or at P_perp = 0.
    """
    a, c = crescent_coefficients(point.pt, point.dPz, beam.kappa, abs(packet.p2z))
    if c == 0.0:
        raise RegionError("phi* is undefined at P_perp = 0")
    if abs(a) > c:
        raise RegionError(f"point outside the allowed region: |a| = {abs(a):.6g} > c = {c:.6g}")
    return math.acos(a / c)


def regulator_g(x, ell: float):
    """Normalized Lorentzian (1/pi) ell / (1 + x^2 ell^2)."""
    if not ell > 0:
        raise DomainError(f"ell must be > 0, got {ell}")
    x = np.asarray(x, dtype=float)
    out = ell / (np.pi * (1.0 + (x * ell) ** 2))
    return float(out) if out.ndim == 0 else out


def focal_length(packet: GaussianPacket) -> float:
    """Longitudinal focal length L_sigma = sigma^2 |p2z|."""
    return packet.sigma**2 * abs(packet.p2z)


def waist_at(packet: GaussianPacket, z):
    """Transverse size sigma(z) = sigma sqrt(1 + z^2 / L_sigma^2)."""
    L = focal_length(packet)
    z = np.asarray(z, dtype=float)
    out = packet.sigma * np.sqrt(1.0 + (z / L) ** 2)
    return float(out) if out.ndim == 0 else out


def valid_regulator(packet: GaussianPacket, ell: float) -> bool:
    """True when sigma << ell << L_sigma, with << read as a factor-5 separation."""
    return SEPARATION * packet.sigma <= ell <= focal_length(packet) / SEPARATION


def crescent_boundary(kappa: float, p2z_abs: float, n: int = 400) -> list[tuple[str, float, float]]:
    """Ordered boundary polyline of the allowed region as (arc, dPz, |P_perp|) triples.

    The ``outer`` arc is |P_perp| = sqrt(q) + kappa, the ``inner`` arc is
    |P_perp| = |sqrt(q) - kappa|, with q = 2|p2z| dPz - dPz^2 and dPz in
    [0, 2|p2z|].  Both arcs meet at (0, kappa) and (2|p2z|, kappa); the inner
    arc touches |P_perp| = 0 at dPz = |p2z| -+ sqrt(p2z^2 - kappa^2), and those
    points are always included.
    """
    if n < 2:
        raise DomainError(f"need at least 2 points per arc, got {n}")
    p = p2z_abs
    root = math.sqrt(max(p * p - kappa * kappa, 0.0))
    meet = kappa * kappa / (p + root)
    # dense near dPz = 0 where the physics lives, uniform in the angle elsewhere
    t = np.linspace(0.0, np.pi, n)
    grid = p * (1.0 - np.cos(t))
    special = np.array([0.0, meet, p, 2.0 * p - meet, 2.0 * p])
    # drop grid nodes that merely round-off duplicate a special point
    near = np.abs(grid[:, None] - special[None, :]).min(axis=1) <= 1e-12 * p
    grid = np.unique(np.concatenate([grid[~near], special]))
    sq = np.sqrt(np.clip(longitudinal_excess(grid, p), 0.0, None))
    # exact values at the touch points
    sq[np.isin(grid, [meet, 2.0 * p - meet])] = kappa
    rows = [("outer", float(d), float(s + kappa)) for d, s in zip(grid, sq)]
    rows += [("inner", float(d), float(abs(s - kappa))) for d, s in zip(grid, sq)]
    return rows
