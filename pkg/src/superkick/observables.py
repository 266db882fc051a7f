"""Average transverse momentum of the final state and parameter scans.

``average_transverse_momentum`` is the production observable: the ratio of
first to zeroth moment of |J|^2 over the transverse plane, computed with
Gauss-Legendre in |P_perp| and the trapezoid rule in its azimuth.  The
closed forms are only valid for sigma << b, 1/kappa and serve as limits.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .amplitudes import i_squared_grid, j_integral_grid
from .exceptions import DomainError
from .kinematics import BesselBeam, GaussianPacket
from .specfun import bessel_j

__all__ = [
    "KickResult",
    "ScanRow",
    "ScanResult",
    "average_transverse_momentum",
    "superkick_limit",
    "denom_closed_form",
    "num_closed_form",
    "closed_form_valid",
    "scan_kick_vs_b",
    "heatmap_i_squared",
    "resolve_threads",
]

RADIAL_WIDTHS = 8.0
MIN_TOL = 1.0e-8
_START_NODES = (32, 32)
_MAX_NODES = 1024


@dataclass(frozen=True)
class KickResult:
    P_avg: tuple
    P_semiclassical: float
    denom: float
    radial_nodes: int
    azimuthal_nodes: int
    phi1_nodes: int
    rel_change: float
    converged: bool

    @property
    def magnitude(self) -> float:
        return math.hypot(*self.P_avg)


@dataclass(frozen=True)
class ScanRow:
    m: int
    kappa: float
    sigma: float
    b: float
    Px: float
    Py: float
    P_semiclassical: float
    converged: bool
    rel_change: float = 0.0

    @property
    def kb(self) -> float:
        return self.kappa * self.b

    @property
    def pt_over_kappa(self) -> float:
        return math.hypot(self.Px, self.Py) / self.kappa


@dataclass
class ScanResult:
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def select(self, sigma: float) -> list:
        return [r for r in self.rows if r.sigma == sigma]


def superkick_limit(beam: BesselBeam, b: float) -> float:
    """Point-probe transverse momentum m/b (directed perpendicular to b)."""
    if b == 0:
        raise DomainError("superkick limit m/b is undefined at b = 0")
    return beam.m / b


def closed_form_valid(beam: BesselBeam, packet: GaussianPacket) -> bool:
    """Regime where the small-sigma closed forms are advertised: sigma*kappa <= 0.05, sigma <= b/5."""
    return beam.kappa * packet.sigma <= 0.05 and packet.sigma <= packet.b_mag / 5.0


def denom_closed_form(beam: BesselBeam, packet: GaussianPacket) -> tuple[float, bool]:
    """Small-sigma limit of the |J|^2 norm, (pi/sigma^2) J_m(kappa b)^2, and its validity flag."""
    jm = bessel_j(beam.m, beam.kappa * packet.b_mag)
    return math.pi / packet.sigma**2 * jm * jm, closed_form_valid(beam, packet)


def num_closed_form(beam: BesselBeam, packet: GaussianPacket) -> tuple[np.ndarray, bool]:
    """Small-sigma limit of the first moment, (pi/sigma^2)(m/b) J_m(kappa b)^2 along e_perp(b)."""
    den, ok = denom_closed_form(beam, packet)
    phi = packet.phi_b + 0.5 * math.pi
    mag = den * superkick_limit(beam, packet.b_mag)
    return np.array([mag * math.cos(phi), mag * math.sin(phi)]), ok


def _moments(beam, packet, nr, nphi):
    R = beam.kappa + RADIAL_WIDTHS / packet.sigma
    x, w = leggauss(nr)
    r = 0.5 * R * (x + 1.0)
    wr = 0.5 * R * w
    phi = (2.0 * np.pi / nphi) * np.arange(nphi)
    rr, pp = np.meshgrid(r, phi, indexing="ij")
    Px, Py = rr * np.cos(pp), rr * np.sin(pp)
    J, n1, ok = j_integral_grid(Px, Py, beam, packet)
    weight = np.abs(J) ** 2 * (rr * wr[:, None]) * (2.0 * np.pi / nphi)
    den = float(weight.sum())
    num = np.array([(weight * Px).sum(), (weight * Py).sum()])
    return den, num, n1, ok


def average_transverse_momentum(beam: BesselBeam, packet: GaussianPacket, tol: float = 1.0e-6) -> KickResult:
    """Expectation value of the final transverse momentum.

    Radial Gauss-Legendre on ``[0, kappa + 8/sigma]`` and a uniform azimuthal
    trapezoid grid are doubled together until the vector result (relative to
    ``max(|<P>|, 1e-3 kappa)``) and the norm both change by less than ``tol``.

    Raises
    ------
    DomainError
        If ``tol < 1e-8``.
    """
    if not tol >= MIN_TOL:
        raise DomainError(f"tol must be >= {MIN_TOL:g}, got {tol}")
    floor = 1.0e-3 * beam.kappa
    nr, nphi = _START_NODES
    den, num, n1, ok = _moments(beam, packet, nr, nphi)
    P = num / den if den > 0 else np.zeros(2)
    change = math.inf
    while nr < _MAX_NODES:
        nr, nphi = 2 * nr, 2 * nphi
        den2, num2, n1, ok2 = _moments(beam, packet, nr, nphi)
        P2 = num2 / den2 if den2 > 0 else np.zeros(2)
        change = max(float(np.hypot(*(P2 - P))) / max(float(np.hypot(*P2)), floor),
                     abs(den2 - den) / den2 if den2 > 0 else 0.0)
        den, P, ok = den2, P2, ok2
        if change < tol:
            break
    converged = bool(ok and change < tol and den > 0)
    b = packet.b_mag
    semi = beam.m / b if b > 0 else math.nan
    return KickResult((float(P[0]), float(P[1])), semi, den, nr, nphi, n1, change, converged)


def resolve_threads(hint: int | None = None) -> int:
    """Worker count: SUPERKICK_THREADS, else the hint, else all available CPUs."""
    env = os.environ.get("SUPERKICK_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise DomainError(f"SUPERKICK_THREADS must be an integer, got {env!r}") from exc
    if hint:
        return max(1, int(hint))
    return os.cpu_count() or 1


def scan_kick_vs_b(beam: BesselBeam, packet: GaussianPacket, sigma_list, b_grid,
                   tol: float = 1.0e-6, threads: int | None = None) -> ScanResult:
    """<P_perp> over a (sigma, b) grid; the packet supplies p2z, mass and the direction of b.

    Points run concurrently but rows are assembled in (sigma, b) order, so the
    result does not depend on the worker count.  A failing point is recorded
    as a non-converged row instead of aborting the scan.
    """
    phi_b = packet.phi_b if packet.b_mag > 0 else 0.0
    ub = (math.cos(phi_b), math.sin(phi_b))
    tasks = [(float(s), float(b)) for s in sorted(sigma_list) for b in sorted(b_grid)]

    def run(task):
        s, b = task
        try:
            pk = GaussianPacket(packet.p2z, s, (b * ub[0], b * ub[1]), packet.mass)
            res = average_transverse_momentum(beam, pk, tol)
            return ScanRow(beam.m, beam.kappa, s, b, *res.P_avg, res.P_semiclassical,
                           res.converged, res.rel_change)
        except (DomainError, ArithmeticError):
            return ScanRow(beam.m, beam.kappa, s, b, math.nan, math.nan,
                           beam.m / b if b else math.nan, False, math.nan)

    workers = resolve_threads(threads)
    if workers == 1 or len(tasks) <= 1:
        rows = [run(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, tasks))
    return ScanResult(rows)


def heatmap_i_squared(beam: BesselBeam, packet: GaussianPacket, pt_grid, dpz_grid,
                      phi_P: float = 0.5 * math.pi, ceiling: float | None = None):
    """|I|^2 on a (|P_perp|, dPz) grid at fixed azimuth of P_perp.

    Returns ``(values, boundary)`` arrays of shape ``(len(pt_grid), len(dpz_grid))``.
    Cells outside the crescent are exactly 0; ``ceiling`` clamps the
    divergent boundary values for display.
    """
    pt = np.asarray(pt_grid, dtype=float)
    dpz = np.asarray(dpz_grid, dtype=float)
    if pt.ndim != 1 or dpz.ndim != 1 or pt.size == 0 or dpz.size == 0:
        raise DomainError("heatmap grids must be non-empty 1-D arrays")
    if not (np.all(np.isfinite(pt)) and np.all(np.isfinite(dpz))):
        raise DomainError("heatmap grids must be finite")
    values, boundary = i_squared_grid(pt[:, None], dpz[None, :], phi_P, beam, packet)
    if ceiling is not None:
        values = np.minimum(values, ceiling)
    return values, boundary
