"""scikit-learn compatible wrappers around the observables.

``TransverseKickEstimator`` maps impact parameters to the expectation value
of the final transverse momentum; ``ExactIntensityTransformer`` maps
(|P_perp|, dPz[, phi_P]) rows to the unregulated |I|^2.  Both follow the
usual estimator contract (constructor stores hyper-parameters verbatim,
``fit`` validates them and returns ``self``), so they work with ``clone``,
``get_params``/``set_params`` and ``Pipeline``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .amplitudes import i_squared_grid
from .kinematics import BesselBeam, GaussianPacket
from .observables import average_transverse_momentum, resolve_threads

__all__ = ["TransverseKickEstimator", "ExactIntensityTransformer"]


def _impact_vectors(X):
    X = check_array(X, dtype=float)
    if X.shape[1] == 1:
        return np.column_stack([X[:, 0], np.zeros(len(X))])
    if X.shape[1] == 2:
        return X
    raise ValueError(f"X must have 1 (|b| along x) or 2 (b vector) columns, got {X.shape[1]}")


class TransverseKickEstimator(BaseEstimator):
    """Predict <P_perp> of the final state for a batch of impact parameters.

    Parameters
    ----------
    m : int
        Winding number of the twisted beam.
    kappa : float
        Cone (transverse) momentum of the twisted beam.
    sigma : float
        Waist of the Gaussian packet.
    p1z, p2z : float
        Longitudinal momenta of the two beams (``p1z > 0 > p2z``).
    mass : float
        Mass of the packet particle.
    tol : float
        Relative convergence target of the transverse-plane quadrature.
    n_jobs : int or None
        Worker threads for ``predict``; ``None`` defers to SUPERKICK_THREADS
        or the CPU count.

    Attributes
    ----------
    beam_ : BesselBeam
    results_ : list of KickResult
        Diagnostics of the most recent ``predict`` call.
    """

    def __init__(self, m=1, kappa=1.0, sigma=0.1, p1z=1000.0, p2z=-1000.0, mass=0.0,
                 tol=1e-6, n_jobs=None):
        self.m = m
        self.kappa = kappa
        self.sigma = sigma
        self.p1z = p1z
        self.p2z = p2z
        self.mass = mass
        self.tol = tol
        self.n_jobs = n_jobs

    def _packet(self, b):
        return GaussianPacket(self.p2z, self.sigma, tuple(b), self.mass)

    def fit(self, X=None, y=None):
        self.beam_ = BesselBeam(self.p1z, self.kappa, self.m)
        self._packet((0.0, 0.0))
        if X is not None:
            self.n_features_in_ = _impact_vectors(X).shape[1]
        return self

    def predict(self, X):
        """Return an ``(n_samples, 2)`` array of <P_perp> vectors."""
        check_is_fitted(self, "beam_")
        B = _impact_vectors(X)
        packets = [self._packet(b) for b in B]

        def run(pk):
            return average_transverse_momentum(self.beam_, pk, self.tol)

        workers = resolve_threads(self.n_jobs)
        if workers == 1 or len(packets) <= 1:
            self.results_ = [run(pk) for pk in packets]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                self.results_ = list(pool.map(run, packets))
        return np.array([r.P_avg for r in self.results_])

    def semiclassical(self, X):
        """Point-probe expectation (m/|b|) e_perp(b) for the same inputs; NaN at b = 0."""
        check_is_fitted(self, "beam_")
        B = _impact_vectors(X)
        out = np.full(B.shape, np.nan)
        r = np.hypot(B[:, 0], B[:, 1])
        nz = r > 0
        out[nz, 0] = -self.m * B[nz, 1] / r[nz] ** 2
        out[nz, 1] = self.m * B[nz, 0] / r[nz] ** 2
        return out


class ExactIntensityTransformer(TransformerMixin, BaseEstimator):
    """Transform (|P_perp|, dPz[, phi_P]) rows into the unregulated |I|^2.

    Without a third column the azimuth of P_perp defaults to ``phi_P``.
    Values on the crescent boundary diverge; ``ceiling`` clamps them.
    """

    def __init__(self, m=2, kappa=1.0, sigma=0.5, b=0.1, phi_b=0.0, p1z=10.0, p2z=-10.0,
                 phi_P=0.5 * math.pi, ceiling=None):
        self.m = m
        self.kappa = kappa
        self.sigma = sigma
        self.b = b
        self.phi_b = phi_b
        self.p1z = p1z
        self.p2z = p2z
        self.phi_P = phi_P
        self.ceiling = ceiling

    def fit(self, X=None, y=None):
        self.beam_ = BesselBeam(self.p1z, self.kappa, self.m)
        self.packet_ = GaussianPacket(
            self.p2z, self.sigma, (self.b * math.cos(self.phi_b), self.b * math.sin(self.phi_b)))
        if X is not None:
            self.n_features_in_ = check_array(X, dtype=float).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "beam_")
        X = check_array(X, dtype=float)
        if X.shape[1] not in (2, 3):
            raise ValueError(f"X must have 2 or 3 columns, got {X.shape[1]}")
        phi = X[:, 2] if X.shape[1] == 3 else self.phi_P
        values, _ = i_squared_grid(X[:, 0], X[:, 1], phi, self.beam_, self.packet_)
        if self.ceiling is not None:
            values = np.minimum(values, self.ceiling)
        return values[:, None]
