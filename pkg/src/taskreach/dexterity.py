"""Dexterity metrics: manipulability, kinematic isotropy, and the
joint-limit-weighted variant used to score IK solutions.

Isotropy-style values are the ratio of the geometric to the arithmetic mean of
the eigenvalues of J J^T (or J T J^T), so they live in [0, 1] and compare
across arms of different scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import CONTINUOUS, KinematicChain

ETA_DEFAULT = 0.5     # halves the isotropy value exactly at a joint limit
ZETA_DEFAULT = 1.0 / 20.0


@dataclass(frozen=True)
class DexterityParams:
    eta: float = ETA_DEFAULT
    zeta: float = ZETA_DEFAULT
    order_a: int = 6

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must be in (0, 1)")
        if self.zeta <= 0.0:
            raise ValueError("zeta must be positive")
        if self.order_a not in (3, 6):
            raise ValueError("order must be 3 or 6")


def _psd_eigenvalues(M: np.ndarray) -> np.ndarray:
    # eigendecomposition of the symmetric product; safer than a raw
    # determinant for near-singular Jacobians
    lam = np.linalg.eigvalsh(0.5 * (M + M.T))
    return np.maximum(lam, 0.0)


def manipulability(J: np.ndarray) -> float:
    """sqrt(det(J J^T)); zero at singular configurations."""
    J = np.asarray(J, dtype=np.float64)
    lam = _psd_eigenvalues(J @ J.T)
    return float(np.sqrt(np.prod(lam)))


def kinematic_isotropy(J: np.ndarray, a: int | None = None) -> float:
    """det(J J^T)^(1/a) / (trace(J J^T)/a), in [0, 1]; 1 means isotropic."""
    J = np.asarray(J, dtype=np.float64)
    if a is None:
        a = J.shape[0]
    lam = _psd_eigenvalues(J @ J.T)
    tr = float(np.sum(lam))
    if tr <= 0.0:
        return 0.0
    val = float(np.prod(lam)) ** (1.0 / a) / (tr / a)
    return float(min(max(val, 0.0), 1.0))


def joint_limit_weights(
    q, chain: KinematicChain, params: DexterityParams = DexterityParams(),
    *, literal_form: bool = False,
) -> np.ndarray:
    """Diagonal of the joint-limit weighting matrix T.

    Each t_i ramps from 1 - eta^(1/zeta + 1) at the range midpoint down to
    1 - eta at either limit; continuous joints get t_i = 1. The published
    penalty formula and the distance-to-nearest-limit reading coincide; both
    are kept here and checked against each other in the tests.
    """
    q = np.asarray(q, dtype=np.float64)
    t = np.ones(chain.n)
    for i, joint in enumerate(chain.joints):
        if joint.type == CONTINUOUS:
            continue
        qr = 0.5 * (joint.q_max - joint.q_min)
        if literal_form:
            kappa = (qr - abs(qr - (q[i] - joint.q_min))) / (params.zeta * qr) + 1.0
        else:
            dist = min(q[i] - joint.q_min, joint.q_max - q[i])
            kappa = dist / (params.zeta * qr) + 1.0
        t[i] = 1.0 - params.eta ** kappa
    return t


def jlwki(J: np.ndarray, t: np.ndarray, a: int | None = None) -> float:
    """Joint-limit-weighted kinematic isotropy of J with diagonal weights t."""
    J = np.asarray(J, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if a is None:
        a = J.shape[0]
    lam = _psd_eigenvalues((J * t) @ J.T)
    tr = float(np.sum(lam))
    if tr <= 0.0:
        return 0.0
    val = float(np.prod(lam)) ** (1.0 / a) / (tr / a)
    return float(min(max(val, 0.0), 1.0))
