"""Equations of motion of the 3-DOF cylindrical manipulator.

Joint 1 is revolute (theta1, rad); joints 2 and 3 are prismatic (m).
The model is written in the coefficient form

    A(q) qddot + B(q) [qdot**2] + C(q) [qdot_i qdot_j] + D = tau - f_ext

and the coefficients are implemented exactly as published, including
entries that look inconsistent (A11 vs B11) and the asymmetric A13/A31
pair.  Controller-facing quantities map as M := A, C(q, qdot) qdot :=
B @ vsq + C @ vprod and G := D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SINGULAR_DET_TOL = 1e-9


class SingularInertia(ArithmeticError):
    """Raised when |det A| drops below the configured tolerance."""

    def __init__(self, det: float, q: np.ndarray, t: float | None = None):
        self.det = det
        self.q = np.array(q, dtype=float)
        self.t = t
        where = "" if t is None else f" at t={t:.6g}"
        super().__init__(f"inertia matrix singular{where}: det={det:.3e}, q={self.q.tolist()}")


def _vec3(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"{name} must have 3 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {arr.tolist()}")
    return arr


@dataclass(frozen=True)
class ManipulatorParams:
    m1: float = 36.367405
    m2: float = 12.632222
    m3: float = 23.735183
    i3: float = 1.0
    g: float = 9.8
    # viscous friction per joint; zero reproduces the published model
    viscous: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        for name in ("m1", "m2", "m3", "i3", "g"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be strictly positive and finite, got {v}")
        visc = tuple(float(v) for v in self.viscous)
        if len(visc) != 3 or not all(math.isfinite(v) and v >= 0 for v in visc):
            raise ValueError(f"viscous must be 3 non-negative finite values, got {self.viscous}")
        object.__setattr__(self, "viscous", visc)


@dataclass(frozen=True, eq=False)
class JointState:
    q: np.ndarray
    qdot: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "q", _vec3(self.q, "q"))
        object.__setattr__(self, "qdot", _vec3(self.qdot, "qdot"))

    def __eq__(self, other):
        if not isinstance(other, JointState):
            return NotImplemented
        return bool(np.array_equal(self.q, other.q) and np.array_equal(self.qdot, other.qdot))

    __hash__ = None


@dataclass(frozen=True)
class DynamicsTerms:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def velocity_term(self, vsq: np.ndarray, vprod: np.ndarray) -> np.ndarray:
        """Combined Coriolis/centripetal force B @ vsq + C @ vprod."""
        return self.b @ vsq + self.c @ vprod


@dataclass(frozen=True)
class GeneralizedForces:
    tau: np.ndarray
    f_ext: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "tau", _vec3(self.tau, "tau"))
        object.__setattr__(self, "f_ext", _vec3(self.f_ext, "f_ext"))


def terms_from_config(params: ManipulatorParams, theta1: float, q3: float) -> DynamicsTerms:
    """Coefficient matrices at joint angle ``theta1`` and extension ``q3``.

    Only theta1 and q3 enter the published coefficients.
    """
    m1, m2, m3 = params.m1, params.m2, params.m3
    s, c = math.sin(theta1), math.cos(theta1)
    sc = s * c

    a = np.zeros((3, 3))
    a[0, 0] = (4.0 * m1 * s - 4.0 * m2 * c) * q3 + params.i3
    a[0, 2] = (m1 + m2) * sc * q3
    a[1, 1] = m3
    a[2, 0] = m1 * sc
    a[2, 2] = 2.0 * (m1 * s + m2 * c)

    b = np.zeros((3, 3))
    b[0, 0] = (m1 * s - 4.0 * m2 * c) * q3
    b[0, 2] = -m1 * c + m2 * s
    b[2, 0] = 2.0 * q3 * (m1 * s - m2 * c)

    cm = np.zeros((3, 3))
    cm[0, 1] = -(m1 + m2) * sc * q3
    cm[2, 1] = -(m1 + m2) * sc

    d = np.array([0.0, params.g * (m2 + m3), 0.0])
    return DynamicsTerms(a, b, cm, d)


def compute_terms(params: ManipulatorParams, state: JointState) -> DynamicsTerms:
    return terms_from_config(params, state.q[0], state.q[2])


def velocity_vectors(state: JointState) -> tuple[np.ndarray, np.ndarray]:
    """Squared velocities and pairwise velocity products (12, 13, 23)."""
    return _velocity_vectors(state.qdot)


def _velocity_vectors(qdot: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v1, v2, v3 = qdot
    return np.array([v1 * v1, v2 * v2, v3 * v3]), np.array([v1 * v2, v1 * v3, v2 * v3])


def bias_forces(params: ManipulatorParams, terms: DynamicsTerms, qdot: np.ndarray) -> np.ndarray:
    """Every non-inertial term on the left-hand side: velocity, friction, gravity."""
    vsq, vprod = _velocity_vectors(qdot)
    return terms.velocity_term(vsq, vprod) + np.asarray(params.viscous) * qdot + terms.d


def det3(a: np.ndarray) -> float:
    (a00, a01, a02), (a10, a11, a12), (a20, a21, a22) = a.tolist()
    return a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) + a02 * (a10 * a21 - a11 * a20)


def solve3(a: np.ndarray, b: np.ndarray, det: float) -> np.ndarray:
    """Cramer's rule; cheaper than a LAPACK call at this size."""
    (a00, a01, a02), (a10, a11, a12), (a20, a21, a22) = a.tolist()
    b0, b1, b2 = b.tolist()
    x0 = b0 * (a11 * a22 - a12 * a21) - a01 * (b1 * a22 - a12 * b2) + a02 * (b1 * a21 - a11 * b2)
    x1 = a00 * (b1 * a22 - a12 * b2) - b0 * (a10 * a22 - a12 * a20) + a02 * (a10 * b2 - b1 * a20)
    x2 = a00 * (a11 * b2 - b1 * a21) - a01 * (a10 * b2 - b1 * a20) + b0 * (a10 * a21 - a11 * a20)
    return np.array([x0, x1, x2]) / det


def accelerations(
    params: ManipulatorParams,
    q: np.ndarray,
    qdot: np.ndarray,
    tau: np.ndarray,
    f_ext: np.ndarray,
    det_tol: float = SINGULAR_DET_TOL,
) -> np.ndarray:
    """Scalar forward-dynamics kernel for the integrator hot loop.

    Uses the published sparsity directly: q2 decouples and (theta1, q3)
    form a 2x2 block, so det A = m3 (a11 a33 - a13 a31).
    """
    m1, m2, m3 = params.m1, params.m2, params.m3
    th, _, q3 = q.tolist()
    # velocity products are ordered (12, 13, 23); both C entries sit on 13
    v1, v2, v3 = qdot.tolist()
    t1, t2, t3 = tau.tolist()
    f1, f2, f3 = f_ext.tolist()
    k1, k2, k3 = params.viscous
    s, c = math.sin(th), math.cos(th)
    sc = s * c

    a11 = (4.0 * m1 * s - 4.0 * m2 * c) * q3 + params.i3
    a13 = (m1 + m2) * sc * q3
    a31 = m1 * sc
    a33 = 2.0 * (m1 * s + m2 * c)
    block = a11 * a33 - a13 * a31
    det = m3 * block
    if abs(det) < det_tol:
        raise SingularInertia(det, q)

    r1 = t1 - f1 - ((m1 * s - 4.0 * m2 * c) * q3 * v1 * v1 + (-m1 * c + m2 * s) * v3 * v3 - (m1 + m2) * sc * q3 * v1 * v3 + k1 * v1)
    r2 = t2 - f2 - (k2 * v2 + params.g * (m2 + m3))
    r3 = t3 - f3 - (2.0 * q3 * (m1 * s - m2 * c) * v1 * v1 - (m1 + m2) * sc * v1 * v3 + k3 * v3)
    return np.array([(r1 * a33 - a13 * r3) / block, r2 / m3, (a11 * r3 - a31 * r1) / block])


def forward_dynamics(
    params: ManipulatorParams,
    state: JointState,
    forces: GeneralizedForces,
    det_tol: float = SINGULAR_DET_TOL,
) -> np.ndarray:
    """Joint accelerations produced by ``forces`` at ``state``.

    Raises SingularInertia when |det A| < ``det_tol``.
    """
    return accelerations(params, state.q, state.qdot, forces.tau, forces.f_ext, det_tol)


def inverse_dynamics(params: ManipulatorParams, state: JointState, qddot) -> GeneralizedForces:
    """Torque that realizes ``qddot`` at ``state`` with no disturbance."""
    qddot = _vec3(qddot, "qddot")
    terms = compute_terms(params, state)
    tau = terms.a @ qddot + bias_forces(params, terms, state.qdot)
    return GeneralizedForces(tau)
