"""Sliding mode control law and the Lyapunov monitor around it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import dynamics
from .dynamics import JointState, ManipulatorParams


class InsufficientSamples(ValueError):
    pass


class ControllerType(str, Enum):
    SMC = "smc"
    AFSMC = "afsmc"
    PD = "pd"


@dataclass(frozen=True)
class ControllerConfig:
    """Switching gains, slope policy and chattering knobs.

    ``type`` selects the slope source: ``afsmc`` uses the fuzzy tuner,
    ``smc`` the fixed diagonal ``lambda_fixed``, and ``pd`` drops the
    switching term and uses ``lambda_fixed`` as computed-torque PD poles.
    """

    type: ControllerType = ControllerType.AFSMC
    k: tuple[float, float, float] = (6000.0, 3000.0, 10000.0)
    lambda_fixed: tuple[float, float, float] = (14.0, 14.0, 14.0)
    boundary_layer: float = 1.0
    strict_paper: bool = False

    def __post_init__(self):
        object.__setattr__(self, "type", ControllerType(self.type))
        k = tuple(float(v) for v in self.k)
        lam = tuple(float(v) for v in self.lambda_fixed)
        if len(k) != 3 or not all(math.isfinite(v) and v > 0 for v in k):
            raise ValueError(f"k must be 3 positive finite gains, got {self.k}")
        if len(lam) != 3 or not all(math.isfinite(v) and v > 0 for v in lam):
            raise ValueError(f"lambda_fixed must be 3 positive finite values, got {self.lambda_fixed}")
        if not (math.isfinite(self.boundary_layer) and self.boundary_layer >= 0):
            raise ValueError(f"boundary_layer must be >= 0, got {self.boundary_layer}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "lambda_fixed", lam)

    @property
    def lambda_policy(self) -> str:
        return "fuzzy" if self.type is ControllerType.AFSMC else "fixed"


@dataclass(frozen=True)
class ReferencePoint:
    qd: np.ndarray
    qd_dot: np.ndarray = field(default_factory=lambda: np.zeros(3))
    qd_ddot: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        for name in ("qd", "qd_dot", "qd_ddot"):
            object.__setattr__(self, name, dynamics._vec3(getattr(self, name), name))


@dataclass(frozen=True)
class SlidingState:
    e: np.ndarray
    edot: np.ndarray
    s: np.ndarray
    lambda_used: np.ndarray


@dataclass(frozen=True)
class StabilityBounds:
    beta1: float
    beta2: float

    def __post_init__(self):
        if not (self.beta1 >= 0 and self.beta2 > 0):
            raise ValueError(f"bounds must be non-negative (beta1) and positive (beta2): {self}")


def tracking_errors(state: JointState, ref: ReferencePoint) -> tuple[np.ndarray, np.ndarray]:
    return ref.qd - state.q, ref.qd_dot - state.qdot


def sliding_surface(e, edot, lam) -> np.ndarray:
    return np.asarray(edot, dtype=float) + np.asarray(lam, dtype=float) @ np.asarray(e, dtype=float)


def sliding_state(e, edot, lam) -> SlidingState:
    lam = np.asarray(lam, dtype=float)
    return SlidingState(np.asarray(e, float), np.asarray(edot, float), sliding_surface(e, edot, lam), lam)


def switch_term(s, k, phi: float = 0.0) -> np.ndarray:
    """``k * sign(s)`` with sign(0) = 0, or a saturated ramp of width ``phi``."""
    s = np.asarray(s, dtype=float)
    k = np.asarray(k, dtype=float)
    if phi > 0:
        return k * np.clip(s / phi, -1.0, 1.0)
    return k * np.sign(s)


def select_lambda(cfg: ControllerConfig, fuzzy_configs, e, edot) -> np.ndarray:
    if cfg.lambda_policy == "fuzzy":
        from .fuzzy import lambda_matrix

        return lambda_matrix(fuzzy_configs, e, edot)
    return np.diag(cfg.lambda_fixed)


def control_torque(
    params: ManipulatorParams,
    state: JointState,
    ref: ReferencePoint,
    cfg: ControllerConfig,
    lambda_now,
) -> np.ndarray:
    """Model-based sliding mode torque.

    Default mode uses ``M (qd_ddot + lambda edot)`` as the equivalent
    control, which makes M sdot = -K sign(s) on the nominal model;
    ``strict_paper`` flips the sign of the ``lambda edot`` term.  Friction
    is not compensated.
    """
    lam = np.asarray(lambda_now, dtype=float)
    e, edot = tracking_errors(state, ref)
    terms = dynamics.compute_terms(params, state)
    vsq, vprod = dynamics.velocity_vectors(state)
    h = terms.velocity_term(vsq, vprod) + terms.d

    if cfg.type is ControllerType.PD:
        return terms.a @ (ref.qd_ddot + 2.0 * lam @ edot + lam @ lam @ e) + h

    sign = -1.0 if cfg.strict_paper else 1.0
    s = sliding_surface(e, edot, lam)
    return terms.a @ (ref.qd_ddot + sign * (lam @ edot)) + h + switch_term(s, cfg.k, cfg.boundary_layer)


def symmetric_part(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)


def lyapunov_value(m, s) -> float:
    """V = 1/2 s^T M_sym s."""
    s = np.asarray(s, dtype=float)
    return float(0.5 * s @ symmetric_part(m) @ s)


def spectral_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m, dtype=float), 2))


def gain_condition(k, s, m_norm: float, e_norm: float, bounds: StabilityBounds) -> bool:
    """Strict inequality sum K_i |s_i| > beta2 |s| |M| |e| + beta1 |s|^2 / 2."""
    s = np.asarray(s, dtype=float)
    s_norm = float(np.linalg.norm(s))
    lhs = float(np.sum(np.asarray(k, dtype=float) * np.abs(s)))
    rhs = bounds.beta2 * s_norm * m_norm * e_norm + 0.5 * bounds.beta1 * s_norm**2
    return lhs > rhs


def estimate_beta1(params: ManipulatorParams, states, dt: float, safety: float = 1.5) -> float:
    """Finite-difference bound on |dM/dt| over a window of consecutive states."""
    states = list(states)
    if len(states) < 2:
        raise InsufficientSamples(f"need at least 2 states, got {len(states)}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    mats = [dynamics.compute_terms(params, st).a for st in states]
    worst = max(spectral_norm((b - a) / dt) for a, b in zip(mats[:-1], mats[1:]))
    return safety * worst


def default_beta2(cfg: ControllerConfig, fuzzy_configs=None) -> float:
    """Largest slope the policy can produce."""
    if cfg.lambda_policy == "fuzzy":
        return max(float(fc.singletons.as_array().max()) for fc in fuzzy_configs)
    return max(cfg.lambda_fixed)
