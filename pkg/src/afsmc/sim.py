"""Closed-loop simulation, reference/disturbance generators and tracking metrics."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np

from . import control, dynamics, fuzzy
from .control import ControllerConfig, ReferencePoint
from .dynamics import JointState, ManipulatorParams

DIVERGENCE_LIMIT = 1e6

PAPER_SETPOINT = (math.pi / 3, math.pi / 2, math.pi)
PAPER_INITIAL_Q = (0.01, 0.01, 0.01)


class Diverged(RuntimeError):
    """State left the divergence box; ``trace`` holds the samples recorded so far."""

    def __init__(self, message: str, t: float, trace: "SimTrace | None" = None):
        super().__init__(message)
        self.t = t
        self.trace = trace


class EmptyTrace(ValueError):
    pass


class TrajectoryKind(str, Enum):
    CONSTANT = "constant"
    SINUSOIDAL = "sinusoidal"


class DisturbanceKind(str, Enum):
    NONE = "none"
    CONSTANT = "constant"
    SINUSOIDAL = "sinusoidal"
    RANDOM = "random"


def _tuple3(x, name):
    return tuple(float(v) for v in dynamics._vec3(x, name))


@dataclass(frozen=True)
class TrajectorySpec:
    """Desired joint motion with exact analytic derivatives.

    ``constant`` holds ``setpoint``; ``sinusoidal`` follows
    ``offset + amplitude * sin(omega * t + phase)`` per joint.
    """

    kind: TrajectoryKind = TrajectoryKind.CONSTANT
    setpoint: tuple[float, float, float] = PAPER_SETPOINT
    amplitude: tuple[float, float, float] = (0.0, 0.0, 0.0)
    omega: tuple[float, float, float] = (0.0, 0.0, 0.0)
    phase: tuple[float, float, float] = (0.0, 0.0, 0.0)
    offset: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "kind", TrajectoryKind(self.kind))
        for name in ("setpoint", "amplitude", "omega", "phase", "offset"):
            object.__setattr__(self, name, _tuple3(getattr(self, name), name))


@dataclass(frozen=True)
class DisturbanceSpec:
    """External force generator.

    ``random`` draws independent uniform values in [-amplitude, amplitude]
    held for ``hold`` seconds; each hold interval has its own seeded
    stream, so the value depends only on (spec, t).
    """

    kind: DisturbanceKind = DisturbanceKind.NONE
    amplitude: tuple[float, float, float] = (0.0, 0.0, 0.0)
    frequency: float = 0.0
    phase: float = 0.0
    seed: int = 0
    hold: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "kind", DisturbanceKind(self.kind))
        object.__setattr__(self, "amplitude", _tuple3(self.amplitude, "amplitude"))
        if not self.hold > 0:
            raise ValueError(f"hold must be positive, got {self.hold}")


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.001
    duration: float = 5.0
    initial: JointState = field(default_factory=lambda: JointState(PAPER_INITIAL_Q, (0.0, 0.0, 0.0)))
    trajectory: TrajectorySpec = field(default_factory=TrajectorySpec)
    disturbance: DisturbanceSpec = field(default_factory=DisturbanceSpec)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    fuzzy: tuple[fuzzy.FuzzyConfig, ...] = field(default_factory=fuzzy.default_fuzzy_configs)
    plant: ManipulatorParams = field(default_factory=ManipulatorParams)
    det_tol: float = dynamics.SINGULAR_DET_TOL

    def __post_init__(self):
        if not self.det_tol >= 0:
            raise ValueError(f"det_tol must be non-negative, got {self.det_tol}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (math.isfinite(self.duration) and self.duration > self.dt):
            raise ValueError(f"duration must exceed dt, got {self.duration}")
        if len(self.fuzzy) != 3:
            raise ValueError("one fuzzy configuration per joint is required")
        object.__setattr__(self, "fuzzy", tuple(self.fuzzy))

    @property
    def n_samples(self) -> int:
        # guard against duration/dt landing just below an integer
        return int(math.floor(self.duration / self.dt + 1e-9)) + 1

    def with_updates(self, **changes) -> "SimConfig":
        return replace(self, **changes)


@dataclass
class SimTrace:
    t: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    qd: np.ndarray
    qd_dot: np.ndarray
    e: np.ndarray
    edot: np.ndarray
    s: np.ndarray
    tau: np.ndarray
    lam: np.ndarray
    V: np.ndarray
    config_hash: str = ""
    wall_time: float = 0.0

    def __len__(self) -> int:
        return len(self.t)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    def truncated(self, n: int) -> "SimTrace":
        arrays = {k: getattr(self, k)[:n] for k in TRACE_ARRAYS}
        return SimTrace(**arrays, config_hash=self.config_hash, wall_time=self.wall_time)

    def rows(self) -> np.ndarray:
        """Samples in the CSV column order (20 columns)."""
        return np.column_stack([self.t, self.q, self.qd, self.e, self.s, self.tau, self.lam, self.V])


TRACE_ARRAYS = ("t", "q", "qdot", "qd", "qd_dot", "e", "edot", "s", "tau", "lam", "V")
TRACE_COLUMNS = (
    "t",
    "q1", "q2", "q3",
    "qd1", "qd2", "qd3",
    "e1", "e2", "e3",
    "s1", "s2", "s3",
    "tau1", "tau2", "tau3",
    "lam1", "lam2", "lam3",
    "V",
)


def reference_at(spec: TrajectorySpec, t: float) -> ReferencePoint:
    if spec.kind is TrajectoryKind.CONSTANT:
        return ReferencePoint(np.array(spec.setpoint))
    a, w = np.array(spec.amplitude), np.array(spec.omega)
    arg = w * t + np.array(spec.phase)
    sin, cos = np.sin(arg), np.cos(arg)
    return ReferencePoint(np.array(spec.offset) + a * sin, a * w * cos, -a * w * w * sin)


@lru_cache(maxsize=4096)
def _random_block(seed: int, index: int) -> np.ndarray:
    rng = np.random.default_rng([seed, index])
    return rng.uniform(-1.0, 1.0, size=3)


def disturbance_at(spec: DisturbanceSpec, t: float) -> np.ndarray:
    amp = np.array(spec.amplitude)
    if spec.kind is DisturbanceKind.NONE:
        return np.zeros(3)
    if spec.kind is DisturbanceKind.CONSTANT:
        return amp.copy()
    if spec.kind is DisturbanceKind.SINUSOIDAL:
        return amp * math.sin(spec.frequency * t + spec.phase)
    index = int(math.floor(t / spec.hold + 1e-9))
    return amp * _random_block(int(spec.seed), index)


def rk4_step(f: Callable[[float, np.ndarray], np.ndarray], t: float, y: np.ndarray, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step."""
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass(frozen=True)
class ControllerOutput:
    tau: np.ndarray
    lam: np.ndarray
    e: np.ndarray
    edot: np.ndarray
    s: np.ndarray


def controller_output(config: SimConfig, state: JointState, ref: ReferencePoint) -> ControllerOutput:
    e, edot = control.tracking_errors(state, ref)
    lam = control.select_lambda(config.controller, config.fuzzy, e, edot)
    tau = control.control_torque(config.plant, state, ref, config.controller, lam)
    return ControllerOutput(tau, lam, e, edot, control.sliding_surface(e, edot, lam))


def plant_step(config: SimConfig, state: JointState, tau: np.ndarray, t: float) -> JointState:
    """Advance the plant one step with ``tau`` held over the whole step."""
    params, dist = config.plant, config.disturbance

    def field_(tt, y):
        q, qdot = y[:3], y[3:]
        qddot = dynamics.accelerations(params, q, qdot, tau, disturbance_at(dist, tt), config.det_tol)
        return np.concatenate([qdot, qddot])

    try:
        y = rk4_step(field_, t, np.concatenate([state.q, state.qdot]), config.dt)
    except dynamics.SingularInertia as exc:
        raise dynamics.SingularInertia(exc.det, exc.q, t) from None
    if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > DIVERGENCE_LIMIT:
        raise Diverged(f"state left |x| <= {DIVERGENCE_LIMIT:g} at t={t + config.dt:.6g}", t + config.dt)
    return JointState(y[:3], y[3:])


def step(config: SimConfig, state: JointState, t: float) -> JointState:
    """Compute the control torque at ``t`` and integrate one step under zero-order hold."""
    ref = reference_at(config.trajectory, t)
    out = controller_output(config, state, ref)
    return plant_step(config, state, out.tau, t)


TorqueFn = Callable[[float, JointState, ReferencePoint], np.ndarray]


def run(config: SimConfig, torque_fn: TorqueFn | None = None) -> SimTrace:
    """Simulate the full horizon.

    ``torque_fn`` replaces the configured controller's torque (the logged
    e, s, lambda and V still come from the configured controller).
    """
    start = time.perf_counter()
    n = config.n_samples
    dt = config.dt
    buf = {k: np.zeros((n, 3)) for k in TRACE_ARRAYS if k not in ("t", "V")}
    t_arr = dt * np.arange(n)
    v_arr = np.zeros(n)
    state = config.initial

    def partial(count):
        trace = SimTrace(t_arr, **buf, V=v_arr).truncated(count)
        trace.wall_time = time.perf_counter() - start
        return trace

    for k in range(n):
        t = t_arr[k]
        ref = reference_at(config.trajectory, t)
        out = controller_output(config, state, ref)
        tau = out.tau if torque_fn is None else np.asarray(torque_fn(t, state, ref), dtype=float)
        a = dynamics.compute_terms(config.plant, state).a
        buf["q"][k], buf["qdot"][k] = state.q, state.qdot
        buf["qd"][k], buf["qd_dot"][k] = ref.qd, ref.qd_dot
        buf["e"][k], buf["edot"][k], buf["s"][k] = out.e, out.edot, out.s
        buf["tau"][k], buf["lam"][k] = tau, np.diag(out.lam)
        v_arr[k] = control.lyapunov_value(a, out.s)
        if k == n - 1:
            break
        try:
            state = plant_step(config, state, tau, t)
        except Diverged as exc:
            exc.trace = partial(k + 1)
            raise
        except dynamics.SingularInertia as exc:
            exc.trace = partial(k + 1)
            raise

    trace = partial(n)
    trace.config_hash = config_hash(config)
    return trace


def config_hash(config: SimConfig) -> str:
    import hashlib
    import json

    from .scenario import config_to_dict

    blob = json.dumps(config_to_dict(config), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class Metrics:
    """Per-joint tracking metrics; ``settling_time`` entries are None when not settled."""

    settling_time: tuple[float | None, float | None, float | None]
    overshoot: np.ndarray
    ise: np.ndarray
    iae: np.ndarray
    steady_state_error: np.ndarray
    chattering: np.ndarray
    max_abs_tau: np.ndarray

    @property
    def total_ise(self) -> float:
        return float(self.ise.sum())

    def as_rows(self) -> list[dict]:
        rows = []
        for j in range(3):
            rows.append(
                {
                    "joint": j + 1,
                    "settling_time": self.settling_time[j],
                    "overshoot": float(self.overshoot[j]),
                    "ise": float(self.ise[j]),
                    "iae": float(self.iae[j]),
                    "steady_state_error": float(self.steady_state_error[j]),
                    "chattering": float(self.chattering[j]),
                    "max_abs_tau": float(self.max_abs_tau[j]),
                }
            )
        return rows


METRIC_NAMES = ("settling_time", "overshoot", "ise", "iae", "steady_state_error", "chattering", "max_abs_tau")


def settling_times(t: np.ndarray, e: np.ndarray, band: float = 0.02) -> tuple:
    out = []
    for j in range(e.shape[1]):
        mag = np.abs(e[:, j])
        outside = np.nonzero(mag > band * mag[0])[0]
        if outside.size == 0:
            out.append(float(t[0]))
        elif outside[-1] == len(t) - 1:
            out.append(None)
        else:
            out.append(float(t[outside[-1] + 1]))
    return tuple(out)


def compute_metrics(trace: SimTrace, band: float = 0.02, steady_fraction: float = 0.1) -> Metrics:
    if len(trace) == 0:
        raise EmptyTrace("cannot compute metrics of an empty trace")
    t, e, tau = trace.t, trace.e, trace.tau
    e0 = e[0]
    mag0 = np.abs(e0)
    with np.errstate(divide="ignore", invalid="ignore"):
        crossing = np.maximum(0.0, -e * np.sign(e0)).max(axis=0)
        overshoot = np.where(mag0 > 0, crossing / np.where(mag0 > 0, mag0, 1.0), 0.0)
    if len(t) > 1:
        ise = np.trapezoid(e**2, t, axis=0)
        iae = np.trapezoid(np.abs(e), t, axis=0)
        chattering = np.abs(np.diff(tau, axis=0)).sum(axis=0)
    else:
        ise = iae = chattering = np.zeros(3)
    tail = max(1, int(round(steady_fraction * len(t))))
    return Metrics(
        settling_time=settling_times(t, e, band),
        overshoot=overshoot,
        ise=ise,
        iae=iae,
        steady_state_error=np.abs(e[-tail:]).mean(axis=0),
        chattering=chattering,
        max_abs_tau=np.abs(tau).max(axis=0),
    )


def _ratio(a, b) -> float:
    # identical values (including both "not settled") compare as 1
    if a == b:
        return 1.0
    if a is None or b is None:
        return float("nan")
    if b == 0:
        return float("inf")
    return float(a) / float(b)


@dataclass(frozen=True)
class Comparison:
    """Side-by-side metrics; ``ratios[name][j]`` is A over B for joint j."""

    metrics_a: Metrics
    metrics_b: Metrics
    ratios: dict[str, tuple[float, float, float]]
    total_ise_ratio: float


def compare(config_a: SimConfig, config_b: SimConfig) -> Comparison:
    results = []
    for side, cfg in (("A", config_a), ("B", config_b)):
        try:
            results.append(compute_metrics(run(cfg)))
        except (Diverged, dynamics.SingularInertia) as exc:
            exc.side = side
            raise
    return comparison_from_metrics(*results)


def comparison_from_metrics(ma: Metrics, mb: Metrics) -> Comparison:
    ratios = {}
    for name in METRIC_NAMES:
        va, vb = getattr(ma, name), getattr(mb, name)
        ratios[name] = tuple(_ratio(va[j], vb[j]) for j in range(3))
    return Comparison(ma, mb, ratios, _ratio(ma.total_ise, mb.total_ise))


@dataclass(frozen=True)
class LyapunovReport:
    """Outcome of the numerical V-decrease check along a trace."""

    qualifying: int
    decreasing: int
    beta1: float
    beta2: float
    violations: np.ndarray

    @property
    def fraction(self) -> float:
        return 1.0 if self.qualifying == 0 else self.decreasing / self.qualifying


def lyapunov_monitor(trace: SimTrace, config: SimConfig, s_min: float = 0.01) -> LyapunovReport:
    """Count samples where the gain condition holds and V decreases.

    V-dot is the centred finite difference of the logged V; samples with
    |s| <= ``s_min`` or a failed gain condition do not qualify.
    """
    n = len(trace)
    if n < 3:
        raise EmptyTrace("monitor needs at least 3 samples")
    dt = trace.dt
    states = [JointState(q, qd) for q, qd in zip(trace.q, trace.qdot)]
    mats = [dynamics.compute_terms(config.plant, st).a for st in states]
    beta1 = 1.5 * max(control.spectral_norm((b - a) / dt) for a, b in zip(mats[:-1], mats[1:]))
    beta2 = control.default_beta2(config.controller, config.fuzzy)
    bounds = control.StabilityBounds(beta1, beta2)
    vdot = (trace.V[2:] - trace.V[:-2]) / (2.0 * dt)
    qualifying = decreasing = 0
    bad = []
    for k in range(1, n - 1):
        s = trace.s[k]
        if np.linalg.norm(s) <= s_min:
            continue
        m_norm = control.spectral_norm(mats[k])
        if not control.gain_condition(config.controller.k, s, m_norm, float(np.linalg.norm(trace.e[k])), bounds):
            continue
        qualifying += 1
        if vdot[k - 1] < 0:
            decreasing += 1
        else:
            bad.append(trace.t[k])
    return LyapunovReport(qualifying, decreasing, beta1, beta2, np.array(bad))
