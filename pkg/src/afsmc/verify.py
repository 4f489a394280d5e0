"""Cross-module self-checks behind ``afsmc verify``.

Each check recomputes its quantity along an independent route (naive
rule enumeration, direct multiplication, Richardson ratios) and reports
``pass``, ``fail`` or ``warn``.  Warnings never fail the run.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import dynamics, fuzzy, scenario, sim
from .dynamics import JointState, ManipulatorParams

# transcription of the published rule table, kept apart from fuzzy.PUBLISHED_RULES
_FIG2 = {
    "NL": "L L ML M MS",
    "NS": "L ML M MS S",
    "ZE": "ML M M M ML",
    "PS": "MS MS M ML L",
    "PL": "S MS ML L L",
}


@dataclass
class CheckResult:
    name: str
    status: str
    detail: str

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def _tri(x: float, half: float, k: int) -> float:
    center = half * (k - 2) / 2.0
    if k == 0 and x <= center:
        return 1.0
    if k == 4 and x >= center:
        return 1.0
    return max(0.0, 1.0 - abs(x - center) / (half / 2.0))


def naive_lambda(cfg: fuzzy.FuzzyConfig, e: float, edot: float) -> float:
    """Enumerate all 25 rules with from-scratch triangles."""
    labels = fuzzy.INPUT_LABELS
    num = den = 0.0
    for i, lab_ed in enumerate(labels):
        for j, lab_e in enumerate(labels):
            w = _tri(edot, cfg.edot_partition.half_width, i) * _tri(e, cfg.e_partition.half_width, j)
            out = cfg.table.lookup(lab_ed, lab_e)
            num += w * cfg.singletons.value(out)
            den += w
    return num / den


def check_table_fidelity(table: fuzzy.RuleTable | None = None) -> CheckResult:
    table = table or fuzzy.RuleTable(fuzzy.PUBLISHED_RULES)
    bad = [
        f"{r}/{c}"
        for r, row in _FIG2.items()
        for c, want in zip(fuzzy.INPUT_LABELS, row.split())
        if table.lookup(r, c) != want
    ]
    if bad:
        return CheckResult("table_fidelity", "fail", f"cells differ: {', '.join(bad)}")
    return CheckResult("table_fidelity", "pass", "25/25 cells match")


def check_defuzzification(configs=None, n: int = 101, tol: float = 1e-12) -> CheckResult:
    configs = configs or fuzzy.default_fuzzy_configs()
    worst = 0.0
    for cfg in configs:
        ee = np.linspace(-2 * cfg.e_partition.half_width, 2 * cfg.e_partition.half_width, n)
        ed = np.linspace(-2 * cfg.edot_partition.half_width, 2 * cfg.edot_partition.half_width, n)
        for x in ee:
            for y in ed:
                worst = max(worst, abs(fuzzy.infer_lambda(cfg, x, y) - naive_lambda(cfg, x, y)))
    status = "pass" if worst <= tol else "fail"
    return CheckResult("defuzzification_oracle", status, f"max deviation {worst:.3e} on {n}x{n} grid per joint")


def random_states(rng: np.random.Generator, n: int) -> list[JointState]:
    q = np.column_stack([rng.uniform(-math.pi, math.pi, n), rng.uniform(-2, 2, n), rng.uniform(-2, 4, n)])
    qdot = rng.uniform(-3, 3, (n, 3))
    return [JointState(a, b) for a, b in zip(q, qdot)]


def check_dynamics_roundtrip(n: int = 10_000, seed: int = 0, tol: float = 1e-9) -> CheckResult:
    params = ManipulatorParams()
    rng = np.random.default_rng(seed)
    worst = 0.0
    used = 0
    zero_bad = 0
    for st in random_states(rng, n):
        terms = dynamics.compute_terms(params, st)
        zero_bad += int(np.count_nonzero(terms.a[[0, 1, 1, 2], [1, 0, 2, 1]]))
        zero_bad += int(np.count_nonzero(terms.b[[0, 1, 1, 1, 2, 2], [1, 0, 1, 2, 1, 2]]))
        zero_bad += int(np.count_nonzero(terms.c[[0, 0, 1, 1, 1, 2, 2], [0, 2, 0, 1, 2, 0, 2]]))
        zero_bad += int(terms.d[0] != 0.0) + int(terms.d[2] != 0.0)
        if abs(np.linalg.det(terms.a)) <= 1e-3:
            continue
        used += 1
        qdd = rng.normal(size=3)
        back = dynamics.forward_dynamics(params, st, dynamics.inverse_dynamics(params, st, qdd))
        worst = max(worst, float(np.linalg.norm(back - qdd) / np.linalg.norm(qdd)))
    status = "pass" if worst <= tol and zero_bad == 0 else "fail"
    return CheckResult(
        "dynamics_roundtrip", status, f"max relative error {worst:.3e} over {used} states; {zero_bad} zero-pattern breaks"
    )


def rk4_order(dts=(0.1, 0.05, 0.025), t_end: float = 1.0) -> np.ndarray:
    """Observed convergence orders on y' = -y between successive step sizes."""
    errs = []
    for dt in dts:
        y = np.array([1.0])
        for k in range(int(round(t_end / dt))):
            y = sim.rk4_step(lambda t, v: -v, k * dt, y, dt)
        errs.append(abs(y[0] - math.exp(-t_end)))
    errs = np.array(errs)
    return np.log(errs[:-1] / errs[1:]) / np.log(np.array(dts[:-1]) / np.array(dts[1:]))


def check_rk4_order() -> CheckResult:
    orders = rk4_order()
    status = "pass" if np.all((orders >= 3.7) & (orders <= 4.1)) else "fail"
    return CheckResult("rk4_order", status, f"observed orders {np.round(orders, 4).tolist()}")


def check_gravity() -> CheckResult:
    d2 = dynamics.compute_terms(ManipulatorParams(), JointState(np.zeros(3))).d[1]
    status = "pass" if abs(d2 - 356.400569) <= 1e-6 else "fail"
    return CheckResult("gravity_constant", status, f"D2 = {d2:.9f}")


def check_lyapunov(name: str, strict_paper: bool = False, floor: float = 0.99) -> CheckResult:
    overrides = ["controller.strict_paper=true"] if strict_paper else []
    cfg = scenario.load_scenario(name, overrides)
    label = f"lyapunov_{name}" + ("_strict_paper" if strict_paper else "")
    try:
        trace = sim.run(cfg)
    except (sim.Diverged, dynamics.SingularInertia) as exc:
        status = "warn" if strict_paper else "fail"
        return CheckResult(label, status, f"run aborted: {exc}")
    rep = sim.lyapunov_monitor(trace, cfg)
    ok = rep.qualifying > 0 and rep.fraction >= floor
    status = "pass" if ok else ("warn" if strict_paper else "fail")
    return CheckResult(label, status, f"V decreasing at {rep.decreasing}/{rep.qualifying} qualifying samples")


def check_setpoint_convergence() -> CheckResult:
    cfg = scenario.load_scenario("constant_setpoint")
    m = sim.compute_metrics(sim.run(cfg))
    ok = all(t is not None and t <= 0.5 for t in m.settling_time) and np.all(m.overshoot <= 1e-3)
    return CheckResult(
        "setpoint_convergence",
        "pass" if ok else "fail",
        f"settling {m.settling_time}, overshoot {np.round(m.overshoot, 6).tolist()}",
    )


def run_checks(table: fuzzy.RuleTable | None = None) -> list[CheckResult]:
    return [
        check_table_fidelity(table),
        check_defuzzification(),
        check_dynamics_roundtrip(),
        check_rk4_order(),
        check_gravity(),
        check_setpoint_convergence(),
        check_lyapunov("constant_setpoint"),
        check_lyapunov("disturbed_afsmc"),
        check_lyapunov("constant_setpoint", strict_paper=True),
    ]


def as_dicts(results) -> list[dict]:
    return [asdict(r) for r in results]
