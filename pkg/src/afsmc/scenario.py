"""Scenario files: TOML documents mapping one-to-one onto SimConfig.

Sections are ``[plant]``, ``[sim]``, ``[controller]``, ``[fuzzy.joint1]``
... ``[fuzzy.joint3]``, ``[trajectory]`` and ``[disturbance]``.  Every key
is optional (defaults fill the gaps) but unknown sections or keys are
rejected.  See docs/scenario_schema.md for units.
"""

from __future__ import annotations

import copy
from importlib import resources
from pathlib import Path

import tomli
import tomli_w

from . import fuzzy
from .control import ControllerConfig
from .dynamics import JointState, ManipulatorParams
from .sim import DisturbanceSpec, SimConfig, TrajectorySpec

SHIPPED = ("constant_setpoint", "disturbed_afsmc", "disturbed_smc")
JOINT_SECTIONS = ("joint1", "joint2", "joint3")


class ScenarioError(ValueError):
    """Invalid scenario document; ``key`` is the dotted path at fault."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


def config_to_dict(cfg: SimConfig) -> dict:
    """Fully resolved document; loading it back yields an equal config."""
    c = cfg.controller
    d = cfg.disturbance
    tr = cfg.trajectory
    p = cfg.plant
    doc = {
        "plant": {"m1": p.m1, "m2": p.m2, "m3": p.m3, "i3": p.i3, "g": p.g, "viscous": list(p.viscous)},
        "sim": {
            "dt": cfg.dt,
            "duration": cfg.duration,
            "q0": cfg.initial.q.tolist(),
            "qdot0": cfg.initial.qdot.tolist(),
            "det_tol": cfg.det_tol,
        },
        "controller": {
            "type": c.type.value,
            "k": list(c.k),
            "lambda_fixed": list(c.lambda_fixed),
            "boundary_layer": c.boundary_layer,
            "strict_paper": c.strict_paper,
        },
        "fuzzy": {},
        "trajectory": {
            "kind": tr.kind.value,
            "setpoint": list(tr.setpoint),
            "amplitude": list(tr.amplitude),
            "omega": list(tr.omega),
            "phase": list(tr.phase),
            "offset": list(tr.offset),
        },
        "disturbance": {
            "kind": d.kind.value,
            "amplitude": list(d.amplitude),
            "frequency": d.frequency,
            "phase": d.phase,
            "seed": d.seed,
            "hold": d.hold,
        },
    }
    for name, fc in zip(JOINT_SECTIONS, cfg.fuzzy):
        doc["fuzzy"][name] = {
            "e_half_width": fc.e_partition.half_width,
            "edot_half_width": fc.edot_partition.half_width,
            "singletons": fc.singletons.as_array().tolist(),
            "table": [list(r) for r in fc.table.rows],
        }
    return doc


def _merge(base: dict, update: dict, path: str = "") -> None:
    for key, value in update.items():
        dotted = f"{path}{key}"
        if key not in base:
            raise ScenarioError(f"unknown key '{dotted}'", dotted)
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ScenarioError(f"'{dotted}' must be a section", dotted)
            _merge(base[key], value, dotted + ".")
        else:
            base[key] = value


def _parse_value(text: str):
    try:
        return tomli.loads(f"v = {text}")["v"]
    except tomli.TOMLDecodeError:
        return text


def apply_override(doc: dict, override: str) -> None:
    """Apply ``section.key=value``; the value is parsed as a TOML literal."""
    if "=" not in override:
        raise ScenarioError(f"override '{override}' is not of the form key=value", override)
    dotted, text = override.split("=", 1)
    parts = dotted.strip().split(".")
    update: dict = {}
    node = update
    for p in parts[:-1]:
        node = node.setdefault(p, {})
    node[parts[-1]] = _parse_value(text.strip())
    _merge(doc, update)


def dict_to_config(doc: dict) -> SimConfig:
    full = config_to_dict(SimConfig())
    _merge(full, doc)
    section = ""
    try:
        section = "plant"
        pl = dict(full["plant"])
        pl["viscous"] = tuple(pl["viscous"])
        plant = ManipulatorParams(**pl)
        section = "sim"
        sim = full["sim"]
        initial = JointState(sim["q0"], sim["qdot0"])
        section = "controller"
        controller = ControllerConfig(**full["controller"])
        configs = []
        for name in JOINT_SECTIONS:
            section = f"fuzzy.{name}"
            f = full["fuzzy"][name]
            configs.append(
                fuzzy.FuzzyConfig(
                    fuzzy.InputPartition(float(f["e_half_width"])),
                    fuzzy.InputPartition(float(f["edot_half_width"])),
                    fuzzy.RuleTable(tuple(tuple(r) for r in f["table"])),
                    fuzzy.OutputSingletons(*[float(v) for v in f["singletons"]]),
                )
            )
        section = "trajectory"
        trajectory = TrajectorySpec(**full["trajectory"])
        section = "disturbance"
        disturbance = DisturbanceSpec(**full["disturbance"])
        section = "sim"
        return SimConfig(
            dt=float(sim["dt"]),
            duration=float(sim["duration"]),
            initial=initial,
            trajectory=trajectory,
            disturbance=disturbance,
            controller=controller,
            fuzzy=tuple(configs),
            plant=plant,
            det_tol=float(sim["det_tol"]),
        )
    except ScenarioError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"[{section}] {exc}", section) from exc


def shipped_path(name: str) -> Path:
    return Path(str(resources.files("afsmc") / "scenarios" / f"{name}.toml"))


def load_document(source: str | Path) -> dict:
    """Read a scenario by path, or by name for the shipped ones."""
    path = Path(source)
    if not path.exists() and str(source) in SHIPPED:
        path = shipped_path(str(source))
    try:
        with open(path, "rb") as fh:
            return tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def load_scenario(source: str | Path, overrides=()) -> SimConfig:
    doc = copy.deepcopy(load_document(source))
    base = config_to_dict(SimConfig())
    _merge(base, doc)
    for ov in overrides:
        apply_override(base, ov)
    return dict_to_config(base)


def dumps(cfg: SimConfig) -> str:
    return tomli_w.dumps(config_to_dict(cfg))


def loads(text: str) -> SimConfig:
    return dict_to_config(tomli.loads(text))
