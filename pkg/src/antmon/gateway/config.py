"""JSON configuration mirroring the policy and simulator dataclasses.

Example:

    {
      "port": 8787,
      "policy": {"total_threshold": 22.0},
      "simulator": {"seed": 7, "surge_probability": 0.004}
    }

Unknown keys fail loudly; partial sections override defaults field by field.
The default port comes from $ANTMON_PORT when set.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace
from datetime import date
from pathlib import Path

from ..domain import InControlModel
from ..errors import AntmonError
from ..monitor import AlarmPolicy
from ..simulate import SimConfig

PORT_ENV = "ANTMON_PORT"
FALLBACK_PORT = 8787


class BadConfig(AntmonError):
    code = "bad_config"


def default_port() -> int:
    raw = os.environ.get(PORT_ENV)
    if raw is None:
        return FALLBACK_PORT
    try:
        return int(raw)
    except ValueError:
        raise BadConfig(f"{PORT_ENV}={raw!r} is not a port number") from None


@dataclass(frozen=True)
class AppConfig:
    policy: AlarmPolicy
    simulator: SimConfig
    port: int


def _apply(instance, overrides: dict, label: str):
    valid = {f.name for f in fields(instance)}
    unknown = set(overrides) - valid
    if unknown:
        raise BadConfig(f"unknown {label} keys: {', '.join(sorted(unknown))}")
    return replace(instance, **overrides)


def load_config(path: str | Path | None = None) -> AppConfig:
    policy = AlarmPolicy()
    sim = SimConfig()
    port = default_port()
    if path is None:
        return AppConfig(policy=policy, simulator=sim, port=port)
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise BadConfig(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise BadConfig("config root must be a JSON object")
    unknown = set(doc) - {"policy", "simulator", "port"}
    if unknown:
        raise BadConfig(f"unknown config sections: {', '.join(sorted(unknown))}")
    if "policy" in doc:
        policy = _apply(policy, dict(doc["policy"]), "policy")
    if "simulator" in doc:
        overrides = dict(doc["simulator"])
        if "model" in overrides:
            overrides["model"] = InControlModel(**overrides["model"])
        if "start_date" in overrides:
            overrides["start_date"] = date.fromisoformat(overrides["start_date"])
        if "regimes" in overrides:
            overrides["regimes"] = tuple(overrides["regimes"])
        sim = _apply(sim, overrides, "simulator")
    if "port" in doc:
        port = int(doc["port"])
    return AppConfig(policy=policy, simulator=sim, port=port)


def policy_as_dict(policy: AlarmPolicy) -> dict:
    return {f.name: getattr(policy, f.name) for f in fields(policy)}
