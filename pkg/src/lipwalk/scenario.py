"""Scenario files: TOML in, ScenarioConfig out, and back.

Layout::

    n_steps = 20
    sample_dt = 0.004
    seed = 0
    max_step_reach = 1.0

    [params]            # mass, com_height, step_duration required; gravity, ell optional
    [initial]           # p, L required; t optional
    [controller]        # kind, mode, t_decide, velocity_offset, velocity_lag
    [random]            # kick_count, kick_std, placement_std
    [[target]]          # step plus exactly one of L_des / v_des
    [[kick]]            # time, dL
    [[placement_error]] # step, dp
"""

import copy

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from lipwalk.errors import ConfigError, InvalidArgumentError
from lipwalk.lip_core import PendulumParams, PendulumState
from lipwalk.simulator import (
    Kick,
    PlacementError,
    RandomDisturbances,
    ScenarioConfig,
    TargetEntry,
)

TOP_KEYS = {"n_steps", "sample_dt", "seed", "max_step_reach", "params", "initial",
            "controller", "random", "target", "kick", "placement_error"}
PARAM_KEYS = {"mass", "com_height", "step_duration", "gravity", "ell"}
CONTROLLER_KEYS = {"kind", "mode", "t_decide", "velocity_offset", "velocity_lag"}


def _number(table, key, path, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError("missing required field", path)
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    return float(value)


def _integer(table, key, path, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError("missing required field", path)
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", path)
    return value


def _table(doc, key, required=False):
    if key not in doc:
        if required:
            raise ConfigError("missing required section", key)
        return {}
    value = doc[key]
    if not isinstance(value, dict):
        raise ConfigError("expected a table", key)
    return value


def _array_of_tables(doc, key):
    value = doc.get(key, [])
    if not isinstance(value, list) or not all(isinstance(v, dict) for v in value):
        raise ConfigError("expected an array of tables", key)
    return value


def _reject_unknown(table, allowed, prefix):
    for key in table:
        if key not in allowed:
            raise ConfigError("unknown field", f"{prefix}{key}")


def config_from_dict(doc: dict) -> ScenarioConfig:
    _reject_unknown(doc, TOP_KEYS, "")

    ptab = _table(doc, "params", required=True)
    _reject_unknown(ptab, PARAM_KEYS, "params.")
    pkw = {k: _number(ptab, k, f"params.{k}", required=True)
           for k in ("mass", "com_height", "step_duration")}
    pkw["gravity"] = _number(ptab, "gravity", "params.gravity", default=9.81)
    pkw["ell"] = _number(ptab, "ell", "params.ell")
    try:
        params = PendulumParams(**pkw)
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc), "params") from exc

    itab = _table(doc, "initial", required=True)
    _reject_unknown(itab, {"p", "L", "t"}, "initial.")
    initial = PendulumState(
        p=_number(itab, "p", "initial.p", required=True),
        L=_number(itab, "L", "initial.L", required=True),
        t=_number(itab, "t", "initial.t", default=0.0),
    )

    targets = []
    for i, entry in enumerate(_array_of_tables(doc, "target")):
        path = f"target[{i}]"
        _reject_unknown(entry, {"step", "L_des", "v_des"}, path + ".")
        step = _integer(entry, "step", path + ".step", required=True)
        if ("L_des" in entry) == ("v_des" in entry):
            raise ConfigError("exactly one of L_des / v_des is required", path)
        kind = "L" if "L_des" in entry else "v"
        key = "L_des" if kind == "L" else "v_des"
        targets.append(TargetEntry(step, _number(entry, key, f"{path}.{key}"), kind))

    kicks = []
    for i, entry in enumerate(_array_of_tables(doc, "kick")):
        path = f"kick[{i}]"
        _reject_unknown(entry, {"time", "dL"}, path + ".")
        kicks.append(Kick(_number(entry, "time", path + ".time", required=True),
                          _number(entry, "dL", path + ".dL", required=True)))

    perrs = []
    for i, entry in enumerate(_array_of_tables(doc, "placement_error")):
        path = f"placement_error[{i}]"
        _reject_unknown(entry, {"step", "dp"}, path + ".")
        perrs.append(PlacementError(_integer(entry, "step", path + ".step", required=True),
                                    _number(entry, "dp", path + ".dp", required=True)))

    rtab = _table(doc, "random")
    _reject_unknown(rtab, {"kick_count", "kick_std", "placement_std"}, "random.")
    rand = RandomDisturbances(
        kick_count=_integer(rtab, "kick_count", "random.kick_count", default=0),
        kick_std=_number(rtab, "kick_std", "random.kick_std", default=0.0),
        placement_std=_number(rtab, "placement_std", "random.placement_std", default=0.0),
    )

    ctab = _table(doc, "controller")
    _reject_unknown(ctab, CONTROLLER_KEYS, "controller.")
    for key in ("kind", "mode"):
        if key in ctab and not isinstance(ctab[key], str):
            raise ConfigError("expected a string", f"controller.{key}")

    config = ScenarioConfig(
        params=params,
        initial=initial,
        n_steps=_integer(doc, "n_steps", "n_steps", required=True),
        sample_dt=_number(doc, "sample_dt", "sample_dt", required=True),
        target_schedule=tuple(targets),
        disturbances=tuple(kicks),
        placement_errors=tuple(perrs),
        random=rand,
        controller=ctab.get("kind", "am"),
        controller_mode=ctab.get("mode", "continuous"),
        t_decide=_number(ctab, "t_decide", "controller.t_decide", default=0.0),
        baseline_velocity_offset=_number(ctab, "velocity_offset", "controller.velocity_offset", default=0.0),
        baseline_velocity_lag=_integer(ctab, "velocity_lag", "controller.velocity_lag", default=0),
        max_step_reach=_number(doc, "max_step_reach", "max_step_reach", default=1.0),
        seed=_integer(doc, "seed", "seed", default=0),
    )
    return config.validate()


def config_to_dict(config: ScenarioConfig) -> dict:
    p = config.params
    doc = {
        "n_steps": config.n_steps,
        "sample_dt": config.sample_dt,
        "seed": config.seed,
        "max_step_reach": config.max_step_reach,
        "params": {"mass": p.mass, "com_height": p.com_height, "step_duration": p.step_duration,
                   "gravity": p.gravity, "ell": p.ell},
        "initial": {"p": config.initial.p, "L": config.initial.L, "t": config.initial.t},
        "controller": {"kind": config.controller, "mode": config.controller_mode,
                       "t_decide": config.t_decide,
                       "velocity_offset": config.baseline_velocity_offset,
                       "velocity_lag": config.baseline_velocity_lag},
        "random": {"kick_count": config.random.kick_count, "kick_std": config.random.kick_std,
                   "placement_std": config.random.placement_std},
    }
    if config.target_schedule:
        doc["target"] = [{"step": e.step, ("L_des" if e.kind == "L" else "v_des"): e.value}
                         for e in config.target_schedule]
    if config.disturbances:
        doc["kick"] = [{"time": k.time, "dL": k.dL} for k in config.disturbances]
    if config.placement_errors:
        doc["placement_error"] = [{"step": e.step, "dp": e.dp} for e in config.placement_errors]
    return doc


def dumps(config: ScenarioConfig) -> str:
    return tomli_w.dumps(config_to_dict(config))


def parse_document(text: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc


def parse_override(item: str):
    """Split ``key=value``; the value is read as a TOML literal, else kept as a string."""
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    key, raw = item.split("=", 1)
    key = key.strip()
    raw = raw.strip()
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key, value


def apply_overrides(doc: dict, overrides) -> dict:
    """Set dotted keys (``params.mass``, ``target.0.L_des``) in a copy of ``doc``."""
    doc = copy.deepcopy(doc)
    for item in overrides or ():
        key, value = parse_override(item)
        parts = key.split(".")
        node = doc
        for i, part in enumerate(parts[:-1]):
            if isinstance(node, list):
                node = _list_item(node, part, key)
            else:
                if part not in node:
                    node[part] = [] if parts[i + 1].isdigit() else {}
                node = node[part]
        last = parts[-1]
        if isinstance(node, list):
            idx = int(last) if last.isdigit() else None
            if idx is None or idx > len(node):
                raise ConfigError(f"bad list index in override {key!r}", key)
            if idx == len(node):
                node.append(value)
            else:
                node[idx] = value
        else:
            node[last] = value
    return doc


def _list_item(node, part, key):
    if not part.isdigit():
        raise ConfigError(f"expected a list index in override {key!r}", key)
    idx = int(part)
    if idx == len(node):
        node.append({})
    if idx >= len(node):
        raise ConfigError(f"list index out of range in override {key!r}", key)
    return node[idx]


def loads(text: str, overrides=None) -> ScenarioConfig:
    return config_from_dict(apply_overrides(parse_document(text), overrides))


def load(path, overrides=None) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read(), overrides)
