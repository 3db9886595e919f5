"""
Scenario configuration, execution and result files.

A scenario is a flat TOML document: a ``[scenario]`` table naming the
``kind`` and the output prefix, plus one table per concern (``[system]``,
``[grid]``, ``[momentum]``, ``[dynamics]``, ``[multizone]``, ``[sweep]``,
``[rna]``). :func:`parse_config` validates it and fills in every default so
the returned :class:`Scenario` is complete; :func:`render_config` writes it
back out. :func:`run_scenario` executes it and writes CSV files plus a JSON
manifest next to them.
"""

from __future__ import annotations

import json
import math
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .analytic import (
    fwhm_formula,
    fwhm_numeric,
    multizone_profile,
    rf_readout_at,
    rho22_profile,
    rho23_at,
)
from .core import DecayModel, DensityMatrix3, LambdaSystem, PhysicalScales, make_grid, node_sin
from .dynamics import (
    EvolutionConfig,
    dark_state_fidelity,
    evolve,
    matched_envelopes,
    rna_valid,
    stability_dt,
    steady_state_reached,
)
from .analytic import dark_state, rho22_at
from .errors import (
    ConfigParseError,
    ConfigValidationError,
    CPTLocError,
    InvalidArgumentError,
    NoPeaksError,
    NumericalInstabilityError,
    OutOfDomainError,
    ResolutionError,
)
from .momentum import AMPLITUDE_MODES, default_p_grid, momentum_distribution, second_moment
from .multizone import equivalent_finesse

__all__ = [
    "KINDS",
    "OUTPUT_DIR_ENV",
    "Scenario",
    "RunManifest",
    "parse_config",
    "render_config",
    "run_scenario",
    "run_sweep",
    "exit_code_for",
]

KINDS = ("profile", "dynamics", "momentum", "multizone", "sweep")
MEMBER_KINDS = ("profile", "dynamics", "momentum", "multizone")
SWEEP_PARAMETERS = ("R", "n_zones")
SHAPES = ("flattop", "gaussian")
OUTPUT_DIR_ENV = "CPTLOC_OUTPUT_DIR"

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4, 5

SECTIONS_BY_KIND = {
    "profile": ("scenario", "system", "grid", "rna"),
    "dynamics": ("scenario", "system", "dynamics", "rna"),
    "momentum": ("scenario", "system", "grid", "momentum", "rna"),
    "multizone": ("scenario", "system", "grid", "momentum", "multizone", "rna"),
    "sweep": ("scenario", "system", "grid", "momentum", "multizone", "dynamics", "sweep", "rna"),
}


# --------------------------------------------------------------------------
# schema

def _number(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(key, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigValidationError(key, "must be finite")
    return value


def _integer(value, key):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigValidationError(key, f"expected an integer, got {value!r}")
    return int(value)


def _string(value, key):
    if not isinstance(value, str):
        raise ConfigValidationError(key, f"expected a string, got {value!r}")
    return value


def _number_list(value, key):
    if not isinstance(value, list) or not value:
        raise ConfigValidationError(key, "expected a non-empty list of numbers")
    return [_number(v, key) for v in value]


def _at_least(low, strict=False):
    def check(value, key):
        if value < low or (strict and value == low):
            op = ">" if strict else ">="
            raise ConfigValidationError(key, f"must be {op} {low}, got {value}")
    return check


def _between(low, high):
    def check(value, key):
        if not low <= value <= high:
            raise ConfigValidationError(key, f"must lie in [{low}, {high}], got {value}")
    return check


def _one_of(options):
    def check(value, key):
        if value not in options:
            raise ConfigValidationError(key, f"must be one of {list(options)}, got {value!r}")
    return check


@dataclass(frozen=True)
class _Field:
    convert: Any
    default: Any = None          # value, or callable(params) -> value
    check: Any = None


def _dyn_default(fraction):
    return lambda params: fraction * params["dynamics"]["t_end"]


SCHEMA: Dict[str, Dict[str, _Field]] = {
    "scenario": {
        "kind": _Field(_string, None, _one_of(KINDS)),
        "output": _Field(_string, lambda params: str(
            Path(os.environ.get(OUTPUT_DIR_ENV, "cptloc-output")) / params["scenario"]["kind"])),
    },
    "system": {
        # R may be a list only for momentum scenarios; handled in _validate_kind
        "R": _Field(None, 16.0),
        "omega_p": _Field(_number, 1.0, _at_least(0.0, strict=True)),
        "delta": _Field(_number, 0.0),
        "gamma": _Field(_number, 5.0, _at_least(0.0)),
        "branch_to_2": _Field(_number, 0.5, _between(0.0, 1.0)),
    },
    "grid": {
        "wavelengths": _Field(_integer, 1, _at_least(1)),
        "samples": _Field(_integer, 720, _at_least(16)),
    },
    "momentum": {
        "p_max": _Field(_number, 12.0, _at_least(0.0, strict=True)),
        "p_step": _Field(_number, 0.05, _at_least(0.0, strict=True)),
        "amplitude_mode": _Field(_string, "as_written", _one_of(AMPLITUDE_MODES)),
    },
    "dynamics": {
        "kx": _Field(_number, math.pi / 4),
        "shape": _Field(_string, "flattop", _one_of(SHAPES)),
        "t_end": _Field(_number, 200.0, _at_least(0.0, strict=True)),
        "dt": _Field(_number, None, _at_least(0.0, strict=True)),
        "steady_window": _Field(_number, _dyn_default(0.1), _at_least(0.0, strict=True)),
        "steady_tolerance": _Field(_number, 1e-5, _at_least(0.0, strict=True)),
        "save_every": _Field(_integer, None, _at_least(1)),
        "t0": _Field(_number, _dyn_default(0.5)),
        "w": _Field(_number, _dyn_default(0.25), _at_least(0.0, strict=True)),
        "t1": _Field(_number, _dyn_default(0.05)),
        "r1": _Field(_number, _dyn_default(0.01), _at_least(0.0, strict=True)),
        "t2": _Field(_number, _dyn_default(0.85)),
        "r2": _Field(_number, _dyn_default(0.01), _at_least(0.0, strict=True)),
    },
    "multizone": {
        "n_zones": _Field(_integer, 1, _at_least(1)),
    },
    "sweep": {
        "parameter": _Field(_string, "R", _one_of(SWEEP_PARAMETERS)),
        "values": _Field(_number_list, lambda params: [params["system"]["R"]]
                         if not isinstance(params["system"]["R"], list) else params["system"]["R"]),
        "member_kind": _Field(_string, "profile", _one_of(MEMBER_KINDS)),
        "jobs": _Field(_integer, 1, _at_least(1)),
    },
    "rna": {
        "p_max": _Field(_integer, 10, _at_least(0)),
        "recoil_frequency": _Field(_number, 2 * math.pi * 0.004, _at_least(0.0, strict=True)),
        "rabi_reference": _Field(_number, 2 * math.pi * 10.0, _at_least(0.0, strict=True)),
        "margin": _Field(_number, 0.1, _between(1e-300, 1.0)),
    },
}


@dataclass(frozen=True)
class Scenario:
    """A fully specified, validated run description."""

    kind: str
    output: str
    parameters: Dict[str, Dict[str, Any]]

    def section(self, name: str) -> Dict[str, Any]:
        return self.parameters[name]


def _fill_section(name, raw, params):
    schema = SCHEMA[name]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigValidationError(f"{name}.{unknown[0]}", "unknown key")
    out = params.setdefault(name, {})
    for key, spec in schema.items():
        qualified = f"{name}.{key}"
        if key in raw:
            value = raw[key]
            if isinstance(value, dict):
                raise ConfigValidationError(qualified, "nested tables are not allowed")
            value = spec.convert(value, qualified) if spec.convert else value
        else:
            value = spec.default(params) if callable(spec.default) else spec.default
        out[key] = value


def _validate_kind(params, kind):
    r = params["system"]["R"]
    if isinstance(r, list):
        if kind != "momentum":
            raise ConfigValidationError("system.R", "a list of values is only allowed for momentum scenarios")
        r = _number_list(r, "system.R")
        for v in r:
            _at_least(0.0)(v, "system.R")
        if len(set(r)) != len(r):
            raise ConfigValidationError("system.R", "values must be distinct")
    else:
        r = _number(r, "system.R")
        _at_least(0.0)(r, "system.R")
    params["system"]["R"] = r

    for name, section in params.items():
        for key, value in section.items():
            check = SCHEMA[name][key].check
            if check is not None and value is not None:
                check(value, f"{name}.{key}")

    if "dynamics" in params:
        _fill_dynamics(params)
    if "sweep" in params:
        values = params["sweep"]["values"]
        if len(set(values)) != len(values):
            raise ConfigValidationError("sweep.values", "values must be distinct")
        check = _at_least(0.0) if params["sweep"]["parameter"] == "R" else _at_least(1)
        for v in values:
            check(v, "sweep.values")
            if params["sweep"]["parameter"] == "n_zones" and v != int(v):
                raise ConfigValidationError("sweep.values", "zone counts must be integers")


def _fill_dynamics(params):
    dyn, system = params["dynamics"], params["system"]
    r = system["R"] if not isinstance(system["R"], list) else max(system["R"])
    peaks = [system["omega_p"], math.sqrt(r) * system["omega_p"]]
    limit = stability_dt(peaks, system["delta"], system["gamma"])
    if dyn["dt"] is None:
        dyn["dt"] = limit
    elif dyn["dt"] > limit * (1 + 1e-12):
        raise ConfigValidationError("dynamics.dt", f"must be <= stability bound {limit!r}")
    if dyn["t_end"] < 10 * dyn["steady_window"] * (1 - 1e-12):
        raise ConfigValidationError("dynamics.steady_window", "t_end must span at least 10 windows")
    if dyn["t2"] <= dyn["t1"]:
        raise ConfigValidationError("dynamics.t2", "must exceed dynamics.t1")
    if dyn["save_every"] is None:
        n_steps = int(math.ceil(dyn["t_end"] / dyn["dt"] - 1e-9))
        dyn["save_every"] = max(1, int(math.ceil(n_steps / 4000)))


def parse_config(text: str, kind: Optional[str] = None) -> Scenario:
    """Parse and validate a scenario document.

    ``kind`` (e.g. from a CLI subcommand) is used when the document has no
    ``scenario.kind`` and must agree with it otherwise.

    Raises
    ------
    ConfigParseError
        Malformed TOML; carries the line and column.
    ConfigValidationError
        Unknown key, wrong type or out-of-range value; names the key.
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        message = str(exc)
        m = re.search(r"\s*\(at line (\d+), column (\d+)\)", message)
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        if m:
            message = message[:m.start()] + message[m.end():]
        raise ConfigParseError(f"malformed configuration: {message}", line, col) from None

    for name, value in raw.items():
        if not isinstance(value, dict):
            raise ConfigValidationError(name, "top-level keys must be tables")
    doc_kind = raw.get("scenario", {}).get("kind")
    if doc_kind is None:
        if kind is None:
            raise ConfigValidationError("scenario.kind", "missing")
        doc_kind = kind
    elif kind is not None and doc_kind != kind:
        raise ConfigValidationError("scenario.kind", f"config says {doc_kind!r} but {kind!r} was requested")
    _one_of(KINDS)(doc_kind, "scenario.kind")

    allowed = SECTIONS_BY_KIND[doc_kind]
    extra = sorted(set(raw) - set(allowed))
    if extra:
        raise ConfigValidationError(extra[0], f"section not used by {doc_kind!r} scenarios")

    params: Dict[str, Dict[str, Any]] = {}
    raw_scenario = dict(raw.get("scenario", {}))
    raw_scenario["kind"] = doc_kind
    for name in allowed:
        _fill_section(name, raw_scenario if name == "scenario" else raw.get(name, {}), params)
    _validate_kind(params, doc_kind)
    scenario_section = params.pop("scenario")
    return Scenario(kind=scenario_section["kind"], output=scenario_section["output"], parameters=params)


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, list):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot render {value!r}")


def render_config(scenario: Scenario) -> str:
    """Serialize a scenario so that ``parse_config(render_config(s)) == s``."""
    lines = ["[scenario]", f"kind = {_toml_value(scenario.kind)}",
             f"output = {_toml_value(scenario.output)}"]
    for name, section in scenario.parameters.items():
        lines.append("")
        lines.append(f"[{name}]")
        for key, value in section.items():
            lines.append(f"{key} = {_toml_value(value)}")
    return "\n".join(lines) + "\n"


def with_overrides(scenario: Scenario, output: Optional[str] = None) -> Scenario:
    if output is None:
        return scenario
    return Scenario(scenario.kind, output, scenario.parameters)


# --------------------------------------------------------------------------
# execution

@dataclass
class RunManifest:
    tool: str
    version: str
    scenario: Dict[str, Any]
    derived: Dict[str, Any] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    errors: List[Dict[str, Any]] = field(default_factory=list)
    members: List[Dict[str, Any]] = field(default_factory=list)
    started_at: str = ""
    duration_s: float = 0.0
    manifest_path: Optional[str] = None

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def exit_code(self) -> int:
        if not self.errors:
            return EXIT_OK
        return max(e["exit_code"] for e in self.errors)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tool": self.tool,
            "version": self.version,
            "status": "ok" if self.ok else "error",
            "exit_code": self.exit_code,
            "started_at": self.started_at,
            "duration_s": self.duration_s,
            "scenario": self.scenario,
            "derived": self.derived,
            "outputs": self.outputs,
            "members": self.members,
            "errors": self.errors,
        }


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConfigParseError):
        return EXIT_PARSE
    if isinstance(exc, (ConfigValidationError, InvalidArgumentError)):
        return EXIT_VALIDATION
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_NUMERICAL


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path: Path, header: List[str], columns: List[np.ndarray]) -> str:
    """Write columns as CSV with 17 significant digits and UNIX newlines."""
    rows = zip(*[np.asarray(c, dtype=float) for c in columns])
    body = "\n".join(",".join(_fmt(v) for v in row) for row in rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n" + body + "\n")
    return str(path)


def _sibling(prefix: Path, suffix: str) -> Path:
    # Path.with_suffix would eat the ".5" of a prefix like "sweep_R0.5".
    return prefix.parent / (prefix.name + suffix)


def _tag(value: float) -> str:
    return format(value, "g").replace("-", "m")


def _or_none(func, *args):
    try:
        return func(*args)
    except (NoPeaksError, ResolutionError, OutOfDomainError):
        return None


def _system(params, r) -> LambdaSystem:
    s = params["system"]
    return LambdaSystem.from_ratio(r, omega_p=s["omega_p"], delta=s["delta"],
                                   decay=DecayModel(s["gamma"], s["branch_to_2"]))


def _rna_verdict(params, r) -> bool:
    rna, s = params["rna"], params["system"]
    scales = PhysicalScales(rna["recoil_frequency"], rna["rabi_reference"])
    return rna_valid(rna["p_max"], scales, s["omega_p"], math.sqrt(r) * s["omega_p"], rna["margin"])


def _common_derived(params, r, n_zones=1) -> Dict[str, Any]:
    derived = {
        "R": r,
        "fwhm_formula": _or_none(fwhm_formula, r) if r > 0 else None,
        "rna_verdict": _rna_verdict(params, r),
    }
    if "grid" in params:
        grid = make_grid(params["grid"]["wavelengths"], params["grid"]["samples"])
        derived["fwhm_numeric"] = _or_none(fwhm_numeric, multizone_profile(r, n_zones, grid))
    return derived


def _p_grid(params):
    m = params["momentum"]
    return default_p_grid(m["p_max"], m["p_step"])


def _run_profile(sc: Scenario, prefix: Path, manifest: RunManifest):
    params = sc.parameters
    r = params["system"]["R"]
    op = params["system"]["omega_p"]
    os_peak = math.sqrt(r) * op
    grid = make_grid(params["grid"]["wavelengths"], params["grid"]["samples"])
    kx = grid.kx_values
    rho22 = rho22_profile(r, grid).values
    rho23 = rho23_at(op, os_peak * node_sin(kx))
    readout = rf_readout_at(op, os_peak, kx)
    manifest.outputs.append(write_csv(_sibling(prefix, ".csv"),
                                      ["kx", "rho22", "rho23_real", "rho23_imag", "rf_readout"],
                                      [kx, rho22, np.real(rho23), np.imag(rho23), readout]))
    manifest.derived.update(_common_derived(params, r))


def _run_momentum(sc: Scenario, prefix: Path, manifest: RunManifest):
    params = sc.parameters
    values = params["system"]["R"]
    values = values if isinstance(values, list) else [values]
    grid = make_grid(params["grid"]["wavelengths"], params["grid"]["samples"])
    p = _p_grid(params)
    per_r = []
    for r in values:
        spec = momentum_distribution(rho22_profile(r, grid), p, params["momentum"]["amplitude_mode"])
        name = prefix.parent / f"{prefix.name}_R{_tag(r)}.csv"
        manifest.outputs.append(write_csv(name, ["p", "intensity", "intensity_normalized"],
                                          [p, spec.intensities, spec.normalized()]))
        entry = _common_derived(params, r)
        entry["second_moment"] = second_moment(spec)
        per_r.append(entry)
    if len(per_r) == 1:
        manifest.derived.update(per_r[0])
    else:
        manifest.derived["per_R"] = per_r


def _run_multizone(sc: Scenario, prefix: Path, manifest: RunManifest):
    params = sc.parameters
    r, n = params["system"]["R"], params["multizone"]["n_zones"]
    grid = make_grid(params["grid"]["wavelengths"], params["grid"]["samples"])
    profile = multizone_profile(r, n, grid)
    spec = momentum_distribution(profile, _p_grid(params), params["momentum"]["amplitude_mode"])
    manifest.outputs.append(write_csv(prefix.parent / f"{prefix.name}_profile.csv",
                                      ["kx", "rho22_n"], [grid.kx_values, profile.values]))
    manifest.outputs.append(write_csv(prefix.parent / f"{prefix.name}_spectrum.csv",
                                      ["p", "intensity", "intensity_normalized"],
                                      [spec.p_values, spec.intensities, spec.normalized()]))
    derived = _common_derived(params, r, n)
    derived["n_zones"] = n
    derived["second_moment"] = second_moment(spec)
    derived["equivalent_finesse"] = _or_none(equivalent_finesse, r, n) if r > 0 else None
    manifest.derived.update(derived)


def _run_dynamics(sc: Scenario, prefix: Path, manifest: RunManifest):
    params = sc.parameters
    dyn = params["dynamics"]
    r = params["system"]["R"]
    system = _system(params, r)
    timing = ({"t0": dyn["t0"], "w": dyn["w"]} if dyn["shape"] == "gaussian" else
              {"t1": dyn["t1"], "r1": dyn["r1"], "t2": dyn["t2"], "r2": dyn["r2"]})
    envelopes = matched_envelopes(system, dyn["shape"], **timing)
    config = EvolutionConfig(dt=dyn["dt"], t_end=dyn["t_end"], steady_tolerance=dyn["steady_tolerance"],
                             steady_window=dyn["steady_window"], save_every=dyn["save_every"])
    traj = evolve(system, envelopes, dyn["kx"], DensityMatrix3.basis(3), config)
    manifest.outputs.append(write_csv(_sibling(prefix, ".csv"),
                                      ["t", "rho11", "rho22", "rho33", "abs_rho23"],
                                      [traj.times, traj.population(1), traj.population(2),
                                       traj.population(3), np.abs(traj.coherence(2, 3))]))
    dark = dark_state(system.omega_p, system.omega_s_peak * node_sin(dyn["kx"]))
    derived = _common_derived(params, r)
    derived.update({
        "kx": dyn["kx"],
        "final_rho22": float(traj.final.element(2, 2).real),
        "analytic_rho22": float(rho22_at(r, dyn["kx"])),
        "dark_state_fidelity": dark_state_fidelity(traj.final, dark),
        "steady_state_reached": steady_state_reached(traj, config),
    })
    manifest.derived.update(derived)


_RUNNERS = {
    "profile": _run_profile,
    "momentum": _run_momentum,
    "multizone": _run_multizone,
    "dynamics": _run_dynamics,
}


def _new_manifest(sc: Scenario) -> RunManifest:
    return RunManifest(
        tool="cptloc",
        version=__version__,
        scenario={"kind": sc.kind, "output": sc.output, "parameters": sc.parameters},
        started_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


def _record_error(manifest: RunManifest, exc: BaseException, member: Optional[str] = None):
    entry = {"type": type(exc).__name__, "message": str(exc), "exit_code": exit_code_for(exc)}
    if member is not None:
        entry["member"] = member
    if isinstance(exc, NumericalInstabilityError) and exc.time is not None:
        entry["time"] = exc.time
    manifest.errors.append(entry)


def _write_manifest(manifest: RunManifest, prefix: Path):
    path = prefix.parent / f"{prefix.name}.manifest.json"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            json.dump(manifest.to_dict(), fh, indent=2, default=_json_default)
            fh.write("\n")
        manifest.manifest_path = str(path)
    except OSError as exc:
        _record_error(manifest, exc)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {obj!r}")


def run_scenario(sc: Scenario, write_manifest: bool = True) -> RunManifest:
    """Execute a scenario, write its CSV files and manifest, and return the manifest.

    Errors raised by the numerical modules are recorded in the manifest
    rather than propagated; check ``manifest.exit_code``.
    """
    if sc.kind == "sweep":
        return run_sweep(sc)
    start = time.perf_counter()
    manifest = _new_manifest(sc)
    prefix = Path(sc.output)
    try:
        _RUNNERS[sc.kind](sc, prefix, manifest)
    except (CPTLocError, OSError) as exc:
        _record_error(manifest, exc)
    manifest.duration_s = time.perf_counter() - start
    if write_manifest:
        _write_manifest(manifest, prefix)
    return manifest


def _member_scenario(sc: Scenario, value) -> Scenario:
    params = json.loads(json.dumps(sc.parameters))
    kind = params["sweep"]["member_kind"]
    name = params["sweep"]["parameter"]
    if name == "R":
        params["system"]["R"] = float(value)
    else:
        params["multizone"]["n_zones"] = int(value)
    keep = [s for s in SECTIONS_BY_KIND[kind] if s != "scenario"]
    member_params = {k: params[k] for k in keep}
    if "dynamics" in member_params:
        member_params["dynamics"]["dt"] = None
        member_params["dynamics"]["save_every"] = None
        _fill_dynamics(member_params)
    prefix = Path(sc.output)
    output = str(prefix.parent / f"{prefix.name}_{name}{_tag(float(value))}")
    return Scenario(kind, output, member_params)


def _summary_row(sc: Scenario, value) -> List[float]:
    params = sc.parameters
    r = float(value) if params["sweep"]["parameter"] == "R" else params["system"]["R"]
    n = int(value) if params["sweep"]["parameter"] == "n_zones" else params["multizone"]["n_zones"]
    grid = make_grid(params["grid"]["wavelengths"], params["grid"]["samples"])
    profile = multizone_profile(r, n, grid)
    spec = momentum_distribution(profile, _p_grid(params), params["momentum"]["amplitude_mode"])
    formula = fwhm_formula(r) if r > 0 else None
    numeric = _or_none(fwhm_numeric, profile)
    nan = float("nan")
    return [r, n, nan if formula is None else formula, nan if numeric is None else numeric,
            second_moment(spec), 1.0 if _rna_verdict(params, r) else 0.0]


def run_sweep(sc: Scenario) -> RunManifest:
    """Run every member of a sweep, then write the aggregated summary CSV.

    Members run concurrently (``sweep.jobs`` threads) and each writes only
    its own files. A failing member does not stop the others; the sweep's
    manifest lists each member's status.
    """
    if sc.kind != "sweep":
        raise InvalidArgumentError("run_sweep needs a sweep scenario")
    start = time.perf_counter()
    manifest = _new_manifest(sc)
    prefix = Path(sc.output)
    values = sc.parameters["sweep"]["values"]
    members = [_member_scenario(sc, v) for v in values]

    with ThreadPoolExecutor(max_workers=sc.parameters["sweep"]["jobs"]) as pool:
        results = list(pool.map(run_scenario, members))

    rows = []
    for value, member, result in zip(values, members, results):
        manifest.members.append({
            "value": value,
            "output": member.output,
            "status": "ok" if result.ok else "error",
            "manifest": result.manifest_path,
            "outputs": result.outputs,
        })
        for err in result.errors:
            manifest.errors.append(dict(err, member=member.output))
        try:
            rows.append(_summary_row(sc, value))
        except CPTLocError as exc:
            _record_error(manifest, exc, member=member.output)

    if rows:
        cols = [np.array(c) for c in zip(*rows)]
        try:
            manifest.outputs.append(write_csv(
                prefix.parent / f"{prefix.name}_summary.csv",
                ["R", "n_zones", "fwhm_formula", "fwhm_numeric", "second_moment", "rna_verdict"], cols))
        except OSError as exc:
            _record_error(manifest, exc)
    manifest.derived["parameter"] = sc.parameters["sweep"]["parameter"]
    manifest.derived["values"] = values
    manifest.duration_s = time.perf_counter() - start
    _write_manifest(manifest, prefix)
    return manifest
