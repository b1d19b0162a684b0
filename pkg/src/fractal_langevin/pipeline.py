"""Config-driven runs: validate a JSON config, simulate, analyze, write a manifest."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, analysis, io
from .curve import CurveSpec
from .errors import SchemaError
from .fcalculus import build_staircase
from .langevin import RunConfig, map_to_curve, simulate_ensemble
from .noise import NoiseModel

SCHEMA_VERSION = 1

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema", "noise", "t_end", "n_steps", "n_walkers", "seed"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "curve": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "motif": {"type": "string", "minLength": 1},
                "depth": {"type": "integer", "minimum": 0, "maximum": 12},
                "origin": {"type": "number"},
            },
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "required": ["mu", "D"],
            "properties": {
                "family": {"enum": ["stable"]},
                "mu": {"type": "number", "exclusiveMinimum": 0, "maximum": 2},
                "D": {"type": "number", "minimum": 0},
            },
        },
        "t_end": {"type": "number", "exclusiveMinimum": 0},
        "n_steps": {"type": "integer", "minimum": 1},
        "n_walkers": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "record_times": {"type": "array", "items": {"type": "integer", "minimum": 0},
                         "minItems": 1},
        "J0": {"type": "number"},
        "tests": {"type": "array", "items": {"enum": ["ks", "ecf", "moments"]}},
        "k_grid": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
        "moment_q": {"type": "number", "exclusiveMinimum": 0},
    },
}


@dataclass(frozen=True)
class Job:
    """A validated config: the run itself plus the requested checks."""

    run: RunConfig
    tests: tuple
    k_grid: np.ndarray
    moment_q: float
    raw: dict = field(repr=False)


@dataclass
class Manifest:
    tool_version: str
    config_hash: str
    seed: int
    started: str
    finished: str
    files: list
    reports: dict
    passed: bool

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def config_hash(raw):
    return hashlib.sha256(canonical_json(raw).encode()).hexdigest()


def bundled_config(name):
    """Path of a demo config shipped with the package."""
    return resources.files("fractal_langevin") / "configs" / name


def resolve_config_path(path):
    p = Path(path)
    if p.exists():
        return p
    candidate = bundled_config(p.name)
    if candidate.is_file():
        return Path(str(candidate))
    raise FileNotFoundError(path)


def parse_config(raw) -> Job:
    """Validate a config mapping; raises :class:`SchemaError` naming the bad key."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    err = jsonschema.exceptions.best_match(validator.iter_errors(raw))
    if err is not None:
        path = ".".join(str(p) for p in err.absolute_path)
        if err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            path = ".".join([path, extra[0]]) if path else extra[0]
            raise SchemaError(f"unknown key {extra[0]!r}", path)
        raise SchemaError(err.message, path)
    n_steps = raw["n_steps"]
    rec = raw.get("record_times")
    if rec is not None and max(rec) > n_steps:
        raise SchemaError(f"record step {max(rec)} exceeds n_steps={n_steps}", "record_times")
    noise = raw["noise"]
    model = NoiseModel(float(noise["mu"]), float(noise["D"]), family=noise.get("family", "stable"))
    curve = CurveSpec(**raw["curve"]) if "curve" in raw else None
    run = RunConfig(model, float(raw["t_end"]), n_steps, raw["n_walkers"], raw["seed"],
                    tuple(rec) if rec is not None else None, curve, float(raw.get("J0", 0.0)))
    tests = tuple(raw.get("tests", ["ks"] if model.mu == 2.0 else ["ecf"]))
    kmin, kmax, nk = raw.get("k_grid", [0.1, 5.0, 20])
    return Job(run, tests, np.linspace(kmin, kmax, int(nk)), float(raw.get("moment_q", 0.5)), raw)


def load_config(path) -> Job:
    path = resolve_config_path(path)
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return parse_config(raw)


def run_reports(job, ensemble):
    cfg = job.run
    mu, D = cfg.noise.mu, cfg.noise.D
    t = float(ensemble.times[-1])
    final = ensemble.J[-1]
    reports = {}
    for name in job.tests:
        if name == "ks":
            reports["ks"] = analysis.ks_gaussian_test(final, D, t)
        elif name == "ecf":
            reports["ecf"] = analysis.ecf_distance(final, mu, D, t, job.k_grid)
        elif name == "moments":
            slope = analysis.fractional_moment_scaling(ensemble, job.moment_q, mu=mu)
            target = job.moment_q / mu
            reports["moments"] = analysis.FitReport(
                f"moment_exponent_q{job.moment_q:g}", abs(slope - target), 0.05, bool(abs(slope - target) <= 0.05),
                ensemble.n_walkers)
    return reports


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _stamp():
    return time.strftime("%Y-%m-%dT%H:%M:%S%z")


def run_pipeline(config_path, out_dir, threads=1) -> Manifest:
    """Curve, staircase, simulation, analysis; every output is listed in the manifest."""
    started = _stamp()
    job = load_config(config_path)
    cfg = job.run
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    ensemble = simulate_ensemble(cfg, threads=threads)
    if cfg.curve is not None:
        table = build_staircase(cfg.curve.build(), cfg.curve.origin)
        io.write_staircase_csv(table, out / "staircase.csv")
        written.append(out / "staircase.csv")
        ensemble = map_to_curve(ensemble, table)
        io.emit_plot_data(ensemble, "trajectory2d", out / "trajectory.csv")
        written.append(out / "trajectory.csv")
    io.write_ensemble_bin(ensemble, out / "ensemble.bin")
    written.append(out / "ensemble.bin")
    if cfg.n_walkers >= 100:
        io.emit_plot_data(ensemble, "density", out / "density.csv")
        written.append(out / "density.csv")

    reports = run_reports(job, ensemble)
    with io.atomic_write(out / "report.json") as fh:
        json.dump({k: r.to_dict() for k, r in reports.items()}, fh, indent=2, sort_keys=True)
    written.append(out / "report.json")

    manifest = Manifest(
        tool_version=__version__,
        config_hash=config_hash(job.raw),
        seed=cfg.seed,
        started=started,
        finished=_stamp(),
        files=[{"path": p.name, "sha256": _sha256(p)} for p in written],
        reports={k: r.to_dict() for k, r in reports.items()},
        passed=all(r.passed for r in reports.values()),
    )
    with io.atomic_write(out / "manifest.json") as fh:
        fh.write(manifest.to_json())
    return manifest
