"""File formats: sample ingestion, plan/spec/result JSON, manifests, plot data.

Two sample formats exist: ``csv`` (decimal text, one sample per row,
written at 17 significant digits so float64 values round-trip exactly)
and ``raw`` (little-endian float64, row-major, for large batches).
Plans, specs, results, and manifests are JSON with sorted keys, so equal
objects serialize to identical bytes.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .core import TesterConfig
from .distributions import DistributionSpec, Family, Seed
from .experiments import CellResult, ExperimentPlan, ExperimentResult
from .validation import check_positive_int, check_samples

__all__ = [
    "DataFormat",
    "RunManifest",
    "read_samples",
    "write_samples",
    "spec_to_dict",
    "spec_from_dict",
    "config_to_dict",
    "config_from_dict",
    "plan_to_dict",
    "plan_from_dict",
    "result_to_dict",
    "load_spec",
    "load_plan",
    "dump_json",
    "write_result",
    "write_plot_data",
]


class DataFormat(str, enum.Enum):
    CSV_ROWS = "csv"
    RAW_F64_LE = "raw"


def _read_csv(path: Path) -> np.ndarray:
    rows: list[list[float]] = []
    width = None
    with open(path, newline="") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError(f"{path}: line {line_no}: expected {width} fields, got {len(row)}")
            values = []
            for col, token in enumerate(row):
                try:
                    values.append(float(token))
                except ValueError:
                    raise ValueError(
                        f"{path}: line {line_no}, column {col}: not a number: {token.strip()!r}"
                    ) from None
            rows.append(values)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def _read_raw(path: Path, dim: int) -> np.ndarray:
    dim = check_positive_int(dim, "dim")
    payload = Path(path).read_bytes()
    if len(payload) == 0:
        raise ValueError(f"{path}: empty file")
    if len(payload) % (8 * dim) != 0:
        raise ValueError(
            f"{path}: byte length {len(payload)} is not divisible by 8*dim = {8 * dim}"
        )
    return np.frombuffer(payload, dtype="<f8").reshape(-1, dim).astype(np.float64)


def read_samples(path, fmt: DataFormat | str, dim: int | None = None) -> np.ndarray:
    """Load a sample batch; raw ingestion requires the row width ``dim``."""
    fmt = DataFormat(fmt)
    path = Path(path)
    if fmt is DataFormat.CSV_ROWS:
        arr = _read_csv(path)
        if dim is not None and arr.shape[1] != dim:
            raise ValueError(f"{path}: rows have {arr.shape[1]} fields, expected dim={dim}")
    else:
        if dim is None:
            raise ValueError("raw format requires dim")
        arr = _read_raw(path, dim)
    return check_samples(arr, name=str(path))


def write_samples(path, X, fmt: DataFormat | str) -> None:
    fmt = DataFormat(fmt)
    X = check_samples(X)
    path = Path(path)
    if fmt is DataFormat.CSV_ROWS:
        with open(path, "w", newline="") as fh:
            for row in X:
                fh.write(",".join(f"{v:.17g}" for v in row))
                fh.write("\n")
    else:
        path.write_bytes(np.ascontiguousarray(X, dtype="<f8").tobytes())


# --- JSON codecs -----------------------------------------------------------


def spec_to_dict(spec: DistributionSpec) -> dict:
    factor = spec.cov_factor
    if isinstance(factor, np.ndarray):
        factor = factor.tolist()
    return {
        "family": spec.family.value,
        "dim": spec.dim,
        "mean": spec.mean.tolist(),
        "cov_factor": factor,
        "scale": spec.scale,
    }


def spec_from_dict(d: dict, where: str = "spec") -> DistributionSpec:
    if not isinstance(d, dict):
        raise ValueError(f"{where}: expected an object, got {type(d).__name__}")
    unknown = set(d) - {"family", "dim", "mean", "cov_factor", "scale"}
    if unknown:
        raise ValueError(f"{where}: unknown fields {sorted(unknown)}")
    if "dim" not in d:
        raise ValueError(f"{where}.dim: required")
    try:
        return DistributionSpec(
            dim=d["dim"],
            family=Family(d.get("family", "gaussian")),
            mean=d.get("mean"),
            cov_factor=d.get("cov_factor"),
            scale=d.get("scale", 1.0),
        )
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from None


def config_to_dict(config: TesterConfig) -> dict:
    return {
        "epsilon": config.epsilon,
        "dim": config.dim,
        "c_star": config.c_star,
        "n": config.n,
        "threshold": config.threshold,
    }


def config_from_dict(d: dict, where: str = "config") -> TesterConfig:
    if not isinstance(d, dict):
        raise ValueError(f"{where}: expected an object, got {type(d).__name__}")
    unknown = set(d) - {"epsilon", "dim", "c_star", "n", "threshold"}
    if unknown:
        raise ValueError(f"{where}: unknown fields {sorted(unknown)}")
    for key in ("epsilon", "dim"):
        if key not in d:
            raise ValueError(f"{where}.{key}: required")
    try:
        # threshold is derived; a stored value is checked against sqrt(3d)/n
        config = TesterConfig.from_rule(
            d["epsilon"], d["dim"], d.get("c_star", 1.0), n=d.get("n")
        )
        if "threshold" in d and not np.isclose(d["threshold"], config.threshold, rtol=1e-12):
            raise ValueError(
                f"threshold {d['threshold']!r} inconsistent with sqrt(3*dim)/n = {config.threshold!r}"
            )
        return config
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from None


def seed_from_value(value, where: str = "seed") -> Seed:
    try:
        if isinstance(value, dict):
            return Seed(value.get("value", 0), value.get("trial_index", 0))
        return Seed(value)
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from None


def plan_to_dict(plan: ExperimentPlan) -> dict:
    return {
        "name": plan.name,
        "grid": [config_to_dict(c) for c in plan.grid],
        "null_spec": None if plan.null_spec is None else spec_to_dict(plan.null_spec),
        "alt_specs": [spec_to_dict(s) for s in plan.alt_specs],
        "trials": plan.trials,
        "seed": {"value": plan.base_seed.value, "trial_index": plan.base_seed.trial_index},
        "record_timing": plan.record_timing,
    }


def plan_from_dict(d: dict, where: str = "plan") -> ExperimentPlan:
    if not isinstance(d, dict):
        raise ValueError(f"{where}: expected an object, got {type(d).__name__}")
    known = {"name", "grid", "null_spec", "alt_specs", "trials", "seed", "record_timing"}
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"{where}: unknown fields {sorted(unknown)}")
    name = d.get("name")
    if not name or not isinstance(name, str):
        raise ValueError(f"{where}.name: required nonempty string")
    grid_raw = d.get("grid")
    if not isinstance(grid_raw, list) or not grid_raw:
        raise ValueError(f"{where}.grid: required nonempty list")
    grid = tuple(
        config_from_dict(entry, where=f"{where}.grid[{i}]") for i, entry in enumerate(grid_raw)
    )
    null_spec = d.get("null_spec")
    if null_spec is not None:
        null_spec = spec_from_dict(null_spec, where=f"{where}.null_spec")
    alt_raw = d.get("alt_specs", [])
    if not isinstance(alt_raw, list):
        raise ValueError(f"{where}.alt_specs: expected a list")
    alt_specs = tuple(
        spec_from_dict(entry, where=f"{where}.alt_specs[{i}]") for i, entry in enumerate(alt_raw)
    )
    trials = d.get("trials", 1000)
    base_seed = seed_from_value(d.get("seed", 0), where=f"{where}.seed")
    record_timing = d.get("record_timing", False)
    if not isinstance(record_timing, bool):
        raise ValueError(f"{where}.record_timing: expected true/false")
    try:
        return ExperimentPlan(
            name=name,
            grid=grid,
            null_spec=null_spec,
            alt_specs=alt_specs,
            trials=trials,
            base_seed=base_seed,
            record_timing=record_timing,
        )
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from None


def _cell_to_dict(cell: CellResult) -> dict:
    return {
        "config": config_to_dict(cell.config),
        "spec": spec_to_dict(cell.spec),
        "role": cell.role,
        "trials": cell.trials,
        "accept_rate": cell.accept_rate,
        "wilson_ci": list(cell.wilson_ci),
        "mean_z": cell.mean_z,
        "var_z": cell.var_z,
        "mean_runtime_ns_per_sample_coord": cell.mean_runtime_ns_per_sample_coord,
        "error": cell.error,
    }


def result_to_dict(result: ExperimentResult) -> dict:
    return {
        "plan_name": result.plan_name,
        "completed_trials": result.completed_trials,
        "complete": result.complete,
        "cells": [_cell_to_dict(c) for c in result.cells],
    }


def load_spec(path) -> DistributionSpec:
    return spec_from_dict(_load_json(path), where=str(path))


def load_plan(path) -> ExperimentPlan:
    return plan_from_dict(_load_json(path), where=str(path))


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON: {exc}") from None


def dump_json(obj: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_result(result: ExperimentResult, path) -> None:
    dump_json(result_to_dict(result), path)


# --- run manifests ---------------------------------------------------------


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to re-run a command to identical output (modulo
    timestamps): the command line, the full config, the seed, and the tool
    version."""

    command: str
    config: dict
    seed: dict
    tool_version: str
    started_at: str
    finished_at: str

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def manifest_path(out_path) -> Path:
    return Path(str(out_path) + ".manifest.json")


# --- plot data -------------------------------------------------------------


def write_plot_data(result: ExperimentResult, out_stem) -> list[Path]:
    """One columnar text file per series: x, accept_rate, and the Wilson CI
    bounds.

    A series collects, across the grid, the cell at the same position
    within each config's block ("null", "alt0", "alt1", ...); x is the
    grid dimension when it varies across the series, else epsilon when it
    varies, else the cell index.
    """
    out_stem = Path(out_stem)
    groups: dict[str, list[CellResult]] = {}
    block_config = None
    alt_ordinal = 0
    for cell in result.cells:
        if cell.config != block_config:
            block_config = cell.config
            alt_ordinal = 0
        if cell.role == "null":
            label = "null"
        else:
            label = f"alt{alt_ordinal}"
            alt_ordinal += 1
        groups.setdefault(label, []).append(cell)
    written = []
    for label, cells in groups.items():
        dims = {c.config.dim for c in cells}
        epsilons = {c.config.epsilon for c in cells}
        if len(dims) > 1:
            x_name, x_of = "dim", lambda i, c: c.config.dim
        elif len(epsilons) > 1:
            x_name, x_of = "epsilon", lambda i, c: c.config.epsilon
        else:
            x_name, x_of = "cell", lambda i, c: i
        path = Path(f"{out_stem}.{label}.dat")
        with open(path, "w") as fh:
            fh.write(f"# {x_name} accept_rate wilson_lo wilson_hi\n")
            for i, cell in enumerate(cells):
                lo, hi = cell.wilson_ci
                fh.write(f"{x_of(i, cell):.17g} {cell.accept_rate:.17g} {lo:.17g} {hi:.17g}\n")
        written.append(path)
    return written
