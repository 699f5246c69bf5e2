# persistence.py
"""
Result files.

diagnostics.csv   one row per snapshot: time, mass, entropy, <species>_c0, <species>_c1 ..., min_value
summary.json      final norms, mass and entropy drift, run statistics and metadata
snapshots.csv     '#'-prefixed metadata lines, then one row per (time, species) with the
                  node values in row-major order
snapshots.npz     the same content as arrays: times, states, extent, points, species

Floats in CSV files use %.17g so a rerun with the same config reproduces the bytes.
"""

import csv
import json
import logging
import math
import os
from typing import Any, Dict, List, Sequence

import numpy as np

from rdlab.config import OUTPUT_SETTINGS
from rdlab.errors import PersistenceError
from rdlab.grid import Grid
from rdlab.simulator import Trajectory

logger = logging.getLogger(__name__)


def ensure_dir(path: str) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise PersistenceError(f"Cannot create output directory {path}: {e}") from e
    return path


def format_float(value: float) -> str:
    return OUTPUT_SETTINGS["float_format"] % value


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def _clean(value):
    """Non-finite floats become strings so the document stays strict JSON."""
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return str(float(value))
    return value


def write_json(data: Dict[str, Any], path: str) -> str:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(_clean(data), fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")
    except OSError as e:
        raise PersistenceError(f"Cannot write {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path


def write_rows(path: str, header: Sequence[str], rows: List[Sequence[Any]]) -> str:
    """CSV with floats in %.17g and everything else as str."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    except OSError as e:
        raise PersistenceError(f"Cannot write {path}: {e}") from e
    logger.info("Wrote %s (%d rows)", path, len(rows))
    return path


def write_diagnostics_csv(trajectory: Trajectory, path: str) -> str:
    rows = [[float(v) for v in record.to_row()] for record in trajectory.diagnostics]
    return write_rows(path, trajectory.diagnostics_header(), rows)


def run_summary(trajectory: Trajectory, K: float = 0.0) -> Dict[str, Any]:
    """
    Summary of a run. mass_drift_rel is max_t |M(t) - M(0)| / M(0); entropy_drift_rel is the
    largest relative increase of e^{-Kt} E(t) between consecutive snapshots (negative when it
    decreases throughout).
    """
    masses = trajectory.masses
    entropies = trajectory.entropies
    tilted = np.exp(-K * trajectory.times) * entropies
    increases = np.diff(tilted) / np.maximum(np.abs(tilted[:-1]), np.finfo(float).tiny)
    mass_steps = np.diff(masses) / max(abs(masses[0]), np.finfo(float).tiny)
    final = trajectory.diagnostics[-1]
    return {
        "network": trajectory.network.name if trajectory.network else None,
        "species": list(trajectory.species),
        "diffusivities": list(trajectory.diffusivities),
        "completed": trajectory.completed,
        "t_final": float(trajectory.times[-1]),
        "snapshots": int(len(trajectory.times)),
        "grid": trajectory.grid.to_dict(),
        "mass_initial": float(masses[0]),
        "mass_final": float(masses[-1]),
        "mass_drift_rel": float(np.max(np.abs(masses - masses[0])) / max(abs(masses[0]), np.finfo(float).tiny)),
        "mass_max_increase_rel": float(mass_steps.max()) if mass_steps.size else 0.0,
        "entropy_initial": float(entropies[0]),
        "entropy_final": float(entropies[-1]),
        "entropy_K": float(K),
        "entropy_drift_rel": float(increases.max()) if increases.size else 0.0,
        "sup_norm": trajectory.sup_norm(),
        "min_value": float(min(r.min_value for r in trajectory.diagnostics)),
        "final_norms": {s: n.to_dict() for s, n in zip(trajectory.species, final.norms)},
        "stats": dict(trajectory.stats),
        "metadata": dict(trajectory.metadata),
    }


def write_snapshots_csv(trajectory: Trajectory, path: str) -> str:
    grid = trajectory.grid
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"# extent={','.join(format_float(L) for L in grid.extent)}\n")
            fh.write(f"# points={','.join(str(n) for n in grid.points)}\n")
            fh.write(f"# species={','.join(trajectory.species)}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["time", "species"] + [f"v{j}" for j in range(int(np.prod(grid.shape)))])
            for t, state in zip(trajectory.times, trajectory.states):
                for name, values in zip(trajectory.species, state):
                    writer.writerow([format_float(t), name] + [format_float(v) for v in values.ravel()])
    except OSError as e:
        raise PersistenceError(f"Cannot write {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path


def write_snapshots_npz(trajectory: Trajectory, path: str) -> str:
    grid = trajectory.grid
    try:
        np.savez(path, times=trajectory.times, states=trajectory.states, extent=np.array(grid.extent),
                 points=np.array(grid.points), species=np.array(trajectory.species),
                 diffusivities=np.array(trajectory.diffusivities))
    except OSError as e:
        raise PersistenceError(f"Cannot write {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path


def read_snapshots_csv(path: str) -> Dict[str, Any]:
    """Inverse of write_snapshots_csv: grid, species, times and states (n_times, m, *shape)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            meta = {}
            line = fh.readline()
            while line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
                line = fh.readline()
            rows = list(csv.reader(fh))
    except OSError as e:
        raise PersistenceError(f"Cannot read {path}: {e}") from e
    extent = tuple(float(v) for v in meta["extent"].split(","))
    points = tuple(int(v) for v in meta["points"].split(","))
    species = tuple(meta["species"].split(","))
    grid = Grid(extent, points)
    m = len(species)
    values = np.array([[float(v) for v in row[2:]] for row in rows])
    times = np.array([float(row[0]) for row in rows[::m]])
    states = values.reshape((len(times), m) + grid.shape)
    return {"grid": grid, "species": species, "times": times, "states": states}


def read_snapshots_npz(path: str) -> Dict[str, Any]:
    try:
        with np.load(path) as data:
            grid = Grid(tuple(float(v) for v in data["extent"]), tuple(int(v) for v in data["points"]))
            return {"grid": grid, "species": tuple(str(s) for s in data["species"]),
                    "times": data["times"].copy(), "states": data["states"].copy()}
    except OSError as e:
        raise PersistenceError(f"Cannot read {path}: {e}") from e


def write_trajectory(trajectory: Trajectory, out_dir: str, snapshot_format: str = None, K: float = 0.0,
                     extra_summary: Dict[str, Any] = None) -> Dict[str, str]:
    """Diagnostics, snapshots and summary into out_dir; returns the written paths by kind."""
    snapshot_format = snapshot_format or OUTPUT_SETTINGS["snapshot_format"]
    ensure_dir(out_dir)
    paths = {"diagnostics": write_diagnostics_csv(trajectory, os.path.join(out_dir, "diagnostics.csv"))}
    if snapshot_format == "npz":
        paths["snapshots"] = write_snapshots_npz(trajectory, os.path.join(out_dir, "snapshots.npz"))
    else:
        paths["snapshots"] = write_snapshots_csv(trajectory, os.path.join(out_dir, "snapshots.csv"))
    summary = run_summary(trajectory, K)
    summary.update(extra_summary or {})
    paths["summary"] = write_json(summary, os.path.join(out_dir, "summary.json"))
    return paths
