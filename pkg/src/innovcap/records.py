"""Plain-text outputs: CSV tables, JSON summaries and their config sidecars.

Floats are written with ``repr`` so files are byte-identical across runs with
the same inputs.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, is_dataclass

import numpy as np

from .reservoir import ReadoutSeries, TrialEnsemble

SIDECAR_SUFFIX = ".meta.json"


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


def jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return None if math.isnan(x) or math.isinf(x) else x
    return obj


def write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_sidecar(path, config: dict, seed, extra: dict | None = None) -> str:
    """``<path>.meta.json`` holding the resolved config and seed."""
    meta = {"file": os.path.basename(path), "seed": seed, "config": config}
    if extra:
        meta.update(extra)
    side = str(path) + SIDECAR_SUFFIX
    write_json(side, meta)
    return side


def read_sidecar(path) -> dict:
    with open(str(path) + SIDECAR_SUFFIX) as fh:
        return json.load(fh)


def write_readout(series: ReadoutSeries, path, config: dict, seed) -> None:
    """Columns ``t, x_1 .. x_d``; offset, sampling interval and centering go in the sidecar."""
    header = ["t"] + [f"x_{i + 1}" for i in range(series.d)]
    rows = (list(r) for r in np.column_stack([series.times, series.data]))
    write_csv(path, header, rows)
    write_sidecar(path, config, seed, {"t0": series.t0, "dt_sample": series.dt_sample, "centered": series.centered})


def read_readout(path) -> tuple[ReadoutSeries, dict]:
    header, rows = read_csv(path)
    if not header or header[0] != "t":
        raise ValueError("not a readout CSV")
    data = np.array([[float(x) for x in r[1:]] for r in rows]).reshape(len(rows), len(header) - 1)
    meta = read_sidecar(path)
    return ReadoutSeries(data, meta["dt_sample"], int(meta["t0"]), bool(meta["centered"])), meta


def write_ensemble(ens: TrialEnsemble, directory, config: dict, seed) -> None:
    """``input.csv`` (``t, u``) plus ``trial_XXX.csv`` per trial, each with a sidecar."""
    os.makedirs(directory, exist_ok=True)
    dt = ens.trials[0].dt_sample
    write_csv(os.path.join(directory, "input.csv"), ["t", "u"], ([k * dt, x] for k, x in enumerate(ens.input)))
    write_sidecar(os.path.join(directory, "input.csv"), config, seed, {"K": ens.K, "trial_seeds": ens.seeds})
    for k, tr in enumerate(ens.trials):
        write_readout(tr, os.path.join(directory, f"trial_{k:03d}.csv"), config, ens.seeds[k])


def read_ensemble(directory) -> TrialEnsemble:
    _, rows = read_csv(os.path.join(directory, "input.csv"))
    u = np.array([float(r[1]) for r in rows])
    meta = read_sidecar(os.path.join(directory, "input.csv"))
    trials = [read_readout(os.path.join(directory, f"trial_{k:03d}.csv"))[0] for k in range(meta["K"])]
    return TrialEnsemble(u, trials, list(meta["trial_seeds"]))
