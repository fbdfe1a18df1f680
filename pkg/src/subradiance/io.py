"""CSV/JSON persistence and run manifests.

CSV floats use Python's shortest round-trip repr; NaN is written as ``nan``
in CSV and ``null`` in JSON.  All files are UTF-8 with LF line endings.
"""
from __future__ import annotations

import csv
import json
import math
import platform
import time
from contextlib import contextmanager
from pathlib import Path

from . import __version__
from .errors import SubradianceError


class OutputError(SubradianceError, OSError):
    pass


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return ";".join(str(x) for x in v)
    return str(v)


def _row_dict(rec) -> dict:
    if isinstance(rec, dict):
        return rec
    return rec.as_row()


def _ensure_dir(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create directory {path.parent}: {exc}") from exc


def write_csv(rows, path, columns) -> Path:
    path = Path(path)
    _ensure_dir(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for rec in rows:
                d = _row_dict(rec)
                w.writerow([_fmt(d[c]) for c in columns])
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path) -> list:
    """Rows as dicts of strings."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, tuple):
        return list(v)
    return v


def write_json(rows, path, columns=None) -> Path:
    path = Path(path)
    _ensure_dir(path)
    out = []
    for rec in rows:
        d = _row_dict(rec)
        keys = columns or list(d)
        out.append({k: _json_safe(d[k]) for k in keys})
    try:
        path.write_text(json.dumps(out, indent=1) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def read_json(path) -> list:
    rows = json.loads(Path(path).read_text(encoding="utf-8"))
    for d in rows:
        for k, v in d.items():
            if v is None:
                d[k] = math.nan
    return rows


class StageTimer:
    """Wall-clock seconds per named stage, for the run manifest."""

    def __init__(self):
        self.stages = {}

    @contextmanager
    def stage(self, name):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.stages[name] = self.stages.get(name, 0.0) + time.perf_counter() - t0


def write_manifest(outdir, config: dict, stages: dict, files=()) -> Path:
    path = Path(outdir) / "run_manifest.json"
    _ensure_dir(path)
    doc = {
        "tool": "subradiance",
        "version": __version__,
        "python": platform.python_version(),
        "config": {k: _json_safe(v) for k, v in config.items()},
        "wall_clock_s": stages,
        "files": [str(Path(f).name) for f in files],
    }
    try:
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path
