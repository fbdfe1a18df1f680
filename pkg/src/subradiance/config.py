"""Run configuration: a flat ``key = value`` file with ``[section]`` headers,
overridden by command-line flags.

Example::

    [run]
    command = sweep
    out = results/
    format = csv
    workers = 4

    [params]
    n = 20:200:5, 300
    d = 0.02, 0.1
    gamma = 0.1
    xi = 1, 3

Lists are comma separated; ``start:stop:step`` ranges include ``stop``.
Blank lines and lines starting with ``#`` or ``;`` are ignored.
"""
from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import defaults
from .errors import ConfigError

COMMANDS = ("spectrum", "sweep", "figure", "verify", "fit")
FORMATS = ("csv", "json")
FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5")

SECTIONS = {
    "run": {"command", "out", "workers", "eig_tol", "format", "quick"},
    "params": {"n", "d", "gamma", "xi", "xi_max"},
    "figure": {"id"},
    "fit": {"input", "column", "window", "deviation"},
}


@dataclass
class RunConfig:
    command: str
    n: tuple = ()
    d: tuple = (defaults.SPACING,)
    gamma: tuple = (defaults.GAMMA_FS,)
    xi: tuple = (defaults.BRANCH,)
    xi_max: int | None = None
    out: str = "results"
    workers: int = defaults.WORKERS
    eig_tol: float = defaults.EIG_TOL
    format: str = "csv"
    figure: str | None = None
    quick: bool = False
    fit_input: str | None = None
    fit_column: str = "Gamma_num"
    fit_window: tuple | None = None
    fit_deviation: bool = False
    sources: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        d = asdict(self)
        d.pop("sources")
        return d


# -- value parsing -----------------------------------------------------------

def _parse_number(key, text, kind, location=None):
    try:
        if kind is int:
            val = float(text)
            if val != int(val):
                raise ValueError
            return int(val)
        return float(text)
    except ValueError:
        raise ConfigError(key, f"expected {'an integer' if kind is int else 'a number'}, got {text!r}",
                          location=location) from None


def parse_list(key, text, kind=float, location=None) -> tuple:
    """``1, 2, 10:20:5`` -> (1, 2, 10, 15, 20)."""
    if isinstance(text, (list, tuple)):
        text = ",".join(str(t) for t in text)
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise ConfigError(key, f"range must be start:stop:step, got {part!r}", location=location)
            start, stop, step = (_parse_number(key, b, kind, location) for b in bits)
            if step <= 0 or stop < start:
                raise ConfigError(key, f"empty or descending range {part!r}", location=location)
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            out.extend(kind(start + i * step) if kind is int else round(start + i * step, 12)
                       for i in range(count))
        else:
            out.append(_parse_number(key, part, kind, location))
    if not out:
        raise ConfigError(key, "empty list", location=location)
    return tuple(out)


def _parse_bool(key, text, location=None):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {text!r}", "true/false", location)


def read_config_file(path) -> dict:
    """Flat mapping ``{key: (value, location)}`` from a config file."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    section = None
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        loc = f"{path}:{lineno}"
        if not line or line[0] in "#;":
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("section", f"malformed header {line!r}", location=loc)
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ConfigError(section, "unknown section", ", ".join(SECTIONS), loc)
            continue
        if "=" not in line:
            raise ConfigError("syntax", f"expected key = value, got {line!r}", location=loc)
        key, val = (s.strip() for s in line.split("=", 1))
        if section is None:
            raise ConfigError(key, "key outside any [section]", location=loc)
        if key not in SECTIONS[section]:
            raise ConfigError(key, f"unknown key in [{section}]", ", ".join(sorted(SECTIONS[section])), loc)
        name = {"id": "figure", "input": "fit_input", "column": "fit_column",
                "window": "fit_window", "deviation": "fit_deviation"}.get(key, key)
        values[name] = (val, loc)
    return values


# -- validation --------------------------------------------------------------

def _check(key, ok, message, accepted, location=None):
    if not ok:
        raise ConfigError(key, message, accepted, location)


def build_config(file_values: dict, flag_values: dict) -> RunConfig:
    """Merge file values with flags (flags win) and validate."""
    merged = {k: v for k, v in file_values.items()}
    for k, v in flag_values.items():
        if v is not None:
            merged[k] = (v, "command line")

    def get(key):
        return merged.get(key, (None, None))

    command, loc = get("command")
    _check("command", command in COMMANDS, f"unknown command {command!r}", ", ".join(COMMANDS), loc)
    cfg = RunConfig(command=command)
    cfg.sources = {k: v[1] for k, v in merged.items()}

    raw, loc = get("n")
    if raw is not None:
        cfg.n = parse_list("n", raw, int, loc)
        _check("n", all(v >= 1 for v in cfg.n), f"got {cfg.n}", "integers >= 1", loc)
    raw, loc = get("d")
    if raw is not None:
        cfg.d = parse_list("d", raw, float, loc)
    _check("d", all(v > 0 and math.isfinite(v) for v in cfg.d), f"got {cfg.d}", "d/lambda > 0", loc)
    raw, loc = get("gamma")
    if raw is not None:
        cfg.gamma = parse_list("gamma", raw, float, loc)
    _check("gamma", all(v >= 0 and math.isfinite(v) for v in cfg.gamma), f"got {cfg.gamma}",
           "gamma/Gamma >= 0", loc)
    raw, loc = get("xi")
    if raw is not None:
        cfg.xi = parse_list("xi", raw, int, loc)
    _check("xi", all(v >= 1 for v in cfg.xi), f"got {cfg.xi}", "integers >= 1", loc)
    if cfg.n:
        _check("xi", max(cfg.xi) <= min(cfg.n), f"xi {max(cfg.xi)} exceeds N {min(cfg.n)}",
               f"1 <= xi <= {min(cfg.n)}", loc)
    raw, loc = get("xi_max")
    if raw is not None:
        cfg.xi_max = _parse_number("xi_max", raw, int, loc)
        _check("xi_max", cfg.xi_max >= max(cfg.xi), f"got {cfg.xi_max}", f">= {max(cfg.xi)}", loc)

    raw, loc = get("out")
    if raw is not None:
        cfg.out = str(raw)
    raw, loc = get("workers")
    if raw is None and os.environ.get("SUBRADIANCE_WORKERS"):
        raw, loc = os.environ["SUBRADIANCE_WORKERS"], "env SUBRADIANCE_WORKERS"
    if raw is not None:
        cfg.workers = _parse_number("workers", raw, int, loc)
        _check("workers", cfg.workers >= 1, f"got {cfg.workers}", "integer >= 1", loc)
    raw, loc = get("eig_tol")
    if raw is not None:
        cfg.eig_tol = _parse_number("eig_tol", raw, float, loc)
        _check("eig_tol", 0 < cfg.eig_tol <= 1e-6, f"got {cfg.eig_tol}", "(0, 1e-6]", loc)
    raw, loc = get("format")
    if raw is not None:
        cfg.format = str(raw).strip().lower()
        _check("format", cfg.format in FORMATS, f"got {raw!r}", ", ".join(FORMATS), loc)
    raw, loc = get("quick")
    if raw is not None:
        cfg.quick = raw if isinstance(raw, bool) else _parse_bool("quick", raw, loc)

    raw, loc = get("figure")
    if raw is not None:
        cfg.figure = str(raw).strip()
    if command == "figure":
        _check("figure", cfg.figure in FIGURE_IDS, f"got {cfg.figure!r}", ", ".join(FIGURE_IDS), loc)

    raw, loc = get("fit_input")
    if raw is not None:
        cfg.fit_input = str(raw)
    raw, loc = get("fit_column")
    if raw is not None:
        cfg.fit_column = str(raw)
    raw, loc = get("fit_window")
    if raw is not None:
        w = parse_list("window", str(raw).replace(":", ","), float, loc)
        _check("window", len(w) == 2 and w[0] < w[1], f"got {raw!r}", "lo:hi with lo < hi", loc)
        cfg.fit_window = w
    raw, loc = get("fit_deviation")
    if raw is not None:
        cfg.fit_deviation = raw if isinstance(raw, bool) else _parse_bool("deviation", raw, loc)
    if command == "fit":
        _check("input", cfg.fit_input is not None, "missing", "path to a sweep CSV or JSON", loc)

    if command in ("spectrum", "sweep"):
        _check("n", bool(cfg.n), "missing", "integers >= 1, e.g. 100 or 20:200:5", None)
    if command == "spectrum":
        for key in ("n", "d", "gamma"):
            _check(key, len(getattr(cfg, key)) == 1, "spectrum takes a single value",
                   "one number", cfg.sources.get(key))
    return cfg


def parse_config(path=None, flags: dict | None = None) -> RunConfig:
    """Validated RunConfig from an optional file plus flag overrides."""
    file_values = read_config_file(path) if path else {}
    return build_config(file_values, dict(flags or {}))
