"""Data and SVG renderings for the four benchmark figures.

Each panel becomes ``<fig>_<panel>.csv`` plus ``<fig>_<panel>.svg``.  Panels
built from diagonalization use the sweep CSV schema; the free-space
prefactor panels (fig3) and the shift-deviation panel (fig5c) have their own
columns, listed in ``PANEL_COLUMNS``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import analytics, defaults
from ..core import K0, ChainParams
from ..io import OutputError, write_csv, write_json
from .fitting import fit_power_law, parity_aware_fit
from .sweep import CSV_COLUMNS, SweepSpec, run_sweep

FIGURES = ("fig2", "fig3", "fig4", "fig5")

FIG3_F_COLUMNS = ("N", "d_over_lambda", "gamma_over_Gamma", "xi", "parity", "F_discrete", "F_analytic")
FIG3_G_COLUMNS = ("N", "d_over_lambda", "gamma_over_Gamma", "xi", "parity",
                  "Gamma_fs_discrete", "Gamma_fs_analytic")
FIG5C_COLUMNS = ("N", "d_over_lambda", "gamma_over_Gamma", "xi", "J_num", "J_infty",
                 "deviation_num", "deviation_ana")

FIG2_SPACINGS = (0.02, 0.1, 0.25)
FIG3_SPACINGS = (0.01, 0.02, 0.03)
FIG3_N = tuple(range(10, 401))
FIG4_N = tuple(range(20, 201))
FIG5C_N = tuple(range(60, 301, 10))
FIG2_K0D = tuple(round(0.1 * k, 10) for k in range(1, 31))      # 0.1 .. 3.0
FIG5_K0D = tuple(round(0.05 * k, 10) for k in range(1, 21))     # 0.05 .. 1.0
NONIDEAL_D = defaults.SPACING
NONIDEAL_GAMMA = defaults.GAMMA_FS


def default_n_grid():
    start, stop, step = defaults.N_GRID
    return tuple(range(start, stop + 1, step))


def _d_from_k0d(k0d):
    return tuple(k / K0 for k in k0d)


@dataclass
class Panel:
    name: str
    columns: tuple
    rows: list
    title: str = ""
    x: str = "N"
    series: list = field(default_factory=list)  # (label, x, y, style)
    log: tuple = (False, False)


def _records_panel(name, records, columns=CSV_COLUMNS, x="N", obs="Gamma", title="", log=(False, True)):
    p = Panel(name=name, columns=columns, rows=list(records), title=title, x=x, log=log)
    groups = {}
    for r in p.rows:
        key = (r.d_over_lambda, r.xi) if x == "N" else (r.N, r.xi)
        groups.setdefault(key, []).append(r)
    for key, rows in sorted(groups.items()):
        xs = [r.N if x == "N" else K0 * r.d_over_lambda for r in rows]
        label = f"d={key[0]:g}λ ξ={key[1]}" if x == "N" else f"N={key[0]} ξ={key[1]}"
        num = [getattr(r, f"{obs}_num") for r in rows]
        ana = [getattr(r, f"{obs}_ana_total") for r in rows]
        p.series.append((label + " analytic", xs, ana, "-"))
        p.series.append((label + " numeric", xs, num, "o"))
    return p


def _fig2(workers, n_grid):
    recs = run_sweep(SweepSpec(n_grid, FIG2_SPACINGS, (0.0,), (1, 3)), workers)
    k0d = run_sweep(SweepSpec((100,), _d_from_k0d(FIG2_K0D), (0.0,), (1, 3)), workers)
    by_xi = {xi: [r for r in recs if r.xi == xi] for xi in (1, 3)}
    return [
        _records_panel("a", by_xi[1], title="Γ₁ vs N, γ=0"),
        _records_panel("b", by_xi[3], title="Γ₃ vs N, γ=0"),
        _records_panel("c", k0d, x="k0d", title="Γ vs k0d, N=100, γ=0"),
        _records_panel("d", by_xi[1], obs="J", title="J₁ vs N, γ=0", log=(False, False)),
        _records_panel("e", by_xi[3], obs="J", title="J₃ vs N, γ=0", log=(False, False)),
        _records_panel("f", k0d, x="k0d", obs="J", title="J vs k0d, N=100, γ=0", log=(False, False)),
    ]


def fig3_rows(d, n_values=FIG3_N, gamma=NONIDEAL_GAMMA, xi=1):
    rows = []
    for n in n_values:
        p = ChainParams(n, d, gamma)
        rows.append({
            "N": n, "d_over_lambda": d, "gamma_over_Gamma": gamma, "xi": xi,
            "parity": 1 if (n + xi) % 2 == 0 else -1,
            "F_discrete": analytics.fs_prefactor_discrete(p, xi),
            "F_analytic": analytics.fs_prefactor_analytic(p, xi),
            "Gamma_fs_discrete": analytics.gamma_fs_discrete(p, xi),
            "Gamma_fs_analytic": analytics.gamma_fs_analytic(p, xi),
        })
    return rows


def _fig3(workers, n_grid):
    panels = []
    data = {d: fig3_rows(d) for d in FIG3_SPACINGS}
    for letter, d in zip("abc", FIG3_SPACINGS):
        rows = data[d]
        ns = [r["N"] for r in rows]
        p = Panel(letter, FIG3_F_COLUMNS, rows, title=f"F vs N, d={d:g}λ, γ={NONIDEAL_GAMMA:g}")
        p.series = [("analytic", ns, [r["F_analytic"] for r in rows], "-"),
                    ("discrete", ns, [r["F_discrete"] for r in rows], "o")]
        panels.append(p)
    for letter, d in zip("def", FIG3_SPACINGS):
        rows = data[d]
        ns = [r["N"] for r in rows]
        p = Panel(letter, FIG3_G_COLUMNS, rows, title=f"Γ_fs vs N, d={d:g}λ", log=(True, True))
        p.series = [("analytic", ns, [r["Gamma_fs_analytic"] for r in rows], "-"),
                    ("discrete", ns, [r["Gamma_fs_discrete"] for r in rows], "o")]
        panels.append(p)
    return panels


def _decomposition_panel(name, records):
    p = Panel(name, CSV_COLUMNS, records, title=f"Γ_{records[0].xi} vs N, d={NONIDEAL_D:g}λ, "
              f"γ={NONIDEAL_GAMMA:g}", log=(False, True))
    ns = [r.N for r in records]
    p.series = [
        ("guided", ns, [r.Gamma_ana_1d for r in records], "-."),
        ("free space", ns, [r.Gamma_ana_fs for r in records], "--"),
        ("total", ns, [r.Gamma_ana_total for r in records], "-"),
        ("numeric", ns, [r.Gamma_num for r in records], "o"),
    ]
    return p


def _fig4(workers, n_grid):
    recs = run_sweep(SweepSpec(FIG4_N, (NONIDEAL_D,), (NONIDEAL_GAMMA,), (1, 3)), workers)
    return [_decomposition_panel(letter, [r for r in recs if r.xi == xi])
            for letter, xi in (("a", 1), ("b", 3))]


def fig5c_rows(records):
    rows = []
    for r in records:
        rows.append({
            "N": r.N, "d_over_lambda": r.d_over_lambda, "gamma_over_Gamma": r.gamma_over_Gamma,
            "xi": r.xi, "J_num": r.J_num, "J_infty": r.J_infty,
            "deviation_num": r.J_num - r.J_infty,
            "deviation_ana": math.pi**2 * r.xi**2 * r.C_d / (r.N + 1) ** 2,
        })
    return rows


def _fig5(workers, n_grid):
    recs = run_sweep(SweepSpec(n_grid, (NONIDEAL_D,), (NONIDEAL_GAMMA,), (1, 3)), workers)
    k0d = run_sweep(SweepSpec((100,), _d_from_k0d(FIG5_K0D), (NONIDEAL_GAMMA,), (1, 3)), workers)
    dev = run_sweep(SweepSpec(FIG5C_N, (NONIDEAL_D,), (NONIDEAL_GAMMA,), (1, 3)), workers)
    a = _records_panel("a", recs, obs="J", title="J vs N, d=0.02λ, γ=0.1", log=(False, False))
    b = _records_panel("b", k0d, x="k0d", obs="J", title="J vs k0d, N=100, γ=0.1", log=(False, False))
    xs = sorted({K0 * r.d_over_lambda for r in k0d})
    b.series.insert(0, ("J_inf", xs, [r.J_infty for r in k0d if r.xi == 1], "-"))
    rows = fig5c_rows(dev)
    c = Panel("c", FIG5C_COLUMNS, rows, title="J - J_inf vs N", log=(True, True))
    for xi in (1, 3):
        sub = [r for r in rows if r["xi"] == xi]
        ns = [r["N"] for r in sub]
        c.series.append((f"ξ={xi} (N+1)^-2 law", ns, [r["deviation_ana"] for r in sub], "-"))
        c.series.append((f"ξ={xi} numeric", ns, [r["deviation_num"] for r in sub], "o"))
    return [a, b, c]


_BUILDERS = {"fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5}


def figure_panels(fig_id: str, workers=None, n_grid=None) -> list:
    if fig_id not in _BUILDERS:
        raise ValueError(f"unknown figure {fig_id!r}; choose from {FIGURES}")
    return _BUILDERS[fig_id](workers, tuple(n_grid) if n_grid else default_n_grid())


def fig5_fits(rows) -> dict:
    out = {}
    for xi in sorted({r["xi"] for r in rows}):
        pts = [(r["N"], r["deviation_num"]) for r in rows if r["xi"] == xi]
        fit = fit_power_law(pts, (60, 300))
        out[f"xi={xi}"] = {"slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2}
    return out


def render_svg(panel: Panel, path: Path, fig_id: str) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "subradiance"
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for label, xs, ys, style in panel.series:
        ys = np.asarray(ys, dtype=float)
        if panel.log[1]:
            ys = np.where(ys > 0, ys, np.nan)
        if style == "o":
            ax.plot(xs, ys, "o", mfc="none", ms=3, label=label)
        else:
            ax.plot(xs, ys, style, lw=1.2, label=label)
    if panel.log[0]:
        ax.set_xscale("log")
    if panel.log[1]:
        ax.set_yscale("log")
    ax.set_xlabel("k₀d" if panel.x == "k0d" else "N")
    ax.set_title(f"{fig_id}({panel.name}) {panel.title}", fontsize=9)
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def reproduce_figure(fig_id: str, outdir, workers=None, n_grid=None, svg=True) -> list:
    """Write one CSV (and SVG) per panel of ``fig_id`` into ``outdir``."""
    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create {outdir}: {exc}") from exc
    panels = figure_panels(fig_id, workers, n_grid)
    files = []
    for p in panels:
        files.append(write_csv(p.rows, outdir / f"{fig_id}_{p.name}.csv", p.columns))
        if svg:
            files.append(render_svg(p, outdir / f"{fig_id}_{p.name}.svg", fig_id))
    if fig_id == "fig5":
        c = next(p for p in panels if p.name == "c")
        files.append(write_json([fig5_fits(c.rows)], outdir / "fig5_c_fits.json"))
    if fig_id == "fig4":
        fits = {}
        for p in panels:
            pts = [(r.N, r.Gamma_num) for r in p.rows]
            fits[p.name] = {k: (None if v is None else {"slope": v.slope, "r2": v.r2})
                            for k, v in parity_aware_fit(pts).items()}
        files.append(write_json([fits], outdir / "fig4_parity_fits.json"))
    return files
