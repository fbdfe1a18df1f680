"""Internal identity suite behind ``subradiance verify``.

Each check returns a ``CheckResult``; the command exits non-zero if any
check fails and names the failing checks.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import analytics, core
from .hamiltonian import build_total
from .spectrum import eigendecompose


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    metric: float
    tolerance: float
    detail: str = ""


def _grid(quick):
    return np.logspace(-3, 3, 61 if quick else 601)


def check_kernel_reciprocity(quick=False) -> CheckResult:
    """K_fs and L_fs against 2 Re/Im [V(x) e^{ix}] / gamma.

    For K_fs the closed form cancels terms of size ~1/x^3 down to O(1), so
    the error is measured relative to the largest term magnitude (the scale
    at which double precision can resolve the identity).  L_fs has no such
    cancellation and is measured relative to its value.
    """
    tol = 1e-12
    x = _grid(quick)
    prod = core.coupling_vjl(x, 1.0) * np.exp(1j * x)
    k = core.kernel_kfs(x)
    l = core.kernel_lfs(x)
    term_scale = 1.5 * np.maximum.reduce([np.abs(np.sin(x) / x), np.abs(np.cos(x) / x**2),
                                          np.abs(np.sin(x) / x**3)])
    err_k = np.abs(2 * prod.real - k) / np.maximum(np.abs(k), term_scale)
    err_l = np.abs(2 * prod.imag - l) / np.abs(l)
    plain = float(np.max(np.abs(2 * prod.real - k) / np.abs(k)))
    metric = float(max(err_k.max(), err_l.max()))
    return CheckResult(
        "kernel_reciprocity", metric <= tol, metric, tol,
        f"{x.size} pts on [1e-3, 1e3]; value-relative K error {plain:.1e}",
    )


def check_kernel_continuity(quick=False) -> CheckResult:
    tol = 1e-10
    thr = core.KFS_SERIES_THRESHOLD
    below = core.kernel_kfs(np.nextafter(thr, 0.0))
    above = core.kernel_kfs(thr)
    err = abs(above - below)
    return CheckResult("kernel_continuity", err <= tol, err, tol, f"series/closed-form switch at {thr:g}")


def check_angular_identity(quick=False) -> CheckResult:
    tol = 1e-9
    grid = [0.1, 1.0, 10.0, 100.0, math.pi] if quick else list(np.logspace(-2, 2, 41)) + [math.pi]
    err = analytics.verify_angular_identity(grid)
    small = abs(analytics.angular_integral(1e-8) - 4.0 / 3.0)
    metric = max(err, small)
    return CheckResult("angular_identity", metric <= tol, metric, tol, f"{len(grid)} angles + theta->0")


def check_autocorrelation(quick=False) -> CheckResult:
    tol = 1e-12
    worst, worst_imag, cases = 0.0, 0.0, 0
    for n in range(1, (12 if quick else 30) + 1):
        p = core.ChainParams(n, 0.1)
        for xi in range(1, min(5, n) + 1):
            mode = core.dirichlet_mode(p, xi)
            closed = core.autocorrelation_series(p, xi)
            for lag in range(n):
                brute = core.autocorrelation_direct(mode, lag)
                worst = max(worst, abs(closed[lag] - brute.real))
                worst_imag = max(worst_imag, abs(brute.imag))
                cases += 1
    metric = max(worst, worst_imag)
    return CheckResult("autocorrelation_oracle", metric <= tol, metric, tol, f"{cases} (N, xi, lag) cases")


def check_alternating_series(quick=False) -> CheckResult:
    tol = 1e-8
    terms = 10**5
    errs = []
    bound_ok = True
    probe = [1, 2, 3, 10, 100, 1000, 10**4] if quick else list(range(1, 200)) + [10**3, 5 * 10**3, 10**4]
    for kind, power in (("zeta3", 3), ("log2", 1)):
        limit = analytics.SERIES_LIMIT[kind]
        errs.append(abs(analytics.alternating_series_limit(kind, terms) - limit))
        for m in probe:
            if abs(analytics.alternating_series(kind, m) - limit) > 1.0 / (m + 1) ** power:
                bound_ok = False
    metric = max(errs)
    return CheckResult(
        "alternating_series", metric <= tol and bound_ok, metric, tol,
        f"{terms} terms; remainder bound {'holds' if bound_ok else 'VIOLATED'}",
    )


def check_sum_rule(quick=False, seed=12345) -> CheckResult:
    tol_rel = 1e-9
    rng = np.random.default_rng(seed)
    worst = 0.0
    count = 8 if quick else 20
    for _ in range(count):
        n = int(rng.integers(2, 31))
        p = core.ChainParams(n, float(rng.uniform(0.01, 0.45)), float(rng.uniform(0.0, 0.5)))
        h = build_total(p)
        spec = eigendecompose(h)
        worst = max(worst, abs(spec.eigenvalues.sum() - np.trace(h.matrix)) / n)
        worst = max(worst, abs(spec.linewidths.sum() - n * (1.0 + p.gamma_fs)) / n)
    return CheckResult("eigenvalue_sum_rule", worst <= tol_rel, worst, tol_rel, f"{count} random chains")


def check_two_atom(quick=False) -> CheckResult:
    tol = 1e-12
    worst = 0.0
    for beta in (math.pi, 0.3, 1.0, 2.0, 2.9):
        p = core.ChainParams(2, beta / core.K0)
        vals = np.sort_complex(eigendecompose(build_total(p)).eigenvalues)
        exact = np.sort_complex(np.array([-0.5j * (1 + np.exp(1j * p.beta)),
                                          -0.5j * (1 - np.exp(1j * p.beta))]))
        worst = max(worst, float(np.max(np.abs(vals - exact))))
    return CheckResult("two_atom_exact", worst <= tol, worst, tol, "eigenvalues -(i/2)(1 ± e^{iβ})")


CHECKS = (
    check_kernel_reciprocity,
    check_kernel_continuity,
    check_angular_identity,
    check_autocorrelation,
    check_alternating_series,
    check_sum_rule,
    check_two_atom,
)


def run_checks(quick=False):
    results = []
    for fn in CHECKS:
        name = fn.__name__.replace("check_", "")
        t0 = time.perf_counter()
        try:
            res = fn(quick)
        except Exception as exc:  # a crash is a failure of that check
            res = CheckResult(name, False, math.nan, math.nan, f"raised {type(exc).__name__}: {exc}")
        results.append((res, time.perf_counter() - t0))
    return results


def format_table(results) -> str:
    lines = [f"{'check':<24} {'status':<6} {'metric':>10} {'tol':>8}  detail"]
    for res, dt in results:
        status = "PASS" if res.passed else "FAIL"
        lines.append(f"{res.name:<24} {status:<6} {res.metric:>10.2e} {res.tolerance:>8.0e}  "
                     f"{res.detail} [{dt:.2f}s]")
    return "\n".join(lines)
