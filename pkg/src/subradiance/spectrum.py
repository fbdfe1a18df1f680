"""Full diagonalization of the effective Hamiltonian and Bragg-edge branch
labelling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.fft

from . import defaults
from .core import ChainParams
from .errors import BranchLookupError, ParameterError, SolverError
from .hamiltonian import EffectiveHamiltonian

SOLVER_METHOD = "LAPACK zgeev (Hessenberg reduction + shifted QR)"


@dataclass(frozen=True)
class CollectiveMode:
    eigenvalue: complex
    eigenvector: np.ndarray = field(repr=False)
    residual: float
    branch: int | None = None
    overlap: float | None = None
    low_confidence: bool = False
    branch_estimate: int = 0
    linewidth: float = field(init=False)
    shift: float = field(init=False)

    def __post_init__(self):
        lw = -2.0 * self.eigenvalue.imag + 0.0  # no -0.0 in output
        object.__setattr__(self, "linewidth", lw)
        object.__setattr__(self, "shift", self.eigenvalue.real)


@dataclass(frozen=True)
class SolverStats:
    method: str
    eig_tol: float
    frobenius_norm: float
    max_residual: float
    residual_bound: float
    clamped_negative: int
    min_raw_linewidth: float
    iterations: int | None = None  # LAPACK does not report QR sweep counts


@dataclass(frozen=True)
class SpectrumResult:
    modes: tuple
    params: ChainParams
    solver_stats: SolverStats

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([m.eigenvalue for m in self.modes])

    @property
    def linewidths(self) -> np.ndarray:
        return np.array([m.linewidth for m in self.modes])

    @property
    def shifts(self) -> np.ndarray:
        return np.array([m.shift for m in self.modes])

    def mode_for_branch(self, xi: int) -> CollectiveMode:
        for m in self.modes:
            if m.branch == xi:
                return m
        raise BranchLookupError(f"branch {xi} has not been assigned")


def _canonical_phase(vecs: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vecs), axis=0)
    pivot = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(pivot) / pivot)[None, :]


def _bragg_sign(n: int) -> np.ndarray:
    return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)


def ansatz_overlaps(vecs: np.ndarray, xi_max: int | None = None) -> np.ndarray:
    """|<ansatz_xi|v>|^2 for xi = 1..xi_max (rows) against every column of vecs."""
    n = vecs.shape[0]
    if xi_max is None:
        # one type-I DST projects onto all N sine modes at once
        proj = scipy.fft.dst(vecs * _bragg_sign(n)[:, None], type=1, axis=0)
        proj *= math.sqrt(2.0 / (n + 1)) / 2.0
    else:
        j = np.arange(1, n + 1)
        xi = np.arange(1, xi_max + 1)
        basis = math.sqrt(2.0 / (n + 1)) * np.sin(np.pi * np.outer(xi, j) / (n + 1))
        proj = (basis * _bragg_sign(n)[None, :]) @ vecs
    return np.abs(proj) ** 2


def eigendecompose(h: EffectiveHamiltonian, eig_tol: float = defaults.EIG_TOL) -> SpectrumResult:
    """Every eigenpair of H, sorted by ascending linewidth (ties: shift, then
    dominant Dirichlet index)."""
    if not 0 < eig_tol <= 1e-6:
        raise ParameterError(f"eig_tol must lie in (0, 1e-6], got {eig_tol!r}")
    mat = np.asarray(h.matrix)
    if not np.all(np.isfinite(mat)):
        raise ParameterError("Hamiltonian contains NaN or Inf entries")
    n = mat.shape[0]
    fro = float(np.linalg.norm(mat))
    try:
        vals, vecs = np.linalg.eig(mat)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"eigensolver did not converge: {exc}", {"n": n, "frobenius_norm": fro}) from exc

    vecs = vecs / np.linalg.norm(vecs, axis=0)[None, :]
    vecs = _canonical_phase(vecs)
    residuals = np.linalg.norm(mat @ vecs - vecs * vals[None, :], axis=0)
    bound = eig_tol * fro
    diag = {
        "n": n,
        "frobenius_norm": fro,
        "residual_bound": bound,
        "max_residual": float(residuals.max()),
        "eigenvalues": vals.copy(),
    }
    if residuals.max() > bound:
        raise SolverError(
            f"eigen-residual {residuals.max():.3e} exceeds bound {bound:.3e}", diag
        )

    raw_lw = -2.0 * vals.imag
    too_negative = raw_lw < -defaults.NEGATIVE_LINEWIDTH_TOL
    if np.any(too_negative):
        raise SolverError(
            f"linewidth {raw_lw.min():.3e} below -{defaults.NEGATIVE_LINEWIDTH_TOL:g}", diag
        )
    clamp = raw_lw < 0
    vals = np.where(clamp, vals.real + 0j, vals)

    estimate = np.argmax(ansatz_overlaps(vecs), axis=0) + 1
    order = np.lexsort((estimate, vals.real, -2.0 * vals.imag))
    modes = tuple(
        CollectiveMode(
            eigenvalue=complex(vals[k]),
            eigenvector=_readonly(vecs[:, k].copy()),
            residual=float(residuals[k]),
            branch_estimate=int(estimate[k]),
        )
        for k in order
    )
    stats = SolverStats(
        method=SOLVER_METHOD,
        eig_tol=eig_tol,
        frobenius_norm=fro,
        max_residual=float(residuals.max()),
        residual_bound=bound,
        clamped_negative=int(clamp.sum()),
        min_raw_linewidth=float(raw_lw.min()),
    )
    return SpectrumResult(modes=modes, params=h.params, solver_stats=stats)


def _readonly(v):
    v.setflags(write=False)
    return v


def classify_branches(spec: SpectrumResult, xi_max: int | None = None) -> SpectrumResult:
    """Greedy ascending-xi assignment of Dirichlet branches to eigenvectors by
    maximal squared overlap, without reuse."""
    n = len(spec.modes)
    if xi_max is None:
        xi_max = spec.params.branch_max
    if not 1 <= xi_max <= n:
        raise ParameterError(f"xi_max must be in [1, {n}], got {xi_max!r}")
    vecs = np.column_stack([m.eigenvector for m in spec.modes])
    ov = ansatz_overlaps(vecs, xi_max)
    taken = np.zeros(n, dtype=bool)
    assigned = {}
    for xi in range(1, xi_max + 1):
        row = np.where(taken, -1.0, ov[xi - 1])
        k = int(np.argmax(row))
        taken[k] = True
        assigned[k] = (xi, float(ov[xi - 1, k]))
    modes = []
    for k, m in enumerate(spec.modes):
        if k in assigned:
            xi, o = assigned[k]
            m = replace(m, branch=xi, overlap=o, low_confidence=o < defaults.OVERLAP_ACCEPT)
        else:
            m = replace(m, branch=None, overlap=None, low_confidence=False)
        modes.append(m)
    return replace(spec, modes=tuple(modes))


def extract_observables(spec: SpectrumResult, xi: int):
    """(Gamma_xi, J_xi, overlap) for an assigned branch."""
    m = spec.mode_for_branch(xi)
    return m.linewidth, m.shift, m.overlap
