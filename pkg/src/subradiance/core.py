"""Scalar kernels, the Bragg-edge mode ansatz, structure factors and lag
autocorrelations.

Units: lengths in wavelengths (lambda = 1, so k0 = 2*pi), rates and energies
in units of the guided decay rate Gamma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import defaults
from .errors import DomainError, ParameterError

K0 = 2.0 * math.pi

# Below this argument the free-space decay kernel is evaluated from its
# Taylor series; the closed form cancels 1/x^3-sized terms down to O(1).
KFS_SERIES_THRESHOLD = 1e-3


@dataclass(frozen=True)
class ChainParams:
    """Physical configuration of the chain.

    ``spacing`` is d/lambda and ``gamma_fs`` is gamma/Gamma.  ``branch_max``
    defaults to ``min(5, n_atoms)``.
    """

    n_atoms: int
    spacing: float
    gamma_fs: float = 0.0
    branch_max: int | None = None

    def __post_init__(self):
        n = self.n_atoms
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise ParameterError(f"n_atoms must be a positive integer, got {n!r}")
        object.__setattr__(self, "n_atoms", int(n))
        if not (math.isfinite(self.spacing) and self.spacing > 0):
            raise ParameterError(f"spacing must be > 0, got {self.spacing!r}")
        if not (math.isfinite(self.gamma_fs) and self.gamma_fs >= 0):
            raise ParameterError(f"gamma_fs must be >= 0, got {self.gamma_fs!r}")
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "gamma_fs", float(self.gamma_fs))
        bmax = self.branch_max
        if bmax is None:
            bmax = min(defaults.BRANCH_MAX, self.n_atoms)
        if int(bmax) != bmax or not 1 <= bmax <= self.n_atoms:
            raise ParameterError(
                f"branch_max must be an integer in [1, {self.n_atoms}], got {bmax!r}"
            )
        object.__setattr__(self, "branch_max", int(bmax))

    @property
    def beta(self) -> float:
        """k0 d."""
        return K0 * self.spacing

    @property
    def positions(self) -> np.ndarray:
        """z_j = (j - 1) d in wavelengths."""
        return np.arange(self.n_atoms) * self.spacing

    def bragg_angle(self, xi: int) -> float:
        """a = pi xi / (N + 1)."""
        return math.pi * xi / (self.n_atoms + 1)

    def with_(self, **changes) -> "ChainParams":
        values = dict(
            n_atoms=self.n_atoms,
            spacing=self.spacing,
            gamma_fs=self.gamma_fs,
            branch_max=None,
        )
        values.update(changes)
        return ChainParams(**values)


@dataclass(frozen=True)
class ModeVector:
    amplitudes: np.ndarray = field(repr=False)
    branch: int

    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def kernel_kfs(x):
    """Free-space decay kernel (3/2)[sin x/x + cos x/x^2 - sin x/x^3].

    Accepts scalars or arrays with x >= 0; K(0) = 1.
    """
    arr, scalar = _as_array(x)
    if np.any(arr < 0):
        raise ParameterError("kernel_kfs requires x >= 0")
    out = np.empty_like(arr)
    small = arr < KFS_SERIES_THRESHOLD
    xs = arr[small]
    x2 = xs * xs
    out[small] = 1.0 - x2 / 5.0 + 3.0 * x2 * x2 / 280.0
    xl = arr[~small]
    s, c = np.sin(xl), np.cos(xl)
    out[~small] = 1.5 * (s / xl + c / xl**2 - s / xl**3)
    return float(out) if scalar else out


def kernel_lfs(x):
    """Free-space shift kernel (3/2)[-cos x/x + sin x/x^2 + cos x/x^3], x > 0."""
    arr, scalar = _as_array(x)
    if np.any(arr == 0):
        raise DomainError("kernel_lfs(0) is the unregularized self-term")
    if np.any(arr < 0):
        raise ParameterError("kernel_lfs requires x > 0")
    s, c = np.sin(arr), np.cos(arr)
    out = 1.5 * (-c / arr + s / arr**2 + c / arr**3)
    return float(out) if scalar else out


def coupling_vjl(x, gamma: float = 1.0):
    """Perpendicular-dipole coupling (3 gamma/4)[-i/x + 1/x^2 + i/x^3]."""
    arr, scalar = _as_array(x)
    if np.any(arr == 0):
        raise DomainError("coupling_vjl(0): self-coupling is excluded")
    if np.any(arr < 0):
        raise ParameterError("coupling_vjl requires x > 0")
    out = 0.75 * gamma * (-1j / arr + 1.0 / arr**2 + 1j / arr**3)
    return complex(out) if scalar else out


def _check_branch(params: ChainParams, xi) -> int:
    if isinstance(xi, bool) or int(xi) != xi or not 1 <= xi <= params.n_atoms:
        raise ParameterError(f"branch xi must be in [1, {params.n_atoms}], got {xi!r}")
    return int(xi)


def dirichlet_mode(params: ChainParams, xi: int) -> ModeVector:
    """Bragg-edge standing wave sqrt(2/(N+1)) sin(pi xi j/(N+1)) e^{i pi z_j/d}."""
    xi = _check_branch(params, xi)
    n = params.n_atoms
    j = np.arange(1, n + 1)
    # e^{i k_b z_j} with k_b = pi/d is exactly (-1)^(j-1)
    bragg = np.where(j % 2 == 1, 1.0, -1.0)
    amp = math.sqrt(2.0 / (n + 1)) * np.sin(math.pi * xi * j / (n + 1)) * bragg
    return ModeVector(amplitudes=amp.astype(complex), branch=xi)


def structure_factor(mode: ModeVector, kappa: float, params: ChainParams) -> complex:
    """S(kappa) = sum_j c(j) e^{i kappa z_j}, kappa in units of 1/lambda."""
    return complex(np.sum(mode.amplitudes * np.exp(1j * kappa * params.positions)))


def autocorrelation_series(params: ChainParams, xi: int) -> np.ndarray:
    """Closed-form C(Delta) for every lag Delta = 0 .. N-1."""
    xi = _check_branch(params, xi)
    n = params.n_atoms
    a = params.bragg_angle(xi)
    lag = np.arange(n)
    sign = np.where(lag % 2 == 0, 1.0, -1.0)
    cot = math.cos(a) / math.sin(a)
    return sign / (n + 1) * ((n + 1 - lag) * np.cos(a * lag) + cot * np.sin(a * lag))


def autocorrelation(params: ChainParams, xi: int, delta: int) -> float:
    """C(Delta) = ((-1)^Delta/(N+1)) [(N+1-Delta) cos(a Delta) + cot a sin(a Delta)]."""
    if isinstance(delta, bool) or int(delta) != delta or not 0 <= delta < params.n_atoms:
        raise ParameterError(f"lag must be in [0, {params.n_atoms - 1}], got {delta!r}")
    xi = _check_branch(params, xi)
    delta = int(delta)
    n = params.n_atoms
    a = params.bragg_angle(xi)
    sign = -1.0 if delta % 2 else 1.0
    return sign / (n + 1) * (
        (n + 1 - delta) * math.cos(a * delta) + math.cos(a) / math.sin(a) * math.sin(a * delta)
    )


def autocorrelation_direct(mode: ModeVector, delta: int) -> complex:
    """Literal sum_n c*(n+Delta) c(n); kept as an oracle for the closed form."""
    c = mode.amplitudes
    n = c.size
    if not 0 <= delta < n:
        raise ParameterError(f"lag must be in [0, {n - 1}], got {delta!r}")
    return complex(np.sum(np.conj(c[delta:]) * c[: n - delta]))
