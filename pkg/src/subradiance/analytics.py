"""Closed-form and asymptotic predictions for the Bragg-edge subradiant
branches, plus the integral and series identities they rest on.

Every function takes a ``ChainParams`` and a branch index ``xi`` and returns
values in units of Gamma.  Asymptotic formulas are always evaluated; when
their preconditions (k0 d small, xi << N) do not hold, the returned
``AnalyticPrediction`` carries regime flags instead of raising.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import defaults
from .core import (
    ChainParams,
    _check_branch,
    autocorrelation_series,
    kernel_kfs,
    kernel_lfs,
)
from .errors import DomainError, ParameterError, QuadratureError

ZETA3 = 1.2020569031595943
LN2 = 0.6931471805599453

FLAG_NOT_DEEP = "not_deep_subwavelength"
FLAG_XI_LARGE = "xi_not_small"

_POLE_EPS = 1e-12


@dataclass(frozen=True)
class AnalyticPrediction:
    linewidth_total: float = math.nan
    linewidth_guided: float = math.nan
    linewidth_fs: float = math.nan
    shift_total: float = math.nan
    shift_guided: float = math.nan
    shift_fs: float = math.nan
    shift_infty: float = math.nan
    finite_size_coeff: float = math.nan
    regime_flags: tuple = field(default=())

    @property
    def valid(self) -> bool:
        return not self.regime_flags

    def merge(self, other: "AnalyticPrediction") -> "AnalyticPrediction":
        """Field-wise union, preferring values that are not NaN."""
        vals = {}
        for name in self.__dataclass_fields__:
            if name == "regime_flags":
                continue
            a, b = getattr(self, name), getattr(other, name)
            vals[name] = a if not math.isnan(a) else b
        flags = tuple(sorted(set(self.regime_flags) | set(other.regime_flags)))
        return AnalyticPrediction(regime_flags=flags, **vals)


def regime_flags(params: ChainParams, xi: int) -> tuple:
    flags = []
    if params.beta > defaults.DEEP_SUBWAVELENGTH_MAX_BETA:
        flags.append(FLAG_NOT_DEEP)
    if xi > defaults.BRANCH_SMALL_FRACTION * params.n_atoms:
        flags.append(FLAG_XI_LARGE)
    return tuple(flags)


def _half_angle(params: ChainParams):
    """(sin, cos) of k0 d / 2, rejecting the d = lambda/2 pole."""
    alpha = params.beta / 2.0
    c = math.cos(alpha)
    if abs(c) < _POLE_EPS:
        raise DomainError(f"k0 d = pi pole (d/lambda = {params.spacing})")
    return math.sin(alpha), c


# -- ideal waveguide --------------------------------------------------------

def ideal_bragg_detuning(params: ChainParams, xi: int) -> complex:
    """delta_xi d = (pi xi/N)[1 + (i/N) tan(k0 d/2)]."""
    xi = _check_branch(params, xi)
    s, c = _half_angle(params)
    n = params.n_atoms
    return (math.pi * xi / n) * complex(1.0, s / c / n)


def bloch_dispersion(kd, params: ChainParams) -> complex:
    """omega(k) = (Gamma/2) sin(k0 d)/(cos(k d) - cos(k0 d)); kd may be complex."""
    beta = params.beta
    denom = np.cos(complex(kd)) - math.cos(beta)
    if abs(denom) < 1e-14:
        raise DomainError("superradiant pole: cos(kd) = cos(k0 d)")
    return complex(0.5 * math.sin(beta) / denom)


def gamma_ideal(params: ChainParams, xi: int) -> float:
    """(Gamma/2)(pi^2 xi^2/N^3) sin^2(k0d/2)/cos^4(k0d/2)."""
    xi = _check_branch(params, xi)
    s, c = _half_angle(params)
    n = params.n_atoms
    return 0.5 * math.pi**2 * xi**2 / n**3 * s * s / c**4


def j_ideal(params: ChainParams, xi: int, open_boundary: bool = False) -> float:
    """-(Gamma/2) tan(k0d/2) - (Gamma/8) sin/cos^3 (pi xi/M)^2 with M = N, or
    M = N + 1 when ``open_boundary``."""
    xi = _check_branch(params, xi)
    s, c = _half_angle(params)
    m = params.n_atoms + (1 if open_boundary else 0)
    return -0.5 * s / c - 0.125 * s / c**3 * (math.pi * xi / m) ** 2


# -- nonideal waveguide: linewidth -------------------------------------------

def parity_sign(params: ChainParams, xi: int) -> float:
    return -1.0 if (params.n_atoms + xi) % 2 else 1.0


def _envelope(params: ChainParams, xi: int) -> float:
    return math.pi**2 * xi**2 / (params.n_atoms + 1) ** 3


def theta(params: ChainParams) -> float:
    """theta_{N+1} = (N + 1) k0 d."""
    return (params.n_atoms + 1) * params.beta


def guided_bracket(params: ChainParams, xi: int) -> float:
    """Oscillatory term (-1)^(N+xi) cos((N+1) k0 d)."""
    return parity_sign(params, xi) * math.cos(theta(params))


def fs_bracket(params: ChainParams, xi: int) -> float:
    """Oscillatory term (-1)^(N+xi) K_fs((N+1) k0 d)."""
    return parity_sign(params, xi) * kernel_kfs(theta(params))


def gamma_guided_subwavelength(params: ChainParams, xi: int) -> float:
    xi = _check_branch(params, xi)
    return _envelope(params, xi) * 0.25 * (1.0 + guided_bracket(params, xi))


def fs_prefactor_analytic(params: ChainParams, xi: int) -> float:
    """F = (1/4)[1 + (-1)^(N+xi) K_fs(theta_{N+1})]."""
    xi = _check_branch(params, xi)
    return 0.25 * (1.0 + fs_bracket(params, xi))


def gamma_fs_analytic(params: ChainParams, xi: int) -> float:
    return params.gamma_fs * _envelope(params, xi) * fs_prefactor_analytic(params, xi)


def gamma_fs_discrete(params: ChainParams, xi: int) -> float:
    """Exact free-space linewidth of the Dirichlet mode, summed over lags."""
    if params.gamma_fs == 0.0:
        _check_branch(params, xi)
        return 0.0
    corr = autocorrelation_series(params, xi)
    lag = np.arange(1, params.n_atoms)
    tail = np.sum(kernel_kfs(params.beta * lag) * corr[1:])
    return params.gamma_fs * (corr[0] + 2.0 * tail)


def fs_prefactor_discrete(params: ChainParams, xi: int) -> float:
    """F_{N+1}(beta; xi) = Gamma_fs (N+1)^3/(gamma pi^2 xi^2), computed from the
    lag sum directly so it is defined for gamma = 0 too."""
    unit = params if params.gamma_fs == 1.0 else params.with_(gamma_fs=1.0)
    return gamma_fs_discrete(unit, xi) / _envelope(params, xi)


def gamma_total_analytic(params: ChainParams, xi: int) -> AnalyticPrediction:
    g1d = gamma_guided_subwavelength(params, xi)
    gfs = gamma_fs_analytic(params, xi)
    return AnalyticPrediction(
        linewidth_total=g1d + gfs,
        linewidth_guided=g1d,
        linewidth_fs=gfs,
        regime_flags=regime_flags(params, xi),
    )


# -- nonideal waveguide: shift -----------------------------------------------

def j_infinity_fs(params: ChainParams) -> float:
    b = params.beta
    g = params.gamma_fs
    return -9.0 * g / 8.0 * ZETA3 / b**3 + 0.75 * g * LN2 / b


def j_infinity_fs_next_order(params: ChainParams) -> float:
    """-(9/64) gamma k0 d: the O(k0 d) constant left out of ``j_infinity_fs``.

    It comes from the (3/2)(3x/8) term of the shift kernel's near-field
    expansion, lattice-summed with the Abel value sum (-1)^D D = -1/4.  Not
    part of any prediction; exposed so the size of the omission can be
    checked against the discrete lattice sum.
    """
    return -9.0 / 64.0 * params.gamma_fs * params.beta


def j_infinity(params: ChainParams) -> float:
    """Thermodynamic-limit shift including the guided band-edge term."""
    s, c = _half_angle(params)
    return j_infinity_fs(params) - 0.5 * s / c


def finite_size_coeff(params: ChainParams) -> float:
    """C(d) = (3 gamma ln2/4)/(k0d)^3 - (Gamma/8) sin(k0d/2)/cos^3(k0d/2)."""
    s, c = _half_angle(params)
    return 0.75 * params.gamma_fs * LN2 / params.beta**3 - 0.125 * s / c**3


def j_fs_asymptotic(params: ChainParams, xi: int):
    """(shift_fs, shift_infty_fs, finite_size_term)."""
    xi = _check_branch(params, xi)
    if params.beta <= 0:
        raise DomainError("d = 0")
    infty = j_infinity_fs(params)
    fin = 0.75 * params.gamma_fs * math.pi**2 * xi**2 * LN2 / (
        (params.n_atoms + 1) ** 2 * params.beta**3
    )
    return infty + fin, infty, fin


def j_fs_discrete(params: ChainParams, xi: int) -> float:
    """Exact free-space shift of the Dirichlet mode (self term excluded)."""
    if params.gamma_fs == 0.0 or params.n_atoms == 1:
        _check_branch(params, xi)
        return 0.0
    corr = autocorrelation_series(params, xi)
    lag = np.arange(1, params.n_atoms)
    return params.gamma_fs * float(np.sum(kernel_lfs(params.beta * lag) * corr[1:]))


def j_total_asymptotic(params: ChainParams, xi: int) -> AnalyticPrediction:
    xi = _check_branch(params, xi)
    guided = j_ideal(params, xi, open_boundary=True)
    fs, _, _ = j_fs_asymptotic(params, xi)
    return AnalyticPrediction(
        shift_total=guided + fs,
        shift_guided=guided,
        shift_fs=fs,
        shift_infty=j_infinity(params),
        finite_size_coeff=finite_size_coeff(params),
        regime_flags=regime_flags(params, xi),
    )


def predict(params: ChainParams, xi: int) -> AnalyticPrediction:
    """Linewidth and shift predictions in one record."""
    return gamma_total_analytic(params, xi).merge(j_total_asymptotic(params, xi))


# -- identities --------------------------------------------------------------

_QUAD_TOL = 1e-12


def _quad(f, lo, hi, weight, wvar):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                f, lo, hi, weight=weight, wvar=wvar, epsabs=_QUAD_TOL, epsrel=0.0, limit=200
            )
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature did not converge at wvar={wvar}: {exc}") from exc
    if err > 1e2 * _QUAD_TOL:
        raise QuadratureError(f"quadrature error estimate {err:.2e} at wvar={wvar}")
    return val


def angular_integral(theta_: float) -> float:
    """I_1(theta) = int_0^1 (1 + mu^2) cos(theta mu) dmu by adaptive quadrature."""
    return _quad(lambda mu: 1.0 + mu * mu, 0.0, 1.0, "cos", float(theta_))


def angular_average_kernel(x: float) -> complex:
    """(3/8) int_{-1}^{1} (1 + mu^2) e^{i x mu} dmu by adaptive quadrature."""
    w = lambda mu: 1.0 + mu * mu  # noqa: E731
    re = _quad(w, -1.0, 1.0, "cos", float(x))
    im = _quad(w, -1.0, 1.0, "sin", float(x))
    return 0.375 * complex(re, im)


def angular_identity_errors(theta_grid):
    """Per-theta absolute errors of I_1 = (4/3) K_fs and of the full angular
    average against K_fs."""
    out = []
    for t in theta_grid:
        t = float(t)
        if not t > 0:
            raise ParameterError(f"theta must be > 0, got {t!r}")
        k = kernel_kfs(t)
        e1 = abs(angular_integral(t) - 4.0 / 3.0 * k)
        e2 = abs(angular_average_kernel(t) - k)
        out.append((t, e1, e2))
    return out


def verify_angular_identity(theta_grid) -> float:
    """Largest absolute error over both angular identities on the grid."""
    errs = angular_identity_errors(theta_grid)
    return max(max(e1, e2) for _, e1, e2 in errs)


_SERIES_POWER = {"zeta3": 3, "log2": 1}
SERIES_LIMIT = {"zeta3": -0.75 * ZETA3, "log2": -LN2}


def _series_terms(kind: str, terms: int) -> np.ndarray:
    if kind not in _SERIES_POWER:
        raise ParameterError(f"kind must be one of {sorted(_SERIES_POWER)}, got {kind!r}")
    if isinstance(terms, bool) or int(terms) != terms or terms < 1:
        raise ParameterError(f"terms must be >= 1, got {terms!r}")
    k = np.arange(1, int(terms) + 1, dtype=float)
    return np.where(k % 2 == 0, 1.0, -1.0) / k ** _SERIES_POWER[kind]


def alternating_series(kind: str, terms: int) -> float:
    """Partial sum of sum_{D>=1} (-1)^D / D^3 (zeta3) or (-1)^D / D (log2)."""
    # smallest terms first to limit rounding
    return float(math.fsum(_series_terms(kind, terms)[::-1]))


def alternating_series_limit(kind: str, terms: int) -> float:
    """Limit estimate from ``terms`` terms: the mean of the last two partial
    sums, which cancels the leading alternating remainder."""
    if terms < 2:
        raise ParameterError("need at least 2 terms for a limit estimate")
    a = _series_terms(kind, terms)
    s_last = math.fsum(a[::-1])
    return float(s_last - 0.5 * a[-1])
