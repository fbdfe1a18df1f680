"""Collective subradiant spectrum of a finite atom chain coupled to a
waveguide: exact diagonalization and closed-form asymptotics."""

__version__ = "0.1.0"

from .core import ChainParams, ModeVector, dirichlet_mode, kernel_kfs, kernel_lfs  # noqa: E402
from .hamiltonian import EffectiveHamiltonian, build_total  # noqa: E402
from .spectrum import classify_branches, eigendecompose, extract_observables  # noqa: E402

__all__ = [
    "ChainParams",
    "ModeVector",
    "EffectiveHamiltonian",
    "build_total",
    "classify_branches",
    "dirichlet_mode",
    "eigendecompose",
    "extract_observables",
    "kernel_kfs",
    "kernel_lfs",
]
