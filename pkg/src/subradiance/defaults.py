"""Every physics and solver default lives in this one table.

The CLI and the experiment drivers read from here; nothing else hard-codes
these numbers.
"""

GAMMA_FS = 0.1          # gamma / Gamma, free-space decay rate
SPACING = 0.02          # d / lambda
BRANCH = 1              # xi
BRANCH_MAX = 5          # default cap on classified branches
EIG_TOL = 1e-10         # residual bound relative to ||H||_F
NEGATIVE_LINEWIDTH_TOL = 1e-8
OVERLAP_ACCEPT = 0.5
DEEP_SUBWAVELENGTH_MAX_BETA = 0.5   # k0 d
BRANCH_SMALL_FRACTION = 0.1         # xi <= N/10
N_GRID = (20, 200, 5)   # default N sweep: start, stop (inclusive), step
WORKERS = 1

TABLE = {
    "gamma": (GAMMA_FS, "free-space decay rate gamma/Gamma"),
    "d": (SPACING, "lattice spacing d/lambda"),
    "xi": (BRANCH, "branch index"),
    "xi_max": (BRANCH_MAX, "largest branch classified against the Dirichlet ansatz"),
    "eig_tol": (EIG_TOL, "eigen-residual bound relative to ||H||_F"),
    "workers": (WORKERS, "worker processes for sweeps (env SUBRADIANCE_WORKERS)"),
}
