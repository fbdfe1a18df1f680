"""Dense non-Hermitian effective Hamiltonian of the chain.

H = H_1D + H_fs, both Toeplitz in |j - l|.  Only the first row is computed;
the dense matrix is filled by indexing with |j - l|.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import ChainParams, coupling_vjl


@dataclass(frozen=True)
class EffectiveHamiltonian:
    matrix: np.ndarray = field(repr=False)
    params: ChainParams
    guided: np.ndarray | None = field(default=None, repr=False)
    freespace: np.ndarray | None = field(default=None, repr=False)

    @property
    def parts(self):
        if self.guided is None:
            return None
        return self.guided, self.freespace

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _toeplitz(row: np.ndarray) -> np.ndarray:
    n = row.size
    idx = np.arange(n)
    return row[np.abs(idx[:, None] - idx[None, :])]


def guided_row(params: ChainParams) -> np.ndarray:
    lag = np.arange(params.n_atoms)
    return -0.5j * np.exp(1j * params.beta * lag)


def freespace_row(params: ChainParams) -> np.ndarray:
    n = params.n_atoms
    row = np.zeros(n, dtype=complex)
    g = params.gamma_fs
    if g == 0.0:
        return row
    row[0] = -0.5j * g
    if n > 1:
        x = params.beta * np.arange(1, n)
        row[1:] = -1j * coupling_vjl(x, g) * np.exp(1j * x)
    return row


def build_guided(params: ChainParams) -> np.ndarray:
    """H_1D[j, l] = -(i/2) exp(i k0 d |j - l|) in units of Gamma."""
    return _frozen(_toeplitz(guided_row(params)))


def build_freespace(params: ChainParams) -> np.ndarray:
    """H_fs: -i gamma/2 on the diagonal, -i V(x) e^{ix} off it, x = k0 d |j - l|.

    The geometry-independent Lamb shift is absorbed into the atomic frequency.
    """
    return _frozen(_toeplitz(freespace_row(params)))


def build_total(params: ChainParams, keep_parts: bool = False) -> EffectiveHamiltonian:
    g_row = guided_row(params)
    f_row = freespace_row(params)
    total = _frozen(_toeplitz(g_row + f_row))
    if not keep_parts:
        return EffectiveHamiltonian(matrix=total, params=params)
    return EffectiveHamiltonian(
        matrix=total,
        params=params,
        guided=_frozen(_toeplitz(g_row)),
        freespace=_frozen(_toeplitz(f_row)),
    )


DUMP_HEADER = "# subradiance-hamiltonian v0 rows={n} cols={n} layout=row-major pairs=re,im"


def dump_matrix(h: EffectiveHamiltonian | np.ndarray, path) -> Path:
    """Write a debugging dump: one header line, then one text row per matrix row
    as comma-separated ``re,im`` pairs.  Not a stable format."""
    m = h.matrix if isinstance(h, EffectiveHamiltonian) else np.asarray(h)
    path = Path(path)
    lines = [DUMP_HEADER.format(n=m.shape[0])]
    for row in m:
        lines.append(",".join(f"{z.real!r},{z.imag!r}" for z in row.tolist()))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_matrix(path) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    rows = []
    for line in text[1:]:
        vals = [float(v) for v in line.split(",")]
        rows.append(np.array(vals[0::2]) + 1j * np.array(vals[1::2]))
    return np.array(rows)
