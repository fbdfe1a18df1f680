import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subradiance import analytics
from subradiance.core import ChainParams
from subradiance.errors import BranchLookupError, ParameterError, SolverError
from subradiance.hamiltonian import EffectiveHamiltonian, build_total
from subradiance.spectrum import (
    ansatz_overlaps,
    classify_branches,
    eigendecompose,
    extract_observables,
)


def _solve(n, d, g=0.0, xi_max=None):
    p = ChainParams(n, d, g)
    return classify_branches(eigendecompose(build_total(p)), xi_max)


def test_single_atom():
    spec = eigendecompose(build_total(ChainParams(1, 0.1, 0.1)))
    (m,) = spec.modes
    assert m.linewidth == pytest.approx(1.1, abs=1e-15)
    assert m.shift == 0.0


def test_dark_bright_pair():
    spec = eigendecompose(build_total(ChainParams(2, 0.5)))
    np.testing.assert_allclose(spec.linewidths, [0.0, 2.0], atol=1e-15)
    np.testing.assert_allclose(spec.shifts, [0.0, 0.0], atol=1e-15)


def test_half_wavelength_pair_branches():
    # at k0 d = pi the Bragg-phased (antisymmetric) ansatz is the bright
    # state; the dark state is the symmetric xi = 2 profile
    spec = _solve(2, 0.5)
    g1, j1, ov1 = extract_observables(spec, 1)
    g2, j2, ov2 = extract_observables(spec, 2)
    assert g1 == pytest.approx(2.0, abs=1e-12) and abs(j1) < 1e-12
    assert abs(g2) < 1e-12 and abs(j2) < 1e-12
    assert ov1 == pytest.approx(1.0, abs=1e-12)
    assert ov2 == pytest.approx(1.0, abs=1e-12)


def test_ideal_n100_most_subradiant():
    spec = _solve(100, 0.25)
    g, j, ov = extract_observables(spec, 1)
    assert g == pytest.approx(9.877371834882033e-06, rel=1e-8)  # frozen oracle
    assert g == pytest.approx(math.pi**2 * 1e-6, rel=0.01)
    # the k ~ 0 band edge (J ~ +1/2) mirrors it with an almost equal width
    assert spec.linewidths[0] == pytest.approx(g, rel=1e-7)
    assert spec.modes[0].shift == pytest.approx(-j, abs=1e-10)
    assert j == pytest.approx(-0.5002467674667307, abs=1e-10)
    assert j == pytest.approx(analytics.j_ideal(ChainParams(100, 0.25), 1), abs=1e-4)


def test_nonideal_n100_shift_near_thermodynamic_limit():
    spec = _solve(100, 0.02, 0.1)
    g, j, ov = extract_observables(spec, 1)
    assert j == pytest.approx(-67.74139014414777, abs=1e-8)  # frozen oracle
    assert j == pytest.approx(analytics.j_infinity(ChainParams(100, 0.02, 0.1)), abs=0.1)
    assert ov > 0.999


def test_branch_one_is_least_radiant_ideal():
    spec = _solve(50, 0.1)
    m = spec.mode_for_branch(1)
    assert m is spec.modes[0]
    assert m.overlap > 0.99


def test_distinct_branches_nonideal():
    spec = _solve(80, 0.02, 0.1)
    m1, m3 = spec.mode_for_branch(1), spec.mode_for_branch(3)
    assert m1 is not m3
    assert m1.linewidth < m3.linewidth
    assigned = [m for m in spec.modes if m.branch is not None]
    assert sorted(m.branch for m in assigned) == [1, 2, 3, 4, 5]


def test_unassigned_branch_lookup():
    spec = _solve(10, 0.1, xi_max=2)
    with pytest.raises(BranchLookupError):
        spec.mode_for_branch(3)
    with pytest.raises(BranchLookupError):
        eigendecompose(build_total(ChainParams(4, 0.1))).mode_for_branch(1)


def test_classify_rejects_bad_xi_max():
    spec = eigendecompose(build_total(ChainParams(4, 0.1)))
    with pytest.raises(ParameterError):
        classify_branches(spec, 5)


def test_eig_tol_range():
    h = build_total(ChainParams(4, 0.1))
    for tol in (0.0, 1e-5, -1.0):
        with pytest.raises(ParameterError):
            eigendecompose(h, tol)


def test_non_finite_matrix_rejected():
    p = ChainParams(2, 0.1)
    bad = np.array([[np.nan, 0], [0, 0]], dtype=complex)
    with pytest.raises(ParameterError):
        eigendecompose(EffectiveHamiltonian(bad, p))


def test_gain_is_a_solver_error():
    p = ChainParams(2, 0.1)
    gain = np.array([[0.5j, 0], [0, -0.5j]])
    with pytest.raises(SolverError) as info:
        eigendecompose(EffectiveHamiltonian(gain, p))
    assert "eigenvalues" in info.value.diagnostics


def test_tiny_negative_linewidth_is_clamped():
    p = ChainParams(2, 0.1)
    m = np.array([[1e-10j, 0], [0, -0.5j]])
    spec = eigendecompose(EffectiveHamiltonian(m, p))
    assert spec.solver_stats.clamped_negative == 1
    assert spec.linewidths.min() == 0.0


def test_solver_stats_recorded():
    spec = eigendecompose(build_total(ChainParams(30, 0.1, 0.1)), 1e-9)
    st_ = spec.solver_stats
    assert st_.eig_tol == 1e-9
    assert st_.max_residual <= st_.residual_bound
    assert "zgeev" in st_.method


def test_ansatz_overlap_dst_matches_explicit():
    spec = eigendecompose(build_total(ChainParams(17, 0.08, 0.2)))
    vecs = np.column_stack([m.eigenvector for m in spec.modes])
    np.testing.assert_allclose(ansatz_overlaps(vecs)[:6], ansatz_overlaps(vecs, 6), atol=1e-13)


def test_deterministic():
    a = _solve(40, 0.02, 0.1)
    b = _solve(40, 0.02, 0.1)
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    for ma, mb in zip(a.modes, b.modes):
        np.testing.assert_array_equal(ma.eigenvector, mb.eigenvector)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 40), st.floats(0.005, 0.49), st.floats(0.0, 1.0))
def test_solver_contract(n, d, g):
    p = ChainParams(n, d, g)
    h = build_total(p)
    spec = eigendecompose(h)
    assert len(spec.modes) == n
    fro = np.linalg.norm(h.matrix)
    for m in spec.modes:
        assert np.linalg.norm(m.eigenvector) == pytest.approx(1.0, abs=1e-12)
        assert m.residual <= 1e-10 * fro
        assert m.linewidth >= -1e-8
    assert spec.linewidths.sum() == pytest.approx(n * (1 + g), abs=1e-8 * n)
    assert np.all(np.diff(spec.linewidths) >= 0)
