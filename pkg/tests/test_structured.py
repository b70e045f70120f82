import numpy as np
import pytest

from helpers import SplitMix64, nonneg_matrix
from psdfact import (
    BlockStructure,
    DimMismatch,
    DivisionByZero,
    MeasurementMap,
    NmfFactors,
    SolverConfig,
    blockwise_factorize,
    conforms,
    diagonal_mmu_update,
    factorize,
    gen_planted,
    lee_seung_step,
    pair_conforms,
    subproblem_update,
)


def test_block_structure_validation():
    with pytest.raises(ValueError):
        BlockStructure(())
    with pytest.raises(ValueError):
        BlockStructure((2, 0))
    with pytest.raises(ValueError):
        BlockStructure((2, -1))
    s = BlockStructure([2, 1])
    assert s.sizes == (2, 1)
    assert s.dim == 3
    assert s.starts == (0, 2)


def test_block_structure_diagonal_and_mask():
    s = BlockStructure.diagonal(3)
    assert s.sizes == (1, 1, 1)
    assert np.array_equal(s.mask(), np.eye(3, dtype=bool))
    m = BlockStructure((2, 1)).mask()
    expect = np.array(
        [[True, True, False], [True, True, False], [False, False, True]]
    )
    assert np.array_equal(m, expect)


def test_conforms_is_exact_zero_test():
    s = BlockStructure((2, 1))
    good = np.zeros((3, 3))
    good[:2, :2] = [[1.0, 0.5], [0.5, 2.0]]
    good[2, 2] = 3.0
    assert conforms(good, s)
    bad = good.copy()
    bad[0, 2] = 1e-300
    assert not conforms(bad, s)
    with pytest.raises(DimMismatch):
        conforms(np.zeros((4, 4)), s)


def test_pair_conforms():
    x, fp = gen_planted(4, 4, 3, seed=0, blocks=(2, 1))
    s = BlockStructure((2, 1))
    assert pair_conforms(fp, s)
    fp.B[0][0, 2] = 1e-12
    assert not pair_conforms(fp, s)


def test_single_block_matches_unstructured_bitwise():
    rng = SplitMix64(17)
    x = nonneg_matrix(rng, 5, 6)
    plain = factorize(x, SolverConfig(r=3, max_sweeps=25, seed=4))
    blocked = blockwise_factorize(
        x, SolverConfig(r=3, max_sweeps=25, seed=4, blocks=(3,))
    )
    assert np.array_equal(plain[0].A, blocked[0].A)
    assert np.array_equal(plain[0].B, blocked[0].B)
    assert np.array_equal(plain[1].objective, blocked[1].objective)


def test_blockwise_factorize_requires_blocks():
    rng = SplitMix64(19)
    x = nonneg_matrix(rng, 4, 4)
    with pytest.raises(ValueError):
        blockwise_factorize(x, SolverConfig(r=3))


def test_blockwise_factorize_preserves_structure_every_output():
    rng = SplitMix64(23)
    x = nonneg_matrix(rng, 6, 5)
    cfg = SolverConfig(r=4, max_sweeps=30, seed=2, blocks=(2, 2))
    fp, hist = blockwise_factorize(x, cfg)
    s = BlockStructure((2, 2))
    assert pair_conforms(fp, s)
    viol = hist.mono_after - hist.mono_before - 1e-12 * (1.0 + hist.mono_before)
    assert np.max(viol) <= 0.0


def test_diagonal_mmu_frozen_hand_value():
    # a_1=diag(1), a_2=diag(2) as 1x1 blocks of a 1-dim factor, b=diag(3),
    # x=(4,5): numerator 3*(4*1+5*2)=42, denominator 3*(1*3*1+2*3*2)=45... by
    # the closed form b*(a.x)/(a.(a b)) = 3*14/15.
    avecs = np.array([[1.0], [2.0]])
    out = diagonal_mmu_update(avecs, np.array([3.0]), np.array([4.0, 5.0]))
    assert out.shape == (1, 1)
    assert out[0, 0] == pytest.approx(3.0 * 14.0 / 15.0, rel=1e-15)


def test_diagonal_mmu_matches_general_update():
    rng = SplitMix64(37)
    for _ in range(25):
        m_count = rng.integer(2, 7)
        r = rng.integer(1, 4)
        avecs = rng.uniform_array(m_count * r).reshape(m_count, r) + 0.05
        bvec = rng.uniform_array(r) + 0.05
        x = rng.uniform_array(m_count) + 0.05
        mats = np.zeros((m_count, r, r))
        for i in range(m_count):
            np.fill_diagonal(mats[i], avecs[i])
        ref = subproblem_update(MeasurementMap(mats), x, np.diag(bvec))
        out = diagonal_mmu_update(avecs, bvec, x)
        assert np.max(np.abs(out - ref)) <= 1e-10 * (1.0 + np.max(np.abs(ref)))


def test_diagonal_mmu_division_by_zero():
    with pytest.raises(DivisionByZero):
        diagonal_mmu_update(np.zeros((2, 1)), np.array([1.0]), np.array([1.0, 1.0]))


def test_lee_seung_step_dims_and_errors():
    a = np.ones((3, 2))
    b = np.ones((2, 4))
    x = np.ones((3, 4))
    with pytest.raises(DimMismatch):
        lee_seung_step(np.ones((3, 3)), NmfFactors(a, b))
    with pytest.raises(DivisionByZero):
        lee_seung_step(x, NmfFactors(np.zeros((3, 2)), b))


def test_lee_seung_step_monotone():
    rng = SplitMix64(41)
    for _ in range(10):
        m, n, r = rng.integer(3, 7), rng.integer(3, 7), rng.integer(1, 4)
        x = nonneg_matrix(rng, m, n)
        f = NmfFactors(
            rng.uniform_array(m * r).reshape(m, r) + 0.05,
            rng.uniform_array(r * n).reshape(r, n) + 0.05,
        )
        prev = float(np.sum((x - f.product()) ** 2))
        for _ in range(5):
            f = lee_seung_step(x, f)
            cur = float(np.sum((x - f.product()) ** 2))
            assert cur <= prev + 1e-12 * (1.0 + prev)
            prev = cur


def test_diagonal_blockwise_tracks_lee_seung():
    # 1x1 blocks with zero damping walk in lockstep with the vector updates
    # when started from the matched diagonal initialization.
    rng = SplitMix64(53)
    x = nonneg_matrix(rng, 5, 6)
    r = 3
    cfg = SolverConfig(
        r=r, max_sweeps=1, damping=0.0, seed=9, blocks=tuple([1] * r)
    )
    from psdfact.solver import half_sweep_a, half_sweep_b, init_factors

    fp = init_factors(x, cfg)
    nm = NmfFactors(
        np.stack([np.diagonal(fp.A[i]) for i in range(5)]).copy(),
        np.stack([np.diagonal(fp.B[j]) for j in range(6)]).T.copy(),
    )
    for _ in range(8):
        fp = half_sweep_b(x, half_sweep_a(x, fp, 0.0), 0.0)
        nm = lee_seung_step(x, nm)
        for i in range(5):
            diag = np.diagonal(fp.A[i])
            assert np.max(np.abs(diag - nm.a[i])) <= 1e-10 * (1.0 + np.max(diag))
        for j in range(6):
            diag = np.diagonal(fp.B[j])
            assert np.max(np.abs(diag - nm.b[:, j])) <= 1e-10 * (1.0 + np.max(diag))
