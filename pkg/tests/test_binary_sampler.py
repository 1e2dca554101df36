from collections import Counter

import numpy as np
import pytest

from bittables.binary_sampler import (
    BinaryStrategy,
    full_line_weight,
    sample_binary_entry,
    sample_binary_table,
    tail_line_weight,
)
from bittables.errors import InfeasibleError, OracleLimitError
from bittables.seeding import batch_rng
from bittables.stats import chi_square_uniformity
from bittables.table import MaskedTable, validate_table

import oracles


def test_line_weight_hand_values():
    # 2x2 permutation instance, p = 1/2 everywhere.  Both candidate bits
    # leave one open row cell and one open column cell that must absorb the
    # remaining residual: weight (1/2)*(1/2) either way.
    t = MaskedTable.from_margins([1, 1], [1, 1])
    p = [0.5, 0.5]
    for k in (0, 1):
        assert abs(full_line_weight(0, 0, k, t, p) - 0.25) < 1e-12
        assert abs(tail_line_weight(0, 0, k, t, p) - 0.25) < 1e-12
    # residual beyond the open cells is unreachable
    t2 = MaskedTable.from_margins([2, 0], [1, 1])
    assert full_line_weight(0, 0, 0, t2, p) == 0.0


def test_line_weight_excludes_own_cell():
    # row 0 of a 3-col instance: cell (0,0) plus two open cells at p=0.4;
    # residual 2 net of bit 1 leaves 1 for the others
    t = MaskedTable.from_margins([2, 1, 1], [2, 1, 1])
    p = np.array([0.5, 0.4, 0.4])
    w = full_line_weight(0, 0, 1, t, p)
    # row part: P(B(0.4)+B(0.4) = 1) = 2*0.4*0.6; col part: P(B(0.5)+B(0.5)=1)
    want = (2 * 0.4 * 0.6) * (2 * 0.5 * 0.5)
    assert abs(w - want) < 1e-12


def test_first_cell_law_symmetric_instance():
    # 3x3, margins all 2, full-line weights with refreshed p = 2/3: the k=0
    # branch forces the rest of column 0 to ones, so
    #   w0 = (1/3)(2/3)(2/3) * P(row 0 absorbs 2) = 4/27 * 4/9
    #   w1 = (2/3) * P(row 0 absorbs 1) * P(col 0 absorbs 1) = 2/3 * 16/81
    # giving P(bit=0) = 1/3, equal to the true marginal 2/6
    t = MaskedTable.from_margins([2, 2, 2], [2, 2, 2])
    zeros = 0
    trials = 4000
    for s in range(trials):
        zeros += sample_binary_entry(0, 0, t, rng=batch_rng(11, s)) == 0
    assert abs(zeros / trials - 1 / 3) < 0.03
    assert not t.mask.any()  # the probe never mutates its input


def test_exact_strategy_uniform_3x3():
    tables = list(oracles.iter_binary_tables([2, 2, 2], [2, 2, 2]))
    assert len(tables) == 6
    strategy = BinaryStrategy(kind="exact")
    counts = Counter()
    for s in range(60 * 6):
        e, _ = sample_binary_table([2, 2, 2], [2, 2, 2], strategy=strategy, rng=batch_rng(3, s))
        counts[tuple(map(tuple, e.tolist()))] += 1
    assert set(counts) == set(tables)
    rep = chi_square_uniformity([counts[t] for t in tables], 6)
    assert rep.passed, rep.as_dict()


def test_exact_strategy_uniform_masked():
    zero = np.array(
        [[False, False, True], [False, False, False], [False, False, False]]
    )
    tables = list(oracles.iter_binary_tables([1, 2, 1], [1, 1, 2], zero))
    assert len(tables) > 1
    strategy = BinaryStrategy(kind="exact")
    counts = Counter()
    for s in range(60 * len(tables)):
        e, _ = sample_binary_table(
            [1, 2, 1], [1, 1, 2], zero, strategy=strategy, rng=batch_rng(29, s)
        )
        counts[tuple(map(tuple, e.tolist()))] += 1
    assert set(counts) == set(tables)
    rep = chi_square_uniformity([counts[t] for t in tables], len(tables))
    assert rep.passed, rep.as_dict()


def test_soft_strategies_produce_valid_tables():
    r, c = [3, 2, 4, 1], [2, 3, 2, 3]
    for kind in ("full-line", "tail-line"):
        strategy = BinaryStrategy(kind=kind)
        for s in range(30):
            e, _ = sample_binary_table(r, c, strategy=strategy, rng=batch_rng(7, s))
            assert validate_table(e, r, c, mode="binary")
    static = BinaryStrategy(kind="full-line", refresh=False)
    for s in range(30):
        e, _ = sample_binary_table(r, c, strategy=static, rng=batch_rng(13, s))
        assert validate_table(e, r, c, mode="binary")


def test_soft_coverage_small_instance():
    tables = set(oracles.iter_binary_tables([2, 2, 2], [2, 2, 2]))
    seen = set()
    for s in range(600):
        e, _ = sample_binary_table([2, 2, 2], [2, 2, 2], rng=batch_rng(23, s))
        seen.add(tuple(map(tuple, e.tolist())))
    assert seen == tables


def test_forced_decisions_consume_no_bits():
    # margins saturate the grid: every cell forced, zero random bits
    e, diag = sample_binary_table([2, 2], [2, 2], seed=0)
    assert np.array_equal(e, np.ones((2, 2), dtype=np.int64))
    assert diag.bits_consumed == 0


def test_determinism_and_seed_spread():
    r, c = [2, 1, 2], [1, 2, 2]
    a, _ = sample_binary_table(r, c, seed=77)
    b, _ = sample_binary_table(r, c, seed=77)
    assert np.array_equal(a, b)
    seen = {tuple(map(tuple, sample_binary_table(r, c, seed=s)[0])) for s in range(30)}
    assert len(seen) > 1


def test_infeasible_and_limit_errors():
    with pytest.raises(InfeasibleError):
        sample_binary_table([3, 1], [2, 2], seed=0)  # row 0 exceeds its open cells
    zero = np.eye(2, dtype=bool)
    with pytest.raises(InfeasibleError):
        sample_binary_table([2, 0], [1, 1], zero, seed=0)
    with pytest.raises(OracleLimitError):
        sample_binary_table(
            [1] * 9, [1] * 9, strategy=BinaryStrategy(kind="exact"), seed=0
        )
    with pytest.raises(ValueError):
        BinaryStrategy(kind="soft")


def test_mask_respected_in_samples():
    zero = np.array([[True, False, False], [False, True, False], [False, False, True]])
    for s in range(20):
        e, _ = sample_binary_table([1, 1, 1], [1, 1, 1], zero, rng=batch_rng(41, s))
        assert validate_table(e, [1, 1, 1], [1, 1, 1], zero, mode="binary")
