"""Bitwise sampler for nonnegative integer tables with fixed margins.

The table is generated one binary digit plane at a time.  Within a level
every open cell receives its low bit in scan order, zero-residual lines close
immediately, and at level end all residual margins are even and halve for the
next level.  Bit decisions come either from exact completion counts or from a
factorized approximation of the conditional cell laws; the approximate route
restarts on dead states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .counting import CountOracle, shared_oracle
from .diagnostics import SamplerDiagnostics
from .errors import ContradictionError, DeadStateError, InfeasibleError
from .pmf import (
    ColumnParamScheme,
    column_parameters,
    conditioned_cell_pmf,
    convolve_truncated,
    mixed_column_sum_pmf,
)
from .errors import ConditioningError
from .table import MaskedTable, deterministic_fill

__all__ = [
    "BitSamplerStrategy",
    "exact_bit_distribution",
    "approx_bit_weight",
    "sample_contingency_table",
]


@dataclass
class BitSamplerStrategy:
    """Per-bit decision rule.

    kind "exact" draws each bit from completion counts (small instances
    only); "approx" weighs the two candidates by a product of factorized
    line laws and relies on restarts when both weights vanish.
    """

    kind: str = "approx"
    oracle: CountOracle | None = None

    def __post_init__(self):
        if self.kind not in ("exact", "approx"):
            raise ValueError(f"unknown strategy kind {self.kind!r}")


def exact_bit_distribution(i, j, t: MaskedTable, forced_even=None, oracle=None) -> float:
    """P(low bit of cell (i, j) is 0) among completions of the open state.

    Completions are nonnegative integer tables matching the residual margins
    of `t`, zero on its mask, even at `forced_even` cells, and even at
    (i, j) net of the candidate bit.  Raises DeadStateError when neither bit
    admits a completion.
    """
    oracle = oracle if oracle is not None else shared_oracle()
    fe = (
        np.zeros((t.m, t.n), dtype=bool)
        if forced_even is None
        else np.asarray(forced_even, dtype=bool).copy()
    )
    fe[i, j] = True
    counts = []
    for k in (0, 1):
        r = t.r_res.copy()
        c = t.c_res.copy()
        r[i] -= k
        c[j] -= k
        counts.append(oracle.count_integer_tables(r, c, t.mask, fe))
    a0, a1 = counts
    if a0 + a1 == 0:
        raise DeadStateError(f"no completion through cell ({i}, {j})")
    return a0 / (a0 + a1)


def approx_bit_weight(i, j, k: int, t: MaskedTable, scheme: ColumnParamScheme) -> float:
    """Factorized weight for assigning bit k to cell (i, j).

    The state is assumed scanned in column-major order up to (i, j): open
    cells in columns before j, and in column j at rows up to i, already hold
    their bit and carry an even remainder; later cells are untouched.  The
    weight is the probability of the cell's column residual under the mixed
    even/plain column law times the probability of its row residual under a
    convolution of per-cell laws, each conditioned on its own column sum.
    The candidate bit is folded into both residuals up front.  Returns 0.0
    for unreachable residuals.
    """
    if scheme.kind != "integer":
        raise ValueError("approx_bit_weight needs an integer parameter scheme")
    q = scheme.q
    r_i = int(t.r_res[i]) - k
    c_j = int(t.c_res[j]) - k
    if r_i < 0 or c_j < 0:
        return 0.0
    col_rows = t.open_rows_in_col(j)
    n_even = int(np.count_nonzero(col_rows <= i))
    col_factor = mixed_column_sum_pmf(q[j], n_even, col_rows.size - n_even, c_j).prob(c_j)
    if col_factor <= 0.0:
        return 0.0
    conv = None
    for l in t.open_cols_in_row(i):
        rows_l = t.open_rows_in_col(l)
        if l < j:
            cell_even, rest_even = True, rows_l.size - 1
        elif l == j:
            cell_even = True
            rest_even = int(np.count_nonzero(rows_l < i))
        else:
            cell_even, rest_even = False, 0
        rest_plain = rows_l.size - 1 - rest_even
        c_l = c_j if l == j else int(t.c_res[l])
        try:
            cell = conditioned_cell_pmf(cell_even, q[l], rest_even, rest_plain, c_l)
        except ConditioningError:
            return 0.0
        conv = cell if conv is None else convolve_truncated(conv, cell, r_i)
    if conv is None:
        return col_factor if r_i == 0 else 0.0
    return col_factor * conv.prob(r_i)


class _LevelState:
    """Mutable within-level state; margins are in units of the level bit."""

    __slots__ = ("r", "c", "perm", "pending", "_entries")

    def __init__(self, r, c, perm, pending, entries_scratch):
        self.r = r
        self.c = c
        self.perm = perm
        self.pending = pending
        self._entries = entries_scratch  # shared dummy, never written

    def copy(self) -> "_LevelState":
        return _LevelState(
            self.r.copy(), self.c.copy(), self.perm.copy(), self.pending.copy(), self._entries
        )

    def adopt(self, other: "_LevelState") -> None:
        self.r, self.c = other.r, other.c
        self.perm, self.pending = other.perm, other.pending

    def as_table(self) -> MaskedTable:
        return MaskedTable(self._entries, self.perm, self.r, self.c)


def _close_row(st: _LevelState, i: int, q, acc) -> None:
    # residual hit zero: pin every remaining cell of the row to remainder 0
    for l in np.flatnonzero(~st.perm[i]):
        acc[0] *= (1.0 - q[l] * q[l]) if st.pending[i, l] else (1.0 - q[l])
        st.perm[i, l] = True
        st.pending[i, l] = False
        if st.c[l] > 0 and bool(st.perm[:, l].all()):
            raise ContradictionError(f"column {l} stranded with residual {st.c[l]}")


def _close_col(st: _LevelState, j: int, q, acc) -> None:
    for s in np.flatnonzero(~st.perm[:, j]):
        acc[0] *= (1.0 - q[j] * q[j]) if st.pending[s, j] else (1.0 - q[j])
        st.perm[s, j] = True
        st.pending[s, j] = False
        if st.r[s] > 0 and bool(st.perm[s].all()):
            raise ContradictionError(f"row {s} stranded with residual {st.r[s]}")


def _apply_bit(st: _LevelState, i: int, j: int, k: int, q, acc) -> None:
    """Commit candidate bit k at open cell (i, j) and propagate closures.

    Multiplies into acc[0] the proposal probability of every decision the
    move forces, the bit itself included.  Raises ContradictionError when
    the branch strands a line.
    """
    acc[0] *= (q[j] if k else 1.0) / (1.0 + q[j])
    if k:
        if st.r[i] == 0 or st.c[j] == 0:
            raise ContradictionError(f"bit 1 at ({i}, {j}) exceeds a zero residual")
        st.r[i] -= 1
        st.c[j] -= 1
    st.pending[i, j] = True
    if st.r[i] == 0:
        _close_row(st, i, q, acc)
    if st.c[j] == 0:
        _close_col(st, j, q, acc)


def _decide(st, i, j, level, strategy, scheme, oracle, rng, diag) -> int:
    if strategy.kind == "exact":
        fe = st.pending.copy()
        fe[i, j] = True
        a = []
        for k in (0, 1):
            rr = st.r.copy()
            cc = st.c.copy()
            rr[i] -= k
            cc[j] -= k
            a.append(oracle.count_integer_tables(rr, cc, st.perm, fe))
        if a[0] + a[1] == 0:
            raise DeadStateError(f"no completion at ({i}, {j}) in level {level}")
        if a[1] == 0:
            bit = 0
        elif a[0] == 0:
            bit = 1
        else:
            diag.bits_consumed += 1
            bit = 0 if rng.random() <= a[0] / (a[0] + a[1]) else 1
        _apply_bit(st, i, j, bit, scheme.q, [1.0])
        return bit

    trials = [None, None]
    weights = [0.0, 0.0]
    for k in (0, 1):
        tr = st.copy()
        acc = [1.0]
        try:
            _apply_bit(tr, i, j, k, scheme.q, acc)
        except ContradictionError:
            continue
        trials[k] = tr
        weights[k] = acc[0] * approx_bit_weight(i, j, 0, tr.as_table(), scheme)
    p0, p1 = weights
    if p0 <= 0.0 and p1 <= 0.0:
        raise DeadStateError(f"both bit candidates weightless at ({i}, {j}) in level {level}")
    if p1 <= 0.0:
        bit = 0
    elif p0 <= 0.0:
        bit = 1
    else:
        diag.bits_consumed += 1
        bit = 0 if rng.random() <= p0 / (p0 + p1) else 1
    st.adopt(trials[bit])
    return bit


def _run_levels(pre, levels, strategy, oracle, rng, diag) -> np.ndarray:
    m, n = pre.table.m, pre.table.n
    assembled = np.zeros((m, n), dtype=np.int64)
    for fi, fj, v in pre.forced:
        assembled[fi, fj] += v
    perm = pre.table.mask.copy()
    r = pre.table.r_res.copy()
    c = pre.table.c_res.copy()
    scratch = np.zeros((m, n), dtype=np.int64)
    for b in range(levels):
        if b > 0:
            try:
                fill = deterministic_fill([], MaskedTable(scratch, perm, r, c), mode="integer")
            except ContradictionError as e:
                raise DeadStateError(f"level {b} start: {e}") from e
            for fi, fj, v in fill.forced:
                assembled[fi, fj] += v << b
            perm, r, c = fill.table.mask, fill.table.r_res, fill.table.c_res
        h = np.count_nonzero(perm, axis=0)
        scheme = column_parameters(c, h, m, "integer")
        st = _LevelState(r, c, perm, np.zeros((m, n), dtype=bool), scratch)
        for j in range(n):
            for i in range(m):
                if st.perm[i, j]:
                    continue
                bit = _decide(st, i, j, b, strategy, scheme, oracle, rng, diag)
                if bit:
                    assembled[i, j] += 1 << b
        perm, r, c = st.perm, st.r, st.c
        assert bool((st.pending | perm).all()), "level scan left an undecided cell"
        assert not (np.any(r & 1) or np.any(c & 1)), "level left an odd residual"
        r >>= 1
        c >>= 1
    assert not (np.any(r) or np.any(c)), "margins not exhausted after final level"
    return assembled


def sample_contingency_table(
    r,
    c,
    forced_zero=None,
    strategy: BitSamplerStrategy | None = None,
    seed=None,
    rng=None,
    max_restarts: int = 1000,
    retain_bit_levels: bool = False,
    scan: str = "column",
):
    """Draw a uniform nonnegative integer table with the given margins.

    Returns (entries, diagnostics).  `forced_zero` marks structurally zero
    cells; `scan` is "column" (default) or "row" for the per-level traversal
    order; `max_restarts` bounds dead-state restarts of the approximate
    strategy.  Raises InfeasibleError when propagation proves the margins
    inconsistent and DeadStateError when the restart budget runs out.
    """
    strategy = strategy if strategy is not None else BitSamplerStrategy()
    if scan not in ("column", "row"):
        raise ValueError(f"unknown scan order {scan!r}")
    transposed = scan == "row"
    if transposed:
        r, c = c, r
        if forced_zero is not None:
            forced_zero = np.asarray(forced_zero, dtype=bool).T
    rng = rng if rng is not None else np.random.default_rng(seed)
    base = MaskedTable.from_margins(r, c, forced_zero)
    oracle = strategy.oracle if strategy.oracle is not None else shared_oracle()
    if strategy.kind == "exact":
        oracle.check_integer_limits(base.r_res.tolist(), base.c_res.tolist())
        if oracle.count_integer_tables(base.r_res, base.c_res, base.mask) == 0:
            raise InfeasibleError("margins admit no table under the mask")
    try:
        pre = deterministic_fill([], base, mode="integer")
    except ContradictionError as e:
        raise InfeasibleError(f"margins admit no table under the mask: {e}") from e
    top = int(max(base.r_res.max(initial=0), base.c_res.max(initial=0)))
    levels = top.bit_length()
    diag = SamplerDiagnostics()
    diag.levels = levels
    budget = max_restarts if strategy.kind == "approx" else 0
    for attempt in range(budget + 1):
        try:
            entries = _run_levels(pre, levels, strategy, oracle, rng, diag)
            break
        except DeadStateError as e:
            diag.dead_states += 1
            if attempt == budget:
                raise DeadStateError(str(e), diagnostics=diag) from e
            diag.restarts += 1
    if retain_bit_levels:
        diag.bit_levels = [((entries >> b) & 1).astype(np.int64) for b in range(levels)]
    if transposed:
        entries = entries.T.copy()
        if diag.bit_levels is not None:
            diag.bit_levels = [lvl.T.copy() for lvl in diag.bit_levels]
    return entries, diag
