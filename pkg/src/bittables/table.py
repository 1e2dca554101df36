"""Margin-constrained table state: masks, residuals, forced fills, validation."""

from __future__ import annotations

import csv
import io
import json
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .errors import ContradictionError

__all__ = [
    "MarginSpec",
    "MaskedTable",
    "FillResult",
    "deterministic_fill",
    "validate_table",
    "binary_feasible",
    "table_to_json",
    "table_from_json",
    "entries_to_csv",
    "entries_from_csv",
]


@dataclass(frozen=True)
class MarginSpec:
    """Row and column sum targets; total mass must balance."""

    r: tuple
    c: tuple

    def __post_init__(self):
        r = tuple(int(x) for x in self.r)
        c = tuple(int(x) for x in self.c)
        if any(x < 0 for x in r) or any(x < 0 for x in c):
            raise ValueError("margins must be nonnegative")
        if sum(r) != sum(c):
            raise ValueError(f"margin totals differ: sum(r)={sum(r)} sum(c)={sum(c)}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "c", c)


class MaskedTable:
    """A partially determined table.

    `mask[i, j]` is True once cell (i, j) is finalized (including cells
    forced to zero up front); `entries` holds finalized values and zeros
    elsewhere.  `r_res`/`c_res` are the margins net of finalized cells.
    """

    __slots__ = ("m", "n", "entries", "mask", "r_res", "c_res")

    def __init__(self, entries, mask, r_res, c_res):
        self.entries = np.asarray(entries, dtype=np.int64)
        self.mask = np.asarray(mask, dtype=bool)
        self.r_res = np.asarray(r_res, dtype=np.int64)
        self.c_res = np.asarray(c_res, dtype=np.int64)
        self.m, self.n = self.entries.shape

    @classmethod
    def from_margins(cls, r, c, forced_zero=None) -> "MaskedTable":
        spec = MarginSpec(tuple(r), tuple(c))
        m, n = len(spec.r), len(spec.c)
        mask = np.zeros((m, n), dtype=bool)
        if forced_zero is not None:
            fz = np.asarray(forced_zero, dtype=bool)
            if fz.shape != (m, n):
                raise ValueError(f"mask shape {fz.shape} does not match ({m}, {n})")
            mask |= fz
        return cls(np.zeros((m, n), dtype=np.int64), mask, np.array(spec.r), np.array(spec.c))

    def copy(self) -> "MaskedTable":
        return MaskedTable(self.entries.copy(), self.mask.copy(), self.r_res.copy(), self.c_res.copy())

    def open_count_row(self, i: int) -> int:
        return int(self.n - np.count_nonzero(self.mask[i]))

    def open_count_col(self, j: int) -> int:
        return int(self.m - np.count_nonzero(self.mask[:, j]))

    def open_cols_in_row(self, i: int) -> np.ndarray:
        return np.flatnonzero(~self.mask[i])

    def open_rows_in_col(self, j: int) -> np.ndarray:
        return np.flatnonzero(~self.mask[:, j])

    def is_complete(self) -> bool:
        return bool(self.mask.all())

    def finalize(self, i: int, j: int, value: int) -> None:
        """Commit a cell value, decrementing both residuals.

        Raises ContradictionError if the cell is already finalized, the
        value is negative, or either residual would go negative.
        """
        if self.mask[i, j]:
            raise ContradictionError(f"cell ({i}, {j}) already finalized")
        if value < 0:
            raise ContradictionError(f"negative value {value} at ({i}, {j})")
        if self.r_res[i] < value or self.c_res[j] < value:
            raise ContradictionError(
                f"value {value} at ({i}, {j}) exceeds residuals "
                f"r={self.r_res[i]} c={self.c_res[j]}"
            )
        self.entries[i, j] = value
        self.mask[i, j] = True
        self.r_res[i] -= value
        self.c_res[j] -= value


@dataclass
class FillResult:
    """Outcome of a propagation pass: the forced assignments and new state."""

    forced: list
    table: MaskedTable


def _fill_inplace(t: MaskedTable, seeds, mode: str, forced: list, rescan: bool = True) -> None:
    """Apply seeds then propagate forced values to a fixed point, in place.

    Rules: a line with zero residual zeroes its open cells; a binary line
    whose residual equals its open-cell count sets them all to 1; an integer
    line with a single open cell takes the whole residual.  Raises
    ContradictionError when no completion exists.  `rescan=False` skips the
    initial pass over all lines and only propagates outward from the seeds;
    correct only when the input state is already a fixed point.
    """
    if mode not in ("integer", "binary"):
        raise ValueError(f"unknown mode {mode!r}")
    dirty: deque = deque()
    queued = set()

    def enqueue(kind, idx):
        if (kind, idx) not in queued:
            queued.add((kind, idx))
            dirty.append((kind, idx))

    def commit(i, j, value):
        if mode == "binary" and value not in (0, 1):
            raise ContradictionError(f"binary cell ({i}, {j}) assigned {value}")
        t.finalize(i, j, value)
        forced.append((i, j, value))
        enqueue("r", i)
        enqueue("c", j)

    for i, j, value in seeds:
        commit(int(i), int(j), int(value))
    if rescan:
        for i in range(t.m):
            enqueue("r", i)
        for j in range(t.n):
            enqueue("c", j)

    while dirty:
        kind, idx = dirty.popleft()
        queued.discard((kind, idx))
        if kind == "r":
            cells = [(idx, j) for j in np.flatnonzero(~t.mask[idx])]
            res = int(t.r_res[idx])
        else:
            cells = [(i, idx) for i in np.flatnonzero(~t.mask[:, idx])]
            res = int(t.c_res[idx])
        if not cells:
            if res != 0:
                raise ContradictionError(f"line {kind}{idx} has residual {res} and no open cells")
            continue
        if res == 0:
            for i, j in cells:
                commit(i, j, 0)
        elif mode == "binary":
            if res > len(cells):
                raise ContradictionError(
                    f"line {kind}{idx} needs {res} ones in {len(cells)} open cells"
                )
            if res == len(cells):
                for i, j in cells:
                    commit(i, j, 1)
        else:
            if len(cells) == 1:
                i, j = cells[0]
                commit(i, j, res)


def deterministic_fill(
    seeds, t: MaskedTable, mode: str = "integer", assume_fixed_point: bool = False
) -> FillResult:
    """Apply seed assignments to a copy of `t` and propagate all forced cells.

    Returns the forced list (seeds first, then derived cells in propagation
    order); replaying it onto the input table reproduces the result.  The
    fixed point does not depend on seed order.  `assume_fixed_point=True`
    propagates only outward from the seeds, valid when `t` was already
    propagated; the result on such states is identical.
    """
    out = t.copy()
    forced: list = []
    _fill_inplace(out, seeds, mode, forced, rescan=not assume_fixed_point)
    return FillResult(forced=forced, table=out)


def validate_table(entries, r, c, forced_zero=None, mode: str = "integer") -> bool:
    """Check a fully determined table against margins, mask, and value domain."""
    a = np.asarray(entries, dtype=np.int64)
    r = np.asarray(r, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    if a.shape != (len(r), len(c)):
        return False
    if a.min(initial=0) < 0:
        return False
    if mode == "binary" and a.max(initial=0) > 1:
        return False
    if forced_zero is not None and np.any(a[np.asarray(forced_zero, dtype=bool)] != 0):
        return False
    return bool(np.array_equal(a.sum(axis=1), r) and np.array_equal(a.sum(axis=0), c))


def binary_feasible(r_res, c_res, forced_zero=None) -> bool:
    """Whether a 0/1 table with the given residual margins and mask exists.

    Reduces to bipartite maximum flow: rows supply r_res, columns demand
    c_res, each open cell carries capacity one.
    """
    r_res = np.asarray(r_res, dtype=np.int64)
    c_res = np.asarray(c_res, dtype=np.int64)
    if r_res.min(initial=0) < 0 or c_res.min(initial=0) < 0:
        return False
    total = int(r_res.sum())
    if total != int(c_res.sum()):
        return False
    if total == 0:
        return True
    m, n = len(r_res), len(c_res)
    if forced_zero is None:
        open_mask = np.ones((m, n), dtype=bool)
    else:
        open_mask = ~np.asarray(forced_zero, dtype=bool)
    if np.any(r_res > open_mask.sum(axis=1)) or np.any(c_res > open_mask.sum(axis=0)):
        return False
    # node layout: 0 = source, 1..m rows, m+1..m+n columns, m+n+1 = sink
    src, sink = 0, m + n + 1
    rows_idx, cols_idx = np.nonzero(open_mask)
    data = np.concatenate([r_res, np.ones(len(rows_idx), dtype=np.int64), c_res])
    row_nodes = np.concatenate([np.full(m, src), rows_idx + 1, np.arange(n) + m + 1])
    col_nodes = np.concatenate([np.arange(m) + 1, cols_idx + m + 1, np.full(n, sink)])
    graph = csr_matrix((data, (row_nodes, col_nodes)), shape=(m + n + 2, m + n + 2))
    return int(maximum_flow(graph, src, sink).flow_value) == total


def table_to_json(t: MaskedTable) -> str:
    """Serialize dimensions, entries, and mask; deterministic byte output."""
    obj = {
        "rows": t.m,
        "cols": t.n,
        "entries": t.entries.tolist(),
        "mask": t.mask.astype(int).tolist(),
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def table_from_json(s: str) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of `table_to_json`; returns (entries, mask) arrays."""
    obj = json.loads(s)
    m, n = int(obj["rows"]), int(obj["cols"])
    entries = np.asarray(obj["entries"], dtype=np.int64)
    mask = np.asarray(obj["mask"], dtype=bool)
    if entries.shape != (m, n) or mask.shape != (m, n):
        raise ValueError("entry or mask shape does not match declared dimensions")
    return entries, mask


def entries_to_csv(entries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(entries, dtype=np.int64):
        writer.writerow([int(x) for x in row])
    return buf.getvalue()


def entries_from_csv(s: str) -> np.ndarray:
    rows = [[int(x) for x in row] for row in csv.reader(io.StringIO(s)) if row]
    return np.asarray(rows, dtype=np.int64)
