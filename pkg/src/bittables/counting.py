"""Exact counts and exhaustive enumeration for small table instances.

The counting recursions run column by column over residual row sums with
memoisation, entirely in Python integers.  They power the exact-count
sampling strategies and the uniformity tests, so everything here is exact;
size limits keep runtimes bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OracleLimitError

__all__ = [
    "CountQuery",
    "CountOracle",
    "count_integer_tables",
    "count_binary_tables",
    "enumerate_integer_tables",
    "enumerate_binary_tables",
    "iter_latin_squares",
    "enumerate_latin_squares",
]

DEFAULT_MAX_INTEGER_DIM = 6
DEFAULT_MAX_INTEGER_MARGIN = 12
DEFAULT_MAX_BINARY_DIM = 8
DEFAULT_MAX_LATIN_ORDER = 5


def _colmasks(mask, m: int, n: int) -> tuple[int, ...]:
    """Encode a boolean (m, n) mask as one row-bitmask int per column."""
    if mask is None:
        return (0,) * n
    a = np.asarray(mask, dtype=bool)
    if a.shape != (m, n):
        raise ValueError(f"mask shape {a.shape} does not match ({m}, {n})")
    out = []
    for j in range(n):
        bits = 0
        for i in range(m):
            if a[i, j]:
                bits |= 1 << i
        out.append(bits)
    return tuple(out)


@dataclass(frozen=True)
class CountQuery:
    """Normalized arguments for one exact count; usable as a cache key.

    `w` forces cells to zero, `o` forces even values; a cell in both is
    simply zero (zero is even), so `w` dominates.
    """

    kind: str  # "integer" or "binary"
    r: tuple
    c: tuple
    w: tuple  # per-column row bitmasks
    o: tuple

    @classmethod
    def build(cls, kind, r, c, forced_zero=None, forced_even=None) -> "CountQuery":
        r = tuple(int(x) for x in r)
        c = tuple(int(x) for x in c)
        m, n = len(r), len(c)
        return cls(kind, r, c, _colmasks(forced_zero, m, n), _colmasks(forced_even, m, n))


class CountOracle:
    """Exact table counts with per-query caching and configurable size limits."""

    def __init__(
        self,
        max_integer_dim: int = DEFAULT_MAX_INTEGER_DIM,
        max_integer_margin: int = DEFAULT_MAX_INTEGER_MARGIN,
        max_binary_dim: int = DEFAULT_MAX_BINARY_DIM,
        max_latin_order: int = DEFAULT_MAX_LATIN_ORDER,
    ):
        self.max_integer_dim = max_integer_dim
        self.max_integer_margin = max_integer_margin
        self.max_binary_dim = max_binary_dim
        self.max_latin_order = max_latin_order
        self._cache: dict = {}

    # -- limit checks ------------------------------------------------------

    def check_integer_limits(self, r, c) -> None:
        if len(r) > self.max_integer_dim or len(c) > self.max_integer_dim:
            raise OracleLimitError(
                f"integer instance {len(r)}x{len(c)} exceeds limit {self.max_integer_dim}"
            )
        top = max(max(r, default=0), max(c, default=0))
        if top > self.max_integer_margin:
            raise OracleLimitError(
                f"margin {top} exceeds integer counting limit {self.max_integer_margin}"
            )

    def check_binary_limits(self, r, c) -> None:
        if len(r) > self.max_binary_dim or len(c) > self.max_binary_dim:
            raise OracleLimitError(
                f"binary instance {len(r)}x{len(c)} exceeds limit {self.max_binary_dim}"
            )

    # -- counting ----------------------------------------------------------

    def count_integer_tables(self, r, c, forced_zero=None, forced_even=None) -> int:
        """Number of nonnegative integer tables with the given margins.

        Cells under `forced_zero` must be 0 and cells under `forced_even`
        must be even.  Unbalanced or negative margins count zero tables.
        """
        q = CountQuery.build("integer", r, c, forced_zero, forced_even)
        self.check_integer_limits([max(x, 0) for x in q.r], [max(x, 0) for x in q.c])
        return self._count(q)

    def count_binary_tables(self, r, c, forced_zero=None) -> int:
        """Number of 0/1 tables with the given margins and forced zeros."""
        q = CountQuery.build("binary", r, c, forced_zero, None)
        self.check_binary_limits(q.r, q.c)
        return self._count(q)

    def _count(self, q: CountQuery) -> int:
        cached = self._cache.get(q)
        if cached is not None:
            return cached
        if min(q.r, default=0) < 0 or min(q.c, default=0) < 0 or sum(q.r) != sum(q.c):
            result = 0
        else:
            result = _count_rec(q)
        self._cache[q] = result
        return result

    # -- Latin squares -----------------------------------------------------

    def iter_latin_squares(self, n: int):
        if n > self.max_latin_order:
            raise OracleLimitError(f"order {n} exceeds Latin enumeration limit {self.max_latin_order}")
        return _iter_latin(n)

    def enumerate_latin_squares(self, n: int) -> list:
        from .latin import LatinSquare

        return [LatinSquare(values=grid) for grid in self.iter_latin_squares(n)]


def _suffix_symmetric(q: CountQuery, m: int) -> list:
    """suffix_symmetric[j]: no mask column at or after j distinguishes rows.

    Only then may residual row sums be sorted into a canonical memo key.
    """
    n = len(q.c)
    full = (1 << m) - 1
    out = [False] * (n + 1)
    out[n] = True
    for j in range(n - 1, -1, -1):
        uniform = q.w[j] in (0, full) and q.o[j] in (0, full)
        out[j] = out[j + 1] and uniform
    return out


def _count_rec(q: CountQuery) -> int:
    m, n = len(q.r), len(q.c)
    if m == 0 or n == 0:
        return 1  # empty table; margins are all zero here (balanced, nonnegative)
    sym = _suffix_symmetric(q, m)
    binary = q.kind == "binary"
    memo: dict = {}

    def rec(j: int, rho: tuple) -> int:
        if j == n:
            return 1
        key = (j, tuple(sorted(rho)) if sym[j] else rho)
        cached = memo.get(key)
        if cached is not None:
            return cached
        w, o = q.w[j], q.o[j]
        # suffix capacity for pruning the column enumeration
        caps = [0] * (m + 1)
        for i in range(m - 1, -1, -1):
            avail = 0 if (w >> i) & 1 else (1 if binary else rho[i])
            caps[i] = caps[i + 1] + min(avail, rho[i])
        total = 0
        xs = [0] * m

        def go(i: int, remaining: int):
            nonlocal total
            if remaining > caps[i]:
                return
            if i == m:
                total += rec(j + 1, tuple(rho[t] - xs[t] for t in range(m)))
                return
            if (w >> i) & 1:
                xs[i] = 0
                go(i + 1, remaining)
                return
            top = min(rho[i], remaining, 1 if binary else remaining)
            step = 2 if (o >> i) & 1 else 1
            for v in range(0, top + 1, step):
                xs[i] = v
                go(i + 1, remaining - v)
            xs[i] = 0

        go(0, q.c[j])
        memo[key] = total
        return total

    return rec(0, q.r)


def _enumerate_rec(q: CountQuery):
    """Yield every table satisfying the query, as tuples of row tuples."""
    m, n = len(q.r), len(q.c)
    if sum(q.r) != sum(q.c) or min(q.r, default=0) < 0 or min(q.c, default=0) < 0:
        return
    binary = q.kind == "binary"
    cols: list = [None] * n

    def columns(j: int, rho: tuple):
        if j == n:
            if all(x == 0 for x in rho):
                yield tuple(tuple(cols[t][i] for t in range(n)) for i in range(m))
            return
        w, o = q.w[j], q.o[j]
        xs = [0] * m

        def go(i: int, remaining: int):
            if i == m:
                if remaining == 0:
                    cols[j] = tuple(xs)
                    yield from columns(j + 1, tuple(rho[t] - xs[t] for t in range(m)))
                return
            if (w >> i) & 1:
                xs[i] = 0
                yield from go(i + 1, remaining)
                return
            top = min(rho[i], remaining, 1 if binary else remaining)
            step = 2 if (o >> i) & 1 else 1
            for v in range(0, top + 1, step):
                xs[i] = v
                yield from go(i + 1, remaining - v)
            xs[i] = 0

        yield from go(0, q.c[j])

    yield from columns(0, q.r)


def _iter_latin(n: int):
    """Iterative cell-by-cell backtracking; yields grids of values 1..n."""
    if n <= 0:
        raise ValueError("order must be positive")
    full = (1 << n) - 1
    nn = n * n
    grid = [0] * nn
    rowmask = [0] * n
    colmask = [0] * n
    avail = [0] * nn
    placed = [0] * nn
    avail[0] = full
    pos = 0
    while True:
        i, j = divmod(pos, n)
        b = placed[pos]
        if b:
            rowmask[i] &= ~b
            colmask[j] &= ~b
            placed[pos] = 0
        a = avail[pos]
        if a == 0:
            if pos == 0:
                return
            pos -= 1
            continue
        b = a & -a
        avail[pos] = a ^ b
        placed[pos] = b
        rowmask[i] |= b
        colmask[j] |= b
        grid[pos] = b.bit_length()
        if pos == nn - 1:
            yield tuple(tuple(grid[t * n : (t + 1) * n]) for t in range(n))
        else:
            pos += 1
            i2, j2 = divmod(pos, n)
            avail[pos] = full & ~(rowmask[i2] | colmask[j2])
            placed[pos] = 0


_default_oracle = CountOracle()


def shared_oracle() -> CountOracle:
    """Process-wide oracle the samplers fall back on; its cache pools queries."""
    return _default_oracle


def count_integer_tables(r, c, forced_zero=None, forced_even=None) -> int:
    return _default_oracle.count_integer_tables(r, c, forced_zero, forced_even)


def count_binary_tables(r, c, forced_zero=None) -> int:
    return _default_oracle.count_binary_tables(r, c, forced_zero)


def enumerate_integer_tables(r, c, forced_zero=None, forced_even=None):
    """Yield all integer tables for the instance (small sizes only)."""
    q = CountQuery.build("integer", r, c, forced_zero, forced_even)
    _default_oracle.check_integer_limits([max(x, 0) for x in q.r], [max(x, 0) for x in q.c])
    return _enumerate_rec(q)


def enumerate_binary_tables(r, c, forced_zero=None):
    q = CountQuery.build("binary", r, c, forced_zero, None)
    _default_oracle.check_binary_limits(q.r, q.c)
    return _enumerate_rec(q)


def iter_latin_squares(n: int):
    return _default_oracle.iter_latin_squares(n)


def enumerate_latin_squares(n: int) -> list:
    return _default_oracle.enumerate_latin_squares(n)
