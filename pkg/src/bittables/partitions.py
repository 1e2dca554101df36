"""Exactly uniform integer partition samplers via bit-level self-similarity.

A tilted measure puts independent geometric (or Bernoulli, for distinct
parts) multiplicities on part sizes; conditioned on total n it is uniform.
The low bits of the multiplicities are sampled directly, a soft-rejection
step corrects the law of the remaining even half, and the half recurses as a
fresh instance of the same problem, so no conditional distribution ever
needs to be computed explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Partition",
    "partition_counts",
    "distinct_partition_counts",
    "enumerate_partitions",
    "sample_partition",
    "sample_distinct_partition",
]


@dataclass(frozen=True)
class Partition:
    """A partition of n as (part, multiplicity) pairs with parts ascending."""

    n: int
    pairs: tuple

    def __post_init__(self):
        pairs = tuple((int(p), int(k)) for p, k in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        last = 0
        total = 0
        for p, k in pairs:
            if p <= last or k <= 0:
                raise ValueError(f"malformed pairs {pairs}")
            last = p
            total += p * k
        if total != self.n:
            raise ValueError(f"pairs sum to {total}, expected {self.n}")

    @classmethod
    def from_parts(cls, parts) -> "Partition":
        counts: dict = {}
        for p in parts:
            counts[int(p)] = counts.get(int(p), 0) + 1
        return cls(n=sum(int(p) for p in parts), pairs=tuple(sorted(counts.items())))

    def parts(self) -> list:
        """Expanded part list, largest first."""
        out = []
        for p, k in reversed(self.pairs):
            out.extend([p] * k)
        return out

    def is_distinct(self) -> bool:
        return all(k == 1 for _, k in self.pairs)


def partition_counts(n: int) -> list:
    """p(0..n) by the pentagonal number recurrence, as exact integers."""
    if n < 0:
        raise ValueError(f"need n >= 0, got {n}")
    p = [0] * (n + 1)
    p[0] = 1
    for m in range(1, n + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            g2 = k * (3 * k + 1) // 2
            if g1 > m and g2 > m:
                break
            sign = 1 if k % 2 else -1
            if g1 <= m:
                total += sign * p[m - g1]
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return p


def distinct_partition_counts(n: int) -> list:
    """Counts of partitions of 0..n into distinct parts, as exact integers."""
    if n < 0:
        raise ValueError(f"need n >= 0, got {n}")
    q = [0] * (n + 1)
    q[0] = 1
    for part in range(1, n + 1):
        for s in range(n, part - 1, -1):
            q[s] += q[s - part]
    return q


def _partitions_rec(n, top, distinct):
    if n == 0:
        yield ()
        return
    for k in range(min(n, top), 0, -1):
        for rest in _partitions_rec(n - k, k - 1 if distinct else k, distinct):
            yield (k,) + rest


def enumerate_partitions(n: int, distinct: bool = False):
    """Yield every partition of n as a descending tuple of parts."""
    if n < 0:
        raise ValueError(f"need n >= 0, got {n}")
    return _partitions_rec(n, n, distinct)


def _stage(target, idx, probs, lognum, logmax, table, rng):
    """Sample one level's bits, soft-rejecting until the even residual is
    consistent; returns (bit flags, residual half-target)."""
    while True:
        bits = rng.random(idx.size) < probs
        a = int(idx[bits].sum())
        rem = target - a
        if rem < 0 or rem % 2:
            continue
        mp = rem // 2
        if table[mp] == 0:
            continue
        s = math.exp(lognum[mp] - logmax)
        assert 0.0 <= s <= 1.0 + 1e-12, f"acceptance {s} out of range"
        if rng.random() <= s:
            return bits, mp


def _sample_core(n, rng, tilt, table, distinct) -> dict:
    """Shared level loop; `table` holds p (or the distinct-part counts) up
    to n.  Unrestricted levels double the multiplicity carried by each
    recorded bit; distinct-part levels double the part size instead."""
    parts: dict = {}
    target = n
    factor = 1
    while target > 0:
        if target == 1:
            key = factor if distinct else 1
            parts[key] = parts.get(key, 0) + (1 if distinct else factor)
            break
        x = tilt if tilt is not None else math.exp(-math.pi / math.sqrt(6.0 * target))
        logx = math.log(x)
        # acceptance for residual l is proportional to table[l] * x**(2l),
        # the chance the untouched even halves absorb exactly 2l
        lognum = [
            (math.log(table[l]) + 2.0 * l * logx) if table[l] else -math.inf
            for l in range(target // 2 + 1)
        ]
        logmax = max(lognum)
        idx = np.arange(1, target + 1, 2 if distinct else 1)
        xi = x**idx.astype(float)
        probs = xi / (1.0 + xi)
        bits, mp = _stage(target, idx, probs, lognum, logmax, table, rng)
        for i in idx[bits]:
            key = int(i) * factor if distinct else int(i)
            parts[key] = parts.get(key, 0) + (1 if distinct else factor)
        target = mp
        factor *= 2
    return parts


def _check_args(n, tilt):
    if n < 0:
        raise ValueError(f"need n >= 0, got {n}")
    if tilt is not None and not (0.0 < tilt < 1.0):
        raise ValueError(f"tilt must lie in (0, 1), got {tilt}")


def sample_partition(n: int, seed=None, rng=None, tilt=None) -> Partition:
    """Draw a uniformly random partition of n.

    The default tilt exp(-pi / sqrt(6 t)) is rederived from the residual
    target t at every level; passing `tilt` pins that value everywhere.
    Any tilt in (0, 1) leaves the output exactly uniform.
    """
    _check_args(n, tilt)
    rng = rng if rng is not None else np.random.default_rng(seed)
    counts = _sample_core(n, rng, tilt, partition_counts(n), distinct=False)
    return Partition(n=n, pairs=tuple(sorted(counts.items())))


def sample_distinct_partition(n: int, seed=None, rng=None, tilt=None) -> Partition:
    """Draw a uniformly random partition of n into distinct parts.

    Levels read the bits of odd part sizes and recurse on the doubled
    remainder, so parts retired at level d carry a factor 2**d; distinctness
    is automatic because every positive integer splits uniquely as
    odd * 2**d.
    """
    _check_args(n, tilt)
    rng = rng if rng is not None else np.random.default_rng(seed)
    counts = _sample_core(n, rng, tilt, distinct_partition_counts(n), distinct=True)
    return Partition(n=n, pairs=tuple(sorted(counts.items())))
