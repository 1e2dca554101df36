"""Command-line interface: sampling, counting, and uniformity testing.

Output is JSON lines (one object per sample, schema-versioned, key-sorted)
so identical invocations are byte-identical; tables and squares can also be
emitted as CSV.  Exit codes: 0 success, 2 dead-state abort, 1 usage or
instance error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .binary_sampler import BinaryStrategy, sample_binary_table
from .counting import (
    DEFAULT_MAX_BINARY_DIM,
    DEFAULT_MAX_INTEGER_DIM,
    DEFAULT_MAX_INTEGER_MARGIN,
    DEFAULT_MAX_LATIN_ORDER,
    CountOracle,
    _enumerate_rec,
    CountQuery,
)
from .errors import DeadStateError, InfeasibleError, OracleLimitError
from .integer_sampler import BitSamplerStrategy, sample_contingency_table
from .latin import RestartPolicy, sample_latin_square
from .partitions import enumerate_partitions, sample_distinct_partition, sample_partition
from .seeding import batch_rng
from .stats import chi_square_uniformity
from .table import entries_to_csv, validate_table

SCHEMA = 1

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits 1 on usage errors (2 is reserved)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as e:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from e


def _mask_array(text: str, m: int, n: int):
    """Parse 'i,j;i,j' 0-based cell pairs into a forced-zero matrix."""
    if not text:
        return None
    mask = np.zeros((m, n), dtype=bool)
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ValueError(f"mask cell {chunk!r} is not an i,j pair")
        i, j = int(parts[0]), int(parts[1])
        if not (0 <= i < m and 0 <= j < n):
            raise ValueError(f"mask cell ({i}, {j}) outside a {m}x{n} table")
        mask[i, j] = True
    return mask


def _mask_cells(mask) -> list:
    return [[int(i), int(j)] for i, j in np.argwhere(mask)] if mask is not None else []


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return default if raw is None else int(raw)


def _oracle() -> CountOracle:
    return CountOracle(
        max_integer_dim=_env_int("BITTABLES_MAX_INTEGER_DIM", DEFAULT_MAX_INTEGER_DIM),
        max_integer_margin=_env_int("BITTABLES_MAX_INTEGER_MARGIN", DEFAULT_MAX_INTEGER_MARGIN),
        max_binary_dim=_env_int("BITTABLES_MAX_BINARY_DIM", DEFAULT_MAX_BINARY_DIM),
        max_latin_order=_env_int("BITTABLES_MAX_LATIN_ORDER", DEFAULT_MAX_LATIN_ORDER),
    )


def _budget(flag_value) -> int:
    if flag_value is not None:
        return flag_value
    return _env_int("BITTABLES_RESTART_BUDGET", 1000)


def _emit(obj, stream) -> None:
    stream.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def _emit_csv(rows, index, stream) -> None:
    if index:
        stream.write("\n")
    stream.write(entries_to_csv(rows))


def cmd_sample_ct(args, out) -> int:
    r = _int_list(args.rows)
    c = _int_list(args.cols)
    mask = _mask_array(args.mask, len(r), len(c))
    strategy = BitSamplerStrategy(kind=args.strategy, oracle=_oracle())
    budget = _budget(args.max_restarts)
    all_valid = True
    for t in range(args.samples):
        entries, diag = sample_contingency_table(
            r,
            c,
            mask,
            strategy,
            rng=batch_rng(args.seed, t),
            max_restarts=budget,
            retain_bit_levels=args.retain_levels,
            scan=args.scan,
        )
        if args.format == "csv":
            _emit_csv(entries, t, out)
            continue
        payload = {
            "schema": SCHEMA,
            "command": "sample-ct",
            "index": t,
            "seed": args.seed,
            "rows": r,
            "cols": c,
            "mask": _mask_cells(mask),
            "strategy": args.strategy,
            "entries": entries.tolist(),
            "diagnostics": diag.as_dict(),
        }
        if args.validate:
            ok = validate_table(entries, r, c, mask, mode="integer")
            payload["valid"] = ok
            all_valid = all_valid and ok
        _emit(payload, out)
    return 0 if all_valid else 1


def cmd_sample_binary(args, out) -> int:
    r = _int_list(args.rows)
    c = _int_list(args.cols)
    mask = _mask_array(args.mask, len(r), len(c))
    strategy = BinaryStrategy(kind=args.strategy, oracle=_oracle(), refresh=not args.static_params)
    budget = _budget(args.max_restarts)
    all_valid = True
    for t in range(args.samples):
        entries, diag = sample_binary_table(
            r, c, mask, strategy, rng=batch_rng(args.seed, t), max_restarts=budget
        )
        if args.format == "csv":
            _emit_csv(entries, t, out)
            continue
        payload = {
            "schema": SCHEMA,
            "command": "sample-binary",
            "index": t,
            "seed": args.seed,
            "rows": r,
            "cols": c,
            "mask": _mask_cells(mask),
            "strategy": args.strategy,
            "entries": entries.tolist(),
            "diagnostics": diag.as_dict(),
        }
        if args.validate:
            ok = validate_table(entries, r, c, mask, mode="binary")
            payload["valid"] = ok
            all_valid = all_valid and ok
        _emit(payload, out)
    return 0 if all_valid else 1


def cmd_sample_latin(args, out) -> int:
    strategy = BinaryStrategy(kind=args.strategy, oracle=_oracle())
    policy = RestartPolicy(scope=args.policy, budget=_budget(args.budget))
    all_valid = True
    for t in range(args.samples):
        square, diag = sample_latin_square(
            args.n, strategy, policy, rng=batch_rng(args.seed, t)
        )
        grid = [list(row) for row in square.values]
        if args.format == "csv":
            _emit_csv(np.asarray(grid), t, out)
            continue
        payload = {
            "schema": SCHEMA,
            "command": "sample-latin",
            "index": t,
            "seed": args.seed,
            "n": args.n,
            "strategy": args.strategy,
            "policy": args.policy,
            "square": grid,
            "diagnostics": diag.as_dict(),
        }
        if args.validate:
            ok = square.is_valid()
            payload["valid"] = ok
            all_valid = all_valid and ok
        _emit(payload, out)
    return 0 if all_valid else 1


def cmd_sample_partition(args, out) -> int:
    sampler = sample_distinct_partition if args.distinct else sample_partition
    all_valid = True
    for t in range(args.samples):
        part = sampler(args.n, rng=batch_rng(args.seed, t), tilt=args.tilt)
        payload = {
            "schema": SCHEMA,
            "command": "sample-partition",
            "index": t,
            "seed": args.seed,
            "n": args.n,
            "distinct": bool(args.distinct),
            "parts": part.parts(),
        }
        if args.validate:
            ok = sum(part.parts()) == args.n and (not args.distinct or part.is_distinct())
            payload["valid"] = ok
            all_valid = all_valid and ok
        _emit(payload, out)
    return 0 if all_valid else 1


def cmd_count(args, out) -> int:
    oracle = _oracle()
    payload = {"schema": SCHEMA, "command": "count"}
    if args.latin:
        if args.n is None:
            raise ValueError("--latin needs --n")
        payload["kind"] = "latin"
        payload["n"] = args.n
        payload["count"] = sum(1 for _ in oracle.iter_latin_squares(args.n))
    else:
        if args.rows is None or args.cols is None:
            raise ValueError("table counts need --rows and --cols")
        r = _int_list(args.rows)
        c = _int_list(args.cols)
        mask = _mask_array(args.mask, len(r), len(c))
        kind = "binary" if args.binary else "integer"
        count = (
            oracle.count_binary_tables(r, c, mask)
            if args.binary
            else oracle.count_integer_tables(r, c, mask)
        )
        payload.update(
            {"kind": kind, "rows": r, "cols": c, "mask": _mask_cells(mask), "count": count}
        )
    _emit(payload, out)
    return 0


def _uniformity_outcomes(args, oracle):
    """Enumerate the instance's outcome keys and build a per-sample drawer."""
    if args.kind in ("ct", "binary"):
        if args.rows is None or args.cols is None:
            raise ValueError(f"kind {args.kind} needs --rows and --cols")
        r = _int_list(args.rows)
        c = _int_list(args.cols)
        mask = _mask_array(args.mask, len(r), len(c))
        qkind = "integer" if args.kind == "ct" else "binary"
        q = CountQuery.build(qkind, r, c, mask, None)
        if qkind == "integer":
            oracle.check_integer_limits([max(x, 0) for x in q.r], [max(x, 0) for x in q.c])
        else:
            oracle.check_binary_limits(q.r, q.c)
        keys = list(_enumerate_rec(q))
        if args.kind == "ct":
            strategy = BitSamplerStrategy(kind=args.strategy or "exact", oracle=oracle)

            def draw(rng):
                entries, _ = sample_contingency_table(r, c, mask, strategy, rng=rng)
                return tuple(tuple(int(x) for x in row) for row in entries)

        else:
            strategy = BinaryStrategy(kind=args.strategy or "exact", oracle=oracle)

            def draw(rng):
                entries, _ = sample_binary_table(r, c, mask, strategy, rng=rng)
                return tuple(tuple(int(x) for x in row) for row in entries)

        return keys, draw, {"rows": r, "cols": c, "mask": _mask_cells(mask)}
    if args.kind in ("latin", "partition") and args.n is None:
        raise ValueError(f"kind {args.kind} needs --n")
    if args.kind == "latin":
        keys = list(oracle.iter_latin_squares(args.n))
        strategy = BinaryStrategy(kind=args.strategy or "full-line", oracle=oracle)

        def draw(rng):
            square, _ = sample_latin_square(args.n, strategy, rng=rng)
            return square.values

        return keys, draw, {"n": args.n}
    keys = list(enumerate_partitions(args.n, distinct=args.distinct))
    sampler = sample_distinct_partition if args.distinct else sample_partition

    def draw(rng):
        return tuple(sampler(args.n, rng=rng).parts())

    return keys, draw, {"n": args.n, "distinct": bool(args.distinct)}


def cmd_test_uniformity(args, out) -> int:
    oracle = _oracle()
    keys, draw, instance = _uniformity_outcomes(args, oracle)
    if not keys:
        raise InfeasibleError("instance has no outcomes to test against")
    index = {k: i for i, k in enumerate(keys)}
    counts = [0] * len(keys)
    unmatched = 0
    for t in range(args.samples):
        k = draw(batch_rng(args.seed, t))
        i = index.get(k)
        if i is None:
            unmatched += 1
        else:
            counts[i] += 1
    report = chi_square_uniformity(counts, len(keys), significance=args.significance)
    payload = {
        "schema": SCHEMA,
        "command": "test-uniformity",
        "kind": args.kind,
        "seed": args.seed,
        "samples": args.samples,
        "unmatched": unmatched,
        "report": report.as_dict(),
    }
    payload.update(instance)
    _emit(payload, out)
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="bittables", description="Margin-constrained table samplers.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=False):
        sp.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
        sp.add_argument("--samples", type=int, default=1, help="number of samples")
        sp.add_argument("--validate", action="store_true", help="revalidate each sample")
        if fmt:
            sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = sub.add_parser("sample-ct", help="integer tables with fixed margins")
    sp.add_argument("--rows", required=True, help="comma-separated row sums")
    sp.add_argument("--cols", required=True, help="comma-separated column sums")
    sp.add_argument("--mask", default="", help="forced-zero cells 'i,j;i,j' (0-based)")
    sp.add_argument("--strategy", choices=["exact", "approx"], default="approx")
    sp.add_argument("--scan", choices=["column", "row"], default="column")
    sp.add_argument("--retain-levels", action="store_true", help="keep bit planes")
    sp.add_argument("--max-restarts", type=int, default=None)
    common(sp, fmt=True)
    sp.set_defaults(func=cmd_sample_ct)

    sp = sub.add_parser("sample-binary", help="0/1 tables with fixed margins")
    sp.add_argument("--rows", required=True)
    sp.add_argument("--cols", required=True)
    sp.add_argument("--mask", default="")
    sp.add_argument("--strategy", choices=["exact", "full-line", "tail-line"], default="full-line")
    sp.add_argument("--static-params", action="store_true", help="freeze column parameters")
    sp.add_argument("--max-restarts", type=int, default=None)
    common(sp, fmt=True)
    sp.set_defaults(func=cmd_sample_binary)

    sp = sub.add_parser("sample-latin", help="Latin squares")
    sp.add_argument("--n", type=int, required=True, help="order")
    sp.add_argument("--strategy", choices=["exact", "full-line", "tail-line"], default="full-line")
    sp.add_argument("--policy", choices=["retry_level", "restart_all", "abort"], default="retry_level")
    sp.add_argument("--budget", type=int, default=None)
    common(sp, fmt=True)
    sp.set_defaults(func=cmd_sample_latin)

    sp = sub.add_parser("sample-partition", help="integer partitions")
    sp.add_argument("--n", type=int, required=True, help="target total")
    sp.add_argument("--distinct", action="store_true", help="distinct parts only")
    sp.add_argument("--tilt", type=float, default=None, help="fixed tilt in (0, 1)")
    common(sp)
    sp.set_defaults(func=cmd_sample_partition)

    sp = sub.add_parser("count", help="exact solution counts")
    kind = sp.add_mutually_exclusive_group(required=True)
    kind.add_argument("--integer", action="store_true")
    kind.add_argument("--binary", action="store_true")
    kind.add_argument("--latin", action="store_true")
    sp.add_argument("--rows")
    sp.add_argument("--cols")
    sp.add_argument("--mask", default="")
    sp.add_argument("--n", type=int, help="Latin order")
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("test-uniformity", help="chi-square check against the solution set")
    sp.add_argument("--kind", choices=["ct", "binary", "latin", "partition"], required=True)
    sp.add_argument("--rows")
    sp.add_argument("--cols")
    sp.add_argument("--mask", default="")
    sp.add_argument("--n", type=int)
    sp.add_argument("--distinct", action="store_true")
    sp.add_argument("--strategy", default=None, help="sampler strategy (kind-dependent)")
    sp.add_argument("--significance", type=float, default=0.01)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=1000)
    sp.set_defaults(func=cmd_test_uniformity)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except DeadStateError as e:
        print(f"dead state: {e}", file=sys.stderr)
        return 2
    except (InfeasibleError, OracleLimitError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
