"""Command-line front end: classify, count, dual-check, nearbent, distance,
stab-hist.

Every run writes a flat key=value manifest next to its result files.  Result
files contain no timestamps, so re-running with the same manifest settings
(including the seed for randomized subcommands) reproduces them byte for
byte.  Long classifications checkpoint after every parent representative and
can be resumed with --resume.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from math import comb
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__
from .bits import space_dimension
from .bfcore import BooleanFunction
from .census import (
    ClassCountTable,
    burnside_count,
    duality_check,
    near_bent_census,
    table_render,
)
from .classify import (
    ClassRecord,
    OrbitConfig,
    classify_space,
    descend_iter,
    read_level_file,
    stab_histogram,
    top_record,
    verify_level_mass,
    write_level_file,
)
from .covrad import covering_radius_bound, rm_generator_matrix, distance as coset_distance
from .errors import (
    DependencyMissingError,
    InternalConsistencyError,
    InvalidInputError,
    ResourceRefusedError,
    RmclassError,
)
from .group import group_order


def _out_dir(args) -> Path:
    base = args.out or os.environ.get("RMCLASS_OUT") or "rmclass-runs"
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(path: Path, pairs: dict) -> None:
    with open(path, "w") as fh:
        for k, v in pairs.items():
            fh.write(f"{k}={v}\n")


def _read_manifest(path: Path) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and "=" in line:
                k, v = line.split("=", 1)
                out[k] = v
    return out


def _log(args, msg: str) -> None:
    if args.verbose:
        print(msg, file=sys.stderr, flush=True)


# -- classify ------------------------------------------------------------------


class _Checkpoint:
    """Append-only progress file for the level currently being descended."""

    def __init__(self, path: Path):
        self.path = path

    def load(self):
        """Returns (level, parents_done, records) from complete parent blocks."""
        if not self.path.exists():
            return None
        level = None
        m = None
        done = 0
        records: List[ClassRecord] = []
        pending: List[ClassRecord] = []
        with open(self.path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("# checkpoint"):
                    fields = dict(kv.split("=") for kv in line.split()[2:])
                    level = int(fields["level"])
                    m = int(fields["m"])
                elif line.startswith("# parent-done"):
                    done = int(line.split()[2]) + 1
                    records.extend(pending)
                    pending = []
                else:
                    pending.append(ClassRecord.from_line(m, line))
        if level is None:
            return None
        return level, done, records

    def start(self, m: int, level: int) -> None:
        with open(self.path, "w") as fh:
            fh.write(f"# checkpoint level={level} m={m}\n")

    def parent_done(self, idx: int, children: Sequence[ClassRecord]) -> None:
        with open(self.path, "a") as fh:
            for rec in children:
                fh.write(rec.to_line() + "\n")
            fh.write(f"# parent-done {idx}\n")

    def clear(self) -> None:
        if self.path.exists():
            self.path.unlink()


def _estimate_level_bytes(m: int, r: int) -> int:
    return (1 << comb(m, r)) + (64 << 20)


def cmd_classify(args) -> int:
    m, s, t = args.m, args.s, args.t
    if not (0 <= s <= t <= m):
        raise InvalidInputError(f"need 0 <= s <= t <= m, got s={s} t={t} m={m}")
    target = args.to_level if args.to_level is not None else s - 1
    if not (s - 1 <= target <= t):
        raise InvalidInputError(f"--to-level must lie in [{s - 1}, {t}]")
    config = OrbitConfig(mem_limit_bytes=args.mem_limit * (1 << 20))
    out = _out_dir(args)
    manifest_path = out / "manifest.txt"
    ckpt = _Checkpoint(out / "checkpoint.txt")

    # pre-flight: every boundary space this run will touch
    for r in range(t, target, -1):
        need = _estimate_level_bytes(m, r)
        if need > config.mem_limit_bytes:
            raise ResourceRefusedError(
                f"level {r} needs a 2^{comb(m, r)}-element form space "
                f"(~{need >> 20} MiB > limit {args.mem_limit} MiB); "
                f"rerun with a higher --mem-limit on suitable hardware"
            )

    settings = {
        "artifact": f"rmclass {__version__}",
        "command": "classify",
        "m": m, "s": s, "t": t, "to_level": target,
        "mem_limit_mib": args.mem_limit,
        "threads": args.threads,
    }
    records = [top_record(m, t)]
    level = t
    done_levels = {}
    if args.resume and manifest_path.exists():
        old = _read_manifest(manifest_path)
        for key in ("command", "m", "s", "t", "to_level"):
            if old.get(key) != str(settings[key]):
                raise InvalidInputError(
                    f"--resume: manifest mismatch on {key} ({old.get(key)} vs {settings[key]})"
                )
        for r in range(t - 1, target - 1, -1):
            path = out / f"level_{r}.txt"
            if path.exists():
                try:
                    loaded = read_level_file(path)
                except InvalidInputError:
                    break
                records = loaded
                level = r
                done_levels[r] = len(loaded)
            else:
                break
        _log(args, f"resuming at level {level} with {len(records)} records")

    manifest = dict(settings)
    manifest["started"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    manifest["status"] = "running"
    _write_manifest(manifest_path, manifest)

    while level > target:
        parents = records
        resumed = ckpt.load() if args.resume else None
        start_at, out_records = 0, []
        if resumed and resumed[0] == level - 1:
            start_at, out_records = resumed[1], list(resumed[2])
            _log(args, f"checkpoint: level {level - 1} resumes at parent {start_at}")
        else:
            ckpt.start(m, level - 1)
        t0 = time.time()
        for idx, _parent, children in descend_iter(parents[start_at:], t, config):
            real_idx = start_at + idx
            out_records.extend(children)
            ckpt.parent_done(real_idx, children)
            _log(
                args,
                f"level {level - 1}: parent {real_idx + 1}/{len(parents)}, "
                f"{len(out_records)} records, {time.time() - t0:.1f}s",
            )
        verify_level_mass(out_records, t)
        records = out_records
        level -= 1
        write_level_file(out / f"level_{level}.txt", records)
        ckpt.clear()
        done_levels[level] = len(records)
        manifest[f"level_{level}_count"] = len(records)
        _write_manifest(manifest_path, manifest)

    manifest["finished"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    manifest["status"] = "complete"
    _write_manifest(manifest_path, manifest)
    print(f"classified B({s},{t},{m}) down to level {target}")
    for r in sorted(done_levels, reverse=True):
        print(f"  level {r}: {done_levels[r]} classes")
    print(f"records in {out}")
    return 0


# -- count / dual-check --------------------------------------------------------


def _classify_count(s, t, m, config) -> int:
    return len(classify_space(s, t, m, config))


def cmd_count(args) -> int:
    config = OrbitConfig(mem_limit_bytes=args.mem_limit * (1 << 20))
    cells = [(args.s, args.t)] if not args.all_cells else [
        (s, t) for s in range(args.m + 1) for t in range(s, args.m + 1)
    ]
    if not args.all_cells and (args.s is None or args.t is None):
        raise InvalidInputError("count needs --s and --t (or --all-cells)")
    rows = []
    for s, t in cells:
        by = {}
        if args.method in ("classify", "both"):
            by["classify"] = _classify_count(s, t, args.m, config)
        if args.method in ("burnside", "both"):
            by["burnside"] = burnside_count(s, t, args.m, allow_long=args.allow_long)
        if args.method == "both" and by["classify"] != by["burnside"]:
            raise InternalConsistencyError(
                f"methods disagree at ({s},{t},{args.m}): {by}"
            )
        value = by.get("classify", by.get("burnside"))
        rows.append((s, t, value, by))
        for method, v in by.items():
            print(f"count {s} {t} {args.m} {v} {method}")
    if args.all_cells:
        table = ClassCountTable(args.m)
        for s, t, value, _ in rows:
            table.set(s, t, value)
        print(table_render(table))
    return 0


_DUAL_DEFAULT_CELLS = {
    6: [(2, 6), (3, 6), (4, 6), (5, 6), (6, 6),
        (0, 4), (0, 3), (0, 2), (0, 1), (0, 0)],
    7: [(5, 5), (2, 2), (5, 6), (1, 2), (5, 7), (0, 2),
        (6, 6), (1, 1), (6, 7), (0, 1), (7, 7), (0, 0)],
}


def dual_default_cells(m: int) -> List[tuple]:
    if m <= 5:
        return [(s, t) for s in range(m + 1) for t in range(s, m + 1)]
    if m in _DUAL_DEFAULT_CELLS:
        return _DUAL_DEFAULT_CELLS[m]
    raise InvalidInputError(f"no default duality cells for m={m}; pass --cells")


def cmd_dual_check(args) -> int:
    config = OrbitConfig(mem_limit_bytes=args.mem_limit * (1 << 20))
    if args.cells:
        cells = []
        for part in args.cells.split(";"):
            s, t = part.split(",")
            cells.append((int(s), int(t)))
    else:
        cells = dual_default_cells(args.m)
    table = ClassCountTable(args.m)
    for s, t in cells:
        table.set(s, t, _classify_count(s, t, args.m, config))
        print(f"count {s} {t} {args.m} {table.get(s, t)} classify")
    report = duality_check(table)
    print(table_render(table))
    print(f"duality pairs checked: {len(report.checked_pairs)}")
    for (c1, v1, c2, v2) in report.violations:
        print(f"VIOLATION n{c1}={v1} but n{c2}={v2}")
    if not report.ok:
        return 1
    print("duality holds on all computed pairs")
    return 0


# -- nearbent -------------------------------------------------------------------


def cmd_nearbent(args) -> int:
    records = read_level_file(args.reps) if args.reps else None
    config = OrbitConfig(mem_limit_bytes=args.mem_limit * (1 << 20))
    census = near_bent_census(args.m, records, config)
    for pr in census.per_rep:
        print(f"nearbent-rep {pr.rep.anf_hex()} {pr.n_quadratics} {pr.orbit_size}")
    print(f"nearbent-valuation2-count {census.weighted_sum}")
    print(f"nearbent-total {census.total}")
    print(
        f"near-bent functions in {args.m} variables: {census.total} "
        f"(of which {census.weighted_sum} have valuation >= 2)"
    )
    return 0


# -- distance / covering radius ---------------------------------------------------


def cmd_distance(args) -> int:
    if args.reps:
        records = read_level_file(args.reps)
        m = records[0].m
    elif args.function is not None:
        if args.m is None:
            raise InvalidInputError("--function needs --m")
        m = args.m
        f = BooleanFunction(m, anf=int(args.function, 16))
        records = [ClassRecord(-1, f, 1, [])]
    elif args.s is not None and args.t is not None:
        if args.m is None:
            raise InvalidInputError("classifying first needs --m")
        m = args.m
        config = OrbitConfig(mem_limit_bytes=args.mem_limit * (1 << 20))
        records = classify_space(args.s, args.t, m, config)
    else:
        raise InvalidInputError("give --reps FILE, --function ANFHEX, or --s/--t")
    report = covering_radius_bound(
        records, args.r, args.threshold, args.max_iter, seed=args.seed
    )
    for rec, tr in zip(records, report.reports):
        print(
            f"distance {rec.rep.anf_hex()} {tr.best} {tr.trials} "
            f"{'hit' if tr.hit else 'miss'} {args.seed}"
        )
    print(
        f"aggregate {len(report.reports)} {report.mean_trials:.2f} "
        f"{report.stddev_trials:.2f}"
    )
    print(report.summary())
    return 0 if report.certified else 1


# -- stab-hist -------------------------------------------------------------------


def cmd_stab_hist(args) -> int:
    if args.records:
        records = read_level_file(args.records)
    elif args.s is not None and args.t is not None and args.m is not None:
        config = OrbitConfig(mem_limit_bytes=args.mem_limit * (1 << 20))
        records = classify_space(args.s, args.t, args.m, config)
    else:
        raise InvalidInputError("give --records FILE or --m/--s/--t")
    hist = stab_histogram(records)
    for order, count in hist.items():
        print(f"stab {order} {count}")
    print(f"total {sum(hist.values())}")
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rmclass",
        description="Classify Boolean functions modulo Reed-Muller codes under "
        "the affine group; count classes, census near-bent functions, bound "
        "covering radii.",
    )
    p.add_argument("--version", action="version", version=f"rmclass {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed_required=False):
        sp.add_argument("--out", help="output directory (default $RMCLASS_OUT or ./rmclass-runs)")
        sp.add_argument("--mem-limit", type=int, default=2048, help="memory budget in MiB")
        sp.add_argument("--threads", type=int, default=1, help="worker count (reserved)")
        sp.add_argument("--verbose", action="store_true")
        if seed_required:
            sp.add_argument("--seed", type=int, required=True, help="64-bit RNG seed")

    sp = sub.add_parser("classify", help="descending classification of B(s,t,m)")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--to-level", type=int, default=None)
    sp.add_argument("--resume", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("count", help="class numbers by classification and/or Burnside")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--s", type=int)
    sp.add_argument("--t", type=int)
    sp.add_argument("--all-cells", action="store_true")
    sp.add_argument("--method", choices=("classify", "burnside", "both"), default="classify")
    sp.add_argument("--allow-long", action="store_true",
                    help="permit the ~3.2e8-element m=5 Burnside enumeration")
    common(sp)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("dual-check", help="verify n(s,t,m) = n(m-t,m-s,m)")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--cells", help="semicolon-separated s,t pairs, e.g. '2,6;0,4'")
    common(sp)
    sp.set_defaults(func=cmd_dual_check)

    sp = sub.add_parser("nearbent", help="census of near-bent functions (odd m)")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--reps", help="level file with the B(3,(m+1)/2,m) classification")
    common(sp)
    sp.set_defaults(func=cmd_nearbent)

    sp = sub.add_parser("distance", help="randomized coset minimum-weight search")
    sp.add_argument("--m", type=int)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--threshold", type=int, required=True)
    sp.add_argument("--max-iter", type=int, default=2048)
    sp.add_argument("--reps", help="level file of representatives")
    sp.add_argument("--function", help="single function as ANF hex")
    sp.add_argument("--s", type=int)
    sp.add_argument("--t", type=int)
    common(sp, seed_required=True)
    sp.set_defaults(func=cmd_distance)

    sp = sub.add_parser("stab-hist", help="stabilizer-order multiplicities")
    sp.add_argument("--records", help="level file")
    sp.add_argument("--m", type=int)
    sp.add_argument("--s", type=int)
    sp.add_argument("--t", type=int)
    common(sp)
    sp.set_defaults(func=cmd_stab_hist)

    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RmclassError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
