"""Command line front end.

Exit codes: 0 when the requested property holds (or the artifact was
built and verified), 1 when it fails, 2 on usage, input, or capacity
errors.  Standard output carries machine-readable data only; progress
notes go to standard error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Optional

from .construct import (
    BoundError,
    ConstructionError,
    construct_2rigid,
    construct_ellrigid,
    falling_factorial,
    max_k_2rigid,
    r_bounds,
    sperner_bound_holds,
    surjection_count,
)
from .kernel import (
    CapacityError,
    EncodingError,
    PartialFn,
    Relation,
    is_trivial,
)
from .preserve import preserves
from .rigidity import EmptyRelationError, is_hereditarily_ell_rigid
from .strongrigid import (
    NoWitnessError,
    chain_inclusion,
    delta,
    limit_is_trivial_clone,
    phi,
    phi_preserves_all,
    witness_nontrivial,
)


@dataclass(frozen=True)
class ClassificationRecord:
    k: int
    h: int
    ell: int
    relation_rank: int
    verdict: bool
    failing_function: Optional[dict]
    elapsed_micros: int

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "h": self.h,
            "ell": self.ell,
            "relation_rank": self.relation_rank,
            "verdict": self.verdict,
            "failing_function": self.failing_function,
            "elapsed_micros": self.elapsed_micros,
        }


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _classify_chunk(task) -> list:
    k, h, ell, start, stop, timing = task
    nbytes = (k**h + 7) // 8
    out = []
    for rank in range(start, stop):
        began = time.perf_counter() if timing else 0.0
        rho = Relation(k, h, rank.to_bytes(nbytes, "little"))
        report = is_hereditarily_ell_rigid(rho, ell)
        micros = int((time.perf_counter() - began) * 1e6) if timing else 0
        fn = (
            None
            if report.failing_function is None
            else report.failing_function.to_json()
        )
        out.append(
            ClassificationRecord(
                k, h, ell, rank, report.verdict, fn, micros
            ).to_json_dict()
        )
    return out


def cmd_check(args) -> int:
    try:
        with open(args.relation, "r", encoding="utf-8") as fh:
            rho = Relation.from_json(json.load(fh))
    except (OSError, json.JSONDecodeError, EncodingError, ValueError, KeyError) as exc:
        print(f"error: cannot load relation: {exc}", file=sys.stderr)
        return 2
    try:
        report = is_hereditarily_ell_rigid(rho, args.ell)
    except (EmptyRelationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = {
        "k": rho.k,
        "h": rho.h,
        "ell": args.ell,
        "rigid": report.verdict,
        "failing_side": report.failing_side,
        "failing_function": (
            None
            if report.failing_function is None
            else report.failing_function.to_json()
        ),
        "witness": None if report.witness is None else list(report.witness),
    }
    print(_dump(out))
    return 0 if report.verdict else 1


def cmd_construct(args) -> int:
    k, ell, h = args.k, args.ell, args.h
    try:
        if ell == 2:
            rho = construct_2rigid(k, h)
            lhs = k * (k - 1)
            rhs = math.comb(2**h - 2, 2 ** (h - 1) - 1)
        elif ell >= 3:
            rho = construct_ellrigid(k, ell, h)
            s = surjection_count(h, ell)
            fe = math.factorial(ell)
            lhs = falling_factorial(k, ell)
            rhs = math.comb(s - fe, (s - fe) // 2)
        else:
            print(f"error: need ell >= 2, got {ell}", file=sys.stderr)
            return 2
    except (BoundError, ValueError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    payload = rho.to_json(args.format)
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(_dump(payload) + "\n")
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 2
    print(
        _dump(
            {
                "k": k,
                "ell": ell,
                "h": h,
                "bound_lhs": lhs,
                "bound_rhs": rhs,
                "size": rho.size,
                "verified": True,
                "out": args.out,
            }
        )
    )
    return 0


def cmd_classify(args) -> int:
    k, h, ell = args.k, args.h, args.ell
    if k**h > 16:
        print(
            f"error: classify sweeps 2**(k**h) relations and requires "
            f"k**h <= 16, got {k**h}",
            file=sys.stderr,
        )
        return 2
    if not 1 <= ell <= k:
        print(f"error: need 1 <= ell <= k, got ell={ell}", file=sys.stderr)
        return 2
    jobs = args.jobs
    if jobs < 1:
        print(f"error: need jobs >= 1, got {jobs}", file=sys.stderr)
        return 2
    total = 2 ** (k**h)
    start = max(1, args.resume_from)
    ranks = range(start, total)
    chunk = max(1, (len(ranks) + 4 * jobs - 1) // (4 * jobs))
    tasks = [
        (k, h, ell, lo, min(lo + chunk, total), args.timing)
        for lo in range(start, total, chunk)
    ]
    if jobs == 1:
        batches = [_classify_chunk(s) for s in tasks]
    else:
        with Pool(jobs) as pool:
            batches = pool.map(_classify_chunk, tasks)
    records = [rec for batch in batches for rec in batch]
    lines = "".join(_dump(rec) + "\n" for rec in records)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(lines)
    else:
        sys.stdout.write(lines)
    rigid = sum(1 for rec in records if rec["verdict"])
    csv_text = (
        "k,h,ell,total,rigid,not_rigid\n"
        f"{k},{h},{ell},{len(records)},{rigid},{len(records) - rigid}\n"
    )
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    elif args.out:
        sys.stdout.write(csv_text)
    else:
        sys.stderr.write(csv_text)
    print(f"classified {len(records)} relations", file=sys.stderr)
    return 0


def cmd_bounds(args) -> int:
    ell, h = args.ell, args.h
    if ell < 1 or h < 1:
        print("error: need ell >= 1 and h >= 1", file=sys.stderr)
        return 2
    rows = [("ell", ell), ("h", h)]
    s = surjection_count(h, ell)
    rows.append(("surjections", s))
    rows.append(("middle_layer", math.comb(s, s // 2)))
    if ell == 2:
        rows.append(("max_k", max_k_2rigid(h)))
    if ell >= 2 and ell < h:
        lo, hi = r_bounds(ell, h)
        rows.append(("r_lower", lo))
        rows.append(("r_upper", hi))
    if args.k is not None:
        rows.append(("k", args.k))
        rows.append(("tuples_needed", falling_factorial(args.k, ell)))
        rows.append(
            ("sperner_bound_holds", str(sperner_bound_holds(args.k, ell, h)).lower())
        )
    print("name,value")
    for name, value in rows:
        print(f"{name},{value}")
    return 0


def cmd_strong(args) -> int:
    if args.suite == "phi":
        n = args.n
        h = args.h if args.h is not None else n - 1
        try:
            f = phi(n)
            nontrivial = not is_trivial(f)
            below = phi_preserves_all(n, h)
            fails_own = not preserves(f, delta(1, n)).preserved
        except (ValueError, CapacityError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(
            _dump(
                {
                    "n": n,
                    "h": h,
                    "nontrivial": nontrivial,
                    "preserves_all_below": below,
                    "fails_delta_1_n": fails_own,
                }
            )
        )
        return 0 if nontrivial and below and fails_own else 1
    if args.suite == "witness":
        try:
            with open(args.fn_file, "r", encoding="utf-8") as fh:
                f = PartialFn.from_json(json.load(fh))
        except (OSError, json.JSONDecodeError, EncodingError, ValueError, KeyError) as exc:
            print(f"error: cannot load function: {exc}", file=sys.stderr)
            return 2
        try:
            w = witness_nontrivial(f)
        except NoWitnessError:
            print(_dump({"trivial": True, "witness": None}))
            return 1
        print(_dump(w.to_json()))
        return 0
    if args.suite == "chain":
        try:
            holds = chain_inclusion(args.h, args.arity_cap, args.dom_cap)
        except (ValueError, CapacityError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(
            _dump(
                {
                    "h": args.h,
                    "arity_cap": args.arity_cap,
                    "dom_cap": args.dom_cap,
                    "holds": holds,
                    "separator_arity": args.h + 1,
                }
            )
        )
        return 0 if holds else 1
    if args.suite == "limit":
        try:
            holds = limit_is_trivial_clone(args.arity_cap)
        except (ValueError, CapacityError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(_dump({"arity_cap": args.arity_cap, "holds": holds}))
        return 0 if holds else 1
    print(f"error: unknown suite {args.suite!r}", file=sys.stderr)
    return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rigidrel",
        description="Hereditary rigidity of finite relations: check, "
        "construct, classify, and inspect bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide hereditary ell-rigidity of a relation file")
    p.add_argument("--relation", required=True, help="path to a relation JSON file")
    p.add_argument("--ell", type=int, required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", help="build and verify a rigid relation")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--out", required=True, help="where to write the relation JSON")
    p.add_argument("--format", choices=("mask", "tuples"), default="mask")
    p.set_defaults(func=cmd_construct)

    try:
        default_jobs = int(os.environ.get("RIGIDREL_JOBS", "1"))
    except ValueError:
        default_jobs = 0  # rejected later by the jobs >= 1 check
    p = sub.add_parser("classify", help="classify every nonempty relation at (k, h)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--jobs", type=int, default=default_jobs)
    p.add_argument("--out", help="JSONL destination (default: stdout)")
    p.add_argument("--summary", help="CSV summary destination")
    p.add_argument("--resume-from", type=int, default=1, dest="resume_from")
    p.add_argument(
        "--timing",
        action="store_true",
        help="fill elapsed_micros (off by default to keep output deterministic)",
    )
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bounds", help="print the counting bounds as CSV")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("strong", help="two-element strong rigidity suites")
    p.add_argument("--suite", choices=("phi", "witness", "chain", "limit"), required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--fn-file", dest="fn_file")
    p.add_argument("--arity-cap", type=int, default=2, dest="arity_cap")
    p.add_argument("--dom-cap", type=int, default=None, dest="dom_cap")
    p.set_defaults(func=cmd_strong)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.command == "strong" and args.suite == "phi" and args.n is None:
        print("error: --suite phi requires --n", file=sys.stderr)
        return 2
    if args.command == "strong" and args.suite == "witness" and args.fn_file is None:
        print("error: --suite witness requires --fn-file", file=sys.stderr)
        return 2
    if args.command == "strong" and args.suite == "chain" and args.h is None:
        print("error: --suite chain requires --h", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
