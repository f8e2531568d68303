"""Command-line front end: classify / enumerate / table / verify.

Exit codes: 0 success, 1 bad input or failed verification, 2 nongeneric
length vector (the offending wall is reported).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import chambers, combinatorics, morse, topology

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_NONGENERIC = 2


def _query(target: str, d: Optional[int]) -> topology.SpaceQuery:
    if target == "planar":
        return topology.SpaceQuery.planar()
    if target == "spatial":
        return topology.SpaceQuery.spatial()
    return topology.SpaceQuery.chain(d)


def _cmd_classify(args) -> int:
    try:
        vec = combinatorics.LengthVector.parse(args.lengths)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if not vec.sorted:
        print(
            "warning: lengths were not nondecreasing; sorting. "
            "Reported subsets index the sorted vector (the longest edge is m).",
            file=sys.stderr,
        )
        vec = vec.sort()
    try:
        code = combinatorics.genetic_code(vec)
    except combinatorics.NongenericError as exc:
        print(f"nongeneric: on wall H_{{{exc.wall.digits()}}}", file=sys.stderr)
        return EXIT_NONGENERIC
    q = _query(args.target, args.d)
    expr = topology.describe(code, q)
    amin = chambers.a_min(code)
    payload = {
        "m": vec.m,
        "code": str(code),
        "aMin": [str(e) for e in amin.entries],
        "target": args.target,
        "space": topology.render(expr),
    }
    if args.d is not None:
        inv = morse.morse_inventory(code, args.d)
        payload["morse"] = inv.to_json()
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    elif args.format == "tsv":
        print("\t".join([payload["code"], ",".join(payload["aMin"]), payload["space"]]))
    else:
        print(f"code   {payload['code']}")
        print(f"a_min  ({','.join(payload['aMin'])})")
        print(f"{args.target:<6} {payload['space']}")
        if args.d is not None:
            inv = morse.morse_inventory(code, args.d)
            hist = " ".join(f"{k}:{v}" for k, v in inv.histogram)
            print(f"morse  indices {hist}  chi(V)={inv.euler_V}")
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    try:
        chs = chambers.enumerate_chambers(args.m, args.unsafe_large_m)
    except (combinatorics.DomainError, chambers.BoundExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.format == "json":
        print(json.dumps([c.to_json() for c in chs], indent=2))
    elif args.format == "tsv":
        for c in chs:
            print(f"{c.code}\t{','.join(str(e) for e in c.a_min.entries)}")
    else:
        for c in chs:
            print(c.to_line())
        print(f"total {len(chs)} chambers for m={args.m}", file=sys.stderr)
    return EXIT_OK


def _cmd_table(args) -> int:
    try:
        rows = topology.table_rows(args.m)
    except (combinatorics.DomainError, chambers.BoundExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.golden:
        import os

        path = os.path.join(args.golden, f"table_m{args.m}.txt")
        try:
            with open(path, encoding="utf-8") as fh:
                want = fh.read().splitlines()
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        if rows == want:
            print(f"table m={args.m}: matches {path}")
            return EXIT_OK
        for i, (got, exp) in enumerate(zip(rows, want)):
            if got != exp:
                print(f"line {i + 1} differs:\n  got  {got}\n  want {exp}")
        if len(rows) != len(want):
            print(f"row count differs: got {len(rows)}, want {len(want)}")
        return EXIT_PARSE
    if args.format == "json":
        print(json.dumps(rows, indent=2, ensure_ascii=False))
    elif args.format == "tsv":
        for code in topology.lineage_order(args.m):
            vec = chambers.a_min(code)
            cells = [
                str(code),
                ",".join(str(e) for e in vec.entries),
                topology.render(topology.describe(code, topology.SpaceQuery.planar())),
                topology.render(topology.describe(code, topology.SpaceQuery.spatial())),
                topology.render(topology.describe(code, topology.SpaceQuery.chain())),
            ]
            print("\t".join(cells))
    else:
        for row in rows:
            print(row)
    return EXIT_OK


def _cmd_verify(args) -> int:
    failures = 0

    def check(label: str, ok: bool, detail: str = ""):
        nonlocal failures
        status = "ok  " if ok else "FAIL"
        print(f"[{status}] {label}" + (f": {detail}" if detail else ""))
        if not ok:
            failures += 1

    counts = {3: 2, 4: 3, 5: 7, 6: 21, 7: 135}
    for m in range(3, min(args.m, 7) + 1):
        got = len(chambers.enumerate_chambers(m))
        check(f"chamber count m={m}", got == counts[m], f"{got} vs {counts[m]}")
    for m in range(3, min(args.m, 7) + 1):
        bad = []
        for ch in chambers.enumerate_chambers(m):
            if combinatorics.genetic_code(ch.a_min) != ch.code:
                bad.append(str(ch.code))
        check(f"a_min roundtrip m={m}", not bad, ";".join(bad))
    for m in range(3, min(args.m, 6)):
        bad = []
        for ch in chambers.enumerate_chambers(m):
            if not ch.code.genes:
                continue
            lift = chambers.tiny_edge(ch.code)
            if chambers.tiny_edge_reduce(lift) != ch.code:
                bad.append(str(ch.code))
        check(f"tiny-edge roundtrip m={m}", not bad, ";".join(bad))
    for m in range(3, min(args.m, 6) + 1):
        bad = []
        for ch in chambers.enumerate_chambers(m):
            if not ch.code.genes:
                continue
            try:
                res = morse.euler_boundary_check(ch.code)
            except morse.UnknownDescription:
                continue
            if not res.passed:
                bad.append(f"{ch.code}:{res.detail}")
        check(f"Euler boundary m={m}", not bad, ";".join(bad))
    for m in range(4, min(args.m, 6) + 1):
        bad = []
        for code, alts in topology.derivations(m).items():
            for alt in alts[1:]:
                if not topology.equivalent(alts[0].chain, alt.chain):
                    bad.append(f"{code} chain via {alt.rule}")
                if not topology.equivalent(alts[0].spatial, alt.spatial):
                    bad.append(f"{code} spatial via {alt.rule}")
        check(f"path independence m={m}", not bad, ";".join(bad))
    for m in range(4, min(args.m, 7) + 1):
        described, total = topology.coverage(m, topology.SpaceQuery.chain())
        print(f"[info] coverage m={m}: {described}/{total} chambers described")
    return EXIT_OK if failures == 0 else EXIT_PARSE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polyspace",
        description="classify polygon/chain-space chambers from edge lengths",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify a length vector")
    c.add_argument("--lengths", required=True, help="comma-separated rationals, e.g. 1,1,1/2,3")
    c.add_argument("--d", type=int, default=None, help="ambient dimension for Morse data")
    c.add_argument("--target", choices=["chain", "planar", "spatial"], default="chain")
    c.add_argument("--format", choices=["text", "json", "tsv"], default="text")
    c.set_defaults(func=_cmd_classify)

    e = sub.add_parser("enumerate", help="enumerate all chambers for m edges")
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--format", choices=["text", "json", "tsv"], default="text")
    e.add_argument("--unsafe-large-m", action="store_true")
    e.set_defaults(func=_cmd_enumerate)

    t = sub.add_parser("table", help="print the classification table for m edges")
    t.add_argument("--m", type=int, required=True)
    t.add_argument("--format", choices=["text", "json", "tsv"], default="text")
    t.add_argument("--golden", default=None, help="directory of golden tables to compare against")
    t.set_defaults(func=_cmd_table)

    v = sub.add_parser("verify", help="run the internal consistency suites")
    v.add_argument("--m", type=int, default=6, help="largest m to verify (default 6)")
    v.set_defaults(func=_cmd_verify)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
