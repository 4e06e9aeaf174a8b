"""``verify`` command line entry point.

Exit status: 0 when every case passes, 1 when any case fails, 2 on a bad
configuration or a runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from typing import List, Optional

from .means import Alpha
from .suites import SUITES, ConfigError, SuiteConfig, VerificationReport, run_suite

log = logging.getLogger("alphaconcave.verify")

CSV_FIELDS = ["id", "kind", "ratio", "bound", "tol", "slack", "pass", "tail_estimate", "ms"]


def _alpha(text: str) -> float:
    try:
        return Alpha.parse(text).value
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="verify", description="Run one verification suite for difference-function and convex-body volume inequalities.")
    p.add_argument("suite", choices=sorted(SUITES), help="suite to run")
    p.add_argument("--dim", type=int, help="dimension (default: the suite's own set)")
    p.add_argument("--nodes", type=int, help="grid nodes per axis (>= 33)")
    p.add_argument("--halfwidth", type=float, help="box half-width")
    p.add_argument("--alpha", type=_alpha, help="order alpha: a number <= 0, a fraction like -1/2, or -inf")
    p.add_argument("--seed", type=int, default=0, help="first generator seed (default 0)")
    p.add_argument("--count", type=int, help="number of random instances")
    p.add_argument("--tol", type=float, help="relative tolerance in (0, 0.2]")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--dump-dir", help="write every generated instance as a text table into this directory")
    p.add_argument("-v", "--verbose", action="store_true", help="log one line per case to stderr")
    return p


def render(report: VerificationReport, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for c in report.cases:
        w.writerow(c.to_dict())
    return buf.getvalue()


def _glue_alpha(argv: List[str]) -> List[str]:
    # argparse reads "-1/2" and "-inf" as option names; bind them to --alpha
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--alpha" and i + 1 < len(argv):
            out.append("--alpha=" + argv[i + 1])
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_alpha(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = SuiteConfig(
            suite=args.suite,
            dim=args.dim,
            nodes=args.nodes,
            halfwidth=args.halfwidth,
            alpha=args.alpha,
            seed=args.seed,
            tol=args.tol,
            count=args.count,
            dump_dir=args.dump_dir,
        )
        report = run_suite(cfg)
    except ConfigError as exc:
        print(f"verify: configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # reported, never swallowed silently
        print(f"verify: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    for c in report.cases:
        log.info("%s %s ratio=%.6g bound=%.6g slack=%.3g", "PASS" if c.passed else "FAIL", c.id, c.ratio, c.bound, c.slack)
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
