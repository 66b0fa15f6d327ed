"""Command line entry point: ``okv run``, ``okv selftest`` and ``okv diff``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigError
from .runner import diff_runs, load_config, run_config
from .selftest import run_selftest

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_CAP = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="okv", description="Exact lattice-point and valuation experiments.")
    ap.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the experiments of a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--jobs", type=int, default=1)
    st = sub.add_parser("selftest", help="seeded randomized identity checks")
    st.add_argument("--seed", type=int, required=True)
    st.add_argument("--instances", type=int, default=500)
    df = sub.add_parser("diff", help="compare the CSV artifacts of two runs")
    df.add_argument("a")
    df.add_argument("b")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        if args.jobs < 1:
            print("error: --jobs must be positive", file=sys.stderr)
            return EXIT_CONFIG
        try:
            cfg = load_config(args.config)
        except ConfigError as e:
            print(f"config error: {e}", file=sys.stderr)
            return EXIT_CONFIG
        code = run_config(cfg, args.out, args.jobs)
        print(f"wrote {args.out} (exit {code})")
        return code
    if args.command == "selftest":
        results = run_selftest(args.seed, args.instances)
        for r in results:
            status = "PASS" if r["failures"] == 0 else "FAIL"
            print(f"{status} {r['check']}: {r['instances']} instances, {r['failures']} failures")
        return EXIT_OK if all(r["failures"] == 0 for r in results) else EXIT_INVARIANT
    report = diff_runs(args.a, args.b)
    print(json.dumps(report, indent=2, sort_keys=True))
    if report["schema_mismatch"]:
        return EXIT_CONFIG
    return EXIT_INVARIANT if report["FAIL"] else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
