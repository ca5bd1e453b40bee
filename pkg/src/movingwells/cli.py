"""Command line: ``movingwells <verb> CONFIG --out DIR``.

Exit status 0 on success. On failure a single line
``error: {"type": ..., "message": ...}`` goes to stderr and the status is 2
for usage problems, 1 otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import load_config
from .errors import MovingWellsError, UsageError
from .experiments import run_experiment

VERBS = {
    "gamma": "gamma-sweep",
    "gamma-mass": "gamma-sweep-mass",
    "geodesic": "geodesic-bench",
    "annular": "annular-study",
    "audit": "audit",
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="movingwells",
                                description="Phase-field experiments with moving wells.")
    sub = p.add_subparsers(dest="verb", required=True)
    for verb, kind in VERBS.items():
        s = sub.add_parser(verb, help=f"run a {kind} config")
        s.add_argument("config", help="YAML experiment config")
        s.add_argument("--out", required=True, help="output directory")
        s.add_argument("--no-figures", action="store_true", help="skip PNG figures")
        s.add_argument("--dump-fields", action="store_true",
                       help="write final fields as binary dumps (Γ-sweeps)")
    return p


def _fail(exc: BaseException, status: int) -> int:
    line = json.dumps({"type": type(exc).__name__, "message": str(exc)})
    print(f"error: {line}", file=sys.stderr)
    return status


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        spec = load_config(args.config)
        if spec.kind != VERBS[args.verb]:
            raise UsageError(
                f"verb '{args.verb}' expects kind '{VERBS[args.verb]}', config has '{spec.kind}'")
        result = run_experiment(spec, args.out, dump_fields=args.dump_fields or None)
        if not args.no_figures:
            from .plotting import render
            render(result, args.out)
    except FileNotFoundError as exc:
        return _fail(exc, 2)
    except (MovingWellsError, KeyError, TypeError, ValueError) as exc:
        usage = isinstance(exc, UsageError) or not isinstance(exc, MovingWellsError)
        return _fail(exc, 2 if usage else 1)
    print(f"{spec.kind}: {len(result.rows)} rows -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
