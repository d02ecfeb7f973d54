"""Command-line front end: evaluate a spec file into an AUC table CSV."""

import argparse
import sys

from .harness import EvalSpec, HarnessError, evaluate, write_auc_table


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sacharness",
        description="Fit and score classifiers over exported feature "
                    "matrices; write a mean-AUC table.")
    ap.add_argument("--spec", required=True,
                    help="JSON evaluation spec (cells, classifiers, cv_folds, "
                         "seed); matrix paths resolve relative to the file")
    ap.add_argument("--out", required=True, help="AUC table CSV")
    ap.add_argument("--threads", type=int, default=1,
                    help="worker threads over configuration cells")
    return ap


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    if ns.threads < 1:
        build_parser().error("--threads must be >= 1")
    try:
        spec = EvalSpec.from_json(ns.spec)
        rows = evaluate(spec, threads=ns.threads)
        write_auc_table(rows, spec, ns.out)
    except (HarnessError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
