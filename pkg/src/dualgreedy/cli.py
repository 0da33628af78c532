"""Command line driver.

Subcommands: sample, run, verify, reconstruct, table.
Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 oracle-verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .experiment import ExperimentConfig, run_experiment, write_pgm, write_png
from .kernels import Kernel
from .newton import NearDependenceError, NewtonModel
from .pairings import PairingEngine
from .phantom import sample_functionals, shepp_logan
from .quadrature import AccuracyError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


class _ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ConfigError(message)


def build_parser():
    parser = _Parser(prog="dualgreedy",
                     description="Greedy kernel interpolation of line and "
                                 "point samples")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="draw a candidate set CSV")
    p_sample.add_argument("--n", type=int, default=2000)
    p_sample.add_argument("--seed", type=int, default=42)
    p_sample.add_argument("--modified-phantom", action="store_true")
    p_sample.add_argument("--positive-radii-only", action="store_true")
    p_sample.add_argument("--out", required=True)

    p_run = sub.add_parser("run", help="run the selection experiment")
    p_run.add_argument("--config", help="JSON config file")
    p_run.add_argument("--n", type=int)
    p_run.add_argument("--m", type=int)
    p_run.add_argument("--grid", type=int)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--alpha", type=float)
    p_run.add_argument("--beta-weight", type=float, dest="weight_beta")
    p_run.add_argument("--methods", help="comma-separated method list")
    p_run.add_argument("--modified-phantom", action="store_true",
                       default=None)
    p_run.add_argument("--positive-radii-only", action="store_true",
                       default=None)
    p_run.add_argument("--png", action="store_true", default=None)
    p_run.add_argument("--timing", action="store_true", default=None)
    p_run.add_argument("--parallel-methods", action="store_true",
                       default=None)
    p_run.add_argument("--out")

    p_verify = sub.add_parser("verify",
                              help="closed forms against the quadrature "
                                   "oracle")
    p_verify.add_argument("--pairs", type=int, default=25,
                          help="random pairings per combination")
    p_verify.add_argument("--lines", type=int, default=25,
                          help="random sinogram lines")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--tol", type=float, default=1e-8)

    p_rec = sub.add_parser("reconstruct", help="replay a model snapshot")
    p_rec.add_argument("--model", required=True)
    p_rec.add_argument("--grid", type=int, default=64)
    p_rec.add_argument("--out", required=True)
    p_rec.add_argument("--png", action="store_true")

    p_table = sub.add_parser("table", help="aggregate summary.json files")
    p_table.add_argument("inputs", nargs="+",
                         help="summary.json files or method directories")
    p_table.add_argument("--out", help="CSV target (default: stdout)")
    return parser


def cmd_sample(args):
    phantom = shepp_logan(args.modified_phantom)
    samples = sample_functionals(args.n, args.seed, phantom,
                                 args.positive_radii_only)
    samples.to_csv(args.out)
    print("wrote %d line samples to %s" % (len(samples), args.out))
    return EXIT_OK


def cmd_run(args):
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig()
    overrides = {}
    for key in ("n", "m", "grid", "seed", "alpha", "weight_beta", "out",
                "png", "timing"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    if args.methods is not None:
        overrides["methods"] = tuple(
            s.strip() for s in args.methods.split(",") if s.strip())
    if args.modified_phantom is not None:
        overrides["modified_phantom"] = args.modified_phantom
    if args.positive_radii_only is not None:
        overrides["positive_radii_only"] = args.positive_radii_only
    if args.parallel_methods is not None:
        overrides["parallel_methods"] = args.parallel_methods
    if overrides:
        doc = config.to_dict()
        doc.update(overrides)
        config = ExperimentConfig.from_dict(doc)
    table = run_experiment(config)
    for name in config.methods:
        if name in table.failed:
            print("%-10s FAILED: %s" % (name, table.failed[name]),
                  file=sys.stderr)
            continue
        row = table.rows[name]
        print("%-10s msr=%.6e msi=%.6e cond2=%s selected=%d"
              % (row.method, row.msr, row.msi,
                 ("inf" if math.isinf(row.cond2) else "%.6e" % row.cond2),
                 row.n_selected))
    print("artifacts in %s" % config.out)
    return EXIT_NUMERICAL if table.failed else EXIT_OK


def cmd_verify(args):
    from .verification import verify_pairings, verify_sinogram
    failures = []
    report = verify_pairings(pairs=args.pairs, seed=args.seed, tol=args.tol)
    for line in report.lines:
        print(line)
    failures.extend(report.failures)
    report = verify_sinogram(lines=args.lines, seed=args.seed, tol=args.tol)
    for line in report.lines:
        print(line)
    failures.extend(report.failures)
    if failures:
        print("verification FAILED (%d checks)" % len(failures))
        return EXIT_VERIFY
    print("verification passed")
    return EXIT_OK


def cmd_reconstruct(args):
    from .experiment import reconstruction_grid
    with open(args.model) as fh:
        doc = json.load(fh)
    grid_pts = reconstruction_grid(args.grid)
    if doc.get("type") == "direct":
        from .newton import _functional_from_key
        engine = PairingEngine(Kernel.from_config(doc["kernel"]),
                               mode=doc.get("mode", "analytic"))
        functionals = [_functional_from_key(k) for k in doc["functionals"]]
        coeffs = np.asarray(doc["coefficients"], dtype=float)
        image = engine.combination_eval(functionals, coeffs, grid_pts)
    else:
        model = NewtonModel.load(args.model)
        image = model.evaluate(grid_pts)
    write_pgm(image, args.out)
    if args.png:
        base, _ = os.path.splitext(args.out)
        write_png(image, base + ".png")
    print("wrote %s" % args.out)
    return EXIT_OK


def cmd_table(args):
    paths = []
    for item in args.inputs:
        if os.path.isdir(item):
            found = sorted(
                os.path.join(root, "summary.json")
                for root, _, files in os.walk(item)
                if "summary.json" in files)
            if not found:
                raise _ConfigError("no summary.json under %s" % item)
            paths.extend(found)
        else:
            paths.append(item)
    rows = []
    for path in paths:
        with open(path) as fh:
            doc = json.load(fh)
        if "error" in doc:
            print("skipping %s (method %s failed: %s)"
                  % (path, doc.get("method"), doc["error"]), file=sys.stderr)
            continue
        rows.append(doc)
    cols = ["method", "msr", "msi", "cond2", "n_selected", "runtime_s"]
    lines = [",".join(cols)]
    for row in rows:
        cond = row.get("cond2")
        lines.append(",".join([
            str(row.get("method")), repr(row.get("msr")),
            repr(row.get("msi")),
            "inf" if row.get("cond2_sentinel") else repr(cond),
            str(row.get("n_selected")), repr(row.get("runtime_s"))]))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print("wrote %s" % args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ConfigError as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    handlers = {
        "sample": cmd_sample,
        "run": cmd_run,
        "verify": cmd_verify,
        "reconstruct": cmd_reconstruct,
        "table": cmd_table,
    }
    try:
        return handlers[args.command](args)
    except (_ConfigError, ValueError, TypeError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (NearDependenceError, AccuracyError,
            np.linalg.LinAlgError) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
