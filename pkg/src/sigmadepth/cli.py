"""Command-line surface: depth, classify, simulate, symmetry.

Exit codes: 0 success, 2 malformed input or bad flags, 3 violated
preconditions (e.g. too few points for the requested estimator), 4
resource cap exceeded.  Every subcommand echoes its fully resolved
configuration: to `<out>.config.json` when --out is given, to stderr
otherwise, so any output can be reproduced from the echo alone.

The --threads flag is accepted for interface stability and recorded in
the echo, but evaluation is sequential; results never depend on it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .classify import (
    fit_dd,
    max_depth_classify_batch,
    outsider_mask,
    predict_dd_points,
)
from .depth import DepthConfig, DepthEvaluator
from .errors import InputError, InsufficientDataError, ResourceCapError
from .geometry import DEFAULT_EPS, GeomTolerance
from .sigma import DiscreteDistribution
from .sim import default_config, full_scale_config, run_scenario
from .symmetry import (
    check_angular_symmetry,
    check_central_symmetry,
    check_halfspace_symmetry,
)

METHOD_FLAGS = {
    "simplicial": "simplicial",
    "simplex-enlarged": "simplex_enlarged",
    "dist-enlarged-blocks": "dist_enlarged_blocks",
    "dist-enlarged-full": "dist_enlarged_full",
}


def read_points_csv(path: str) -> np.ndarray:
    """Numeric CSV -> (n, d) array; a non-numeric first row is a header."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise InputError(f"{path} is empty")
    start = 0
    try:
        [float(v) for v in rows[0]]
    except ValueError:
        start = 1
    if start == len(rows):
        raise InputError(f"{path} has a header but no data rows")
    width = len(rows[start])
    out = np.empty((len(rows) - start, width))
    for i, row in enumerate(rows[start:]):
        if len(row) != width:
            raise InputError(f"{path}: row {start + i + 1} has {len(row)} fields, expected {width}")
        try:
            out[i] = [float(v) for v in row]
        except ValueError as exc:
            raise InputError(f"{path}: non-numeric value in row {start + i + 1}") from exc
    return out


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError as exc:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from exc


def _write_text(path: str | None, content: str) -> None:
    if path is None:
        sys.stdout.write(content)
    else:
        Path(path).write_text(content)


def _echo_config(out: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=1, default=str)
    if out is None:
        print(text, file=sys.stderr)
    else:
        Path(f"{out}.config.json").write_text(text)


def _depth_config(args) -> DepthConfig:
    if args.method not in METHOD_FLAGS:
        raise InputError(f"unknown method {args.method!r}")
    return DepthConfig(
        method=METHOD_FLAGS[args.method],
        sigma=args.sigma,
        budget=args.approx,
        seed=args.seed,
        tol=GeomTolerance(eps=args.tol),
    )


def _cmd_depth(args) -> int:
    data = read_points_csv(args.data)
    queries = read_points_csv(args.query)
    cfg = _depth_config(args)
    ev = DepthEvaluator(data, cfg)
    vals = ev.depths(queries)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{j}" for j in range(queries.shape[1])] + ["depth", "exact"])
    for q, v in zip(queries, vals):
        w.writerow([repr(float(c)) for c in q] + [repr(float(v)), int(ev.exact)])
    _write_text(args.out, buf.getvalue())
    _echo_config(
        args.out,
        {
            "subcommand": "depth",
            "data": args.data,
            "query": args.query,
            "method": args.method,
            "sigma": args.sigma,
            "approx": args.approx,
            "seed": args.seed,
            "tol": args.tol,
            "threads": args.threads,
            "out": args.out,
        },
    )
    return 0


def _cmd_classify(args) -> int:
    train1 = read_points_csv(args.train1)
    train2 = read_points_csv(args.train2)
    test = read_points_csv(args.test)
    cfg = _depth_config(args)
    ev1 = DepthEvaluator(train1, cfg)
    ev2 = DepthEvaluator(train2, cfg)
    if args.classifier == "maxdepth":
        pred = max_depth_classify_batch(ev1, ev2, test, tie_seed=args.seed)
    else:
        both = np.vstack([train1, train2])
        labels = np.r_[
            np.ones(len(train1), dtype=np.int64),
            np.full(len(train2), 2, dtype=np.int64),
        ]
        degree = 1 if args.classifier == "dd-linear" else args.degree
        model = fit_dd(
            ev1.depths(both),
            ev2.depths(both),
            labels,
            degree=degree,
            restarts=args.restarts,
            seed=args.seed,
            depth_cfg=cfg,
            tie_seed=args.seed,
        )
        pred = predict_dd_points(model, ev1.depths(test), ev2.depths(test), test)
    outs = outsider_mask(train1, train2, test, GeomTolerance(eps=args.tol))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{j}" for j in range(test.shape[1])] + ["predicted_class", "outsider"])
    for q, p, o in zip(test, pred, outs):
        w.writerow([repr(float(c)) for c in q] + [int(p), int(o)])
    _write_text(args.out, buf.getvalue())
    _echo_config(
        args.out,
        {
            "subcommand": "classify",
            "train1": args.train1,
            "train2": args.train2,
            "test": args.test,
            "classifier": args.classifier,
            "degree": args.degree,
            "restarts": args.restarts,
            "method": args.method,
            "sigma": args.sigma,
            "approx": args.approx,
            "seed": args.seed,
            "tol": args.tol,
            "threads": args.threads,
            "out": args.out,
        },
    )
    return 0


def _cmd_simulate(args) -> int:
    make = full_scale_config if args.full_scale else default_config
    overrides = {"master_seed": args.seed}
    if args.setting is not None:
        overrides["setting"] = args.setting
    if args.band is not None:
        overrides["setting"] = args.band
    if args.n is not None:
        overrides["n_train"] = args.n
    if args.n_test is not None:
        overrides["n_test"] = args.n_test
    if args.reps is not None:
        overrides["reps"] = args.reps
    if args.sigma_grid is not None:
        overrides["sigma_grid"] = _floats(args.sigma_grid)
    if args.delta is not None:
        overrides["delta_grid"] = _floats(args.delta)
    if args.classifier is not None:
        overrides["classifier"] = args.classifier
    if args.degree is not None:
        overrides["degree"] = args.degree
    if args.budget is not None:
        overrides["budget"] = None if args.budget <= 0 else args.budget
    try:
        cfg = make(args.scenario, **overrides)
    except KeyError as exc:
        raise InputError("scenario must be 1, 2, 3 or 4") from exc
    table = run_scenario(cfg)
    prefix = args.out if args.out is not None else f"sim{args.scenario}"
    Path(f"{prefix}.csv").write_text(table.to_csv())
    Path(f"{prefix}.json").write_text(table.to_json())
    _echo_config(prefix, {"subcommand": "simulate", "threads": args.threads, **cfg.to_dict()})
    return 0


def _cmd_symmetry(args) -> int:
    try:
        obj = json.loads(Path(args.dist).read_text())
        dist = DiscreteDistribution(
            np.asarray(obj["support"], dtype=float),
            np.asarray(obj["weights"], dtype=float),
        )
    except OSError as exc:
        raise InputError(f"cannot read {args.dist}: {exc}") from exc
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"malformed distribution JSON: {exc}") from exc
    if args.center is not None:
        center = np.array(_floats(args.center))
    elif "center" in obj:
        center = np.asarray(obj["center"], dtype=float)
    else:
        raise InputError("no --center given and the JSON has no 'center' field")
    checker = {
        "central": check_central_symmetry,
        "angular": check_angular_symmetry,
        "halfspace": check_halfspace_symmetry,
    }[args.kind]
    verdict = checker(dist, center)
    payload = {
        "kind": args.kind,
        "symmetric": verdict.symmetric,
        "center": None if verdict.center is None else [float(v) for v in verdict.center],
        "witness": None if verdict.witness is None else [float(v) for v in verdict.witness],
    }
    _write_text(args.out, json.dumps(payload, indent=1) + "\n")
    _echo_config(
        args.out,
        {
            "subcommand": "symmetry",
            "dist": args.dist,
            "kind": args.kind,
            "center": [float(v) for v in center],
            "tol": args.tol,
            "seed": args.seed,
            "threads": args.threads,
            "out": args.out,
        },
    )
    return 0


def _add_shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--threads", type=int, default=1, help="worker cap (recorded; evaluation is sequential)")
    p.add_argument("--tol", type=float, default=DEFAULT_EPS, help="geometric tolerance eps")
    p.add_argument("--out", default=None, help="output path (depth/classify/symmetry) or prefix (simulate)")


def _add_depth_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", default="simplicial", choices=sorted(METHOD_FLAGS))
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--approx", type=int, default=None, metavar="M", help="Monte-Carlo budget; omit for exact")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigmadepth",
        description="Simplicial depth with simplex- and distribution-enlargement.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("depth", help="depth of query points w.r.t. a data CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--query", required=True)
    _add_depth_flags(p)
    _add_shared(p)
    p.set_defaults(func=_cmd_depth)

    p = sub.add_parser("classify", help="two-class depth classification")
    p.add_argument("--train1", required=True)
    p.add_argument("--train2", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--classifier", default="maxdepth", choices=("maxdepth", "dd-linear", "dd-poly"))
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--restarts", type=int, default=8)
    _add_depth_flags(p)
    _add_shared(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("simulate", help="run one of the four experiments")
    p.add_argument("--scenario", type=int, required=True)
    p.add_argument("--setting", default=None)
    p.add_argument("--band", default=None, choices=("symmetric", "asymmetric"))
    p.add_argument("--n", type=int, default=None, help="training size per class")
    p.add_argument("--n-test", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--sigma-grid", default=None, help="comma separated, e.g. 1,1.5,2")
    p.add_argument("--delta", default=None, help="comma separated band/shift values")
    p.add_argument("--classifier", default=None, choices=("maxdepth", "dd-linear", "dd-poly"))
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--budget", type=int, default=None, help="depth MC budget; <=0 means exact")
    p.add_argument(
        "--full-scale", action="store_true", help="publication-size runs (slow)"
    )
    _add_shared(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("symmetry", help="check a discrete distribution's symmetry")
    p.add_argument("--dist", required=True, help="JSON with support/weights (optional center)")
    p.add_argument("--center", default=None, help="comma separated coordinates")
    p.add_argument("--kind", required=True, choices=("central", "angular", "halfspace"))
    _add_shared(p)
    p.set_defaults(func=_cmd_symmetry)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
