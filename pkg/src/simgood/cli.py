"""`simgood` command-line interface.

Subcommands: gen, train, goodness, bound, lipschitz-check, experiment.
stdout carries machine-readable payloads only (JSON, or a JSON summary when
the main artifact goes to --out); diagnostics go to stderr. Exit codes:
0 success, 1 usage error, 2 numeric/solver error. Every source of
randomness takes a --seed; outputs are byte-identical across reruns with
the same flags (pass --no-timestamp to drop the one varying field).
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone

import numpy as np

from .data import gen_circles, gen_two_gaussians, load_csv, save_csv
from .embedding import draw_landmarks, embed, load_landmarks, save_landmarks
from .errors import NumericError, UsageError
from .experiment import ExperimentConfig, run_experiment, summarize, write_trials_csv
from .goodness import estimate_goodness
from .robustness import build_cover, empirical_gap, generalization_bound
from .similarity import lipschitz_audit, lipschitz_constant, load_similarity, validate_range
from .solver import empirical_risk, load_model, save_model, train_lp, train_subgradient


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; our convention reserves 2 for numeric errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(payload: dict, args) -> None:
    if not args.no_timestamp:
        payload = {**payload, "timestamp": datetime.now(timezone.utc).isoformat()}
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _load_mask(path, n):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    start = 0
    if lines and not lines[0].lstrip("-").replace(".", "", 1).isdigit():
        start = 1
    vals = []
    for lineno, ln in enumerate(lines[start:], start=start + 1):
        try:
            v = int(float(ln))
        except ValueError as exc:
            raise UsageError(f"{path}: line {lineno}: {exc}") from exc
        if v not in (0, 1):
            raise UsageError(f"{path}: line {lineno}: mask entries must be 0 or 1, got {ln}")
        vals.append(v)
    if len(vals) != n:
        raise UsageError(f"{path}: mask has {len(vals)} entries but the data has {n} rows")
    return np.array(vals, dtype=bool)


def _cmd_gen(args) -> dict:
    if args.task == "two-gaussians":
        sample = gen_two_gaussians(args.n, args.d, args.separation, args.seed)
    else:
        sample = gen_circles(args.n, args.d, tuple(args.radii), args.noise, args.seed)
    save_csv(sample, args.out)
    payload = {"task": args.task, "n": sample.n, "d": sample.d, "out": args.out}
    if args.landmarks_out:
        lms = draw_landmarks(sample, args.d_u, args.seed + 1)
        save_landmarks(lms, args.landmarks_out)
        payload["landmarks_out"] = args.landmarks_out
        payload["d_u"] = lms.d_u
    return payload


def _cmd_train(args) -> dict:
    sample = load_csv(args.data)
    landmarks = load_landmarks(args.landmarks)
    sim = load_similarity(args.sim)
    embedded = embed(sample, landmarks, sim)
    rng_report = validate_range(sim, sample, landmarks)
    if rng_report.violated:
        print(
            f"warning: similarity range [{rng_report.min_value}, {rng_report.max_value}] "
            "violates [-1, 1]; loss bounds relying on it do not apply",
            file=sys.stderr,
        )
    if args.backend == "lp":
        model, report = train_lp(embedded, args.gamma)
    else:
        model, report = train_subgradient(
            embedded, args.gamma, steps=args.steps, rng_seed=args.seed, step_scale=args.step_scale
        )
    model.landmarks_ref = args.landmarks
    model.similarity_ref = sim
    save_model(model, args.out)
    return {
        "backend": report.backend,
        "objective": report.objective,
        "iterations": report.iterations,
        "duality_or_stationarity_gap": report.duality_or_stationarity_gap,
        "n_landmarks": landmarks.d_u,
        "model": args.out,
    }


def _cmd_goodness(args) -> dict:
    sample = load_csv(args.data)
    sim = load_similarity(args.sim)
    mask = _load_mask(args.mask, sample.n) if args.mask else None
    est = estimate_goodness(sample, mask, sim, args.gamma)
    return est.to_json()


def _cmd_bound(args) -> dict:
    model = load_model(args.model)
    if model.similarity_ref is None:
        raise UsageError(f"{args.model}: model carries no similarity descriptor")
    sample = load_csv(args.data)
    cover = build_cover(sample, args.grid_side)
    l = lipschitz_constant(model.similarity_ref)
    report = generalization_bound(l, cover.rho, model.gamma, cover.M, args.delta, sample.n)
    if args.test:
        if model.landmarks_ref is None:
            raise UsageError(f"{args.model}: model carries no landmark reference")
        landmarks = load_landmarks(model.landmarks_ref)
        train_e = embed(sample, landmarks, model.similarity_ref)
        test_e = embed(load_csv(args.test), landmarks, model.similarity_ref)
        report.empirical_gap = empirical_gap(model, train_e, test_e)
    return report.to_json()


def _cmd_lipschitz_check(args) -> dict:
    sim = load_similarity(args.sim)
    audit = lipschitz_audit(sim, args.triples, args.seed)
    return audit.to_json()


def _cmd_experiment(args) -> dict:
    with open(args.config, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: invalid JSON: {exc}") from exc
    cfg = ExperimentConfig.from_json(obj)
    results = run_experiment(cfg)
    write_trials_csv(results, args.out)
    return {**summarize(results), "out": args.out}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="simgood", description=__doc__)
    parser.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp field from JSON output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    p.add_argument("--task", choices=("two-gaussians", "circles"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--separation", type=float, default=3.0)
    p.add_argument("--radii", type=float, nargs=2, default=(0.3, 0.9))
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--landmarks-out", default=None,
                   help="also draw landmarks from the sample and write them here")
    p.add_argument("--d-u", type=int, default=20, help="landmark count for --landmarks-out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("train", help="fit an L1-constrained hinge separator")
    p.add_argument("--data", required=True)
    p.add_argument("--landmarks", required=True)
    p.add_argument("--sim", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--backend", choices=("lp", "sgd"), default="lp")
    p.add_argument("--steps", type=int, default=20_000, help="sgd backend only")
    p.add_argument("--step-scale", type=float, default=None,
                   help="sgd step size constant c in c/sqrt(t); default 1/gamma")
    p.add_argument("--seed", type=int, default=0, help="sgd start point seed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("goodness", help="estimate (epsilon, tau) goodness on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--sim", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--mask", default=None, help="0/1 reasonable-point mask, one entry per row")
    p.set_defaults(func=_cmd_goodness)

    p = sub.add_parser("bound", help="evaluate the deviation bound for a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="training data CSV (sets d_l and the cover)")
    p.add_argument("--grid-side", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--test", default=None, help="held-out CSV; adds the empirical gap")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("lipschitz-check", help="randomized audit of the analytic constant")
    p.add_argument("--sim", required=True)
    p.add_argument("--triples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_lipschitz_check)

    p = sub.add_parser("experiment", help="Monte-Carlo bound study from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="per-trial CSV path")
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload = args.func(args)
    except UsageError as exc:
        print(f"simgood: error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"simgood: error: missing file: {exc.filename}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"simgood: error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"simgood: numeric error: {exc}", file=sys.stderr)
        return 2
    _emit(payload, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
