"""Command-line interface.

Subcommands: ``score`` (transport-entropy scores), ``eval`` (detection
metrics from scores or end-to-end), ``baseline`` (knn / mahalanobis
scores), ``synth`` (synthetic fixtures), ``oracle`` (brute-force
cross-check on tiny instances). Exit codes: 0 success, 2 format or
configuration error, 3 numerical-stability error, 4 metric undefined.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .baselines import knn_scores, mahalanobis_fit, mahalanobis_scores
from .exceptions import ConfigurationError, OtoodError
from .io import (
    _write_score_rows,
    read_features,
    read_labels,
    read_scores,
    write_features,
    write_labels,
    write_scores,
)
from .metrics import LabeledScores, MetricsReport, compute_metrics
from .oracle import MAX_ORACLE_CELLS, brute_force_plan
from .pipeline import RunConfig, run_pipeline
from .synthetic import gen_synthetic
from .transport import SinkhornConfig, cosine_cost_matrix, objective_value, sinkhorn, uniform_measure


def _solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lambda", dest="lam", type=float, default=0.1,
                        help="entropic regularization coefficient (default 0.1)")
    parser.add_argument("--tol", type=float, default=1e-6,
                        help="L1 marginal tolerance (default 1e-6)")
    parser.add_argument("--max-iter", type=int, default=10_000,
                        help="scaling iteration budget (default 10000)")
    parser.add_argument("--log-domain", choices=("auto", "on", "off"), default="auto",
                        help="log-sum-exp evaluation mode (default auto)")
    parser.add_argument("--no-normalize", action="store_true",
                        help="require unit-norm inputs instead of normalizing them")


def _log_domain(value: str) -> bool | None:
    return {"auto": None, "on": True, "off": False}[value]


def _metrics_table(report: MetricsReport) -> str:
    lines = [
        f"{'metric':<20}{'value':>12}",
        f"{'auroc':<20}{report.auroc:>12.6f}",
        f"{'aupr':<20}{report.aupr:>12.6f}",
        f"{'fpr95':<20}{report.fpr95:>12.6f}",
        f"{'threshold@tpr95':<20}{report.threshold_at_tpr95:>12.6f}",
        f"{'n_id':<20}{report.n_id:>12d}",
        f"{'n_ood':<20}{report.n_ood:>12d}",
    ]
    if report.nonconverged_batches:
        lines.append(f"non-converged batches: {list(report.nonconverged_batches)}")
    return "\n".join(lines)


def _write_metrics_csv(path, report: MetricsReport) -> None:
    with open(path, "w") as fh:
        fh.write("fpr95,auroc,aupr,n_id,n_ood,threshold_at_tpr95\n")
        fh.write(
            f"{report.fpr95:.6f},{report.auroc:.6f},{report.aupr:.6f},"
            f"{report.n_id},{report.n_ood},{report.threshold_at_tpr95:.6f}\n"
        )


def _cmd_score(args) -> int:
    cfg = RunConfig(
        lam=args.lam,
        tol=args.tol,
        max_iter=args.max_iter,
        batch_size=args.batch_size,
        normalize=not args.no_normalize,
        seed=args.shuffle,
        log_domain=_log_domain(args.log_domain),
    )
    batch = run_pipeline(cfg, args.train, args.test)
    if args.out:
        write_scores(args.out, batch)
        state = "all batches converged" if batch.converged else "WARNING: non-converged batches"
        print(f"wrote {batch.scores.size} scores to {args.out} ({state})")
    else:
        _write_score_rows(sys.stdout, batch.scores, batch.row_converged)
    return 0


def _cmd_eval(args) -> int:
    if args.scores and (args.train or args.test):
        raise ConfigurationError("pass either --scores or --train/--test, not both")
    if args.scores:
        scores, _ = read_scores(args.scores)
        labels = read_labels(args.labels)
        if labels.shape[0] != scores.shape[0]:
            raise ConfigurationError(
                f"{args.labels} has {labels.shape[0]} labels for {scores.shape[0]} scores"
            )
        report = compute_metrics(
            LabeledScores(scores, labels), tpr_target=args.tpr_target, tpr_on=args.tpr_on
        )
    elif args.train and args.test:
        cfg = RunConfig(
            lam=args.lam,
            tol=args.tol,
            max_iter=args.max_iter,
            batch_size=args.batch_size,
            normalize=not args.no_normalize,
            seed=args.shuffle,
            log_domain=_log_domain(args.log_domain),
            tpr_target=args.tpr_target,
            tpr_on=args.tpr_on,
        )
        report = run_pipeline(cfg, args.train, args.test, args.labels)
    else:
        raise ConfigurationError("eval needs --scores, or --train and --test")
    print(_metrics_table(report))
    if args.out:
        _write_metrics_csv(args.out, report)
        print(f"wrote metrics row to {args.out}")
    return 0


def _cmd_baseline(args) -> int:
    normalize = not args.no_normalize
    train = read_features(args.train, normalize=normalize)
    test = read_features(args.test, normalize=normalize)
    if args.method == "knn":
        scores = knn_scores(train, test, args.k)
    else:
        fit = mahalanobis_fit(train, args.shrinkage)
        scores = mahalanobis_scores(fit, test)
    flags = np.ones(scores.shape[0], dtype=bool)
    if args.out:
        _write_score_rows(args.out, scores, flags)
        print(f"wrote {scores.size} {args.method} scores to {args.out}")
    else:
        _write_score_rows(sys.stdout, scores, flags)
    return 0


def _cmd_synth(args) -> int:
    train, test, labels = gen_synthetic(
        args.n_train, args.n_id, args.n_ood, args.dim, args.separation, args.seed
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_path = out_dir / "train.feat"
    test_path = out_dir / "test.feat"
    labels_path = out_dir / "labels.csv"
    write_features(train_path, train)
    write_features(test_path, test)
    write_labels(labels_path, labels)
    print(f"wrote {train_path} ({train.shape[0]}x{train.shape[1]})")
    print(f"wrote {test_path} ({test.shape[0]}x{test.shape[1]})")
    print(f"wrote {labels_path} ({labels.size} labels, {int(labels.sum())} OOD)")
    return 0


def _cmd_oracle(args) -> int:
    normalize = not args.no_normalize
    train = read_features(args.train, normalize=normalize)
    test = read_features(args.test, normalize=normalize)
    cells = train.shape[0] * test.shape[0]
    if cells > MAX_ORACLE_CELLS:
        raise ConfigurationError(
            f"oracle instances are capped at {MAX_ORACLE_CELLS} plan cells, got {cells}"
        )
    mu = uniform_measure(train)
    nu = uniform_measure(test)
    cost = cosine_cost_matrix(train, test)
    reference = brute_force_plan(mu, nu, cost, args.lam)
    cfg = SinkhornConfig(lam=args.lam, tol=args.tol, max_iter=args.max_iter,
                         log_domain=_log_domain(args.log_domain))
    plan = sinkhorn(mu, nu, cost, cfg)
    gap = float(np.abs(plan.data - reference).max())
    print(f"plan shape: {plan.data.shape[0]}x{plan.data.shape[1]}")
    print(f"scaling objective:     {objective_value(plan, cost, args.lam):.12f}")
    print(f"brute-force objective: {objective_value(reference, cost, args.lam):.12f}")
    print(f"max entrywise difference: {gap:.3e}")
    print(f"scaling converged: {plan.converged} "
          f"(iterations={plan.iterations}, violation={plan.marginal_violation:.3e})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otood",
        description="Out-of-distribution scoring via entropic optimal transport",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score test features against training features")
    p_score.add_argument("--train", required=True, help="training feature file")
    p_score.add_argument("--test", required=True, help="test feature file")
    p_score.add_argument("--batch-size", type=int, default=None,
                         help="test rows per transport problem (default: all at once)")
    p_score.add_argument("--shuffle", type=int, default=None, metavar="SEED",
                         help="shuffle test order before batching (output stays in input order)")
    p_score.add_argument("--out", help="score CSV path (default: stdout)")
    _solver_flags(p_score)
    p_score.set_defaults(func=_cmd_score)

    p_eval = sub.add_parser("eval", help="detection metrics from scores or end-to-end")
    p_eval.add_argument("--scores", help="precomputed score CSV")
    p_eval.add_argument("--train", help="training feature file (end-to-end mode)")
    p_eval.add_argument("--test", help="test feature file (end-to-end mode)")
    p_eval.add_argument("--labels", required=True, help="label file, one 0|1 per line (1 = OOD)")
    p_eval.add_argument("--batch-size", type=int, default=None)
    p_eval.add_argument("--shuffle", type=int, default=None, metavar="SEED")
    p_eval.add_argument("--tpr-target", type=float, default=0.95)
    p_eval.add_argument("--tpr-on", choices=("ood", "id"), default="ood",
                        help="class whose recall is pinned for the FPR metric (default ood)")
    p_eval.add_argument("--out", help="metrics CSV path")
    _solver_flags(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_base = sub.add_parser("baseline", help="distance-baseline scores")
    p_base.add_argument("--method", choices=("knn", "mahalanobis"), required=True)
    p_base.add_argument("--train", required=True)
    p_base.add_argument("--test", required=True)
    p_base.add_argument("--k", type=int, default=50, help="neighbor rank for knn (default 50)")
    p_base.add_argument("--shrinkage", type=float, default=1e-3,
                        help="covariance shrinkage for mahalanobis (default 1e-3)")
    p_base.add_argument("--no-normalize", action="store_true")
    p_base.add_argument("--out", help="score CSV path (default: stdout)")
    p_base.set_defaults(func=_cmd_baseline)

    p_synth = sub.add_parser("synth", help="generate a synthetic fixture")
    p_synth.add_argument("--n-train", type=int, required=True)
    p_synth.add_argument("--n-id", type=int, required=True)
    p_synth.add_argument("--n-ood", type=int, required=True)
    p_synth.add_argument("--dim", type=int, default=32)
    p_synth.add_argument("--separation", type=float, default=1.5,
                         help="cosine distance between ID pole and OOD center (default 1.5)")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out-dir", default=".",
                         help="directory for train.feat / test.feat / labels.csv")
    p_synth.set_defaults(func=_cmd_synth)

    p_oracle = sub.add_parser("oracle", help="cross-check the solver on a tiny instance")
    p_oracle.add_argument("--train", required=True)
    p_oracle.add_argument("--test", required=True)
    _solver_flags(p_oracle)
    p_oracle.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OtoodError as exc:
        print(f"otood: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"otood: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
