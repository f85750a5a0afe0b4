"""Command-line interface.

Eight subcommands covering the full pipeline: graph generation, sampling,
contamination, estimation, sensitivity curves, replicated experiments and
the two prediction protocols. Single-shot results print JSON; sweeps write
CSV, and report commands also render PNG figures next to the CSV (disable
with ``--no-figures``).

Exit codes: 0 success, 1 domain error (stable ``NAME: detail`` on stderr),
2 usage error. ``--seed`` falls back to the ISING_ROBUST_SEED environment
variable, then 0.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .contamination import parse_scheme
from .errors import IsingRobustError, UsageError
from .estimator import (
    ROOT_POLICIES,
    EstimatorSettings,
    estimate_lambda_grid,
)
from .experiments import (
    load_experiment_spec,
    predict_leave_one_out,
    predict_train_test,
    run_experiment,
)
from .graphs import EnsembleSpec, load_edge_list, save_edge_list
from .model import (
    read_samples_csv,
    read_spins,
    write_samples_csv,
    write_spins,
)
from .robustness import ges_curve
from .sampler import INIT_MODES, GibbsSettings, gibbs_sample

_KIND_ALIASES = {
    "lattice1d": "path_lattice_1d",
    "path_lattice_1d": "path_lattice_1d",
    "lattice2d": "lattice_2d",
    "lattice_2d": "lattice_2d",
    "erdos-renyi": "erdos_renyi",
    "erdos_renyi": "erdos_renyi",
    "sbm": "sbm",
    "sk": "sherrington_kirkpatrick",
    "sherrington_kirkpatrick": "sherrington_kirkpatrick",
    "hopfield": "hopfield",
}


def _lambda_grid(text: str) -> list[float]:
    try:
        vals = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad lambda grid {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("lambda grid is empty")
    if any(v < 0 or not math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("lambda values must be finite and >= 0")
    return vals


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("ISING_ROBUST_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"ISING_ROBUST_SEED must be an integer, got {env!r}") from None


def _add_seed(p):
    p.add_argument("--seed", type=int, default=None,
                   help="random seed (default: $ISING_ROBUST_SEED or 0)")


def _add_estimator_flags(p):
    p.add_argument("--beta-min", type=float, default=0.0)
    p.add_argument("--beta-max", type=float, default=10.0)
    p.add_argument("--grid-points", type=int, default=512)
    p.add_argument("--root-tol", type=float, default=1e-10)
    p.add_argument("--step-tol", type=float, default=1e-8)
    p.add_argument("--root-policy", choices=ROOT_POLICIES, default="global_objective_min")


def _estimator_settings(args, lam: float = 0.0) -> EstimatorSettings:
    return EstimatorSettings(
        lam=lam,
        beta_min=args.beta_min,
        beta_max=args.beta_max,
        grid_points=args.grid_points,
        root_tol=args.root_tol,
        step_tol=args.step_tol,
        root_policy=args.root_policy,
    )


def _write_text(out, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ising-robust",
        description="Robust interaction-strength estimation for Ising models on known graphs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-graph", help="build a graph ensemble and save its edge list")
    p.add_argument("--kind", required=True, choices=sorted(_KIND_ALIASES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=None, help="edge probability (erdos-renyi)")
    p.add_argument("--sizes", type=_int_list, default=None, help="community sizes a,b,... (sbm)")
    p.add_argument("--p-within", type=float, default=None, help="within-community probability (sbm)")
    p.add_argument("--q-between", type=float, default=None, help="between-community probability (sbm)")
    p.add_argument("--m-attractors", type=int, default=None, help="number of stored patterns (hopfield)")
    _add_seed(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sample", help="Gibbs-sample spin configurations")
    p.add_argument("--graph", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--k", type=int, default=1, help="number of samples")
    p.add_argument("--burn-in", type=int, default=200)
    p.add_argument("--thin", type=int, default=5)
    p.add_argument("--init", choices=INIT_MODES, default="uniform_random")
    _add_seed(p)
    p.add_argument("--out", required=True,
                   help="spin file for --k 1, multi-sample CSV otherwise")

    p = sub.add_parser("contaminate", help="corrupt a spin file")
    p.add_argument("--sample", required=True)
    p.add_argument("--scheme", required=True, help="kind:fraction, e.g. pin_plus:0.2 or flip:0.1")
    _add_seed(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("estimate", help="estimate interaction strength from one sample")
    p.add_argument("--graph", required=True)
    p.add_argument("--sample", required=True)
    p.add_argument("--lambda", dest="lambdas", type=_lambda_grid, default=[0.0],
                   help="comma-separated grid, e.g. 0,0.5,1")
    _add_estimator_flags(p)
    p.add_argument("--out", default="-", help="output path or - for stdout (JSON array)")

    p = sub.add_parser("ges", help="gross error sensitivity across lambda")
    p.add_argument("--graph", required=True)
    p.add_argument("--sample", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--lambda", dest="lambdas", type=_lambda_grid, default=[0.0])
    p.add_argument("--budget", type=int, default=50, help="local-search restarts")
    _add_seed(p)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--no-figures", action="store_true")

    p = sub.add_parser("experiment", help="replicated estimation experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="CSV report path")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-figures", action="store_true")

    p = sub.add_parser("predict-loo", help="leave-one-node-out prediction accuracy")
    p.add_argument("--graph", required=True)
    p.add_argument("--sample", required=True)
    p.add_argument("--lambda", dest="lambdas", type=_lambda_grid, default=[0.0])
    _add_estimator_flags(p)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--no-figures", action="store_true")

    p = sub.add_parser("predict-split", help="train/test prediction accuracy")
    p.add_argument("--graph", required=True)
    p.add_argument("--train", required=True, help="training samples CSV")
    p.add_argument("--test", required=True, help="test samples CSV")
    p.add_argument("--lambda", dest="lambdas", type=_lambda_grid, default=[0.0])
    _add_estimator_flags(p)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--no-figures", action="store_true")

    return parser


def _cmd_generate_graph(args) -> int:
    spec = EnsembleSpec(
        kind=_KIND_ALIASES[args.kind],
        n=args.n,
        seed=_resolve_seed(args.seed),
        p=args.p,
        sizes=args.sizes,
        p_within=args.p_within,
        q_between=args.q_between,
        m_attractors=args.m_attractors,
    )
    from .graphs import build_ensemble

    save_edge_list(args.out, build_ensemble(spec))
    return 0


def _cmd_sample(args) -> int:
    J = load_edge_list(args.graph)
    settings = GibbsSettings(
        burn_in_sweeps=args.burn_in,
        thin_sweeps=args.thin,
        init=args.init,
        seed=_resolve_seed(args.seed),
    )
    samples = gibbs_sample(J, args.beta, args.k, settings)
    if args.k == 1:
        write_spins(args.out, samples[0])
    else:
        write_samples_csv(args.out, samples)
    return 0


def _cmd_contaminate(args) -> int:
    x = read_spins(args.sample)
    scheme = parse_scheme(args.scheme, seed=_resolve_seed(args.seed))
    from .contamination import contaminate

    write_spins(args.out, contaminate(x, scheme))
    return 0


def _record(lam: float, res) -> dict:
    return {
        "lambda": lam,
        "beta_hat": None if math.isnan(res.beta_hat) else res.beta_hat,
        "kind": res.kind,
        "score": res.score_at_solution,
        "objective": res.objective_at_solution,
        "iterations": res.iterations,
    }


def _cmd_estimate(args) -> int:
    J = load_edge_list(args.graph)
    x = read_spins(args.sample, J.n)
    fits = estimate_lambda_grid(J, x, args.lambdas, _estimator_settings(args))
    records = [_record(lam, res) for lam, res in fits]
    _write_text(args.out, json.dumps(records, indent=2) + "\n")
    return 0


def _cmd_ges(args) -> int:
    J = load_edge_list(args.graph)
    x = read_spins(args.sample, J.n)
    curve = ges_curve(J, x, args.beta, args.lambdas,
                      budget=args.budget, seed=_resolve_seed(args.seed))
    lines = ["lambda,ges,method"]
    lines.extend(f"{lam!r},{res.ges!r},{res.method}" for lam, res in curve)
    _write_text(args.out, "\n".join(lines) + "\n")
    if not args.no_figures:
        from .plotting import save_ges_figure

        save_ges_figure(curve, args.out)
    return 0


def _cmd_experiment(args) -> int:
    spec = load_experiment_spec(args.config)
    report = run_experiment(spec, threads=args.threads)
    report.write_csv(args.out)
    if not args.no_figures:
        from .plotting import save_experiment_figures

        save_experiment_figures(report, args.out)
    return 0


def _cmd_predict_loo(args) -> int:
    J = load_edge_list(args.graph)
    x = read_spins(args.sample, J.n)
    rows = predict_leave_one_out(J, x, args.lambdas, _estimator_settings(args))
    lines = ["lambda,accuracy,n_fallback_nodes"]
    lines.extend(f"{r.lam!r},{r.accuracy!r},{r.n_fallback_nodes}" for r in rows)
    _write_text(args.out, "\n".join(lines) + "\n")
    if not args.no_figures:
        from .plotting import save_accuracy_figure

        save_accuracy_figure([(r.lam, r.accuracy) for r in rows], args.out)
    return 0


def _cmd_predict_split(args) -> int:
    J = load_edge_list(args.graph)
    train = read_samples_csv(args.train, J.n)
    test = read_samples_csv(args.test, J.n)
    rows = predict_train_test(J, train, test, args.lambdas, _estimator_settings(args))
    lines = ["lambda,accuracy,n_train_used,n_train_excluded"]
    lines.extend(
        f"{r.lam!r},{r.accuracy!r},{r.n_train_used},{r.n_train_excluded}" for r in rows
    )
    _write_text(args.out, "\n".join(lines) + "\n")
    if not args.no_figures:
        from .plotting import save_accuracy_figure

        save_accuracy_figure([(r.lam, r.accuracy) for r in rows], args.out)
    return 0


_DISPATCH = {
    "generate-graph": _cmd_generate_graph,
    "sample": _cmd_sample,
    "contaminate": _cmd_contaminate,
    "estimate": _cmd_estimate,
    "ges": _cmd_ges,
    "experiment": _cmd_experiment,
    "predict-loo": _cmd_predict_loo,
    "predict-split": _cmd_predict_split,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except UsageError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return 2
    except IsingRobustError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        name = getattr(exc, "filename", None)
        detail = f"{exc.strerror}: {name}" if name else str(exc)
        print(f"FileError: {detail}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
