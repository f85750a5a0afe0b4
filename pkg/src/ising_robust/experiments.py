"""Replicated estimation experiments and prediction harnesses.

``run_experiment`` drives the full pipeline per replicate: (re)build the
graph, Gibbs-sample one configuration at the true interaction strength,
apply each contamination scheme, estimate across the lambda grid, and
aggregate MSE/bias per (scheme, lambda) cell. Every replicate derives its
random streams from ``(base_seed, replicate)``, so reports are bit-identical
whether replicates run serially or on a thread pool.
"""
from __future__ import annotations

import dataclasses
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .contamination import ContaminationScheme, contaminate
from .errors import InvalidSpec, NoUsableTrainingFits, ParseError
from .estimator import EstimatorSettings, estimate, estimate_lambda_grid
from .graphs import ENSEMBLE_KINDS, EnsembleSpec, InteractionMatrix, build_ensemble
from .model import conditional_prob_plus, local_fields, validate_spins
from .rng import child_seed
from .sampler import GibbsSettings, gibbs_sample

REPORT_HEADER = (
    "lambda,contamination_kind,contamination_fraction,mse,bias,"
    "n_interior,n_left_boundary,n_right_divergent,n_degenerate,replicates"
)

# ensembles whose draw is random, hence resampled per replicate by default
_RANDOM_KINDS = ("erdos_renyi", "sbm", "sherrington_kirkpatrick", "hopfield")

# how the energy reads the couplings: summed over unordered pairs, or as the
# full quadratic form x^T J x whose double counting doubles every coupling
HAMILTONIAN_CONVENTIONS = ("pair_sum", "quadratic_form")

# substream tags: (REPLICATE, r, role) for per-replicate streams
_DOMAIN_REPLICATE = 0
_DOMAIN_SHARED = 1
_ROLE_GRAPH = 0
_ROLE_SPINS = 1
_ROLE_CONTAMINATION = 2


@dataclass(frozen=True)
class ExperimentSpec:
    ensemble: EnsembleSpec
    true_beta: float
    contamination: tuple[ContaminationScheme, ...]
    lambdas: tuple[float, ...]
    replicates: int
    gibbs: GibbsSettings = field(default_factory=GibbsSettings)
    estimator: EstimatorSettings = field(default_factory=EstimatorSettings)
    base_seed: int = 0
    fix_graph: bool | None = None
    hamiltonian: str = "pair_sum"

    def __post_init__(self):
        object.__setattr__(self, "contamination", tuple(self.contamination))
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        if not self.contamination:
            raise InvalidSpec("need at least one contamination scheme (use fraction 0)")
        if not self.lambdas:
            raise InvalidSpec("need at least one lambda")
        if self.replicates < 1:
            raise InvalidSpec(f"replicates must be >= 1, got {self.replicates}")
        if not np.isfinite(self.true_beta):
            raise InvalidSpec("true_beta must be finite")
        if self.hamiltonian not in HAMILTONIAN_CONVENTIONS:
            raise InvalidSpec(
                f"hamiltonian must be one of {HAMILTONIAN_CONVENTIONS}, got {self.hamiltonian!r}"
            )

    def resolve_fix_graph(self) -> bool:
        if self.fix_graph is not None:
            return bool(self.fix_graph)
        return self.ensemble.kind not in _RANDOM_KINDS


@dataclass(frozen=True)
class ReportRow:
    lam: float
    contamination_kind: str
    contamination_fraction: float
    mse: float
    bias: float
    n_interior: int
    n_left_boundary: int
    n_right_divergent: int
    n_degenerate: int
    replicates: int

    def to_csv(self) -> str:
        return ",".join(
            [
                repr(float(self.lam)),
                self.contamination_kind,
                repr(float(self.contamination_fraction)),
                repr(float(self.mse)),
                repr(float(self.bias)),
                str(self.n_interior),
                str(self.n_left_boundary),
                str(self.n_right_divergent),
                str(self.n_degenerate),
                str(self.replicates),
            ]
        )


@dataclass(frozen=True)
class ExperimentReport:
    spec: ExperimentSpec
    rows: tuple[ReportRow, ...]

    def to_csv_string(self) -> str:
        lines = [REPORT_HEADER]
        lines.extend(row.to_csv() for row in self.rows)
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_csv_string())


def _effective_coupling(spec: ExperimentSpec, J: InteractionMatrix) -> InteractionMatrix:
    # the quadratic form visits each pair twice, so its couplings act doubled
    if spec.hamiltonian == "pair_sum":
        return J
    return InteractionMatrix(J.n, J.rows, J.cols, 2.0 * J.weights, J.scaling_tag)


def _replicate_graph(spec: ExperimentSpec, r: int) -> InteractionMatrix:
    seed = child_seed(spec.base_seed, _DOMAIN_REPLICATE, r, _ROLE_GRAPH)
    return _effective_coupling(spec, build_ensemble(dataclasses.replace(spec.ensemble, seed=seed)))


def _run_replicate(spec: ExperimentSpec, r: int, shared_graph) -> list[list[tuple[float, str]]]:
    """One replicate's (scheme x lambda) matrix of (beta_hat, kind)."""
    J = shared_graph if shared_graph is not None else _replicate_graph(spec, r)
    gibbs_cfg = dataclasses.replace(
        spec.gibbs, seed=child_seed(spec.base_seed, _DOMAIN_REPLICATE, r, _ROLE_SPINS)
    )
    x = gibbs_sample(J, spec.true_beta, 1, gibbs_cfg)[0]
    out = []
    for s_idx, scheme in enumerate(spec.contamination):
        seeded = dataclasses.replace(
            scheme,
            seed=child_seed(spec.base_seed, _DOMAIN_REPLICATE, r, _ROLE_CONTAMINATION, s_idx),
        )
        xc = contaminate(x, seeded)
        fits = estimate_lambda_grid(J, xc, spec.lambdas, spec.estimator)
        out.append([(res.beta_hat, res.kind) for _, res in fits])
    return out


def run_experiment(spec: ExperimentSpec, threads: int = 1) -> ExperimentReport:
    """Run all replicates and aggregate per (contamination scheme, lambda).

    Boundary and divergent fits enter MSE/bias at their clamped values;
    degenerate fits are excluded from the moments and only counted. Passing
    ``threads > 1`` parallelizes over replicates without changing any output
    byte.
    """
    if threads < 1:
        raise InvalidSpec(f"threads must be >= 1, got {threads}")
    shared_graph = None
    if spec.resolve_fix_graph():
        shared_graph = _effective_coupling(spec, build_ensemble(spec.ensemble))
        shared_graph.csr  # prebuild the cached form before any thread fan-out

    results: list[list[list[tuple[float, str]]] | None] = [None] * spec.replicates
    if threads == 1:
        for r in range(spec.replicates):
            results[r] = _run_replicate(spec, r, shared_graph)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {
                r: pool.submit(_run_replicate, spec, r, shared_graph)
                for r in range(spec.replicates)
            }
            for r, fut in futures.items():
                results[r] = fut.result()

    rows = []
    for s_idx, scheme in enumerate(spec.contamination):
        for l_idx, lam in enumerate(spec.lambdas):
            errors = []
            counts = {k: 0 for k in ("interior_root", "left_boundary", "right_divergent", "degenerate")}
            for r in range(spec.replicates):
                beta_hat, kind = results[r][s_idx][l_idx]
                counts[kind] += 1
                if kind != "degenerate":
                    errors.append(beta_hat - spec.true_beta)
            if errors:
                arr = np.asarray(errors)
                mse = float(np.mean(arr * arr))
                bias = float(np.mean(arr))
            else:
                mse = float("nan")
                bias = float("nan")
            rows.append(
                ReportRow(
                    lam=lam,
                    contamination_kind=scheme.kind,
                    contamination_fraction=scheme.fraction,
                    mse=mse,
                    bias=bias,
                    n_interior=counts["interior_root"],
                    n_left_boundary=counts["left_boundary"],
                    n_right_divergent=counts["right_divergent"],
                    n_degenerate=counts["degenerate"],
                    replicates=spec.replicates,
                )
            )
    return ExperimentReport(spec=spec, rows=tuple(rows))


@dataclass(frozen=True)
class LooAccuracy:
    lam: float
    accuracy: float
    n_fallback_nodes: int


def predict_leave_one_out(
    J: InteractionMatrix,
    x,
    lambdas,
    settings: EstimatorSettings | None = None,
) -> list[LooAccuracy]:
    """Node-held-out label prediction accuracy per lambda.

    For each node the estimate is fit on the graph and spins with that node
    removed, then the node's label is predicted from its full-row local
    field: +1 exactly when the conditional plus-probability is >= 1/2 (ties
    predict +1). Degenerate held-out fits fall back to the full-sample
    estimate for that lambda (counted per lambda); if that is degenerate too
    the conditional is flat and the tie rule applies.
    """
    settings = settings or EstimatorSettings()
    s = validate_spins(x, J.n)
    lambdas = [float(v) for v in lambdas]
    m_full = local_fields(J, s)
    full_fits = {lam: res for lam, res in estimate_lambda_grid(J, s, lambdas, settings)}
    correct = {lam: 0 for lam in lambdas}
    fallback = {lam: 0 for lam in lambdas}
    for i in range(J.n):
        J_i = J.delete_node(i)
        x_i = np.delete(s, i)
        for lam, res in estimate_lambda_grid(J_i, x_i, lambdas, settings):
            if res.kind == "degenerate":
                fallback[lam] += 1
                full = full_fits[lam]
                beta_use = 0.0 if full.kind == "degenerate" else full.beta_hat
            else:
                beta_use = res.beta_hat
            pred = 1 if conditional_prob_plus(beta_use, m_full[i]) >= 0.5 else -1
            correct[lam] += int(pred == s[i])
    return [
        LooAccuracy(lam=lam, accuracy=correct[lam] / J.n, n_fallback_nodes=fallback[lam])
        for lam in lambdas
    ]


@dataclass(frozen=True)
class SplitAccuracy:
    lam: float
    accuracy: float
    n_train_used: int
    n_train_excluded: int


def predict_train_test(
    J: InteractionMatrix,
    train_samples,
    test_samples,
    lambdas,
    settings: EstimatorSettings | None = None,
) -> list[SplitAccuracy]:
    """Fit on training samples, score label agreement on test samples.

    Per lambda the predictor strength is the mean of the interior estimates
    across training samples; non-interior fits are excluded and counted.
    Raises :class:`NoUsableTrainingFits` when a lambda has no interior fit.
    """
    settings = settings or EstimatorSettings()
    train = [validate_spins(t, J.n) for t in train_samples]
    test = [validate_spins(t, J.n) for t in test_samples]
    if not train or not test:
        raise InvalidSpec("need at least one training and one test sample")
    lambdas = [float(v) for v in lambdas]
    fits_per_sample = [estimate_lambda_grid(J, t, lambdas, settings) for t in train]
    out = []
    for l_idx, lam in enumerate(lambdas):
        interior = [
            fits[l_idx][1].beta_hat
            for fits in fits_per_sample
            if fits[l_idx][1].kind == "interior_root"
        ]
        if not interior:
            raise NoUsableTrainingFits(
                f"no interior training fits at lambda={lam} ({len(train)} samples)"
            )
        beta_bar = float(np.mean(interior))
        hits = 0
        total = 0
        for t in test:
            m = local_fields(J, t)
            pred = np.where(conditional_prob_plus(beta_bar, m) >= 0.5, 1, -1)
            hits += int(np.sum(pred == t))
            total += J.n
        out.append(
            SplitAccuracy(
                lam=lam,
                accuracy=hits / total,
                n_train_used=len(interior),
                n_train_excluded=len(train) - len(interior),
            )
        )
    return out


def _ensemble_from_dict(d: dict) -> EnsembleSpec:
    if "kind" not in d or "n" not in d:
        raise ParseError("ensemble config needs 'kind' and 'n'")
    if d["kind"] not in ENSEMBLE_KINDS:
        raise ParseError(f"unknown ensemble kind {d['kind']!r}")
    known = {f.name for f in dataclasses.fields(EnsembleSpec)}
    extra = set(d) - known
    if extra:
        raise ParseError(f"unknown ensemble keys {sorted(extra)}")
    kwargs = dict(d)
    if "sizes" in kwargs and kwargs["sizes"] is not None:
        kwargs["sizes"] = tuple(kwargs["sizes"])
    return EnsembleSpec(**kwargs)


def experiment_spec_from_dict(d: dict) -> ExperimentSpec:
    try:
        ensemble = _ensemble_from_dict(dict(d["ensemble"]))
        schemes = tuple(
            ContaminationScheme(kind=c["kind"], fraction=float(c["fraction"]), seed=int(c.get("seed", 0)))
            for c in d["contamination"]
        )
        gibbs = GibbsSettings(**d.get("gibbs", {}))
        est_kwargs = dict(d.get("estimator", {}))
        if "lambda" in est_kwargs:
            est_kwargs["lam"] = est_kwargs.pop("lambda")
        estimator = EstimatorSettings(**est_kwargs)
        return ExperimentSpec(
            ensemble=ensemble,
            true_beta=float(d["true_beta"]),
            contamination=schemes,
            lambdas=tuple(float(v) for v in d["lambdas"]),
            replicates=int(d["replicates"]),
            gibbs=gibbs,
            estimator=estimator,
            base_seed=int(d.get("base_seed", 0)),
            fix_graph=d.get("fix_graph"),
            hamiltonian=str(d.get("hamiltonian", "pair_sum")),
        )
    except KeyError as exc:
        raise ParseError(f"experiment config missing key {exc}") from None
    except TypeError as exc:
        raise ParseError(f"experiment config malformed: {exc}") from None


def load_experiment_spec(path) -> ExperimentSpec:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top-level JSON object expected")
    return experiment_spec_from_dict(data)
