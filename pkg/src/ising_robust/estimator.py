"""Interaction-strength estimation from a single spin configuration.

The estimator family is indexed by a robustness weight ``lam`` (lambda).
``lam = 0`` is maximum pseudolikelihood; ``lam > 0`` minimizes a density
power divergence built from the node-wise conditionals, which caps the
influence any single node can exert. Estimates solve the estimating
equation ``score(beta) = 0`` on a bounded beta interval via a grid scan
plus safeguarded Newton/bisection refinement.

All transcendental pieces are evaluated in log space so large ``beta * m``
never overflows; the node weight factor is bounded by ``2**lam``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec, LambdaZero
from .graphs import InteractionMatrix
from .model import local_fields, validate_spins

OUTCOME_KINDS = ("interior_root", "left_boundary", "right_divergent", "degenerate")
ROOT_POLICIES = ("global_objective_min", "first_root")

_LOG2 = math.log(2.0)
_PROFILE_BLOCK = 1 << 21  # cap on (grid x nodes) temporaries
_MAX_REFINE_ITERS = 128


def _logcosh(z):
    az = np.abs(z)
    return az + np.log1p(np.exp(-2.0 * az)) - _LOG2


def _log_abs_sinh(u):
    au = np.abs(u)
    with np.errstate(divide="ignore"):
        return au + np.log1p(-np.exp(-2.0 * au)) - _LOG2


def _sinh_over_cosh_pow(u, logcosh_z, power):
    """sinh(u) / cosh(z)**power given logcosh(z), stable for any magnitudes."""
    with np.errstate(invalid="ignore"):
        out = np.sign(u) * np.exp(_log_abs_sinh(u) - power * logcosh_z)
    return np.where(u == 0.0, 0.0, out)


def dpd_weight(beta, t, lam):
    """Node weight factor cosh((lam-1)*beta*t) / cosh(beta*t)**(lam+1).

    Identically 1 at ``lam = 0``; bounded by ``2**lam`` and strictly positive
    for any arguments, which is what caps single-node influence.
    """
    if lam < 0:
        raise InvalidSpec(f"lambda must be >= 0, got {lam}")
    z = np.asarray(beta, dtype=np.float64) * np.asarray(t, dtype=np.float64)
    val = np.exp(_logcosh((lam - 1.0) * z) - (lam + 1.0) * _logcosh(z))
    return float(val) if val.ndim == 0 else val


def dpd_weight_dbeta(beta, t, lam):
    """Partial derivative of :func:`dpd_weight` in beta.

    Closed form ``t * (lam*sinh((lam-2)*z) - sinh(lam*z)) / cosh(z)**(lam+2)``
    with ``z = beta*t``; evaluated termwise in log space. Vanishes identically
    at ``lam = 0`` and at ``beta = 0``.
    """
    if lam < 0:
        raise InvalidSpec(f"lambda must be >= 0, got {lam}")
    t = np.asarray(t, dtype=np.float64)
    z = np.asarray(beta, dtype=np.float64) * t
    lc = _logcosh(z)
    val = t * (
        lam * _sinh_over_cosh_pow((lam - 2.0) * z, lc, lam + 2.0)
        - _sinh_over_cosh_pow(lam * z, lc, lam + 2.0)
    )
    return float(val) if val.ndim == 0 else val


def log_pseudolikelihood(J: InteractionMatrix, x, beta: float) -> float:
    """Average log conditional likelihood (1/n) sum_i log P(x_i | rest)."""
    s = validate_spins(x, J.n)
    m = local_fields(J, s)
    arg = 2.0 * beta * m * s.astype(np.float64)
    return float(np.mean(-np.logaddexp(0.0, -arg)))


def kl_to_model(J: InteractionMatrix, x, beta: float) -> float:
    """Node-averaged KL divergence from the observed spins to the conditional
    model; equals the negated log pseudolikelihood because the plug-in
    entropy of deterministic labels is exactly zero."""
    return -log_pseudolikelihood(J, x, beta)


def dpd_objective(J: InteractionMatrix, x, beta: float, lam: float) -> float:
    """Density power divergence between observed spins and the conditional model.

    Defined for ``lam > 0``; its ``lam -> 0`` limit is :func:`kl_to_model`,
    which callers should use directly at zero.
    """
    if lam <= 0:
        raise LambdaZero("dpd_objective needs lambda > 0; use kl_to_model at lambda = 0")
    s = validate_spins(x, J.n)
    m = local_fields(J, s)
    return _dpd_from_m(m, s, beta, lam)


def _dpd_from_m(m, s, beta, lam):
    n = m.size
    z = beta * m
    log_pi = -np.logaddexp(0.0, -2.0 * z)
    log_qi = -np.logaddexp(0.0, 2.0 * z)
    model_mass = np.exp((1.0 + lam) * log_pi) + np.exp((1.0 + lam) * log_qi)
    log_observed = np.where(s > 0, log_pi, log_qi)
    data_mass = (1.0 + 1.0 / lam) * np.exp(lam * log_observed)
    total = float(np.sum(model_mass - data_mass)) + n / lam
    return total / n ** (1.0 + lam)


def _score_from_m(m, s, beta, lam):
    z = beta * m
    logf = _logcosh((lam - 1.0) * z) - (lam + 1.0) * _logcosh(z)
    return float(np.mean(np.exp(logf) * m * (s - np.tanh(z))))


def _score_profile(m, s, betas, lam):
    """score at every beta in ``betas``; chunked to bound temporaries."""
    n = max(m.size, 1)
    out = np.empty(betas.size)
    chunk = max(1, _PROFILE_BLOCK // n)
    sf = s.astype(np.float64)
    for k in range(0, betas.size, chunk):
        z = betas[k : k + chunk, None] * m[None, :]
        logf = _logcosh((lam - 1.0) * z) - (lam + 1.0) * _logcosh(z)
        out[k : k + chunk] = np.mean(np.exp(logf) * m * (sf - np.tanh(z)), axis=1)
    return out


def _score_parts_from_m(m, s, beta, lam):
    z = beta * m
    lc = _logcosh(z)
    logf = _logcosh((lam - 1.0) * z) - (lam + 1.0) * lc
    resid = s - np.tanh(z)
    dfdb = m * (
        lam * _sinh_over_cosh_pow((lam - 2.0) * z, lc, lam + 2.0)
        - _sinh_over_cosh_pow(lam * z, lc, lam + 2.0)
    )
    s1 = float(np.mean(dfdb * m * resid))
    s2 = float(-np.mean(np.exp(logf - 2.0 * lc) * m * m))
    return s1, s2


def score(J: InteractionMatrix, x, beta: float, lam: float) -> float:
    """Estimating function: (1/n) sum_i f(beta, m_i) m_i (x_i - tanh(beta m_i)).

    Proportional to the negated beta-derivative of the divergence objective;
    its zero in beta is the estimate.
    """
    if lam < 0:
        raise InvalidSpec(f"lambda must be >= 0, got {lam}")
    s = validate_spins(x, J.n)
    m = local_fields(J, s)
    return _score_from_m(m, s.astype(np.float64), beta, lam)


def score_derivative_parts(J: InteractionMatrix, x, beta: float, lam: float) -> tuple[float, float]:
    """Split d(score)/d(beta) into (weight-derivative part, variance part).

    The second part is ``-(1/n) sum_i f(beta, m_i) m_i^2 / cosh^2(beta m_i)``
    and is nonpositive for every input; the parts sum to the full derivative.
    """
    if lam < 0:
        raise InvalidSpec(f"lambda must be >= 0, got {lam}")
    s = validate_spins(x, J.n)
    m = local_fields(J, s)
    return _score_parts_from_m(m, s.astype(np.float64), beta, lam)


@dataclass(frozen=True)
class EstimatorSettings:
    lam: float = 0.0
    beta_min: float = 0.0
    beta_max: float = 10.0
    grid_points: int = 512
    root_tol: float = 1e-10
    step_tol: float = 1e-8
    root_policy: str = "global_objective_min"

    def __post_init__(self):
        if self.lam < 0:
            raise InvalidSpec(f"lambda must be >= 0, got {self.lam}")
        if not (math.isfinite(self.beta_min) and math.isfinite(self.beta_max)):
            raise InvalidSpec("beta bounds must be finite")
        if self.beta_min < 0 or self.beta_min >= self.beta_max:
            raise InvalidSpec(
                f"need 0 <= beta_min < beta_max, got [{self.beta_min}, {self.beta_max}]"
            )
        if self.grid_points < 2:
            raise InvalidSpec(f"grid_points must be >= 2, got {self.grid_points}")
        if self.root_tol <= 0 or self.step_tol <= 0:
            raise InvalidSpec("tolerances must be positive")
        if self.root_policy not in ROOT_POLICIES:
            raise InvalidSpec(f"root_policy must be one of {ROOT_POLICIES}")


@dataclass(frozen=True)
class EstimateOutcome:
    """Solver result; ``beta_hat`` is NaN when the sample is degenerate."""

    beta_hat: float
    kind: str
    score_at_solution: float
    objective_at_solution: float
    iterations: int


def _policy_objective(m, s, beta, lam):
    """Objective used for root selection: divergence at lam > 0, else the
    negated log pseudolikelihood (its lam -> 0 limit)."""
    if lam > 0:
        return _dpd_from_m(m, s, beta, lam)
    return float(np.mean(np.logaddexp(0.0, -2.0 * beta * m * s)))


def _refine_bracket(score_f, deriv_f, lo, hi, s_lo, s_hi, settings, start=None, trace=None):
    """Safeguarded Newton on a sign-change bracket; falls back to bisection."""
    iters = 0
    b = start if (start is not None and lo < start < hi) else 0.5 * (lo + hi)
    for _ in range(_MAX_REFINE_ITERS):
        sc = score_f(b)
        iters += 1
        if abs(sc) <= settings.root_tol:
            return b, sc, iters
        if (sc > 0.0) == (s_lo > 0.0):
            lo, s_lo = b, sc
        else:
            hi, s_hi = b, sc
        d1, d2 = deriv_f(b)
        if trace is not None:
            trace(b, sc, d1, d2)
        deriv = d1 + d2
        nxt = b - sc / deriv if deriv != 0.0 else None
        if nxt is None or not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        if abs(nxt - b) <= settings.step_tol:
            sc = score_f(nxt)
            iters += 1
            return nxt, sc, iters
        b = nxt
    return b, sc, iters


def estimate(
    J: InteractionMatrix,
    x,
    settings: EstimatorSettings | None = None,
    warm_start: float | None = None,
    trace=None,
) -> EstimateOutcome:
    """Solve the estimating equation for one spin configuration.

    Scans the score on the settings grid, refines every sign-change bracket,
    and classifies the outcome: an interior root, a clamp at either end of the
    beta interval (score strictly one-signed), or a degenerate sample whose
    local fields all vanish (the score is identically zero, no information).
    With multiple roots, ``root_policy`` picks either the smallest-objective
    root or the leftmost one. ``warm_start`` seeds Newton inside whichever
    bracket contains it; it never changes which roots exist.
    """
    settings = settings or EstimatorSettings()
    s = validate_spins(x, J.n)
    m = local_fields(J, s)
    sf = s.astype(np.float64)
    lam = settings.lam

    if not np.any(m):
        return EstimateOutcome(
            beta_hat=float("nan"),
            kind="degenerate",
            score_at_solution=0.0,
            objective_at_solution=_policy_objective(m, sf, settings.beta_min, lam),
            iterations=0,
        )

    betas = np.linspace(settings.beta_min, settings.beta_max, settings.grid_points)
    svals = _score_profile(m, s, betas, lam)

    def score_f(b):
        return _score_from_m(m, sf, b, lam)

    def deriv_f(b):
        return _score_parts_from_m(m, sf, b, lam)

    roots: list[tuple[float, float, int]] = []
    for k in np.flatnonzero(svals == 0.0):
        roots.append((float(betas[k]), 0.0, 0))
    total_iters = 0
    sgn = np.sign(svals)
    for k in np.flatnonzero(sgn[:-1] * sgn[1:] < 0.0):
        b, sc, it = _refine_bracket(
            score_f, deriv_f,
            float(betas[k]), float(betas[k + 1]),
            float(svals[k]), float(svals[k + 1]),
            settings, start=warm_start, trace=trace,
        )
        total_iters += it
        roots.append((b, sc, it))

    if not roots:
        if svals[0] < 0.0:
            b = settings.beta_min
            kind = "left_boundary"
        else:
            b = settings.beta_max
            kind = "right_divergent"
        if trace is not None:
            d1, d2 = deriv_f(b)
            trace(b, float(svals[0 if kind == "left_boundary" else -1]), d1, d2)
        return EstimateOutcome(
            beta_hat=float(b),
            kind=kind,
            score_at_solution=score_f(b),
            objective_at_solution=_policy_objective(m, sf, b, lam),
            iterations=0,
        )

    roots.sort(key=lambda r: r[0])
    if settings.root_policy == "first_root" or len(roots) == 1:
        b, sc, _ = roots[0]
    else:
        objs = [_policy_objective(m, sf, r[0], lam) for r in roots]
        b, sc, _ = roots[int(np.argmin(objs))]
    return EstimateOutcome(
        beta_hat=float(b),
        kind="interior_root",
        score_at_solution=float(sc),
        objective_at_solution=_policy_objective(m, sf, b, lam),
        iterations=total_iters,
    )


def estimate_lambda_grid(
    J: InteractionMatrix,
    x,
    lambdas,
    settings: EstimatorSettings | None = None,
) -> list[tuple[float, EstimateOutcome]]:
    """Estimate across a lambda grid, warm-starting each solve at the
    previous interior root (affects iteration counts only)."""
    base = settings or EstimatorSettings()
    out = []
    warm = None
    for lam in lambdas:
        cfg = EstimatorSettings(
            lam=float(lam),
            beta_min=base.beta_min,
            beta_max=base.beta_max,
            grid_points=base.grid_points,
            root_tol=base.root_tol,
            step_tol=base.step_tol,
            root_policy=base.root_policy,
        )
        res = estimate(J, x, cfg, warm_start=warm)
        if res.kind == "interior_root":
            warm = res.beta_hat
        out.append((float(lam), res))
    return out
