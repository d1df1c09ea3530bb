"""Model-selection scores: exact marginal likelihood and its asymptotic approximations.

All scores are reported in natural log.  The closed-form marginal likelihood
(Cooper-Herskovits) takes Dirichlet pseudo-counts derived from a fully
observed prior network and accepts fractional sufficient statistics, so the
completed-data statistics produced by EM feed it directly via log-Gamma at
non-integer arguments.

The two BIC variants differ only in the penalty dimension: the complete-data
score charges the raw parameter count d', while the latent-variable score
charges the effective dimension d (the regular Jacobian rank).  The
Cheeseman-Stutz score combines the completed-data marginal likelihood with a
likelihood-ratio correction; its rank-corrected variant adds
``(d' - d)/2 * log N``, which makes the two agree exactly when d' = d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .inference import (
    Dataset,
    SufficientStatistics,
    complete_counts,
    expected_complete_loglik,
    expected_counts,
    loglik,
)
from .network import (
    DISCRETE,
    NetworkModel,
    ParameterPoint,
    StateIndexer,
    parameter_count,
    require_valid,
    require_valid_point,
)
from .observable import _factors_from_point, _full_joint
from .rank import RegularRankReport

SCORE_CH = "ch"
SCORE_BIC = "bic"
SCORE_BIC_LATENT = "bic-latent"
SCORE_CS = "cs"
SCORE_CS_CORRECTED = "cs-corrected"


@dataclass(frozen=True)
class PriorSpec:
    """Dirichlet prior: an equivalent sample size and a fully observed prior network."""

    alpha: Fraction
    network: NetworkModel
    point: ParameterPoint

    @classmethod
    def uniform(cls, model: NetworkModel, alpha=1) -> "PriorSpec":
        """Uniform joint prior over the model's variables, no edges."""
        require_valid(model)
        variables = [(v.name, v.states, False) for v in model.variables]
        from .network import build_model  # deferred: keeps module import order simple
        prior_net = build_model(DISCRETE, variables, [])
        cpts = []
        for i in range(prior_net.n):
            r = prior_net.cardinality(i)
            cpts.append(((tuple(Fraction(1, r) for _ in range(r)),)))
        point = ParameterPoint(family=DISCRETE, model_fingerprint=prior_net.fingerprint(),
                               cpts=tuple(cpts))
        return cls(alpha=Fraction(alpha), network=prior_net, point=point)


@dataclass(frozen=True)
class ScoreReport:
    """A scored model: value in nats plus its additive components.

    ``loglik_term + penalty_term == value`` for every score; ``d_used`` is
    the dimension charged by the penalty (None when no penalty applies).
    """

    score: str
    value: float
    loglik_term: float
    penalty_term: float
    d_used: int | None
    d_prime: int
    n_cases: float
    model_fingerprint: str

    def to_json(self) -> dict:
        return {
            "score": self.score,
            "value_nats": self.value,
            "loglik_term": self.loglik_term,
            "penalty_term": self.penalty_term,
            "d_used": self.d_used,
            "d_prime": self.d_prime,
            "N": self.n_cases,
            "model_fingerprint": self.model_fingerprint,
        }


# ---------------------------------------------------------------------------
# Dirichlet prior counts and the exact marginal likelihood
# ---------------------------------------------------------------------------

def prior_counts(prior: PriorSpec, model: NetworkModel) -> list[list[list[Fraction]]]:
    """Pseudo-count table: alpha times the prior-network probability of each
    (child state, parent state) event, per variable of the target model."""
    require_valid(model)
    require_valid(prior.network)
    if model.family != DISCRETE:
        raise ValueError("Dirichlet priors apply to the discrete family")
    if prior.alpha <= 0:
        raise ValueError("equivalent sample size must be positive")
    if prior.network.hidden_indices():
        raise ValueError("prior network must be fully observed")

    prior_names = prior.network.names()
    if set(prior_names) != set(model.names()):
        raise ValueError("prior network must cover the same variable set")
    for i, v in enumerate(model.variables):
        if prior.network.cardinality(prior.network.index_of(v.name)) != model.cardinality(i):
            raise ValueError(f"cardinality mismatch for {v.name!r} in prior network")

    joint = _full_joint(prior.network, _factors_from_point(prior.network, prior.point), None)
    prior_indexer = StateIndexer([prior.network.cardinality(i) for i in range(prior.network.n)])
    position = [prior_names.index(name) for name in model.names()]

    tables = [
        [[Fraction(0) for _ in range(model.cardinality(i))]
         for _ in range(model.parent_state_count(i))]
        for i in range(model.n)
    ]
    parent_indexers = [
        StateIndexer(model.parent_cardinalities(i)) if model.parents[i] else None
        for i in range(model.n)
    ]
    for idx, q in enumerate(joint):
        prior_cfg = prior_indexer.config_of(idx)
        cfg = tuple(prior_cfg[position[i]] for i in range(model.n))
        for i in range(model.n):
            indexer = parent_indexers[i]
            j = indexer.index_of(tuple(cfg[p] for p in model.parents[i])) if indexer else 0
            tables[i][j][cfg[i]] += q
    alpha = Fraction(prior.alpha)
    return [[[alpha * x for x in row] for row in rows] for rows in tables]


def ch_marginal_loglik(stats: SufficientStatistics, alpha_tables) -> float:
    """Closed-form log marginal likelihood from counts and pseudo-counts.

    Fractional counts are evaluated through log-Gamma directly; pseudo-counts
    must be strictly positive.
    """
    total = 0.0
    for i, grid in enumerate(stats.counts):
        q, r = grid.shape
        for j in range(q):
            alpha_row = alpha_tables[i][j]
            if len(alpha_row) != r:
                raise ValueError("pseudo-count table shape mismatch")
            if any(a <= 0 for a in alpha_row):
                raise ValueError("pseudo-counts must be positive")
            alpha_ij = float(sum(alpha_row))
            n_ij = float(grid[j].sum())
            total += math.lgamma(alpha_ij) - math.lgamma(alpha_ij + n_ij)
            for k in range(r):
                a = float(alpha_row[k])
                total += math.lgamma(a + float(grid[j, k])) - math.lgamma(a)
    return total


def projected_entropy(stats: SufficientStatistics) -> float:
    """Entropy of the frequency-projected conditional tables.

    Satisfies ``-N * H`` = the maximized complete-data log likelihood, with
    the usual convention that empty cells contribute nothing.
    """
    n = stats.n_cases
    if n <= 0:
        raise ValueError("entropy needs at least one case")
    h = 0.0
    for grid in stats.counts:
        q, r = grid.shape
        for j in range(q):
            n_ij = float(grid[j].sum())
            if n_ij == 0.0:
                continue
            for k in range(r):
                n_ijk = float(grid[j, k])
                if n_ijk == 0.0:
                    continue
                h -= (n_ij / n) * (n_ijk / n_ij) * math.log(n_ijk / n_ij)
    return h


# ---------------------------------------------------------------------------
# scores
# ---------------------------------------------------------------------------

def bic_complete(data: Dataset, model: NetworkModel) -> ScoreReport:
    """Complete-data BIC: maximized log likelihood minus ``(d'/2) log N``."""
    stats = complete_counts(data, model)
    if stats.n_cases == 0:
        raise ValueError("empty dataset")
    n = stats.n_cases
    d_prime = parameter_count(model)
    loglik_term = -n * projected_entropy(stats)
    penalty = -(d_prime / 2.0) * math.log(n)
    return ScoreReport(
        score=SCORE_BIC,
        value=loglik_term + penalty,
        loglik_term=loglik_term,
        penalty_term=penalty,
        d_used=d_prime,
        d_prime=d_prime,
        n_cases=n,
        model_fingerprint=model.fingerprint(),
    )


def bic_latent(data: Dataset, model: NetworkModel, point: ParameterPoint,
               rank_report: RegularRankReport) -> ScoreReport:
    """Latent-variable BIC: the penalty dimension is the effective dimension d."""
    require_valid_point(model, point)
    if rank_report.model_fingerprint != model.fingerprint():
        raise ValueError("rank report does not match the model")
    n = float(data.n_cases)
    if n == 0:
        raise ValueError("empty dataset")
    loglik_term = loglik(data, model, point)
    penalty = -(rank_report.d / 2.0) * math.log(n)
    return ScoreReport(
        score=SCORE_BIC_LATENT,
        value=loglik_term + penalty,
        loglik_term=loglik_term,
        penalty_term=penalty,
        d_used=rank_report.d,
        d_prime=rank_report.d_prime,
        n_cases=n,
        model_fingerprint=model.fingerprint(),
    )


def cs_score(data: Dataset, model: NetworkModel, point: ParameterPoint,
             prior: PriorSpec | None = None) -> ScoreReport:
    """Cheeseman-Stutz score: completed-data marginal likelihood plus the
    likelihood ratio between observed and completed data at the fitted point."""
    require_valid_point(model, point)
    if prior is None:
        prior = PriorSpec.uniform(model)
    n = float(data.n_cases)
    completed = expected_counts(data, model, point)
    completed_marginal = ch_marginal_loglik(completed, prior_counts(prior, model))
    observed_loglik = loglik(data, model, point)
    completed_loglik = expected_complete_loglik(data, model, point)
    value = completed_marginal + observed_loglik - completed_loglik
    return ScoreReport(
        score=SCORE_CS,
        value=value,
        loglik_term=observed_loglik,
        penalty_term=completed_marginal - completed_loglik,
        d_used=None,
        d_prime=parameter_count(model),
        n_cases=n,
        model_fingerprint=model.fingerprint(),
    )


def cs_corrected(data: Dataset, model: NetworkModel, point: ParameterPoint,
                 rank_report: RegularRankReport, prior: PriorSpec | None = None) -> ScoreReport:
    """Rank-corrected Cheeseman-Stutz score.

    Adds ``(d' - d)/2 * log N`` so the asymptotic penalty charges the
    effective dimension d rather than the raw parameter count; a vacuous
    correction whenever d' = d.
    """
    if rank_report.model_fingerprint != model.fingerprint():
        raise ValueError("rank report does not match the model")
    base = cs_score(data, model, point, prior)
    n = float(data.n_cases)
    correction = ((rank_report.d_prime - rank_report.d) / 2.0) * math.log(n) if n > 0 else 0.0
    return ScoreReport(
        score=SCORE_CS_CORRECTED,
        value=base.value + correction,
        loglik_term=base.loglik_term,
        penalty_term=base.penalty_term + correction,
        d_used=rank_report.d,
        d_prime=rank_report.d_prime,
        n_cases=n,
        model_fingerprint=model.fingerprint(),
    )


# ---------------------------------------------------------------------------
# multinomial curvature check
# ---------------------------------------------------------------------------

def multinomial_hessian(counts) -> np.ndarray:
    """Negated log-likelihood Hessian of a multinomial at its ML point.

    For state counts ``(n_1, ..., n_r)`` with total N and frequencies
    ``w_k = n_k / N``, returns the ``(r-1) x (r-1)`` matrix
    ``N * (diag(1/w_k) + ones / (1 - sum_k w_k))`` over the first ``r-1``
    states.  Positive definiteness (a diagonal positive matrix plus a
    nonnegative rank-one one) is verified before returning.
    """
    values = [float(c) for c in counts]
    if len(values) < 2:
        raise ValueError("need at least two states")
    if any(c <= 0 for c in values):
        raise ValueError("zero count: the ML point sits on the boundary")
    n = sum(values)
    w = np.array(values[:-1]) / n
    remainder = 1.0 - w.sum()
    matrix = n * (np.diag(1.0 / w) + np.ones((len(w), len(w))) / remainder)
    try:
        np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError as exc:
        raise ValueError("hessian is not positive definite") from exc
    return matrix
