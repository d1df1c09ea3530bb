"""Effective dimension of a network as the regular rank of its Jacobian.

The map from network parameters to observable parameters has a Jacobian
whose rank is constant almost everywhere (it drops only on a measure-zero
set).  The randomized procedure samples interior parameter points, computes
the Jacobian at each, and takes the maximum rank over the trials.

Two rank back ends exist:

* an exact path for the polynomial families (discrete, linear-gaussian):
  fraction-free integer elimination after clearing denominators, so no
  tolerance is ever involved;
* a numeric SVD path for the sigmoid family, whose map is analytic but not
  polynomial, with a relative-spectral tolerance and a spectral-gap
  diagnostic around the cut.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .network import (
    DISCRETE,
    LINEAR_GAUSSIAN,
    SIGMOID,
    NetworkModel,
    ParameterPoint,
    observable_parameter_count,
    parameter_count,
    require_valid,
    sample_parameters,
    validate_point,
)
from .observable import (
    Jacobian,
    evaluate_observables,
    jacobian,
    observable_labels,
    parameter_labels,
    parameter_vector,
)

DEFAULT_TRIALS = 10
DEFAULT_TOLERANCE = 1e-9
GAP_CONFIDENCE = 1e3

EXACT_RATIONAL = "exact-rational"
NUMERIC_TOLERANCE = "numeric-tolerance"


# ---------------------------------------------------------------------------
# rank back ends
# ---------------------------------------------------------------------------

def _integer_rows(matrix: Sequence[Sequence]) -> list[list[int]]:
    """Clear denominators row by row (row scaling never changes the rank)."""
    rows = []
    for row in matrix:
        fracs = []
        for x in row:
            if isinstance(x, int):
                fracs.append(Fraction(x))
            elif isinstance(x, Fraction):
                fracs.append(x)
            else:
                raise TypeError(f"exact rank needs rational entries, got {type(x).__name__}")
        scale = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
        rows.append([int(f * scale) for f in fracs])
    return rows


def rank_exact(matrix: Sequence[Sequence]) -> int:
    """Exact rank of a matrix with rational entries.

    Uses fraction-free (Bareiss) elimination over the integers: intermediate
    entries stay integral because each is a minor of the cleared matrix, and
    the final divisions are exact.
    """
    rows = _integer_rows(matrix)
    if not rows or not rows[0]:
        return 0
    for row in rows:
        g = math.gcd(*row)
        if g > 1:
            for c in range(len(row)):
                row[c] //= g
    n_rows, n_cols = len(rows), len(rows[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        pivot_row = None
        for r in range(rank, n_rows):
            if rows[r][col] != 0:
                pivot_row = r
                break
        if pivot_row is None:
            continue
        if pivot_row != rank:
            rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        pivot = rows[rank][col]
        for r in range(rank + 1, n_rows):
            head = rows[r][col]
            row_r, row_p = rows[r], rows[rank]
            # every trailing entry is updated, even on a zero head: the
            # rescaling keeps entries equal to minors, so // stays exact
            for c in range(col + 1, n_cols):
                row_r[c] = (row_r[c] * pivot - head * row_p[c]) // prev
            row_r[col] = 0
        prev = pivot
        rank += 1
        if rank == n_rows:
            break
    return rank


@dataclass(frozen=True)
class NumericRank:
    """SVD-based rank with a diagnostic for how clean the spectral cut is."""

    rank: int
    threshold: float
    gap: float
    low_confidence: bool


def numeric_rank_details(matrix: Sequence[Sequence], tol: float = DEFAULT_TOLERANCE) -> NumericRank:
    arr = np.asarray([[float(x) for x in row] for row in matrix], dtype=float)
    if arr.size == 0:
        return NumericRank(rank=0, threshold=0.0, gap=math.inf, low_confidence=False)
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    singular = np.linalg.svd(arr, compute_uv=False)
    threshold = tol * float(singular[0]) * max(arr.shape)
    rank = int(np.sum(singular > threshold))
    if 0 < rank < len(singular) and singular[rank] > 0:
        gap = float(singular[rank - 1] / singular[rank])
    else:
        gap = math.inf
    return NumericRank(rank=rank, threshold=threshold, gap=gap,
                       low_confidence=gap < GAP_CONFIDENCE)


def rank_numeric(matrix: Sequence[Sequence], tol: float = DEFAULT_TOLERANCE) -> int:
    """Numeric rank: singular values above ``tol * sigma_max * max(shape)``."""
    return numeric_rank_details(matrix, tol).rank


# ---------------------------------------------------------------------------
# randomized regular rank
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RankTrial:
    seed: int
    rank: int
    gap: float | None = None
    low_confidence: bool = False


@dataclass(frozen=True)
class RegularRankReport:
    """Per-trial ranks and the regular rank d (their maximum)."""

    model_fingerprint: str
    family: str
    trials: tuple[RankTrial, ...]
    d: int
    d_prime: int
    observable_dof: int
    method: str
    tolerance: float | None = None

    def __post_init__(self) -> None:
        if self.trials and self.d != max(t.rank for t in self.trials):
            raise ValueError("regular rank must be the maximum trial rank")
        if self.d > min(self.d_prime, self.observable_dof):
            raise ValueError("rank exceeds parameter count or observable dof")

    def to_json(self) -> dict:
        return {
            "model_fingerprint": self.model_fingerprint,
            "family": self.family,
            "trials": [{"seed": t.seed, "rank": t.rank} for t in self.trials],
            "d": self.d,
            "d_prime": self.d_prime,
            "observable_dof": self.observable_dof,
            "method": self.method,
            "tolerance": self.tolerance,
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


_MAX_RESAMPLES = 5


def regular_rank(model: NetworkModel, trials: int = DEFAULT_TRIALS, seed: int = 0,
                 method: str | None = None, tol: float = DEFAULT_TOLERANCE,
                 state_cap: int | None = None) -> RegularRankReport:
    """Randomized regular rank: max Jacobian rank over sampled parameter points.

    The polynomial families default to the exact rational path; the sigmoid
    family always uses the numeric path (its map is analytic, not
    polynomial).  Deterministic for a fixed seed.
    """
    require_valid(model)
    if trials < 1:
        raise ValueError("at least one trial is required")
    if method is None:
        method = NUMERIC_TOLERANCE if model.family == SIGMOID else EXACT_RATIONAL
    if method == EXACT_RATIONAL and model.family == SIGMOID:
        raise ValueError("sigmoid maps are analytic; the exact rational path does not apply")
    if method not in (EXACT_RATIONAL, NUMERIC_TOLERANCE):
        raise ValueError(f"unknown method {method!r}")

    rng = random.Random(seed)
    results: list[RankTrial] = []
    for _ in range(trials):
        trial_seed = rng.randrange(2**63)
        point = _sample_valid_point(model, trial_seed)
        jac = jacobian(model, point, state_cap=state_cap)
        if method == EXACT_RATIONAL:
            results.append(RankTrial(seed=trial_seed, rank=rank_exact(jac.entries)))
        else:
            details = numeric_rank_details(jac.entries, tol)
            results.append(RankTrial(seed=trial_seed, rank=details.rank,
                                     gap=details.gap, low_confidence=details.low_confidence))

    return RegularRankReport(
        model_fingerprint=model.fingerprint(),
        family=model.family,
        trials=tuple(results),
        d=max(t.rank for t in results),
        d_prime=parameter_count(model),
        observable_dof=observable_parameter_count(model),
        method=method,
        tolerance=tol if method == NUMERIC_TOLERANCE else None,
    )


def _sample_valid_point(model: NetworkModel, trial_seed: int) -> ParameterPoint:
    """Sample a point, resampling (bounded) if it ever violates its invariants."""
    seed = trial_seed
    for _ in range(_MAX_RESAMPLES):
        point = sample_parameters(model, seed)
        if not validate_point(model, point):
            return point
        seed = (seed + 1) % 2**63
    raise RuntimeError("could not sample a valid parameter point")


def check_naive_bayes_rank_bounds(report: RegularRankReport, n_features: int) -> bool:
    """Bound check for a naive Bayes model with a binary hidden root.

    For ``n_features`` > 2 binary leaves, the regular rank must land in
    ``[2n, 2n + 1]``.  The upper end is the full parameter count, so the
    report's d_prime is cross-checked against it.
    """
    if n_features <= 2:
        raise ValueError("the bound applies to more than two feature variables")
    if report.d_prime != 2 * n_features + 1:
        raise ValueError("report does not come from a binary-hidden-root naive Bayes model")
    return 2 * n_features <= report.d <= 2 * n_features + 1


# ---------------------------------------------------------------------------
# finite-difference oracle
# ---------------------------------------------------------------------------

def finite_difference_jacobian(model: NetworkModel, point: ParameterPoint,
                               step: float = 1e-5,
                               state_cap: int | None = None) -> Jacobian:
    """Central-difference Jacobian, the independent check on the dual path.

    Requires the point to sit at least ``2 * step`` away from every
    constraint boundary (simplex faces, zero variances).
    """
    require_valid(model)
    if step <= 0:
        raise ValueError("step must be positive")
    base = [float(v) for v in parameter_vector(model, point)]
    _check_interior(model, base, step)

    cols = parameter_labels(model)
    rows = observable_labels(model)
    values = evaluate_observables(model, base, state_cap)
    columns = []
    for t in range(len(base)):
        bumped = list(base)
        bumped[t] = base[t] + step
        upper = evaluate_observables(model, bumped, state_cap)
        bumped[t] = base[t] - step
        lower = evaluate_observables(model, bumped, state_cap)
        columns.append([(u - l) / (2.0 * step) for u, l in zip(upper, lower)])
    entries = tuple(tuple(columns[t][r] for t in range(len(base))) for r in range(len(rows)))
    return Jacobian(entries=entries, row_labels=rows, col_labels=cols,
                    values=tuple(float(v) for v in values))


def _check_interior(model: NetworkModel, values: list[float], step: float) -> None:
    margin = 2.0 * step
    pos = 0
    if model.family == DISCRETE:
        for i in range(model.n):
            r = model.cardinality(i)
            for _ in range(model.parent_state_count(i)):
                free = values[pos: pos + r - 1]
                pos += r - 1
                remainder = 1.0 - sum(free)
                if min(min(free), remainder) < margin or max(free) > 1.0 - margin:
                    raise ValueError("point too close to the simplex boundary for this step")
    elif model.family == LINEAR_GAUSSIAN:
        for i in range(model.n):
            variance = values[pos + 1]
            if variance < margin:
                raise ValueError("variance too close to zero for this step")
            pos += 2 + len(model.parents[i])
