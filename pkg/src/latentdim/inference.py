"""Datasets, sufficient statistics, likelihoods, EM, and forward sampling.

Inference over the finite-state families is exact: observed-data
likelihoods and posteriors are computed by enumerating the completions of
each case's missing variables.  Identical observed patterns are grouped, so
cost scales with the number of distinct patterns rather than cases.
"""

from __future__ import annotations

import csv
import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .network import (
    DISCRETE,
    SIGMOID,
    NetworkModel,
    ParameterPoint,
    StateIndexer,
    require_valid,
    require_valid_point,
    sample_parameters,
)
from .observable import _factors_from_point

MISSING_TOKEN = "?"


@dataclass(frozen=True)
class Dataset:
    """An ordered list of cases; ``None`` marks a missing value.

    ``variables`` names the columns.  Hidden variables may be absent as
    columns entirely; alignment against a model treats absent columns as
    all-missing.  ``model_fingerprint`` is set when the data was generated
    from a model and is checked on use.
    """

    variables: tuple[str, ...]
    rows: tuple[tuple[int | None, ...], ...]
    model_fingerprint: str | None = None

    @property
    def n_cases(self) -> int:
        return len(self.rows)


def save_csv(data: Dataset, path, header_comment: str | None = None) -> None:
    """Write a dataset as CSV with ``?`` for missing values."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header_comment is not None:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(data.variables)
        for row in data.rows:
            writer.writerow([MISSING_TOKEN if x is None else x for x in row])


def load_csv(path) -> Dataset:
    """Read a dataset written by :func:`save_csv`; ``#`` lines are skipped."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("empty dataset file") from None
    rows = []
    for record in reader:
        if not record:
            continue
        if len(record) != len(header):
            raise ValueError(f"row {record!r} does not match header width {len(header)}")
        rows.append(tuple(None if x == MISSING_TOKEN else int(x) for x in record))
    return Dataset(variables=tuple(header), rows=tuple(rows))


@dataclass(frozen=True)
class SufficientStatistics:
    """Counts per (variable, parent state, child state), possibly fractional.

    ``counts[i]`` has shape ``(q_i, r_i)``; expected statistics produced by a
    posterior over hidden variables have fractional entries but conserve the
    case count per variable.
    """

    counts: tuple[np.ndarray, ...]
    n_cases: float

    def n_ij(self, i: int) -> np.ndarray:
        return self.counts[i].sum(axis=1)

    def total(self, i: int) -> float:
        return float(self.counts[i].sum())


# ---------------------------------------------------------------------------
# alignment and patterns
# ---------------------------------------------------------------------------

def aligned_rows(data: Dataset, model: NetworkModel) -> list[tuple[int | None, ...]]:
    """Rows reordered to the model's variable order; validates compatibility.

    Columns absent from the data become all-missing; hidden model variables
    must not carry values; states must respect the declared cardinalities.
    """
    require_valid(model)
    names = model.names()
    unknown = set(data.variables) - set(names)
    if unknown:
        raise ValueError(f"dataset columns {sorted(unknown)} are not model variables")
    if data.model_fingerprint is not None and data.model_fingerprint != model.fingerprint():
        raise ValueError("dataset was generated for a different model")
    column = {name: data.variables.index(name) if name in data.variables else None
              for name in names}
    out = []
    for row in data.rows:
        aligned = tuple(row[column[name]] if column[name] is not None else None for name in names)
        out.append(aligned)
    for i, var in enumerate(model.variables):
        card = model.cardinality(i)
        for row in out:
            x = row[i]
            if x is None:
                continue
            if var.hidden:
                raise ValueError(f"hidden variable {var.name!r} carries observed values")
            if not 0 <= x < card:
                raise ValueError(f"state {x} out of range for {var.name!r}")
    return out


def _pattern_counts(data: Dataset, model: NetworkModel) -> Counter:
    return Counter(aligned_rows(data, model))


def _float_factors(model: NetworkModel, point: ParameterPoint) -> list[list[list[float]]]:
    factors = _factors_from_point(model, point)
    return [[[float(x) for x in row] for row in rows] for rows in factors]


def _parent_indexers(model: NetworkModel) -> list[StateIndexer | None]:
    out: list[StateIndexer | None] = []
    for i in range(model.n):
        cards = model.parent_cardinalities(i)
        out.append(StateIndexer(cards) if cards else None)
    return out


def _completions(model: NetworkModel, pattern: tuple[int | None, ...]) -> Iterable[tuple[int, ...]]:
    """All full configurations consistent with an observed pattern."""
    missing = [i for i, x in enumerate(pattern) if x is None]
    if not missing:
        yield tuple(pattern)  # type: ignore[misc]
        return
    for cfg in StateIndexer([model.cardinality(i) for i in missing]):
        full = list(pattern)
        for pos, i in enumerate(missing):
            full[i] = cfg[pos]
        yield tuple(full)


def _config_prob(model: NetworkModel, factors, parent_indexers, config: tuple[int, ...]) -> float:
    p = 1.0
    for i in range(model.n):
        indexer = parent_indexers[i]
        j = indexer.index_of(tuple(config[q] for q in model.parents[i])) if indexer else 0
        p *= factors[i][j][config[i]]
    return p


# ---------------------------------------------------------------------------
# counting and likelihood
# ---------------------------------------------------------------------------

def _empty_counts(model: NetworkModel) -> list[np.ndarray]:
    return [np.zeros((model.parent_state_count(i), model.cardinality(i)))
            for i in range(model.n)]


def complete_counts(data: Dataset, model: NetworkModel) -> SufficientStatistics:
    """Integer tabulation of a complete dataset."""
    counts = _empty_counts(model)
    indexers = _parent_indexers(model)
    for row in aligned_rows(data, model):
        if any(x is None for x in row):
            raise ValueError("complete_counts requires complete data")
        for i in range(model.n):
            indexer = indexers[i]
            j = indexer.index_of(tuple(row[q] for q in model.parents[i])) if indexer else 0
            counts[i][j, row[i]] += 1
    return SufficientStatistics(counts=tuple(counts), n_cases=float(data.n_cases))


def loglik(data: Dataset, model: NetworkModel, point: ParameterPoint) -> float:
    """Observed-data log likelihood, marginalizing missing values by enumeration.

    A zero-probability observed case yields ``-inf`` (the sentinel for an
    impossible dataset under the point).
    """
    require_valid_point(model, point)
    if model.family not in (DISCRETE, SIGMOID):
        raise ValueError("loglik applies to the finite-state families")
    factors = _float_factors(model, point)
    indexers = _parent_indexers(model)
    total = 0.0
    for pattern, count in _pattern_counts(data, model).items():
        p = 0.0
        for config in _completions(model, pattern):
            p += _config_prob(model, factors, indexers, config)
        if p <= 0.0:
            return float("-inf")
        total += count * math.log(p)
    return total


def expected_counts(data: Dataset, model: NetworkModel, point: ParameterPoint) -> SufficientStatistics:
    """Posterior-expected sufficient statistics; equals the tabulation on complete data."""
    require_valid_point(model, point)
    if model.family not in (DISCRETE, SIGMOID):
        raise ValueError("expected_counts applies to the finite-state families")
    factors = _float_factors(model, point)
    indexers = _parent_indexers(model)
    counts = _empty_counts(model)
    for pattern, count in _pattern_counts(data, model).items():
        support = [(config, _config_prob(model, factors, indexers, config))
                   for config in _completions(model, pattern)]
        total = sum(p for _, p in support)
        if total <= 0.0:
            raise ValueError("observed case has zero probability under the point")
        for config, p in support:
            weight = count * (p / total)
            if weight == 0.0:
                continue
            for i in range(model.n):
                indexer = indexers[i]
                j = indexer.index_of(tuple(config[q] for q in model.parents[i])) if indexer else 0
                counts[i][j, config[i]] += weight
    return SufficientStatistics(counts=tuple(counts), n_cases=float(data.n_cases))


def completed_statistics(data: Dataset, model: NetworkModel, point: ParameterPoint) -> SufficientStatistics:
    """Fractional completed-data statistics used by the completed-data scores."""
    return expected_counts(data, model, point)


def expected_complete_loglik(data: Dataset, model: NetworkModel, point: ParameterPoint) -> float:
    """Posterior-expected complete-data log likelihood at ``point``.

    Equal to ``sum_ijk E[N_ijk] * log(theta_ijk)``, accumulated per case so
    that it cancels the observed-data log likelihood exactly on complete
    data.
    """
    require_valid_point(model, point)
    factors = _float_factors(model, point)
    indexers = _parent_indexers(model)
    total = 0.0
    for pattern, count in _pattern_counts(data, model).items():
        support = [(config, _config_prob(model, factors, indexers, config))
                   for config in _completions(model, pattern)]
        norm = sum(p for _, p in support)
        if norm <= 0.0:
            raise ValueError("observed case has zero probability under the point")
        contribution = 0.0
        for _, p in support:
            if p > 0.0:
                contribution += (p / norm) * math.log(p)
        total += count * contribution
    return total


# ---------------------------------------------------------------------------
# EM
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RestartSummary:
    seed: int
    loglik: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class EMResult:
    point: ParameterPoint
    trace: tuple[float, ...]
    converged: bool
    zero_rows: tuple[tuple[int, int], ...]
    restarts: tuple[RestartSummary, ...]

    @property
    def loglik(self) -> float:
        return self.trace[-1]


def em_fit(data: Dataset, model: NetworkModel, restarts: int = 5, tol: float = 1e-8,
           max_iter: int = 500, seed: int = 0) -> EMResult:
    """Maximum-likelihood CPTs by EM, best of several random restarts.

    Each restart alternates posterior-expected counts with row
    normalization until the log-likelihood gain drops below ``tol`` or
    ``max_iter`` is hit.  A parent configuration with zero expected mass
    keeps its current row (so every step remains an ascent) and is flagged.
    """
    require_valid(model)
    if model.family != DISCRETE:
        raise ValueError("em_fit applies to the discrete family")
    rng = random.Random(seed)
    fingerprint = model.fingerprint()

    best: tuple[float, ParameterPoint, tuple[float, ...], bool, tuple] | None = None
    summaries = []
    for _ in range(max(1, restarts)):
        restart_seed = rng.randrange(2**63)
        start = sample_parameters(model, restart_seed)
        cpts = [np.array([[float(x) for x in row] for row in rows]) for rows in start.cpts]
        trace: list[float] = []
        zero_rows: set[tuple[int, int]] = set()
        converged = False
        current = _point_from_arrays(model, fingerprint, cpts)
        previous = loglik(data, model, current)
        trace.append(previous)
        for _ in range(max_iter):
            stats = expected_counts(data, model, current)
            for i in range(model.n):
                grid = stats.counts[i]
                row_mass = grid.sum(axis=1)
                for j in range(grid.shape[0]):
                    if row_mass[j] > 0.0:
                        cpts[i][j] = grid[j] / row_mass[j]
                    else:
                        zero_rows.add((i, j))
            current = _point_from_arrays(model, fingerprint, cpts)
            value = loglik(data, model, current)
            trace.append(value)
            if value - previous < tol:
                converged = True
                previous = value
                break
            previous = value
        summaries.append(RestartSummary(seed=restart_seed, loglik=trace[-1],
                                        iterations=len(trace) - 1, converged=converged))
        candidate = (trace[-1], current, tuple(trace), converged, tuple(sorted(zero_rows)))
        if best is None or candidate[0] > best[0]:
            best = candidate

    _, point, trace, converged, zero_rows = best
    return EMResult(point=point, trace=trace, converged=converged,
                    zero_rows=zero_rows, restarts=tuple(summaries))


def _point_from_arrays(model: NetworkModel, fingerprint: str, cpts: list[np.ndarray]) -> ParameterPoint:
    return ParameterPoint(
        family=DISCRETE,
        model_fingerprint=fingerprint,
        cpts=tuple(tuple(tuple(float(x) for x in row) for row in grid) for grid in cpts),
    )


# ---------------------------------------------------------------------------
# forward sampling
# ---------------------------------------------------------------------------

def sample_data(model: NetworkModel, point: ParameterPoint, n_cases: int, seed: int) -> Dataset:
    """Ancestral sampling; hidden variables are dropped from the output columns."""
    require_valid(model)
    require_valid_point(model, point)
    if model.family not in (DISCRETE, SIGMOID):
        raise ValueError("sample_data applies to the finite-state families")
    factors = _float_factors(model, point)
    indexers = _parent_indexers(model)
    order = model.topological_order()
    observed = model.observed_indices()
    rng = random.Random(seed)
    rows = []
    for _ in range(n_cases):
        config = [0] * model.n
        for i in order:
            indexer = indexers[i]
            j = indexer.index_of(tuple(config[q] for q in model.parents[i])) if indexer else 0
            u = rng.random()
            acc = 0.0
            state = model.cardinality(i) - 1
            for k, p in enumerate(factors[i][j]):
                acc += p
                if u < acc:
                    state = k
                    break
            config[i] = state
        rows.append(tuple(config[o] for o in observed))
    return Dataset(
        variables=tuple(model.variables[o].name for o in observed),
        rows=tuple(rows),
        model_fingerprint=model.fingerprint(),
    )
