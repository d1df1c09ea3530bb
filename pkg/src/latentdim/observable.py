"""Maps from network parameters to observable-distribution parameters.

For the discrete and sigmoid families the observable parameters W form the
joint probability table over the observed variables, obtained by exact
enumeration over hidden configurations.  For the linear-gaussian family W is
the implied mean vector and covariance matrix of the observed variables,
obtained from the structural recursions (entries are polynomial in the
network parameters because the coefficient matrix is strictly triangular in
a topological order).

The Jacobian dW/dtheta is computed by evaluating the same map with
:class:`~latentdim.dual.Dual` coordinates, one seed per free parameter:

* discrete: the free coordinates of a CPT row are its first r-1 entries;
  the last entry is substituted as one minus their sum before
  differentiation.
* linear-gaussian: mean, variance, then per-parent coefficients, per
  variable.
* sigmoid: bias, then per-parent coefficients, per variable.

Free observable coordinates drop one reference cell from a joint table (the
all-last-state cell); gaussian moments are all free.  Everything here is a
pure function of immutable inputs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .dual import Dual, logistic, partials_of, value_of
from .network import (
    DISCRETE,
    LINEAR_GAUSSIAN,
    SIGMOID,
    NetworkModel,
    ParameterPoint,
    StateIndexer,
    require_valid,
    require_valid_point,
)

DEFAULT_STATE_CAP = 1 << 24
STATE_CAP_ENV = "LATENTDIM_STATE_CAP"


class StateSpaceCapError(RuntimeError):
    """Joint state space exceeds the configured cap."""


def _effective_cap(state_cap: int | None) -> int:
    if state_cap is not None:
        return state_cap
    return int(os.environ.get(STATE_CAP_ENV, DEFAULT_STATE_CAP))


@dataclass(frozen=True)
class JointTable:
    """Full joint probability table over the observed variables.

    ``probs`` is flat and lexicographic over ``cards`` (first variable most
    significant).  All cells are retained; the degrees of freedom are one
    fewer.
    """

    variables: tuple[str, ...]
    cards: tuple[int, ...]
    probs: tuple

    def indexer(self) -> StateIndexer:
        return StateIndexer(self.cards)

    def prob(self, config: Sequence[int]):
        return self.probs[self.indexer().index_of(config)]

    def total(self):
        return sum(self.probs)


@dataclass(frozen=True)
class GaussianMoments:
    """Implied mean vector and covariance matrix over the observed variables."""

    variables: tuple[str, ...]
    mean: tuple
    cov: tuple[tuple, ...]

    def covariance(self, i: int, j: int):
        return self.cov[i][j]


ObservableParameters = JointTable | GaussianMoments


# ---------------------------------------------------------------------------
# free coordinates
# ---------------------------------------------------------------------------

def parameter_labels(model: NetworkModel) -> tuple[tuple, ...]:
    """Free parameter coordinates in canonical order, grouped per variable."""
    labels: list[tuple] = []
    if model.family == DISCRETE:
        for i in range(model.n):
            name = model.variables[i].name
            r = model.cardinality(i)
            for j in range(model.parent_state_count(i)):
                for k in range(r - 1):
                    labels.append(("cpt", name, j, k))
    elif model.family == LINEAR_GAUSSIAN:
        for i in range(model.n):
            name = model.variables[i].name
            labels.append(("mean", name))
            labels.append(("var", name))
            for p in model.parents[i]:
                labels.append(("coeff", model.variables[p].name, name))
    else:
        for i in range(model.n):
            name = model.variables[i].name
            labels.append(("bias", name))
            for p in model.parents[i]:
                labels.append(("coeff", model.variables[p].name, name))
    return tuple(labels)


def parameter_vector(model: NetworkModel, point: ParameterPoint) -> list:
    """Values of the free coordinates, aligned with :func:`parameter_labels`."""
    values: list = []
    if model.family == DISCRETE:
        for i in range(model.n):
            r = model.cardinality(i)
            for j in range(model.parent_state_count(i)):
                values.extend(point.cpts[i][j][: r - 1])
    elif model.family == LINEAR_GAUSSIAN:
        for i in range(model.n):
            values.append(point.means[i])
            values.append(point.variances[i])
            values.extend(point.coeffs[i])
    else:
        for i in range(model.n):
            values.append(point.biases[i])
            values.extend(point.coeffs[i])
    return values


def observable_labels(model: NetworkModel) -> tuple[tuple, ...]:
    """Free observable coordinates, aligned with :func:`evaluate_observables`."""
    observed = model.observed_indices()
    names = tuple(model.variables[o].name for o in observed)
    if model.family == LINEAR_GAUSSIAN:
        labels = [("mean", name) for name in names]
        labels += [("var", name) for name in names]
        for a in range(len(names)):
            for b in range(a + 1, len(names)):
                labels.append(("cov", names[a], names[b]))
        return tuple(labels)
    cards = tuple(model.cardinality(o) for o in observed)
    indexer = StateIndexer(cards)
    reference = len(indexer) - 1  # all observed variables at their last state
    return tuple(("cell",) + cfg for idx, cfg in enumerate(indexer) if idx != reference)


# ---------------------------------------------------------------------------
# factor tables (generic over the scalar type)
# ---------------------------------------------------------------------------

def _factors_from_point(model: NetworkModel, point: ParameterPoint) -> list:
    """Per-variable rows of local factors, straight from the stored parameters."""
    if model.family == DISCRETE:
        return [list(rows) for rows in point.cpts]
    if model.family == SIGMOID:
        return _sigmoid_factors(model, [float(b) for b in point.biases],
                                [[float(c) for c in row] for row in point.coeffs])
    raise ValueError("factor tables exist only for finite-state families")


def _factors_from_coords(model: NetworkModel, values: Sequence) -> list:
    """Factor tables rebuilt from a free-coordinate vector.

    Discrete rows get their last entry substituted as one minus the sum of
    the free entries, which is what makes the coordinates free.
    """
    factors: list = []
    pos = 0
    if model.family == DISCRETE:
        for i in range(model.n):
            r = model.cardinality(i)
            rows = []
            for _ in range(model.parent_state_count(i)):
                free = list(values[pos: pos + r - 1])
                pos += r - 1
                last = 1 - sum(free)
                rows.append(free + [last])
            factors.append(rows)
        return factors
    if model.family == SIGMOID:
        biases, coeffs = [], []
        for i in range(model.n):
            biases.append(values[pos])
            pos += 1
            k = len(model.parents[i])
            coeffs.append(list(values[pos: pos + k]))
            pos += k
        return _sigmoid_factors(model, biases, coeffs)
    raise ValueError("factor tables exist only for finite-state families")


def _sigmoid_factors(model: NetworkModel, biases: Sequence, coeffs: Sequence) -> list:
    """Rows (P(x=0), P(x=1)) per parent configuration, logistic in the parent sum."""
    factors = []
    for i in range(model.n):
        cards = model.parent_cardinalities(i)
        rows = []
        for cfg in StateIndexer(cards) if cards else [()]:
            z = biases[i]
            for coeff, parent_value in zip(coeffs[i], cfg):
                if parent_value:
                    z = z + coeff
            s = logistic(z)
            rows.append([1 - s, s])
        factors.append(rows)
    return factors


# ---------------------------------------------------------------------------
# joint tables and moments
# ---------------------------------------------------------------------------

def _full_joint(model: NetworkModel, factors: list, state_cap: int | None) -> list:
    """Flat joint over all variables in declaration order, by sequential extension."""
    size = 1
    for i in range(model.n):
        size *= model.cardinality(i)
    cap = _effective_cap(state_cap)
    if size > cap:
        raise StateSpaceCapError(f"joint state space {size} exceeds cap {cap}")

    order = model.topological_order()
    placed: list[int] = []
    table = [1]
    for i in order:
        r = model.cardinality(i)
        parent_pos = [placed.index(p) for p in model.parents[i]]
        parent_cards = model.parent_cardinalities(i)
        old_indexer = StateIndexer([model.cardinality(v) for v in placed]) if placed else None
        parent_indexer = StateIndexer(parent_cards) if parent_cards else None
        extended = [None] * (len(table) * r)
        for idx, val in enumerate(table):
            if parent_indexer is not None:
                cfg = old_indexer.config_of(idx)
                j = parent_indexer.index_of(tuple(cfg[p] for p in parent_pos))
            else:
                j = 0
            row = factors[i][j]
            base = idx * r
            for k in range(r):
                extended[base + k] = val * row[k]
        table = extended
        placed.append(i)

    if placed == list(range(model.n)):
        return table
    # permute axes from topological order back to declaration order
    topo_indexer = StateIndexer([model.cardinality(v) for v in placed])
    decl_indexer = StateIndexer([model.cardinality(i) for i in range(model.n)])
    out = [None] * len(table)
    for idx, val in enumerate(table):
        cfg = topo_indexer.config_of(idx)
        decl_cfg = [0] * model.n
        for pos, var in enumerate(placed):
            decl_cfg[var] = cfg[pos]
        out[decl_indexer.index_of(decl_cfg)] = val
    return out


def _observed_marginal(model: NetworkModel, full_table: list) -> list:
    """Sum the full joint over hidden variables; observed declaration order."""
    observed = model.observed_indices()
    if len(observed) == model.n:
        return list(full_table)
    full_indexer = StateIndexer([model.cardinality(i) for i in range(model.n)])
    obs_indexer = StateIndexer([model.cardinality(o) for o in observed])
    out = [0] * len(obs_indexer)
    for idx, val in enumerate(full_table):
        cfg = full_indexer.config_of(idx)
        out[obs_indexer.index_of(tuple(cfg[o] for o in observed))] += val
    return out


def _implied_moments(model: NetworkModel, means: Sequence, variances: Sequence,
                     coeffs: Sequence) -> tuple[list, list]:
    """Full mean vector and covariance matrix from the structural recursions."""
    n = model.n
    mu = [0] * n
    cov = [[0] * n for _ in range(n)]
    order = model.topological_order()
    for i in order:
        mu[i] = means[i] + sum(c * mu[p] for c, p in zip(coeffs[i], model.parents[i]))
    done: list[int] = []
    for i in order:
        for l in done:
            c_il = sum(c * cov[p][l] for c, p in zip(coeffs[i], model.parents[i]))
            cov[i][l] = c_il
            cov[l][i] = c_il
        var = variances[i]
        for c1, p1 in zip(coeffs[i], model.parents[i]):
            for c2, p2 in zip(coeffs[i], model.parents[i]):
                var = var + c1 * c2 * cov[p1][p2]
        cov[i][i] = var
        done.append(i)
    return mu, cov


def _moments_from_coords(model: NetworkModel, values: Sequence) -> tuple[list, list]:
    means, variances, coeffs = [], [], []
    pos = 0
    for i in range(model.n):
        means.append(values[pos])
        variances.append(values[pos + 1])
        pos += 2
        k = len(model.parents[i])
        coeffs.append(list(values[pos: pos + k]))
        pos += k
    return _implied_moments(model, means, variances, coeffs)


# ---------------------------------------------------------------------------
# public maps
# ---------------------------------------------------------------------------

def discrete_joint(model: NetworkModel, point: ParameterPoint,
                   state_cap: int | None = None) -> JointTable:
    """Exact joint table over the observed variables of a discrete network."""
    require_valid(model)
    require_valid_point(model, point)
    if model.family != DISCRETE:
        raise ValueError("discrete_joint requires the discrete family")
    factors = _factors_from_point(model, point)
    probs = _observed_marginal(model, _full_joint(model, factors, state_cap))
    observed = model.observed_indices()
    return JointTable(
        variables=tuple(model.variables[o].name for o in observed),
        cards=tuple(model.cardinality(o) for o in observed),
        probs=tuple(probs),
    )


def sigmoid_joint(model: NetworkModel, point: ParameterPoint,
                  state_cap: int | None = None) -> JointTable:
    """Joint table over the observed variables of a sigmoid network (floats)."""
    require_valid(model)
    require_valid_point(model, point)
    if model.family != SIGMOID:
        raise ValueError("sigmoid_joint requires the sigmoid family")
    factors = _factors_from_point(model, point)
    probs = _observed_marginal(model, _full_joint(model, factors, state_cap))
    observed = model.observed_indices()
    return JointTable(
        variables=tuple(model.variables[o].name for o in observed),
        cards=tuple(model.cardinality(o) for o in observed),
        probs=tuple(probs),
    )


def gaussian_moments(model: NetworkModel, point: ParameterPoint) -> GaussianMoments:
    """Implied observed-variable moments of a linear-gaussian network."""
    require_valid(model)
    require_valid_point(model, point)
    if model.family != LINEAR_GAUSSIAN:
        raise ValueError("gaussian_moments requires the linear-gaussian family")
    mu, cov = _implied_moments(model, point.means, point.variances, point.coeffs)
    observed = model.observed_indices()
    return GaussianMoments(
        variables=tuple(model.variables[o].name for o in observed),
        mean=tuple(mu[o] for o in observed),
        cov=tuple(tuple(cov[a][b] for b in observed) for a in observed),
    )


def evaluate_observables(model: NetworkModel, values: Sequence,
                         state_cap: int | None = None) -> list:
    """Free observable coordinates as a function of the free parameter vector.

    Generic over the scalar type of ``values`` (Fractions, floats, or Duals);
    this single code path backs the public maps, the dual-number Jacobian,
    and the finite-difference oracle.
    """
    if model.family == LINEAR_GAUSSIAN:
        mu, cov = _moments_from_coords(model, values)
        observed = model.observed_indices()
        out = [mu[o] for o in observed]
        out += [cov[o][o] for o in observed]
        for a in range(len(observed)):
            for b in range(a + 1, len(observed)):
                out.append(cov[observed[a]][observed[b]])
        return out
    factors = _factors_from_coords(model, values)
    probs = _observed_marginal(model, _full_joint(model, factors, state_cap))
    return probs[:-1]  # drop the all-last-state reference cell


# ---------------------------------------------------------------------------
# Jacobian
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Jacobian:
    """Matrix of partial derivatives of the observable coordinates.

    ``entries[r][c]`` is the derivative of observable coordinate
    ``row_labels[r]`` with respect to parameter ``col_labels[c]``; ``values``
    holds the observable coordinates themselves at the evaluation point.
    """

    entries: tuple[tuple, ...]
    row_labels: tuple[tuple, ...]
    col_labels: tuple[tuple, ...]
    values: tuple

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.entries), len(self.col_labels))

    def entry(self, row_label: tuple, col_label: tuple):
        return self.entries[self.row_labels.index(row_label)][self.col_labels.index(col_label)]

    def render(self) -> str:
        """Plain-text dump with exact rational rendering where applicable."""
        lines = ["columns: " + "  ".join(map(str, self.col_labels))]
        for label, row in zip(self.row_labels, self.entries):
            lines.append(f"{label}: " + "  ".join(str(x) for x in row))
        return "\n".join(lines)


def jacobian(model: NetworkModel, point: ParameterPoint,
             state_cap: int | None = None) -> Jacobian:
    """Jacobian of the parameter-to-observable map at ``point``.

    Computed by forward-mode dual numbers: exact rational entries for the
    discrete and linear-gaussian families, floats for sigmoid.
    """
    require_valid(model)
    require_valid_point(model, point)
    cols = parameter_labels(model)
    rows = observable_labels(model)
    base = parameter_vector(model, point)
    if model.family == SIGMOID:
        base = [float(v) for v in base]
    width = len(cols)
    seeds = [Dual.variable(v, t, width) for t, v in enumerate(base)]
    outputs = evaluate_observables(model, seeds, state_cap)
    entries = tuple(partials_of(o, width) for o in outputs)
    values = tuple(value_of(o) for o in outputs)
    return Jacobian(entries=entries, row_labels=rows, col_labels=cols, values=values)
