"""Network structures, parameter spaces, state indexing, and parameter sampling.

Three parametric families are supported:

* ``discrete``        -- every variable is finite-state with a conditional
                         probability table (CPT) per parent configuration.
* ``linear-gaussian`` -- every variable is continuous; each local model is a
                         linear regression on the parents with its own mean,
                         coefficients, and residual variance.
* ``sigmoid``         -- every variable is binary; the probability of state 1
                         is a logistic function of a weighted parent sum.

Parent configurations are indexed lexicographically over the parents in
declaration order, with the first declared parent most significant.  All
types are immutable values; operations are pure functions of their inputs
plus an explicit seed.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

DISCRETE = "discrete"
LINEAR_GAUSSIAN = "linear-gaussian"
SIGMOID = "sigmoid"
FAMILIES = (DISCRETE, LINEAR_GAUSSIAN, SIGMOID)

SAMPLING_SCHEME = "rational-grid"

Scalar = Fraction | float


@dataclass(frozen=True)
class Variable:
    """A network variable: discrete with ``states`` >= 2, or continuous (``states=None``)."""

    name: str
    states: int | None = 2
    hidden: bool = False

    @property
    def is_discrete(self) -> bool:
        return self.states is not None


@dataclass(frozen=True)
class NetworkModel:
    """A directed network over an ordered list of variables.

    ``parents[i]`` holds the parent indices of variable ``i`` in a fixed
    order.  That order determines parent-state indexing (see module
    docstring) and, for the regression families, the order of the
    per-parent coefficients.
    """

    family: str
    variables: tuple[Variable, ...]
    parents: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.parents) != len(self.variables):
            raise ValueError("parents list must align with variables")

    @property
    def n(self) -> int:
        return len(self.variables)

    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def index_of(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise KeyError(name)

    def cardinality(self, i: int) -> int:
        states = self.variables[i].states
        if states is None:
            raise ValueError(f"variable {self.variables[i].name!r} is continuous")
        return states

    def parent_cardinalities(self, i: int) -> tuple[int, ...]:
        return tuple(self.cardinality(p) for p in self.parents[i])

    def parent_state_count(self, i: int) -> int:
        """Number of joint parent configurations q_i (1 for a root)."""
        count = 1
        for c in self.parent_cardinalities(i):
            count *= c
        return count

    def observed_indices(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.variables) if not v.hidden)

    def hidden_indices(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.variables) if v.hidden)

    def topological_order(self) -> tuple[int, ...]:
        """Variable indices ordered parents-first; raises on a cycle."""
        indegree = [len(ps) for ps in self.parents]
        children: list[list[int]] = [[] for _ in range(self.n)]
        for child, ps in enumerate(self.parents):
            for p in ps:
                children[p].append(child)
        ready = [i for i, d in enumerate(indegree) if d == 0]
        order: list[int] = []
        while ready:
            i = ready.pop(0)
            order.append(i)
            for c in children[i]:
                indegree[c] -= 1
                if indegree[c] == 0:
                    ready.append(c)
        if len(order) != self.n:
            raise ValueError("parent relation contains a cycle")
        return tuple(order)

    def fingerprint(self) -> str:
        """Short structural digest used to tie parameters, data, and reports to a model."""
        digest = hashlib.sha256(model_to_json(self).encode("utf-8")).hexdigest()
        return digest[:16]


class StateIndexer:
    """Bijection between flat indices and joint configurations of discrete variables.

    Configurations are tuples of state indices; the flat order is
    lexicographic with the first variable most significant.
    """

    def __init__(self, cards: Sequence[int]):
        self.cards = tuple(int(c) for c in cards)
        if any(c < 1 for c in self.cards):
            raise ValueError("cardinalities must be positive")
        strides = []
        acc = 1
        for c in reversed(self.cards):
            strides.append(acc)
            acc *= c
        self._strides = tuple(reversed(strides))
        self._size = acc

    def __len__(self) -> int:
        return self._size

    def index_of(self, config: Sequence[int]) -> int:
        idx = 0
        for value, card, stride in zip(config, self.cards, self._strides):
            if not 0 <= value < card:
                raise ValueError(f"state {value} out of range for cardinality {card}")
            idx += value * stride
        return idx

    def config_of(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self._size:
            raise ValueError(f"index {index} out of range")
        config = []
        for stride, card in zip(self._strides, self.cards):
            config.append((index // stride) % card)
        return tuple(config)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for i in range(self._size):
            yield self.config_of(i)


@dataclass(frozen=True)
class ParameterPoint:
    """One concrete parameter assignment for a :class:`NetworkModel`.

    Exactly one of the per-family payloads is populated:

    * discrete: ``cpts[i][j][k]`` = P(X_i = k | parents in state j)
    * linear-gaussian: ``means[i]``, ``variances[i]``, ``coeffs[i]`` (per parent)
    * sigmoid: ``biases[i]``, ``coeffs[i]`` (per parent)

    Entries are Fractions (exact) or floats; sampled points are always exact.
    """

    family: str
    model_fingerprint: str
    cpts: tuple[tuple[tuple[Scalar, ...], ...], ...] | None = None
    means: tuple[Scalar, ...] | None = None
    variances: tuple[Scalar, ...] | None = None
    biases: tuple[Scalar, ...] | None = None
    coeffs: tuple[tuple[Scalar, ...], ...] | None = None


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate(model: NetworkModel) -> list[str]:
    """Check structural invariants; returns a list of violations (empty = ok)."""
    violations: list[str] = []
    if model.family not in FAMILIES:
        violations.append(f"unknown family {model.family!r}")
        return violations

    names = [v.name for v in model.variables]
    if len(set(names)) != len(names):
        violations.append("variable names are not unique")
    if not names:
        violations.append("model has no variables")

    for i, v in enumerate(model.variables):
        if v.is_discrete and v.states < 2:
            violations.append(f"variable {v.name!r} needs at least 2 states")
        if model.family == DISCRETE and not v.is_discrete:
            violations.append(f"family {DISCRETE!r} requires discrete variables, {v.name!r} is continuous")
        if model.family == SIGMOID and (not v.is_discrete or v.states != 2):
            violations.append(f"family {SIGMOID!r} requires binary variables, {v.name!r} is not")
        if model.family == LINEAR_GAUSSIAN and v.is_discrete:
            violations.append(f"family {LINEAR_GAUSSIAN!r} requires continuous variables, {v.name!r} is discrete")

    for child, ps in enumerate(model.parents):
        for p in ps:
            if not 0 <= p < model.n:
                violations.append(f"variable index {p} (parent of {names[child]!r}) does not exist")
            elif p == child:
                violations.append(f"variable {names[child]!r} is its own parent")
        in_range = [p for p in ps if 0 <= p < model.n]
        if len(set(in_range)) != len(in_range):
            violations.append(f"variable {names[child]!r} has duplicate parents")

    if not any(not v.hidden for v in model.variables):
        violations.append("model has no observed variable")

    if not any(v.startswith("variable index") for v in violations):
        try:
            model.topological_order()
        except ValueError:
            violations.append("parent relation contains a cycle")

    return violations


def require_valid(model: NetworkModel) -> None:
    violations = validate(model)
    if violations:
        raise ValueError("invalid model: " + "; ".join(violations))


def validate_point(model: NetworkModel, point: ParameterPoint) -> list[str]:
    """Check a parameter point against its model's invariants."""
    violations: list[str] = []
    if point.family != model.family:
        violations.append(f"point family {point.family!r} != model family {model.family!r}")
        return violations
    if point.model_fingerprint != model.fingerprint():
        violations.append("point fingerprint does not match model")

    def in_unit_interval(x) -> bool:
        return 0 < x < 1

    if model.family == DISCRETE:
        if point.cpts is None or len(point.cpts) != model.n:
            violations.append("missing or misshaped CPTs")
            return violations
        for i in range(model.n):
            q, r = model.parent_state_count(i), model.cardinality(i)
            rows = point.cpts[i]
            if len(rows) != q or any(len(row) != r for row in rows):
                violations.append(f"CPT shape mismatch for variable {model.variables[i].name!r}")
                continue
            for j, row in enumerate(rows):
                if not all(in_unit_interval(x) for x in row):
                    violations.append(f"CPT row ({i},{j}) has entries outside (0,1)")
                total = sum(row)
                exact = all(isinstance(x, (Fraction, int)) for x in row)
                if exact and total != 1:
                    violations.append(f"CPT row ({i},{j}) does not sum to 1")
                elif not exact and abs(float(total) - 1.0) > 1e-9:
                    violations.append(f"CPT row ({i},{j}) does not sum to 1")
    elif model.family == LINEAR_GAUSSIAN:
        if point.means is None or point.variances is None or point.coeffs is None:
            violations.append("missing regression parameters")
            return violations
        if len(point.means) != model.n or len(point.variances) != model.n:
            violations.append("regression parameter shape mismatch")
        for i, v in enumerate(point.variances):
            if not v > 0:
                violations.append(f"variance of {model.variables[i].name!r} is not positive")
        for i, row in enumerate(point.coeffs):
            if len(row) != len(model.parents[i]):
                violations.append(f"coefficient count mismatch for {model.variables[i].name!r}")
    elif model.family == SIGMOID:
        if point.biases is None or point.coeffs is None:
            violations.append("missing sigmoid parameters")
            return violations
        if len(point.biases) != model.n:
            violations.append("bias count mismatch")
        for i, row in enumerate(point.coeffs):
            if len(row) != len(model.parents[i]):
                violations.append(f"coefficient count mismatch for {model.variables[i].name!r}")
    return violations


def require_valid_point(model: NetworkModel, point: ParameterPoint) -> None:
    violations = validate_point(model, point)
    if violations:
        raise ValueError("invalid parameter point: " + "; ".join(violations))


# ---------------------------------------------------------------------------
# parameter counting
# ---------------------------------------------------------------------------

def parameter_count(model: NetworkModel) -> int:
    """Number of free network parameters d'."""
    require_valid(model)
    if model.family == DISCRETE:
        return sum((model.cardinality(i) - 1) * model.parent_state_count(i) for i in range(model.n))
    if model.family == LINEAR_GAUSSIAN:
        return sum(2 + len(model.parents[i]) for i in range(model.n))
    return sum(1 + len(model.parents[i]) for i in range(model.n))


def observable_parameter_count(model: NetworkModel) -> int:
    """Degrees of freedom of the distribution over the observed variables."""
    require_valid(model)
    observed = model.observed_indices()
    if model.family == LINEAR_GAUSSIAN:
        m = len(observed)
        return m * (m + 3) // 2
    size = 1
    for o in observed:
        size *= model.cardinality(o)
    return size - 1


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _signed_grid(rng: random.Random, top: int) -> Fraction:
    """Uniform over +-{1..top}/1000, zero excluded; magnitude drawn before sign."""
    magnitude = rng.randint(1, top)
    sign = rng.choice((1, -1))
    return Fraction(sign * magnitude, 1000)


def sample_parameters(model: NetworkModel, seed: int, scheme: str = SAMPLING_SCHEME) -> ParameterPoint:
    """Draw a random interior parameter point, deterministically per seed.

    The single built-in scheme samples every quantity from a rational grid:
    CPT rows are integer weights 1..999 normalized by their sum (so rows sum
    to exactly 1 and stay strictly inside the simplex); means and
    coefficients are +-{1..999}/1000; variances are {1..999}/1000; sigmoid
    biases and coefficients are +-{1..1999}/1000.
    """
    require_valid(model)
    if scheme != SAMPLING_SCHEME:
        raise ValueError(f"unknown sampling scheme {scheme!r}")
    rng = random.Random(seed)
    fp = model.fingerprint()

    if model.family == DISCRETE:
        cpts = []
        for i in range(model.n):
            r = model.cardinality(i)
            rows = []
            for _ in range(model.parent_state_count(i)):
                weights = [rng.randint(1, 999) for _ in range(r)]
                total = sum(weights)
                rows.append(tuple(Fraction(w, total) for w in weights))
            cpts.append(tuple(rows))
        return ParameterPoint(family=DISCRETE, model_fingerprint=fp, cpts=tuple(cpts))

    if model.family == LINEAR_GAUSSIAN:
        means, variances, coeffs = [], [], []
        for i in range(model.n):
            means.append(_signed_grid(rng, 999))
            variances.append(Fraction(rng.randint(1, 999), 1000))
            coeffs.append(tuple(_signed_grid(rng, 999) for _ in model.parents[i]))
        return ParameterPoint(
            family=LINEAR_GAUSSIAN, model_fingerprint=fp,
            means=tuple(means), variances=tuple(variances), coeffs=tuple(coeffs),
        )

    biases, coeffs = [], []
    for i in range(model.n):
        biases.append(_signed_grid(rng, 1999))
        coeffs.append(tuple(_signed_grid(rng, 1999) for _ in model.parents[i]))
    return ParameterPoint(family=SIGMOID, model_fingerprint=fp, biases=tuple(biases), coeffs=tuple(coeffs))


# ---------------------------------------------------------------------------
# model construction and JSON round-trip
# ---------------------------------------------------------------------------

def build_model(family: str, variables: Sequence[tuple], edges: Sequence[tuple[str, str]]) -> NetworkModel:
    """Assemble a model from name-based specs.

    ``variables`` holds ``(name, states_or_None)`` or ``(name, states_or_None,
    hidden)`` tuples; ``edges`` holds ``(parent_name, child_name)`` pairs.
    Parent order per child follows edge order.
    """
    var_objs = []
    for spec in variables:
        name, states = spec[0], spec[1]
        hidden = bool(spec[2]) if len(spec) > 2 else False
        var_objs.append(Variable(name=name, states=states, hidden=hidden))
    index = {v.name: i for i, v in enumerate(var_objs)}
    parents: list[list[int]] = [[] for _ in var_objs]
    for parent_name, child_name in edges:
        if parent_name not in index or child_name not in index:
            raise ValueError(f"edge ({parent_name!r}, {child_name!r}) names an unknown variable")
        parents[index[child_name]].append(index[parent_name])
    return NetworkModel(
        family=family,
        variables=tuple(var_objs),
        parents=tuple(tuple(ps) for ps in parents),
    )


def model_to_json(model: NetworkModel) -> str:
    """Canonical JSON text for a model; load/save round-trips bit-exactly."""
    variables = []
    for v in model.variables:
        entry: dict = {"name": v.name}
        if v.is_discrete:
            entry["states"] = v.states
        else:
            entry["continuous"] = True
        entry["hidden"] = v.hidden
        variables.append(entry)
    edges = []
    for child, ps in enumerate(model.parents):
        for p in ps:
            edges.append([model.variables[p].name, model.variables[child].name])
    doc = {"family": model.family, "variables": variables, "edges": edges}
    return json.dumps(doc, indent=2) + "\n"


def model_from_json(text: str) -> NetworkModel:
    doc = json.loads(text)
    try:
        family = doc["family"]
        var_specs = []
        for entry in doc["variables"]:
            if entry.get("continuous"):
                states = None
            else:
                states = int(entry["states"])
            var_specs.append((entry["name"], states, bool(entry.get("hidden", False))))
        edges = [(e[0], e[1]) for e in doc["edges"]]
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed model document: {exc}") from exc
    return build_model(family, var_specs, edges)


def save_model(model: NetworkModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(model))


def load_model(path) -> NetworkModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(fh.read())


# ---------------------------------------------------------------------------
# parameter-point JSON round-trip
# ---------------------------------------------------------------------------

def _scalar_to_json(x: Scalar):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return x


def _scalar_from_json(x) -> Scalar:
    if isinstance(x, str):
        num, _, den = x.partition("/")
        return Fraction(int(num), int(den) if den else 1)
    if isinstance(x, int):
        return Fraction(x)
    return float(x)


def point_to_json(point: ParameterPoint) -> str:
    doc: dict = {"family": point.family, "model_fingerprint": point.model_fingerprint}
    if point.cpts is not None:
        doc["cpts"] = [[[_scalar_to_json(x) for x in row] for row in rows] for rows in point.cpts]
    if point.means is not None:
        doc["means"] = [_scalar_to_json(x) for x in point.means]
        doc["variances"] = [_scalar_to_json(x) for x in point.variances]
    if point.biases is not None:
        doc["biases"] = [_scalar_to_json(x) for x in point.biases]
    if point.coeffs is not None:
        doc["coeffs"] = [[_scalar_to_json(x) for x in row] for row in point.coeffs]
    return json.dumps(doc, indent=2) + "\n"


def point_from_json(text: str) -> ParameterPoint:
    doc = json.loads(text)
    kwargs: dict = {"family": doc["family"], "model_fingerprint": doc["model_fingerprint"]}
    if "cpts" in doc:
        kwargs["cpts"] = tuple(
            tuple(tuple(_scalar_from_json(x) for x in row) for row in rows) for rows in doc["cpts"]
        )
    if "means" in doc:
        kwargs["means"] = tuple(_scalar_from_json(x) for x in doc["means"])
        kwargs["variances"] = tuple(_scalar_from_json(x) for x in doc["variances"])
    if "biases" in doc:
        kwargs["biases"] = tuple(_scalar_from_json(x) for x in doc["biases"])
    if "coeffs" in doc:
        kwargs["coeffs"] = tuple(tuple(_scalar_from_json(x) for x in row) for row in doc["coeffs"])
    return ParameterPoint(**kwargs)


def save_point(point: ParameterPoint, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(point_to_json(point))


def load_point(path) -> ParameterPoint:
    with open(path, "r", encoding="utf-8") as fh:
        return point_from_json(fh.read())
