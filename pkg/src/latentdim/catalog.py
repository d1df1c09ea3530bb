"""Built-in example networks with known effective dimensions.

These ship with the package so the ``reproduce`` command needs no input
files; each entry pairs a model with its expected parameter count and
effective dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

from .network import DISCRETE, LINEAR_GAUSSIAN, SIGMOID, NetworkModel, build_model


def naive_bayes(n_features: int, hidden_states: int = 2, feature_states: int = 2) -> NetworkModel:
    """A hidden class root with ``n_features`` conditionally independent leaves."""
    variables = [("H", hidden_states, True)]
    variables += [(f"X{i + 1}", feature_states) for i in range(n_features)]
    edges = [("H", f"X{i + 1}") for i in range(n_features)]
    return build_model(DISCRETE, variables, edges)


def w_structure(hidden_states: int = 2) -> NetworkModel:
    """Two observed roots, a hidden middle cause, two observed colliders:
    A -> C <- H -> D <- B."""
    variables = [("A", 2), ("B", 2), ("H", hidden_states, True), ("C", 2), ("D", 2)]
    edges = [("A", "C"), ("H", "C"), ("H", "D"), ("B", "D")]
    return build_model(DISCRETE, variables, edges)


def gaussian_naive_bayes(n_features: int = 4) -> NetworkModel:
    variables = [("H", None, True)]
    variables += [(f"X{i + 1}", None) for i in range(n_features)]
    edges = [("H", f"X{i + 1}") for i in range(n_features)]
    return build_model(LINEAR_GAUSSIAN, variables, edges)


def gaussian_w_structure() -> NetworkModel:
    variables = [("A", None), ("B", None), ("H", None, True), ("C", None), ("D", None)]
    edges = [("A", "C"), ("H", "C"), ("H", "D"), ("B", "D")]
    return build_model(LINEAR_GAUSSIAN, variables, edges)


def sigmoid_two_level() -> NetworkModel:
    """Two hidden units fully connected to four observed units (14 parameters)."""
    variables = [("M1", 2, True), ("M2", 2, True)]
    variables += [(f"X{i + 1}", 2) for i in range(4)]
    edges = [(m, f"X{i + 1}") for i in range(4) for m in ("M1", "M2")]
    return build_model(SIGMOID, variables, edges)


def sigmoid_three_level() -> NetworkModel:
    """The two-level network plus a single hidden top unit driving both
    middle units (17 parameters); collapsing the top unit into an arc
    between the middle units would need only 15."""
    variables = [("T", 2, True), ("M1", 2, True), ("M2", 2, True)]
    variables += [(f"X{i + 1}", 2) for i in range(4)]
    edges = [("T", "M1"), ("T", "M2")]
    edges += [(m, f"X{i + 1}") for i in range(4) for m in ("M1", "M2")]
    return build_model(SIGMOID, variables, edges)


@dataclass(frozen=True)
class CatalogEntry:
    table: str
    name: str
    model: NetworkModel
    expected_d: int
    expected_d_prime: int


def dimension_table() -> tuple[CatalogEntry, ...]:
    """Every built-in model with its expected (d', d)."""
    entries = []
    nb_expected = {1: 1, 2: 3, 3: 7, 4: 9, 5: 11, 6: 13, 7: 15}
    for n, d in nb_expected.items():
        entries.append(CatalogEntry("dims", f"naive-bayes-{n}", naive_bayes(n), d, 2 * n + 1))
    for h, d in {2: 9, 3: 10, 4: 10, 5: 11}.items():
        entries.append(CatalogEntry("dims", f"w-structure-h{h}", w_structure(h), d, 5 * h + 1))
    entries.append(CatalogEntry("autoclass", "latent-class-k3-n4",
                                naive_bayes(4, hidden_states=3), 13, 14))
    entries.append(CatalogEntry("gaussian", "gaussian-naive-bayes", gaussian_naive_bayes(), 12, 14))
    entries.append(CatalogEntry("gaussian", "gaussian-w-structure", gaussian_w_structure(), 12, 14))
    entries.append(CatalogEntry("sigmoid", "sigmoid-two-level", sigmoid_two_level(), 14, 14))
    entries.append(CatalogEntry("sigmoid", "sigmoid-three-level", sigmoid_three_level(), 15, 17))
    return tuple(entries)


TABLES = ("dims", "autoclass", "gaussian", "sigmoid")

BUILTIN_MODELS = {
    "naive-bayes-2": lambda: naive_bayes(2),
    "naive-bayes-4": lambda: naive_bayes(4),
    "naive-bayes-7": lambda: naive_bayes(7),
    "w-structure": w_structure,
    "latent-class-k3-n4": lambda: naive_bayes(4, hidden_states=3),
    "gaussian-naive-bayes": gaussian_naive_bayes,
    "gaussian-w-structure": gaussian_w_structure,
    "sigmoid-two-level": sigmoid_two_level,
    "sigmoid-three-level": sigmoid_three_level,
}
