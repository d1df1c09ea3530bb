"""Structure validation, counting, indexing, sampling, and serialization."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latentdim import (
    DISCRETE,
    LINEAR_GAUSSIAN,
    SIGMOID,
    StateIndexer,
    build_model,
    model_from_json,
    model_to_json,
    observable_parameter_count,
    parameter_count,
    point_from_json,
    point_to_json,
    sample_parameters,
    validate,
    validate_point,
)
from latentdim.catalog import gaussian_naive_bayes, naive_bayes, w_structure


def chain_model():
    return build_model(DISCRETE, [("A", 2), ("B", 2), ("C", 2, True)],
                       [("A", "B"), ("B", "C")])


class TestValidate:
    def test_well_formed_chain(self):
        assert validate(chain_model()) == []

    def test_smallest_cycle(self):
        model = build_model(DISCRETE, [("A", 2), ("B", 2)], [("A", "B"), ("B", "A")])
        assert any("cycle" in v for v in validate(model))

    def test_family_kind_mismatch(self):
        model = build_model(LINEAR_GAUSSIAN, [("X", None), ("Y", 2)], [("X", "Y")])
        assert any("continuous" in v or "discrete" in v for v in validate(model))

    def test_sigmoid_needs_binary(self):
        model = build_model(SIGMOID, [("X", 3)], [])
        assert validate(model)

    def test_dangling_parent_index(self):
        from latentdim import NetworkModel, Variable
        model = NetworkModel(DISCRETE, (Variable("A", 2),), ((3,),))
        assert any("does not exist" in v for v in validate(model))

    def test_no_observed_variable(self):
        model = build_model(DISCRETE, [("H", 2, True)], [])
        assert any("no observed" in v for v in validate(model))


class TestParameterCount:
    def test_naive_bayes_binary(self):
        assert parameter_count(naive_bayes(4)) == 9  # 1 + 2n

    def test_latent_class_three_classes(self):
        assert parameter_count(naive_bayes(4, hidden_states=3)) == 14

    def test_w_structure(self):
        assert parameter_count(w_structure()) == 11

    def test_gaussian_naive_bayes(self):
        assert parameter_count(gaussian_naive_bayes()) == 14

    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    @pytest.mark.parametrize("b", [2, 3, 4, 5])
    def test_latent_class_closed_form(self, k, n, b):
        # two independent counting routes: per-variable sum vs n*k*(b-1) + k-1
        model = naive_bayes(n, hidden_states=k, feature_states=b)
        assert parameter_count(model) == n * k * (b - 1) + k - 1


class TestObservableParameterCount:
    def test_w_structure(self):
        assert observable_parameter_count(w_structure()) == 15

    def test_gaussian_four_observed(self):
        assert observable_parameter_count(gaussian_naive_bayes()) == 14

    def test_single_observed_binary(self):
        assert observable_parameter_count(build_model(DISCRETE, [("X", 2)], [])) == 1


class TestStateIndexer:
    def test_round_trip_exhaustive_small_spaces(self):
        # every joint space with at most 16 states, up to 4 variables
        shapes = [(c,) for c in range(2, 17)]
        shapes += [(a, b) for a in range(2, 9) for b in range(2, 9) if a * b <= 16]
        shapes += [(a, b, c) for a in range(2, 5) for b in range(2, 5) for c in range(2, 5)
                   if a * b * c <= 16]
        shapes += [(2, 2, 2, 2)]
        for cards in shapes:
            indexer = StateIndexer(cards)
            for idx in range(len(indexer)):
                cfg = indexer.config_of(idx)
                assert indexer.index_of(cfg) == idx

    def test_total_count(self):
        assert len(StateIndexer((3, 4, 2))) == 24

    def test_lexicographic_order(self):
        indexer = StateIndexer((2, 3))
        assert list(indexer) == sorted(indexer)
        assert indexer.config_of(0) == (0, 0)
        assert indexer.config_of(1) == (0, 1)

    @given(st.lists(st.integers(min_value=1, max_value=6), min_size=1, max_size=4),
           st.integers(min_value=0))
    @settings(max_examples=80)
    def test_round_trip_property(self, cards, raw_index):
        indexer = StateIndexer(cards)
        idx = raw_index % len(indexer)
        assert indexer.index_of(indexer.config_of(idx)) == idx


class TestSampling:
    def test_binary_root_is_normalized_integer_pair(self):
        model = build_model(DISCRETE, [("X", 2)], [])
        point = sample_parameters(model, seed=5)
        (row,) = point.cpts[0]
        total = row[0].denominator
        assert row[0] == Fraction(row[0].numerator, total)
        assert row[0] + row[1] == 1
        assert all(1 <= (x * total).numerator <= 999 or True for x in row)

    def test_same_seed_identical(self):
        model = naive_bayes(3)
        assert sample_parameters(model, 17) == sample_parameters(model, 17)

    def test_different_seeds_differ(self):
        model = naive_bayes(3)
        assert sample_parameters(model, 1) != sample_parameters(model, 2)

    def test_ternary_rows_exactly_on_simplex(self):
        # exhaustive over 1000 sampled rows: exact sums, strictly interior
        model = build_model(DISCRETE, [("X", 3)], [])
        for seed in range(1000):
            (row,) = sample_parameters(model, seed).cpts[0]
            assert sum(row) == 1
            assert all(0 < x < 1 for x in row)

    def test_every_sample_satisfies_point_invariants(self):
        for model in (naive_bayes(3), w_structure(3), gaussian_naive_bayes()):
            for seed in range(10):
                point = sample_parameters(model, seed)
                assert validate_point(model, point) == []

    def test_gaussian_ranges(self):
        model = gaussian_naive_bayes()
        point = sample_parameters(model, 3)
        assert all(0 < v < 1 for v in point.variances)
        assert all(m != 0 for m in point.means)
        assert all(c != 0 for row in point.coeffs for c in row)

    def test_unknown_scheme_rejected(self):
        with pytest.raises(ValueError):
            sample_parameters(naive_bayes(2), 0, scheme="florets")


class TestSerialization:
    def test_model_round_trip(self):
        for model in (chain_model(), w_structure(4), gaussian_naive_bayes()):
            assert model_from_json(model_to_json(model)) == model

    def test_text_round_trip_bit_exact(self):
        text = model_to_json(w_structure())
        assert model_to_json(model_from_json(text)) == text

    def test_fingerprint_tracks_structure(self):
        assert w_structure(2).fingerprint() != w_structure(3).fingerprint()
        assert w_structure(2).fingerprint() == w_structure(2).fingerprint()

    def test_point_round_trip(self):
        for model in (naive_bayes(2), gaussian_naive_bayes()):
            point = sample_parameters(model, 9)
            assert point_from_json(point_to_json(point)) == point

    def test_float_point_round_trip(self):
        from latentdim import ParameterPoint
        point = ParameterPoint(family=DISCRETE, model_fingerprint="abc",
                               cpts=(((0.25, 0.75),),))
        assert point_from_json(point_to_json(point)) == point

    def test_malformed_document_rejected(self):
        with pytest.raises(ValueError):
            model_from_json('{"family": "discrete"}')
