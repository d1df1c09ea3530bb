"""Parameter-to-observable maps checked against independent enumeration oracles."""

import math
from fractions import Fraction

import pytest

from latentdim import (
    DISCRETE,
    StateIndexer,
    StateSpaceCapError,
    build_model,
    discrete_joint,
    gaussian_moments,
    jacobian,
    sample_parameters,
    sigmoid_joint,
)
from latentdim.catalog import (
    gaussian_naive_bayes,
    gaussian_w_structure,
    naive_bayes,
    sigmoid_two_level,
    w_structure,
)
from latentdim.dual import Dual
from latentdim.network import ParameterPoint
from latentdim.observable import (
    _factors_from_coords,
    _full_joint,
    _observed_marginal,
    evaluate_observables,
    observable_labels,
    parameter_labels,
    parameter_vector,
)


# ---------------------------------------------------------------------------
# oracles (kept deliberately naive and independent of the library internals)
# ---------------------------------------------------------------------------

def joint_oracle(model, point):
    """Per-cell brute force: for every observed config, sum over hidden
    configs the product of CPT lookups, one factor per variable."""
    observed = model.observed_indices()
    hidden = model.hidden_indices()
    obs_indexer = StateIndexer([model.cardinality(o) for o in observed])
    hid_indexer = StateIndexer([model.cardinality(h) for h in hidden]) if hidden else None
    cells = []
    for obs_cfg in obs_indexer:
        total = 0
        hidden_cfgs = list(hid_indexer) if hid_indexer else [()]
        for hid_cfg in hidden_cfgs:
            full = [None] * model.n
            for pos, o in enumerate(observed):
                full[o] = obs_cfg[pos]
            for pos, h in enumerate(hidden):
                full[h] = hid_cfg[pos]
            term = 1
            for i in range(model.n):
                ps = model.parents[i]
                if ps:
                    j = StateIndexer([model.cardinality(p) for p in ps]).index_of(
                        tuple(full[p] for p in ps))
                else:
                    j = 0
                term *= point.cpts[i][j][full[i]]
            total += term
        cells.append(total)
    return cells


def trek_oracle_cov(model, point, a, b):
    """Covariance by directed-path enumeration: sum over every source z of
    (path sums z->a) * (path sums z->b) * variance(z)."""
    def path_sums(src, dst):
        # sum over all directed paths src -> dst of the product of coefficients
        if src == dst:
            return Fraction(1)
        total = Fraction(0)
        for coeff, parent in zip(point.coeffs[dst], model.parents[dst]):
            total += coeff * path_sums(src, parent)
        return total

    total = Fraction(0)
    for z in range(model.n):
        total += path_sums(z, a) * path_sums(z, b) * point.variances[z]
    return total


def trek_oracle_mean(model, point, a):
    def mean(i):
        return point.means[i] + sum(c * mean(p) for c, p in zip(point.coeffs[i], model.parents[i]))
    return mean(a)


def hx_model():
    return build_model(DISCRETE, [("H", 2, True), ("X", 2)], [("H", "X")])


# ---------------------------------------------------------------------------
# discrete joints
# ---------------------------------------------------------------------------

class TestDiscreteJoint:
    def test_two_node_mixture_closed_form(self):
        model = hx_model()
        point = sample_parameters(model, 3)
        th = point.cpts[0][0][0]
        tx_h = point.cpts[1][0][0]
        tx_hbar = point.cpts[1][1][0]
        table = discrete_joint(model, point)
        assert table.prob((0,)) == th * tx_h + (1 - th) * tx_hbar
        assert table.total() == 1

    def test_fully_observed_chain_factorizes(self):
        model = build_model(DISCRETE, [("A", 2), ("B", 2)], [("A", "B")])
        point = sample_parameters(model, 8)
        table = discrete_joint(model, point)
        for a in range(2):
            for b in range(2):
                assert table.prob((a, b)) == point.cpts[0][0][a] * point.cpts[1][a][b]

    def test_two_feature_mixture_matches_term_enumeration(self):
        model = naive_bayes(2)
        point = ParameterPoint(
            family=DISCRETE, model_fingerprint=model.fingerprint(),
            cpts=(
                ((Fraction(2, 5), Fraction(3, 5)),),
                ((Fraction(1, 4), Fraction(3, 4)), (Fraction(1, 3), Fraction(2, 3))),
                ((Fraction(1, 7), Fraction(6, 7)), (Fraction(2, 9), Fraction(7, 9))),
            ),
        )
        table = discrete_joint(model, point)
        assert list(table.probs) == joint_oracle(model, point)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_oracle_on_latent_models(self, seed):
        for model in (naive_bayes(3), w_structure(3), naive_bayes(2, hidden_states=3)):
            point = sample_parameters(model, seed)
            assert list(discrete_joint(model, point).probs) == joint_oracle(model, point)

    def test_rational_tables_sum_exactly_to_one(self):
        for seed in range(10):
            model = w_structure(4)
            table = discrete_joint(model, sample_parameters(model, seed))
            assert table.total() == 1
            assert all(isinstance(p, Fraction) for p in table.probs)

    def test_state_cap_enforced(self):
        model = naive_bayes(4)
        point = sample_parameters(model, 0)
        with pytest.raises(StateSpaceCapError):
            discrete_joint(model, point, state_cap=16)


# ---------------------------------------------------------------------------
# gaussian moments
# ---------------------------------------------------------------------------

class TestGaussianMoments:
    def test_single_root(self):
        model = build_model("linear-gaussian", [("X", None)], [])
        point = sample_parameters(model, 1)
        mom = gaussian_moments(model, point)
        assert mom.mean == (point.means[0],)
        assert mom.cov == ((point.variances[0],),)

    def test_one_edge_path_sums(self):
        model = build_model("linear-gaussian", [("X", None), ("Y", None)], [("X", "Y")])
        point = sample_parameters(model, 2)
        b = point.coeffs[1][0]
        mom = gaussian_moments(model, point)
        assert mom.covariance(0, 1) == b * point.variances[0]
        assert mom.covariance(1, 1) == point.variances[1] + b * b * point.variances[0]
        assert mom.mean[1] == point.means[1] + b * point.means[0]

    @pytest.mark.parametrize("seed", range(5))
    def test_naive_bayes_matches_trek_enumeration(self, seed):
        model = gaussian_naive_bayes()
        point = sample_parameters(model, seed)
        mom = gaussian_moments(model, point)
        observed = model.observed_indices()
        for a in range(len(observed)):
            assert mom.mean[a] == trek_oracle_mean(model, point, observed[a])
            for b in range(a, len(observed)):
                assert mom.covariance(a, b) == trek_oracle_cov(model, point, observed[a], observed[b])

    @pytest.mark.parametrize("seed", range(5))
    def test_w_structure_matches_trek_enumeration(self, seed):
        model = gaussian_w_structure()
        point = sample_parameters(model, seed)
        mom = gaussian_moments(model, point)
        observed = model.observed_indices()
        for a in range(len(observed)):
            for b in range(a, len(observed)):
                assert mom.covariance(a, b) == trek_oracle_cov(model, point, observed[a], observed[b])

    def test_covariance_positive_definite_for_sampled_points(self):
        # leading principal minors, computed exactly
        for seed in range(10):
            for model in (gaussian_naive_bayes(), gaussian_w_structure()):
                mom = gaussian_moments(model, sample_parameters(model, seed))
                m = len(mom.variables)
                for k in range(1, m + 1):
                    assert _det([row[:k] for row in mom.cov[:k]]) > 0

    def test_tetrad_identities_exact(self):
        for seed in range(10):
            model = gaussian_naive_bayes()
            mom = gaussian_moments(model, sample_parameters(model, seed))
            c = mom.covariance
            assert c(0, 1) * c(2, 3) == c(0, 2) * c(1, 3) == c(0, 3) * c(1, 2)


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = Fraction(0)
    for col in range(n):
        minor = [r[:col] + r[col + 1:] for r in rows[1:]]
        total += (-1) ** col * rows[0][col] * _det(minor)
    return total


# ---------------------------------------------------------------------------
# sigmoid joints
# ---------------------------------------------------------------------------

class TestSigmoidJoint:
    def test_isolated_node_zero_bias(self):
        model = build_model("sigmoid", [("X", 2)], [])
        point = ParameterPoint(family="sigmoid", model_fingerprint=model.fingerprint(),
                               biases=(Fraction(0),), coeffs=((),))
        table = sigmoid_joint(model, point)
        assert table.prob((1,)) == 0.5

    def test_large_bias_saturates_monotonically(self):
        model = build_model("sigmoid", [("X", 2)], [])
        previous = 0.0
        for bias in (0, 1, 3, 10, 40):
            point = ParameterPoint(family="sigmoid", model_fingerprint=model.fingerprint(),
                                   biases=(Fraction(bias),), coeffs=((),))
            p1 = sigmoid_joint(model, point).prob((1,))
            assert p1 >= previous
            previous = p1
        assert previous > 1 - 1e-12

    def test_two_level_matches_brute_force(self):
        model = sigmoid_two_level()
        point = sample_parameters(model, 5)
        table = sigmoid_joint(model, point)
        assert len(table.probs) == 16
        assert math.isclose(table.total(), 1.0, abs_tol=1e-12)

        # brute force: enumerate the 4 hidden configurations per cell
        from latentdim.dual import logistic
        biases = [float(b) for b in point.biases]
        coeffs = [[float(c) for c in row] for row in point.coeffs]

        def local(i, full, value):
            z = biases[i] + sum(c * full[p] for c, p in zip(coeffs[i], model.parents[i]))
            s = logistic(z)
            return s if value == 1 else 1.0 - s

        obs = model.observed_indices()
        for cfg in StateIndexer([2] * 4):
            expected = 0.0
            for m1 in range(2):
                for m2 in range(2):
                    full = [m1, m2] + list(cfg)
                    expected += math.prod(local(i, full, full[i]) for i in range(model.n))
            assert math.isclose(table.prob(cfg), expected, rel_tol=1e-12)


# ---------------------------------------------------------------------------
# jacobian
# ---------------------------------------------------------------------------

class TestJacobian:
    def test_two_feature_mixture_entries(self):
        # the classic 3x5 matrix for one binary hidden root and two binary
        # features, checked entry by entry against hand-derived formulas
        model = naive_bayes(2)
        point = sample_parameters(model, 11)
        h = point.cpts[0][0][0]
        x1h, x1hb = point.cpts[1][0][0], point.cpts[1][1][0]
        x2h, x2hb = point.cpts[2][0][0], point.cpts[2][1][0]
        jac = jacobian(model, point)
        assert jac.shape == (3, 5)

        col_h = ("cpt", "H", 0, 0)
        col_x1h, col_x1hb = ("cpt", "X1", 0, 0), ("cpt", "X1", 1, 0)
        col_x2h, col_x2hb = ("cpt", "X2", 0, 0), ("cpt", "X2", 1, 0)

        row = ("cell", 0, 0)  # both features in their first state
        assert jac.entry(row, col_h) == x1h * x2h - x1hb * x2hb
        assert jac.entry(row, col_x1h) == h * x2h
        assert jac.entry(row, col_x2h) == h * x1h
        assert jac.entry(row, col_x1hb) == (1 - h) * x2hb
        assert jac.entry(row, col_x2hb) == (1 - h) * x1hb

        row = ("cell", 1, 0)  # first feature negated
        assert jac.entry(row, col_h) == (1 - x1h) * x2h - (1 - x1hb) * x2hb
        assert jac.entry(row, col_x1h) == -h * x2h
        assert jac.entry(row, col_x2h) == h * (1 - x1h)

    def test_fully_observed_single_binary_is_identity(self):
        model = build_model(DISCRETE, [("X", 2)], [])
        jac = jacobian(model, sample_parameters(model, 0))
        assert jac.entries == ((1,),)

    def test_mass_conservation_of_partials(self):
        # across the full table (reference cell included) every parameter's
        # partials sum to zero: perturbations preserve total probability
        for model in (naive_bayes(2), w_structure(2)):
            point = sample_parameters(model, 4)
            width = len(parameter_labels(model))
            seeds = [Dual.variable(v, t, width)
                     for t, v in enumerate(parameter_vector(model, point))]
            factors = _factors_from_coords(model, seeds)
            cells = _observed_marginal(model, _full_joint(model, factors, None))
            for t in range(width):
                assert sum(cell.partials[t] for cell in cells) == 0

    def test_gaussian_entries_are_exact_fractions(self):
        model = gaussian_naive_bayes()
        jac = jacobian(model, sample_parameters(model, 6))
        assert all(isinstance(x, (Fraction, int)) for row in jac.entries for x in row)

    def test_labels_align_with_outputs(self):
        model = w_structure(2)
        point = sample_parameters(model, 1)
        jac = jacobian(model, point)
        assert jac.row_labels == observable_labels(model)
        assert jac.col_labels == parameter_labels(model)
        assert len(jac.values) == len(jac.row_labels)
        outs = evaluate_observables(model, parameter_vector(model, point))
        assert tuple(outs) == jac.values

    def test_render_mentions_exact_entries(self):
        model = hx_model()
        text = jacobian(model, sample_parameters(model, 2)).render()
        assert "/" in text and "cpt" in text
