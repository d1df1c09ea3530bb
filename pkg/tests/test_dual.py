"""Chain-rule correctness and exactness of the forward-mode scalars."""

import math
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from latentdim.dual import Dual, exp, logistic

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=50)
nonzero_rationals = rationals.filter(lambda x: x != 0)


def pair(x, y):
    """Two coordinates seeded at (x, y)."""
    return Dual.variable(x, 0, 2), Dual.variable(y, 1, 2)


class TestChainRule:
    @given(rationals, rationals)
    @settings(max_examples=100)
    def test_product_rule_exact(self, x, y):
        dx, dy = pair(x, y)
        p = dx * dy
        assert p.value == x * y
        assert p.partials == (y, x)

    @given(rationals, nonzero_rationals)
    @settings(max_examples=100)
    def test_quotient_rule_exact(self, x, y):
        dx, dy = pair(x, y)
        q = dx / dy
        assert q.value == Fraction(x, 1) / y
        assert q.partials == (Fraction(1, 1) / y, -Fraction(x, 1) / y**2)

    @given(rationals, rationals)
    @settings(max_examples=100)
    def test_linearity(self, x, y):
        dx, dy = pair(x, y)
        s = 3 * dx - dy + 7
        assert s.value == 3 * x - y + 7
        assert s.partials == (3, -1)

    def test_composition_stays_rational(self):
        dx, dy = pair(Fraction(1, 3), Fraction(2, 7))
        z = (1 - dx) * dy + dx * (1 - dy)
        assert isinstance(z.value, Fraction)
        assert all(isinstance(p, Fraction) for p in z.partials)
        assert z.partials == (1 - 2 * Fraction(2, 7), 1 - 2 * Fraction(1, 3))

    def test_scalar_on_either_side(self):
        d = Dual.variable(Fraction(1, 2), 0, 1)
        assert (2 * d).partials == (2,)
        assert (d * 2).partials == (2,)
        assert (1 - d).partials == (-1,)
        assert (2 / d).value == 4
        assert (2 / d).partials == (-8,)


class TestAnalytic:
    def test_exp_derivative(self):
        d = Dual.variable(0.3, 0, 1)
        e = exp(d)
        assert math.isclose(e.value, math.exp(0.3))
        assert math.isclose(e.partials[0], math.exp(0.3))

    def test_logistic_value_and_slope(self):
        d = Dual.variable(0.0, 0, 1)
        s = logistic(d)
        assert s.value == 0.5
        assert math.isclose(s.partials[0], 0.25)

    def test_logistic_matches_definition(self):
        for x in (-30.0, -2.0, 0.7, 25.0):
            assert math.isclose(logistic(x), 1.0 / (1.0 + math.exp(-x)), rel_tol=1e-12)

    def test_logistic_saturates_without_overflow(self):
        assert logistic(-800.0) == 0.0
        assert logistic(800.0) == 1.0
