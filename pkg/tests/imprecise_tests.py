import numpy as np
import pytest

from imprecise.coherence import CoherenceAxiom, check_coherence, check_self_conjugacy
from imprecise.credal_set import (
    IntervalCredalSet,
    LinearPrevision,
    PolytopeCredalSet,
    VertexCredalSet,
    eval_lower,
    eval_upper,
    make_reachable,
    reachability_check,
    vacuous,
)
from imprecise.decision import EQUIVALENT, INCOMPARABLE, almost_preference, maximal_actions, strict_preference
from imprecise.spaces import FiniteSpace, Gamble, MassFunction, coordinate_event, lift
from solvers.linear_program import LinearConstraint, Relation
from tests.fixtures.synthetic_data import positive_mass, random_gamble, random_interval_prior, random_vertex_prior
from utils.errors import InfeasibleModelError, InvalidModelError, PreconditionError, SpaceMismatchError


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def three():
    return FiniteSpace("x", ("a", "b", "c"))


@pytest.fixture
def visit_asia():
    return FiniteSpace("V", ("v'", "v''"))


def hull_polytope(space, vertices):
    """Polytope given by one half-plane per edge of a triangle of mass functions."""
    constraints = []
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        normal = np.cross(vertices[i], vertices[j])
        if normal @ vertices[k] < 0:
            normal = -normal
        constraints.append(LinearConstraint(normal, Relation.GE, 0.0))
    return PolytopeCredalSet(space, tuple(constraints))


class TestSpaces:
    """Test cases for finite spaces, gambles and mass functions"""

    def test_space_rejects_duplicates(self):
        """Test that duplicate elements are refused"""
        with pytest.raises(InvalidModelError):
            FiniteSpace("x", ("a", "a"))

    def test_product_orders_last_coordinate_fastest(self):
        """Test the element order of a product space"""
        product = FiniteSpace.product(FiniteSpace("x", (0, 1)), FiniteSpace("y", ("p", "q")))

        assert product.elements == ((0, "p"), (0, "q"), (1, "p"), (1, "q"))

    def test_gamble_arithmetic(self, three):
        """Test pointwise gamble arithmetic and lookup"""
        f = Gamble.from_mapping(three, {"a": 1.0, "c": 3.0})
        g = Gamble.constant(three, 2.0)

        assert (f + g).values.tolist() == [3.0, 2.0, 5.0]
        assert (2 * f - g)["c"] == 4.0
        assert (-f).min() == -3.0
        assert f.min_over({"a", "b"}) == 0.0

    def test_gamble_space_mismatch(self, three, visit_asia):
        """Test that gambles on different spaces cannot be combined"""
        with pytest.raises(SpaceMismatchError):
            Gamble.constant(three, 1.0) + Gamble.constant(visit_asia, 1.0)

    def test_mass_function_must_sum_to_one(self, three):
        """Test that unnormalised masses are refused"""
        with pytest.raises(InvalidModelError):
            MassFunction(three, [0.5, 0.2, 0.2])

    def test_mass_function_sum_tolerance(self, three):
        """Test that sums within the configured tolerance are accepted and larger gaps are not"""
        assert MassFunction(three, [0.5, 0.2, 0.2999999999]).probs.sum() == pytest.approx(1.0)
        with pytest.raises(InvalidModelError):
            MassFunction(three, [0.5, 0.2, 0.29999999])

    def test_mass_function_rejects_negative_entries(self, three):
        """Test that negative masses are refused"""
        with pytest.raises(InvalidModelError):
            MassFunction(three, [1.2, -0.2, 0.0])

    def test_lift_and_coordinate_event(self, three, visit_asia):
        """Test lifting a gamble to a product space"""
        product = FiniteSpace.product(three, visit_asia)
        f = Gamble.from_mapping(visit_asia, {"v'": 1.0})
        lifted = lift(f, product, 1)

        assert lifted[("b", "v'")] == 1.0
        assert lifted[("b", "v''")] == 0.0
        assert coordinate_event(product, 0, "c").sum() == 2


class TestCredalSets:
    """Test cases for lower and upper previsions of credal sets"""

    def test_linear_asia_marginal(self, visit_asia):
        """Test the lower prevision of a visit to Asia under the precise marginal"""
        prior = LinearPrevision(MassFunction(visit_asia, [0.01, 0.99]))

        assert eval_lower(prior, Gamble.indicator(visit_asia, ["v'"])) == pytest.approx(0.01, abs=1e-15)

    def test_linear_is_self_conjugate(self, three, rng):
        """Test that lower and upper previsions coincide for a linear prevision"""
        prior = LinearPrevision(MassFunction(three, positive_mass(rng, 3)))
        for _ in range(10):
            f = random_gamble(rng, three)
            assert eval_lower(prior, f) == pytest.approx(eval_upper(prior, f), abs=1e-12)

    def test_vacuous_is_min_and_max(self, three, rng):
        """Test that the vacuous set over a subset evaluates to the minimum and maximum there"""
        model = vacuous(three, ["a", "c"])
        for _ in range(10):
            f = random_gamble(rng, three)
            assert eval_lower(model, f) == pytest.approx(f.min_over(["a", "c"]))
            assert eval_upper(model, f) == pytest.approx(f.max_over(["a", "c"]))

    def test_constants_are_preserved(self, three, rng):
        """Test that every representation maps a constant to itself"""
        models = [
            LinearPrevision(MassFunction.uniform(three)),
            random_vertex_prior(rng, three),
            random_interval_prior(rng, three),
            vacuous(three),
        ]
        for model in models:
            assert eval_lower(model, Gamble.constant(three, 2.5)) == pytest.approx(2.5, abs=1e-9)
            assert eval_upper(model, Gamble.constant(three, -1.5)) == pytest.approx(-1.5, abs=1e-9)

    def test_polytope_hull_matches_vertices(self, three, rng):
        """Test that a polytope equal to the hull of three vertices evaluates like the vertices"""
        vertices = [positive_mass(rng, 3) for _ in range(3)]
        polytope = hull_polytope(three, vertices)
        explicit = VertexCredalSet.from_arrays(three, vertices)
        for _ in range(20):
            f = random_gamble(rng, three)
            assert eval_lower(polytope, f) == pytest.approx(eval_lower(explicit, f), abs=1e-9)

    def test_polytope_extreme_points_recover_vertices(self, three, rng):
        """Test vertex enumeration of a triangular polytope"""
        vertices = [positive_mass(rng, 3) for _ in range(3)]
        found = hull_polytope(three, vertices).extreme_points()

        assert len(found) == 3
        for vertex in vertices:
            assert any(np.allclose(np.asarray(point), vertex, atol=1e-8) for point in found)

    def test_empty_polytope_is_an_invalid_model(self, three):
        """Test that an infeasible polytope is reported as an invalid model"""
        with pytest.raises(InfeasibleModelError):
            PolytopeCredalSet(three, (LinearConstraint([1.0, 0.0, 0.0], Relation.GE, 1.5),))

    def test_intervals_match_linear_program(self, three, rng):
        """Test the greedy interval evaluation against the same box as a polytope"""
        intervals = random_interval_prior(rng, three, width=0.15)
        box = []
        for i in range(3):
            unit = np.eye(3)[i]
            box.append(LinearConstraint(unit, Relation.GE, intervals.lower_bounds[i]))
            box.append(LinearConstraint(unit, Relation.LE, intervals.upper_bounds[i]))
        polytope = PolytopeCredalSet(three, tuple(box))
        for _ in range(20):
            f = random_gamble(rng, three)
            assert eval_lower(intervals, f) == pytest.approx(eval_lower(polytope, f), abs=1e-9)

    def test_interval_extreme_points_attain_bounds(self, three, rng):
        """Test that the vertices of an interval set reach every bound"""
        intervals = random_interval_prior(rng, three)
        points = np.array([np.asarray(point) for point in intervals.extreme_points()])

        assert np.allclose(points.sum(axis=1), 1.0)
        assert np.allclose(points.min(axis=0), intervals.lower_bounds)
        assert np.allclose(points.max(axis=0), intervals.upper_bounds)

    def test_probability_bounds(self, three):
        """Test lower and upper probabilities of single elements"""
        model = VertexCredalSet.from_arrays(three, [[0.2, 0.3, 0.5], [0.6, 0.3, 0.1]])

        assert model.probability_bounds("a") == pytest.approx((0.2, 0.6))
        assert model.lower_probability(["a", "c"]) == pytest.approx(0.7)
        assert model.upper_probability(["b"]) == pytest.approx(0.3)


class TestReachability:
    """Test cases for probability interval reachability"""

    def test_singleton_interval_is_reachable(self):
        """Test that lower = upper = a mass function is reachable"""
        assert reachability_check([0.2, 0.3, 0.5], [0.2, 0.3, 0.5])

    def test_binary_reachable(self):
        """Test a reachable binary interval checked by hand"""
        assert reachability_check([0.2, 0.3], [0.7, 0.8])

    def test_lower_sum_above_one(self):
        """Test that lower bounds summing above one are not reachable"""
        assert not reachability_check([0.5, 0.6], [0.6, 0.7])

    def test_loose_upper_bound_not_reachable(self):
        """Test that an upper bound above one minus the other lower bounds is not reachable"""
        assert not reachability_check([0.1, 0.1], [1.0, 1.0])

    def test_make_reachable_tightens(self):
        """Test that tightening gives reachable bounds with the same credal set"""
        lower, upper = make_reachable([0.1, 0.1], [1.0, 1.0])

        assert upper.tolist() == pytest.approx([0.9, 0.9])
        assert lower.tolist() == pytest.approx([0.1, 0.1])
        assert reachability_check(lower, upper)

    def test_interval_set_refuses_unreachable_bounds(self, three):
        """Test that construction enforces reachability"""
        with pytest.raises(InvalidModelError):
            IntervalCredalSet(three, [0.1, 0.1, 0.1], [1.0, 1.0, 1.0])

    def test_malformed_bounds(self):
        """Test that bounds of different lengths are malformed"""
        with pytest.raises(InvalidModelError):
            reachability_check([0.5, 0.5], [0.5, 0.5, 0.1])


class TestCoherence:
    """Test cases for the coherence checks"""

    def test_credal_sets_are_coherent(self, three, rng):
        """Test that lower envelopes pass the axioms on a 50-gamble sample"""
        sample = [random_gamble(rng, three) for _ in range(50)]
        for model in (random_vertex_prior(rng, three), random_interval_prior(rng, three), vacuous(three, ["a", "b"])):
            report = check_coherence(model, sample)
            assert report.coherent, report.message

    def test_linear_prevision_is_self_conjugate(self, three, rng):
        """Test that a linear prevision passes self-conjugacy"""
        sample = [random_gamble(rng, three) for _ in range(50)]
        prior = LinearPrevision(MassFunction(three, positive_mass(rng, 3)))

        assert check_self_conjugacy(prior, sample)

    def test_vertex_set_is_not_self_conjugate(self, three):
        """Test that a proper credal set fails self-conjugacy"""
        model = VertexCredalSet.from_arrays(three, [[0.2, 0.3, 0.5], [0.6, 0.3, 0.1]])
        report = check_self_conjugacy(model, [Gamble(three, [1.0, 0.0, 0.0])])

        assert not report
        assert report.axiom is CoherenceAxiom.SELF_CONJUGACY

    def test_max_violates_super_additivity(self):
        """Test that the maximum is not a coherent lower prevision"""
        space = FiniteSpace("pair", (0, 1))
        f = Gamble(space, [0.0, 1.0])
        report = check_coherence(lambda g: g.max(), [f, -f])

        assert not report.coherent
        assert report.axiom is CoherenceAxiom.SUPER_ADDITIVITY
        assert report.witnesses == (f, -f)

    def test_zero_violates_sure_gain(self):
        """Test that a zero lower prevision rejects a strictly positive gamble"""
        space = FiniteSpace("pair", (0, 1))
        report = check_coherence(lambda g: 0.0, [Gamble(space, [1.0, 2.0])])

        assert not report
        assert report.axiom is CoherenceAxiom.ACCEPTS_SURE_GAINS

    def test_non_homogeneous_lower_prevision(self):
        """Test that a squared evaluation fails positive homogeneity"""
        space = FiniteSpace("pair", (0, 1))
        report = check_coherence(lambda g: min(g.min(), g.min() ** 2), [Gamble(space, [1.0, 2.0])])

        assert report.axiom is CoherenceAxiom.POSITIVE_HOMOGENEITY


class TestDecisions:
    """Test cases for strict preference and maximality"""

    def test_sure_gain_is_preferred(self, three, rng):
        """Test that f is strictly preferred to f - 1"""
        model = random_vertex_prior(rng, three)
        f = random_gamble(rng, three)

        assert strict_preference(model, f, f - 1)
        assert not strict_preference(model, f - 1, f)

    def test_linear_preference_is_expected_utility(self, three, rng):
        """Test that under a linear prevision strict preference compares expectations"""
        mass = MassFunction(three, positive_mass(rng, 3))
        prior = LinearPrevision(mass)
        for _ in range(20):
            fa, fb = random_gamble(rng, three), random_gamble(rng, three)
            expected = mass.expectation(fa) > mass.expectation(fb)
            assert strict_preference(prior, fa, fb) == expected

    def test_linear_maximal_is_argmax(self, three, rng):
        """Test that maximal actions under a linear prevision are the expectation maximisers"""
        mass = MassFunction(three, positive_mass(rng, 3))
        actions = {f"a{i}": random_gamble(rng, three) for i in range(5)}
        result = maximal_actions(LinearPrevision(mass), actions)
        best = max(actions, key=lambda label: mass.expectation(actions[label]))

        assert result.maximal == [best]

    def test_dominated_action_never_maximal(self, three, rng):
        """Test that f - 1 is never maximal next to f"""
        f = random_gamble(rng, three)
        result = maximal_actions(vacuous(three), {"f": f, "f-1": f - 1, "g": random_gamble(rng, three)})

        assert "f-1" not in result.maximal
        assert ("f", "f-1") in result.preferences

    def test_equal_actions_are_equivalent(self, three, rng):
        """Test that two identical rewards are labelled equivalent"""
        f = random_gamble(rng, three)
        result = maximal_actions(vacuous(three), {"a": f, "b": f + 0.0})

        assert result.maximal == ["a", "b"]
        assert result.relation("b", "a") == EQUIVALENT

    def test_vacuous_makes_crossing_actions_incomparable(self, three):
        """Test that crossing rewards under ignorance are incomparable"""
        fa = Gamble(three, [1.0, 0.0, 0.0])
        fb = Gamble(three, [0.0, 0.0, 1.0])
        result = maximal_actions(vacuous(three), {"a": fa, "b": fb})

        assert result.relation("a", "b") == INCOMPARABLE
        assert not almost_preference(vacuous(three), fa, fb)

    def test_empty_action_set(self, three):
        """Test that maximality needs at least one action"""
        with pytest.raises(PreconditionError):
            maximal_actions(vacuous(three), {})
