import numpy as np
import pytest

from imprecise.credal_set import IntervalCredalSet, LinearPrevision, PolytopeCredalSet, VertexCredalSet
from imprecise.spaces import FiniteSpace, MassFunction
from networks.credalnet import (
    CredalNet,
    classify_credal,
    credal_dominance_credal,
    from_bayes,
    lmu_product,
    local_bounds,
    min_local_ratio,
    reachability_check,
    widen,
)
from networks.dominance import EvidenceQuery
from networks.structure import NetworkStructure
from oracle.brute_force import brute_credal_min_ratio
from solvers.linear_program import LinearConstraint, Relation
from tests.fixtures.synthetic_data import (
    asia,
    asia_widened,
    positive_mass,
    random_interval_prior,
    random_query,
    random_vertex_credal_net,
)
from utils.errors import EnumerationCapExceeded, InvalidModelError, PreconditionError, SpaceMismatchError

SMOKER_WITH_ABNORMAL_XRAY = {"L": "l'", "S": "s'"}
WITH_TUBERCULOSIS = {**SMOKER_WITH_ABNORMAL_XRAY, "T": "t'"}


@pytest.fixture
def rng():
    return np.random.default_rng(99)


@pytest.fixture
def pair():
    return FiniteSpace("Z", ("z1", "z2"))


@pytest.fixture
def triple():
    return FiniteSpace("Z", ("z1", "z2", "z3"))


def polytope_net():
    """C -> X with polytope rows for X."""
    c = FiniteSpace("C", ("c1", "c2"))
    x = FiniteSpace("X", ("x1", "x2", "x3"))
    structure = NetworkStructure((c, x), {"X": ["C"]})
    first = PolytopeCredalSet(x, (LinearConstraint([1.0, 0.0, 0.0], Relation.GE, 0.3),))
    second = PolytopeCredalSet(
        x,
        (
            LinearConstraint([1.0, 0.0, 0.0], Relation.LE, 0.4),
            LinearConstraint([0.0, 1.0, -1.0], Relation.GE, 0.0),
        ),
    )
    rows = {"C": (LinearPrevision(MassFunction(c, [0.6, 0.4])),), "X": (first, second)}
    return CredalNet(structure, rows, name="polytope")


class TestLocalModels:
    """Test cases for local bounds and minimum ratios"""

    def test_interval_bounds_are_stored_bounds(self, triple, rng):
        """Test that interval bounds are returned verbatim"""
        spec = random_interval_prior(rng, triple)

        assert local_bounds(spec, "z2") == (spec.lower_bounds[1], spec.upper_bounds[1])

    def test_vertex_bounds(self, pair):
        """Test the bounds of a two-vertex set"""
        spec = VertexCredalSet.from_arrays(pair, [[0.2, 0.8], [0.5, 0.5]])

        assert local_bounds(spec, "z1") == pytest.approx((0.2, 0.5))

    def test_polytope_bounds(self, triple):
        """Test the bounds of the simplex cut by p(z1) >= 0.1"""
        spec = PolytopeCredalSet(triple, (LinearConstraint([1.0, 0.0, 0.0], Relation.GE, 0.1),))

        assert local_bounds(spec, "z1") == pytest.approx((0.1, 1.0), abs=1e-9)
        assert local_bounds(spec.with_margin(1e-9), "z1") == pytest.approx((0.1, 1.0), abs=1e-6)

    def test_asia_cancer_row(self):
        """Test the precise ratio of the cancer row for smokers"""
        net = from_bayes(asia())
        row = net.local("C", {"S": "s'"})

        assert min_local_ratio(row, "c'", "c''") == pytest.approx(1 / 9)
        assert min_local_ratio(row, "c'", "c'") == 1.0

    def test_vertex_ratio_at_extreme_point(self, triple, rng):
        """Test that the vertex ratio is the smallest ratio over the vertices"""
        points = [positive_mass(rng, 3) for _ in range(4)]
        spec = VertexCredalSet.from_arrays(triple, points)

        assert min_local_ratio(spec, "z1", "z3") == pytest.approx(min(p[0] / p[2] for p in points))

    def test_interval_ratio_matches_linear_fractional_program(self, triple, rng):
        """Test the interval closed form against the same box solved by Charnes-Cooper"""
        for _ in range(10):
            spec = random_interval_prior(rng, triple, width=0.15)
            box = []
            for i in range(3):
                unit = np.eye(3)[i]
                box.append(LinearConstraint(unit, Relation.GE, spec.lower_bounds[i]))
                box.append(LinearConstraint(unit, Relation.LE, spec.upper_bounds[i]))
            polytope = PolytopeCredalSet(triple, tuple(box))
            assert min_local_ratio(spec, "z1", "z2") == pytest.approx(min_local_ratio(polytope, "z1", "z2"), abs=1e-9)

    def test_interval_ratios_cannot_both_exceed_one(self, triple, rng):
        """Test that two states never dominate each other within one interval row"""
        for _ in range(50):
            spec = random_interval_prior(rng, triple, width=float(rng.uniform(0.0, 0.3)))
            for better in triple:
                for worse in triple:
                    forward = min_local_ratio(spec, better, worse)
                    backward = min_local_ratio(spec, worse, better)
                    assert forward * backward <= 1.0 + 1e-12

    def test_polytope_ratio_matches_vertices(self):
        """Test the fractional program against the polytope's own vertices"""
        spec = polytope_net().local("X", {"C": "c2"})
        vertices = spec.extreme_points()

        assert min_local_ratio(spec, "x2", "x1") == pytest.approx(min(v[1] / v[0] for v in vertices), abs=1e-9)

    def test_reachability_is_reexported(self):
        """Test the reachability check on the credal-network surface"""
        assert reachability_check([0.2, 0.3], [0.7, 0.8])


class TestCredalNet:
    """Test cases for building credal networks"""

    def test_zero_vertex_entry(self, pair):
        """Test that a row admitting a zero probability is refused"""
        structure = NetworkStructure((pair,), {})
        with pytest.raises(InvalidModelError, match="zero entry"):
            CredalNet(structure, {"Z": (VertexCredalSet.from_arrays(pair, [[1.0, 0.0], [0.5, 0.5]]),)})

    def test_zero_lower_interval(self, pair):
        """Test that an interval with a zero lower bound is refused"""
        structure = NetworkStructure((pair,), {})
        with pytest.raises(InvalidModelError):
            CredalNet(structure, {"Z": (IntervalCredalSet(pair, [0.0, 0.2], [0.8, 1.0]),)})

    def test_row_count(self, pair):
        """Test that every parent configuration needs a row"""
        structure = NetworkStructure((FiniteSpace("C", ("c1", "c2")), pair), {"Z": ["C"]})
        row = LinearPrevision(MassFunction.uniform(pair))
        with pytest.raises(InvalidModelError, match="rows"):
            CredalNet(structure, {"C": (LinearPrevision(MassFunction.uniform(structure.space("C"))),), "Z": (row,)})

    def test_row_space(self, pair, triple):
        """Test that a row must live on its node's states"""
        structure = NetworkStructure((pair,), {})
        with pytest.raises(SpaceMismatchError):
            CredalNet(structure, {"Z": (LinearPrevision(MassFunction.uniform(triple)),)})

    def test_polytope_rows_are_clipped(self):
        """Test that polytope rows gain positivity margins while the declared rows are kept"""
        net = polytope_net()
        declared = net.rows["X"][1]
        effective = net.local("X", {"C": "c2"})

        assert len(effective.constraints) == len(declared.constraints) + 3
        assert not net.is_precise

    def test_degenerate_net_is_precise(self):
        """Test that a net built from a Bayesian net is precise"""
        assert from_bayes(asia()).is_precise


class TestCredalDominance:
    """Test cases for the lower ratio-product test on credal networks"""

    def test_degenerate_net_reproduces_bayesian_values(self):
        """Test that precise local sets give the Bayesian Asia products"""
        net = from_bayes(asia())
        query = EvidenceQuery("C", SMOKER_WITH_ABNORMAL_XRAY)
        result = credal_dominance_credal(net, query, "c'", "c''")
        by_state = {product.assignment["T"]: product.value for product in result.products}

        assert by_state["t'"] == pytest.approx(1 / 9, abs=1e-9)
        assert by_state["t''"] == pytest.approx(98 / 135, abs=1e-9)
        assert credal_dominance_credal(net, query, "c''", "c'").value == pytest.approx(45 / 686, abs=1e-9)

    def test_lmu_product(self):
        """Test the product for one cutset value"""
        net = from_bayes(asia())
        query = EvidenceQuery("C", SMOKER_WITH_ABNORMAL_XRAY)

        assert lmu_product(net, query, "c'", "c''", {"T": "t''"}) == pytest.approx(98 / 135, abs=1e-9)
        with pytest.raises(PreconditionError):
            lmu_product(net, query, "c'", "c''")

    def test_zero_widening_matches_bayesian(self):
        """Test that widening by zero keeps the classification"""
        net = widen(asia(), 0.0)
        report = classify_credal(net, EvidenceQuery("C", SMOKER_WITH_ABNORMAL_XRAY))

        assert report.kind == "credal"
        assert report.undominated == ["c'", "c''"]
        assert report.pair("c''", "c'").value == pytest.approx(45 / 686, abs=1e-9)

    def test_widened_asia(self):
        """Test the bundled widened Asia network"""
        net = asia_widened()

        assert classify_credal(net, EvidenceQuery("C", SMOKER_WITH_ABNORMAL_XRAY)).undominated == ["c'", "c''"]
        assert classify_credal(net, EvidenceQuery("C", WITH_TUBERCULOSIS)).undominated == ["c''"]

    def test_widening_weakens_dominance(self):
        """Test that wider local sets never raise a dominance value"""
        query = EvidenceQuery("C", WITH_TUBERCULOSIS)
        precise = credal_dominance_credal(from_bayes(asia()), query, "c''", "c'").value
        narrow = credal_dominance_credal(widen(asia(), 0.005), query, "c''", "c'").value
        wide = credal_dominance_credal(widen(asia(), 0.02), query, "c''", "c'").value

        assert precise >= narrow >= wide

    def test_negative_widening(self):
        """Test that a negative widening is refused"""
        with pytest.raises(InvalidModelError):
            widen(asia(), -0.1)

    def test_polytope_net_matches_oracle(self):
        """Test a net with polytope rows against vertex enumeration"""
        net = polytope_net()
        query = EvidenceQuery("C", {"X": "x1"})
        for better, worse in (("c1", "c2"), ("c2", "c1")):
            fast = credal_dominance_credal(net, query, better, worse)
            assert fast.value == pytest.approx(brute_credal_min_ratio(net, query, better, worse), abs=1e-9)

    def test_random_vertex_nets_match_oracle(self, rng):
        """Test 100 random vertex credal nets against the strong-extension oracle"""
        for trial in range(100):
            net = random_vertex_credal_net(rng)
            query = random_query(rng, net.structure, max_missing=3)
            better, worse = net.structure.space(query.class_node).elements[:2]
            fast = credal_dominance_credal(net, query, better, worse)
            expected = brute_credal_min_ratio(net, query, better, worse)
            assert fast.value == pytest.approx(expected, rel=1e-9), trial

    def test_oracle_cap(self):
        """Test that the credal oracle refuses oversized enumerations"""
        with pytest.raises(EnumerationCapExceeded):
            brute_credal_min_ratio(from_bayes(asia()), EvidenceQuery("C", {}), "c'", "c''", cap=4)
