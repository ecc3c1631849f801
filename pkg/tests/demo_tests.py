import numpy as np
import pytest

from demo.asia import PUBLISHED_UPPER, asia_demo, format_asia_report
from demo.monty_hall import STAY, SWITCH, analyse, format_monty_hall_report, host_map, monty_hall_demo, uniform_prior
from imprecise.coherence import check_coherence
from imprecise.conditioning import ConditionalFamily, marginal_extension2, regular_extension_obs
from imprecise.decision import INCOMPARABLE
from imprecise.observation import cur_posterior
from imprecise.spaces import FiniteSpace
from networks.bayesnet import class_family, evidence_pattern
from networks.dominance import EvidenceQuery
from tests.fixtures.synthetic_data import asia, random_gamble, random_vertex_prior


@pytest.fixture(scope="module")
def asia_report():
    return asia_demo()


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


class TestAsiaDemo:
    """Test cases for the Asia worked example"""

    def test_products(self, asia_report):
        """Test the cutset and both products against their closed forms"""
        by_state = {product.assignment["T"]: product.value for product in asia_report.products}

        assert asia_report.cutset == ["T"]
        assert by_state["t'"] == pytest.approx(asia_report.expected_products["t'"], abs=1e-9)
        assert by_state["t''"] == pytest.approx(asia_report.expected_products["t''"], abs=1e-9)
        assert asia_report.reverse_test_value == pytest.approx(45 / 686, abs=1e-9)

    def test_classifications(self, asia_report):
        """Test the undominated classes of every route through the example"""
        assert asia_report.undominated == ["c'", "c''"]
        assert asia_report.undominated_with_tuberculosis == ["c''"]
        assert asia_report.undominated_by_completions == ["c'", "c''"]
        assert asia_report.widened_undominated_with_tuberculosis == ["c''"]

    def test_posterior_interval(self, asia_report):
        """Test the enumerated interval and the published rounding"""
        assert asia_report.posterior_lower == pytest.approx(0.1, abs=1e-6)
        assert asia_report.posterior_upper == pytest.approx(686 / 731, abs=1e-9)
        assert asia_report.exact_upper == "686/731"
        assert asia_report.published_upper == PUBLISHED_UPPER
        assert asia_report.naive_posterior == pytest.approx(0.646, abs=1e-3)

    def test_report_text(self, asia_report):
        """Test that the text rendering mentions the exact endpoint"""
        text = format_asia_report(asia_report)

        assert "Loop cutset: [T]" in text
        assert "exact upper 686/731" in text


class TestMontyHallDemo:
    """Test cases for the Monty Hall example"""

    @pytest.mark.parametrize("delta", [1.0, 2.5])
    def test_standard_game(self, delta):
        """Test that switching is almost preferred but not strictly preferred"""
        result = analyse(extended=False, delta=delta)

        assert result.forcing == [3]
        assert result.compatible == [1, 3]
        assert not result.naive_ok
        assert result.switch_over_stay == pytest.approx(0.0, abs=1e-9)
        assert result.stay_over_switch == pytest.approx(-delta, abs=1e-9)
        assert result.almost_prefers_switch
        assert result.maximal == [STAY, SWITCH]
        assert result.relation == INCOMPARABLE

    @pytest.mark.parametrize("delta", [1.0, 2.5])
    def test_extended_game(self, delta):
        """Test that a host who may open no door leaves both preferences at -delta"""
        result = analyse(extended=True, delta=delta)

        assert result.forcing == []
        assert result.switch_over_stay == pytest.approx(-delta, abs=1e-9)
        assert result.stay_over_switch == pytest.approx(-delta, abs=1e-9)
        assert not result.almost_prefers_switch
        assert result.relation == INCOMPARABLE

    def test_report(self):
        """Test the combined report and its rendering"""
        report = monty_hall_demo(delta=2.5)
        text = format_monty_hall_report(report)

        assert report.standard.variant == "standard"
        assert report.extended.variant == "extended"
        assert "Extended game" in text


class TestUpdatedModelsAreCoherent:
    """Test cases checking coherence of the updated lower previsions on 50 gambles"""

    def test_conservative_updating(self, rng):
        """Test the conservative posterior of the Asia class"""
        net = asia()
        family = class_family(net, "C")
        pattern = evidence_pattern(net, EvidenceQuery("C", {"L": "l'", "S": "s'"}))
        classes = net.structure.space("C")
        sample = [random_gamble(rng, classes) for _ in range(50)]

        assert check_coherence(lambda f: cur_posterior(family, pattern, f), sample)

    def test_regular_extension(self, rng):
        """Test the Monty Hall regular extension in both games"""
        prior = uniform_prior()
        for extended in (False, True):
            mvm = host_map(extended)
            sample = [random_gamble(rng, mvm.state_space) for _ in range(50)]
            report = check_coherence(lambda f: regular_extension_obs(prior, mvm, 2, f), sample, tol=1e-8)
            assert report, report.message

    def test_marginal_extension(self, rng):
        """Test a two-level marginal extension with imprecise levels"""
        x = FiniteSpace("X", ("x1", "x2"))
        y = FiniteSpace("Y", ("y1", "y2", "y3"))
        joint = marginal_extension2(
            random_vertex_prior(rng, x),
            ConditionalFamily(x, y, {a: random_vertex_prior(rng, y) for a in x}),
        )
        sample = [random_gamble(rng, joint.space) for _ in range(50)]

        assert check_coherence(joint, sample)
