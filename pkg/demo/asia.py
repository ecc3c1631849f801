"""Worked example on the Asia network.

Lung cancer (C) is the class; the patient is known to smoke (S = s') and the
X-ray is abnormal (L = l'). Nothing is known about why the other findings are
missing, so the classifier has to hold for every completion of them.
"""

import sys
import os
from fractions import Fraction
from typing import Dict, List

from pydantic import BaseModel, Field

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cli.formats import bundled_network_path, load_network
from imprecise.observation import cur_classify
from networks.bayesnet import class_family, classify, evidence_pattern, naive_posterior, posterior_bounds
from networks.credalnet import classify_credal
from networks.dominance import CutsetProduct, EvidenceQuery
from utils.logger import Logger

logger = Logger(__name__)

SMOKER_WITH_ABNORMAL_XRAY = {"L": "l'", "S": "s'"}
WITH_TUBERCULOSIS = {"L": "l'", "S": "s'", "T": "t'"}

# Upper posterior endpoint as printed in the original write-up of this example
PUBLISHED_UPPER = 0.934


class AsiaDemoReport(BaseModel):
    cutset: List[str]
    products: List[CutsetProduct] = Field(description="c' against c'' for each cutset assignment")
    expected_products: Dict[str, float] = Field(description="Closed-form products 1/9 and 98/135")
    reverse_test_value: float = Field(description="Minimum ratio of c'' against c'")
    undominated: List[str] = Field(description="Undominated classes given L=l', S=s'")
    undominated_with_tuberculosis: List[str] = Field(description="Undominated classes given L=l', S=s', T=t'")
    undominated_by_completions: List[str] = Field(description="Same query through the conservative updating rule")
    posterior_lower: float
    posterior_upper: float
    published_upper: float = PUBLISHED_UPPER
    exact_upper: str = Field(description="Upper endpoint as a fraction")
    naive_posterior: float
    widened_undominated_with_tuberculosis: List[str]
    notes: List[str] = Field(default_factory=list)


def asia_demo() -> AsiaDemoReport:
    net = load_network(bundled_network_path("asia"))
    widened = load_network(bundled_network_path("asia_widened"))

    query = EvidenceQuery("C", dict(SMOKER_WITH_ABNORMAL_XRAY))
    report = classify(net, query)
    forward = report.pair("c'", "c''")
    reverse = report.pair("c''", "c'")

    tuberculosis = classify(net, EvidenceQuery("C", dict(WITH_TUBERCULOSIS)))
    by_completions = cur_classify(class_family(net, "C"), evidence_pattern(net, query))

    bounds = posterior_bounds(net, query)["c'"]
    exact = Fraction(bounds[1]).limit_denominator(10_000)
    naive = naive_posterior(net, query)["c'"]

    widened_report = classify_credal(widened, EvidenceQuery("C", dict(WITH_TUBERCULOSIS)))

    notes = [
        f"Enumerating the 8 completions of T, H, D gives an upper posterior of {exact} = {float(exact):.6f};"
        f" the published figure {PUBLISHED_UPPER} is taken to be rounded, and the enumerated value is reported.",
        f"The reverse test value {reverse.value:.12g} is the reciprocal of the upper posterior odds"
        f" ({Fraction(reverse.value).limit_denominator(10_000)}).",
    ]
    logger.info(f"Asia demo: undominated {report.undominated}, bounds {bounds}")

    return AsiaDemoReport(
        cutset=forward.cutset,
        products=forward.products,
        expected_products={"t'": 1 / 9, "t''": 98 / 135},
        reverse_test_value=reverse.value,
        undominated=report.undominated,
        undominated_with_tuberculosis=tuberculosis.undominated,
        undominated_by_completions=[str(label) for label in by_completions],
        posterior_lower=bounds[0],
        posterior_upper=bounds[1],
        exact_upper=str(exact),
        naive_posterior=naive,
        widened_undominated_with_tuberculosis=widened_report.undominated,
        notes=notes,
    )


def format_asia_report(report: AsiaDemoReport) -> str:
    lines = [
        "Asia network, class C, evidence L=l', S=s'",
        f"Loop cutset: [{', '.join(report.cutset)}]",
        "c' against c'':",
    ]
    for product in report.products:
        assignment = ", ".join(f"{name}={value}" for name, value in product.assignment.items())
        factors = ", ".join(f"{name}={value:.12g}" for name, value in product.factors.items())
        lines.append(f"  {assignment}: {product.value:.12g} [{factors}]")
    lines.append(f"c'' against c': {report.reverse_test_value:.12g}")
    lines.append(f"Undominated: {', '.join(report.undominated)}")
    lines.append(f"Undominated with T=t': {', '.join(report.undominated_with_tuberculosis)}")
    lines.append(f"Undominated by completions: {', '.join(report.undominated_by_completions)}")
    lines.append(
        f"Posterior of c' over completions: [{report.posterior_lower:.12g}, {report.posterior_upper:.12g}]"
        f" (exact upper {report.exact_upper}, published {report.published_upper})"
    )
    lines.append(f"Naive posterior of c': {report.naive_posterior:.12g}")
    lines.append(f"Widened network, undominated with T=t': {', '.join(report.widened_undominated_with_tuberculosis)}")
    lines.append("Notes")
    lines.extend(f"  {note}" for note in report.notes)
    return "\n".join(lines)


if __name__ == "__main__":
    print(format_asia_report(asia_demo()))
