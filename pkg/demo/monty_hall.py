"""The Monty Hall game with an unknown host protocol.

You pick door 1 and the host opens door 2. Nothing is assumed about how the
host chooses between two goat doors, so the posterior is the regular
extension under a vacuous observation mechanism. In the extended game the
host may also open no door at all (observation 0).
"""

import sys
import os
from typing import List

from pydantic import BaseModel, Field

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from imprecise.conditioning import regular_extension_obs
from imprecise.credal_set import LinearPrevision
from imprecise.decision import almost_preference, maximal_actions
from imprecise.observation import MultiValuedMap, naive_ok, observation_posterior
from imprecise.spaces import FiniteSpace, Gamble, MassFunction
from utils.logger import Logger

logger = Logger(__name__)

OPENED = 2
STAY = "stay"
SWITCH = "switch"


def doors() -> FiniteSpace:
    return FiniteSpace("car", (1, 2, 3))


def host_map(extended: bool = False) -> MultiValuedMap:
    """Doors the host may open given where the car is (you hold door 1)."""
    if extended:
        return MultiValuedMap(doors(), FiniteSpace("opened", (0, 2, 3)), {1: {0, 2, 3}, 2: {0, 3}, 3: {0, 2}})
    return MultiValuedMap(doors(), FiniteSpace("opened", (2, 3)), {1: {2, 3}, 2: {3}, 3: {2}})


def uniform_prior() -> LinearPrevision:
    return LinearPrevision(MassFunction.uniform(doors()))


def rewards(delta: float = 1.0) -> dict:
    """Utility of staying with door 1 and of switching to door 3; a car is worth delta more than a goat."""
    space = doors()
    return {
        STAY: Gamble.from_mapping(space, {1: delta}),
        SWITCH: Gamble.from_mapping(space, {3: delta}),
    }


class VariantResult(BaseModel):
    variant: str
    forcing: List[int] = Field(description="Car positions that force the host to open door 2")
    compatible: List[int] = Field(description="Car positions compatible with door 2 being opened")
    naive_ok: bool
    switch_over_stay: float = Field(description="Lower posterior prevision of f_switch - f_stay")
    stay_over_switch: float = Field(description="Lower posterior prevision of f_stay - f_switch")
    almost_prefers_switch: bool
    maximal: List[str]
    relation: str


class MontyHallReport(BaseModel):
    delta: float
    standard: VariantResult
    extended: VariantResult


def analyse(extended: bool = False, delta: float = 1.0) -> VariantResult:
    mvm = host_map(extended)
    prior = uniform_prior()
    actions = rewards(delta)
    difference = actions[SWITCH] - actions[STAY]

    switch_over_stay = regular_extension_obs(prior, mvm, OPENED, difference)
    stay_over_switch = regular_extension_obs(prior, mvm, OPENED, -difference)

    posterior = observation_posterior(prior, mvm, OPENED)
    decision = maximal_actions(posterior, actions)
    relation = decision.relation(STAY, SWITCH) if len(decision.maximal) == 2 else "ordered"

    variant = "extended" if extended else "standard"
    logger.info(f"Monty Hall ({variant}): maximal {decision.maximal}, relation {relation}")
    return VariantResult(
        variant=variant,
        forcing=sorted(mvm.forcing(OPENED)),
        compatible=sorted(mvm.compatible(OPENED)),
        naive_ok=naive_ok(mvm, OPENED),
        switch_over_stay=switch_over_stay,
        stay_over_switch=stay_over_switch,
        almost_prefers_switch=almost_preference(posterior, actions[SWITCH], actions[STAY]),
        maximal=decision.maximal,
        relation=relation,
    )


def monty_hall_demo(delta: float = 1.0) -> MontyHallReport:
    return MontyHallReport(
        delta=delta,
        standard=analyse(extended=False, delta=delta),
        extended=analyse(extended=True, delta=delta),
    )


def format_monty_hall_report(report: MontyHallReport) -> str:
    lines = [f"Monty Hall: you hold door 1, the host opens door {OPENED}, a car is worth {report.delta:g} more than a goat"]
    for result in (report.standard, report.extended):
        lines.append("")
        lines.append(f"{result.variant.capitalize()} game")
        lines.append(f"  forcing {result.forcing}, compatible {result.compatible}, naive updating justified: {result.naive_ok}")
        lines.append(f"  lower prevision of switch - stay: {result.switch_over_stay:.12g}")
        lines.append(f"  lower prevision of stay - switch: {result.stay_over_switch:.12g}")
        lines.append(f"  switching almost-preferred: {'yes' if result.almost_prefers_switch else 'no'}")
        lines.append(f"  maximal actions: {', '.join(result.maximal)} ({result.relation})")
    return "\n".join(lines)


if __name__ == "__main__":
    print(format_monty_hall_report(monty_hall_demo()))
