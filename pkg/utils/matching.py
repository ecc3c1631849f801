from typing import Iterable, Optional

from rapidfuzz import fuzz


def closest_match(query: str, choices: Iterable[str], threshold: float = 0.6) -> Optional[str]:
    """Best fuzzy match for a misspelt node or state name, if any is close enough."""
    best, best_score = None, threshold
    query_lower = str(query).lower()
    for choice in choices:
        score = fuzz.ratio(query_lower, str(choice).lower()) / 100.0
        if score >= best_score and (best is None or score > best_score):
            best, best_score = choice, score
    return best


def did_you_mean(query: str, choices: Iterable[str]) -> str:
    match = closest_match(query, choices)
    return f" (did you mean '{match}'?)" if match is not None else ""
