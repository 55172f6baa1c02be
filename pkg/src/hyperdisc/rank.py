"""Merge per-module candidate lists into the final top-15 per query.

Lists are concatenated in module order (block concatenation, no score
fusion), deduplicated first-occurrence-wins, the query term itself is
dropped, and the result is truncated to k. The default order puts IS-A
evidence first and embedding-projection evidence last; `choose_order`
instead ranks the modules by their standalone MRR on training data and
applies that order to the test data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .cooc import ScoredCandidate, Source, TOP_K
from .corpus_io import GoldSet, Query, normalize_term
from .metrics import reciprocal_rank

DEFAULT_ORDER = (Source.ISA, Source.COOC, Source.HEARST, Source.PHI)


@dataclass(frozen=True)
class ModuleOrder:
    order: tuple[Source, ...] = DEFAULT_ORDER

    def __post_init__(self) -> None:
        if sorted(self.order, key=lambda s: s.value) != sorted(
            Source, key=lambda s: s.value
        ):
            raise ValueError(f"order must list each source exactly once: {self.order}")


@dataclass(frozen=True)
class RankedPrediction:
    query: Query
    candidates: tuple[ScoredCandidate, ...]

    def terms(self) -> list[str]:
        return [c.term for c in self.candidates]


def merge(
    query: Query,
    per_source: Mapping[Source, Sequence[ScoredCandidate]],
    order: ModuleOrder | None = None,
    k: int = TOP_K,
) -> RankedPrediction:
    """Concatenate source lists in order; first occurrence of a term wins."""
    order = order or ModuleOrder()
    query_term = normalize_term(query.term)
    seen: set[str] = set()
    out: list[ScoredCandidate] = []
    for source in order.order:
        for candidate in per_source.get(source, ()):
            term = normalize_term(candidate.term)
            if term == query_term or term in seen:
                continue
            seen.add(term)
            out.append(candidate)
            if len(out) == k:
                return RankedPrediction(query, tuple(out))
    return RankedPrediction(query, tuple(out))


def choose_order(
    per_source_predictions: Mapping[Source, Sequence[RankedPrediction]],
    train_gold: Sequence[GoldSet],
) -> ModuleOrder:
    """Order modules by standalone MRR on training data, best first.

    Ties fall back to the fixed Source enum order, so the result is a
    deterministic function of the per-source MRR values.
    """
    if not train_gold:
        raise ValueError("cannot choose a module order from empty training gold")
    enum_position = {source: i for i, source in enumerate(Source)}
    mrr: dict[Source, float] = {}
    for source in Source:
        predictions = per_source_predictions.get(source, ())
        if predictions and len(predictions) != len(train_gold):
            raise ValueError(
                f"{source.value}: {len(predictions)} predictions for "
                f"{len(train_gold)} gold sets"
            )
        total = 0.0
        for prediction, gold_set in zip(predictions, train_gold):
            total += reciprocal_rank(prediction.terms(), gold_set.hypernyms)
        mrr[source] = total / len(train_gold) if predictions else 0.0
    ranked = sorted(Source, key=lambda s: (-mrr[s], enum_position[s]))
    return ModuleOrder(tuple(ranked))
