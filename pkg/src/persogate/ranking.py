"""Retrieval and personalized re-ranking.

The base ranker is BM25 (k1=1.2, b=0.75). Personalization re-scores the
top block of a ranking as an interpolation of the min-max normalized
retrieval score and the cosine between the document term vector and the
user profile; everything below the block keeps its relative order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .index import CorpusIndex
from .predictors import Query, UserProfile

BM25_K1 = 1.2
BM25_B = 0.75


@dataclass(frozen=True)
class Ranking:
    """Ordered (doc_id, score) list; score descending, ties by doc_id."""

    query_id: str
    items: tuple[tuple[str, float], ...]

    def doc_ids(self) -> list[str]:
        return [d for d, _ in self.items]


@dataclass(frozen=True)
class PersonalizationStrategy:
    """Interpolation weight and depth of the re-ranked block."""

    beta: float = 0.5
    rerank_depth: int = 100

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")
        if self.rerank_depth < 1:
            raise ValueError(f"rerank depth must be >= 1, got {self.rerank_depth}")


def bm25_score(ix: CorpusIndex, query_terms, doc_id: str, doc_tf: dict[str, int],
               k1: float = BM25_K1, b: float = BM25_B) -> float:
    """BM25 with the nonnegative ln(1 + (N - df + 0.5)/(df + 0.5)) idf."""
    dl = ix.doc_lengths[doc_id]
    norm = k1 * (1.0 - b + b * dl / ix.avg_doc_length)
    score = 0.0
    for term, qtf in query_terms:
        f = doc_tf.get(term)
        if not f:
            continue
        df = ix.df[term]
        idf = math.log(1.0 + (ix.n_docs - df + 0.5) / (df + 0.5))
        score += qtf * idf * f * (k1 + 1.0) / (f + norm)
    return score


def rank(q: Query, ix: CorpusIndex, depth: int, *, query_id: str = "") -> Ranking:
    """Top-`depth` documents by BM25; empty ranking for an all-OOV query."""
    if depth < 1:
        raise ValueError(f"ranking depth must be >= 1, got {depth}")
    query_terms = sorted(q.weights.items())
    candidates: set[str] = set()
    for term, _ in query_terms:
        candidates.update(d for d, _ in ix.postings(term))
    scored = [(doc_id, bm25_score(ix, query_terms, doc_id, ix.doc_vector(doc_id)))
              for doc_id in sorted(candidates)]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return Ranking(query_id=query_id or q.raw, items=tuple(scored[:depth]))


def profile_document_cosine(p: UserProfile, doc_tf: dict[str, int]) -> float:
    """Cosine between the raw tf document vector and the profile weights."""
    if not doc_tf or not p.terms:
        return 0.0
    dot = sum(f * p.terms[t] for t, f in doc_tf.items() if t in p.terms)
    if dot == 0.0:
        return 0.0
    dn = math.sqrt(sum(f * f for f in doc_tf.values()))
    pn = math.sqrt(sum(w * w for w in p.terms.values()))
    return dot / (dn * pn)


def personalize_rerank(r: Ranking, p: UserProfile, ix: CorpusIndex,
                       strategy: PersonalizationStrategy = PersonalizationStrategy(),
                       ) -> Ranking:
    """Re-rank the top block by (1-beta)*normalized score + beta*cosine."""
    block = list(r.items[: strategy.rerank_depth])
    tail = r.items[strategy.rerank_depth:]
    if not block:
        return r
    scores = [s for _, s in block]
    lo, hi = min(scores), max(scores)
    span = hi - lo
    rescored = []
    for doc_id, score in block:
        base = (score - lo) / span if span > 0 else 0.0
        cos = profile_document_cosine(p, ix.doc_vector(doc_id))
        rescored.append((doc_id, (1.0 - strategy.beta) * base + strategy.beta * cos))
    rescored.sort(key=lambda item: (-item[1], item[0]))
    return Ranking(query_id=r.query_id, items=tuple(rescored) + tail)
