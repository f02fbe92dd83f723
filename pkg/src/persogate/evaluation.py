"""Ranking evaluation: NDCG@k, personalization gain, evaluation triplets.

A triplet couples one (user, profile, query) with its relevance
assessments and the NDCG@50 of both the original and the personalized
ranking; their difference is the quantity every predictor tries to
anticipate. Assessments come either from a supplied file (user-study
mode) or are generated automatically from document categories
(automatic mode: a result is relevant when it sits in the top-threshold
of the original ranking and matches the profile's area of interest).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .index import CorpusIndex
from .predictors import Query, UserProfile
from .ranking import PersonalizationStrategy, Ranking, personalize_rerank, rank

NDCG_CUTOFF = 50
ASPIRE_THRESHOLD = 100

# map doc_id -> nonnegative integer grade; absent means grade 0
RelevanceAssessments = Mapping[str, int]


@dataclass(frozen=True)
class EvaluationTriplet:
    user: str
    profile_id: str
    query_id: str
    assessments: Mapping[str, int]
    ndcg_orig: float
    ndcg_perso: float
    diff_perso: float


def ndcg_at_k(r: Ranking, rel: RelevanceAssessments, k: int = NDCG_CUTOFF) -> float:
    """NDCG@k with gain 2^grade - 1 and log2(rank + 1) discount.

    Returns 0.0 when the assessments contain no relevant document.
    """
    if k < 1:
        raise ValueError(f"cutoff must be >= 1, got {k}")
    dcg = 0.0
    for i, (doc_id, _) in enumerate(r.items[:k]):
        grade = rel.get(doc_id, 0)
        if grade > 0:
            dcg += (2.0 ** grade - 1.0) / math.log2(i + 2)
    ideal = sorted((g for g in rel.values() if g > 0), reverse=True)
    if not ideal:
        return 0.0
    idcg = sum((2.0 ** g - 1.0) / math.log2(i + 2) for i, g in enumerate(ideal[:k]))
    return dcg / idcg


def diff_perso(ndcg_perso: float, ndcg_orig: float) -> float:
    """Personalized minus original NDCG; positive means the user gained."""
    return ndcg_perso - ndcg_orig


def aspire_assess(q: Query, p: UserProfile, ix: CorpusIndex,
                  threshold: int = ASPIRE_THRESHOLD, *,
                  original: Optional[Ranking] = None) -> dict[str, int]:
    """Binary automatic assessments for one (query, profile) pair.

    Grade 1 for documents in the top-`threshold` of the original ranking
    whose category equals the profile id; everything else is grade 0.
    Pass `original` to reuse an already-computed ranking.
    """
    if threshold < 1:
        raise ValueError(f"threshold must be >= 1, got {threshold}")
    if p.profile_id not in ix.categories:
        raise ValueError(
            f"profile {p.profile_id!r} does not name a corpus category")
    if original is None:
        original = rank(q, ix, depth=threshold)
    return {doc_id: 1 for doc_id, _ in original.items[:threshold]
            if ix.doc_categories[doc_id] == p.profile_id}


def build_triplets(queries: Mapping[str, Query], profiles: Sequence[UserProfile],
                   ix: CorpusIndex,
                   strategy: PersonalizationStrategy = PersonalizationStrategy(),
                   mode: str = "aspire",
                   assessments: Optional[Mapping[tuple[str, str], Mapping[str, int]]] = None,
                   cutoff: int = NDCG_CUTOFF,
                   threshold: int = ASPIRE_THRESHOLD) -> list[EvaluationTriplet]:
    """Evaluate both rankings for every (profile, query) pairing.

    In "user-study" mode the pairings are those present in `assessments`
    (keyed by (query_id, profile_id)); in "aspire" mode the full cross
    product is evaluated with automatic assessments. Output is sorted by
    profile then query. The user id mirrors the profile id: the supplied
    assessment format carries no separate user column.
    """
    if mode not in ("user-study", "aspire"):
        raise ValueError(f"unknown evaluation mode: {mode!r}")
    if mode == "user-study":
        if assessments is None:
            raise ValueError("user-study mode requires an assessments mapping")
        unknown = sorted({d for rel in assessments.values() for d in rel
                          if d not in ix.doc_lengths})
        if unknown:
            raise ValueError(f"assessments reference unknown doc_ids: {unknown}")

    depth = max(cutoff, strategy.rerank_depth, threshold)
    profile_by_id = {p.profile_id: p for p in profiles}
    if mode == "user-study":
        pairs = sorted((pid, qid) for qid, pid in assessments.keys())
        for pid, qid in pairs:
            if pid not in profile_by_id:
                raise ValueError(f"assessments reference unknown profile {pid!r}")
            if qid not in queries:
                raise ValueError(f"assessments reference unknown query {qid!r}")
    else:
        pairs = [(pid, qid) for pid in sorted(profile_by_id)
                 for qid in sorted(queries)]

    triplets = []
    original_cache: dict[str, Ranking] = {}
    for pid, qid in pairs:
        query = queries[qid]
        profile = profile_by_id[pid]
        original = original_cache.get(qid)
        if original is None:
            original = rank(query, ix, depth=depth, query_id=qid)
            original_cache[qid] = original
        personalized = personalize_rerank(original, profile, ix, strategy)
        if mode == "user-study":
            rel = assessments[(qid, pid)]
        else:
            rel = aspire_assess(query, profile, ix, threshold, original=original)
        n_orig = ndcg_at_k(original, rel, cutoff)
        n_perso = ndcg_at_k(personalized, rel, cutoff)
        triplets.append(EvaluationTriplet(
            user=pid, profile_id=pid, query_id=qid, assessments=rel,
            ndcg_orig=n_orig, ndcg_perso=n_perso,
            diff_perso=diff_perso(n_perso, n_orig)))
    return triplets


@dataclass(frozen=True)
class TripletCounts:
    profile_id: str
    positive: int
    negative: int
    zeros: int

    @property
    def total(self) -> int:
        return self.positive + self.negative + self.zeros


def count_by_profile(triplets: Sequence[EvaluationTriplet]) -> list[TripletCounts]:
    """Per-profile tally of gained / harmed / unchanged triplets."""
    tally: dict[str, list[int]] = {}
    for t in triplets:
        row = tally.setdefault(t.profile_id, [0, 0, 0])
        if t.diff_perso > 0:
            row[0] += 1
        elif t.diff_perso < 0:
            row[1] += 1
        else:
            row[2] += 1
    return [TripletCounts(pid, pos, neg, zeros)
            for pid, (pos, neg, zeros) in sorted(tally.items())]
