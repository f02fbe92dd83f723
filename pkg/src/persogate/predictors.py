"""The 37 pre-retrieval personalization-performance predictors.

Seventeen query/collection predictors (term counts, idf/ictf/clarity,
collection similarity, term-weight dispersion and their interpolations),
the query-profile cosine, fifteen variants of the collection predictors
recomputed on the profile-expanded query (QP suffix), and four deltas
between expanded and original averages (prof prefix).

Conventions, applied uniformly:
  * natural logarithms everywhere;
  * sums and maxima run over the query token multiset, skipping tokens
    that are out of the collection vocabulary;
  * averages divide by the number of in-vocabulary tokens (with
    multiplicity), not the raw query length;
  * degenerate inputs (empty query, empty profile, all tokens out of
    vocabulary) yield 0.0 rather than errors, so every (query, profile)
    pair produces a usable feature row.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, fields
from typing import Mapping, Optional

from .index import CorpusIndex
from .text import NormalizationPipeline

DEFAULT_ALPHA = 0.75
DEFAULT_EXPANSION_TERMS = 10


@dataclass(frozen=True)
class Query:
    """A normalized query: token multiset plus per-term weights.

    Default weights are in-query term counts; they only feed the
    query-profile cosine.
    """

    raw: str
    tokens: tuple[str, ...]
    weights: Mapping[str, float]

    @classmethod
    def from_text(cls, raw: str, pipeline: NormalizationPipeline) -> "Query":
        tokens = tuple(pipeline.normalize(raw))
        return cls(raw=raw, tokens=tokens, weights=dict(Counter(tokens)))

    @classmethod
    def from_tokens(cls, tokens, weights=None) -> "Query":
        tokens = tuple(tokens)
        if weights is None:
            weights = dict(Counter(tokens))
        return cls(raw=" ".join(tokens), tokens=tokens, weights=weights)


@dataclass(frozen=True)
class UserProfile:
    """Weighted keyword profile; terms share the corpus pipeline."""

    profile_id: str
    terms: Mapping[str, float]

    def __post_init__(self):
        for term, weight in self.terms.items():
            if not weight > 0:
                raise ValueError(
                    f"profile {self.profile_id!r}: nonpositive weight for {term!r}")


@dataclass(frozen=True)
class ExpansionPolicy:
    """How many top-weighted profile terms to append to the query.

    Expansion terms enter with weight 1; k=0 leaves the query untouched.
    """

    k: int = DEFAULT_EXPANSION_TERMS

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"expansion term count must be >= 0, got {self.k}")


@dataclass(frozen=True)
class PredictorVector:
    numQT: float
    avgQL: float
    sumIDF: float
    avgIDF: float
    maxIDF: float
    sumICTF: float
    avgICTF: float
    maxICTF: float
    SCS: float
    sumSCQ: float
    avgSCQ: float
    maxSCQ: float
    sumVAR: float
    avgVAR: float
    maxVAR: float
    joint: float
    joint2: float
    cosineQP: float
    sumIDFQP: float
    avgIDFQP: float
    maxIDFQP: float
    sumICTFQP: float
    avgICTFQP: float
    maxICTFQP: float
    SCSQP: float
    sumSCQQP: float
    avgSCQQP: float
    maxSCQQP: float
    sumVARQP: float
    avgVARQP: float
    maxVARQP: float
    jointQP: float
    joint2QP: float
    profIDF: float
    profICTF: float
    profSCQ: float
    profVAR: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PREDICTOR_NAMES}


PREDICTOR_NAMES: tuple[str, ...] = tuple(f.name for f in fields(PredictorVector))


def _family(q: Query, ix: CorpusIndex, per_term) -> tuple[float, float, float]:
    """(sum, avg, max) of a per-term value over in-vocabulary query tokens."""
    values = [per_term(t) for t in q.tokens if t in ix]
    if not values:
        return 0.0, 0.0, 0.0
    total = sum(values)
    return total, total / len(values), max(values)


def num_query_terms(q: Query) -> int:
    """Token count of the normalized query (multiset size)."""
    return len(q.tokens)


def avg_query_length(q: Query) -> float:
    """Mean character length of the query tokens; 0 for an empty query."""
    if not q.tokens:
        return 0.0
    return sum(len(t) for t in q.tokens) / len(q.tokens)


def idf_family(q: Query, ix: CorpusIndex) -> tuple[float, float, float]:
    """(sum, avg, max) of ln(N / df) over in-vocabulary query tokens."""
    n = ix.n_docs
    return _family(q, ix, lambda t: math.log(n / ix.df[t]))


def ictf_family(q: Query, ix: CorpusIndex) -> tuple[float, float, float]:
    """(sum, avg, max) of ln(total_tokens / cf) over in-vocabulary tokens."""
    total = ix.total_tokens
    return _family(q, ix, lambda t: math.log(total / ix.cf[t]))


def simplified_clarity(q: Query, ix: CorpusIndex) -> float:
    """ln(1/numQT) + avgICTF; 0 for an empty query."""
    n = num_query_terms(q)
    if n == 0:
        return 0.0
    return math.log(1.0 / n) + ictf_family(q, ix)[1]


def _scq_term(ix: CorpusIndex, t: str) -> float:
    return (1.0 + math.log(ix.cf[t])) * math.log(1.0 + ix.n_docs / ix.df[t])


def scq_family(q: Query, ix: CorpusIndex) -> tuple[float, float, float]:
    """(sum, avg, max) of (1 + ln cf) * ln(1 + N/df) per query token."""
    return _family(q, ix, lambda t: _scq_term(ix, t))


def var_family(q: Query, ix: CorpusIndex) -> tuple[float, float, float]:
    """(sum, avg, max) of the per-term document weight dispersion."""
    return _family(q, ix, ix.term_weight_std)


def joint_pair(max_scq: float, sum_var: float, max_var: float,
               alpha: float = DEFAULT_ALPHA) -> tuple[float, float]:
    """Interpolations alpha*maxSCQ + (1-alpha)*sumVAR / ...*maxVAR."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"interpolation weight must be in [0, 1], got {alpha}")
    return (alpha * max_scq + (1.0 - alpha) * sum_var,
            alpha * max_scq + (1.0 - alpha) * max_var)


def cosine_query_profile(q: Query, p: UserProfile) -> float:
    """Cosine between the weighted query and profile term vectors.

    1.0 only for parallel vectors on identical support, 0.0 for disjoint
    supports or when either side is empty.
    """
    if not q.tokens or not p.terms:
        return 0.0
    dot = sum(w * p.terms[t] for t, w in q.weights.items() if t in p.terms)
    if dot == 0.0:
        return 0.0
    qn = math.sqrt(sum(w * w for w in q.weights.values()))
    pn = math.sqrt(sum(w * w for w in p.terms.values()))
    return dot / (qn * pn)


def expand_query(q: Query, p: UserProfile,
                 policy: ExpansionPolicy = ExpansionPolicy()) -> Query:
    """Append the top-k profile terms (by weight, ties lexicographic).

    Terms already present in the query are skipped; expansion terms carry
    weight 1.
    """
    present = set(q.tokens)
    ranked = sorted(p.terms.items(), key=lambda kv: (-kv[1], kv[0]))
    extra = [t for t, _ in ranked if t not in present][: policy.k]
    weights = dict(q.weights)
    for t in extra:
        weights[t] = 1.0
    return Query(raw=q.raw, tokens=q.tokens + tuple(extra), weights=weights)


@dataclass(frozen=True)
class _BaseBlock:
    """The fifteen collection-statistics values for one token list."""

    idf: tuple[float, float, float]
    ictf: tuple[float, float, float]
    scs: float
    scq: tuple[float, float, float]
    var: tuple[float, float, float]
    joint: float
    joint2: float


def _base_block(q: Query, ix: CorpusIndex, alpha: float) -> _BaseBlock:
    idf = idf_family(q, ix)
    ictf = ictf_family(q, ix)
    scq = scq_family(q, ix)
    var = var_family(q, ix)
    joint, joint2 = joint_pair(scq[2], var[0], var[2], alpha)
    return _BaseBlock(idf=idf, ictf=ictf, scs=simplified_clarity(q, ix),
                      scq=scq, var=var, joint=joint, joint2=joint2)


def compute_all(q: Query, p: UserProfile, ix: CorpusIndex,
                policy: ExpansionPolicy = ExpansionPolicy(),
                alpha: float = DEFAULT_ALPHA) -> PredictorVector:
    """Evaluate the full 37-value vector for one (query, profile) pair."""
    base = _base_block(q, ix, alpha)
    expanded = expand_query(q, p, policy)
    qp = _base_block(expanded, ix, alpha)
    return PredictorVector(
        numQT=float(num_query_terms(q)),
        avgQL=avg_query_length(q),
        sumIDF=base.idf[0], avgIDF=base.idf[1], maxIDF=base.idf[2],
        sumICTF=base.ictf[0], avgICTF=base.ictf[1], maxICTF=base.ictf[2],
        SCS=base.scs,
        sumSCQ=base.scq[0], avgSCQ=base.scq[1], maxSCQ=base.scq[2],
        sumVAR=base.var[0], avgVAR=base.var[1], maxVAR=base.var[2],
        joint=base.joint, joint2=base.joint2,
        cosineQP=cosine_query_profile(q, p),
        sumIDFQP=qp.idf[0], avgIDFQP=qp.idf[1], maxIDFQP=qp.idf[2],
        sumICTFQP=qp.ictf[0], avgICTFQP=qp.ictf[1], maxICTFQP=qp.ictf[2],
        SCSQP=qp.scs,
        sumSCQQP=qp.scq[0], avgSCQQP=qp.scq[1], maxSCQQP=qp.scq[2],
        sumVARQP=qp.var[0], avgVARQP=qp.var[1], maxVARQP=qp.var[2],
        jointQP=qp.joint, joint2QP=qp.joint2,
        profIDF=qp.idf[1] - base.idf[1],
        profICTF=qp.ictf[1] - base.ictf[1],
        profSCQ=qp.scq[1] - base.scq[1],
        profVAR=qp.var[1] - base.var[1],
    )
