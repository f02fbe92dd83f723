"""Immutable inverted index with the term statistics the predictors consume.

Statistics kept per term: document frequency df, collection frequency cf,
and the postings list of (doc_id, in-document frequency). Per-document
token counts are kept as well so document/term weight dispersion and
profile-document cosines can be computed without rescanning text.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .text import NormalizationPipeline

INDEX_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Document:
    """One corpus record: unique id, raw text, category label."""

    doc_id: str
    text: str
    category: str = ""


@dataclass(frozen=True)
class TermStats:
    df: int                                # documents containing the term
    cf: int                                # occurrences over the collection
    postings: tuple[tuple[str, int], ...]  # (doc_id, within-doc frequency)


class CorpusIndex:
    """Inverted index over a normalized corpus. Treat as immutable after build.

    Invariants (checked by tests): 1 <= df <= n_docs, cf >= df, postings
    sorted by doc_id, sum of within-doc frequencies equals cf, and the cf
    values over the vocabulary sum to total_tokens.
    """

    def __init__(self, postings: dict[str, tuple[tuple[str, int], ...]],
                 doc_lengths: dict[str, int], doc_categories: dict[str, str],
                 pipeline: NormalizationPipeline):
        self._postings = postings
        self.doc_lengths = doc_lengths
        self.doc_categories = doc_categories
        self.pipeline = pipeline
        self.n_docs = len(doc_lengths)
        self.total_tokens = sum(doc_lengths.values())
        self.df = {t: len(p) for t, p in postings.items()}
        self.cf = {t: sum(f for _, f in p) for t, p in postings.items()}
        self.avg_doc_length = self.total_tokens / self.n_docs if self.n_docs else 0.0
        self.categories = set(doc_categories.values())
        self._doc_vectors: Optional[dict[str, dict[str, int]]] = None
        self._weight_std_cache: dict[str, float] = {}

    @property
    def vocabulary(self):
        return self._postings.keys()

    def __contains__(self, term: str) -> bool:
        return term in self._postings

    def term_stats(self, term: str) -> Optional[TermStats]:
        """Stats for a normalized term, or None when out of vocabulary."""
        p = self._postings.get(term)
        if p is None:
            return None
        return TermStats(df=self.df[term], cf=self.cf[term], postings=p)

    def postings(self, term: str) -> tuple[tuple[str, int], ...]:
        return self._postings.get(term, ())

    def doc_vector(self, doc_id: str) -> dict[str, int]:
        """Term frequency map for one document."""
        if self._doc_vectors is None:
            vecs: dict[str, dict[str, int]] = {d: {} for d in self.doc_lengths}
            for term, plist in self._postings.items():
                for doc_id_, f in plist:
                    vecs[doc_id_][term] = f
            self._doc_vectors = vecs
        return self._doc_vectors[doc_id]

    def term_weight_std(self, term: str) -> float:
        """Spread of the term's tf-idf weights over the documents holding it.

        Per-document weight is (1 + ln f_dt) * ln(1 + N/df); the value is the
        population standard deviation over the term's postings, 0.0 for terms
        appearing in a single document or out of vocabulary.
        """
        cached = self._weight_std_cache.get(term)
        if cached is not None:
            return cached
        plist = self._postings.get(term)
        if not plist:
            return 0.0
        idf_part = math.log(1.0 + self.n_docs / len(plist))
        weights = [(1.0 + math.log(f)) * idf_part for _, f in plist]
        mean = sum(weights) / len(weights)
        var = sum((w - mean) ** 2 for w in weights) / len(weights)
        std = math.sqrt(var)
        self._weight_std_cache[term] = std
        return std

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format_version": INDEX_FORMAT_VERSION,
            "pipeline": self.pipeline.to_dict(),
            "doc_lengths": self.doc_lengths,
            "doc_categories": self.doc_categories,
            "postings": {t: [[d, f] for d, f in p] for t, p in self._postings.items()},
        }

    def save(self, path) -> None:
        """Write the index as deterministic JSON (stable across rebuilds)."""
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusIndex":
        version = data.get("format_version")
        if version != INDEX_FORMAT_VERSION:
            raise ValueError(f"unsupported index format version: {version!r}")
        postings = {t: tuple((d, int(f)) for d, f in p)
                    for t, p in data["postings"].items()}
        return cls(postings=postings,
                   doc_lengths={d: int(n) for d, n in data["doc_lengths"].items()},
                   doc_categories=dict(data["doc_categories"]),
                   pipeline=NormalizationPipeline.from_dict(data["pipeline"]))

    @classmethod
    def load(cls, path) -> "CorpusIndex":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def build_index(documents: Sequence[Document],
                pipeline: NormalizationPipeline) -> CorpusIndex:
    """Normalize documents and build the index.

    Raises ValueError on duplicate doc ids or an empty corpus (every
    downstream statistic divides by the document count).
    """
    docs = list(documents)
    if not docs:
        raise ValueError("cannot index an empty corpus")
    seen: set[str] = set()
    for doc in docs:
        if doc.doc_id in seen:
            raise ValueError(f"duplicate doc_id: {doc.doc_id!r}")
        seen.add(doc.doc_id)

    per_term: dict[str, dict[str, int]] = {}
    doc_lengths: dict[str, int] = {}
    doc_categories: dict[str, str] = {}
    for doc in docs:
        tokens = pipeline.normalize(doc.text)
        doc_lengths[doc.doc_id] = len(tokens)
        doc_categories[doc.doc_id] = doc.category
        for tok in tokens:
            counts = per_term.setdefault(tok, {})
            counts[doc.doc_id] = counts.get(doc.doc_id, 0) + 1

    postings = {term: tuple(sorted(counts.items()))
                for term, counts in sorted(per_term.items())}
    return CorpusIndex(postings=postings, doc_lengths=doc_lengths,
                       doc_categories=doc_categories, pipeline=pipeline)
