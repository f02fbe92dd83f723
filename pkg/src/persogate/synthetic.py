"""Deterministic synthetic corpora for desk-scale experiments.

Each category owns a disjoint core vocabulary; a shared noise vocabulary
is mixed into documents at a configurable rate. One weighted-keyword
profile is generated per category (its id doubles as the category label,
which is what the automatic assessment protocol expects), and each
document contributes one abstract-like excerpt as a query.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .index import Document
from .predictors import UserProfile
from .text import NormalizationPipeline

_CONSONANTS = "bcdfghjklmnpqrstvwz"
_VOWELS = "aeiou"


@dataclass(frozen=True)
class SyntheticData:
    documents: tuple[Document, ...]
    profiles: tuple[UserProfile, ...]
    queries: tuple[tuple[str, str], ...]  # (query_id, raw text)


def _fresh_term(rng: random.Random, pipeline: NormalizationPipeline,
                taken: set[str]) -> str:
    """Random pronounceable token that the pipeline maps to itself."""
    while True:
        syllables = rng.randint(2, 4)
        word = "".join(rng.choice(_CONSONANTS) + rng.choice(_VOWELS)
                       for _ in range(syllables))
        if word in taken:
            continue
        if pipeline.normalize(word) == [word]:
            taken.add(word)
            return word


def generate_synthetic_corpus(seed: int, categories: int, docs_per_category: int,
                              vocab_per_category: int, noise_ratio: float, *,
                              doc_length: int = 20, query_length: int = 6,
                              profile_terms: int = 6,
                              pipeline: NormalizationPipeline | None = None,
                              ) -> SyntheticData:
    """Build (documents, profiles, queries) deterministically from a seed."""
    if min(categories, docs_per_category, vocab_per_category) < 1:
        raise ValueError("categories, docs_per_category and vocab_per_category "
                         "must all be >= 1")
    if not 0.0 <= noise_ratio <= 1.0:
        raise ValueError(f"noise_ratio must be in [0, 1], got {noise_ratio}")
    if pipeline is None:
        pipeline = NormalizationPipeline()

    rng = random.Random(seed)
    taken: set[str] = set()
    category_names = [f"cat{c:02d}" for c in range(categories)]
    core = {name: [_fresh_term(rng, pipeline, taken)
                   for _ in range(vocab_per_category)]
            for name in category_names}
    noise_vocab = [_fresh_term(rng, pipeline, taken)
                   for _ in range(max(1, vocab_per_category))]

    documents = []
    queries = []
    for name in category_names:
        for d in range(docs_per_category):
            tokens = []
            for _ in range(doc_length):
                if noise_ratio > 0 and rng.random() < noise_ratio:
                    tokens.append(rng.choice(noise_vocab))
                else:
                    tokens.append(rng.choice(core[name]))
            doc_id = f"{name}-{d:04d}"
            documents.append(Document(doc_id=doc_id, text=" ".join(tokens),
                                      category=name))
            start = rng.randint(0, max(0, len(tokens) - query_length))
            excerpt = tokens[start: start + query_length]
            queries.append((f"q-{doc_id}", " ".join(excerpt)))

    profiles = []
    n_shared = round(min(profile_terms, len(noise_vocab)) * noise_ratio)
    for name in category_names:
        n_terms = min(profile_terms, vocab_per_category)
        terms = rng.sample(core[name], n_terms)
        # profiles learned from documents pick up common terms as well;
        # these let personalization promote wrong-category documents
        shared = rng.sample(noise_vocab, n_shared)
        weights = {t: round(rng.uniform(0.2, 1.0), 6) for t in sorted(terms)}
        for t in sorted(shared):
            weights[t] = round(rng.uniform(0.2, 1.0), 6)
        profiles.append(UserProfile(profile_id=name, terms=weights))

    return SyntheticData(documents=tuple(documents), profiles=tuple(profiles),
                         queries=tuple(queries))
