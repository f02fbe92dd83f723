import random

import pytest

from persogate.index import Document, build_index
from persogate.text import NormalizationPipeline


@pytest.fixture
def identity_pipeline():
    """No stopwords, no stemming: tokens survive verbatim."""
    return NormalizationPipeline(stopwords=frozenset(), stemmer=None)


@pytest.fixture
def english_pipeline():
    return NormalizationPipeline()


def random_corpus(rng: random.Random, max_docs=50, max_vocab=200,
                  max_doc_len=40, categories=("alpha", "beta")):
    """Random document set over a closed vocabulary, as (docs, vocab)."""
    vocab = [f"t{i:03d}" for i in range(rng.randint(2, max_vocab))]
    docs = []
    for d in range(rng.randint(1, max_docs)):
        length = rng.randint(1, max_doc_len)
        tokens = [rng.choice(vocab) for _ in range(length)]
        docs.append(Document(doc_id=f"d{d:03d}", text=" ".join(tokens),
                             category=rng.choice(categories)))
    return docs, vocab


def indexed_random_corpus(rng: random.Random, identity, **kwargs):
    docs, vocab = random_corpus(rng, **kwargs)
    return docs, vocab, build_index(docs, identity)
