"""Text normalization: tokenization, stopword removal, stemming.

The same pipeline must be applied to documents, queries and profile terms
so that index statistics and query tokens live in one vocabulary.
"""

from __future__ import annotations

import re
from typing import Callable, Iterable, Optional

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Compact English stopword list; override with a file for other languages.
DEFAULT_STOPWORDS = frozenset("""
a about above after again against all am an and any are as at be because been
before being below between both but by can did do does doing down during each
few for from further had has have having he her here hers herself him himself
his how i if in into is it its itself just me more most my myself no nor not
now of off on once only or other our ours ourselves out over own same she
should so some such than that the their theirs them themselves then there
these they this those through to too under until up very was we were what when
where which while who whom why will with you your yours yourself yourselves
""".split())


def tokenize(text: str) -> list[str]:
    """Lowercase and split into maximal alphanumeric runs."""
    return _TOKEN_RE.findall(text.lower())


class PorterStemmer:
    """Porter's suffix-stripping algorithm for English.

    Self-contained implementation of the 1980 algorithm (steps 1a-5b).
    Tokens containing digits are left mostly untouched because digits are
    treated as consonants and rarely match any suffix rule.
    """

    _VOWELS = frozenset("aeiou")

    def __call__(self, word: str) -> str:
        if len(word) <= 2:
            return word
        w = self._step1ab(word)
        w = self._step1c(w)
        w = self._step2(w)
        w = self._step3(w)
        w = self._step4(w)
        w = self._step5(w)
        return w

    def _is_cons(self, w: str, i: int) -> bool:
        ch = w[i]
        if ch in self._VOWELS:
            return False
        if ch == "y":
            return i == 0 or not self._is_cons(w, i - 1)
        return True

    def _measure(self, stem: str) -> int:
        """Number of VC sequences in the stem."""
        m = 0
        prev_vowel = False
        for i in range(len(stem)):
            cons = self._is_cons(stem, i)
            if cons and prev_vowel:
                m += 1
            prev_vowel = not cons
        return m

    def _has_vowel(self, stem: str) -> bool:
        return any(not self._is_cons(stem, i) for i in range(len(stem)))

    def _ends_double_cons(self, w: str) -> bool:
        return len(w) >= 2 and w[-1] == w[-2] and self._is_cons(w, len(w) - 1)

    def _ends_cvc(self, w: str) -> bool:
        if len(w) < 3:
            return False
        if not (self._is_cons(w, len(w) - 3) and not self._is_cons(w, len(w) - 2)
                and self._is_cons(w, len(w) - 1)):
            return False
        return w[-1] not in "wxy"

    def _step1ab(self, w: str) -> str:
        if w.endswith("sses"):
            w = w[:-2]
        elif w.endswith("ies"):
            w = w[:-2]
        elif w.endswith("ss"):
            pass
        elif w.endswith("s"):
            w = w[:-1]
        if w.endswith("eed"):
            if self._measure(w[:-3]) > 0:
                w = w[:-1]
        elif w.endswith("ed") and self._has_vowel(w[:-2]):
            w = self._step1b_tail(w[:-2])
        elif w.endswith("ing") and self._has_vowel(w[:-3]):
            w = self._step1b_tail(w[:-3])
        return w

    def _step1b_tail(self, w: str) -> str:
        if w.endswith(("at", "bl", "iz")):
            return w + "e"
        if self._ends_double_cons(w) and not w.endswith(("l", "s", "z")):
            return w[:-1]
        if self._measure(w) == 1 and self._ends_cvc(w):
            return w + "e"
        return w

    def _step1c(self, w: str) -> str:
        if w.endswith("y") and self._has_vowel(w[:-1]):
            return w[:-1] + "i"
        return w

    _STEP2 = (
        ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
        ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
        ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
        ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
        ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
    )
    _STEP3 = (
        ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
        ("ical", "ic"), ("ful", ""), ("ness", ""),
    )
    _STEP4 = (
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
        "ment", "ent", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
    )

    def _step2(self, w: str) -> str:
        for suffix, repl in self._STEP2:
            if w.endswith(suffix):
                stem = w[: -len(suffix)]
                if self._measure(stem) > 0:
                    return stem + repl
                return w
        return w

    def _step3(self, w: str) -> str:
        for suffix, repl in self._STEP3:
            if w.endswith(suffix):
                stem = w[: -len(suffix)]
                if self._measure(stem) > 0:
                    return stem + repl
                return w
        return w

    def _step4(self, w: str) -> str:
        for suffix in self._STEP4:
            if w.endswith(suffix):
                stem = w[: -len(suffix)]
                if suffix == "ion" and not stem.endswith(("s", "t")):
                    continue
                if self._measure(stem) > 1:
                    return stem
                return w
        if w.endswith("ion"):
            stem = w[:-3]
            if stem.endswith(("s", "t")) and self._measure(stem) > 1:
                return stem
        return w

    def _step5(self, w: str) -> str:
        if w.endswith("e"):
            stem = w[:-1]
            m = self._measure(stem)
            if m > 1 or (m == 1 and not self._ends_cvc(stem)):
                w = stem
        if w.endswith("ll") and self._measure(w[:-1]) > 1:
            w = w[:-1]
        return w


class NormalizationPipeline:
    """Tokenize, drop stopwords, stem; idempotent and deterministic.

    Stopwords are filtered both before and after stemming, and the stemmer
    is applied to a fixed point, so normalizing already-normalized terms is
    a no-op.
    """

    def __init__(self, stopwords: Optional[Iterable[str]] = None,
                 stemmer: Optional[Callable[[str], str]] = "porter"):
        if stopwords is None:
            stopwords = DEFAULT_STOPWORDS
        self.stopwords = frozenset(stopwords)
        if stemmer == "porter":
            stemmer = PorterStemmer()
        self.stemmer = stemmer

    @property
    def stemmer_name(self) -> str:
        if self.stemmer is None:
            return "none"
        if isinstance(self.stemmer, PorterStemmer):
            return "porter"
        return getattr(self.stemmer, "name", "custom")

    def stem(self, term: str) -> str:
        if self.stemmer is None:
            return term
        prev = term
        for _ in range(4):  # fixed point; Porter converges in 1-2 passes
            cur = self.stemmer(prev)
            if cur == prev:
                return cur
            prev = cur
        return prev

    def normalize(self, text: str) -> list[str]:
        """Normalized token list for raw text; empty input gives []."""
        out = []
        for tok in tokenize(text):
            if tok in self.stopwords:
                continue
            stemmed = self.stem(tok)
            if stemmed and stemmed not in self.stopwords:
                out.append(stemmed)
        return out

    def normalize_term(self, term: str) -> Optional[str]:
        """Normalize a single term; None if it vanishes (stopword/empty)."""
        toks = self.normalize(term)
        if len(toks) == 1:
            return toks[0]
        if not toks:
            return None
        raise ValueError(f"term {term!r} tokenizes into multiple tokens: {toks}")

    def to_dict(self) -> dict:
        return {"stopwords": sorted(self.stopwords), "stemmer": self.stemmer_name}

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizationPipeline":
        name = data.get("stemmer", "porter")
        if name not in ("porter", "none"):
            raise ValueError(f"unknown stemmer {name!r} in serialized pipeline")
        return cls(stopwords=data.get("stopwords"),
                   stemmer="porter" if name == "porter" else None)


def load_stopwords(path) -> frozenset[str]:
    """Read a stopword file, one term per line; blank lines ignored."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip().lower() for line in fh if line.strip())
