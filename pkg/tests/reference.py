"""Naive reference implementations used as test oracles.

Everything here recomputes results from raw inputs with plain loops and
no shared code with the package, so agreement is meaningful evidence.
"""

from __future__ import annotations

import math
from itertools import combinations


# -- predictor oracle ---------------------------------------------------------


def corpus_stats(doc_tokens: dict[str, list[str]]):
    """(N, total_tokens, df, cf, tf) recomputed by scanning every document."""
    n = len(doc_tokens)
    total = sum(len(toks) for toks in doc_tokens.values())
    df: dict[str, int] = {}
    cf: dict[str, int] = {}
    tf: dict[str, dict[str, int]] = {}
    for doc_id, toks in doc_tokens.items():
        seen = set()
        for t in toks:
            cf[t] = cf.get(t, 0) + 1
            tf.setdefault(t, {}).setdefault(doc_id, 0)
            tf[t][doc_id] += 1
            seen.add(t)
        for t in seen:
            df[t] = df.get(t, 0) + 1
    return n, total, df, cf, tf


def _sum_avg_max(values):
    if not values:
        return 0.0, 0.0, 0.0
    return sum(values), sum(values) / len(values), max(values)


def _var_term(term, n, df, tf):
    docs = tf[term]
    weights = [(1 + math.log(f)) * math.log(1 + n / df[term])
               for _, f in sorted(docs.items())]
    mean = sum(weights) / len(weights)
    return math.sqrt(sum((w - mean) ** 2 for w in weights) / len(weights))


def _blocks(tokens, n, total, df, cf, tf):
    in_vocab = [t for t in tokens if t in df]
    idf = _sum_avg_max([math.log(n / df[t]) for t in in_vocab])
    ictf = _sum_avg_max([math.log(total / cf[t]) for t in in_vocab])
    scq = _sum_avg_max([(1 + math.log(cf[t])) * math.log(1 + n / df[t])
                        for t in in_vocab])
    var = _sum_avg_max([_var_term(t, n, df, tf) for t in in_vocab])
    if tokens:
        scs = math.log(1 / len(tokens)) + ictf[1]
    else:
        scs = 0.0
    return idf, ictf, scs, scq, var


def naive_predictors(doc_tokens: dict[str, list[str]], query_tokens: list[str],
                     profile: dict[str, float], k: int,
                     alpha: float) -> dict[str, float]:
    """All 37 predictor values recomputed from scratch."""
    n, total, df, cf, tf = corpus_stats(doc_tokens)

    idf, ictf, scs, scq, var = _blocks(query_tokens, n, total, df, cf, tf)
    joint = alpha * scq[2] + (1 - alpha) * var[0]
    joint2 = alpha * scq[2] + (1 - alpha) * var[2]

    # cosine between query term counts and profile weights
    qw: dict[str, float] = {}
    for t in query_tokens:
        qw[t] = qw.get(t, 0.0) + 1.0
    dot = sum(w * profile[t] for t, w in qw.items() if t in profile)
    if dot and query_tokens and profile:
        cos = dot / (math.sqrt(sum(w * w for w in qw.values()))
                     * math.sqrt(sum(w * w for w in profile.values())))
    else:
        cos = 0.0

    # expansion: top-k profile terms by (weight desc, name asc), new only
    ranked = sorted(profile.items(), key=lambda kv: (-kv[1], kv[0]))
    extra = [t for t, _ in ranked if t not in set(query_tokens)][:k]
    expanded = list(query_tokens) + extra

    idf2, ictf2, scs2, scq2, var2 = _blocks(expanded, n, total, df, cf, tf)
    joint_qp = alpha * scq2[2] + (1 - alpha) * var2[0]
    joint2_qp = alpha * scq2[2] + (1 - alpha) * var2[2]

    out = {
        "numQT": float(len(query_tokens)),
        "avgQL": (sum(len(t) for t in query_tokens) / len(query_tokens)
                  if query_tokens else 0.0),
        "sumIDF": idf[0], "avgIDF": idf[1], "maxIDF": idf[2],
        "sumICTF": ictf[0], "avgICTF": ictf[1], "maxICTF": ictf[2],
        "SCS": scs,
        "sumSCQ": scq[0], "avgSCQ": scq[1], "maxSCQ": scq[2],
        "sumVAR": var[0], "avgVAR": var[1], "maxVAR": var[2],
        "joint": joint, "joint2": joint2,
        "cosineQP": cos,
        "sumIDFQP": idf2[0], "avgIDFQP": idf2[1], "maxIDFQP": idf2[2],
        "sumICTFQP": ictf2[0], "avgICTFQP": ictf2[1], "maxICTFQP": ictf2[2],
        "SCSQP": scs2,
        "sumSCQQP": scq2[0], "avgSCQQP": scq2[1], "maxSCQQP": scq2[2],
        "sumVARQP": var2[0], "avgVARQP": var2[1], "maxVARQP": var2[2],
        "jointQP": joint_qp, "joint2QP": joint2_qp,
        "profIDF": idf2[1] - idf[1],
        "profICTF": ictf2[1] - ictf[1],
        "profSCQ": scq2[1] - scq[1],
        "profVAR": var2[1] - var[1],
    }
    return out


# -- retrieval oracle ---------------------------------------------------------


def naive_bm25_ranking(doc_tokens: dict[str, list[str]], query_tokens,
                       k1: float = 1.2, b: float = 0.75):
    """Exhaustive BM25 over all documents; (doc_id, score) sorted."""
    n = len(doc_tokens)
    avgdl = sum(len(t) for t in doc_tokens.values()) / n
    df: dict[str, int] = {}
    for toks in doc_tokens.values():
        for t in set(toks):
            df[t] = df.get(t, 0) + 1
    qw: dict[str, float] = {}
    for t in query_tokens:
        qw[t] = qw.get(t, 0.0) + 1.0
    scored = []
    for doc_id, toks in doc_tokens.items():
        score = 0.0
        for t, qtf in sorted(qw.items()):
            f = toks.count(t)
            if f == 0 or t not in df:
                continue
            idf = math.log(1 + (n - df[t] + 0.5) / (df[t] + 0.5))
            score += qtf * idf * f * (k1 + 1) / (
                f + k1 * (1 - b + b * len(toks) / avgdl))
        if score > 0:
            scored.append((doc_id, score))
    scored.sort(key=lambda x: (-x[1], x[0]))
    return scored


# -- correlation oracles ------------------------------------------------------


def naive_pearson(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        return None
    return sxy / math.sqrt(sxx * syy)


def naive_midranks(a):
    ranks = [0.0] * len(a)
    sorted_vals = sorted(a)
    for i, v in enumerate(a):
        lo = sorted_vals.index(v) + 1
        hi = lo + sorted_vals.count(v) - 1
        ranks[i] = (lo + hi) / 2
    return ranks


def naive_spearman(x, y):
    return naive_pearson(naive_midranks(x), naive_midranks(y))


def naive_kendall(x, y):
    """Tau-b by exhaustive pair enumeration."""
    n = len(x)
    concordant = discordant = tied_x = tied_y = 0
    for i, j in combinations(range(n), 2):
        dx = x[i] - x[j]
        dy = y[i] - y[j]
        if dx == 0 and dy == 0:
            tied_x += 1
            tied_y += 1
        elif dx == 0:
            tied_x += 1
        elif dy == 0:
            tied_y += 1
        elif dx * dy > 0:
            concordant += 1
        else:
            discordant += 1
    n0 = n * (n - 1) // 2
    denom = math.sqrt((n0 - tied_x) * (n0 - tied_y))
    if denom == 0:
        return None
    return (concordant - discordant) / denom
