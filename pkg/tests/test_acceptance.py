"""Acceptance suite: one test per release criterion, each printing a
PASS line with its measured numbers when it holds."""

import math
import random
import time

import numpy as np
import pytest

from persogate.correlation import (correlation_table, kendall, pearson,
                                   select_top, spearman, summarize)
from persogate.decision import (DecisionRow, ProfileAggregates,
                                assemble_gain_report, evaluate_kfold,
                                gain_report, prepare_rows)
from persogate.evaluation import build_triplets, count_by_profile, ndcg_at_k
from persogate.index import build_index
from persogate.predictors import (ExpansionPolicy, PREDICTOR_NAMES, Query,
                                  UserProfile, compute_all)
from persogate.ranking import Ranking
from persogate.synthetic import generate_synthetic_corpus
from persogate.text import NormalizationPipeline

from conftest import indexed_random_corpus
from reference import (naive_kendall, naive_pearson, naive_predictors,
                       naive_spearman)


def _random_query_profile(rng, vocab):
    q_tokens = [rng.choice(vocab + ["oovq"]) for _ in range(rng.randint(0, 6))]
    terms = {t: rng.uniform(0.1, 2.0)
             for t in rng.sample(vocab, min(len(vocab), rng.randint(0, 8)))}
    return q_tokens, terms


def test_c1_predictor_oracle_equivalence(identity_pipeline):
    started = time.time()
    rng = random.Random(20240901)
    checked = 0
    for _ in range(100):
        docs, vocab, ix = indexed_random_corpus(rng, identity_pipeline,
                                                max_docs=50, max_vocab=200)
        doc_tokens = {d.doc_id: d.text.split() for d in docs}
        q_tokens, terms = _random_query_profile(rng, vocab)
        k = rng.randint(0, 10)
        vector = compute_all(Query.from_tokens(q_tokens),
                             UserProfile("p", terms), ix,
                             ExpansionPolicy(k=k), alpha=0.75)
        expected = naive_predictors(doc_tokens, q_tokens, terms, k=k,
                                    alpha=0.75)
        for name in PREDICTOR_NAMES:
            assert getattr(vector, name) == pytest.approx(
                expected[name], rel=1e-9, abs=1e-12), name
            checked += 1
    elapsed = time.time() - started
    assert elapsed < 60.0
    print(f"\nPASS criterion 1: {checked} predictor values equal the naive "
          f"reference on 100 random corpora (rel 1e-9) in {elapsed:.1f}s")


def test_c2_internal_identities(identity_pipeline):
    rng = random.Random(20240902)
    instances = 0
    for _ in range(100):
        docs, vocab, ix = indexed_random_corpus(rng, identity_pipeline,
                                                max_docs=30, max_vocab=60)
        q_tokens, terms = _random_query_profile(rng, vocab)
        q = Query.from_tokens(q_tokens)
        profile = UserProfile("p", terms)
        v = compute_all(q, profile, ix, ExpansionPolicy(k=rng.randint(0, 6)),
                        alpha=0.75)
        count = sum(1 for t in q.tokens if t in ix)
        expanded_count = None
        for fam in ("IDF", "ICTF", "SCQ", "VAR"):
            assert getattr(v, f"sum{fam}") == pytest.approx(
                getattr(v, f"avg{fam}") * count, rel=1e-12, abs=1e-12)
        assert v.joint == pytest.approx(0.75 * v.maxSCQ + 0.25 * v.sumVAR,
                                        rel=1e-12, abs=1e-15)
        assert v.joint2 == pytest.approx(0.75 * v.maxSCQ + 0.25 * v.maxVAR,
                                         rel=1e-12, abs=1e-15)
        assert v.profIDF == pytest.approx(v.avgIDFQP - v.avgIDF, abs=1e-12)
        assert v.profICTF == pytest.approx(v.avgICTFQP - v.avgICTF, abs=1e-12)
        assert v.profSCQ == pytest.approx(v.avgSCQQP - v.avgSCQ, abs=1e-12)
        assert v.profVAR == pytest.approx(v.avgVARQP - v.avgVAR, abs=1e-12)
        # an empty expansion reduces every QP value to its base value
        empty = compute_all(q, UserProfile("none", {}), ix,
                            ExpansionPolicy(k=rng.randint(0, 6)), alpha=0.75)
        zero_k = compute_all(q, profile, ix, ExpansionPolicy(k=0), alpha=0.75)
        for variant in (empty, zero_k):
            for name in PREDICTOR_NAMES:
                if name.endswith("QP") and name != "cosineQP":
                    assert getattr(variant, name) == getattr(variant,
                                                             name[:-2]), name
            assert variant.profIDF == variant.profICTF == 0.0
            assert variant.profSCQ == variant.profVAR == 0.0
        instances += 1
    print(f"\nPASS criterion 2: sum/avg, prof-difference, interpolation and "
          f"empty-expansion identities exact (1e-12) on {instances} fuzz "
          f"instances")


def test_c3_ndcg_properties():
    def ranking(order):
        return Ranking(query_id="q", items=tuple(
            (d, float(len(order) - i)) for i, d in enumerate(order)))

    assert ndcg_at_k(ranking(["a", "b", "c"]), {"a": 3, "b": 2, "c": 1},
                     k=50) == 1.0
    assert ndcg_at_k(ranking(["x", "y"]), {"a": 1}, k=50) == 0.0
    assert ndcg_at_k(ranking(["other", "hit"]), {"hit": 1},
                     k=50) == pytest.approx(1 / math.log2(3), abs=1e-9)

    rng = random.Random(20240903)
    swaps = 0
    while swaps < 1000:
        n = rng.randint(2, 30)
        docs = [f"d{i}" for i in range(n)]
        rel = {d: rng.randint(0, 3) for d in docs}
        order = docs[:]
        rng.shuffle(order)
        i, j = sorted(rng.sample(range(n), 2))
        if rel[order[i]] >= rel[order[j]]:
            continue
        before = ndcg_at_k(ranking(order), rel, k=10)
        order[i], order[j] = order[j], order[i]
        after = ndcg_at_k(ranking(order), rel, k=10)
        assert after >= before - 1e-12
        swaps += 1
    print("\nPASS criterion 3: NDCG perfect=1.0, miss=0.0, rank-2 hand case "
          "within 1e-9, and 1000 monotone swaps never decreased the score")


def test_c4_correlation_correctness():
    assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0, abs=1e-9)
    assert pearson([1, 2, 3], [6, 4, 2]) == pytest.approx(-1.0, abs=1e-9)
    assert pearson([1, 2, 3], [1, 1, 2]) == pytest.approx(
        math.sqrt(3) / 2, abs=1e-9)
    assert spearman([1, 2, 3, 4], [5, 6, 9, 20]) == pytest.approx(1.0,
                                                                  abs=1e-9)
    assert kendall([1, 2, 3], [6, 5, 4]) == pytest.approx(-1.0, abs=1e-9)

    rng = random.Random(20240904)
    series = 0
    for _ in range(100):
        n = rng.randint(2, 30)
        x = [rng.randint(0, 6) * 0.25 for _ in range(n)]
        y = [rng.randint(0, 6) * 0.25 for _ in range(n)]
        for mine, oracle in ((pearson, naive_pearson),
                             (spearman, naive_spearman),
                             (kendall, naive_kendall)):
            got, expected = mine(x, y), oracle(x, y)
            if expected is None:
                assert got is None
            else:
                assert got == pytest.approx(expected, abs=1e-9)
        series += 1
    print(f"\nPASS criterion 4: closed-form cases within 1e-9 and all three "
          f"coefficients match pair-count/rank oracles on {series} tied "
          f"series")


# published per-profile averages: (avg_perso, ideal, cls, reg) and the
# percent-gain columns they must reproduce
USER_STUDY_TABLE = {
    "administration": (0.608051, 0.644634, 0.570279, 0.592527,
                       6.01644, -6.21198, -2.55308),
    "agriculture": (0.79087, 0.810896, 0.774176, 0.774176,
                    2.53215, -2.11084, -2.11084),
    "culture": (0.638095, 0.718654, 0.689769, 0.689769,
                12.62492, 8.09817, 8.09817),
    "economy": (0.40522, 0.545995, 0.474091, 0.421873,
                34.74039, 16.99595, 4.10962),
    "education": (0.563201, 0.592569, 0.563201, 0.563201,
                  5.21448, 0.0, 0.0),
    "employment": (0.617909, 0.656129, 0.614254, 0.627099,
                   6.18538, -0.59151, 1.48727),
    "environment": (0.611982, 0.687295, 0.641862, 0.658471,
                    12.30641, 4.8825, 7.59647),
    "health": (0.717045, 0.722, 0.717045, 0.717045,
               0.7132, 0.0, 0.0),
}
USER_STUDY_MEAN = (0.619047, 0.672291, 0.630585, 0.63052,
                   10.04167, 2.63279, 2.07845)
USER_STUDY_SHARES = (26.22, 20.70)

# the health ideal average is reported with three decimals instead of six;
# +-0.0005 on that input propagates to +-0.07 on its percent figure, so this
# one cell gets the tolerance its printed precision supports
USER_STUDY_TOLERANCES = {("health", "ideal"): 0.08}

ASPIRE_TABLE = {
    "administration": (0.703849, 0.736331, 0.719888, 0.716649,
                       4.61491, 2.27876, 1.81857),
    "agriculture": (0.834488, 0.858497, 0.823421, 0.846435,
                    2.87709, -1.3262, 1.43166),
    "culture": (0.782663, 0.80918, 0.793442, 0.794417,
                3.38805, 1.37722, 1.5018),
    "economy": (0.688553, 0.724375, 0.699786, 0.705563,
                5.2025, 1.63139, 2.4704),
    "education": (0.841959, 0.844191, 0.84129, 0.842851,
                  0.2651, -0.07946, 0.10594),
    "employment": (0.779812, 0.78025, 0.779812, 0.779812,
                   0.05617, 0.0, 0.0),
    "environment": (0.801694, 0.804977, 0.80154, 0.80154,
                    0.40951, -0.01921, -0.01921),
    "health": (0.818913, 0.82685, 0.811543, 0.816464,
               0.96921, -0.89997, -0.29905),
}
ASPIRE_MEAN = (0.781491, 0.798081, 0.783840, 0.787966,
               2.22282, 0.37032, 0.87626)
ASPIRE_SHARES = (16.66, 39.42)


def _check_published_table(table, mean_vals, shares, tolerances=None):
    tolerances = tolerances or {}
    aggregates = [ProfileAggregates(pid, avg_perso=v[0], ideal_avg=v[1],
                                    cls_avg=v[2], reg_avg=v[3])
                  for pid, v in table.items()]
    report = assemble_gain_report(aggregates)
    cells = 0
    for pid, v in table.items():
        row = report.row(pid)
        for column, got, expected in (("ideal", row.ideal_gain, v[4]),
                                      ("cls", row.cls_gain, v[5]),
                                      ("reg", row.reg_gain, v[6])):
            tol = tolerances.get((pid, column), 0.01)
            assert got == pytest.approx(expected, abs=tol), (pid, column)
            cells += 1
    mean = report.mean_row
    for got, expected in zip((mean.avg_perso, mean.ideal_avg, mean.cls_avg,
                              mean.reg_avg, mean.ideal_gain, mean.cls_gain,
                              mean.reg_gain),
                             mean_vals[:4] + mean_vals[4:]):
        assert got == pytest.approx(expected, abs=0.01)
        cells += 1
    assert report.cls_ideal_share == pytest.approx(shares[0], abs=0.01)
    assert report.reg_ideal_share == pytest.approx(shares[1], abs=0.01)
    return cells + 2


def test_c5_published_gain_arithmetic():
    cells = _check_published_table(USER_STUDY_TABLE, USER_STUDY_MEAN,
                                   USER_STUDY_SHARES,
                                   USER_STUDY_TOLERANCES)
    cells += _check_published_table(ASPIRE_TABLE, ASPIRE_MEAN, ASPIRE_SHARES)
    print(f"\nPASS criterion 5: {cells} published percent-gain cell "
          f"relationships reproduced to 0.01 (one three-decimal input cell "
          f"at its printed precision, 0.08), including the 26.22% and "
          f"39.42% ideal-gain shares")


def test_c6_planted_signal_end_to_end():
    started = time.time()
    pipeline = NormalizationPipeline()
    data = generate_synthetic_corpus(seed=314, categories=3,
                                     docs_per_category=24,
                                     vocab_per_category=60, noise_ratio=0.5)
    ix = build_index(data.documents, pipeline)
    queries = {qid: Query.from_text(t, pipeline) for qid, t in data.queries}
    policy = ExpansionPolicy(k=10)
    vectors = {(p.profile_id, qid): compute_all(q, p, ix, policy)
               for p in data.profiles for qid, q in queries.items()}

    # plant the target: personalization gain rises monotonically with the
    # query/profile cosine, plus small noise
    rng = random.Random(271)
    rows = []
    for (pid, qid), v in sorted(vectors.items()):
        diff = 0.5 * (v.cosineQP - 0.06) + rng.uniform(-0.015, 0.015)
        rows.append(DecisionRow(profile_id=pid, query_id=qid,
                                features=v.as_dict(), diff_perso=diff,
                                ndcg_orig=0.5, ndcg_perso=0.5 + diff))
    rows = prepare_rows(rows)

    table = correlation_table(
        [(r.profile_id, dict(r.features), r.diff_perso) for r in rows])
    top = select_top(summarize(table), 10)
    assert top[0] == "cosineQP"

    outcomes = {"regression": evaluate_kfold(rows, 10, "regression", seed=99)}
    report = gain_report(rows, outcomes)
    assert report.mean_row.ideal_gain > 0
    assert report.reg_ideal_share >= 70.0
    elapsed = time.time() - started
    assert elapsed < 300.0
    print(f"\nPASS criterion 6: cosineQP selected first and the 10-fold "
          f"regression model captured {report.reg_ideal_share:.1f}% of the "
          f"ideal gain (>= 70%) in {elapsed:.0f}s")


def test_c7_pipeline_determinism(tmp_path):
    from click.testing import CliRunner
    from persogate.cli import main as cli_main

    def run(out_root):
        data = out_root / "data"
        work = out_root / "work"
        runner = CliRunner()
        steps = [
            ["synth", "--seed", "21", "--categories", "2",
             "--docs-per-category", "8", "--out", str(data)],
            ["index", "--corpus", str(data / "corpus.jsonl"),
             "--out", str(work)],
            ["predict", "--index", str(work / "index.json"), "--queries",
             str(data / "queries.tsv"), "--profiles",
             str(data / "profiles.tsv"), "--out", str(work)],
            ["evaluate", "--index", str(work / "index.json"), "--queries",
             str(data / "queries.tsv"), "--profiles",
             str(data / "profiles.tsv"), "--mode", "aspire", "--no-figures",
             "--out", str(work)],
            ["correlate", "--predictors", str(work / "predictors.csv"),
             "--triplets", str(work / "triplets.csv"), "--no-figures",
             "--out", str(work)],
            ["decide", "--predictors", str(work / "predictors.csv"),
             "--triplets", str(work / "triplets.csv"), "--protocol", "kfold",
             "--folds", "2", "--seed", "9", "--top-n", "5", "--no-figures",
             "--out", str(work)],
        ]
        for args in steps:
            result = runner.invoke(cli_main, args)
            assert result.exit_code == 0, f"{args}: {result.output}"
        return work

    work_a = run(tmp_path / "a")
    work_b = run(tmp_path / "b")
    compared = []
    for path_a in sorted(work_a.rglob("*")):
        if path_a.suffix not in (".csv", ".json", ".txt"):
            continue
        path_b = work_b / path_a.relative_to(work_a)
        assert path_b.exists(), path_b
        assert path_a.read_bytes() == path_b.read_bytes(), path_a.name
        compared.append(path_a.name)
    assert "predictors.csv" in compared and "gains_top5.csv" in compared
    print(f"\nPASS criterion 7: two identical pipeline runs produced "
          f"byte-identical outputs ({len(compared)} files compared)")


def test_c8_triplet_accounting(identity_pipeline):
    pipeline = NormalizationPipeline()
    data = generate_synthetic_corpus(seed=77, categories=3,
                                     docs_per_category=12,
                                     vocab_per_category=60, noise_ratio=0.5)
    ix = build_index(data.documents, pipeline)
    queries = {qid: Query.from_text(t, pipeline) for qid, t in data.queries}
    triplets = build_triplets(queries, list(data.profiles), ix, mode="aspire")

    counts = count_by_profile(triplets)
    assert sum(c.total for c in counts) == len(triplets)
    for c in counts:
        assert c.positive + c.negative + c.zeros == c.total

    rows = prepare_rows([
        DecisionRow(profile_id=t.profile_id, query_id=t.query_id, features={},
                    diff_perso=t.diff_perso, ndcg_orig=t.ndcg_orig,
                    ndcg_perso=t.ndcg_perso) for t in triplets])
    report = gain_report(rows, {})
    for gain_row in report.rows:
        group = [r.ndcg_perso for r in rows
                 if r.profile_id == gain_row.profile_id]
        assert gain_row.avg_perso == float(np.mean(group))  # exact
        assert gain_row.ideal_avg >= gain_row.avg_perso
    print(f"\nPASS criterion 8: sign counts sum to profile totals and the "
          f"always-personalize baseline equals mean personalized NDCG "
          f"exactly over {len(counts)} profiles")
