"""Command-line pipeline: index, predict, evaluate, correlate, decide, synth.

Stages communicate through files so every intermediate table can be
audited. Options may come from a YAML config file (--config); explicit
flags win over config values, which win over the built-in defaults.
"""

from __future__ import annotations

import functools
from pathlib import Path

import click
import yaml

from . import decision, formats, plots
from .correlation import METHODS, correlation_table, summarize
from .evaluation import build_triplets, count_by_profile
from .index import CorpusIndex, build_index
from .predictors import (DEFAULT_ALPHA, DEFAULT_EXPANSION_TERMS,
                         ExpansionPolicy, Query, compute_all)
from .ranking import PersonalizationStrategy
from .synthetic import generate_synthetic_corpus
from .text import NormalizationPipeline, load_stopwords

_DEFAULTS = {
    "alpha": DEFAULT_ALPHA,
    "k": DEFAULT_EXPANSION_TERMS,
    "beta": 0.5,
    "rerank_depth": 100,
    "threshold": 100,
    "cutoff": 50,
    "method": "pearson",
    "model": "both",
    "protocol": "kfold",
    "folds": 10,
    "seed": 0,
    "top_n": 10,
    "figures": True,
}


def _load_config(path):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a mapping")
    return data


def _resolver(config_path, kwargs):
    cfg = _load_config(config_path)

    def resolve(name):
        if kwargs.get(name) is not None:
            return kwargs[name]
        if name in cfg:
            return cfg[name]
        return _DEFAULTS.get(name)

    return resolve


def _fail_on_value_error(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValueError as exc:
            raise click.ClickException(str(exc))
    return wrapper


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_queries(path, pipeline) -> dict[str, Query]:
    return {qid: Query.from_text(text, pipeline)
            for qid, text in formats.read_queries(path).items()}


@click.group()
@click.version_option(package_name="persogate")
def main():
    """Predict when personalization helps and gate it per query/profile."""


@main.command("index")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--stopwords", type=click.Path(exists=True),
              help="Stopword file, one term per line (default: bundled English).")
@click.option("--no-stem", is_flag=True, default=False,
              help="Disable stemming.")
@click.option("--out", required=True, type=click.Path())
@click.option("--config", type=click.Path(exists=True))
@_fail_on_value_error
def cmd_index(corpus, stopwords, no_stem, out, config):
    """Build the corpus index and write it to OUT/index.json."""
    del config  # index has no numeric knobs to merge
    pipeline = NormalizationPipeline(
        stopwords=load_stopwords(stopwords) if stopwords else None,
        stemmer=None if no_stem else "porter")
    documents = formats.read_corpus(corpus)
    ix = build_index(documents, pipeline)
    out_dir = _out_dir(out)
    ix.save(out_dir / "index.json")
    click.echo(f"N={ix.n_docs} |V|={len(ix.vocabulary)} |C|={ix.total_tokens}")
    click.echo(f"wrote {out_dir / 'index.json'}")


@main.command("predict")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--queries", required=True, type=click.Path(exists=True))
@click.option("--profiles", required=True, type=click.Path(exists=True))
@click.option("--alpha", type=float, help="Interpolation weight for joint "
              "predictors [default: 0.75].")
@click.option("--k", type=int, help="Profile terms appended to the expanded "
              "query [default: 10].")
@click.option("--out", required=True, type=click.Path())
@click.option("--config", type=click.Path(exists=True))
@_fail_on_value_error
def cmd_predict(index_path, queries, profiles, alpha, k, out, config):
    """Compute the 37-predictor vector per (query, profile) pair."""
    resolve = _resolver(config, {"alpha": alpha, "k": k})
    ix = CorpusIndex.load(index_path)
    query_map = _load_queries(queries, ix.pipeline)
    profile_list = formats.read_profiles(profiles, ix.pipeline)
    policy = ExpansionPolicy(k=int(resolve("k")))
    alpha_v = float(resolve("alpha"))
    rows = []
    for profile in sorted(profile_list, key=lambda p: p.profile_id):
        for qid in sorted(query_map):
            vector = compute_all(query_map[qid], profile, ix, policy, alpha_v)
            rows.append((profile.profile_id, profile.profile_id, qid, vector))
    out_dir = _out_dir(out)
    formats.write_predictors(out_dir / "predictors.csv", rows)
    click.echo(f"wrote {out_dir / 'predictors.csv'} ({len(rows)} rows)")


@main.command("evaluate")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--queries", required=True, type=click.Path(exists=True))
@click.option("--profiles", required=True, type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["aspire", "user-study"]),
              help="Assessment source [default: aspire].")
@click.option("--assessments", type=click.Path(exists=True),
              help="Qrels-style file (user-study mode).")
@click.option("--beta", type=float, help="Personalization interpolation "
              "weight [default: 0.5].")
@click.option("--rerank-depth", type=int, help="Depth of the re-ranked block "
              "[default: 100].")
@click.option("--threshold", type=int, help="Automatic-assessment rank "
              "threshold [default: 100].")
@click.option("--cutoff", type=int, help="NDCG cutoff [default: 50].")
@click.option("--figures/--no-figures", default=None,
              help="Render report figures [default: on].")
@click.option("--out", required=True, type=click.Path())
@click.option("--config", type=click.Path(exists=True))
@_fail_on_value_error
def cmd_evaluate(index_path, queries, profiles, mode, assessments, beta,
                 rerank_depth, threshold, cutoff, figures, out, config):
    """Score original vs personalized rankings and tally the gains."""
    resolve = _resolver(config, {
        "mode": mode, "beta": beta, "rerank_depth": rerank_depth,
        "threshold": threshold, "cutoff": cutoff, "figures": figures,
        "assessments": assessments})
    ix = CorpusIndex.load(index_path)
    query_map = _load_queries(queries, ix.pipeline)
    profile_list = formats.read_profiles(profiles, ix.pipeline)
    mode_v = resolve("mode") or "aspire"
    rel = None
    if mode_v == "user-study":
        path = resolve("assessments")
        if not path:
            raise ValueError("user-study mode requires --assessments")
        rel = formats.read_assessments(path)
    strategy = PersonalizationStrategy(beta=float(resolve("beta")),
                                       rerank_depth=int(resolve("rerank_depth")))
    triplets = build_triplets(query_map, profile_list, ix, strategy,
                              mode=mode_v, assessments=rel,
                              cutoff=int(resolve("cutoff")),
                              threshold=int(resolve("threshold")))
    counts = count_by_profile(triplets)
    out_dir = _out_dir(out)
    formats.write_triplets(out_dir / "triplets.csv", triplets)
    formats.write_counts(out_dir / "counts.csv", counts)
    if resolve("figures"):
        plots.count_bars(counts, out_dir / "counts.png")
    click.echo(f"wrote {out_dir / 'triplets.csv'} ({len(triplets)} triplets)")


@main.command("correlate")
@click.option("--predictors", "predictors_path", required=True,
              type=click.Path(exists=True))
@click.option("--triplets", "triplets_path", required=True,
              type=click.Path(exists=True))
@click.option("--method", type=click.Choice(list(METHODS)),
              help="Correlation coefficient [default: pearson].")
@click.option("--figures/--no-figures", default=None)
@click.option("--out", required=True, type=click.Path())
@click.option("--config", type=click.Path(exists=True))
@_fail_on_value_error
def cmd_correlate(predictors_path, triplets_path, method, figures, out, config):
    """Correlate each predictor with the personalization gain per profile."""
    resolve = _resolver(config, {"method": method, "figures": figures})
    rows = _join_rows(predictors_path, triplets_path)
    table = correlation_table(
        [(r.profile_id, dict(r.features), r.diff_perso) for r in rows],
        method=resolve("method"))
    summary = summarize(table)
    out_dir = _out_dir(out)
    formats.write_correlation_table(out_dir / "correlation_table.csv", table)
    formats.write_correlation_summary(out_dir / "correlation_summary.csv",
                                      summary)
    if resolve("figures"):
        plots.correlation_heatmap(table, out_dir / "correlation_table.png")
    click.echo(f"wrote {out_dir / 'correlation_table.csv'} "
               f"({len(table.predictors)} x {len(table.profiles)})")


def _join_rows(predictors_path, triplets_path) -> list[decision.DecisionRow]:
    """Inner-join predictor vectors and triplet scores on their keys."""
    vectors = formats.read_predictors(predictors_path)
    rows = []
    missing = []
    for user, pid, qid, ndcg_orig, ndcg_perso, diff in formats.read_triplets(
            triplets_path):
        features = vectors.get((user, pid, qid))
        if features is None:
            missing.append((user, pid, qid))
            continue
        rows.append(decision.DecisionRow(
            profile_id=pid, query_id=qid, features=features, diff_perso=diff,
            ndcg_orig=ndcg_orig, ndcg_perso=ndcg_perso))
    if missing:
        raise ValueError(f"triplets lack predictor rows: {missing[:5]}"
                         f"{'...' if len(missing) > 5 else ''}")
    if not rows:
        raise ValueError("no (predictor, triplet) pairs after the join")
    return rows


@main.command("decide")
@click.option("--predictors", "predictors_path", required=True,
              type=click.Path(exists=True))
@click.option("--triplets", "triplets_path", required=True,
              type=click.Path(exists=True))
@click.option("--model", type=click.Choice(["classification", "regression",
                                            "both"]),
              help="Model kind(s) to evaluate [default: both].")
@click.option("--protocol", type=click.Choice(["loo", "kfold"]),
              help="Held-out evaluation protocol [default: kfold].")
@click.option("--folds", type=int, help="Fold count for kfold [default: 10].")
@click.option("--seed", type=int, help="Master seed [default: 0].")
@click.option("--top-n", type=int, help="Size of the reduced predictor set "
              "[default: 10].")
@click.option("--method", type=click.Choice(list(METHODS)),
              help="Correlation method for predictor selection "
              "[default: pearson].")
@click.option("--figures/--no-figures", default=None)
@click.option("--out", required=True, type=click.Path())
@click.option("--config", type=click.Path(exists=True))
@_fail_on_value_error
def cmd_decide(predictors_path, triplets_path, model, protocol, folds, seed,
               top_n, method, figures, out, config):
    """Train gating models, replay held-out decisions, report the gains."""
    resolve = _resolver(config, {
        "model": model, "protocol": protocol, "folds": folds, "seed": seed,
        "top_n": top_n, "method": method, "figures": figures})
    rows = _join_rows(predictors_path, triplets_path)
    kinds = ([resolve("model")] if resolve("model") != "both"
             else list(decision.MODEL_KINDS))
    protocol_v = resolve("protocol")
    folds_v = int(resolve("folds"))
    seed_v = int(resolve("seed"))
    out_dir = _out_dir(out)

    report = decision.run_decision_pipeline(rows, kinds, protocol_v, folds_v,
                                            seed_v)
    formats.write_gain_report(out_dir / "gains_all_features.csv", report)

    table = correlation_table(
        [(r.profile_id, dict(r.features), r.diff_perso) for r in rows],
        method=resolve("method"))
    summary = summarize(table)
    top = int(resolve("top_n"))
    top_report, selected = decision.run_with_selection(
        rows, summary, top, kinds, protocol_v, folds_v, seed_v)
    formats.write_gain_report(out_dir / f"gains_top{top}.csv", top_report)
    (out_dir / "selected_predictors.txt").write_text(
        "".join(f"{name}\n" for name in selected), encoding="utf-8")

    models_dir = out_dir / "models"
    for kind in kinds:
        kind_dir = models_dir / kind
        kind_dir.mkdir(parents=True, exist_ok=True)
        for pid, model in decision.train_final_models(rows, kind,
                                                      seed_v).items():
            model.save(kind_dir / f"{pid}.json")

    if resolve("figures"):
        plots.gain_bars(report, out_dir / "gains_all_features.png",
                        title="percent gain (all predictors)")
        plots.gain_bars(top_report, out_dir / f"gains_top{top}.png",
                        title=f"percent gain (top {top} predictors)")
    click.echo(f"wrote {out_dir / 'gains_all_features.csv'} and "
               f"{out_dir / f'gains_top{top}.csv'}")


@main.command("synth")
@click.option("--seed", type=int, help="Generator seed [default: 0].")
@click.option("--categories", type=int, default=4, show_default=True)
@click.option("--docs-per-category", type=int, default=25, show_default=True)
@click.option("--vocab-per-category", type=int, default=60, show_default=True)
@click.option("--noise-ratio", type=float, default=0.5, show_default=True)
@click.option("--doc-length", type=int, default=20, show_default=True)
@click.option("--query-length", type=int, default=6, show_default=True)
@click.option("--profile-terms", type=int, default=6, show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--config", type=click.Path(exists=True))
@_fail_on_value_error
def cmd_synth(seed, categories, docs_per_category, vocab_per_category,
              noise_ratio, doc_length, query_length, profile_terms, out,
              config):
    """Generate a synthetic corpus, profiles and queries."""
    resolve = _resolver(config, {"seed": seed})
    data = generate_synthetic_corpus(
        seed=int(resolve("seed")), categories=categories,
        docs_per_category=docs_per_category,
        vocab_per_category=vocab_per_category, noise_ratio=noise_ratio,
        doc_length=doc_length, query_length=query_length,
        profile_terms=profile_terms)
    out_dir = _out_dir(out)
    formats.write_corpus(out_dir / "corpus.jsonl", data.documents)
    formats.write_queries(out_dir / "queries.tsv", data.queries)
    formats.write_profiles(out_dir / "profiles.tsv", data.profiles)
    click.echo(f"wrote {len(data.documents)} docs, {len(data.queries)} "
               f"queries, {len(data.profiles)} profiles under {out_dir}")


if __name__ == "__main__":
    main()
