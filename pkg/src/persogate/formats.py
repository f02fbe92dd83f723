"""Readers and writers for the pipeline's file formats.

Every format is documented in FORMATS.md at the repository root. All
text is UTF-8; CSVs carry fixed headers and '\n' line endings so that
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from typing import Iterable, Mapping, Optional, Sequence

from .correlation import CorrelationSummary, CorrelationTable
from .decision import DecisionRow, GainReport
from .evaluation import EvaluationTriplet, TripletCounts
from .index import Document
from .predictors import PREDICTOR_NAMES, PredictorVector, UserProfile
from .text import NormalizationPipeline

UNDEFINED = "--"

TRIPLET_HEADER = ("user", "profile", "query", "ndcg_orig", "ndcg_perso",
                  "diff_perso")
COUNTS_HEADER = ("profile", "positive", "negative", "zeros", "total")
SUMMARY_HEADER = ("predictor", "mean", "max")
GAINS_HEADER = ("profile", "avg_perso", "ideal_avg_pred", "ideal_pct_gain",
                "cls_avg_pred", "cls_pct_gain", "reg_avg_pred", "reg_pct_gain",
                "notes")


def _fmt(value: Optional[float]) -> str:
    return UNDEFINED if value is None else repr(float(value))


def _open_writer(path):
    fh = open(path, "w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


# -- corpus / queries / profiles / assessments -------------------------------


def read_corpus(path) -> list[Document]:
    """JSON-lines corpus: one object with id, text, category per line."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                docs.append(Document(doc_id=str(record["id"]),
                                     text=str(record["text"]),
                                     category=str(record.get("category", ""))))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed corpus record "
                                 f"({exc})") from None
    return docs


def write_corpus(path, documents: Iterable[Document]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            fh.write(json.dumps({"id": doc.doc_id, "text": doc.text,
                                 "category": doc.category},
                                sort_keys=True) + "\n")


def read_queries(path) -> dict[str, str]:
    """Tab-separated query file: query_id <TAB> text."""
    queries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t", 1)
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'id<TAB>text'")
            qid, text = parts
            if qid in queries:
                raise ValueError(f"{path}:{lineno}: duplicate query id {qid!r}")
            queries[qid] = text
    return queries


def write_queries(path, queries: Iterable[tuple[str, str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for qid, text in queries:
            fh.write(f"{qid}\t{text}\n")


def read_profiles(path, pipeline: NormalizationPipeline) -> list[UserProfile]:
    """Profile file: profile_id <TAB> term:weight,term:weight,...

    Terms are normalized with the corpus pipeline; weights of terms that
    collapse to the same stem are summed.
    """
    profiles = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t", 1)
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected "
                                 "'profile_id<TAB>term:weight,...'")
            pid, body = parts
            terms: dict[str, float] = {}
            for chunk in body.split(","):
                chunk = chunk.strip()
                if not chunk:
                    continue
                term, sep, weight = chunk.rpartition(":")
                if not sep:
                    raise ValueError(f"{path}:{lineno}: bad term entry "
                                     f"{chunk!r}")
                normalized = pipeline.normalize_term(term)
                if normalized is None:
                    continue
                terms[normalized] = terms.get(normalized, 0.0) + float(weight)
            profiles.append(UserProfile(profile_id=pid, terms=terms))
    return profiles


def write_profiles(path, profiles: Iterable[UserProfile]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in profiles:
            body = ",".join(f"{t}:{w}" for t, w in sorted(p.terms.items()))
            fh.write(f"{p.profile_id}\t{body}\n")


def read_assessments(path) -> dict[tuple[str, str], dict[str, int]]:
    """Qrels-style lines: query_id profile_id doc_id grade."""
    rel: dict[tuple[str, str], dict[str, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected "
                                 "'query profile doc grade'")
            qid, pid, doc_id, grade = parts
            grade_i = int(grade)
            if grade_i < 0:
                raise ValueError(f"{path}:{lineno}: negative grade")
            rel.setdefault((qid, pid), {})[doc_id] = grade_i
    return rel


# -- CSV outputs --------------------------------------------------------------


def predictor_header() -> tuple[str, ...]:
    return ("user", "profile", "query") + PREDICTOR_NAMES


def write_predictors(path, rows: Iterable[tuple[str, str, str, PredictorVector]],
                     ) -> None:
    """One row per (user, profile, query) with all 37 predictor columns."""
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(predictor_header())
        for user, pid, qid, vector in rows:
            writer.writerow([user, pid, qid] +
                            [repr(getattr(vector, n)) for n in PREDICTOR_NAMES])


def read_predictors(path) -> dict[tuple[str, str, str], dict[str, float]]:
    """Map (user, profile, query) -> predictor name -> value."""
    out: dict[tuple[str, str, str], dict[str, float]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != predictor_header():
            raise ValueError(f"{path}: unexpected predictor CSV header")
        for row in reader:
            key = (row[0], row[1], row[2])
            out[key] = {name: float(v)
                        for name, v in zip(PREDICTOR_NAMES, row[3:])}
    return out


def write_triplets(path, triplets: Iterable[EvaluationTriplet]) -> None:
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(TRIPLET_HEADER)
        for t in triplets:
            writer.writerow([t.user, t.profile_id, t.query_id,
                             repr(t.ndcg_orig), repr(t.ndcg_perso),
                             repr(t.diff_perso)])


def read_triplets(path) -> list[tuple[str, str, str, float, float, float]]:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != TRIPLET_HEADER:
            raise ValueError(f"{path}: unexpected triplet CSV header")
        for row in reader:
            rows.append((row[0], row[1], row[2],
                         float(row[3]), float(row[4]), float(row[5])))
    return rows


def write_counts(path, counts: Iterable[TripletCounts]) -> None:
    """Per-profile gained/harmed/unchanged tallies plus a total row."""
    counts = list(counts)
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(COUNTS_HEADER)
        for c in counts:
            writer.writerow([c.profile_id, c.positive, c.negative, c.zeros,
                             c.total])
        writer.writerow(["ALL", sum(c.positive for c in counts),
                         sum(c.negative for c in counts),
                         sum(c.zeros for c in counts),
                         sum(c.total for c in counts)])


def write_correlation_table(path, table: CorrelationTable) -> None:
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(("predictor",) + table.profiles)
        for name in table.predictors:
            writer.writerow([name] + [_fmt(table.cells[(name, pid)])
                                      for pid in table.profiles])


def write_correlation_summary(path, summary: CorrelationSummary) -> None:
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(SUMMARY_HEADER)
        for row in summary.rows:
            writer.writerow([row.predictor, _fmt(row.mean),
                             _fmt(row.max_signed)])


def write_gain_report(path, report: GainReport) -> None:
    """Gain accounting CSV: per-profile rows, mean row, ideal-share row."""
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(GAINS_HEADER)
        for r in report.rows + (report.mean_row,):
            writer.writerow([r.profile_id, _fmt(r.avg_perso), _fmt(r.ideal_avg),
                             _fmt(r.ideal_gain), _fmt(r.cls_avg),
                             _fmt(r.cls_gain), _fmt(r.reg_avg),
                             _fmt(r.reg_gain), ";".join(r.notes)])
        writer.writerow(["mean_ideal_gain_share", UNDEFINED, UNDEFINED,
                         UNDEFINED, UNDEFINED, _fmt(report.cls_ideal_share),
                         UNDEFINED, _fmt(report.reg_ideal_share), ""])
