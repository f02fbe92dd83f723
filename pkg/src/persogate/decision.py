"""Per-profile personalize/skip models and their gain accounting.

For each profile a random forest is trained on the predictor vectors,
either as a binary classifier over the sign of the personalization gain
or as a regressor on the raw gain. Evaluation replays every held-out
decision: a triplet realizes its personalized NDCG when the model says
personalize and its original NDCG otherwise. Reports compare the
model's average against the always-personalize baseline and against the
ideal decider that always keeps the better of the two rankings.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .correlation import CorrelationSummary, select_top
from .forest import DEFAULT_TREES, ForestModel, fit_forest
from .predictors import PREDICTOR_NAMES

MODEL_KINDS = ("classification", "regression")


@dataclass(frozen=True)
class DecisionRow:
    """One training/evaluation unit: features plus realized NDCG pair."""

    profile_id: str
    query_id: str
    features: Mapping[str, float]
    diff_perso: float
    ndcg_orig: float
    ndcg_perso: float


def categorize(diff_perso: float) -> str:
    """Label for the sign of the gain: "yes", "no", or "drop" when zero."""
    if diff_perso < 0:
        return "no"
    if diff_perso > 0:
        return "yes"
    return "drop"


def prepare_rows(rows: Sequence[DecisionRow]) -> list[DecisionRow]:
    """Drop zero-gain rows: they carry no signal for the decision."""
    return [r for r in rows if r.diff_perso != 0.0]


def _matrix(rows: Sequence[DecisionRow],
            feature_names: Sequence[str]) -> np.ndarray:
    try:
        return np.array([[r.features[name] for name in feature_names]
                         for r in rows], dtype=float)
    except KeyError as exc:
        raise ValueError(f"row is missing feature {exc.args[0]!r}") from None


def train_classifier(rows: Sequence[DecisionRow], seed: int,
                     feature_names: Sequence[str] = PREDICTOR_NAMES,
                     n_trees: int = DEFAULT_TREES) -> ForestModel:
    """Forest over yes/no labels; degenerate single-label sets are flagged."""
    if not rows:
        raise ValueError("cannot train on an empty row set")
    y = [1.0 if r.diff_perso > 0 else 0.0 for r in rows]
    return fit_forest(_matrix(rows, feature_names), y, "classification",
                      seed=seed, n_trees=n_trees, feature_names=feature_names)


def train_regressor(rows: Sequence[DecisionRow], seed: int,
                    feature_names: Sequence[str] = PREDICTOR_NAMES,
                    n_trees: int = DEFAULT_TREES) -> ForestModel:
    """Forest regressing the raw personalization gain."""
    if not rows:
        raise ValueError("cannot train on an empty row set")
    y = [r.diff_perso for r in rows]
    return fit_forest(_matrix(rows, feature_names), y, "regression",
                      seed=seed, n_trees=n_trees, feature_names=feature_names)


def decide(model: ForestModel, features: Mapping[str, float]) -> bool:
    """True when the model says to personalize.

    Classification: predicted label is "yes". Regression: predicted gain
    is >= 0 (an exact zero keeps personalization on, the majority case).
    """
    x = np.array([[features[name] for name in model.feature_names]], dtype=float)
    pred = float(model.predict(x)[0])
    if model.kind == "classification":
        return pred == 1.0
    return pred >= 0.0


def _stable_int(*parts) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _realized(row: DecisionRow, personalize: bool) -> float:
    return row.ndcg_perso if personalize else row.ndcg_orig


@dataclass(frozen=True)
class ModelOutcome:
    """Held-out average NDCG for one (profile, model kind)."""

    avg_pred: float
    notes: tuple[str, ...] = ()


def _evaluate_profile_loo(rows: list[DecisionRow], kind: str, seed: int,
                          feature_names: Sequence[str],
                          n_trees: int) -> ModelOutcome:
    notes: set[str] = set()
    realized = []
    for i, held_out in enumerate(rows):
        train = rows[:i] + rows[i + 1:]
        model = _train(train, kind, _stable_int(seed, held_out.profile_id, i),
                       feature_names, n_trees)
        if model.degenerate:
            notes.add("degenerate-classifier")
        realized.append(_realized(held_out, decide(model, held_out.features)))
    return ModelOutcome(avg_pred=float(np.mean(realized)),
                        notes=tuple(sorted(notes)))


def _train(rows, kind, seed, feature_names, n_trees):
    if kind == "classification":
        return train_classifier(rows, seed, feature_names, n_trees)
    return train_regressor(rows, seed, feature_names, n_trees)


def _fold_assignment(rows: list[DecisionRow], kind: str, k: int,
                     rng: np.random.Generator) -> list[int]:
    """Round-robin fold ids; classification folds stratified by label."""
    fold_of = [0] * len(rows)
    if kind == "classification":
        groups = [[i for i, r in enumerate(rows) if r.diff_perso > 0],
                  [i for i, r in enumerate(rows) if r.diff_perso < 0]]
    else:
        groups = [list(range(len(rows)))]
    counter = 0
    for group in groups:
        order = rng.permutation(len(group))
        for j in order:
            fold_of[group[j]] = counter % k
            counter += 1
    return fold_of


def evaluate_loo(rows: Sequence[DecisionRow], kind: str, seed: int,
                 feature_names: Sequence[str] = PREDICTOR_NAMES,
                 n_trees: int = DEFAULT_TREES) -> dict[str, ModelOutcome]:
    """Leave-one-out evaluation per profile.

    Profiles with a single row cannot be held out against a trained
    model; they fall back to the always-personalize baseline, noted.
    """
    return _evaluate(rows, kind, seed, feature_names, n_trees, folds=None)


def evaluate_kfold(rows: Sequence[DecisionRow], k: int, kind: str, seed: int,
                   feature_names: Sequence[str] = PREDICTOR_NAMES,
                   n_trees: int = DEFAULT_TREES) -> dict[str, ModelOutcome]:
    """Cross-validated evaluation per profile.

    Profiles with fewer rows than folds fall back to leave-one-out,
    noted in the outcome.
    """
    if k < 2:
        raise ValueError(f"fold count must be >= 2, got {k}")
    return _evaluate(rows, kind, seed, feature_names, n_trees, folds=k)


def _evaluate(rows, kind, seed, feature_names, n_trees,
              folds: Optional[int]) -> dict[str, ModelOutcome]:
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind: {kind!r}")
    by_profile: dict[str, list[DecisionRow]] = {}
    for r in rows:
        by_profile.setdefault(r.profile_id, []).append(r)
    outcomes: dict[str, ModelOutcome] = {}
    for pid in sorted(by_profile):
        group = sorted(by_profile[pid], key=lambda r: r.query_id)
        if len(group) < 2:
            outcomes[pid] = ModelOutcome(
                avg_pred=float(np.mean([r.ndcg_perso for r in group])),
                notes=("insufficient-rows-baseline",))
            continue
        if folds is None or len(group) < folds:
            outcome = _evaluate_profile_loo(group, kind, seed, feature_names,
                                            n_trees)
            if folds is not None:
                outcome = ModelOutcome(avg_pred=outcome.avg_pred,
                                       notes=tuple(sorted(set(outcome.notes)
                                                          | {"loo-fallback"})))
            outcomes[pid] = outcome
            continue
        rng = np.random.default_rng(_stable_int(seed, pid, "folds"))
        fold_of = _fold_assignment(group, kind, folds, rng)
        notes: set[str] = set()
        realized = [0.0] * len(group)
        for fold in range(folds):
            train = [r for r, f in zip(group, fold_of) if f != fold]
            test = [(i, r) for i, (r, f) in enumerate(zip(group, fold_of))
                    if f == fold]
            if not test:
                continue
            model = _train(train, kind, _stable_int(seed, pid, fold),
                           feature_names, n_trees)
            if model.degenerate:
                notes.add("degenerate-classifier")
            for i, row in test:
                realized[i] = _realized(row, decide(model, row.features))
        outcomes[pid] = ModelOutcome(avg_pred=float(np.mean(realized)),
                                     notes=tuple(sorted(notes)))
    return outcomes


# -- gain accounting ---------------------------------------------------------


def pct_gain(avg_pred: float, avg_perso: float) -> float:
    """Percent change of a decider's average over always-personalize."""
    if avg_perso == 0.0:
        return 0.0 if avg_pred == 0.0 else math.inf
    return 100.0 * (avg_pred - avg_perso) / avg_perso


@dataclass(frozen=True)
class GainRow:
    profile_id: str
    avg_perso: float
    ideal_avg: float
    ideal_gain: float
    cls_avg: Optional[float] = None
    cls_gain: Optional[float] = None
    reg_avg: Optional[float] = None
    reg_gain: Optional[float] = None
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class GainReport:
    """Per-profile accounting plus the mean row and ideal-gain shares."""

    rows: tuple[GainRow, ...]
    mean_row: GainRow
    cls_ideal_share: Optional[float]  # 100 * mean cls gain / mean ideal gain
    reg_ideal_share: Optional[float]

    def row(self, profile_id: str) -> GainRow:
        for r in self.rows:
            if r.profile_id == profile_id:
                return r
        raise KeyError(profile_id)


@dataclass(frozen=True)
class ProfileAggregates:
    """Raw averages for one profile, before the percent arithmetic."""

    profile_id: str
    avg_perso: float
    ideal_avg: float
    cls_avg: Optional[float] = None
    reg_avg: Optional[float] = None
    notes: tuple[str, ...] = ()


def _mean_opt(values: list[Optional[float]]) -> Optional[float]:
    if any(v is None for v in values) or not values:
        return None
    return float(np.mean(values))


def assemble_gain_report(aggregates: Sequence[ProfileAggregates]) -> GainReport:
    """Turn per-profile averages into the full percent-gain report."""
    rows = []
    for a in sorted(aggregates, key=lambda a: a.profile_id):
        rows.append(GainRow(
            profile_id=a.profile_id,
            avg_perso=a.avg_perso,
            ideal_avg=a.ideal_avg,
            ideal_gain=pct_gain(a.ideal_avg, a.avg_perso),
            cls_avg=a.cls_avg,
            cls_gain=None if a.cls_avg is None else pct_gain(a.cls_avg, a.avg_perso),
            reg_avg=a.reg_avg,
            reg_gain=None if a.reg_avg is None else pct_gain(a.reg_avg, a.avg_perso),
            notes=a.notes))
    mean_row = GainRow(
        profile_id="mean",
        avg_perso=float(np.mean([r.avg_perso for r in rows])),
        ideal_avg=float(np.mean([r.ideal_avg for r in rows])),
        ideal_gain=float(np.mean([r.ideal_gain for r in rows])),
        cls_avg=_mean_opt([r.cls_avg for r in rows]),
        cls_gain=_mean_opt([r.cls_gain for r in rows]),
        reg_avg=_mean_opt([r.reg_avg for r in rows]),
        reg_gain=_mean_opt([r.reg_gain for r in rows]))

    def share(gain: Optional[float]) -> Optional[float]:
        if gain is None or mean_row.ideal_gain == 0.0:
            return None
        return 100.0 * gain / mean_row.ideal_gain

    return GainReport(rows=tuple(rows), mean_row=mean_row,
                      cls_ideal_share=share(mean_row.cls_gain),
                      reg_ideal_share=share(mean_row.reg_gain))


def gain_report(rows: Sequence[DecisionRow],
                outcomes: Mapping[str, Mapping[str, ModelOutcome]]) -> GainReport:
    """Assemble the report from rows and per-kind model outcomes.

    `outcomes` maps model kind -> profile -> held-out outcome; either
    kind may be absent.
    """
    by_profile: dict[str, list[DecisionRow]] = {}
    for r in rows:
        by_profile.setdefault(r.profile_id, []).append(r)
    aggregates = []
    for pid in sorted(by_profile):
        group = by_profile[pid]
        cls = outcomes.get("classification", {}).get(pid)
        reg = outcomes.get("regression", {}).get(pid)
        notes = set()
        for outcome in (cls, reg):
            if outcome is not None:
                notes.update(outcome.notes)
        aggregates.append(ProfileAggregates(
            profile_id=pid,
            avg_perso=float(np.mean([r.ndcg_perso for r in group])),
            ideal_avg=float(np.mean([max(r.ndcg_orig, r.ndcg_perso)
                                     for r in group])),
            cls_avg=None if cls is None else cls.avg_pred,
            reg_avg=None if reg is None else reg.avg_pred,
            notes=tuple(sorted(notes))))
    return assemble_gain_report(aggregates)


def run_decision_pipeline(rows: Sequence[DecisionRow], kinds: Sequence[str],
                          protocol: str, folds: int, seed: int,
                          feature_names: Sequence[str] = PREDICTOR_NAMES,
                          n_trees: int = DEFAULT_TREES) -> GainReport:
    """Evaluate the requested model kinds and assemble the gain report."""
    if protocol not in ("loo", "kfold"):
        raise ValueError(f"unknown evaluation protocol: {protocol!r}")
    usable = prepare_rows(rows)
    if not usable:
        raise ValueError("no rows with nonzero personalization gain")
    outcomes = {}
    for kind in kinds:
        if protocol == "loo":
            outcomes[kind] = evaluate_loo(usable, kind, seed, feature_names,
                                          n_trees)
        else:
            outcomes[kind] = evaluate_kfold(usable, folds, kind, seed,
                                            feature_names, n_trees)
    return gain_report(usable, outcomes)


def train_final_models(rows: Sequence[DecisionRow], kind: str, seed: int,
                       feature_names: Sequence[str] = PREDICTOR_NAMES,
                       n_trees: int = DEFAULT_TREES) -> dict[str, ForestModel]:
    """One deployable model per profile, trained on all usable rows."""
    by_profile: dict[str, list[DecisionRow]] = {}
    for r in prepare_rows(rows):
        by_profile.setdefault(r.profile_id, []).append(r)
    return {pid: _train(sorted(group, key=lambda r: r.query_id), kind,
                        _stable_int(seed, pid, "final"), feature_names, n_trees)
            for pid, group in sorted(by_profile.items())}


def run_with_selection(rows: Sequence[DecisionRow],
                       summary: CorrelationSummary, n: int, kinds: Sequence[str],
                       protocol: str, folds: int, seed: int,
                       n_trees: int = DEFAULT_TREES) -> tuple[GainReport, list[str]]:
    """Same pipeline restricted to the top-n correlated predictors."""
    selected = select_top(summary, n)
    report = run_decision_pipeline(rows, kinds, protocol, folds, seed,
                                   feature_names=selected, n_trees=n_trees)
    return report, selected
