"""Alarm-vs-label evaluation: episode matching, confusion matrix, derived metrics.

Episode-level matching: an out-of-control episode counts as detected when at
least one alarm lands inside [start - lead_window, end]; alarms matching no
episode are false discoveries; labeled in-control stretches containing no
false discovery count as true negatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from typing import Iterable, Sequence

from .errors import AntmonError


class OverlappingLabels(AntmonError):
    code = "overlapping_labels"


class Truth(str, Enum):
    OUTC = "outc"
    INC = "inc"


@dataclass(frozen=True)
class EpisodeLabel:
    """Ground-truth interval; `end` is inclusive of the last affected cycle."""

    start: datetime
    end: datetime
    truth: Truth

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError(f"label end {self.end} precedes start {self.start}")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.fp + self.tn

    @property
    def total(self) -> int:
        return self.positives + self.negatives

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.tp + other.tp, self.fn + other.fn, self.fp + other.fp, self.tn + other.tn
        )


def _alarm_times(alarms: Iterable) -> list[datetime]:
    """Accept AlarmEvents, dicts, or bare datetimes; keep kind == alarm only."""
    times = []
    for a in alarms:
        if isinstance(a, datetime):
            times.append(a)
            continue
        if isinstance(a, dict):
            kind = a.get("kind", "alarm")
            ts = a["timestamp"]
        else:
            kind = getattr(a, "kind", "alarm")
            ts = a.timestamp
        kind = getattr(kind, "value", kind)
        if kind == "alarm":
            times.append(ts if isinstance(ts, datetime) else datetime.fromisoformat(ts))
    return sorted(times)


def check_labels(labels: Sequence[EpisodeLabel]) -> list[EpisodeLabel]:
    ordered = sorted(labels, key=lambda l: (l.start, l.end))
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.start < prev.end:
            raise OverlappingLabels(
                f"label starting {cur.start} overlaps label ending {prev.end}"
            )
    return ordered

def match_episodes(
    alarms: Iterable,
    labels: Sequence[EpisodeLabel],
    lead_window_minutes: float = 30.0,
) -> ConfusionMatrix:
    """Score alarms against labels at episode granularity.

    Multiple alarms inside one episode window collapse to a single true
    positive. A matched alarm never spoils the in-control stretch it happens
    to sit in (early warnings within the lead window are wins, not faults).
    """
    ordered = check_labels(labels)
    times = _alarm_times(alarms)
    lead = timedelta(minutes=lead_window_minutes)

    matched: set[datetime] = set()
    tp = fn = 0
    for label in ordered:
        if label.truth is not Truth.OUTC:
            continue
        hits = [t for t in times if label.start - lead <= t <= label.end]
        if hits:
            tp += 1
            matched.update(hits)
        else:
            fn += 1

    unmatched = [t for t in times if t not in matched]
    fp = len(unmatched)
    tn = 0
    for label in ordered:
        if label.truth is not Truth.INC:
            continue
        if not any(label.start <= t <= label.end for t in unmatched):
            tn += 1
    return ConfusionMatrix(tp=tp, fn=fn, fp=fp, tn=tn)


def inc_gaps(
    episodes: Sequence[EpisodeLabel],
    span_start: datetime,
    span_end: datetime,
    margin: timedelta = timedelta(minutes=2),
) -> list[EpisodeLabel]:
    """In-control stretch labels filling the gaps a set of episodes leaves in a span."""
    out: list[EpisodeLabel] = []
    cursor = span_start
    for ep in check_labels(episodes):
        if ep.start - margin >= cursor:
            out.append(EpisodeLabel(cursor, ep.start - margin, Truth.INC))
        cursor = max(cursor, ep.end + margin)
    if cursor <= span_end:
        out.append(EpisodeLabel(cursor, span_end, Truth.INC))
    return out


@dataclass(frozen=True)
class MetricSet:
    """Every derived rate; None marks a zero-denominator (undefined) value."""

    tpr: float | None
    tnr: float | None
    fnr: float | None
    fpr: float | None
    prevalence: float | None
    ppv: float | None
    npv: float | None
    fdr: float | None
    false_omission_rate: float | None
    lr_positive: float | None
    lr_negative: float | None
    accuracy: float | None
    balanced_accuracy: float | None
    bookmaker_informedness: float | None
    markedness: float | None
    prevalence_threshold: float | None
    diagnostic_odds_ratio: float | None
    f1: float | None
    fowlkes_mallows: float | None
    critical_success_index: float | None
    mcc: float | None

    REPORT_KEYS = (
        ("TPR", "tpr"), ("TNR", "tnr"), ("FNR", "fnr"), ("FPR", "fpr"),
        ("Prev", "prevalence"), ("PPV", "ppv"), ("NPV", "npv"), ("FDR", "fdr"),
        ("FOR", "false_omission_rate"), ("LR+", "lr_positive"), ("LR-", "lr_negative"),
        ("Acc", "accuracy"), ("BAcc", "balanced_accuracy"), ("BM", "bookmaker_informedness"),
        ("MK", "markedness"), ("PT", "prevalence_threshold"), ("DOR", "diagnostic_odds_ratio"),
        ("F1", "f1"), ("FM", "fowlkes_mallows"), ("CSI", "critical_success_index"),
        ("MCC", "mcc"),
    )

    def as_report(self) -> dict:
        """Flat key-value document using the conventional abbreviations."""
        return {key: getattr(self, attr) for key, attr in self.REPORT_KEYS}


def _ratio(num: float, den: float) -> float | None:
    return num / den if den else None


def compute_metrics(m: ConfusionMatrix) -> MetricSet:
    """All 21 rates from raw counts; zero-denominator cases become None, never 0."""
    p, n = m.positives, m.negatives
    pp, pn = m.tp + m.fp, m.fn + m.tn

    tpr = _ratio(m.tp, p)
    tnr = _ratio(m.tn, n)
    fnr = _ratio(m.fn, p)
    fpr = _ratio(m.fp, n)
    prevalence = _ratio(p, p + n)
    ppv = _ratio(m.tp, pp)
    npv = _ratio(m.tn, pn)
    fdr = _ratio(m.fp, pp)
    f_or = _ratio(m.fn, pn)

    lr_pos = tpr / fpr if (tpr is not None and fpr) else None
    lr_neg = fnr / tnr if (fnr is not None and tnr) else None

    accuracy = _ratio(m.tp + m.tn, p + n)
    bacc = (tpr + tnr) / 2.0 if (tpr is not None and tnr is not None) else None
    bm = tpr + tnr - 1.0 if (tpr is not None and tnr is not None) else None
    mk = ppv + npv - 1.0 if (ppv is not None and npv is not None) else None

    pt = None
    if tpr is not None and fpr is not None and tpr != fpr:
        pt = (math.sqrt(tpr * fpr) - fpr) / (tpr - fpr)

    dor = lr_pos / lr_neg if (lr_pos is not None and lr_neg) else None

    f1 = _ratio(2 * m.tp, 2 * m.tp + m.fp + m.fn)
    fm = math.sqrt(ppv * tpr) if (ppv is not None and tpr is not None) else None
    csi = _ratio(m.tp, m.tp + m.fn + m.fp)

    mcc = None
    parts = (tpr, tnr, ppv, npv, fnr, fpr, f_or, fdr)
    if all(x is not None for x in parts):
        mcc = math.sqrt(tpr * tnr * ppv * npv) - math.sqrt(fnr * fpr * f_or * fdr)

    return MetricSet(
        tpr=tpr, tnr=tnr, fnr=fnr, fpr=fpr, prevalence=prevalence,
        ppv=ppv, npv=npv, fdr=fdr, false_omission_rate=f_or,
        lr_positive=lr_pos, lr_negative=lr_neg, accuracy=accuracy,
        balanced_accuracy=bacc, bookmaker_informedness=bm, markedness=mk,
        prevalence_threshold=pt, diagnostic_odds_ratio=dor,
        f1=f1, fowlkes_mallows=fm, critical_success_index=csi, mcc=mcc,
    )


def balanced_accuracy(m: ConfusionMatrix) -> float | None:
    return compute_metrics(m).balanced_accuracy


def mcc_covariance_form(m: ConfusionMatrix) -> float | None:
    """Independent route to MCC straight from counts, for cross-checking."""
    den = (m.tp + m.fp) * (m.tp + m.fn) * (m.tn + m.fp) * (m.tn + m.fn)
    if den == 0:
        return None
    return (m.tp * m.tn - m.fp * m.fn) / math.sqrt(den)
