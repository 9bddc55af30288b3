"""Micro-averaged precision / recall / F1 over predicate-argument tuples."""

import json
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Sequence

from .types import AnnotatedSentence, Frame, SrluError, ValidationError

PROJECTIONS = ("uniform", "span", "dep")


class AlignmentError(SrluError):
    pass


@dataclass(frozen=True)
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other):
        return Counts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class EvalCounts:
    uniform: Counts = Counts()
    span: Counts = Counts()
    dep: Counts = Counts()

    def __add__(self, other):
        return EvalCounts(self.uniform + other.uniform, self.span + other.span,
                          self.dep + other.dep)

    def __getitem__(self, projection):
        return getattr(self, projection)


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float


def _key(p, a, projection):
    if projection == "uniform":
        return (p, a.start, a.end, a.head, a.role)
    if projection == "span":
        return (p, a.start, a.end, a.role)
    if projection == "dep":
        return (p, a.head, a.role)
    raise ValueError("unknown projection %r" % projection)


def instances(frames: Iterable[Frame], projection: str, count_senses: bool = False) -> Counter:
    bag = Counter()
    for f in frames:
        for a in f.args:
            bag[_key(f.predicate, a, projection)] += 1
        if count_senses and projection == "dep" and f.sense is not None:
            bag[(f.predicate, "#sense", f.sense)] += 1
    return bag


def _validate(frames, n_tokens=None):
    for f in frames:
        f.validate(n_tokens)


def compare_frames(gold: Sequence[Frame], pred: Sequence[Frame], projection: str = "uniform",
                   count_senses: bool = False, n_tokens=None) -> Counts:
    """tp/fp/fn between two frame sets; predictions count as a multiset."""
    _validate(gold, n_tokens)
    _validate(pred, n_tokens)
    g = instances(gold, projection, count_senses)
    if any(c > 1 for c in g.values()):
        dup = sorted(k for k, c in g.items() if c > 1)[0]
        raise ValidationError("duplicate gold instance %r" % (dup,))
    p = instances(pred, projection, count_senses)
    tp = sum((g & p).values())
    return Counts(tp, sum(p.values()) - tp, sum(g.values()) - tp)


def compare_all(gold, pred, count_senses=False, n_tokens=None) -> EvalCounts:
    return EvalCounts(*(compare_frames(gold, pred, proj, count_senses, n_tokens)
                        for proj in PROJECTIONS))


def micro_prf(counts: Counts) -> PRF:
    p = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    r = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return PRF(p, r, f)


def evaluate_corpus(gold_docs: Sequence[AnnotatedSentence], pred_docs: Sequence[AnnotatedSentence],
                    count_senses: bool = False) -> Dict[str, dict]:
    gold_ids = [d.id for d in gold_docs]
    pred_ids = [d.id for d in pred_docs]
    pred_by_id = {d.id: d for d in pred_docs}
    missing = [i for i in gold_ids if i not in pred_by_id]
    extra = sorted(set(pred_ids) - set(gold_ids))
    dups = sorted({i for ids in (gold_ids, pred_ids) for i, c in Counter(ids).items() if c > 1})
    if missing or extra or dups:
        raise AlignmentError("sentence ids do not align; missing predictions: %s; "
                             "unexpected: %s; duplicated: %s" % (missing, extra, dups))
    total = EvalCounts()
    for g in gold_docs:
        p = pred_by_id[g.id]
        if len(p) != len(g):
            raise AlignmentError("sentence %s: %d gold tokens vs %d predicted"
                                 % (g.id, len(g), len(p)))
        total = total + compare_all(g.frames, p.frames, count_senses, len(g))
    report = {}
    for proj in PROJECTIONS:
        c = total[proj]
        report[proj] = {"counts": asdict(c), **asdict(micro_prf(c))}
    return report


def format_report(report: Dict[str, dict], projections: Sequence[str] = PROJECTIONS) -> str:
    rows = ["%-8s %8s %8s %8s %10s %10s %10s" % ("proj", "tp", "fp", "fn", "precision", "recall", "f1")]
    for proj in projections:
        r = report[proj]
        c = r["counts"]
        rows.append("%-8s %8d %8d %8d %10.6f %10.6f %10.6f"
                    % (proj, c["tp"], c["fp"], c["fn"], r["precision"], r["recall"], r["f1"]))
    return "\n".join(rows) + "\n"


def report_json(report: Dict[str, dict], projections: Sequence[str] = PROJECTIONS) -> str:
    out = {}
    for proj in projections:
        r = report[proj]
        out[proj] = {"counts": r["counts"],
                     **{k: round(r[k], 6) for k in ("precision", "recall", "f1")}}
    return json.dumps(out, indent=2, sort_keys=True) + "\n"
