"""Assign dependency heads to span arguments, splitting multi-head spans.

A token is a head of a span when its own governor lies outside the span
(ROOT counts as outside).  Spans with several heads are partitioned by the
head each token reaches without leaving the span, cut into contiguous runs,
and the runs are processed again until every piece has a single head.
"""

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

from .types import (
    ROOT,
    AnnotatedSentence,
    DependencyTree,
    Frame,
    SpanArgument,
    SpanFrame,
    UniformArgument,
    ValidationError,
)


class SpanRangeError(ValidationError, IndexError):
    pass


@dataclass(frozen=True)
class HeadSet:
    start: int
    end: int
    heads: Tuple[int, ...]

    @property
    def span(self):
        return (self.start, self.end)


class MultiHeadError(ValidationError):
    """Raised by :func:`assign_head` when a span has more than one head."""

    def __init__(self, headset: HeadSet, role: str = ""):
        super().__init__("span [%d,%d] %s has %d heads: %s"
                         % (headset.start, headset.end, role, len(headset.heads),
                            list(headset.heads)))
        self.headset = headset


@dataclass(frozen=True)
class ConversionStats:
    total_args: int = 0
    multi_head_args: int = 0
    emitted_subspans: int = 0

    @property
    def multi_head_ratio(self) -> float:
        return self.multi_head_args / self.total_args if self.total_args else 0.0

    def __add__(self, other: "ConversionStats") -> "ConversionStats":
        return ConversionStats(self.total_args + other.total_args,
                               self.multi_head_args + other.multi_head_args,
                               self.emitted_subspans + other.emitted_subspans)

    def report(self) -> str:
        return ("total_args=%d\nmulti_head_args=%d\nemitted_subspans=%d\nmulti_head_ratio=%.4f\n"
                % (self.total_args, self.multi_head_args, self.emitted_subspans,
                   self.multi_head_ratio))


def _check_span(start, end, n):
    if not 0 <= start <= end < n:
        raise SpanRangeError("span [%d,%d] out of range for %d tokens" % (start, end, n))


def detect_heads(span: Tuple[int, int], dtree: DependencyTree) -> HeadSet:
    start, end = span
    _check_span(start, end, len(dtree))
    heads = dtree.heads
    found = tuple(t for t in range(start, end + 1)
                  if heads[t] == ROOT or not start <= heads[t] <= end)
    return HeadSet(start, end, found)


def assign_head(arg: SpanArgument, dtree: DependencyTree) -> UniformArgument:
    hs = detect_heads((arg.start, arg.end), dtree)
    if len(hs.heads) != 1:
        raise MultiHeadError(hs, arg.role)
    return UniformArgument(arg.start, arg.end, hs.heads[0], arg.role)


def _runs(tokens):
    runs = []
    for t in sorted(tokens):
        if runs and t == runs[-1][-1] + 1:
            runs[-1].append(t)
        else:
            runs.append([t])
    return runs


def _split(start, end, heads, out):
    members = range(start, end + 1)
    inside = set(members)
    top = [t for t in members if heads[t] not in inside]
    if len(top) == 1:
        out.append((start, end, top[0]))
        return
    groups = {h: [] for h in top}
    for t in members:
        g = t
        while heads[g] in inside:
            g = heads[g]
        groups[g].append(t)
    for h in top:
        for run in _runs(groups[h]):
            _split(run[0], run[-1], heads, out)


def split_argument(arg: SpanArgument, dtree: DependencyTree) -> List[UniformArgument]:
    """Single-head contiguous pieces of ``arg``; the leftmost keeps the role,
    the rest get ``C-`` + role."""
    _check_span(arg.start, arg.end, len(dtree))
    pieces = []
    _split(arg.start, arg.end, dtree.heads, pieces)
    pieces.sort()
    return [UniformArgument(s, e, h, arg.role if i == 0 else "C-" + arg.role)
            for i, (s, e, h) in enumerate(pieces)]


def is_punct(form: str) -> bool:
    return not any(ch.isalnum() for ch in form)


def convert_frame(frame: SpanFrame, dtree: DependencyTree, forms: Sequence[str] = None,
                  drop_punct: bool = False) -> Tuple[Frame, ConversionStats]:
    """Attach heads to every argument of ``frame``.

    With ``drop_punct`` the punctuation-only pieces of a split argument are
    discarded (``forms`` is then required) and roles are reassigned so the
    leftmost remaining piece carries the base role.
    """
    frame.validate(len(dtree))
    out = []
    multi = emitted = 0
    for arg in frame.args:
        try:
            out.append(assign_head(arg, dtree))
            continue
        except MultiHeadError:
            pass
        pieces = split_argument(arg, dtree)
        multi += 1
        if drop_punct:
            if forms is None:
                raise ValueError("drop_punct needs token forms")
            kept = [p for p in pieces
                    if not all(is_punct(forms[t]) for t in range(p.start, p.end + 1))]
            pieces = [UniformArgument(p.start, p.end, p.head, arg.role if i == 0 else "C-" + arg.role)
                      for i, p in enumerate(kept)]
        emitted += len(pieces)
        out.extend(pieces)
    stats = ConversionStats(len(frame.args), multi, emitted)
    return Frame(frame.predicate, frame.sense, tuple(out)), stats


def convert_sentence(sentence, frames: Iterable[SpanFrame], dtree: DependencyTree,
                     drop_punct: bool = False) -> Tuple[AnnotatedSentence, ConversionStats]:
    stats = ConversionStats()
    out = []
    for f in frames:
        uf, s = convert_frame(f, dtree, sentence.forms, drop_punct)
        out.append(uf)
        stats = stats + s
    return AnnotatedSentence(sentence, None, dtree, tuple(out)), stats


def corpus_stats(per_sentence: Iterable[ConversionStats]) -> ConversionStats:
    total = ConversionStats()
    for s in per_sentence:
        total = total + s
    return total
