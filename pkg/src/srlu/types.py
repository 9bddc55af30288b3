"""Core data model shared by every module.

Indices are 0-based and spans are inclusive on both ends.  ROOT is encoded
as head ``-1`` in :class:`DependencyTree`.
"""

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

ROOT = -1


class SrluError(ValueError):
    """Base class for all validation and format errors."""


class ValidationError(SrluError):
    pass


class FormatError(SrluError):
    pass


class ExportError(SrluError):
    pass


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: Optional[str] = None
    pos: Optional[str] = None

    def __post_init__(self):
        if not self.form:
            raise ValidationError("token %d has an empty form" % self.index)


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: Tuple[Token, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for i, tok in enumerate(self.tokens):
            if tok.index != i:
                raise ValidationError(
                    "sentence %s: token at position %d has index %d" % (self.id, i, tok.index))

    @classmethod
    def from_forms(cls, id, forms, lemmas=None, pos=None):
        toks = []
        for i, form in enumerate(forms):
            toks.append(Token(i, form,
                              lemmas[i] if lemmas is not None else None,
                              pos[i] if pos is not None else None))
        return cls(id, tuple(toks))

    @property
    def forms(self) -> List[str]:
        return [t.form for t in self.tokens]

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class ConstituentNode:
    label: str
    start: int
    end: int
    children: Tuple["ConstituentNode", ...] = ()
    raw_label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if self.raw_label is None:
            object.__setattr__(self, "raw_label", self.label)

    @property
    def span(self) -> Tuple[int, int]:
        return (self.start, self.end)

    @property
    def is_preterminal(self) -> bool:
        return not self.children

    def iter_nodes(self) -> Iterator["ConstituentNode"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def preterminals(self) -> List["ConstituentNode"]:
        return [n for n in self.iter_nodes() if n.is_preterminal]

    def validate(self, n_tokens: Optional[int] = None):
        """Check the tiling invariant on every node."""
        if n_tokens is not None and (self.start != 0 or self.end != n_tokens - 1):
            raise ValidationError(
                "root span [%d,%d] does not cover %d tokens" % (self.start, self.end, n_tokens))
        for node in self.iter_nodes():
            if node.start > node.end:
                raise ValidationError("node %s has empty span" % node.label)
            if node.is_preterminal:
                if node.start != node.end:
                    raise ValidationError(
                        "preterminal %s covers [%d,%d]" % (node.label, node.start, node.end))
                continue
            pos = node.start
            for child in node.children:
                if child.start != pos:
                    raise ValidationError(
                        "children of %s [%d,%d] do not tile the span"
                        % (node.label, node.start, node.end))
                pos = child.end + 1
            if pos != node.end + 1:
                raise ValidationError(
                    "children of %s [%d,%d] do not tile the span"
                    % (node.label, node.start, node.end))

    def to_bracketed(self, forms: Sequence[str], raw: bool = False) -> str:
        label = self.raw_label if raw else self.label
        if self.is_preterminal:
            return "(%s %s)" % (label, forms[self.start])
        return "(%s %s)" % (label, " ".join(c.to_bracketed(forms, raw) for c in self.children))


@dataclass(frozen=True)
class DependencyTree:
    heads: Tuple[int, ...]
    deprels: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "heads", tuple(int(h) for h in self.heads))
        object.__setattr__(self, "deprels", tuple(self.deprels))

    def __len__(self):
        return len(self.heads)

    def validate(self, n_tokens: Optional[int] = None):
        n = len(self.heads)
        if len(self.deprels) != n:
            raise ValidationError("heads and deprels differ in length (%d vs %d)"
                                  % (n, len(self.deprels)))
        if n_tokens is not None and n != n_tokens:
            raise ValidationError("dependency tree has %d nodes for %d tokens" % (n, n_tokens))
        roots = [i for i, h in enumerate(self.heads) if h == ROOT]
        if len(roots) != 1:
            raise ValidationError("expected exactly one root, found %d" % len(roots))
        for i, h in enumerate(self.heads):
            if h != ROOT and not 0 <= h < n:
                raise ValidationError("head of token %d is out of range: %d" % (i, h))
            if h == i:
                raise ValidationError("token %d is its own head" % i)
        # every token must reach the root within n steps
        for i in range(n):
            j, steps = i, 0
            while j != ROOT:
                j = self.heads[j]
                steps += 1
                if steps > n:
                    raise ValidationError("cycle through token %d" % i)

    @property
    def root(self) -> int:
        return self.heads.index(ROOT)

    def children(self) -> List[List[int]]:
        out = [[] for _ in self.heads]
        for d, h in enumerate(self.heads):
            if h != ROOT:
                out[h].append(d)
        return out

    def descendants(self, node: int) -> set:
        """All tokens dominated by ``node``, including itself."""
        kids = self.children()
        seen = {node}
        stack = [node]
        while stack:
            for c in kids[stack.pop()]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return seen


@dataclass(frozen=True, order=True)
class SpanArgument:
    start: int
    end: int
    role: str

    def validate(self, n_tokens: Optional[int] = None):
        if self.start < 0 or self.end < self.start:
            raise ValidationError("bad span [%d,%d]" % (self.start, self.end))
        if n_tokens is not None and self.end >= n_tokens:
            raise ValidationError("span [%d,%d] exceeds %d tokens" % (self.start, self.end, n_tokens))


@dataclass(frozen=True, order=True)
class UniformArgument:
    start: int
    end: int
    head: int
    role: str

    def validate(self, n_tokens: Optional[int] = None):
        SpanArgument(self.start, self.end, self.role).validate(n_tokens)
        if not self.start <= self.head <= self.end:
            raise ValidationError(
                "head %d outside span [%d,%d]" % (self.head, self.start, self.end))

    @property
    def span(self) -> SpanArgument:
        return SpanArgument(self.start, self.end, self.role)


def base_role(role: str) -> str:
    return role[2:] if role.startswith("C-") else role


def _check_overlaps(args, what):
    prev = None
    for a in sorted(args, key=lambda a: (a.start, a.end)):
        if prev is not None and a.start <= prev.end:
            raise ValidationError("%s: arguments [%d,%d] and [%d,%d] overlap"
                                  % (what, prev.start, prev.end, a.start, a.end))
        prev = a


@dataclass(frozen=True)
class Frame:
    """A predicate with its uniform (quintuple) arguments, sorted by start."""

    predicate: int
    sense: Optional[str] = None
    args: Tuple[UniformArgument, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(sorted(self.args)))

    def validate(self, n_tokens: Optional[int] = None, strict: bool = False):
        what = "frame %d" % self.predicate
        if self.predicate < 0 or (n_tokens is not None and self.predicate >= n_tokens):
            raise ValidationError("%s: predicate out of range" % what)
        for a in self.args:
            try:
                a.validate(n_tokens)
            except ValidationError as e:
                raise ValidationError("%s: %s" % (what, e)) from None
        _check_overlaps(self.args, what)
        if strict:
            seen = set()
            for a in self.args:
                if not a.role.startswith("C-"):
                    if a.role in seen:
                        raise ValidationError("%s: base role %s repeated" % (what, a.role))
                    seen.add(a.role)


@dataclass(frozen=True)
class SpanFrame:
    """A predicate with span-only arguments (CoNLL-2005 style)."""

    predicate: int
    sense: Optional[str] = None
    args: Tuple[SpanArgument, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(sorted(self.args)))

    def validate(self, n_tokens: Optional[int] = None):
        what = "frame %d" % self.predicate
        for a in self.args:
            a.validate(n_tokens)
        _check_overlaps(self.args, what)


@dataclass(frozen=True)
class AnnotatedSentence:
    sentence: Sentence
    ctree: Optional[ConstituentNode] = None
    dtree: Optional[DependencyTree] = None
    frames: Tuple[Frame, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))

    @property
    def id(self) -> str:
        return self.sentence.id

    def __len__(self):
        return len(self.sentence)

    def validate(self, strict: bool = False):
        n = len(self.sentence)
        try:
            if self.ctree is not None:
                self.ctree.validate(n)
            if self.dtree is not None:
                self.dtree.validate(n)
            for f in self.frames:
                f.validate(n, strict=strict)
        except ValidationError as e:
            raise ValidationError("sentence %s: %s" % (self.id, e)) from None
        return self
