"""Split treebank tokens at hyphens and slashes and remap every index."""

from dataclasses import dataclass, field
from typing import FrozenSet, List, Sequence, Tuple

from .types import (
    ROOT,
    AnnotatedSentence,
    ConstituentNode,
    DependencyTree,
    Frame,
    Sentence,
    Token,
    UniformArgument,
)

DEFAULT_PREFIXES = frozenset([
    "co", "pre", "post", "un", "anti", "ante", "ex", "extra", "fore", "non", "over",
    "pro", "re", "super", "sub", "tri", "bi", "uni", "ultra",
])

DELIMITERS = "-/"
SPLIT_REL = "HYPH"
SPLIT_POS = "HYPH"


@dataclass(frozen=True)
class Lexicon:
    """Word lists consulted when deciding whether to split.

    ``words`` and ``prefixes`` are matched case-insensitively; ``entities``
    are matched exactly.
    """

    words: FrozenSet[str] = frozenset()
    entities: FrozenSet[str] = frozenset()
    prefixes: FrozenSet[str] = field(default=DEFAULT_PREFIXES)

    def __post_init__(self):
        object.__setattr__(self, "words", frozenset(w.lower() for w in self.words))
        object.__setattr__(self, "entities", frozenset(self.entities))
        object.__setattr__(self, "prefixes", frozenset(p.lower() for p in self.prefixes))

    def accepts(self, segment: str) -> bool:
        if not segment:
            return False
        low = segment.lower()
        return low in self.words or segment in self.entities or low in self.prefixes

    @classmethod
    def from_text(cls, text: str) -> "Lexicon":
        """Parse a lexicon file with ``#words``, ``#entities`` and ``#prefixes`` sections.

        A file without a ``#prefixes`` section keeps the default prefix list.
        """
        sections = {}
        current = None
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            if line in ("#words", "#entities", "#prefixes"):
                current = line[1:]
                sections.setdefault(current, set())
                continue
            if current is None:
                raise ValueError("lexicon line %d: entry before any section header" % lineno)
            sections[current].add(line)
        return cls(frozenset(sections.get("words", ())),
                   frozenset(sections.get("entities", ())),
                   frozenset(sections["prefixes"]) if "prefixes" in sections else DEFAULT_PREFIXES)

    @classmethod
    def load(cls, path) -> "Lexicon":
        with open(path, encoding="utf-8") as f:
            return cls.from_text(f.read())


def split_token(form: str, lex: Lexicon) -> List[str]:
    """Split ``form`` at ``-`` or ``/`` where both neighbouring pieces are known.

    Each delimiter is judged on the pieces directly left and right of it, so
    ``a-b-c`` may split at one hyphen only.  Delimiters become segments.
    """
    pieces = []
    delims = []
    buf = []
    for ch in form:
        if ch in DELIMITERS:
            pieces.append("".join(buf))
            delims.append(ch)
            buf = []
        else:
            buf.append(ch)
    pieces.append("".join(buf))
    if not delims:
        return [form]
    out = []
    cur = pieces[0]
    for i, d in enumerate(delims):
        left, right = pieces[i], pieces[i + 1]
        if lex.accepts(left) and lex.accepts(right):
            out.append(cur)
            out.append(d)
            cur = right
        else:
            cur = cur + d + right
    out.append(cur)
    return out


class TokenMap(tuple):
    """``token_map[i]`` lists the new indices of original token ``i``."""

    def first(self, i):
        return self[i][0]

    def last(self, i):
        return self[i][-1]

    @property
    def is_identity(self):
        return all(len(seg) == 1 and seg[0] == i for i, seg in enumerate(self))


def _remap_tree(node, tmap, tokens_new):
    if node.is_preterminal:
        segs = tmap[node.start]
        if len(segs) == 1:
            return [ConstituentNode(node.label, segs[0], segs[0], (), node.raw_label)]
        out = []
        for j in segs:
            if tokens_new[j].form in DELIMITERS:
                out.append(ConstituentNode(SPLIT_POS, j, j, (), SPLIT_POS))
            else:
                out.append(ConstituentNode(node.label, j, j, (), node.raw_label))
        return out
    kids = []
    for c in node.children:
        kids.extend(_remap_tree(c, tmap, tokens_new))
    return [ConstituentNode(node.label, tmap.first(node.start), tmap.last(node.end),
                            tuple(kids), node.raw_label)]


def retokenize_sentence(doc: AnnotatedSentence, lex: Lexicon) -> Tuple[AnnotatedSentence, TokenMap]:
    new_tokens = []
    tmap = []
    for tok in doc.sentence.tokens:
        segs = split_token(tok.form, lex)
        idx = []
        for seg in segs:
            j = len(new_tokens)
            if len(segs) == 1:
                new_tokens.append(Token(j, seg, tok.lemma, tok.pos))
            elif seg in DELIMITERS:
                new_tokens.append(Token(j, seg, seg, SPLIT_POS))
            else:
                new_tokens.append(Token(j, seg, None, tok.pos))
            idx.append(j)
        tmap.append(tuple(idx))
    tmap = TokenMap(tmap)
    if tmap.is_identity:
        return doc, tmap

    dtree = None
    if doc.dtree is not None:
        heads = [ROOT] * len(new_tokens)
        rels = [SPLIT_REL] * len(new_tokens)
        for i, (h, rel) in enumerate(zip(doc.dtree.heads, doc.dtree.deprels)):
            first = tmap.first(i)
            heads[first] = ROOT if h == ROOT else tmap.first(h)
            rels[first] = rel
            for j in tmap[i][1:]:
                heads[j] = first
        dtree = DependencyTree(tuple(heads), tuple(rels))

    ctree = None
    if doc.ctree is not None:
        (ctree,) = _remap_tree(doc.ctree, tmap, new_tokens)

    frames = []
    for f in doc.frames:
        args = tuple(UniformArgument(tmap.first(a.start), tmap.last(a.end), tmap.first(a.head), a.role)
                     for a in f.args)
        frames.append(Frame(tmap.first(f.predicate), f.sense, args))

    sent = Sentence(doc.sentence.id, tuple(new_tokens))
    return AnnotatedSentence(sent, ctree, dtree, tuple(frames)), tmap


def retokenize_corpus(docs: Sequence[AnnotatedSentence], lex: Lexicon) -> List[AnnotatedSentence]:
    return [retokenize_sentence(d, lex)[0] for d in docs]
