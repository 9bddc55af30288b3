"""Readers and writers for PTB brackets, CoNLL-2005 props, CoNLL-2009 columns
and the line-oriented uniform format.

Uniform format, one block per sentence, blocks separated by a blank line::

    #id <sentence-id>
    #text <tok0> <tok1> ...
    #dep <head0> <head1> ...        (optional, 0-based, -1 = root)
    #deprel <l0> <l1> ...           (optional, only with #dep)
    <pred>\t<sense|_>\t<s>:<e>:<h>:<role> <s>:<e>:<h>:<role> ...
"""

import re
from typing import Iterable, List, Optional, Sequence, Tuple

from .types import (
    ROOT,
    AnnotatedSentence,
    ConstituentNode,
    DependencyTree,
    ExportError,
    FormatError,
    Frame,
    Sentence,
    SpanArgument,
    SpanFrame,
    Token,
    UniformArgument,
    ValidationError,
)


class PTBParseError(FormatError):
    def __init__(self, message, offset):
        super().__init__("%s at byte offset %d" % (message, offset))
        self.offset = offset


class EmptyTreeError(FormatError):
    pass


# ---------------------------------------------------------------------------
# Penn Treebank brackets

_PTB_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def strip_label(raw: str) -> str:
    """Drop function tags and co-indices: ``NP-SBJ-1`` -> ``NP``, ``NP=2`` -> ``NP``.

    Labels that begin with ``-`` (``-LRB-``, ``-NONE-``) are returned unchanged.
    """
    if raw.startswith("-") or not raw:
        return raw
    return re.split(r"[-=]", raw, maxsplit=1)[0] or raw


def _byte_offset(text, char_pos):
    return len(text[:char_pos].encode("utf-8"))


def _read_sexpr(text, pos=0):
    """Parse one bracketed expression into nested ``[label, children|word]`` lists.

    Returns ``(tree, next_char_pos)``; ``tree`` is None when only whitespace remains.
    """
    stack = []
    tree = None
    for m in _PTB_TOKEN.finditer(text, pos):
        tok = m.group()
        if tok == "(":
            node = [None, []]
            if stack:
                stack[-1][1].append(node)
            elif tree is not None:
                return tree, m.start()
            else:
                tree = node
            stack.append(node)
        elif tok == ")":
            if not stack:
                raise PTBParseError("unexpected ')'", _byte_offset(text, m.start()))
            stack.pop()
            if not stack:
                return tree, m.end()
        else:
            if not stack:
                raise PTBParseError("text outside brackets", _byte_offset(text, m.start()))
            node = stack[-1]
            if node[0] is None and not node[1]:
                node[0] = tok
            elif not node[1] or isinstance(node[1], str):
                if isinstance(node[1], str):
                    raise PTBParseError("two words in one leaf", _byte_offset(text, m.start()))
                node[1] = tok
            else:
                raise PTBParseError("word after subtrees", _byte_offset(text, m.start()))
    if stack:
        raise PTBParseError("unbalanced brackets: %d unclosed" % len(stack),
                            len(text.encode("utf-8")))
    return tree, len(text)


def _build(raw, words, tags):
    """Turn the nested list form into ConstituentNodes, dropping -NONE- leaves."""
    label, body = raw
    label = label or ""
    if isinstance(body, str):
        if label == "-NONE-":
            return None
        idx = len(words)
        words.append(body)
        tags.append(label)
        return ConstituentNode(strip_label(label), idx, idx, (), label)
    kids = [k for k in (_build(c, words, tags) for c in body) if k is not None]
    if not kids:
        return None
    return ConstituentNode(strip_label(label), kids[0].start, kids[-1].end, tuple(kids), label)


def _tree_from_raw(raw, sent_id):
    # PTB files wrap each tree in an unlabeled outer bracket
    while raw[0] is None and isinstance(raw[1], list) and len(raw[1]) == 1:
        raw = raw[1][0]
    words, tags = [], []
    tree = _build(raw, words, tags)
    if tree is None:
        raise EmptyTreeError("tree %s is empty after trace removal" % sent_id)
    sent = Sentence(sent_id, tuple(Token(i, w, None, t) for i, (w, t) in enumerate(zip(words, tags))))
    tree.validate(len(sent))
    return sent, tree


def parse_ptb(text: str, sent_id: str = "s1") -> Tuple[Sentence, ConstituentNode]:
    raw, _ = _read_sexpr(text)
    if raw is None:
        raise EmptyTreeError("no tree in input")
    return _tree_from_raw(raw, sent_id)


def iter_ptb(text: str, id_prefix: str = "s"):
    """Yield ``(Sentence, tree)`` for every tree in a multi-tree string."""
    pos = 0
    k = 0
    while True:
        raw, pos = _read_sexpr(text, pos)
        if raw is None:
            return
        k += 1
        yield _tree_from_raw(raw, "%s%d" % (id_prefix, k))


# ---------------------------------------------------------------------------
# Role naming

_LONG_ROLE = re.compile(r"^((?:[CR]-)?)ARG(M-.+|A|\d)$")
_SHORT_ROLE = re.compile(r"^((?:[CR]-)?)A(M-.+|A|\d)$")


def to_short_role(role: str) -> str:
    """``ARG1`` -> ``A1``, ``C-ARGM-LOC`` -> ``C-AM-LOC``; other labels unchanged."""
    m = _LONG_ROLE.match(role)
    return "%sA%s" % (m.group(1), m.group(2)) if m else role


def to_long_role(role: str) -> str:
    m = _SHORT_ROLE.match(role)
    return "%sARG%s" % (m.group(1), m.group(2)) if m else role


def _role_mapper(style):
    if style is None:
        return lambda r: r
    if style == "short":
        return to_short_role
    if style == "long":
        return to_long_role
    raise ValueError("unknown role style %r" % style)


def _blocks(text):
    """Split into blank-line separated blocks of ``(lineno, line)`` pairs."""
    block = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.strip():
            block.append((lineno, line))
        elif block:
            yield block
            block = []
    if block:
        yield block


# ---------------------------------------------------------------------------
# CoNLL-2005 props

_PROP_CELL = re.compile(r"^(?:\(([^()*\s]+))?\*(\))?$")


def parse_conll05_props(text: str, words: bool = False, role_style: Optional[str] = None,
                        id_prefix: str = "s") -> List[Tuple[Sentence, List[SpanFrame]]]:
    """Read star-bracket proposition columns.

    Column 0 is the target lemma or ``-``; each further column is one
    predicate.  With ``words=True`` a leading word-form column is expected.
    Without it, token forms are filled from the target column.
    """
    mapper = _role_mapper(role_style)
    out = []
    for k, block in enumerate(_blocks(text), 1):
        rows = [line.split() for _, line in block]
        ncols = len(rows[0])
        for (lineno, _), row in zip(block, rows):
            if len(row) != ncols:
                raise FormatError("line %d: expected %d columns, found %d" % (lineno, ncols, len(row)))
        first = 2 if words else 1
        if ncols < first:
            raise FormatError("line %d: missing target column" % block[0][0])
        forms = [r[0] for r in rows]
        lemmas = [r[first - 1] for r in rows]
        toks = tuple(Token(i, forms[i], None if lemmas[i] == "-" else lemmas[i])
                     for i in range(len(rows)))
        sent = Sentence("%s%d" % (id_prefix, k), toks)
        frames = []
        for col in range(first, ncols):
            pred = None
            args = []
            open_role = open_start = None
            for i, ((lineno, _), row) in enumerate(zip(block, rows)):
                m = _PROP_CELL.match(row[col])
                if m is None:
                    raise FormatError("line %d, column %d: bad cell %r" % (lineno, col + 1, row[col]))
                role, close = m.group(1), m.group(2)
                if role is not None:
                    if open_role is not None:
                        raise FormatError("line %d, column %d: nested bracket (%s inside (%s"
                                          % (lineno, col + 1, role, open_role))
                    open_role, open_start = role, i
                if close:
                    if open_role is None:
                        raise FormatError("line %d, column %d: ')' without open bracket"
                                          % (lineno, col + 1))
                    if open_role == "V":
                        if pred is not None or open_start != i:
                            raise FormatError("line %d, column %d: bad (V*) bracket"
                                              % (lineno, col + 1))
                        pred = i
                    else:
                        args.append(SpanArgument(open_start, i, mapper(open_role)))
                    open_role = None
            if open_role is not None:
                lineno = block[-1][0]
                raise FormatError("line %d, column %d: unclosed (%s bracket at sentence end"
                                  % (lineno, col + 1, open_role))
            if pred is None:
                raise FormatError("line %d, column %d: no (V*) predicate" % (block[0][0], col + 1))
            frames.append(SpanFrame(pred, None, tuple(args)))
        out.append((sent, frames))
    return out


def _format_props_block(sent, frames, words, mapper):
    n = len(sent)
    cols = []
    for f in frames:
        cells = ["*"] * n
        for a in f.args:
            if a.start <= f.predicate <= a.end:
                raise ExportError("sentence %s: argument [%d,%d] covers predicate %d"
                                  % (sent.id, a.start, a.end, f.predicate))
        try:
            SpanFrame(f.predicate, f.sense, tuple(a if isinstance(a, SpanArgument) else a.span
                                                   for a in f.args)).validate(n)
        except ValidationError as e:
            raise ExportError("sentence %s: cannot bracket: %s" % (sent.id, e)) from None
        for a in f.args:
            role = mapper(a.role)
            if a.start == a.end:
                cells[a.start] = "(%s*)" % role
            else:
                cells[a.start] = "(%s*" % role
                cells[a.end] = "*)"
        cells[f.predicate] = "(V*)"
        cols.append(cells)
    preds = {f.predicate for f in frames}
    lines = []
    for i, tok in enumerate(sent.tokens):
        row = []
        if words:
            row.append(tok.form)
        if i in preds:
            row.append(tok.lemma or tok.form)
        else:
            row.append("-")
        row.extend(c[i] for c in cols)
        lines.append("\t".join(row))
    return "".join(line + "\n" for line in lines)


def export_span_projection(docs: Iterable[AnnotatedSentence], words: bool = False,
                           role_style: Optional[str] = None) -> str:
    """Write frames as CoNLL-2005 props, dropping argument heads."""
    mapper = _role_mapper(role_style)
    blocks = []
    for d in docs:
        frames = sorted(d.frames, key=lambda f: f.predicate)
        blocks.append(_format_props_block(d.sentence, frames, words, mapper))
    return "\n".join(blocks)


# ---------------------------------------------------------------------------
# CoNLL-2009

CONLL09_FIXED = 14


def _nullable(v):
    return None if v == "_" else v


def parse_conll09(text: str, role_style: Optional[str] = None,
                  id_prefix: str = "s") -> List[AnnotatedSentence]:
    """Read CoNLL-2009 columns; arguments become single-token quintuples.

    A ``#id <x>`` comment line directly before a block names the sentence.
    """
    mapper = _role_mapper(role_style)
    docs = []
    k = 0
    for block in _blocks(text):
        k += 1
        sid = "%s%d" % (id_prefix, k)
        rows = []
        for lineno, line in block:
            if line.startswith("#"):
                if line.startswith("#id "):
                    sid = line[4:].strip()
                continue
            rows.append((lineno, line.rstrip("\r\n").split("\t")))
        if not rows:
            continue
        ncols = len(rows[0][1])
        if ncols < CONLL09_FIXED:
            raise FormatError("line %d: expected at least %d columns, found %d"
                              % (rows[0][0], CONLL09_FIXED, ncols))
        for lineno, cols in rows:
            if len(cols) != ncols:
                raise FormatError("line %d: expected %d columns, found %d"
                                  % (lineno, ncols, len(cols)))
        n = len(rows)
        toks = []
        heads, rels = [], []
        pred_rows = []
        for i, (lineno, c) in enumerate(rows):
            if c[0] != str(i + 1):
                raise FormatError("line %d: expected ID %d, found %r" % (lineno, i + 1, c[0]))
            toks.append(Token(i, c[1], _nullable(c[2]), _nullable(c[4])))
            if c[8] == "_":
                heads.append(None)
            else:
                try:
                    h = int(c[8])
                except ValueError:
                    raise FormatError("line %d: bad HEAD %r" % (lineno, c[8])) from None
                if not 0 <= h <= n:
                    raise ValidationError("line %d: HEAD %d out of range 0..%d" % (lineno, h, n))
                heads.append(h - 1)
            rels.append(c[10])
            if c[12] == "Y":
                pred_rows.append((i, _nullable(c[13])))
        if len(pred_rows) != ncols - CONLL09_FIXED:
            raise FormatError("sentence %s: %d predicates but %d APRED columns"
                              % (sid, len(pred_rows), ncols - CONLL09_FIXED))
        dtree = None
        if any(h is not None for h in heads):
            if any(h is None for h in heads):
                raise FormatError("sentence %s: HEAD column partially filled" % sid)
            dtree = DependencyTree(tuple(heads), tuple(rels))
            try:
                dtree.validate(n)
            except ValidationError as e:
                raise ValidationError("sentence %s: %s" % (sid, e)) from None
        frames = []
        for j, (p, sense) in enumerate(pred_rows):
            args = []
            for i, (_, c) in enumerate(rows):
                cell = c[CONLL09_FIXED + j]
                if cell != "_":
                    args.append(UniformArgument(i, i, i, mapper(cell)))
            frames.append(Frame(p, sense, tuple(args)))
        docs.append(AnnotatedSentence(Sentence(sid, tuple(toks)), None, dtree, tuple(frames)))
    return docs


def export_dep_projection(docs: Iterable[AnnotatedSentence], role_style: Optional[str] = None,
                          with_ids: bool = True) -> str:
    """Write CoNLL-2009 columns keeping only (predicate, head, role)."""
    mapper = _role_mapper(role_style)
    blocks = []
    for d in docs:
        n = len(d)
        frames = sorted(d.frames, key=lambda f: f.predicate)
        preds = [f.predicate for f in frames]
        if len(set(preds)) != len(preds):
            raise ExportError("sentence %s: two frames share a predicate token" % d.id)
        cols = []
        for f in frames:
            cells = ["_"] * n
            for a in f.args:
                if cells[a.head] != "_":
                    raise ExportError("sentence %s: frame %d has two arguments headed at %d"
                                      % (d.id, f.predicate, a.head))
                cells[a.head] = mapper(a.role)
            cols.append(cells)
        senses = {f.predicate: f.sense for f in frames}
        lines = []
        if with_ids:
            lines.append("#id %s" % d.id)
        for i, tok in enumerate(d.sentence.tokens):
            if d.dtree is not None:
                head = str(d.dtree.heads[i] + 1)
                rel = d.dtree.deprels[i]
            else:
                head = rel = "_"
            row = [str(i + 1), tok.form, tok.lemma or "_", "_", tok.pos or "_", "_", "_", "_",
                   head, "_", rel, "_"]
            if i in senses:
                row += ["Y", senses[i] or "_"]
            else:
                row += ["_", "_"]
            row += [c[i] for c in cols]
            lines.append("\t".join(row))
        blocks.append("".join(line + "\n" for line in lines))
    return "\n".join(blocks)


# ---------------------------------------------------------------------------
# Uniform format

def _check_field(value, what, sid):
    if not value or any(ch.isspace() for ch in value):
        raise ValidationError("sentence %s: %s %r cannot be written" % (sid, what, value))


def write_uniform(docs: Iterable[AnnotatedSentence]) -> str:
    blocks = []
    for d in docs:
        d.validate()
        sid = d.id
        _check_field(sid, "id", sid)
        lines = ["#id " + sid]
        for f in d.sentence.forms:
            _check_field(f, "token", sid)
        lines.append("#text " + " ".join(d.sentence.forms))
        if d.dtree is not None:
            lines.append("#dep " + " ".join(str(h) for h in d.dtree.heads))
            for r in d.dtree.deprels:
                _check_field(r, "deprel", sid)
            lines.append("#deprel " + " ".join(d.dtree.deprels))
        for f in d.frames:
            if f.sense is not None:
                _check_field(f.sense, "sense", sid)
            args = []
            for a in f.args:
                _check_field(a.role, "role", sid)
                args.append("%d:%d:%d:%s" % (a.start, a.end, a.head, a.role))
            lines.append("%d\t%s\t%s" % (f.predicate, f.sense or "_", " ".join(args)))
        blocks.append("".join(line + "\n" for line in lines))
    return "\n".join(blocks)


def _parse_int(s, lineno):
    try:
        return int(s)
    except ValueError:
        raise FormatError("line %d: expected integer, found %r" % (lineno, s)) from None


def read_uniform(text: str) -> List[AnnotatedSentence]:
    docs = []
    for block in _blocks(text):
        sid = forms = heads = rels = None
        frames = []
        for lineno, line in block:
            if line.startswith("#id "):
                sid = line[4:]
            elif line.startswith("#text "):
                forms = line[6:].split(" ")
            elif line.startswith("#dep "):
                heads = [_parse_int(h, lineno) for h in line[5:].split(" ")]
            elif line.startswith("#deprel "):
                rels = line[8:].split(" ")
            elif line.startswith("#"):
                raise FormatError("line %d: unknown header %r" % (lineno, line.split()[0]))
            else:
                parts = line.split("\t")
                if len(parts) == 2:
                    parts.append("")
                if len(parts) != 3:
                    raise FormatError("line %d: expected 3 tab-separated fields" % lineno)
                args = []
                for item in parts[2].split(" ") if parts[2] else []:
                    f = item.split(":", 3)
                    if len(f) != 4 or not f[3]:
                        raise FormatError("line %d: bad argument %r" % (lineno, item))
                    args.append(UniformArgument(_parse_int(f[0], lineno), _parse_int(f[1], lineno),
                                                _parse_int(f[2], lineno), f[3]))
                frames.append(Frame(_parse_int(parts[0], lineno),
                                    None if parts[1] == "_" else parts[1], tuple(args)))
        first = block[0][0]
        if sid is None or forms is None:
            raise FormatError("line %d: block lacks #id or #text" % first)
        if (heads is None) != (rels is None):
            raise FormatError("line %d: #dep and #deprel must appear together" % first)
        dtree = DependencyTree(tuple(heads), tuple(rels)) if heads is not None else None
        doc = AnnotatedSentence(Sentence.from_forms(sid, forms), None, dtree, tuple(frames))
        doc.validate()
        docs.append(doc)
    return docs


def span_frames(doc: AnnotatedSentence) -> List[SpanFrame]:
    return [SpanFrame(f.predicate, f.sense, tuple(a.span for a in f.args)) for f in doc.frames]
