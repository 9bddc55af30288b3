import random

from hypothesis import given, settings
from hypothesis import strategies as st

from srlu.dep_converter import HeadRuleTable, convert_tree
from srlu.retokenizer import DEFAULT_PREFIXES, Lexicon, retokenize_sentence, split_token
from srlu.treebank_io import parse_ptb
from srlu.types import (
    AnnotatedSentence,
    DependencyTree,
    Frame,
    Sentence,
    UniformArgument,
)

LEX = Lexicon(words={"finger", "pointing", "chairman", "buy"}, entities={"McGraw", "Hill"})


def test_default_prefixes_match_list():
    assert DEFAULT_PREFIXES == {
        "co", "pre", "post", "un", "anti", "ante", "ex", "extra", "fore", "non", "over", "pro",
        "re", "super", "sub", "tri", "bi", "uni", "ultra"}


class TestSplitToken:
    def test_named_entity(self):
        assert split_token("McGraw-Hill", LEX) == ["McGraw", "-", "Hill"]

    def test_dictionary_words(self):
        assert split_token("finger-pointing", LEX) == ["finger", "-", "pointing"]

    def test_prefix(self):
        assert split_token("co-chairman", LEX) == ["co", "-", "chairman"]

    def test_unknown_sides(self):
        assert split_token("x-y", LEX) == ["x-y"]

    def test_one_side_unknown(self):
        assert split_token("co-xyzzy", LEX) == ["co-xyzzy"]

    def test_slash(self):
        assert split_token("buy/finger", LEX) == ["buy", "/", "finger"]

    def test_partial(self):
        assert split_token("finger-pointing-xyz", LEX) == ["finger", "-", "pointing-xyz"]

    def test_delimiter_only_tokens(self):
        for form in ["-", "--", "/", "-LRB-", "1/2"]:
            assert split_token(form, LEX) == [form]

    def test_case(self):
        assert split_token("Finger-Pointing", LEX) == ["Finger", "-", "Pointing"]
        assert split_token("mcgraw-hill", LEX) == ["mcgraw-hill"]


def test_lexicon_file():
    lex = Lexicon.from_text("#words\nfinger\npointing\n#entities\nMcGraw\nHill\n")
    assert lex.prefixes == DEFAULT_PREFIXES
    assert split_token("McGraw-Hill", lex) == ["McGraw", "-", "Hill"]
    lex = Lexicon.from_text("#prefixes\nmega\n")
    assert lex.prefixes == {"mega"}


class TestRetokenizeSentence:
    def test_span_boundary_remap(self):
        doc = AnnotatedSentence(
            Sentence.from_forms("s1", ["buy", "McGraw-Hill"]), None,
            DependencyTree((-1, 0), ("ROOT", "OBJ")),
            (Frame(0, None, (UniformArgument(1, 1, 1, "A1"),)),))
        out, tmap = retokenize_sentence(doc, LEX)
        assert out.sentence.forms == ["buy", "McGraw", "-", "Hill"]
        assert out.frames[0].args == (UniformArgument(1, 3, 1, "A1"),)
        assert list(tmap) == [(0,), (1, 2, 3)]
        assert out.dtree.heads == (-1, 0, 1, 1)
        assert out.dtree.deprels == ("ROOT", "OBJ", "HYPH", "HYPH")
        out.validate()

    def test_identity(self):
        doc = AnnotatedSentence(Sentence.from_forms("s1", ["a", "b"]), None,
                                DependencyTree((-1, 0), ("ROOT", "X")))
        out, tmap = retokenize_sentence(doc, LEX)
        assert out == doc
        assert tmap.is_identity

    def test_head_pointing_at_split_token(self):
        # "McGraw-Hill shares rose": shares -> McGraw-Hill? use rose <- shares <- McGraw-Hill
        doc = AnnotatedSentence(
            Sentence.from_forms("s1", ["McGraw-Hill", "shares", "rose"]), None,
            DependencyTree((1, 2, -1), ("NMOD", "SBJ", "ROOT")))
        doc2 = AnnotatedSentence(
            Sentence.from_forms("s1", ["rose", "McGraw-Hill"]), None,
            DependencyTree((-1, 0), ("ROOT", "X")))
        out, _ = retokenize_sentence(doc, LEX)
        assert out.dtree.heads == (3, 0, 0, 4, -1)
        # dependent of a split token points at its first segment
        doc3 = AnnotatedSentence(
            Sentence.from_forms("s1", ["McGraw-Hill", "shares"]), None,
            DependencyTree((-1, 0), ("ROOT", "X")))
        out3, _ = retokenize_sentence(doc3, LEX)
        assert out3.dtree.heads == (-1, 0, 0, 0)
        assert retokenize_sentence(doc2, LEX)[0].dtree.heads == (-1, 0, 1, 1)

    def test_constituent_tree_flattened(self):
        sent, tree = parse_ptb("(S (NP (NNP McGraw-Hill)) (VP (VBD rose)))")
        doc = AnnotatedSentence(sent, tree, convert_tree(tree, HeadRuleTable.default_table()))
        out, _ = retokenize_sentence(doc, LEX)
        out.validate()
        np_ = out.ctree.children[0]
        assert [c.label for c in np_.children] == ["NNP", "HYPH", "NNP"]
        assert np_.span == (0, 2)
        assert out.ctree.children[1].span == (3, 3)

    def test_idempotent(self):
        doc = AnnotatedSentence(Sentence.from_forms("s1", ["co-chairman", "McGraw-Hill"]))
        once, _ = retokenize_sentence(doc, LEX)
        twice, tmap = retokenize_sentence(once, LEX)
        assert twice == once
        assert tmap.is_identity


pieces = st.text(alphabet="abcoexpreHM", min_size=0, max_size=5)


@settings(max_examples=300)
@given(st.lists(st.tuples(pieces, st.sampled_from("-/")), max_size=4), pieces)
def test_character_conservation(parts, tail):
    form = "".join(p + d for p, d in parts) + tail
    if not form:
        return
    lex = Lexicon(words={"abc", "ab", "a", "H"}, entities={"HM"})
    segs = split_token(form, lex)
    assert "".join(segs) == form
    assert all(segs)
    for s in segs:
        assert split_token(s, lex) == [s] or len(s) > 1


def test_retokenized_structures_stay_valid():
    rng = random.Random(3)
    words = ["co", "chairman", "finger", "pointing", "x", "McGraw", "Hill"]
    for _ in range(200):
        n = rng.randint(1, 6)
        forms = []
        for _ in range(n):
            k = rng.randint(1, 3)
            forms.append(rng.choice("-/").join(rng.choice(words) for _ in range(k)))
        heads = [-1] + [rng.randrange(i) for i in range(1, n)]
        s = rng.randrange(n)
        e = rng.randrange(s, n)
        doc = AnnotatedSentence(Sentence.from_forms("s", forms), None,
                                DependencyTree(tuple(heads), tuple("X" for _ in heads)),
                                (Frame(s, None, (UniformArgument(s, e, s, "A0"),)),))
        out, tmap = retokenize_sentence(doc, LEX)
        out.validate()
        assert "".join(out.sentence.forms) == "".join(forms)
        flat = [j for seg in tmap for j in seg]
        assert flat == list(range(len(out)))
