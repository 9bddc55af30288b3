"""Files and invocations shared by the CLI and acceptance tests."""

import io
import shutil
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import numpy as np

from srlu.cli import main
from srlu.scorer import write_vectors

GOLDEN = Path(__file__).parent / "golden"
EXAMPLES = ("visited", "allow", "says")

PTB = """\
(S (NP-SBJ (DT The) (NN bill)) (VP (MD would) (VP (VB lift) (NP (DT the) (NN wage)))) (. .))
( (S (NP (NNP McGraw-Hill)) (VP (VBD rose) (NP (-NONE- *T*)))) )
"""

LEXICON = "#words\nfinger\npointing\n#entities\nMcGraw\nHill\n"

RETOK_INPUT = "#id s1\n#text buy McGraw-Hill\n#dep -1 0\n#deprel ROOT OBJ\n0\t_\t1:1:1:ARG1\n"


def run(*argv):
    """Invoke the CLI in-process; returns (status, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        status = main([str(a) for a in argv])
    return status, out.getvalue(), err.getvalue()


def write_inputs(d: Path) -> Path:
    for name in EXAMPLES:
        for ext in ("props", "conll09"):
            shutil.copy(GOLDEN / ("%s.%s" % (name, ext)), d / ("%s.%s" % (name, ext)))
    (d / "trees.mrg").write_text(PTB)
    (d / "lex.txt").write_text(LEXICON)
    (d / "retok.uniform").write_text(RETOK_INPUT)
    shutil.copy(GOLDEN / "visited.uniform", d / "gold.uniform")
    vecs = np.random.default_rng(0).normal(size=(6, 4)).round(6)
    (d / "vectors.txt").write_text(write_vectors([vecs]))
    return d


def subcommand_runs(d: Path):
    """One invocation per subcommand; each yields a list of output files."""
    return {
        "retokenize": (["retokenize", "--in", d / "retok.uniform", "--lexicon", d / "lex.txt",
                        "--out", d / "o.retok"], ["o.retok"]),
        "dep-convert": (["dep-convert", "--ptb", d / "trees.mrg", "--out", d / "o.conll09"],
                        ["o.conll09"]),
        "convert": (["convert", "--props", d / "says.props", "--dep", d / "says.conll09",
                     "--out", d / "o.uniform", "--stats", d / "o.stats"], ["o.uniform", "o.stats"]),
        "stats": (["stats", "--props", d / "allow.props", "--dep", d / "allow.conll09",
                   "--out", d / "o2.stats"], ["o2.stats"]),
        "export": (["export", "--in", d / "gold.uniform", "--span", d / "o.props",
                    "--dep", d / "o.dep"], ["o.props", "o.dep"]),
        "evaluate": (["evaluate", "--gold", d / "gold.uniform", "--pred", d / "gold.uniform",
                      "--out", d / "o.eval", "--json", d / "o.json"], ["o.eval", "o.json"]),
        "score": (["score", "--vectors", d / "vectors.txt", "--init-roles", "ARG1,ARGM-LOC",
                   "--gold", d / "gold.uniform", "--out", d / "o.score", "--loss", d / "o.loss",
                   "--save-params", d / "o.params"], ["o.score", "o.loss", "o.params"]),
    }
