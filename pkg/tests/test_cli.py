import subprocess
import sys

import pytest

from fixtures import EXAMPLES, GOLDEN, run, subcommand_runs, write_inputs
from srlu.treebank_io import parse_conll05_props, parse_conll09, read_uniform


@pytest.fixture
def d(tmp_path):
    return write_inputs(tmp_path)


class TestConvert:
    @pytest.mark.parametrize("name", EXAMPLES)
    def test_golden(self, d, name):
        status, _, err = run("convert", "--props", d / ("%s.props" % name),
                             "--dep", d / ("%s.conll09" % name), "--out", d / "out.uniform",
                             "--stats", d / "out.stats")
        assert status == 0, err
        assert (d / "out.uniform").read_bytes() == (GOLDEN / ("%s.uniform" % name)).read_bytes()
        assert (d / "out.stats").read_bytes() == (GOLDEN / ("%s.stats" % name)).read_bytes()

    def test_stdout(self, d):
        status, out, _ = run("convert", "--props", d / "visited.props", "--dep", d / "visited.conll09")
        assert status == 0
        assert out == (GOLDEN / "visited.uniform").read_text()

    def test_stats_subcommand(self, d):
        status, out, _ = run("stats", "--props", d / "says.props", "--dep", d / "says.conll09")
        assert status == 0
        assert "multi_head_args=1" in out and "emitted_subspans=4" in out

    def test_drop_punct(self, d):
        status, out, _ = run("convert", "--props", d / "says.props", "--dep", d / "says.conll09",
                             "--drop-punct-subspans")
        assert status == 0
        assert len(read_uniform(out)[0].frames[0].args) == 3

    def test_length_mismatch(self, d):
        status, _, err = run("convert", "--props", d / "visited.props", "--dep", d / "says.conll09")
        assert status == 1
        assert "tokens" in err

    def test_round_trip_through_export(self, d):
        run("export", "--in", GOLDEN / "says.uniform", "--span", d / "x.props")
        status, out, _ = run("convert", "--props", d / "x.props", "--dep", GOLDEN / "says.uniform")
        assert status == 0
        # sub-spans are already single-headed, so re-conversion is the identity
        assert out == (GOLDEN / "says.uniform").read_text()


class TestOtherCommands:
    def test_retokenize(self, d):
        status, out, _ = run("retokenize", "--in", d / "retok.uniform", "--lexicon", d / "lex.txt")
        assert status == 0
        doc, = read_uniform(out)
        assert doc.sentence.forms == ["buy", "McGraw", "-", "Hill"]
        assert doc.frames[0].args[0].end == 3

    def test_dep_convert(self, d):
        status, out, _ = run("dep-convert", "--ptb", d / "trees.mrg")
        assert status == 0
        docs = parse_conll09(out)
        assert [len(x) for x in docs] == [7, 2]
        status, out, _ = run("dep-convert", "--ptb", d / "trees.mrg", "--format", "uniform")
        assert [x.sentence.forms for x in read_uniform(out)][1] == ["McGraw-Hill", "rose"]

    def test_export(self, d):
        status, _, _ = run("export", "--in", d / "gold.uniform", "--span", d / "a", "--dep", d / "b",
                           "--role-style", "short")
        assert status == 0
        (_, frames), = parse_conll05_props((d / "a").read_text())
        assert [a.role for a in frames[0].args] == ["A1", "AM-LOC"]
        doc, = parse_conll09((d / "b").read_text())
        assert [(a.head, a.role) for a in doc.frames[0].args] == [(2, "A1"), (3, "AM-LOC")]

    def test_export_needs_target(self, d):
        assert run("export", "--in", d / "gold.uniform")[0] == 64

    def test_evaluate_perfect(self, d):
        status, out, _ = run("evaluate", "--gold", d / "gold.uniform", "--pred", d / "gold.uniform")
        assert status == 0
        rows = out.splitlines()[1:]
        assert len(rows) == 3
        assert all(r.split()[-3:] == ["1.000000"] * 3 for r in rows)

    def test_evaluate_projection(self, d):
        status, out, _ = run("evaluate", "--gold", d / "gold.uniform", "--pred", d / "gold.uniform",
                             "--projection", "dep")
        assert [r.split()[0] for r in out.splitlines()[1:]] == ["dep"]

    def test_evaluate_alignment(self, d):
        status, _, err = run("evaluate", "--gold", d / "gold.uniform",
                             "--pred", GOLDEN / "allow.uniform")
        assert status == 1
        assert "tokens" in err


class TestScore:
    def _score(self, d, *extra):
        return run("score", "--vectors", d / "vectors.txt", "--init-roles", "ARG1,ARGM-LOC",
                   "--gold", d / "gold.uniform", *extra)

    def test_lambda_changes_loss_not_decode(self, d):
        s1, out1, _ = self._score(d, "--lam", "1")
        s2, out2, _ = self._score(d, "--lam", "0.5")
        assert s1 == s2 == 0
        *dec1, loss1 = out1.splitlines()
        *dec2, loss2 = out2.splitlines()
        assert dec1 == dec2
        assert loss1 != loss2
        fields = dict(kv.split("=") for kv in loss1.split())
        assert fields["loss"] == fields["span_term"]

    def test_saved_params_reproduce(self, d):
        self._score(d, "--save-params", d / "p.txt", "--out", d / "a")
        run("score", "--vectors", d / "vectors.txt", "--params", d / "p.txt",
            "--gold", d / "gold.uniform", "--out", d / "b")
        assert (d / "a").read_bytes() == (d / "b").read_bytes()

    def test_without_gold(self, d):
        status, out, _ = run("score", "--vectors", d / "vectors.txt", "--init-roles", "A0")
        assert status == 0
        assert "loss=" not in out
        assert read_uniform(out)[0].sentence.forms[0] == "w0"

    def test_needs_params(self, d):
        assert run("score", "--vectors", d / "vectors.txt")[0] == 64

    def test_bad_lambda(self, d):
        assert self._score(d, "--lam", "2")[0] == 64


class TestExitCodes:
    def test_missing_file(self, d):
        status, _, err = run("evaluate", "--gold", d / "nope", "--pred", d / "gold.uniform")
        assert status == 2
        assert "I/O" in err

    def test_unknown_subcommand(self):
        assert run("frobnicate")[0] == 64

    def test_unknown_flag(self, d):
        assert run("evaluate", "--gold", d / "gold.uniform", "--bogus")[0] == 64

    def test_no_subcommand(self):
        assert run()[0] == 64

    def test_bad_format(self, d):
        (d / "bad.uniform").write_text("#id s1\n#text a b\n0\t_\t1:1:0:A0\n")
        assert run("evaluate", "--gold", d / "bad.uniform", "--pred", d / "bad.uniform")[0] == 1

    def test_version(self):
        out = subprocess.run([sys.executable, "-m", "srlu.cli", "--version"], capture_output=True,
                             text=True)
        assert out.returncode == 0
        assert out.stdout.startswith("srlu ")
        assert "scorer-params v1" in out.stdout


class TestConfig:
    def test_config_values(self, d):
        (d / "run.cfg").write_text("# evaluation\nprojection = span\ncount_senses=true\n")
        status, out, _ = run("--config", d / "run.cfg", "evaluate", "--gold", d / "gold.uniform",
                             "--pred", d / "gold.uniform")
        assert status == 0
        assert [r.split()[0] for r in out.splitlines()[1:]] == ["span"]

    def test_flag_overrides_config(self, d):
        (d / "run.cfg").write_text("projection=span\n")
        _, out, _ = run("--config", d / "run.cfg", "evaluate", "--gold", d / "gold.uniform",
                        "--pred", d / "gold.uniform", "--projection", "dep")
        assert [r.split()[0] for r in out.splitlines()[1:]] == ["dep"]

    def test_numeric_zero_kept(self, d):
        (d / "run.cfg").write_text("lam=0\n")
        _, out, _ = run("--config", d / "run.cfg", "score", "--vectors", d / "vectors.txt",
                        "--init-roles", "ARG1,ARGM-LOC", "--gold", d / "gold.uniform")
        fields = dict(kv.split("=") for kv in out.splitlines()[-1].split())
        assert fields["lam"] == "0.000000"
        assert fields["loss"] == fields["dep_term"]

    def test_bad_line(self, d):
        (d / "run.cfg").write_text("projection\n")
        assert run("--config", d / "run.cfg", "evaluate", "--gold", d / "gold.uniform",
                   "--pred", d / "gold.uniform")[0] == 64

    def test_unknown_key(self, d):
        (d / "run.cfg").write_text("colour=blue\n")
        assert run("--config", d / "run.cfg", "evaluate", "--gold", d / "gold.uniform",
                   "--pred", d / "gold.uniform")[0] == 64


@pytest.mark.parametrize("name", ["retokenize", "dep-convert", "convert", "stats", "export",
                                  "evaluate", "score"])
def test_deterministic(tmp_path, name):
    outputs = []
    for k in range(2):
        d = tmp_path / str(k)
        d.mkdir()
        write_inputs(d)
        argv, files = subcommand_runs(d)[name]
        status, _, err = run(*argv)
        assert status == 0, err
        outputs.append([(d / f).read_bytes() for f in files])
    assert outputs[0] == outputs[1]
