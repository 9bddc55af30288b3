"""Command-line front end: ``srlu <subcommand> [options]``.

Exit status: 0 success, 1 validation/format error, 2 I/O error, 64 usage error.
A ``--config`` file holds ``key=value`` lines named after long options
(``lam=0.5``, ``drop_punct_subspans=true``); flags on the command line win.
"""

import argparse
import logging
import os
import sys

from . import __version__, scorer
from .dep_converter import HeadRuleTable, convert_tree
from .evaluator import PROJECTIONS, evaluate_corpus, format_report, report_json
from .head_assigner import ConversionStats, convert_sentence
from .retokenizer import Lexicon, retokenize_sentence
from .treebank_io import (
    export_dep_projection,
    export_span_projection,
    iter_ptb,
    parse_conll05_props,
    parse_conll09,
    read_uniform,
    write_uniform,
)
from .types import AnnotatedSentence, Sentence, SrluError

log = logging.getLogger("srlu")

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("%s: %s" % (self.prog, message))


def _read(path):
    with open(path, encoding="utf-8") as f:
        return f.read()


def _emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)


def _read_dep_docs(path, fmt):
    text = _read(path)
    if fmt == "auto":
        fmt = "uniform" if text.lstrip().startswith("#id ") and "#text " in text else "conll09"
    docs = read_uniform(text) if fmt == "uniform" else parse_conll09(text)
    for d in docs:
        if d.dtree is None:
            raise SrluError("sentence %s in %s has no dependency tree" % (d.id, path))
    return docs


def _convert(args):
    props = parse_conll05_props(_read(args.props), words=args.props_words,
                                role_style=args.role_style)
    deps = _read_dep_docs(args.dep, args.dep_format)
    if len(props) != len(deps):
        raise SrluError("%s has %d sentences but %s has %d"
                        % (args.props, len(props), args.dep, len(deps)))
    docs, total = [], ConversionStats()
    for (psent, frames), ddoc in zip(props, deps):
        if len(psent) != len(ddoc):
            raise SrluError("sentence %s: %d tokens in props vs %d in dependency input"
                            % (ddoc.id, len(psent), len(ddoc)))
        senses = {f.predicate: f.sense for f in ddoc.frames}
        frames = [type(f)(f.predicate, senses.get(f.predicate), f.args) for f in frames]
        doc, stats = convert_sentence(ddoc.sentence, frames, ddoc.dtree, args.drop_punct_subspans)
        docs.append(doc)
        total = total + stats
    log.info("converted %d sentences: %s", len(docs), total.report().replace("\n", " "))
    return docs, total


def cmd_convert(args):
    docs, stats = _convert(args)
    _emit(write_uniform(docs), args.out)
    if args.stats:
        _emit(stats.report(), args.stats)


def cmd_stats(args):
    _, stats = _convert(args)
    _emit(stats.report(), args.out)


def cmd_retokenize(args):
    lex = Lexicon.load(args.lexicon) if args.lexicon else Lexicon()
    docs = [retokenize_sentence(d, lex)[0] for d in read_uniform(_read(args.input))]
    _emit(write_uniform(docs), args.out)


def cmd_dep_convert(args):
    table = HeadRuleTable.load(args.head_rules) if args.head_rules else HeadRuleTable.default_table()
    docs = []
    for sent, tree in iter_ptb(_read(args.ptb)):
        docs.append(AnnotatedSentence(sent, tree, convert_tree(tree, table), ()))
    if args.format == "uniform":
        _emit(write_uniform(docs), args.out)
    else:
        _emit(export_dep_projection(docs), args.out)


def cmd_export(args):
    docs = read_uniform(_read(args.input))
    if args.span is None and args.dep is None:
        raise UsageError("export: give --span and/or --dep")
    if args.span is not None:
        _emit(export_span_projection(docs, words=args.props_words, role_style=args.role_style),
              args.span)
    if args.dep is not None:
        _emit(export_dep_projection(docs, role_style=args.role_style), args.dep)


def cmd_evaluate(args):
    gold = read_uniform(_read(args.gold))
    pred = read_uniform(_read(args.pred))
    report = evaluate_corpus(gold, pred, count_senses=args.count_senses)
    projs = PROJECTIONS if args.projection == "all" else (args.projection,)
    _emit(format_report(report, projs), args.out)
    if args.json:
        _emit(report_json(report, projs), args.json)


def cmd_score(args):
    blocks = scorer.read_vectors(_read(args.vectors))
    gold = read_uniform(_read(args.gold)) if args.gold else None
    if gold is not None and len(gold) != len(blocks):
        raise SrluError("%d vector blocks but %d gold sentences" % (len(blocks), len(gold)))
    if args.params:
        params = scorer.load_params(_read(args.params))
    else:
        if not args.init_roles:
            raise UsageError("score: give --params or --init-roles")
        if not blocks:
            raise SrluError("no token vectors to size the parameters")
        params = scorer.ScorerParams.init(blocks[0].shape[1], args.init_roles.split(","),
                                          seed=args.seed)
    overrides = {"lam": args.lam, "max_width": args.max_width,
                 "beam_ratio_pred": args.beam_pred, "beam_ratio_arg": args.beam_arg}
    for k, v in overrides.items():
        if v is not None:
            setattr(params, k, v)
    params.validate()
    if args.save_params:
        _emit(scorer.save_params(params), args.save_params)

    docs = []
    total = span_total = dep_total = 0.0
    for k, vecs in enumerate(blocks):
        g = gold[k] if gold is not None else None
        if g is not None and len(g) != len(vecs):
            raise SrluError("sentence %s: %d tokens but %d vectors" % (g.id, len(g), len(vecs)))
        dtree = g.dtree if g is not None and not args.no_dsa else None
        pred_s, arg_s = scorer.unary_scores(vecs, params, dtree)
        cands = scorer.prune_candidates(pred_s, arg_s, params)
        scored = scorer.score_candidates(vecs, cands, params, dtree)
        frames = scorer.decode_frames(scored, params)
        if g is not None:
            roles, heads = scorer.gold_targets(cands, g.frames, params.roles)
            st, dt = scorer.loss_terms(scored, roles, heads)
            span_total += st
            dep_total += dt
            total += params.lam * st + (1 - params.lam) * dt
            sent = g.sentence
        else:
            sent = Sentence.from_forms("s%d" % (k + 1), ["w%d" % i for i in range(len(vecs))])
        docs.append(AnnotatedSentence(sent, None, None, tuple(frames)))
    _emit(write_uniform(docs), args.out)
    if gold is not None:
        line = "loss=%.6f span_term=%.6f dep_term=%.6f lam=%.6f\n" % (
            total, span_total, dep_total, params.lam)
        if args.loss:
            _emit(line, args.loss)
        else:
            sys.stdout.write(line)


def _unit_float(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError("expected a value in [0, 1], got %s" % text)
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer, got %s" % text)
    return v


def build_parser():
    p = _Parser(prog="srlu", description="Uniform span/dependency SRL toolkit")
    p.add_argument("--version", action="version",
                   version="srlu %s (uniform v1, %s)" % (__version__, scorer.PARAMS_HEADER))
    p.add_argument("--config", help="key=value file with default option values")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="output path (default: stdout)")
        return sp

    sp = add("retokenize", cmd_retokenize, "split hyphenated tokens in a uniform file")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--lexicon")

    sp = add("dep-convert", cmd_dep_convert, "convert PTB trees to dependency trees")
    sp.add_argument("--ptb", required=True)
    sp.add_argument("--head-rules")
    sp.add_argument("--format", choices=("conll09", "uniform"), default="conll09")

    for name, func, help in (("convert", cmd_convert, "span props + dependency trees -> uniform"),
                             ("stats", cmd_stats, "conversion statistics only")):
        sp = add(name, func, help)
        sp.add_argument("--props", required=True)
        sp.add_argument("--dep", required=True)
        sp.add_argument("--dep-format", choices=("auto", "conll09", "uniform"), default="auto")
        sp.add_argument("--props-words", action="store_true",
                        help="props file has a leading word-form column")
        sp.add_argument("--role-style", choices=("short", "long"))
        sp.add_argument("--drop-punct-subspans", action="store_true")
        if name == "convert":
            sp.add_argument("--stats")

    sp = add("export", cmd_export, "uniform -> CoNLL-2005 / CoNLL-2009 projections")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--span")
    sp.add_argument("--dep")
    sp.add_argument("--props-words", action="store_true")
    sp.add_argument("--role-style", choices=("short", "long"))

    sp = add("evaluate", cmd_evaluate, "micro P/R/F1 of predictions against gold")
    sp.add_argument("--gold", required=True)
    sp.add_argument("--pred", required=True)
    sp.add_argument("--projection", choices=PROJECTIONS + ("all",), default="all")
    sp.add_argument("--count-senses", action="store_true")
    sp.add_argument("--json")

    sp = add("score", cmd_score, "score token vectors, decode frames, report the joint loss")
    sp.add_argument("--vectors", required=True)
    sp.add_argument("--params")
    sp.add_argument("--init-roles", help="comma-separated roles for fresh random parameters")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--save-params")
    sp.add_argument("--gold")
    sp.add_argument("--loss", help="write the loss line here instead of stdout")
    sp.add_argument("--lam", type=_unit_float)
    sp.add_argument("--max-width", type=_positive_int)
    sp.add_argument("--beam-pred", type=_unit_float)
    sp.add_argument("--beam-arg", type=_unit_float)
    sp.add_argument("--no-dsa", action="store_true")
    return p


def _config_argv(path):
    argv = []
    for lineno, line in enumerate(_read(path).splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError("%s line %d: expected key=value" % (path, lineno))
        flag = "--" + key.strip().replace("_", "-")
        value = value.strip()
        # numbers stay values so that lam=0 or lam=1 work
        if value.lower() in ("true", "yes", "on"):
            argv.append(flag)
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            argv += [flag, value]
    return argv


def main(argv=None):
    level = os.environ.get("SRLU_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        if args.config:
            cmd_at = argv.index(args.command)
            args = parser.parse_args(argv[:cmd_at + 1] + _config_argv(args.config) + argv[cmd_at + 1:])
        args.func(args)
    except UsageError as e:
        sys.stderr.write("%s\n" % e)
        return EXIT_USAGE
    except OSError as e:
        sys.stderr.write("srlu: I/O error: %s\n" % e)
        return EXIT_IO
    except (SrluError, ValueError) as e:
        sys.stderr.write("srlu: %s\n" % e)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
