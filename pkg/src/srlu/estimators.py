"""scikit-learn compatible wrappers around the conversion and scoring code.

The transformers take and return lists of :class:`AnnotatedSentence`, so
they can be chained with :class:`sklearn.pipeline.Pipeline`.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import scorer
from .dep_converter import HeadRuleTable, convert_tree
from .evaluator import compare_all, micro_prf
from .head_assigner import ConversionStats, convert_sentence
from .retokenizer import Lexicon, retokenize_sentence
from .types import AnnotatedSentence, ConstituentNode, DependencyTree, Frame
from .validation import check_documents, check_fitted, check_token_vectors


class Retokenizer(TransformerMixin, BaseEstimator):
    """Split hyphen/slash compounds; ``lexicon`` is a :class:`Lexicon` or a path."""

    def __init__(self, lexicon=None):
        self.lexicon = lexicon

    def fit(self, X, y=None):
        if self.lexicon is None:
            self.lexicon_ = Lexicon()
        elif isinstance(self.lexicon, Lexicon):
            self.lexicon_ = self.lexicon
        else:
            self.lexicon_ = Lexicon.load(self.lexicon)
        return self

    def transform(self, X):
        check_fitted(self, "lexicon_")
        return [retokenize_sentence(d, self.lexicon_)[0] for d in check_documents(X)]


class DependencyConverter(TransformerMixin, BaseEstimator):
    """Fill ``dtree`` from ``ctree`` with a head-rule table."""

    def __init__(self, head_rules=None):
        self.head_rules = head_rules

    def fit(self, X, y=None):
        if self.head_rules is None:
            self.table_ = HeadRuleTable.default_table()
        elif isinstance(self.head_rules, HeadRuleTable):
            self.table_ = self.head_rules
        else:
            self.table_ = HeadRuleTable.load(self.head_rules)
        return self

    def transform(self, X):
        check_fitted(self, "table_")
        out = []
        for d in check_documents(X, need_ctree=True):
            out.append(AnnotatedSentence(d.sentence, d.ctree, convert_tree(d.ctree, self.table_),
                                         d.frames))
        return out


class UniformConverter(TransformerMixin, BaseEstimator):
    """Turn span frames plus a dependency tree into uniform frames.

    ``X`` is a list of ``(doc, span_frames)`` pairs where ``doc.dtree`` is
    set.  ``fit`` records corpus statistics in ``stats_``.
    """

    def __init__(self, drop_punct=False):
        self.drop_punct = drop_punct

    def _convert(self, X):
        docs, total = [], ConversionStats()
        for doc, frames in X:
            check_documents([doc], need_dtree=True)
            out, stats = convert_sentence(doc.sentence, frames, doc.dtree, self.drop_punct)
            docs.append(AnnotatedSentence(doc.sentence, doc.ctree, doc.dtree, out.frames))
            total = total + stats
        return docs, total

    def fit(self, X, y=None):
        _, self.stats_ = self._convert(X)
        return self

    def transform(self, X):
        return self._convert(X)[0]

    def fit_transform(self, X, y=None, **fit_params):
        docs, self.stats_ = self._convert(X)
        return docs


@dataclass(frozen=True)
class ScorerInput:
    """Token vectors for one sentence plus optional syntax."""

    vectors: np.ndarray
    dtree: Optional[DependencyTree] = None
    ctree: Optional[ConstituentNode] = None


class JointSpanScorer(BaseEstimator):
    """Biaffine role scorer over pruned (predicate, span) candidates.

    ``fit`` builds the role vocabulary from ``y`` and draws initial
    parameters from ``random_state``; it runs no optimisation.  Train by
    feeding :meth:`loss_and_grad` to an optimiser of your choice and
    writing the updated arrays back into ``params_``.
    """

    def __init__(self, width_dim=4, csa_dim=2, max_width=8, lam=0.5, beam_ratio_pred=1.0,
                 beam_ratio_arg=1.0, use_dsa=True, use_csa=True, random_state=0):
        self.width_dim = width_dim
        self.csa_dim = csa_dim
        self.max_width = max_width
        self.lam = lam
        self.beam_ratio_pred = beam_ratio_pred
        self.beam_ratio_arg = beam_ratio_arg
        self.use_dsa = use_dsa
        self.use_csa = use_csa
        self.random_state = random_state

    def _inputs(self, X):
        out = []
        for x in X:
            if not isinstance(x, ScorerInput):
                x = ScorerInput(np.asarray(x))
            out.append(x)
        return out

    def fit(self, X, y):
        X = self._inputs(X)
        if len(X) == 0:
            raise ValueError("fit needs at least one sentence")
        dim = check_token_vectors(X[0].vectors).shape[1]
        roles = sorted({a.role for frames in y for f in frames for a in f.args})
        self.params_ = scorer.ScorerParams.init(
            dim, roles, width_dim=self.width_dim, csa_dim=self.csa_dim if self.use_csa else 0,
            max_width=self.max_width, lam=self.lam, beam_ratio_pred=self.beam_ratio_pred,
            beam_ratio_arg=self.beam_ratio_arg, seed=self.random_state)
        self.classes_ = np.array(self.params_.roles)
        return self

    def _syntax(self, x):
        return (x.dtree if self.use_dsa else None), (x.ctree if self.use_csa else None)

    def candidates(self, x: ScorerInput) -> List[scorer.Candidate]:
        check_fitted(self, "params_")
        vecs = check_token_vectors(x.vectors, self.params_.dim)
        dtree, ctree = self._syntax(x)
        pred, arg = scorer.unary_scores(vecs, self.params_, dtree, ctree)
        return scorer.prune_candidates(pred, arg, self.params_)

    def score_sentence(self, x: ScorerInput):
        dtree, ctree = self._syntax(x)
        cands = self.candidates(x)
        return scorer.score_candidates(x.vectors, cands, self.params_, dtree, ctree)

    def predict(self, X) -> List[List[Frame]]:
        check_fitted(self, "params_")
        return [scorer.decode_frames(self.score_sentence(x), self.params_) for x in self._inputs(X)]

    def loss_and_grad(self, X, y, lam=None):
        """Summed joint loss and gradients over a corpus (gradients add across sentences)."""
        check_fitted(self, "params_")
        total = 0.0
        grads = {k: np.zeros_like(getattr(self.params_, k)) for k in scorer.TRAINABLE}
        for x, frames in zip(self._inputs(X), y):
            dtree, ctree = self._syntax(x)
            cands = self.candidates(x)
            roles, heads = scorer.gold_targets(cands, frames, self.params_.roles)
            J, g = scorer.loss_and_grad(x.vectors, cands, roles, heads, self.params_,
                                        dtree, ctree, lam)
            total += J
            for k in grads:
                grads[k] += g[k]
        return total, grads

    def loss(self, X, y, lam=None) -> float:
        return self.loss_and_grad(X, y, lam)[0]

    def score(self, X, y) -> float:
        """Micro F1 of the uniform projection."""
        counts = None
        for pred, gold in zip(self.predict(X), y):
            c = compare_all(gold, pred)
            counts = c if counts is None else counts + c
        return micro_prf(counts.uniform).f1 if counts is not None else 0.0
