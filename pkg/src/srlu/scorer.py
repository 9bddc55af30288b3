"""Numerical scoring head for joint span/dependency role labelling.

Token vectors come from outside (no encoder here).  For a candidate
(predicate ``p``, span ``[s, e]``)::

    logits_t = w_s . x_t + w_dsa * dsa_t               t in [s, e]
    alpha    = softmax(logits)
    x_span   = sum_t alpha_t x_t
    x_arg    = [x_s; x_e; x_span; width[e - s]; csa_table[csa]]
    phi_r    = x_p^T W1[r] x_arg + W2[r] . [x_p; x_arg] + b[r]
    P(r)     = softmax(phi)_r
    head     = s + argmax(alpha)

The loss is ``lam * span_nll + (1 - lam) * head_nll`` where ``head_nll``
is ``-log alpha`` at the gold head of every gold (non-null) argument.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .head_assigner import detect_heads
from .types import ConstituentNode, DependencyTree, Frame, UniformArgument, ValidationError

NULL_ROLE = "NULL"
PARAMS_HEADER = "scorer-params v1"

# arrays that receive gradients from the joint loss
TRAINABLE = ("w_s", "w_dsa", "W1", "W2", "b", "width_table", "csa_table")


class FeatureDisabled(Exception):
    """The syntax input a feature needs is missing; callers substitute zeros."""


class NumericError(ValueError):
    pass


class ShapeError(ValueError):
    pass


@dataclass
class ScorerParams:
    w_s: np.ndarray
    w_dsa: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    b: np.ndarray
    width_table: np.ndarray
    csa_table: np.ndarray
    u_pred: np.ndarray
    u_arg: np.ndarray
    roles: Tuple[str, ...]
    lam: float = 0.5
    max_width: int = 8
    beam_ratio_pred: float = 1.0
    beam_ratio_arg: float = 1.0

    @property
    def dim(self) -> int:
        return self.w_s.shape[0]

    @property
    def arg_dim(self) -> int:
        return 3 * self.dim + self.width_table.shape[1] + self.csa_table.shape[1]

    @property
    def use_csa(self) -> bool:
        return self.csa_table.shape[1] > 0

    def validate(self):
        d, da, R = self.dim, self.arg_dim, len(self.roles)
        expect = {
            "w_s": (d,), "w_dsa": (1,), "W1": (R, d, da), "W2": (R, d + da), "b": (R,),
            "width_table": (self.max_width, self.width_table.shape[1]),
            "csa_table": (2, self.csa_table.shape[1]),
            "u_pred": (d + 1,), "u_arg": (da + 1,),
        }
        for name, shape in expect.items():
            got = getattr(self, name).shape
            if got != shape:
                raise ShapeError("%s has shape %s, expected %s" % (name, got, shape))
        if not self.roles or self.roles[0] != NULL_ROLE:
            raise ValueError("role vocabulary must start with %s" % NULL_ROLE)
        if len(set(self.roles)) != len(self.roles):
            raise ValueError("duplicate role labels")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1], got %r" % self.lam)
        if self.max_width < 1:
            raise ValueError("max_width must be >= 1")
        for name in ("beam_ratio_pred", "beam_ratio_arg"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError("%s must lie in (0, 1], got %r" % (name, v))
        return self

    @classmethod
    def init(cls, dim, roles, width_dim=4, csa_dim=2, max_width=8, lam=0.5,
             beam_ratio_pred=1.0, beam_ratio_arg=1.0, seed=0, scale=0.1):
        """Random parameters for the given role labels (``NULL`` is prepended)."""
        roles = tuple(r for r in roles if r != NULL_ROLE)
        roles = (NULL_ROLE,) + roles
        rng = np.random.default_rng(seed)
        R = len(roles)
        da = 3 * dim + width_dim + csa_dim

        def rnd(*shape):
            return rng.normal(0.0, scale, size=shape)

        return cls(w_s=rnd(dim), w_dsa=rnd(1), W1=rnd(R, dim, da), W2=rnd(R, dim + da),
                   b=rnd(R), width_table=rnd(max_width, width_dim), csa_table=rnd(2, csa_dim),
                   u_pred=rnd(dim + 1), u_arg=rnd(da + 1), roles=roles, lam=lam,
                   max_width=max_width, beam_ratio_pred=beam_ratio_pred,
                   beam_ratio_arg=beam_ratio_arg).validate()

    def copy(self) -> "ScorerParams":
        return replace(self, **{k: getattr(self, k).copy() for k in TRAINABLE + ("u_pred", "u_arg")})


# ---------------------------------------------------------------------------
# syntax indicator features

def dsa_indicators(span, dtree: Optional[DependencyTree]) -> np.ndarray:
    if dtree is None:
        raise FeatureDisabled("no dependency tree")
    start, end = span
    ind = np.zeros(end - start + 1)
    for h in detect_heads((start, end), dtree).heads:
        ind[h - start] = 1.0
    return ind


def constituent_spans(ctree: ConstituentNode) -> frozenset:
    return frozenset(node.span for node in ctree.iter_nodes())


def csa_indicator(span, ctree: Optional[ConstituentNode], boundaries=None) -> int:
    if boundaries is None:
        if ctree is None:
            raise FeatureDisabled("no constituent tree")
        boundaries = constituent_spans(ctree)
    return int(tuple(span) in boundaries)


# ---------------------------------------------------------------------------
# forward pieces

def softmax(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    e = np.exp(z - z.max())
    return e / e.sum()


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NumericError("non-finite input")


def span_attention(span_vecs: np.ndarray, dsa: np.ndarray, params: ScorerParams) -> np.ndarray:
    span_vecs = np.asarray(span_vecs, dtype=float)
    dsa = np.asarray(dsa, dtype=float)
    if span_vecs.ndim != 2 or span_vecs.shape[0] < 1:
        raise ShapeError("span needs at least one token vector")
    _check_finite(span_vecs, dsa)
    return softmax(span_vecs @ params.w_s + params.w_dsa[0] * dsa)


def head_from_attention(alpha: np.ndarray, span_start: int) -> int:
    # np.argmax returns the first maximum, i.e. ties go to the smallest index
    return span_start + int(np.argmax(alpha))


def span_representation(vecs: np.ndarray, span, alpha: np.ndarray, csa: int,
                        params: ScorerParams) -> np.ndarray:
    start, end = span
    width = end - start + 1
    if width > params.max_width:
        raise ValidationError("span width %d exceeds max_width %d" % (width, params.max_width))
    x_span = alpha @ vecs[start:end + 1]
    return np.concatenate([vecs[start], vecs[end], x_span, params.width_table[width - 1],
                           params.csa_table[int(csa)]])


def biaffine_score(h_p: np.ndarray, h_a: np.ndarray, params: ScorerParams) -> np.ndarray:
    h_p = np.asarray(h_p, dtype=float)
    h_a = np.asarray(h_a, dtype=float)
    R, dp, da = params.W1.shape
    if h_p.shape != (dp,) or h_a.shape != (da,):
        raise ShapeError("expected h_p of size %d and h_a of size %d, got %s and %s"
                         % (dp, da, h_p.shape, h_a.shape))
    return (np.einsum("i,rij,j->r", h_p, params.W1, h_a)
            + params.W2 @ np.concatenate([h_p, h_a]) + params.b)


def role_probabilities(phi: np.ndarray) -> np.ndarray:
    return softmax(phi)


# ---------------------------------------------------------------------------
# candidates

@dataclass(frozen=True, order=True)
class Candidate:
    predicate: int
    start: int
    end: int

    @property
    def span(self):
        return (self.start, self.end)


def enumerate_spans(n: int, max_width: int) -> List[Tuple[int, int]]:
    return [(s, e) for s in range(n) for e in range(s, min(n, s + max_width))]


def prune_candidates(pred_scores: Sequence[float], arg_scores: Dict[Tuple[int, int], float],
                     params: ScorerParams) -> List[Candidate]:
    """Keep the top predicates and the top spans (width <= max_width).

    The predicate beam is ``ceil(beam_ratio_pred * n)`` tokens; the span beam
    is ``ceil(beam_ratio_arg * m)`` where ``m`` is the number of spans of
    admissible width, so a ratio of 1.0 keeps everything.  Ties go to the
    earlier position, then to the shorter span.
    """
    pred_scores = np.asarray(pred_scores, dtype=float)
    n = len(pred_scores)
    _check_finite(pred_scores)
    spans = enumerate_spans(n, params.max_width)
    k_pred = min(n, math.ceil(params.beam_ratio_pred * n - 1e-12))
    k_arg = min(len(spans), math.ceil(params.beam_ratio_arg * len(spans) - 1e-12))
    preds = sorted(range(n), key=lambda i: (-pred_scores[i], i))[:k_pred]
    for sp in spans:
        if not np.isfinite(arg_scores[sp]):
            raise NumericError("non-finite span score")
    kept = sorted(spans, key=lambda sp: (-arg_scores[sp], sp[0], sp[1] - sp[0]))[:k_arg]
    return [Candidate(p, s, e) for p in sorted(preds) for (s, e) in sorted(kept)]


def unary_scores(vecs: np.ndarray, params: ScorerParams, dtree=None, ctree=None):
    """Linear unary scores used for pruning: one per token and one per span."""
    vecs = np.asarray(vecs, dtype=float)
    n, d = vecs.shape
    pred = vecs @ params.u_pred[:d] + params.u_pred[d]
    bounds = constituent_spans(ctree) if ctree is not None else None
    arg = {}
    for sp in enumerate_spans(n, params.max_width):
        x_arg, _ = _arg_repr(vecs, sp, params, dtree, bounds)
        arg[sp] = float(x_arg @ params.u_arg[:-1] + params.u_arg[-1])
    return pred, arg


# ---------------------------------------------------------------------------
# scoring a sentence

@dataclass
class ScoredCandidate:
    candidate: Candidate
    phi: np.ndarray
    probs: np.ndarray
    alpha: np.ndarray
    head: int
    # forward values kept for backprop
    dsa: np.ndarray = field(repr=False, default=None)
    csa: int = 0
    x_arg: np.ndarray = field(repr=False, default=None)


def _arg_repr(vecs, span, params, dtree, bounds):
    start, end = span
    try:
        dsa = dsa_indicators(span, dtree)
    except FeatureDisabled:
        dsa = np.zeros(end - start + 1)
    csa = csa_indicator(span, None, bounds) if bounds is not None else 0
    alpha = span_attention(vecs[start:end + 1], dsa, params)
    return span_representation(vecs, span, alpha, csa, params), (alpha, dsa, csa)


def score_candidates(vecs: np.ndarray, candidates: Iterable[Candidate], params: ScorerParams,
                     dtree: Optional[DependencyTree] = None,
                     ctree: Optional[ConstituentNode] = None) -> List[ScoredCandidate]:
    vecs = np.asarray(vecs, dtype=float)
    if vecs.ndim != 2 or vecs.shape[1] != params.dim:
        raise ShapeError("token vectors must be n x %d, got %s" % (params.dim, vecs.shape))
    _check_finite(vecs)
    candidates = list(candidates)
    if not candidates:
        return []
    bounds = constituent_spans(ctree) if ctree is not None else None
    cache = {}
    for c in candidates:
        if c.span not in cache:
            cache[c.span] = _arg_repr(vecs, c.span, params, dtree, bounds)
    # all candidates scored at once; row c of phi equals biaffine_score for candidate c
    XP = vecs[[c.predicate for c in candidates]]
    XA = np.stack([cache[c.span][0] for c in candidates])
    phi = (np.einsum("ci,rij,cj->cr", XP, params.W1, XA)
           + np.concatenate([XP, XA], axis=1) @ params.W2.T + params.b)
    probs = np.exp(phi - phi.max(axis=1, keepdims=True))
    probs /= probs.sum(axis=1, keepdims=True)
    out = []
    for k, c in enumerate(candidates):
        x_arg, (alpha, dsa, csa) = cache[c.span]
        out.append(ScoredCandidate(c, phi[k], probs[k], alpha,
                                   head_from_attention(alpha, c.start), dsa, csa, x_arg))
    return out


def gold_targets(candidates: Iterable[Candidate], frames: Iterable[Frame], roles: Sequence[str]):
    """Role index per candidate and gold head per gold candidate.

    Gold arguments whose span is not among the candidates cannot be scored
    and are ignored.
    """
    index = {r: i for i, r in enumerate(roles)}
    gold = {}
    for f in frames:
        for a in f.args:
            if a.role not in index:
                raise ValidationError("role %s not in the scorer vocabulary" % a.role)
            gold[(f.predicate, a.start, a.end)] = (index[a.role], a.head)
    role_ids, heads = [], []
    for c in candidates:
        r, h = gold.get((c.predicate, c.start, c.end), (0, None))
        role_ids.append(r)
        heads.append(h)
    return role_ids, heads


def loss_terms(scored: Sequence[ScoredCandidate], gold_roles: Sequence[int],
               gold_heads: Sequence[Optional[int]]) -> Tuple[float, float]:
    """(span term, dependency term) before weighting."""
    span_term = dep_term = 0.0
    for sc, r, h in zip(scored, gold_roles, gold_heads):
        span_term -= math.log(sc.probs[r])
        if r != 0:
            if h is None or not sc.candidate.start <= h <= sc.candidate.end:
                raise ValidationError("gold head %r outside span [%d,%d]"
                                      % (h, sc.candidate.start, sc.candidate.end))
            dep_term -= math.log(sc.alpha[h - sc.candidate.start])
    return span_term, dep_term


def joint_loss(scored, gold_roles, gold_heads, lam: float = 0.5) -> float:
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    span_term, dep_term = loss_terms(scored, gold_roles, gold_heads)
    return lam * span_term + (1.0 - lam) * dep_term


def loss_and_grad(vecs: np.ndarray, candidates: Sequence[Candidate], gold_roles, gold_heads,
                  params: ScorerParams, dtree=None, ctree=None, lam: Optional[float] = None):
    """Joint loss and its gradient with respect to every array in ``TRAINABLE``."""
    lam = params.lam if lam is None else lam
    vecs = np.asarray(vecs, dtype=float)
    scored = score_candidates(vecs, candidates, params, dtree, ctree)
    J = joint_loss(scored, gold_roles, gold_heads, lam)
    d = params.dim
    grads = {k: np.zeros_like(getattr(params, k)) for k in TRAINABLE}
    W1, W2 = params.W1, params.W2
    wd = params.width_table.shape[1]
    for sc, r, h in zip(scored, gold_roles, gold_heads):
        c = sc.candidate
        x_p = vecs[c.predicate]
        x_arg = sc.x_arg
        dphi = lam * sc.probs.copy()
        dphi[r] -= lam
        grads["W1"] += np.einsum("r,i,j->rij", dphi, x_p, x_arg)
        grads["W2"] += np.outer(dphi, np.concatenate([x_p, x_arg]))
        grads["b"] += dphi
        dx_arg = np.einsum("r,i,rij->j", dphi, x_p, W1) + dphi @ W2[:, d:]
        width = c.end - c.start + 1
        grads["width_table"][width - 1] += dx_arg[3 * d:3 * d + wd]
        grads["csa_table"][sc.csa] += dx_arg[3 * d + wd:]
        span_vecs = vecs[c.start:c.end + 1]
        alpha = sc.alpha
        dalpha = span_vecs @ dx_arg[2 * d:3 * d]
        dlogits = alpha * (dalpha - alpha @ dalpha)
        if r != 0:
            dlogits = dlogits + (1.0 - lam) * alpha
            dlogits[h - c.start] -= 1.0 - lam
        grads["w_s"] += dlogits @ span_vecs
        grads["w_dsa"][0] += dlogits @ sc.dsa
    return J, grads


# ---------------------------------------------------------------------------
# decoding

def decode_frames(scored: Sequence[ScoredCandidate], params: ScorerParams) -> List[Frame]:
    """Argmax role per candidate, then greedy overlap resolution per predicate."""
    by_pred: Dict[int, list] = {}
    for sc in scored:
        r = int(np.argmax(sc.probs))
        if r == 0:
            continue
        c = sc.candidate
        by_pred.setdefault(c.predicate, []).append(
            (float(sc.probs[r]), UniformArgument(c.start, c.end, sc.head, params.roles[r])))
    frames = []
    for p in sorted(by_pred):
        items = sorted(by_pred[p], key=lambda it: (-it[0], it[1].start, it[1].end))
        kept: List[UniformArgument] = []
        for _, a in items:
            if all(a.end < k.start or a.start > k.end for k in kept):
                kept.append(a)
        frames.append(Frame(p, None, tuple(kept)))
    return frames


# ---------------------------------------------------------------------------
# text formats

def _fmt(x) -> str:
    return repr(float(x))


def save_params(params: ScorerParams) -> str:
    lines = [PARAMS_HEADER,
             "roles " + " ".join(params.roles),
             "lam " + _fmt(params.lam),
             "max_width %d" % params.max_width,
             "beam_ratio_pred " + _fmt(params.beam_ratio_pred),
             "beam_ratio_arg " + _fmt(params.beam_ratio_arg)]
    for name in TRAINABLE + ("u_pred", "u_arg"):
        arr = getattr(params, name)
        lines.append("@%s %s" % (name, " ".join(str(s) for s in arr.shape)))
        flat = arr.reshape(arr.shape[0], -1) if arr.ndim > 1 else arr.reshape(1, -1)
        if arr.size:
            for row in flat:
                lines.append(" ".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def load_params(text: str) -> ScorerParams:
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines or lines[0].strip() != PARAMS_HEADER:
        raise ValueError("not a scorer parameter file (expected header %r)" % PARAMS_HEADER)
    conf = {}
    arrays = {}
    i = 1
    while i < len(lines):
        line = lines[i]
        if line.startswith("@"):
            parts = line[1:].split()
            name, shape = parts[0], tuple(int(s) for s in parts[1:])
            size = int(np.prod(shape)) if shape else 1
            values = []
            i += 1
            while len(values) < size:
                if i >= len(lines) or lines[i].startswith("@"):
                    raise ValueError("array %s: expected %d values, found %d" % (name, size, len(values)))
                values.extend(float(v) for v in lines[i].split())
                i += 1
            if len(values) != size:
                raise ValueError("array %s: expected %d values, found %d" % (name, size, len(values)))
            arrays[name] = np.array(values, dtype=float).reshape(shape)
        else:
            key, _, value = line.partition(" ")
            conf[key] = value
            i += 1
    missing = [k for k in TRAINABLE + ("u_pred", "u_arg") if k not in arrays]
    if missing or "roles" not in conf:
        raise ValueError("parameter file lacks %s" % (missing or ["roles"]))
    return ScorerParams(roles=tuple(conf["roles"].split()), lam=float(conf.get("lam", 0.5)),
                        max_width=int(conf.get("max_width", 8)),
                        beam_ratio_pred=float(conf.get("beam_ratio_pred", 1.0)),
                        beam_ratio_arg=float(conf.get("beam_ratio_arg", 1.0)),
                        **arrays).validate()


def read_vectors(text: str) -> List[np.ndarray]:
    """Blocks of ``n d`` followed by ``n`` lines of ``d`` numbers."""
    out = []
    lines = [l for l in text.splitlines() if l.strip()]
    i = 0
    while i < len(lines):
        try:
            n, d = (int(v) for v in lines[i].split())
        except ValueError:
            raise ValueError("vector block header must be 'n d', got %r" % lines[i]) from None
        rows = [[float(v) for v in l.split()] for l in lines[i + 1:i + 1 + n]]
        if len(rows) != n or any(len(r) != d for r in rows):
            raise ValueError("vector block at line %d is not %d x %d" % (i + 1, n, d))
        arr = np.array(rows, dtype=float).reshape(n, d)
        _check_finite(arr)
        out.append(arr)
        i += 1 + n
    return out


def write_vectors(blocks: Iterable[np.ndarray]) -> str:
    parts = []
    for arr in blocks:
        lines = ["%d %d" % arr.shape] + [" ".join(_fmt(v) for v in row) for row in arr]
        parts.append("\n".join(lines) + "\n")
    return "\n".join(parts)
