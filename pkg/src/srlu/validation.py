"""Input checks shared by the estimator wrappers."""

import numpy as np

from .types import AnnotatedSentence, ValidationError


def check_token_vectors(vecs, dim=None):
    """Return ``vecs`` as a finite float array of shape (n, d)."""
    arr = np.asarray(vecs, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValidationError("token vectors must be a non-empty 2-d array, got shape %s"
                              % (arr.shape,))
    if dim is not None and arr.shape[1] != dim:
        raise ValidationError("token vectors have %d features, expected %d" % (arr.shape[1], dim))
    if not np.all(np.isfinite(arr)):
        raise ValidationError("token vectors contain NaN or infinity")
    return arr


def check_documents(docs, need_dtree=False, need_ctree=False):
    docs = list(docs)
    for d in docs:
        if not isinstance(d, AnnotatedSentence):
            raise TypeError("expected AnnotatedSentence, got %s" % type(d).__name__)
        if need_dtree and d.dtree is None:
            raise ValidationError("sentence %s has no dependency tree" % d.id)
        if need_ctree and d.ctree is None:
            raise ValidationError("sentence %s has no constituent tree" % d.id)
        d.validate()
    return docs


def check_fitted(estimator, attribute):
    if getattr(estimator, attribute, None) is None:
        from sklearn.exceptions import NotFittedError
        raise NotFittedError("%s is not fitted yet; call fit first" % type(estimator).__name__)
