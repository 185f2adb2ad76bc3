"""Linear text segmentation: coherence scorers, boundary search, and evaluation.

Typical use::

    from vecseg import cvs_scorer, split
    result = split(cvs_scorer(V), K=10, method="dp")
    result.segmentation.boundaries
"""

__version__ = "0.1.0"

from .metrics import EvalReport, default_k, evaluate, pk, window_diff
from .scoring import (
    Scorer, c99_scorer, content_vector, cosine_matrix, cvs_scorer, euclidean_scorer, make_scorer,
    rank_transform,
)
from .splitters import Segmentation, SplitResult, dp_split, greedy_split, refine, split

__all__ = [
    "EvalReport", "Scorer", "Segmentation", "SplitResult", "c99_scorer", "content_vector",
    "cosine_matrix", "cvs_scorer", "default_k", "dp_split", "euclidean_scorer", "evaluate",
    "greedy_split", "make_scorer", "pk", "rank_transform", "refine", "split", "window_diff",
]
