"""Optimal systems of p-families of Lie subalgebras.

``source`` is either a catalog label ("A_{3,8}", "nilpotent4", ...) or the
text of an algebra document.
"""
import json

from ._core import (
    AlgebraError,
    ExponentialUnavailable,
    ParseError,
    UnknownLabel,
    canonical_label,
    catalog_document,
    dot,
    labels,
    normalize_document,
    normalize_label,
)
from . import _core

__all__ = [
    "AlgebraError", "ExponentialUnavailable", "ParseError", "UnknownLabel",
    "canonical_label", "catalog_document", "dot", "labels", "normalize_document",
    "normalize_label", "optimal_system", "representatives",
]


def optimal_system(source, dims=(), word_length=2, seed=0x5EED, jobs=1,
                   components="strong", indegree="reach", oracle_trials=32, values=None):
    """Full report as a dict (schema subopt-report/1)."""
    vals = {k: str(v) for k, v in (values or {}).items()}
    text = _core.report_json(source, list(dims), word_length, seed, jobs,
                             components, indegree, oracle_trials, vals)
    return json.loads(text)


def representatives(source, **kw):
    """dimension -> list of code tuples of the selected representatives"""
    rep = optimal_system(source, **kw)
    return {d["d"]: [tuple(r["code_tuple"]) for r in d["representatives"]] for d in rep["dimensions"]}
