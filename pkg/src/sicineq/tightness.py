"""Facet test for noncontextuality inequalities.

An inequality is tight when the vertices it saturates span an affine space
of dimension p - 1, p being the affine dimension of the whole polytope.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import IncrementalRank
from .hv import DEFAULT_GUARD, assignment_values, exact_scores, polytope_dimension, vertex_matrix


class UncertifiedInequalityError(ValueError):
    """The bound is not attained by any assignment."""


@dataclass(frozen=True)
class TightnessReport:
    polytope_dim: int
    saturating_count: int
    saturating_affine_rank: int
    tight: bool


def _saturating(ineq, contexts, n, guard):
    scores, den = exact_scores(ineq.lam, contexts, n, guard)
    target = Fraction(ineq.eta) * den
    if target.denominator != 1:
        return np.array([], dtype=np.int64), int(np.max(scores)) > target
    return np.flatnonzero(scores == int(target)), int(np.max(scores)) > target


def saturating_vertices(ineq, contexts, n: int, guard: int = DEFAULT_GUARD, strict: bool = True):
    """Assignments with ``lam . v(a) == eta`` exactly."""
    contexts = tuple(tuple(c) for c in contexts)
    idx, violated = _saturating(ineq, contexts, n, guard)
    if violated:
        raise UncertifiedInequalityError("some assignment exceeds the stated bound")
    if strict and len(idx) == 0:
        raise UncertifiedInequalityError("no assignment attains the stated bound")
    return [assignment_values(int(i), n) for i in idx]


def _affine_rank_of_rows(rows: np.ndarray, stop_at: int) -> int:
    if len(rows) == 0:
        return -1
    # probe a spread-out subset first so the rank climbs quickly
    order = np.random.default_rng(0).permutation(len(rows))
    base = rows[order[0]].astype(np.int64)
    tracker = IncrementalRank(rows.shape[1])
    for i in order[1:]:
        tracker.add((rows[i].astype(np.int64) - base).tolist())
        if tracker.rank >= stop_at:
            break
    return tracker.rank


def is_tight(ineq, contexts, n: int, guard: int = DEFAULT_GUARD) -> TightnessReport:
    contexts = tuple(tuple(c) for c in contexts)
    p = polytope_dimension(contexts, n, guard)
    idx, violated = _saturating(ineq, contexts, n, guard)
    if violated:
        raise UncertifiedInequalityError("some assignment exceeds the stated bound")
    rows = vertex_matrix(contexts, n, guard)[idx]
    # rank p means every vertex saturates; no need to look further
    rank = _affine_rank_of_rows(rows, p)
    return TightnessReport(p, int(len(idx)), rank, rank == p - 1)
