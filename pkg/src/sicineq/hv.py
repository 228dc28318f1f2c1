"""Deterministic noncontextual assignments and the polytope they span.

Assignment ``i`` (an integer in ``range(2**n)``) sets observable ``k`` to -1
exactly when bit ``k`` of ``i`` is set.  Every correlation coordinate is then
a parity: ``v_c(i) = (-1) ** popcount(i & mask(c))``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Sequence

import numpy as np

from .exact import IncrementalRank

DEFAULT_GUARD = 26
_CHUNK = 1 << 15


class EnumerationGuardError(RuntimeError):
    """Raised instead of starting a 2**n sweep beyond the configured guard."""


def check_guard(n: int, guard: int = DEFAULT_GUARD) -> None:
    if n > guard:
        raise EnumerationGuardError(
            f"refusing to enumerate 2**{n} assignments (guard is n <= {guard}); raise the guard explicitly")


def context_masks(contexts) -> np.ndarray:
    return np.array([sum(1 << k for k in c) for c in contexts], dtype=np.int64)


def assignment_values(index: int, n: int) -> tuple:
    return tuple(-1 if (index >> k) & 1 else 1 for k in range(n))


def assignment_index(values: Sequence[int]) -> int:
    return sum(1 << k for k, a in enumerate(values) if a == -1)


def vertex(assignment: Sequence[int], contexts) -> tuple:
    """Correlation vector of a fixed assignment: product of assigned values per context."""
    out = []
    for c in contexts:
        p = 1
        for k in c:
            p *= assignment[k]
        out.append(p)
    return tuple(out)


def vertex_rows(indices: np.ndarray, contexts) -> np.ndarray:
    """Vertices for a batch of assignment indices, as an int8 matrix."""
    masks = context_masks(contexts)
    par = np.bitwise_count(np.asarray(indices, dtype=np.int64)[:, None] & masks[None, :]) & 1
    return (1 - 2 * par).astype(np.int8)


def vertex_matrix(contexts, n: int, guard: int = DEFAULT_GUARD) -> np.ndarray:
    """All 2**n vertices as rows (int8), in assignment-index order; read-only."""
    check_guard(n, guard)
    return _vertex_matrix(tuple(tuple(c) for c in contexts), n)


@lru_cache(maxsize=4)
def _vertex_matrix(contexts, n: int) -> np.ndarray:
    out = np.empty((1 << n, len(contexts)), dtype=np.int8)
    for start in range(0, 1 << n, _CHUNK):
        stop = min(start + _CHUNK, 1 << n)
        out[start:stop] = vertex_rows(np.arange(start, stop), contexts)
    out.setflags(write=False)
    return out


def integer_coefficients(lam: Sequence) -> tuple[list[int], int]:
    """Scale rational coefficients to integers; returns (ints, denominator)."""
    fr = [Fraction(x) for x in lam]
    den = lcm(*(x.denominator for x in fr)) if fr else 1
    return [int(x * den) for x in fr], den


def exact_scores(lam: Sequence, contexts, n: int, guard: int = DEFAULT_GUARD):
    """Integer scores ``den * lam . v(a)`` for every assignment, plus ``den``."""
    ints, den = integer_coefficients(lam)
    vm = vertex_matrix(tuple(contexts), n, guard)
    bound = sum(abs(x) for x in ints)
    if bound < 2 ** 62:
        scores = np.zeros(vm.shape[0], dtype=np.int64)
        w = np.array(ints, dtype=np.int64)
        for start in range(0, vm.shape[0], _CHUNK):
            scores[start:start + _CHUNK] = vm[start:start + _CHUNK].astype(np.int64) @ w
    else:
        w = np.array(ints, dtype=object)
        scores = np.array([int(x) for x in vm.astype(object) @ w], dtype=object)
    return scores, den


def float_scores(lam: Sequence[float], contexts, n: int, guard: int = DEFAULT_GUARD) -> np.ndarray:
    vm = vertex_matrix(tuple(contexts), n, guard)
    w = np.asarray(lam, dtype=float)
    out = np.empty(vm.shape[0])
    for start in range(0, vm.shape[0], _CHUNK):
        out[start:start + _CHUNK] = vm[start:start + _CHUNK].astype(float) @ w
    return out


def noncontextual_max(lam: Sequence, contexts, n: int, guard: int = DEFAULT_GUARD):
    """Exact maximum of ``lam . v(a)`` over all assignments.

    Returns ``(value, witness)`` with ``witness`` a tuple of +-1 values.
    """
    contexts = tuple(tuple(c) for c in contexts)
    if len(lam) != len(contexts):
        raise ValueError("coefficient count does not match context count")
    check_guard(n, guard)
    scores, den = exact_scores(lam, contexts, n, guard)
    best = int(np.argmax(scores))
    return Fraction(int(scores[best]), den), assignment_values(best, n)


def gray_code_scan(lam: Sequence, contexts, n: int, guard: int = DEFAULT_GUARD):
    """Reference maximum via Gray-code enumeration with O(degree) updates.

    Independent of :func:`vertex_matrix`; used to cross-check it.
    """
    check_guard(n, guard)
    lam = [Fraction(x) for x in lam]
    touching = [[j for j, c in enumerate(contexts) if k in c] for k in range(n)]
    v = [1] * len(contexts)
    a = [1] * n
    value = sum(lam)
    best, witness = value, tuple(a)
    for step in range(1, 1 << n):
        k = (step & -step).bit_length() - 1  # bit flipped between gray(step-1) and gray(step)
        a[k] = -a[k]
        for j in touching[k]:
            value -= 2 * lam[j] * v[j]
            v[j] = -v[j]
        if value > best:
            best, witness = value, tuple(a)
    return best, witness


def _rank_probe_order(contexts, n: int):
    """Assignments likely to be affinely independent first, then all of them."""
    yield 0
    for c in contexts:
        yield sum(1 << k for k in c)
    rng = np.random.default_rng(0)
    for i in rng.integers(0, 1 << n, size=4 * len(contexts) + 16):
        yield int(i)
    step = 0
    while step < (1 << n):
        yield step ^ (step >> 1)
        step += 1


def polytope_dimension(contexts, n: int, guard: int = DEFAULT_GUARD) -> int:
    """Affine dimension of the noncontextuality polytope, by exact rank."""
    contexts = tuple(tuple(c) for c in contexts)
    check_guard(n, guard)
    return _polytope_dimension(contexts, n)


@lru_cache(maxsize=32)
def _polytope_dimension(contexts, n: int) -> int:
    m = len(contexts)
    base = np.array(vertex(assignment_values(0, n), contexts), dtype=np.int64)
    tracker = IncrementalRank(m)
    seen = set()
    for idx in _rank_probe_order(contexts, n):
        if idx in seen:
            continue
        seen.add(idx)
        row = vertex_rows(np.array([idx]), contexts)[0].astype(np.int64) - base
        tracker.add(row.tolist())
        if tracker.rank == m or len(seen) == 1 << n:
            break
    return tracker.rank


def is_noncontextual_point(x: Sequence, contexts, n: int, guard: int = DEFAULT_GUARD) -> bool:
    """Membership of ``x`` in the convex hull of all assignment vertices.

    A numeric feasibility program over vertex weights proposes the answer;
    a "yes" is confirmed with exact convex weights, a "no" with an exact
    separating hyperplane ``lam . x > max_a lam . v(a)``.
    """
    from scipy.optimize import linprog

    from .exact import nearest_affine_solution

    contexts = tuple(tuple(c) for c in contexts)
    x = [Fraction(v) for v in x]
    if len(x) != len(contexts):
        raise ValueError("point length does not match context count")
    vm = vertex_matrix(contexts, n, guard).astype(float)
    m = len(contexts)
    # separation: maximize lam.x - eta subject to lam.v(a) <= eta, |lam| <= 1
    cost = np.concatenate([-np.array([float(v) for v in x]), [1.0]])
    a_ub = np.hstack([vm, -np.ones((vm.shape[0], 1))])
    res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(vm.shape[0]),
                  bounds=[(-1, 1)] * m + [(None, None)], method="highs")
    gap = -res.fun
    if gap > 1e-9:
        for den in (10 ** 3, 10 ** 6, 10 ** 9):
            lam = [Fraction(v).limit_denominator(den) for v in res.x[:m]]
            best, _ = noncontextual_max(lam, contexts, n, guard)
            if sum(l * xv for l, xv in zip(lam, x)) > best:
                return False
    # weights: sum_a w_a v(a) = x, sum w = 1, w >= 0
    a_eq = np.vstack([vm.T, np.ones((1, vm.shape[0]))])
    b_eq = np.array([float(v) for v in x] + [1.0])
    res = linprog(np.zeros(vm.shape[0]), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs-ds")
    if res.status != 0:
        return False
    support = [int(i) for i in np.flatnonzero(res.x > 1e-12)]
    rows = [[Fraction(int(vm[i, j])) for i in support] for j in range(m)]
    rows.append([Fraction(1)] * len(support))
    w = nearest_affine_solution(rows, x + [Fraction(1)], res.x[support], 10 ** 9)
    if w is not None and all(v >= 0 for v in w):
        return True
    raise ArithmeticError("membership could not be certified exactly in either direction")
