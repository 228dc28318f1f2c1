"""Optimal inequalities with prescribed vanishing coefficients.

Forcing ``lam_c = 0`` adds one equality row; the optimum of the constrained
program either equals the unconstrained optimum (the context can be dropped)
or exceeds it, in which case its exact dual certificate proves that no
optimal inequality omits ``c``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .hv import DEFAULT_GUARD
from .lp import (CertificationError, DualCertificate, Inequality, _float_reduction, _reduction,
                 _Restricted, _seed_assignments, constraint_generation, rationalize_and_certify,
                 solve_optimal)
from .scenario import require_valid_contexts
from .tightness import is_tight

log = logging.getLogger(__name__)


@dataclass
class ZeroResult:
    feasible: bool
    inequality: Inequality | None = None
    constrained_optimum: Fraction | None = None  # None when T(lam) = 1 itself is unsolvable
    certificate: DualCertificate | None = None


def _positions(contexts, zero_set):
    index = {c: j for j, c in enumerate(contexts)}
    out = []
    for c in zero_set:
        c = tuple(sorted(c))
        if c not in index:
            raise KeyError(f"context {c} is not in the admissible set")
        out.append(index[c])
    return tuple(sorted(set(out)))


def solve_with_zeros(scenario, contexts, eta_star, zero_set, guard: int = DEFAULT_GUARD,
                     check_optimal: bool = False) -> ZeroResult:
    """Optimal inequality at bound ``eta_star`` with ``lam_c = 0`` for ``c`` in ``zero_set``."""
    contexts = require_valid_contexts(scenario, contexts)
    eta_star = Fraction(eta_star)
    if check_optimal:
        free = solve_optimal(scenario, contexts, guard)
        if free.eta != eta_star:
            raise ValueError(f"eta_star {eta_star} is not the optimum {free.eta}")
    zeros = _positions(contexts, zero_set)
    report = solve_optimal(scenario, contexts, guard, zeros=zeros)
    if report.status == "infeasible":
        return ZeroResult(False)
    eta = report.inequality.eta
    if eta < eta_star:
        raise ValueError(f"a zero-constrained inequality beats eta_star: {eta} < {eta_star}")
    return ZeroResult(eta == eta_star, report.inequality if eta == eta_star else None, eta,
                      report.certificate)


def omission_sweep(scenario, contexts, eta_star, guard: int = DEFAULT_GUARD) -> dict:
    """Context -> whether some optimal inequality omits it."""
    contexts = require_valid_contexts(scenario, contexts)
    return {c: solve_with_zeros(scenario, contexts, eta_star, [c], guard).feasible for c in contexts}


def tight_representative(scenario, contexts, eta_star, zero_set, guard: int = DEFAULT_GUARD,
                         trials: int = 64, seed: int = 0, use_solver_optimum: bool = True) -> Inequality | None:
    """A tight optimal inequality with the requested zeros, if the probe finds one.

    The solver's own optimum is tried first; then vertices of the optimal
    face are reached by optimizing random objectives at fixed bound.
    """
    contexts = require_valid_contexts(scenario, contexts)
    eta_star = Fraction(eta_star)
    n = scenario.n
    first = solve_with_zeros(scenario, contexts, eta_star, zero_set, guard)
    if not first.feasible:
        return None
    if use_solver_optimum and is_tight(first.inequality, contexts, n, guard).tight:
        return first.inequality
    zeros = _positions(contexts, zero_set)
    _, reduced = _reduction(scenario, contexts, zeros)
    lam0_f, basis_f = _float_reduction(reduced)
    f = basis_f.shape[1]
    if f == 0:
        return None
    prob = _Restricted(lam0_f, basis_f, contexts, n, guard)
    prob.add(_seed_assignments(n, contexts))
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        objective = rng.standard_normal(f)
        status, t, _, _ = constraint_generation(prob, objective, fixed_eta=float(eta_star))
        if status != "optimal":
            continue
        try:
            cand = rationalize_and_certify(prob.lam(t), scenario, contexts, guard=guard,
                                           fixed_eta=eta_star, zeros=zeros)
        except CertificationError as exc:
            log.debug("trial %d: %s", trial, exc)
            continue
        if is_tight(cand, contexts, n, guard).tight:
            return cand
    return None


def permute_context(context, perm):
    return tuple(sorted(perm[k] for k in context))


def symmetry_closure(contexts, perms) -> set:
    """Smallest superset of ``contexts`` closed under the observable permutations."""
    closed = set(tuple(c) for c in contexts)
    frontier = list(closed)
    while frontier:
        c = frontier.pop()
        for p in perms:
            image = permute_context(c, p)
            if image not in closed:
                closed.add(image)
                frontier.append(image)
    return closed


def orbit(context, perms) -> set:
    return symmetry_closure([context], perms)
