"""Optimal state-independent noncontextuality inequalities.

Minimize eta over coefficient vectors lam subject to

    sum_c lam_c prod_{k in c} A_k = 1          (state independence)
    lam . v(a) <= eta  for every assignment a  (noncontextual bound)

The equality constraints are eliminated exactly (lam = lam0 + N t), the
remaining program in (t, eta) is solved numerically with lazily generated
vertex constraints, and the numeric optimum is turned into an exact rational
inequality together with an exact dual certificate.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import qr
from scipy.optimize import linprog

from . import simplex
from .exact import (ComplexRational, IncrementalRank, identity, mat_scale, mat_sub,
                    nearest_affine_solution, solve_affine)
from .hv import (DEFAULT_GUARD, assignment_values, check_guard, exact_scores, float_scores,
                 noncontextual_max, vertex, vertex_matrix)
from .scenario import Scenario, context_operator, require_valid_contexts

log = logging.getLogger(__name__)

DENOMINATOR_START = 10 ** 4
DENOMINATOR_LIMIT = 10 ** 9


class CertificationError(ArithmeticError):
    """No exact rational point near the numeric solution passed the checks."""


@dataclass(frozen=True)
class Inequality:
    lam: tuple  # Fractions, one per context in canonical order
    eta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(Fraction(x) for x in self.lam))
        object.__setattr__(self, "eta", Fraction(self.eta))

    def scaled(self, factor) -> "Inequality":
        factor = Fraction(factor)
        return Inequality(tuple(factor * x for x in self.lam), factor * self.eta)


@dataclass(frozen=True)
class EqualitySystem:
    """Real-linear form of ``T(lam) = 1``: ``rows @ lam = rhs``.

    Rows: d diagonal real parts, then for i < j the real and imaginary part
    of entry (i, j).
    """
    rows: tuple
    rhs: tuple
    row_labels: tuple


@dataclass
class DualCertificate:
    """Convex weights on vertices and multipliers ``y`` on equality rows.

    Valid when the weights are nonnegative, sum to one, their weighted vertex
    equals ``rows^T y``, and ``rhs . y`` equals the claimed optimum; then
    every lam with ``T(lam) = 1`` has noncontextual bound at least that value.
    """
    weights: dict  # assignment tuple -> Fraction
    y: tuple
    objective: Fraction


@dataclass
class SolveReport:
    status: str  # optimal | infeasible | no_sic
    inequality: Inequality | None = None
    violation: Fraction | None = None
    iterations: int = 0
    constraints_generated: int = 0
    certificate: DualCertificate | None = None
    method: str = "numeric"
    system: EqualitySystem | None = None

    @property
    def eta(self):
        return self.inequality.eta if self.inequality else None


# --- operator and equality system --------------------------------------------

def inequality_operator(scenario: Scenario, contexts, lam: Sequence):
    """T(lam) as an exact matrix."""
    d = scenario.dimension
    total = tuple(tuple(ComplexRational() for _ in range(d)) for _ in range(d))
    for c, l in zip(contexts, lam):
        if l:
            op = mat_scale(context_operator(scenario, c), Fraction(l))
            total = tuple(tuple(x + y for x, y in zip(r1, r2)) for r1, r2 in zip(total, op))
    return total


def state_independence_residual(scenario: Scenario, contexts, lam: Sequence):
    return mat_sub(inequality_operator(scenario, contexts, lam), identity(scenario.dimension))


def build_equality_system(scenario: Scenario, contexts) -> EqualitySystem:
    d = scenario.dimension
    ops = [context_operator(scenario, c) for c in contexts]
    rows, rhs, labels = [], [], []
    for i in range(d):
        rows.append(tuple(op[i][i].re for op in ops))
        rhs.append(Fraction(1))
        labels.append(f"re[{i},{i}]")
    for i in range(d):
        for j in range(i + 1, d):
            rows.append(tuple(op[i][j].re for op in ops))
            rhs.append(Fraction(0))
            labels.append(f"re[{i},{j}]")
            rows.append(tuple(op[i][j].im for op in ops))
            rhs.append(Fraction(0))
            labels.append(f"im[{i},{j}]")
    return EqualitySystem(tuple(rows), tuple(rhs), tuple(labels))


def with_zero_rows(system: EqualitySystem, zeros: Sequence[int]) -> EqualitySystem:
    """Append ``lam_j = 0`` for each coordinate ``j`` in ``zeros``."""
    m = len(system.rows[0]) if system.rows else 0
    rows = list(system.rows) + [tuple(Fraction(int(k == j)) for k in range(m)) for j in zeros]
    rhs = list(system.rhs) + [Fraction(0)] * len(zeros)
    labels = list(system.row_labels) + [f"zero[{j}]" for j in zeros]
    return EqualitySystem(tuple(rows), tuple(rhs), tuple(labels))


@lru_cache(maxsize=16)
def _base_system(scenario: Scenario, contexts) -> EqualitySystem:
    return build_equality_system(scenario, contexts)


@lru_cache(maxsize=64)
def _reduction(scenario: Scenario, contexts, zeros: tuple = ()):
    system = with_zero_rows(_base_system(scenario, contexts), zeros)
    return system, solve_affine(system.rows, system.rhs)


# --- separation ---------------------------------------------------------------

def separation_oracle(lam: Sequence, eta, contexts, n: int, guard: int = DEFAULT_GUARD):
    """Most violated assignment of ``lam . v(a) <= eta``, or None."""
    best, witness = noncontextual_max(lam, contexts, n, guard)
    return witness if best > Fraction(eta) else None


def saturating_indices(lam: Sequence, eta, contexts, n: int, guard: int = DEFAULT_GUARD) -> np.ndarray:
    scores, den = exact_scores(lam, contexts, n, guard)
    target = Fraction(eta) * den
    if target.denominator != 1:
        return np.array([], dtype=np.int64)
    return np.flatnonzero(scores == int(target))


# --- certificates -------------------------------------------------------------

def verify_dual_certificate(cert: DualCertificate, system: EqualitySystem, contexts) -> bool:
    """Exact re-check of a dual certificate, independent of how it was found."""
    if not cert.weights or any(w < 0 for w in cert.weights.values()):
        return False
    if sum(cert.weights.values()) != 1:
        return False
    m = len(contexts)
    point = [Fraction(0)] * m
    for a, w in cert.weights.items():
        for j, v in enumerate(vertex(a, contexts)):
            point[j] += w * v
    for j in range(m):
        if sum((row[j] * y for row, y in zip(system.rows, cert.y)), Fraction(0)) != point[j]:
            return False
    return sum((r * y for r, y in zip(system.rhs, cert.y)), Fraction(0)) == cert.objective


def _dual_columns(indices, contexts, n, basis):
    """Reduced dual columns [N^T v(a); 1] keyed by assignment index."""
    cols = {}
    for i in indices:
        v = vertex(assignment_values(int(i), n), contexts)
        cols[int(i)] = [sum((b[j] * v[j] for j in range(len(v)) if b[j]), Fraction(0)) for b in basis] + [Fraction(1)]
    return cols


def find_dual_certificate(ineq: Inequality, system: EqualitySystem, basis, contexts, n: int,
                          guard: int = DEFAULT_GUARD) -> DualCertificate | None:
    """Exact dual certificate supported on the saturating vertices of ``ineq``."""
    sat = saturating_indices(ineq.lam, ineq.eta, contexts, n, guard)
    if len(sat) == 0:
        return None
    f = len(basis)
    rhs = [Fraction(0)] * f + [Fraction(1)]
    weights = None
    if f == 0:
        weights = {int(sat[0]): Fraction(1)}
    else:
        vm = vertex_matrix(tuple(contexts), n, guard)[sat].astype(float)
        nf = np.array([[float(x) for x in b] for b in basis])
        a_eq = np.vstack([nf @ vm.T, np.ones((1, len(sat)))])
        res = linprog(np.zeros(len(sat)), A_eq=a_eq, b_eq=[float(x) for x in rhs], bounds=(0, None),
                      method="highs-ds")
        if res.status == 0:
            support = np.flatnonzero(res.x > 1e-11)
            cols = _dual_columns(sat[support], contexts, n, basis)
            keys = list(cols)
            rows = [[cols[k][r] for k in keys] for r in range(f + 1)]
            w = nearest_affine_solution(rows, rhs, res.x[support], DENOMINATOR_LIMIT)
            if w is not None and all(x >= 0 for x in w):
                weights = {k: x for k, x in zip(keys, w) if x}
        if weights is None:
            weights = _exact_dual_weights(sat, contexts, n, basis, rhs)
    if weights is None:
        return None
    point = [Fraction(0)] * len(contexts)
    named = {}
    for i, w in weights.items():
        a = assignment_values(i, n)
        named[a] = w
        for j, v in enumerate(vertex(a, contexts)):
            point[j] += w * v
    sol = solve_affine([list(col) for col in zip(*system.rows)], point)
    if sol is None:
        return None
    y = tuple(sol[0])
    objective = sum((r * yy for r, yy in zip(system.rhs, y)), Fraction(0))
    return DualCertificate(named, y, objective)


def _exact_dual_weights(sat, contexts, n, basis, rhs):
    """Exact phase-one simplex over saturating columns (fallback path)."""
    cols = _dual_columns(sat, contexts, n, basis)
    res = simplex.solve(rhs, cols, {k: 0 for k in cols})
    if res.status != "optimal":
        return None
    return {k: v for k, v in res.x.items() if v}


# --- exact recovery -----------------------------------------------------------

def _exact_inequality(lam: Sequence) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in lam)


def rationalize_and_certify(lam_approx: Sequence, scenario: Scenario, contexts,
                            eta_approx=None, guard: int = DEFAULT_GUARD,
                            tolerance: float = 1e-7, max_denominator: int = DENOMINATOR_START,
                            fixed_eta=None, zeros: tuple = ()) -> Inequality:
    """Exact inequality near a numeric solution.

    Vertex constraints that are numerically tight, the equality system, and
    any imposed zero coefficients are solved exactly; remaining freedom is
    rounded by continued fractions.  The bound is recomputed exactly, so the
    result always satisfies ``T(lam) = 1`` and ``eta = max_a lam . v(a)``.
    With ``fixed_eta`` the result must also attain exactly that bound.
    """
    contexts = tuple(tuple(c) for c in contexts)
    n = scenario.n
    system, reduced = _reduction(scenario, contexts, tuple(zeros))
    if reduced is None:
        raise CertificationError("T(lam) = 1 has no solution for these contexts")
    if _exact_inequality(lam_approx):
        lam = tuple(Fraction(x) for x in lam_approx)
        if all(sum((r * l for r, l in zip(row, lam)), Fraction(0)) == b
               for row, b in zip(system.rows, system.rhs)):
            eta, _ = noncontextual_max(lam, contexts, n, guard)
            if fixed_eta is None or eta == fixed_eta:
                return Inequality(lam, eta)
    lam_f = np.array([float(x) for x in lam_approx])
    scores = float_scores(lam_f, contexts, n, guard)
    top = scores.max() if fixed_eta is None else float(fixed_eta)
    m = len(contexts)
    den = max_denominator
    tol = tolerance
    last_error = "no attempt"
    while den <= DENOMINATOR_LIMIT:
        active = np.flatnonzero(scores >= top - tol)
        active = active[np.argsort(-scores[active], kind="stable")]
        active = _independent_candidates(active, contexts, n, guard)
        tracker = IncrementalRank(m + 1)
        chosen = []
        for i in active:
            v = vertex(assignment_values(int(i), n), contexts)
            if tracker.add(list(v) + [-1]):
                chosen.append(v)
                if tracker.rank == m + 1:
                    break
        rows = [list(r) + [Fraction(0)] for r in system.rows]
        rhs = list(system.rhs)
        rows += [[Fraction(x) for x in v] + [Fraction(-1)] for v in chosen]
        rhs += [Fraction(0)] * len(chosen)
        if fixed_eta is not None:
            rows.append([Fraction(0)] * m + [Fraction(1)])
            rhs.append(Fraction(fixed_eta))
        approx = list(lam_f) + [float(top if eta_approx is None else eta_approx)]
        sol = nearest_affine_solution(rows, rhs, approx, den)
        if sol is not None:
            lam = tuple(sol[:m])
            eta, _ = noncontextual_max(lam, contexts, n, guard)
            if eta == sol[m] and (fixed_eta is None or eta == fixed_eta):
                return Inequality(lam, eta)
            last_error = f"recomputed bound {eta} differs from {sol[m]}"
        else:
            last_error = "tight-constraint system inconsistent"
        den *= 100
        tol /= 10
    raise CertificationError(f"rational reconstruction failed: {last_error}")


def _independent_candidates(active: np.ndarray, contexts, n: int, guard: int) -> np.ndarray:
    """Numerically independent rows of [v(a), -1], found by pivoted QR."""
    if len(active) <= len(contexts) + 1:
        return active
    rows = vertex_matrix(contexts, n, guard)[active].astype(float)
    rows = np.hstack([rows, -np.ones((len(active), 1))])
    _, r, piv = qr(rows.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > 1e-9 * max(diag[0], 1.0)))
    return active[np.sort(piv[:rank])]


# --- numeric program ----------------------------------------------------------

@dataclass
class _Restricted:
    """The (t, eta) program restricted to a growing set of vertex rows."""
    lam0: np.ndarray
    basis: np.ndarray  # m x f
    contexts: tuple
    n: int
    guard: int
    rows: list = field(default_factory=list)
    keys: set = field(default_factory=set)

    def add(self, indices) -> int:
        added = 0
        for i in indices:
            i = int(i)
            if i not in self.keys:
                self.keys.add(i)
                self.rows.append(i)
                added += 1
        return added

    def lam(self, t):
        return self.lam0 + self.basis @ t


def _seed_assignments(n: int, contexts, count: int = 64, seed: int = 0):
    full = (1 << n) - 1
    out = [0, full] + [1 << k for k in range(n)] + [full ^ (1 << k) for k in range(n)]
    out += [sum(1 << k for k in c) for c in contexts]
    rng = np.random.default_rng(seed)
    out += [int(x) for x in rng.integers(0, 1 << n, size=count)]
    return out


def _solve_restricted(prob: _Restricted, objective: np.ndarray, fixed_eta: float | None, box: float):
    vm = vertex_matrix(prob.contexts, prob.n, prob.guard)[np.array(prob.rows)].astype(float)
    red = vm @ prob.basis  # rows: N^T v(a)
    const = vm @ prob.lam0
    f = prob.basis.shape[1]
    if fixed_eta is None:
        a_ub = np.hstack([red, -np.ones((len(prob.rows), 1))])
        b_ub = -const
        bounds = [(-box, box)] * f + [(None, None)]
    else:
        a_ub = red
        b_ub = fixed_eta - const
        bounds = [(-box, box)] * f
    res = linprog(objective, A_ub=a_ub, b_ub=b_ub, bounds=bounds,
                  method="highs-ds", options={"primal_feasibility_tolerance": 1e-10,
                                              "dual_feasibility_tolerance": 1e-10})
    return res


def constraint_generation(prob: _Restricted, objective: np.ndarray, fixed_eta: float | None = None,
                          batch: int = 32, tol: float = 1e-9,
                          max_rounds: int = 5000):
    """Iterate restricted solves and separation until no vertex is violated.

    Returns ``(status, t, eta, rounds)``.
    """
    box = 1e3
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        res = _solve_restricted(prob, objective, fixed_eta, box)
        if res.status == 2:
            return "infeasible", None, None, rounds
        if res.status != 0:
            raise RuntimeError(f"numeric LP failed: {res.message}")
        f = prob.basis.shape[1]
        t = res.x[:f]
        eta = res.x[f] if fixed_eta is None else fixed_eta
        scores = float_scores(prob.lam(t), prob.contexts, prob.n, prob.guard)
        viol = scores - eta
        scale = 1.0 + abs(eta)
        if viol.max() > tol * scale:
            order = np.argsort(-viol)[:batch]
            order = order[viol[order] > tol * scale]
            if prob.add(order) == 0:
                log.warning("separation returned only known rows; stopping at tolerance")
                return "optimal", t, eta, rounds
            continue
        if f and np.abs(t).max() > 0.99 * box:
            box *= 100
            continue
        return "optimal", t, eta, rounds
    raise RuntimeError("constraint generation did not converge")


def _float_reduction(reduced):
    lam0, basis = reduced
    m = len(lam0)
    lam0_f = np.array([float(x) for x in lam0])
    basis_f = np.array([[float(b[j]) for b in basis] for j in range(m)]).reshape(m, len(basis))
    return lam0_f, basis_f


def solve_optimal(scenario: Scenario, contexts, guard: int = DEFAULT_GUARD, exact: bool = False,
                  certify: bool = True, zeros: Sequence[int] = ()) -> SolveReport:
    """Optimal state-independent inequality for ``contexts``.

    ``exact=True`` runs the pure rational column-generation simplex instead
    of the numeric solver (practical for small scenarios only).  ``zeros``
    lists context positions whose coefficient is forced to vanish.
    """
    contexts = require_valid_contexts(scenario, contexts)
    n = scenario.n
    check_guard(n, guard)
    zeros = tuple(sorted(set(int(j) for j in zeros)))
    system, reduced = _reduction(scenario, contexts, zeros)
    if reduced is None:
        return SolveReport("infeasible", system=system)
    if exact:
        report = _solve_exact(scenario, contexts, system, reduced, guard)
    else:
        report = _solve_numeric(scenario, contexts, reduced, guard, zeros)
    report.system = system
    if certify and report.inequality is not None and report.certificate is None:
        cert = find_dual_certificate(report.inequality, system, reduced[1], contexts, n, guard)
        if cert is None or cert.objective != report.inequality.eta:
            raise CertificationError("no exact dual certificate for the recovered optimum")
        report.certificate = cert
    if report.certificate is not None:
        assert verify_dual_certificate(report.certificate, system, contexts)
    ineq = report.inequality
    if ineq is not None:
        if ineq.eta <= 0:
            raise RuntimeError("internal error: nonpositive optimal bound")
        if ineq.eta >= 1:
            report.status = "no_sic"
        else:
            report.violation = 1 / ineq.eta - 1
    return report


def _solve_numeric(scenario, contexts, reduced, guard, zeros=()) -> SolveReport:
    n = scenario.n
    lam0_f, basis_f = _float_reduction(reduced)
    f = basis_f.shape[1]
    if f == 0:
        eta, _ = noncontextual_max(reduced[0], contexts, n, guard)
        return SolveReport("optimal", Inequality(reduced[0], eta))
    prob = _Restricted(lam0_f, basis_f, contexts, n, guard)
    prob.add(_seed_assignments(n, contexts))
    seeded = len(prob.rows)
    objective = np.zeros(f + 1)
    objective[f] = 1.0
    status, t, eta, rounds = constraint_generation(prob, objective)
    if status != "optimal":
        raise RuntimeError("internal error: reduced program infeasible although T(lam) = 1 is solvable")
    lam_f = prob.lam(t)
    ineq = rationalize_and_certify(lam_f, scenario, contexts, eta_approx=eta, guard=guard, zeros=zeros)
    return SolveReport("optimal", ineq, iterations=rounds, constraints_generated=len(prob.rows) - seeded)


def _solve_exact(scenario, contexts, system, reduced, guard) -> SolveReport:
    """Column generation on the reduced dual, entirely in rationals.

    Dual: maximize sum_a mu_a lam0.v(a) s.t. sum_a mu_a N^T v(a) = 0,
    sum_a mu_a = 1, mu >= 0.  Its multipliers are (t, -eta).
    """
    n = scenario.n
    lam0, basis = reduced
    f = len(basis)
    m = len(contexts)
    rhs = [Fraction(0)] * f + [Fraction(1)]

    def column(i):
        v = vertex(assignment_values(i, n), contexts)
        col = [sum((b[j] * v[j] for j in range(m) if b[j]), Fraction(0)) for b in basis] + [Fraction(1)]
        cost = -sum((l * x for l, x in zip(lam0, v) if l), Fraction(0))
        return col, cost

    def pricer(pi, phase_one):
        t, last = pi[:f], pi[f]
        direction = [sum((b[j] * tj for b, tj in zip(basis, t)), Fraction(0)) for j in range(m)]
        if not phase_one:
            # reduced cost of a: -lam0.v - (N t).v - last; most negative = max (lam0 + N t).v
            direction = [d + l for d, l in zip(direction, lam0)]
        scores, den = exact_scores(direction, contexts, n, guard)
        best = int(np.argmax(scores))
        value = Fraction(int(scores[best]), den) + last
        if value > 0:
            col, cost = column(best)
            return [(best, col, cost)]
        return []

    seeds = {}
    for i in _seed_assignments(n, contexts, count=8):
        if i not in seeds:
            seeds[i] = column(i)
    res = simplex.solve(rhs, {k: c for k, (c, _) in seeds.items()}, {k: c for k, (_, c) in seeds.items()},
                        pricer=pricer)
    if res.status != "optimal":
        raise RuntimeError(f"internal error: exact dual program {res.status}")
    t, last = res.duals[:f], res.duals[f]
    lam = tuple(l + sum((b[j] * tj for b, tj in zip(basis, t)), Fraction(0)) for j, l in enumerate(lam0))
    eta, _ = noncontextual_max(lam, contexts, n, guard)
    if eta != -last or -res.objective != eta:
        raise CertificationError("exact simplex multipliers do not reproduce the optimum")
    weights = {k: v for k, v in res.x.items()}
    point = [Fraction(0)] * m
    named = {}
    for i, w in weights.items():
        a = assignment_values(i, n)
        named[a] = w
        for j, v in enumerate(vertex(a, contexts)):
            point[j] += w * v
    sol = solve_affine([list(col) for col in zip(*system.rows)], point)
    cert = None
    if sol is not None:
        y = tuple(sol[0])
        cert = DualCertificate(named, y, sum((r * yy for r, yy in zip(system.rhs, y)), Fraction(0)))
    return SolveReport("optimal", Inequality(lam, eta), iterations=res.pivots,
                       constraints_generated=res.columns_generated, certificate=cert, method="exact")
