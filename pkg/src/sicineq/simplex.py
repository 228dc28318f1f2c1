"""Exact rational revised simplex with anti-cycling and column generation.

Solves ``min c.x  s.t.  A x = b, x >= 0`` over ``Fraction``.  Columns may be
supplied lazily by a pricing callback, which receives the current simplex
multipliers and returns new columns with negative reduced cost.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)
BLAND_AFTER = 50


class SimplexError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded
    objective: Fraction | None = None
    x: dict = field(default_factory=dict)  # column key -> value (nonzero basics only)
    duals: list = field(default_factory=list)  # multipliers pi, one per row
    pivots: int = 0
    columns_generated: int = 0


Pricer = Callable[[list, bool], list]


class _Revised:
    def __init__(self, b: Sequence[Fraction], max_pivots: int):
        self.m = len(b)
        self.b = [Fraction(x) for x in b]
        self.cols: dict = {}
        self.cost: dict = {}
        self.order: list = []  # Bland ordering of column keys
        self.max_pivots = max_pivots
        self.pivots = 0

    def add_column(self, key, column, cost):
        if key in self.cols:
            return False
        self.cols[key] = [Fraction(x) for x in column]
        self.cost[key] = Fraction(cost)
        self.order.append(key)
        return True

    def start(self, basis, binv):
        self.basis = list(basis)
        self.binv = binv
        self.xb = [sum((binv[i][k] * self.b[k] for k in range(self.m) if self.b[k]), ZERO)
                   for i in range(self.m)]

    def duals(self, costs):
        cb = [costs(k) for k in self.basis]
        return [sum((cb[i] * self.binv[i][j] for i in range(self.m) if cb[i]), ZERO)
                for j in range(self.m)]

    def reduced_cost(self, key, pi, costs):
        col = self.cols[key]
        return costs(key) - sum((p * a for p, a in zip(pi, col) if a and p), ZERO)

    def ftran(self, col):
        nz = [(k, a) for k, a in enumerate(col) if a]
        return [sum((self.binv[i][k] * a for k, a in nz), ZERO) for i in range(self.m)]

    def pivot(self, key, u):
        ratios = [(self.xb[i] / u[i], self.order.index(self.basis[i]), i)
                  for i in range(self.m) if u[i] > 0]
        if not ratios:
            return False
        _, _, r = min(ratios)
        piv = u[r]
        rowr = [x / piv for x in self.binv[r]]
        xr = self.xb[r] / piv
        for i in range(self.m):
            if i == r or not u[i]:
                continue
            f = u[i]
            bi = self.binv[i]
            self.binv[i] = [x - f * y for x, y in zip(bi, rowr)]
            self.xb[i] -= f * xr
        self.binv[r] = rowr
        self.xb[r] = xr
        self.basis[r] = key
        self.pivots += 1
        if self.pivots > self.max_pivots:
            raise SimplexError("pivot limit exceeded")
        return True

    def run(self, costs, allowed, pricer: Pricer | None, phase_one: bool):
        """Dantzig pricing; Bland's rule after a streak of degenerate pivots."""
        generated = 0
        degenerate = 0
        while True:
            pi = self.duals(costs)
            basic = set(self.basis)
            entering = None
            best = ZERO
            bland = degenerate >= BLAND_AFTER
            for key in self.order:
                if key in basic or not allowed(key):
                    continue
                rc = self.reduced_cost(key, pi, costs)
                if rc < best:
                    entering, best = key, rc
                    if bland:
                        break
            if entering is None and pricer is not None:
                for key, col, cost in pricer(pi, phase_one):
                    if self.add_column(key, col, cost):
                        generated += 1
                        if entering is None and self.reduced_cost(key, pi, costs) < 0:
                            entering = key
            if entering is None:
                return "optimal", generated
            before = sum(self.xb[i] * costs(self.basis[i]) for i in range(self.m))
            if not self.pivot(entering, self.ftran(self.cols[entering])):
                return "unbounded", generated
            after = sum(self.xb[i] * costs(self.basis[i]) for i in range(self.m))
            degenerate = degenerate + 1 if after == before else 0


def solve(b: Sequence, columns: dict | None = None, costs: dict | None = None,
          pricer: Pricer | None = None, max_pivots: int = 200000) -> LPResult:
    """Two-phase exact simplex.

    ``columns`` maps hashable keys to column vectors, ``costs`` maps the same
    keys to objective coefficients.  ``pricer(pi, phase_one)`` returns a list
    of ``(key, column, cost)``; in phase one the caller should look for
    columns maximizing ``pi . column`` (the phase-one cost of real columns is
    zero), in phase two for ``cost - pi . column < 0``.
    """
    b = [Fraction(x) for x in b]
    m = len(b)
    lp = _Revised(b, max_pivots)
    sign = [1 if x >= 0 else -1 for x in b]
    lp.b = [abs(x) for x in b]
    artificial = [("__art__", i) for i in range(m)]
    for i, key in enumerate(artificial):
        col = [ZERO] * m
        col[i] = ONE
        lp.add_column(key, col, 0)

    def flipped(col):
        return [x if s > 0 else -x for x, s in zip(col, sign)]

    for key, col in (columns or {}).items():
        lp.add_column(key, flipped(col), (costs or {}).get(key, 0))

    wrapped = None
    if pricer is not None:
        def wrapped(pi, phase_one):
            # multipliers are for the sign-flipped rows; undo before pricing
            real_pi = [p * s for p, s in zip(pi, sign)]
            return [(k, flipped(c), cost) for k, c, cost in pricer(real_pi, phase_one)]

    art = set(artificial)
    lp.start(artificial, [[ONE if i == j else ZERO for j in range(m)] for i in range(m)])
    status, gen1 = lp.run(lambda k: ONE if k in art else ZERO, lambda k: True, wrapped, True)
    infeas = sum((lp.xb[i] for i in range(m) if lp.basis[i] in art), ZERO)
    if infeas > 0:
        return LPResult("infeasible", pivots=lp.pivots, columns_generated=gen1)

    # drive zero-level artificials out of the basis where possible
    for r in range(m):
        if lp.basis[r] not in art:
            continue
        for key in lp.order:
            if key in art or key in lp.basis:
                continue
            u = lp.ftran(lp.cols[key])
            if u[r]:
                _force_pivot(lp, r, key, u)
                break

    real_cost = lambda k: lp.cost[k]  # noqa: E731
    status, gen2 = lp.run(real_cost, lambda k: k not in art, wrapped, False)
    pi = lp.duals(real_cost)
    result = LPResult(status, pivots=lp.pivots, columns_generated=gen1 + gen2)
    if status != "optimal":
        return result
    result.duals = [p * s for p, s in zip(pi, sign)]
    result.x = {k: v for k, v in zip(lp.basis, lp.xb) if v and k not in art}
    result.objective = sum((lp.cost[k] * v for k, v in result.x.items()), ZERO)
    return result


def _force_pivot(lp: _Revised, r: int, key, u):
    """Degenerate pivot on row ``r`` regardless of sign (x_B[r] is zero)."""
    piv = u[r]
    rowr = [x / piv for x in lp.binv[r]]
    for i in range(lp.m):
        if i != r and u[i]:
            f = u[i]
            lp.binv[i] = [x - f * y for x, y in zip(lp.binv[i], rowr)]
    lp.binv[r] = rowr
    lp.basis[r] = key
