"""Independent checks of a given inequality, and the Yu-Oh reference columns."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .builtin_scenarios import yu_oh
from .exact import is_zero
from .hv import DEFAULT_GUARD, noncontextual_max
from .lp import Inequality, state_independence_residual
from .tightness import is_tight


def verify_state_independence(ineq: Inequality, scenario, contexts):
    """``(T(lam) == 1, T(lam) - 1)`` computed exactly."""
    if len(ineq.lam) != len(contexts):
        raise ValueError(f"{len(ineq.lam)} coefficients for {len(contexts)} contexts")
    residual = state_independence_residual(scenario, contexts, ineq.lam)
    return is_zero(residual), residual


def violation(ineq: Inequality) -> Fraction:
    """Relative quantum excess ``1/eta - 1`` of an inequality with T(lam) = 1."""
    if ineq.eta <= 0:
        raise ValueError("violation is undefined for a nonpositive bound")
    return 1 / ineq.eta - 1


# Integer entries of the reference columns; multiply by the column scale to get lam.
_SINGLES = {"YO": [2] * 9, "opt2": [2, 3, 3, 1, 2, 2, 1, 2, 2], "opt3": [1] * 9}
_AD = {"YO": 2, "opt2": 1, "opt3": 2}
_PAIRS = (("1", "2"), ("1", "3"), ("1", "4"), ("1", "7"), ("2", "3"), ("2", "5"), ("2", "8"),
          ("3", "6"), ("3", "9"), ("4", "7"), ("5", "8"), ("6", "9"))
_PAIR_VALUES = {
    "YO": [-1] * 12,
    "opt2": [-1, -1, -1, -1, -2, -2, -2, -2, -2, 0, -2, -2],
    "opt3": [-2, -2, -1, -1, -2, -1, -1, -1, -1, -1, -1, -1],
}
STAR_PAIRS = (("4", "A"), ("8", "A"), ("9", "A"), ("5", "B"), ("7", "B"), ("9", "B"),
              ("6", "C"), ("7", "C"), ("8", "C"), ("4", "D"), ("5", "D"), ("6", "D"))
_STAR = {"YO": -1, "opt2": -1, "opt3": -2}
_TRIANGLES = (("1", "2", "3"), ("1", "4", "7"), ("2", "5", "8"), ("3", "6", "9"))
_TRIANGLE_VALUES = {"opt3": [0, -3, -3, -3]}
SCALES = {"YO": Fraction(3, 50), "opt2": Fraction(3, 52), "opt3": Fraction(3, 83)}
COLUMNS = tuple(SCALES)


def table_entries(column: str) -> dict:
    """Integer entries of a reference column keyed by label tuple."""
    if column not in SCALES:
        raise KeyError(f"unknown table column {column!r}; choose from {COLUMNS}")
    entries = {}
    for label, v in zip("123456789", _SINGLES[column]):
        entries[(label,)] = v
    for label in "ABCD":
        entries[(label,)] = _AD[column]
    for pair, v in zip(_PAIRS, _PAIR_VALUES[column]):
        entries[pair] = v
    for pair in STAR_PAIRS:
        entries[pair] = _STAR[column]
    for tri, v in zip(_TRIANGLES, _TRIANGLE_VALUES.get(column, ())):
        entries[tri] = v
    return entries


def table_inequality(column: str):
    """``(scenario, contexts, lam)`` for a reference column, lam already rescaled."""
    scenario, sets = yu_oh()
    contexts = sets["C_YO3" if column == "opt3" else "C_YO"]
    entries = table_entries(column)
    by_context = {tuple(sorted(scenario.index_of(l) for l in key)): v for key, v in entries.items()}
    if set(by_context) != set(contexts):
        raise AssertionError("reference column data does not cover the context set")
    lam = tuple(SCALES[column] * by_context[c] for c in contexts)
    return scenario, contexts, lam


@dataclass
class CheckReport:
    name: str
    checks: dict = field(default_factory=dict)  # check name -> (passed, detail)
    eta: Fraction | None = None
    violation: Fraction | None = None
    tightness: object = None

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.checks.values())


EXPECTED = {
    "YO": (Fraction(24, 25), Fraction(1, 24), False),
    "opt2": (Fraction(12, 13), Fraction(1, 12), True),
    "opt3": (Fraction(75, 83), Fraction(8, 75), True),
}


def certify_inequality(scenario, contexts, lam, eta=None, tightness: bool = False,
                       guard: int = DEFAULT_GUARD, name: str = "inequality") -> CheckReport:
    """State independence, exact bound, violation, and optional tightness."""
    report = CheckReport(name)
    ok, residual = verify_state_independence(Inequality(lam, 0), scenario, contexts)
    report.checks["state_independent"] = (ok, residual)
    best, witness = noncontextual_max(lam, contexts, scenario.n, guard)
    report.eta = best
    if eta is not None:
        report.checks["bound"] = (best == Fraction(eta), f"max {best}, claimed {eta}")
    if best > 0:
        report.violation = violation(Inequality(lam, best))
        report.checks["violates"] = (ok and report.violation > 0, str(report.violation))
    else:
        report.checks["violates"] = (False, "nonpositive bound")
    if tightness:
        report.tightness = is_tight(Inequality(lam, best), contexts, scenario.n, guard)
        report.checks["tight"] = (report.tightness.tight, report.tightness)
    return report


def check_table_column(column: str, guard: int = DEFAULT_GUARD) -> CheckReport:
    scenario, contexts, lam = table_inequality(column)
    eta, viol, tight = EXPECTED[column]
    report = certify_inequality(scenario, contexts, lam, tightness=tight, guard=guard, name=column)
    report.checks["bound"] = (report.eta == eta, f"max {report.eta}, expected {eta}")
    report.checks["violation"] = (report.violation == viol, f"{report.violation}, expected {viol}")
    return report
