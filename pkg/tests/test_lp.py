from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from sicineq.builtin_scenarios import YU_OH_TRIANGLES, yu_oh
from sicineq.certify import table_inequality
from sicineq.exact import identity, is_zero
from sicineq.hv import noncontextual_max, vertex
from sicineq.lp import (CertificationError, DualCertificate, Inequality, build_equality_system,
                        find_dual_certificate, inequality_operator, rationalize_and_certify,
                        separation_oracle, solve_optimal, state_independence_residual,
                        verify_dual_certificate, with_zero_rows)
from sicineq.scenario import Scenario, compatibility_graph, enumerate_contexts

RAYS = [v for v in product((-1, 0, 1), repeat=3) if any(v) and next(x for x in v if x) > 0]


def test_equality_system_shape_and_meaning():
    scenario, sets = yu_oh()
    contexts = sets["C_YO"]
    system = build_equality_system(scenario, contexts)
    assert len(system.rows) == 3 + 2 * 3
    assert system.rhs[:3] == (1, 1, 1) and set(system.rhs[3:]) == {0}
    _, _, lam = table_inequality("opt2")
    for row, b in zip(system.rows, system.rhs):
        assert sum(r * l for r, l in zip(row, lam)) == b
    zeroed = with_zero_rows(system, [4])
    assert zeroed.rows[-1][4] == 1 and zeroed.row_labels[-1] == "zero[4]"


def test_inequality_operator_is_identity_only_at_the_right_scale():
    scenario, contexts, lam = table_inequality("opt2")
    assert inequality_operator(scenario, contexts, lam) == identity(3)
    assert is_zero(state_independence_residual(scenario, contexts, lam))
    doubled = [2 * x for x in lam]
    assert not is_zero(state_independence_residual(scenario, contexts, doubled))


def test_yu_oh_optimum_and_certificate():
    scenario, sets = yu_oh()
    contexts = sets["C_YO"]
    rep = solve_optimal(scenario, contexts)
    assert rep.status == "optimal" and rep.method == "numeric"
    assert rep.eta == Fraction(12, 13)
    assert inequality_operator(scenario, contexts, rep.inequality.lam) == identity(3)
    assert noncontextual_max(rep.inequality.lam, contexts, scenario.n)[0] == rep.eta
    cert = rep.certificate
    assert verify_dual_certificate(cert, rep.system, contexts)
    assert cert.objective == rep.eta


def test_tampered_certificates_fail():
    scenario, sets = yu_oh()
    contexts = sets["C_YO"]
    rep = solve_optimal(scenario, contexts)
    cert = rep.certificate
    bad_obj = DualCertificate(cert.weights, cert.y, cert.objective - Fraction(1, 100))
    assert not verify_dual_certificate(bad_obj, rep.system, contexts)
    keys = list(cert.weights)
    shifted = dict(cert.weights)
    shifted[keys[0]] += Fraction(1, 1000)
    assert not verify_dual_certificate(DualCertificate(shifted, cert.y, cert.objective), rep.system, contexts)
    y = list(cert.y)
    y[0] += 1
    assert not verify_dual_certificate(DualCertificate(cert.weights, tuple(y), cert.objective),
                                       rep.system, contexts)
    negative = {k: -w for k, w in cert.weights.items()}
    assert not verify_dual_certificate(DualCertificate(negative, cert.y, cert.objective), rep.system, contexts)


def test_certificate_bounds_every_feasible_inequality():
    # weak duality: any lam with T(lam) = 1 has bound >= certificate objective
    scenario, sets = yu_oh()
    contexts = sets["C_YO"]
    rep = solve_optimal(scenario, contexts)
    for column in ("YO", "opt2"):
        _, _, lam = table_inequality(column)
        point_value = sum(w * sum(l * v for l, v in zip(lam, vertex(a, contexts)))
                          for a, w in rep.certificate.weights.items())
        assert point_value == rep.certificate.objective
        assert noncontextual_max(lam, contexts, scenario.n)[0] >= rep.certificate.objective


def test_triangles_lower_the_bound():
    scenario, sets = yu_oh()
    chain = list(sets["C_YO"])
    previous = solve_optimal(scenario, chain).eta
    for tri in YU_OH_TRIANGLES:
        chain.append(tri)
        eta = solve_optimal(scenario, chain).eta
        assert eta <= previous
        previous = eta
    assert previous == Fraction(75, 83)


def test_exact_route_matches_numeric():
    scenario, sets = yu_oh()
    contexts = sets["C_YO"]
    exact = solve_optimal(scenario, contexts, exact=True)
    assert exact.method == "exact"
    assert exact.eta == Fraction(12, 13)
    assert verify_dual_certificate(exact.certificate, exact.system, contexts)
    assert inequality_operator(scenario, contexts, exact.inequality.lam) == identity(3)


def test_separation_oracle():
    scenario, contexts, lam = table_inequality("opt2")
    assert separation_oracle(lam, Fraction(12, 13), contexts, scenario.n) is None
    witness = separation_oracle(lam, Fraction(11, 13), contexts, scenario.n)
    assert witness is not None
    assert sum(l * v for l, v in zip(lam, vertex(witness, contexts))) > Fraction(11, 13)


def test_rationalize_recovers_exact_point():
    scenario, contexts, lam = table_inequality("opt2")
    noisy = [float(x) + 1e-12 * (-1) ** j for j, x in enumerate(lam)]
    ineq = rationalize_and_certify(noisy, scenario, contexts)
    assert ineq.eta == Fraction(12, 13)
    assert inequality_operator(scenario, contexts, ineq.lam) == identity(3)
    # exact input that already satisfies T = 1 passes through unchanged
    assert rationalize_and_certify(lam, scenario, contexts).lam == tuple(lam)
    again = rationalize_and_certify(ineq.lam, scenario, contexts)
    assert again == ineq


def test_rationalize_refuses_impossible_targets():
    scenario, contexts, lam = table_inequality("opt2")
    with pytest.raises(CertificationError):
        rationalize_and_certify([float(x) for x in lam], scenario, contexts,
                                fixed_eta=Fraction(1, 2))


def test_find_dual_certificate_for_table_optimum():
    from sicineq.lp import _reduction
    scenario, contexts, lam = table_inequality("opt2")
    system, (lam0, basis) = _reduction(scenario, contexts)
    cert = find_dual_certificate(Inequality(lam, Fraction(12, 13)), system, basis, contexts, scenario.n)
    assert cert is not None and cert.objective == Fraction(12, 13)
    assert verify_dual_certificate(cert, system, contexts)


def test_zero_constraints_certify_larger_optimum():
    scenario, sets = yu_oh()
    contexts = sets["C_YO"]
    j = contexts.index((0,))
    rep = solve_optimal(scenario, contexts, zeros=[j])
    assert rep.eta > Fraction(12, 13)
    assert rep.inequality.lam[j] == 0
    assert rep.system.row_labels[-1] == f"zero[{j}]"
    assert verify_dual_certificate(rep.certificate, rep.system, contexts)


def test_infeasible_and_no_sic_toys():
    single = Scenario.from_vectors([(1, 0, 0)])
    assert solve_optimal(single, [(0,)]).status == "infeasible"
    pair = Scenario.from_vectors([(1, 0, 0), (0, 1, 0)])
    rep = solve_optimal(pair, [(0,), (1,), (0, 1)])
    assert rep.status == "no_sic"
    assert rep.inequality.lam == (1, 1, -1)
    assert rep.eta == 1


@st.composite
def small_scenario(draw):
    rays = draw(st.lists(st.sampled_from(RAYS), min_size=2, max_size=7, unique=True))
    size = draw(st.integers(2, 3))
    return Scenario.from_vectors(rays), size


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_scenario())
def test_random_scenarios_are_consistent(inst):
    scenario, size = inst
    contexts = enumerate_contexts(compatibility_graph(scenario), size)
    rep = solve_optimal(scenario, contexts)
    if rep.status == "infeasible":
        assert rep.inequality is None
        return
    ineq = rep.inequality
    assert inequality_operator(scenario, contexts, ineq.lam) == identity(3)
    assert noncontextual_max(ineq.lam, contexts, scenario.n)[0] == ineq.eta
    assert verify_dual_certificate(rep.certificate, rep.system, contexts)
    assert (rep.status == "optimal") == (ineq.eta < 1)
    if rep.status == "optimal":
        assert rep.violation == 1 / ineq.eta - 1
    exact = solve_optimal(scenario, contexts, exact=True)
    assert exact.eta == ineq.eta and exact.status == rep.status
