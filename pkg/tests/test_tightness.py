from fractions import Fraction
from itertools import combinations

import pytest

from sicineq.certify import table_inequality
from sicineq.lp import Inequality
from sicineq.tightness import UncertifiedInequalityError, is_tight, saturating_vertices


def test_table_columns():
    scenario, contexts, lam = table_inequality("opt2")
    rep = is_tight(Inequality(lam, Fraction(12, 13)), contexts, scenario.n)
    assert rep.polytope_dim == 37 and rep.saturating_affine_rank == 36 and rep.tight
    scenario, contexts, lam = table_inequality("opt3")
    rep = is_tight(Inequality(lam, Fraction(75, 83)), contexts, scenario.n)
    assert rep.polytope_dim == 41 and rep.tight


def test_yu_oh_column_is_not_tight():
    scenario, contexts, lam = table_inequality("YO")
    rep = is_tight(Inequality(lam, Fraction(24, 25)), contexts, scenario.n)
    assert not rep.tight and rep.saturating_affine_rank < 36


def test_square_facets():
    # n = 2 with contexts {1},{2},{1,2}: the polytope is a tetrahedron
    contexts = [(0,), (1,), (0, 1)]
    facet = Inequality([1, 1, -1], 1)  # saturated by 3 of the 4 vertices
    rep = is_tight(facet, contexts, 2)
    assert rep.polytope_dim == 3 and rep.saturating_count == 3 and rep.tight
    edge = Inequality([1, 1, 0], 2)  # saturated only by (+,+)
    rep = is_tight(edge, contexts, 2)
    assert rep.saturating_count == 1 and rep.saturating_affine_rank == 0 and not rep.tight


def test_trivial_inequality_is_not_a_facet():
    contexts = [(0,), (1,), (0, 1)]
    rep = is_tight(Inequality([0, 0, 0], 0), contexts, 2)
    assert rep.saturating_count == 4 and rep.saturating_affine_rank == 3 and not rep.tight


def test_unattained_and_violated_bounds():
    contexts = [(0,), (1,)]
    assert saturating_vertices(Inequality([1, 1], 3), contexts, 2, strict=False) == []
    with pytest.raises(UncertifiedInequalityError):
        saturating_vertices(Inequality([1, 1], 3), contexts, 2)
    with pytest.raises(UncertifiedInequalityError):
        is_tight(Inequality([1, 1], 1), contexts, 2)
    assert is_tight(Inequality([1, 1], Fraction(5, 2)), contexts, 2).saturating_affine_rank == -1


def test_single_vertex_face_is_not_a_facet():
    contexts = [c for k in (1, 2, 3) for c in combinations(range(3), k)]
    rep = is_tight(Inequality([1] * 7, 7), contexts, 3)
    assert rep.saturating_count == 1 and not rep.tight
