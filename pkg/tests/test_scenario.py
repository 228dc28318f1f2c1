from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sicineq.exact import ComplexRational, commutes, identity, is_hermitian, mat_mul
from sicineq.scenario import (Scenario, ScenarioError, canonical_context_set, check_observable,
                              compatibility_graph, context_operator, enumerate_contexts,
                              is_involution, observable_from_vector, permute_scenario,
                              require_valid_contexts, validate_context_set)

I = ComplexRational(0, 1)
component = st.builds(ComplexRational, st.integers(-3, 3), st.integers(-3, 3))


@given(st.lists(component, min_size=2, max_size=4).filter(lambda v: any(v)),
       st.sampled_from(["complement", "projector"]))
def test_observables_from_vectors_are_dichotomic(v, convention):
    m = observable_from_vector(v, convention)
    assert is_hermitian(m)
    assert is_involution(m)
    # v is an eigenvector with eigenvalue -1 (complement) or +1 (projector)
    mv = [sum((row[j] * v[j] for j in range(len(v))), ComplexRational(0)) for row in m]
    sign = -1 if convention == "complement" else 1
    assert mv == [x * sign for x in v]


def test_zero_vector_and_bad_convention_rejected():
    with pytest.raises(ScenarioError):
        observable_from_vector([0, 0, 0])
    with pytest.raises(ScenarioError):
        observable_from_vector([1, 0], "other")


def test_check_observable_rejects_bad_matrices():
    with pytest.raises(ScenarioError, match="Hermitian"):
        check_observable(((0, 1), (0, 0)))
    with pytest.raises(ScenarioError, match="identity"):
        check_observable(((2, 0), (0, 1)))
    with pytest.raises(ScenarioError, match="square"):
        check_observable(((1, 0),))
    assert check_observable(((0, -I), (I, 0)))


def test_scenario_invariants():
    with pytest.raises(ScenarioError):
        Scenario(2, ())
    with pytest.raises(ScenarioError):
        Scenario(3, (((1, 0), (0, 1)),))
    with pytest.raises(ScenarioError):
        Scenario(2, (((1, 0), (0, 1)),), labels=("a", "b"))
    s = Scenario.from_vectors([(1, 0, 0), (0, 1, 0)], labels=["x", "y"])
    assert s.n == 2 and s.labels == ("x", "y")
    assert s.label((0, 1)) == "{x,y}"
    assert s.index_of("y") == 1
    with pytest.raises(ScenarioError):
        s.index_of("z")


def test_orthogonal_rays_commute_and_others_do_not():
    s = Scenario.from_vectors([(1, 0, 0), (0, 1, 1), (1, 1, 0)])
    g = compatibility_graph(s)
    assert g.edges == frozenset({(0, 1)})
    assert g.adjacent(1, 0) and not g.adjacent(0, 2)
    assert g.neighbours(0) == {1}


@given(st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3)
                .filter(any), min_size=2, max_size=6))
def test_commutation_graph_matches_orthogonality(vectors):
    s = Scenario.from_vectors(vectors)
    g = compatibility_graph(s)
    for k, l in combinations(range(s.n), 2):
        u, v = vectors[k], vectors[l]
        dot = sum(a * b for a, b in zip(u, v))
        parallel = all(u[i] * v[j] == u[j] * v[i] for i in range(3) for j in range(3))
        assert g.adjacent(k, l) == (dot == 0 or parallel)
        assert g.adjacent(k, l) == commutes(s.observables[k], s.observables[l])


def test_enumerate_contexts_lists_all_cliques():
    s = Scenario.from_vectors([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0)])
    g = compatibility_graph(s)
    c2 = enumerate_contexts(g, 2)
    assert c2[:4] == ((0,), (1,), (2,), (3,))
    assert set(c2[4:]) == {(0, 1), (0, 2), (1, 2), (2, 3)}
    c3 = enumerate_contexts(g, 3)
    assert c3[-1] == (0, 1, 2) and len(c3) == 9
    for c in c3:
        assert g.is_clique(c)
    with pytest.raises(ValueError):
        enumerate_contexts(g, 0)


def test_context_validation():
    s = Scenario.from_vectors([(1, 0, 0), (0, 1, 0), (1, 1, 0)])
    assert validate_context_set(s, [(0, 1)]) == []
    assert validate_context_set(s, [(0, 2)]) == [(0, 2)]
    assert validate_context_set(s, [(0, 5)]) == [("out_of_range", 5)]
    with pytest.raises(ScenarioError, match="incompatible"):
        require_valid_contexts(s, [(1,), (0, 2)])
    assert canonical_context_set([(1, 0), (0, 1), (2,)]) == ((0, 1), (2,))
    with pytest.raises(ScenarioError):
        canonical_context_set([()])


def test_context_operator_products():
    s = Scenario.from_vectors([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    # product of the three complements of an orthonormal basis is -1
    assert context_operator(s, (0, 1, 2)) == tuple(tuple(-x for x in row) for row in identity(3))
    assert context_operator(s, (0,)) == s.observables[0]
    assert context_operator(s, (0, 1)) == mat_mul(s.observables[0], s.observables[1])
    t = Scenario.from_vectors([(1, 0, 0), (1, 1, 0)])
    with pytest.raises(ScenarioError):
        context_operator(t, (0, 1))


def test_permute_scenario():
    s = Scenario.from_vectors([(1, 0, 0), (0, 1, 0)], labels=["a", "b"])
    p = permute_scenario(s, [1, 0])
    assert p.labels == ("b", "a")
    assert p.observables[0] == s.observables[1]


def test_exact_normalization_without_sqrt():
    m = observable_from_vector([1, 1, 1])
    assert m[0][0] == Fraction(1, 3)
    assert m[0][1] == Fraction(-2, 3)
