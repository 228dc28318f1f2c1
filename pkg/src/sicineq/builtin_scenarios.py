"""The three reference scenarios: Yu-Oh qutrit rays, the fifteen two-qubit
Pauli products, and the 18-ray ququart Kochen-Specker set."""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations, product

from .exact import ComplexRational, identity, kron, mat_mul
from .scenario import (Scenario, ScenarioError, compatibility_graph, enumerate_contexts,
                       require_valid_contexts)

YU_OH_LABELS = ("1", "2", "3", "4", "5", "6", "7", "8", "9", "A", "B", "C", "D")
YU_OH_VECTORS = (
    (1, 0, 0), (0, 1, 0), (0, 0, 1),
    (0, 1, -1), (1, 0, -1), (1, -1, 0),
    (0, 1, 1), (1, 0, 1), (1, 1, 0),
    (-1, 1, 1), (1, -1, 1), (1, 1, -1), (1, 1, 1),
)
YU_OH_TRIANGLES = ((0, 1, 2), (0, 3, 6), (1, 4, 7), (2, 5, 8))

# Cabello, Estebaranz, Garcia-Alcaine (1996): nine orthogonal bases, each ray
# in exactly two of them.
KS18_BASES = (
    ((0, 0, 0, 1), (0, 0, 1, 0), (1, 1, 0, 0), (1, -1, 0, 0)),
    ((0, 0, 0, 1), (0, 1, 0, 0), (1, 0, 1, 0), (1, 0, -1, 0)),
    ((1, -1, 1, -1), (1, -1, -1, 1), (1, 1, 0, 0), (0, 0, 1, 1)),
    ((1, -1, 1, -1), (1, 1, 1, 1), (1, 0, -1, 0), (0, 1, 0, -1)),
    ((0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 0, -1)),
    ((1, -1, -1, 1), (1, 1, 1, 1), (1, 0, 0, -1), (0, 1, -1, 0)),
    ((1, 1, -1, 1), (1, 1, 1, -1), (1, -1, 0, 0), (0, 0, 1, 1)),
    ((1, 1, -1, 1), (-1, 1, 1, 1), (1, 0, 1, 0), (0, 1, 0, -1)),
    ((1, 1, 1, -1), (-1, 1, 1, 1), (1, 0, 0, 1), (0, 1, -1, 0)),
)

I = ComplexRational(0, 1)
PAULI = {
    "1": ((1, 0), (0, 1)),
    "x": ((0, 1), (1, 0)),
    "y": ((0, -I), (I, 0)),
    "z": ((1, 0), (0, -1)),
}


def _ray_key(v):
    """Canonical representative of the ray through an integer vector."""
    lead = next(x for x in v if x)
    return tuple(x if lead > 0 else -x for x in v)


@lru_cache(maxsize=None)
def yu_oh():
    """Yu-Oh scenario and its context sets ``C_YO`` (sizes 1-2) and ``C_YO3``."""
    scenario = Scenario.from_vectors(YU_OH_VECTORS, YU_OH_LABELS)
    graph = compatibility_graph(scenario)
    c2 = enumerate_contexts(graph, 2)
    c3 = enumerate_contexts(graph, 3)
    if len(c2) != 37 or set(c3) - set(c2) != set(YU_OH_TRIANGLES):
        raise ScenarioError("Yu-Oh data failed structural validation")
    return scenario, {"C_YO": c2, "C_YO3": c3}


def yu_oh_symmetries():
    """Observable permutations induced by signed coordinate permutations of R^3.

    Each returned tuple ``p`` maps observable ``k`` to ``p[k]``.
    """
    keys = [_ray_key(v) for v in YU_OH_VECTORS]
    perms = set()
    for order in permutations(range(3)):
        for signs in product((1, -1), repeat=3):
            images = []
            for v in YU_OH_VECTORS:
                w = tuple(signs[i] * v[order[i]] for i in range(3))
                images.append(keys.index(_ray_key(w)))
            perms.add(tuple(images))
    return sorted(perms)


@lru_cache(maxsize=None)
def peres_mermin_15():
    """Fifteen nontrivial two-qubit Pauli products, contexts up to size 3."""
    labels, obs = [], []
    for a, b in product("1xyz", repeat=2):
        if a == b == "1":
            continue
        labels.append(a + b)
        obs.append(kron(PAULI[a], PAULI[b]))
    scenario = Scenario(4, tuple(obs), tuple(labels))
    scenario.validate()
    contexts = enumerate_contexts(compatibility_graph(scenario), 3)
    return scenario, contexts


def peres_mermin_negative_contexts(scenario: Scenario):
    """The three triples {xx,yy,zz}, {xz,yx,zy}, {xy,yz,zx}."""
    return tuple(tuple(sorted(scenario.index_of(l) for l in trip))
                 for trip in (("xx", "yy", "zz"), ("xz", "yx", "zy"), ("xy", "yz", "zx")))


def pauli_triples_to_identity(scenario: Scenario):
    """Size-3 commuting contexts whose operator product is +-1, with the sign."""
    one = identity(scenario.dimension)
    minus = tuple(tuple(-x for x in row) for row in one)
    graph = compatibility_graph(scenario)
    found = {}
    for c in combinations(range(scenario.n), 3):
        if not graph.is_clique(c):
            continue
        prod = mat_mul(mat_mul(scenario.observables[c[0]], scenario.observables[c[1]]),
                       scenario.observables[c[2]])
        if prod == one:
            found[c] = 1
        elif prod == minus:
            found[c] = -1
    return found


def _ks18_rays():
    rays = []
    for basis in KS18_BASES:
        for v in basis:
            if _ray_key(v) not in rays:
                rays.append(_ray_key(v))
    return rays


def validate_ks18(rays, bases):
    if len(rays) != 18:
        raise ScenarioError(f"expected 18 rays, found {len(rays)}")
    if len(bases) != 9:
        raise ScenarioError("expected 9 bases")
    for basis in bases:
        for u, v in combinations(basis, 2):
            if sum(a * b for a, b in zip(rays[u], rays[v])) != 0:
                raise ScenarioError("KS-18 basis vectors are not orthogonal")
    counts = [sum(k in b for b in bases) for k in range(18)]
    if any(c != 2 for c in counts):
        raise ScenarioError(f"each ray must lie in exactly two bases, got {counts}")


@lru_cache(maxsize=None)
def ks_18():
    """18-ray Kochen-Specker scenario with context sets for max sizes 2, 3, 4."""
    rays = _ks18_rays()
    bases = tuple(tuple(sorted(rays.index(_ray_key(v)) for v in b)) for b in KS18_BASES)
    validate_ks18(rays, bases)
    scenario = Scenario.from_vectors(rays)
    graph = compatibility_graph(scenario)
    sets = {f"max{k}": enumerate_contexts(graph, k) for k in (2, 3, 4)}
    if not set(bases) <= set(sets["max4"]):
        raise ScenarioError("KS-18 bases are not contexts of the commutation graph")
    return scenario, sets


BUILTINS = {
    "yu-oh": "Yu-Oh 13-ray qutrit scenario (context sets C_YO, C_YO3)",
    "peres-mermin-15": "15 two-qubit Pauli products (contexts up to size 3)",
    "ks-18": "18-ray ququart Kochen-Specker set (context sets max2, max3, max4)",
}


def load_builtin(name: str):
    """Return ``(scenario, {set_name: contexts})`` for a built-in name."""
    if name == "yu-oh":
        return yu_oh()
    if name == "peres-mermin-15":
        scenario, contexts = peres_mermin_15()
        return scenario, {"max3": contexts}
    if name == "ks-18":
        return ks_18()
    raise ScenarioError(f"unknown built-in scenario {name!r}; choose from {sorted(BUILTINS)}")


def validate_builtin(name: str) -> None:
    scenario, sets = load_builtin(name)
    scenario.validate()
    for contexts in sets.values():
        require_valid_contexts(scenario, contexts)
