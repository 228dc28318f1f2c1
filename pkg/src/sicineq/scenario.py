"""Contextuality scenarios: exact dichotomic observables, their commutation
graph, and admissible context sets.

Observable indices are 0-based internally.  Labels (``"1"``, ``"A"``, ...)
only matter for display and the document format.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .exact import (ComplexRational, Matrix, as_matrix, commutes, dagger, identity,
                    is_hermitian, mat_mul)

Context = tuple  # sorted tuple of observable indices
ContextSet = tuple  # tuple of Context, canonical coordinate order


class ScenarioError(ValueError):
    pass


def is_involution(m: Matrix) -> bool:
    return mat_mul(m, m) == identity(len(m))


def check_observable(m: Matrix, where: str = "observable") -> Matrix:
    m = as_matrix(m)
    d = len(m)
    if d == 0 or any(len(row) != d for row in m):
        raise ScenarioError(f"{where}: matrix is not square")
    if not is_hermitian(m):
        raise ScenarioError(f"{where}: matrix is not Hermitian")
    if not is_involution(m):
        raise ScenarioError(f"{where}: matrix does not square to the identity")
    return m


def observable_from_vector(components: Sequence, convention: str = "complement") -> Matrix:
    """Dichotomic observable attached to the ray of ``components``.

    ``complement`` gives 1 - 2|v><v|, ``projector`` gives 2|v><v| - 1.
    The vector need not be normalized; v^dagger v is divided out exactly.
    """
    v = [ComplexRational.coerce(x) for x in components]
    norm = sum((x.abs2() for x in v), 0)
    if norm == 0:
        raise ScenarioError("cannot build an observable from the zero vector")
    if convention not in ("complement", "projector"):
        raise ScenarioError(f"unknown convention {convention!r}")
    sign = -2 if convention == "complement" else 2
    d = len(v)
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            proj = v[i] * v[j].conjugate() / norm
            ident = 1 if i == j else 0
            row.append(proj * sign + ident if sign < 0 else proj * sign - ident)
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class Scenario:
    dimension: int
    observables: tuple
    labels: tuple = field(default=None)
    vectors: tuple = field(default=None, compare=False)  # source rays, if any

    def __post_init__(self):
        obs = tuple(as_matrix(m) for m in self.observables)
        if not obs:
            raise ScenarioError("a scenario needs at least one observable")
        for k, m in enumerate(obs):
            if len(m) != self.dimension:
                raise ScenarioError(f"observable {k + 1} has dimension {len(m)}, expected {self.dimension}")
        object.__setattr__(self, "observables", obs)
        labels = self.labels
        if labels is None:
            labels = tuple(str(k + 1) for k in range(len(obs)))
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(obs):
            raise ScenarioError("label count does not match observable count")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.observables)

    def label(self, context: Context) -> str:
        return "{" + ",".join(self.labels[k] for k in context) + "}"

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise ScenarioError(f"unknown observable label {label!r}") from None

    def validate(self) -> None:
        for k, m in enumerate(self.observables):
            check_observable(m, f"observable {self.labels[k]}")

    @classmethod
    def from_vectors(cls, vectors: Iterable[Sequence], labels=None, convention="complement"):
        vectors = tuple(tuple(ComplexRational.coerce(x) for x in v) for v in vectors)
        obs = tuple(observable_from_vector(v, convention) for v in vectors)
        return cls(len(vectors[0]), obs, labels, vectors)


@dataclass(frozen=True)
class CompatibilityGraph:
    n: int
    edges: frozenset  # of (k, l) tuples with k < l

    def adjacent(self, k: int, l: int) -> bool:
        return (min(k, l), max(k, l)) in self.edges

    def neighbours(self, k: int) -> set:
        return {l for e in self.edges for l in e if k in e and l != k}

    def is_clique(self, indices: Iterable[int]) -> bool:
        return all(self.adjacent(a, b) for a, b in combinations(sorted(indices), 2))


@lru_cache(maxsize=32)
def compatibility_graph(scenario: Scenario) -> CompatibilityGraph:
    obs = scenario.observables
    edges = frozenset((k, l) for k, l in combinations(range(scenario.n), 2) if commutes(obs[k], obs[l]))
    return CompatibilityGraph(scenario.n, edges)


def context_order_key(c: Context):
    return (len(c), tuple(c))


def enumerate_contexts(graph: CompatibilityGraph, max_size: int) -> ContextSet:
    """All cliques with 1 <= size <= max_size, ordered by (size, indices)."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    adj = {k: set() for k in range(graph.n)}
    for k, l in graph.edges:
        adj[k].add(l)
        adj[l].add(k)
    found: list[Context] = []

    def extend(clique: tuple, candidates: set):
        found.append(clique)
        if len(clique) == max_size:
            return
        for v in sorted(candidates):
            if v > clique[-1]:
                extend(clique + (v,), candidates & adj[v])

    for k in range(graph.n):
        extend((k,), adj[k])
    return tuple(sorted(found, key=context_order_key))


def canonical_context_set(contexts: Iterable[Iterable[int]]) -> ContextSet:
    """Sort indices within contexts, drop duplicates, keep first-seen order."""
    seen = {}
    for c in contexts:
        c = tuple(sorted(set(int(k) for k in c)))
        if not c:
            raise ScenarioError("contexts must be nonempty")
        seen.setdefault(c, None)
    return tuple(seen)


def validate_context_set(scenario: Scenario, contexts: Iterable[Iterable[int]]) -> list:
    """Return every incompatible pair (or out-of-range index) found; empty means ok."""
    graph = compatibility_graph(scenario)
    problems = []
    for c in contexts:
        c = tuple(c)
        bad = [k for k in c if not 0 <= k < scenario.n]
        if bad:
            problems.extend(("out_of_range", k) for k in bad)
            continue
        for a, b in combinations(sorted(set(c)), 2):
            if not graph.adjacent(a, b):
                problems.append((a, b))
    return problems


def require_valid_contexts(scenario: Scenario, contexts) -> ContextSet:
    contexts = canonical_context_set(contexts)
    problems = validate_context_set(scenario, contexts)
    if problems:
        shown = ", ".join(
            f"{{{scenario.labels[a]},{scenario.labels[b]}}}" if a != "out_of_range" else f"index {b}"
            for a, b in problems
        )
        raise ScenarioError(f"invalid contexts, incompatible pairs: {shown}")
    return contexts


def context_operator(scenario: Scenario, context: Context) -> Matrix:
    """Product of the observables in ``context`` (ascending index order)."""
    context = tuple(context)
    if not context:
        raise ScenarioError("empty context")
    obs = scenario.observables
    for a, b in combinations(context, 2):
        if not commutes(obs[a], obs[b]):
            raise ScenarioError(f"context {scenario.label(context)} is not pairwise compatible")
    result = obs[context[0]]
    for k in context[1:]:
        result = mat_mul(result, obs[k])
    return result


def permute_scenario(scenario: Scenario, perm: Sequence[int]) -> Scenario:
    """New scenario whose observable ``i`` is the old observable ``perm[i]``."""
    return Scenario(scenario.dimension,
                    tuple(scenario.observables[p] for p in perm),
                    tuple(scenario.labels[p] for p in perm))


__all__ = [
    "CompatibilityGraph", "Context", "ContextSet", "Scenario", "ScenarioError",
    "canonical_context_set", "check_observable", "compatibility_graph", "context_operator",
    "dagger", "enumerate_contexts", "is_involution", "observable_from_vector",
    "permute_scenario", "require_valid_contexts", "validate_context_set",
]
