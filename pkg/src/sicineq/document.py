"""JSON scenario and inequality documents.

Scenario document::

    {
      "dimension": 3,
      "labels": ["1", "2", ...],                       # optional
      "convention": "complement",                      # optional, or "projector"
      "observables": [{"vector": ["1", "0", "0"]},
                      {"matrix": [["1", "0"], ["0", "-1"]]}, ...],
      "contexts": [[1, 2], [4, "A"], ...]              # optional, 1-based
    }

Numbers are strings (``"p/q"``, decimals, ``"a+b*i"``) or integers and are
read exactly.  Context entries are 1-based indices, observable labels, or
letters (``A`` = 10, ``B`` = 11, ...).
"""
from __future__ import annotations

import json
from fractions import Fraction

from .exact import format_fraction, parse_complex, parse_rational
from .scenario import (Scenario, ScenarioError, canonical_context_set, check_observable,
                       observable_from_vector, validate_context_set)


class DocumentError(ValueError):
    """Malformed document; the message names the offending field."""


def _complex_text(z) -> str:
    if z.im == 0:
        return format_fraction(z.re)
    im = format_fraction(abs(z.im))
    sign = "-" if z.im < 0 else "+"
    if z.re == 0:
        return f"{'-' if z.im < 0 else ''}{im}*i"
    return f"{format_fraction(z.re)}{sign}{im}*i"


def _number(value, where: str):
    try:
        return parse_complex(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"{where}: {exc}") from None


def resolve_observable(token, scenario: Scenario, where: str) -> int:
    """1-based index, label, or letter alias -> 0-based index."""
    text = str(token).strip()
    if text in scenario.labels and not text.isdigit():
        return scenario.labels.index(text)
    if text.isdigit():
        k = int(text) - 1
    elif len(text) == 1 and text.isalpha():
        k = 9 + ord(text.upper()) - ord("A")
    else:
        raise DocumentError(f"{where}: unknown observable {token!r}")
    if not 0 <= k < scenario.n:
        raise DocumentError(f"{where}: observable index {token!r} out of range 1..{scenario.n}")
    return k


def parse_contexts(entries, scenario: Scenario, where: str = "contexts"):
    if not isinstance(entries, list):
        raise DocumentError(f"{where}: expected a list of index lists")
    out = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, list) or not entry:
            raise DocumentError(f"{where}[{i}]: expected a nonempty list")
        out.append([resolve_observable(t, scenario, f"{where}[{i}]") for t in entry])
    contexts = canonical_context_set(out)
    problems = validate_context_set(scenario, contexts)
    if problems:
        pairs = ", ".join(f"{{{scenario.labels[a]},{scenario.labels[b]}}}" for a, b in problems)
        raise DocumentError(f"{where}: incompatible pairs {pairs}")
    return contexts


def parse_scenario_document(text: str):
    """Parse a scenario document into ``(Scenario, contexts or None)``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise DocumentError("top level must be an object")
    dim = doc.get("dimension")
    if not isinstance(dim, int) or dim < 1:
        raise DocumentError("dimension: expected a positive integer")
    convention = doc.get("convention", "complement")
    specs = doc.get("observables")
    if not isinstance(specs, list) or not specs:
        raise DocumentError("observables: expected a nonempty list")
    observables, vectors = [], []
    for k, spec in enumerate(specs):
        where = f"observables[{k}]"
        if not isinstance(spec, dict):
            raise DocumentError(f"{where}: expected an object")
        if "vector" in spec:
            comps = spec["vector"]
            if not isinstance(comps, list) or len(comps) != dim:
                raise DocumentError(f"{where}.vector: expected {dim} components")
            vec = tuple(_number(x, f"{where}.vector[{i}]") for i, x in enumerate(comps))
            try:
                observables.append(observable_from_vector(vec, spec.get("convention", convention)))
            except ScenarioError as exc:
                raise DocumentError(f"{where}: {exc}") from None
            vectors.append(vec)
        elif "matrix" in spec:
            rows = spec["matrix"]
            if not isinstance(rows, list) or len(rows) != dim or any(
                    not isinstance(r, list) or len(r) != dim for r in rows):
                raise DocumentError(f"{where}.matrix: expected {dim}x{dim} entries")
            mat = tuple(tuple(_number(x, f"{where}.matrix[{i}][{j}]") for j, x in enumerate(r))
                        for i, r in enumerate(rows))
            try:
                observables.append(check_observable(mat, where))
            except ScenarioError as exc:
                raise DocumentError(str(exc)) from None
            vectors.append(None)
        else:
            raise DocumentError(f"{where}: needs 'vector' or 'matrix'")
    labels = doc.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != len(specs)):
        raise DocumentError("labels: expected one label per observable")
    has_vectors = all(v is not None for v in vectors)
    scenario = Scenario(dim, tuple(observables), tuple(labels) if labels else None,
                        tuple(vectors) if has_vectors else None)
    contexts = None
    if "contexts" in doc:
        contexts = parse_contexts(doc["contexts"], scenario)
    return scenario, contexts


def export_scenario(scenario: Scenario, contexts=None) -> str:
    doc = {"dimension": scenario.dimension, "labels": list(scenario.labels)}
    if scenario.vectors is not None:
        doc["observables"] = [{"vector": [_complex_text(x) for x in v]} for v in scenario.vectors]
    else:
        doc["observables"] = [{"matrix": [[_complex_text(x) for x in row] for row in m]}
                              for m in scenario.observables]
    if contexts is not None:
        doc["contexts"] = [[scenario.labels[k] for k in c] for c in contexts]
    return json.dumps(doc, indent=1)


def parse_inequality_document(text: str, scenario: Scenario):
    """``{"contexts": [...], "lambda": ["p/q", ...], "eta": "p/q"?}`` -> (contexts, lam, eta)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    contexts = parse_contexts(doc.get("contexts"), scenario)
    raw = doc.get("lambda")
    if not isinstance(raw, list) or len(raw) != len(doc["contexts"]):
        raise DocumentError("lambda: expected one coefficient per listed context")
    try:
        lam_by_ctx = {}
        for entry, value in zip(doc["contexts"], raw):
            key = tuple(sorted(resolve_observable(t, scenario, "contexts") for t in entry))
            lam_by_ctx[key] = parse_rational(value)
        eta = parse_rational(doc["eta"]) if doc.get("eta") is not None else None
    except ValueError as exc:
        raise DocumentError(f"lambda: {exc}") from None
    lam = tuple(lam_by_ctx[c] for c in contexts)
    return contexts, lam, eta


def inequality_document(scenario: Scenario, contexts, lam, eta=None) -> str:
    doc = {"contexts": [[scenario.labels[k] for k in c] for c in contexts],
           "lambda": [format_fraction(Fraction(x)) for x in lam]}
    if eta is not None:
        doc["eta"] = format_fraction(Fraction(eta))
    return json.dumps(doc, indent=1)
