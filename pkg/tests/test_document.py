import json
from fractions import Fraction

import pytest

from sicineq.builtin_scenarios import peres_mermin_15, yu_oh
from sicineq.certify import table_inequality
from sicineq.document import (DocumentError, export_scenario, inequality_document,
                              parse_inequality_document, parse_scenario_document)


def test_yu_oh_round_trip():
    scenario, sets = yu_oh()
    text = export_scenario(scenario, sets["C_YO"])
    parsed, contexts = parse_scenario_document(text)
    assert parsed == scenario
    assert contexts == sets["C_YO"]


def test_matrix_round_trip_with_complex_entries():
    scenario, contexts = peres_mermin_15()
    parsed, _ = parse_scenario_document(export_scenario(scenario))
    assert parsed == scenario


def test_letter_aliases_and_projector_convention():
    doc = {"dimension": 3, "convention": "projector",
           "observables": [{"vector": [1, 0, 0]}] * 9 + [{"vector": ["0", "1", "0"]}],
           "contexts": [[1, "A"], ["A"]]}
    scenario, contexts = parse_scenario_document(json.dumps(doc))
    assert contexts == ((0, 9), (9,))
    assert scenario.observables[0][0][0] == 1  # projector sign


def test_inequality_document_round_trip():
    scenario, contexts, lam = table_inequality("opt3")
    text = inequality_document(scenario, contexts, lam, Fraction(75, 83))
    parsed_contexts, parsed_lam, eta = parse_inequality_document(text, scenario)
    assert parsed_contexts == contexts and parsed_lam == lam and eta == Fraction(75, 83)


@pytest.mark.parametrize("doc,field", [
    ("not json", "invalid JSON"),
    ("[]", "top level"),
    ('{"dimension": 0, "observables": []}', "dimension"),
    ('{"dimension": 2, "observables": []}', "observables"),
    ('{"dimension": 2, "observables": [{"vector": [1]}]}', "observables[0].vector"),
    ('{"dimension": 2, "observables": [{"vector": [0, 0]}]}', "observables[0]"),
    ('{"dimension": 2, "observables": [{"vector": ["x", 0]}]}', "observables[0].vector[0]"),
    ('{"dimension": 2, "observables": [{"matrix": [[0, 1], [0, 0]]}]}', "observables[0]"),
    ('{"dimension": 2, "observables": [{"matrix": [[2, 0], [0, 1]]}]}', "square to the identity"),
    ('{"dimension": 2, "observables": [{}]}', "needs 'vector' or 'matrix'"),
    ('{"dimension": 2, "observables": [{"vector": [1, 0]}], "labels": ["a", "b"]}', "labels"),
    ('{"dimension": 2, "observables": [{"vector": [1, 0]}], "contexts": [[3]]}', "out of range"),
    ('{"dimension": 2, "observables": [{"vector": [1, 0]}, {"vector": [1, 1]}],'
     ' "contexts": [[1, 2]]}', "incompatible"),
])
def test_malformed_documents_name_the_field(doc, field):
    with pytest.raises(DocumentError, match=field.replace("[", r"\[").replace("]", r"\]")):
        parse_scenario_document(doc)


def test_inequality_document_errors():
    scenario, _ = yu_oh()
    with pytest.raises(DocumentError, match="lambda"):
        parse_inequality_document('{"contexts": [[1]], "lambda": []}', scenario)
    with pytest.raises(DocumentError, match="lambda"):
        parse_inequality_document('{"contexts": [[1]], "lambda": ["1/x"]}', scenario)
