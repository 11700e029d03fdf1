import json
from importlib.resources import files

import pytest
from hypothesis import given

from artifact.core import GradedSpace
from artifact.document import (DocumentError, canonical_json, cdga_of, cyclic_of, dgla_of, document_from_structure,
                               parse, sdr_of, serialize, structure_of)
from artifact.linfty import check_mc, structure_from_brackets
from artifact.unimodular import lie_unimodular

from conftest import graded_spaces, seeds

DATA = files("artifact") / "data"


def raw(name):
    return (DATA / name).read_bytes()


def doc(**extra):
    base = {"schema": 1, "space": {"generators": [{"name": "x", "parity": 0}, {"name": "y", "parity": 0}]}}
    base.update(extra)
    return json.dumps(base)


def code_of(text):
    with pytest.raises(DocumentError) as info:
        parse(text)
    return info.value.code, info.value.where


@pytest.mark.parametrize("name", ["nonunimodular.json", "heisenberg.json"])
def test_shipped_documents_round_trip(name):
    data = raw(name)
    d = parse(data)
    assert serialize(d) == data
    assert serialize(document_from_structure(structure_of(d))) == data


def test_nonunimodular_document():
    s = structure_of(parse(raw("nonunimodular.json")), check=True)
    assert check_mc(s.m, s.complex).accepted
    assert not lie_unimodular(s)


def test_empty_generators_is_the_zero_space():
    d = parse('{"schema": 1, "space": {"generators": []}}')
    assert d.space.dim == 0
    assert structure_of(d).space.dim == 0


def test_error_codes():
    assert code_of(b"\xff\xfe") == ("E_ENCODING", "byte 0")
    assert code_of('{"schema": 1,')[0] == "E_JSON"
    assert code_of('[]') == ("E_SCHEMA", "$")
    assert code_of('{"schema": 2, "space": {"generators": []}}') == ("E_VERSION", "$.schema")
    assert code_of(doc(extra=1)) == ("E_UNKNOWN_FIELD", "$.extra")
    assert code_of('{"schema": 1, "schema": 1, "space": {"generators": []}}')[0] == "E_DUPLICATE"
    assert code_of(doc(structure=[{"inputs": ["x", "y"], "output": {"y": "1/0"}}])) == \
        ("E_RATIONAL", "$.structure[0].output.y")
    assert code_of(doc(structure=[{"inputs": ["x", "y"], "output": {"y": 1}}]))[0] == "E_RATIONAL"
    assert code_of(doc(structure=[{"inputs": ["x", "q"], "output": {"y": "1"}}])) == \
        ("E_UNDECLARED", "$.structure[0].inputs[1]")
    assert code_of(doc(differential=[{"input": "x", "output": {"y": "1"}}])) == \
        ("E_PARITY", "$.differential[0].output.y")
    assert code_of(doc(structure=[{"inputs": ["x", "y", "y"], "output": {"y": "1"}}]))[0] == "E_PARITY"
    bad_jacobi = json.dumps({
        "schema": 1,
        "space": {"generators": [{"name": n, "parity": 0} for n in "xyz"]},
        "structure": [{"inputs": ["x", "y"], "output": {"y": "1"}}, {"inputs": ["x", "z"], "output": {"z": "1"}},
                      {"inputs": ["y", "z"], "output": {"x": "1"}}]})
    with pytest.raises(DocumentError) as info:
        structure_of(parse(bad_jacobi), check=True)
    assert info.value.code == "E_ALGEBRA"


def test_error_reports_are_structured():
    try:
        parse(doc(structure=[{"inputs": ["x"], "output": {"y": "1"}}]))
    except DocumentError as exc:
        assert exc.as_dict() == {"code": "E_SCHEMA", "where": "$.structure[0].inputs",
                                 "message": "brackets need at least two inputs"}


def test_canonical_form_is_order_independent():
    a = doc(structure=[{"output": {"y": "2/4"}, "inputs": ["y", "x"]}])
    b = json.dumps({"structure": [{"inputs": ["y", "x"], "output": {"y": "1/2"}}], "schema": 1,
                    "space": {"generators": [{"parity": 0, "name": "x"}, {"name": "y", "parity": 0}]}})
    assert serialize(parse(a)) == serialize(parse(b))
    assert canonical_json({"b": 1, "a": "θ"}) == '{\n  "a": "θ",\n  "b": 1\n}\n'


def test_optional_blocks():
    text = json.dumps({
        "schema": 1,
        "space": {"generators": [{"name": "1", "parity": 0}, {"name": "w", "parity": 0}]},
        "pairing": {"parity": 0, "entries": [{"left": "1", "right": "w", "value": "1"}]},
        "cdga": {"unit": "1", "product": [{"inputs": ["1", "1"], "output": {"1": "1"}},
                                          {"inputs": ["1", "w"], "output": {"w": "1"}}]},
    })
    d = parse(text)
    A = cdga_of(d)
    assert A.euler_characteristic == 2 and A.pairing.nondegenerate
    assert cyclic_of(d).parity == 0
    assert serialize(parse(serialize(d))) == serialize(d)


def test_sdr_block():
    text = json.dumps({
        "schema": 1,
        "space": {"generators": [{"name": "c", "parity": 0}, {"name": "a", "parity": 0},
                                 {"name": "b", "parity": 1}]},
        "differential": [{"input": "a", "output": {"b": "1"}}],
        "sdr": {"space": {"generators": [{"name": "k", "parity": 0}]},
                "i": [{"input": "k", "output": {"c": "1"}}],
                "p": [{"input": "c", "output": {"k": "1"}}],
                "s": [{"input": "b", "output": {"a": "1"}}]},
    })
    from artifact.gauge import is_sdr

    assert is_sdr(sdr_of(parse(text)))
    clash = json.loads(text)
    clash["sdr"]["space"]["generators"][0]["name"] = "c"
    assert code_of(json.dumps(clash))[0] == "E_DUPLICATE"


def test_dgla_document():
    text = json.dumps({
        "schema": 1,
        "space": {"generators": [{"name": "e", "parity": 0}, {"name": "u", "parity": 1}]},
        "differential": [{"input": "e", "output": {"u": "1"}}],
        "structure": [{"inputs": ["e", "u"], "output": {"u": "0"}}],
    })
    g = dgla_of(parse(text))
    # abelian: g² = 0
    assert g.nilpotency_index() == 2
    assert g.cohomology() == (0, 0)


@given(graded_spaces(max_even=2, max_odd=2), seeds)
def test_structures_round_trip_through_documents(V, seed):
    import random

    rng = random.Random(seed)
    table = {}
    for a in range(V.dim):
        for b in range(a, V.dim):
            if a == b and V.parity(a) == 0:
                continue
            for k in range(V.dim):
                if (V.parity(a) + V.parity(b) + V.parity(k)) % 2 == 0 and rng.random() < 0.3:
                    table.setdefault((a, b), {})[k] = rng.randint(-3, 3)
    s = structure_from_brackets(V, table, check=False)
    d = document_from_structure(s)
    again = parse(serialize(d))
    assert serialize(again) == serialize(d)
    assert structure_of(again).m.agrees_with(s.m)
