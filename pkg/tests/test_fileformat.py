import json

import pytest
from hypothesis import given, strategies as st

from subrank_gap.classifier import classify
from subrank_gap.corpus import named
from subrank_gap.degeneration import RestrictionCertificate, verify_certificate
from subrank_gap.errors import ParseError
from subrank_gap.fields import ExtensionField, PrimeField, Rationals
from subrank_gap.fileformat import (dump_certificate, dump_space, dump_tensor, parse_certificate,
                                    parse_document, parse_space, parse_tensor)
from subrank_gap.linalg import MatrixSpace
from subrank_gap.tensor import Tensor3, slice_space

FIELDS = [PrimeField(101), PrimeField(2), Rationals(), ExtensionField(2, 3), ExtensionField(3, 2)]
NAMES = ["I", "W", "D", "N1", "N3", "Diag(3)"]


@pytest.mark.parametrize("field", FIELDS, ids=lambda f: f.name)
@pytest.mark.parametrize("name", NAMES)
def test_tensor_round_trip(field, name):
    t = named(name, field)
    text = dump_tensor(t)
    assert parse_tensor(text) == t
    assert parse_document(text) == t
    assert dump_tensor(parse_tensor(text)) == text


@pytest.mark.parametrize("field", FIELDS, ids=lambda f: f.name)
def test_space_round_trip(field):
    s = slice_space(named("D", field), 1)
    back = parse_space(dump_space(s))
    assert isinstance(back, MatrixSpace)
    assert back.basis == s.basis


@given(st.lists(st.fractions(-100, 100, max_denominator=20),
                min_size=12, max_size=12))
def test_rational_tensor_round_trip(xs):
    q = Rationals()
    t = Tensor3((2, 3, 2), tuple(xs), q)
    assert parse_tensor(dump_tensor(t)) == t


@pytest.mark.parametrize("name", ["W", "D", "N2", "Diag(3)"])
def test_certificate_round_trip(name):
    t = named(name)
    g = classify(t)
    for rec in g.certificates:
        cert, source = parse_certificate(dump_certificate(rec.certificate, rec.source, rec.label))
        assert source == rec.source
        src = t if source == "input" else named(source)
        assert verify_certificate(src, cert)


def tensor_text(entries, dims=(2, 2, 2), field="GF(5)"):
    return json.dumps({"kind": "tensor", "field": field, "dims": list(dims), "entries": entries},
                      indent=1)


def parse_error(text):
    with pytest.raises(ParseError) as info:
        parse_tensor(text)
    return info.value


def test_malformed_json_reports_position():
    err = parse_error('{\n "kind": "tensor",\n "dims": [2, 2\n}')
    assert err.line == 4


def test_out_of_range_index_reports_position():
    text = tensor_text([[1, 1, 1, "1"], [1, 3, 1, "2"]])
    err = parse_error(text)
    assert err.line is not None
    line = text.splitlines()[err.line - 1]
    # the position points at the opening bracket of the second entry
    openers = [n + 1 for n, line in enumerate(text.splitlines()) if line == "  ["]
    assert (err.line, err.column) == (openers[1], 3)


def test_duplicate_coordinate_rejected():
    err = parse_error(tensor_text([[1, 1, 1, "1"], [1, 1, 1, "2"]]))
    assert "duplicate" in str(err).lower()


@pytest.mark.parametrize("text", [
    tensor_text([[1, 1, 1, "x"]]),
    tensor_text([[0, 1, 1, "1"]]),
    tensor_text([[1, 1, "1"]]),
    tensor_text([], dims=(2, 2)),
    tensor_text([], field="GF(6)"),
    tensor_text([], field="GF(2^0)"),
    '{"kind": "tensor", "dims": [1, 1, 1], "entries": []}',
    "[1, 2, 3]",
])
def test_invalid_documents(text):
    parse_error(text)


def test_rationals_accept_fractions():
    t = parse_tensor(tensor_text([[1, 1, 1, "-3/4"], [2, 2, 2, 5]], field="Q"))
    q = Rationals()
    assert t[0, 0, 0] == q.coerce("-3/4") and t[1, 1, 1] == 5


def test_unknown_kind():
    with pytest.raises(ParseError):
        parse_document('{"kind": "banana", "field": "Q"}')


def test_certificate_type_checked():
    t = named("W")
    cert = RestrictionCertificate(classify(t).certificates[0].certificate.maps, t, "")
    doc = json.loads(dump_certificate(cert))
    doc["type"] = "other"
    with pytest.raises(ParseError):
        parse_certificate(json.dumps(doc))
