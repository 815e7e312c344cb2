import csv
import io

import pytest

from frobenius_lab.core.errors import NotALattice, SchemaError
from frobenius_lab.core.lattice import chain, m3, n5
from frobenius_lab.core.quantale import endo_quantale, frobenius_from_dualizing, meet_quantale, verify_frobenius
from frobenius_lab.core.rel import cyclic_relation, search_rel_frobenius
from frobenius_lab.core.serialization import (
    dumps,
    lattice_from_dict,
    lattice_to_dict,
    loads,
    quantale_from_dict,
    quantale_to_dict,
    rel_witness_from_dict,
    rel_witness_to_dict,
    relation_from_dict,
    relation_to_dict,
    report_from_dict,
    report_to_dict,
    supmap_from_dict,
    supmap_to_dict,
    sweep_rows_from_list,
    sweep_rows_to_csv,
    sweep_rows_to_list,
    tensor_element_from_list,
    tensor_element_to_list,
    tight_quantale_from_dict,
    tight_quantale_to_dict,
    witness_from_dict,
    witness_to_dict,
)
from frobenius_lab.core.slatt import one_step, tensor_lattice
from frobenius_lab.core.theorems import SweepRow, tight_frobenius


def test_lattice_document():
    data = lattice_to_dict(chain(4))
    assert data == {"size": 4, "covers": [[0, 1], [1, 2], [2, 3]], "name": "chain(4)"}
    assert dumps(data) == '{"covers":[[0,1],[1,2],[2,3]],"name":"chain(4)","size":4}'
    again = lattice_from_dict(loads(dumps(data)))
    assert again == chain(4)
    assert again.name == "chain(4)"


def test_tight_quantale_of_m3_is_stable():
    tight = tight_frobenius(m3())
    text = dumps(tight_quantale_to_dict(tight))
    again = tight_quantale_from_dict(loads(text))
    assert dumps(tight_quantale_to_dict(again)) == text
    assert again.quantale.unit is None
    assert again.negation == tight.negation
    assert again.report.all_passed


def test_quantale_document_keeps_unit():
    quantale = endo_quantale(n5())
    again = quantale_from_dict(loads(dumps(quantale_to_dict(quantale))))
    assert again.unit == quantale.unit
    assert again.carrier == quantale.carrier
    assert (again.mult == quantale.mult).all()


def test_supmap_and_tensor_documents():
    lattice = m3()
    f = one_step(lattice, 1, 2)
    assert supmap_from_dict(loads(dumps(supmap_to_dict(f)))) == f
    tensor = tensor_lattice(n5(), m3())
    for element in tensor:
        assert tensor_element_from_list(tensor, tensor_element_to_list(element)) == element


def test_witness_and_report_documents():
    quantale = meet_quantale(chain(2))
    witness = frobenius_from_dualizing(quantale, 0)
    assert witness_from_dict(witness_to_dict(witness)) == witness
    report = verify_frobenius(quantale, witness.l, witness.r)
    assert report_from_dict(loads(dumps(report_to_dict(report)))) == report


def test_relation_documents():
    rel = cyclic_relation(3)
    data = relation_to_dict(rel)
    assert data["triples"] == sorted(data["triples"])
    assert relation_from_dict(data) == rel
    group_witness = rel_witness_from_dict({"l": [0, 2, 1]})
    assert group_witness.r == (0, 2, 1)
    assert rel_witness_to_dict(group_witness) == {"l": [0, 2, 1]}
    witness = search_rel_frobenius(relation_from_dict({"size": 2, "triples": []}))[1]
    assert rel_witness_from_dict(rel_witness_to_dict(witness)) == witness


@pytest.mark.parametrize("document, path", [
    ([1, 2], "$"),
    ({"covers": []}, "$.size"),
    ({"size": "3", "covers": []}, "$.size"),
    ({"size": True, "covers": []}, "$.size"),
    ({"size": 0, "covers": []}, "$.size"),
    ({"size": 3}, "$.covers"),
    ({"size": 3, "covers": [[0, 1], [1, 2], [2, 0]]}, "$.covers"),
    ({"size": 3, "covers": [[0, 1], [1, 5]]}, "$.covers[1][1]"),
    ({"size": 3, "covers": [[0, 1, 2]]}, "$.covers[0]"),
    ({"size": 2, "covers": [[0, 1]], "name": 7}, "$.name"),
])
def test_lattice_schema_errors(document, path):
    with pytest.raises(SchemaError) as excinfo:
        lattice_from_dict(document)
    assert excinfo.value.path == path


def test_covers_that_are_not_a_lattice():
    with pytest.raises(NotALattice):
        lattice_from_dict({"size": 2, "covers": []})


def test_malformed_json():
    with pytest.raises(SchemaError) as excinfo:
        loads('{"size": 3,')
    assert excinfo.value.path == "$"
    assert "malformed JSON" in str(excinfo.value)


def test_quantale_schema_errors():
    data = quantale_to_dict(meet_quantale(chain(3)))
    assert data["unit"] == 2
    with pytest.raises(SchemaError) as excinfo:
        quantale_from_dict({**data, "unit": 1})
    assert excinfo.value.path == "$.unit"
    with pytest.raises(SchemaError) as excinfo:
        quantale_from_dict({**data, "mult": [[0, 0, 0], [0, 1, 3], [0, 1, 2]]})
    assert excinfo.value.path == "$.mult[1][2]"
    with pytest.raises(SchemaError) as excinfo:
        quantale_from_dict({**data, "mult": [[0, 0, 0], [0, 2, 1], [0, 1, 1]]})
    assert excinfo.value.path == "$.mult"


def test_other_schema_errors():
    tensor = tensor_lattice(chain(2), chain(2))
    with pytest.raises(SchemaError):
        # (1, 1) without the pairs below it
        tensor_element_from_list(tensor, [[1, 1]])
    with pytest.raises(SchemaError) as excinfo:
        witness_from_dict({"l": [0, 1], "r": [1, 0], "origin": "guessed"})
    assert excinfo.value.path == "$.origin"
    with pytest.raises(SchemaError) as excinfo:
        rel_witness_from_dict({"l": [0, 0]})
    assert excinfo.value.path == "$.l"
    with pytest.raises(SchemaError) as excinfo:
        relation_from_dict({"size": 2, "triples": [[0, 0, 2]]})
    assert excinfo.value.path == "$.triples[0][2]"


def test_sweep_rows_csv():
    rows = [
        SweepRow("00", "chain(2)", 2, distributive=True, nuclear=True, pseudo_affine=True),
        SweepRow("01", "N5", 5, distributive=False, error="ResourceLimit: cap"),
    ]
    text = sweep_rows_to_csv(rows)
    parsed = list(csv.reader(io.StringIO(text)))
    assert parsed[0] == SweepRow.columns()
    assert len(parsed) == 3
    first = dict(zip(parsed[0], parsed[1]))
    assert first["distributive"] == "true"
    assert first["completely_distributive"] == ""
    assert first["error"] == ""
    second = dict(zip(parsed[0], parsed[2]))
    assert second["distributive"] == "false"
    assert second["size"] == "5"
    assert second["error"] == "ResourceLimit: cap"


def test_sweep_rows_list():
    rows = [SweepRow("00", "chain(2)", 2, distributive=True)]
    assert sweep_rows_from_list(loads(dumps(sweep_rows_to_list(rows)))) == rows
    with pytest.raises(SchemaError) as excinfo:
        sweep_rows_from_list([{"name": "x"}])
    assert excinfo.value.path == "$[0]"
    with pytest.raises(SchemaError):
        sweep_rows_from_list({"rows": []})
