import numpy as np
import pytest

from frobenius_lab.core.config_manager import Limits
from frobenius_lab.core.errors import NotTight
from frobenius_lab.core.lattice import boolean, chain, enumerate_lattices, is_distributive, m3, n5, op, singleton
from frobenius_lab.core.quantale import BracketedMagma, dualizing_elements, endo_quantale, verify_frobenius
from frobenius_lab.core.slatt import (
    SupMap,
    apply_mix,
    compose,
    hom_lattice,
    identity,
    is_nuclear,
    mix,
    one_step,
    tensor_lattice,
)
from frobenius_lab.core.theorems import (
    EQUIVALENT_COLUMNS,
    SweepRow,
    endo_frobenius,
    pseudo_affine_witness,
    sweep_row,
    tensor_mult,
    tensor_pairing,
    tight_frobenius,
    tight_maps,
    tight_pairing,
)


def test_tight_maps_of_chain_are_all_endomaps():
    lattice = chain(3)
    tight = tight_maps(lattice)
    assert len(tight) == len(hom_lattice(lattice, lattice)) == 6
    assert tight.quantale.unit is not None


def test_identity_of_m3_is_not_tight():
    lattice = m3()
    tight = tight_maps(lattice)
    assert tight.quantale.unit is None
    assert not tight.contains(identity(lattice))
    assert tight.contains(one_step(lattice, 1, 2))
    with pytest.raises(NotTight):
        tight_pairing(lattice, identity(lattice), one_step(lattice, 1, 2))


def test_tight_maps_are_the_image_of_mix():
    for lattice in list(enumerate_lattices(4)) + [m3(), n5()]:
        hom = hom_lattice(lattice, lattice)
        image = {hom[i].values for i in mix(lattice).values}
        tight = tight_maps(lattice)
        assert image == {tuple(row) for row in tight.maps.values.tolist()}, lattice.name


def test_tight_maps_closed_under_composition():
    lattice = n5()
    tight = tight_maps(lattice)
    for i, f in enumerate(tight.maps):
        for k, g in enumerate(tight.maps):
            assert tight.maps[tight.quantale.mul(i, k)] == compose(f, g)


def test_tight_pairing_on_one_steps():
    lattice = m3()
    f = one_step(lattice, 1, 2)
    # f(2) = 2 is not below 1
    assert tight_pairing(lattice, f, f)
    # h vanishes on everything below 1, including its own values
    h = one_step(lattice, 1, 1)
    assert not tight_pairing(lattice, h, h)
    zero = one_step(lattice, lattice.top, lattice.top)
    assert not tight_pairing(lattice, zero, f)
    assert not tight_pairing(lattice, f, zero)


def test_tight_frobenius_on_every_small_lattice():
    for lattice in enumerate_lattices(5):
        tight = tight_frobenius(lattice)
        assert tight.report.all_passed, (lattice.name, tight.report.failed())
        assert tight.negation_well_defined, lattice.name
        assert tight.negation.cyclic


@pytest.mark.parametrize("lattice", [m3(), n5()], ids=lambda lattice: lattice.name)
def test_tight_frobenius_without_distributivity(lattice):
    tight = tight_frobenius(lattice)
    assert tight.report.all_passed
    assert tight.quantale.unit is None
    assert verify_frobenius(tight.quantale, tight.negation.l, tight.negation.r).all_passed


def test_tight_negation_is_residuation_into_dualizer():
    for lattice in enumerate_lattices(5):
        if not is_distributive(lattice):
            continue
        tight = tight_frobenius(lattice)
        endo = endo_quantale(lattice)
        l = tight.negation.l
        dualizer = l[tight.quantale.unit]
        assert all(l[f] == endo.over[dualizer, f] for f in range(len(tight))), lattice.name
        assert dualizer in [d.element for d in dualizing_elements(endo)], lattice.name


def test_endo_frobenius():
    assert endo_frobenius(m3()) is None
    witness = endo_frobenius(boolean(2))
    assert witness is not None
    assert verify_frobenius(endo_quantale(boolean(2)), witness.l, witness.r).all_passed


def test_pseudo_affine_witness():
    assert pseudo_affine_witness(singleton()) is None
    two = chain(2)
    for lattice in enumerate_lattices(6):
        if lattice.size == 1:
            continue
        p, c, coatom = pseudo_affine_witness(lattice)
        assert compose(p, c) == identity(two)
        assert coatom != lattice.top
        assert isinstance(p, SupMap) and isinstance(c, SupMap)


def test_sweep_row_on_distributive_and_not():
    good = sweep_row(boolean(2))
    assert all(getattr(good, column) for column in EQUIVALENT_COLUMNS)
    assert good.tight_frobenius_ok and good.pseudo_affine
    assert good.consistent and good.complete

    bad = sweep_row(n5())
    assert not any(getattr(bad, column) for column in EQUIVALENT_COLUMNS)
    assert bad.tight_frobenius_ok
    assert bad.consistent


def test_sweep_row_singleton():
    row = sweep_row(singleton())
    assert all(getattr(row, column) for column in EQUIVALENT_COLUMNS)
    assert row.pseudo_affine is False


def test_sweep_row_stops_at_resource_limit():
    row = sweep_row(chain(5), Limits(hom_cap=20))
    assert row.error.startswith("ResourceLimit")
    assert row.distributive is True
    assert row.nuclear is None
    assert not row.complete
    assert row.consistent


def test_sweep_row_consistency_rules():
    base = dict(code="", name="x", size=3)
    assert SweepRow(**base, distributive=True, nuclear=True).consistent
    assert not SweepRow(**base, distributive=True, nuclear=False).consistent
    assert not SweepRow(**base, distributive=True, tight_frobenius_ok=False).consistent
    assert not SweepRow(**base, error="ValueError: boom").consistent
    assert SweepRow(**base, error="ResourceLimit: cap").consistent


def test_sweep_row_columns():
    columns = SweepRow.columns()
    assert columns[:3] == ["code", "name", "size"]
    assert set(EQUIVALENT_COLUMNS) <= set(columns)
    assert set(sweep_row(chain(2)).as_dict()) == set(columns)


def test_nuclear_matches_distributive_up_to_six():
    for lattice in enumerate_lattices(6):
        assert is_nuclear(lattice) == is_distributive(lattice), lattice.name


def test_tight_pairing_is_symmetric():
    for lattice in list(enumerate_lattices(5)) + [m3(), n5()]:
        pairing = tight_maps(lattice).pairing
        assert np.array_equal(pairing, pairing.T), lattice.name


@pytest.mark.parametrize("lattice", [m3(), n5()], ids=lambda lattice: lattice.name)
def test_tensor_pairing_descends_to_tight_maps(lattice):
    tensor = tensor_lattice(op(lattice), lattice)
    tight = tight_maps(lattice)
    n = len(tensor)
    mult = [[tensor.index_of(tensor_mult(tensor, d1, d2)) for d2 in tensor] for d1 in tensor]
    pairing = [[tensor_pairing(tensor, d1, d2) for d2 in tensor] for d1 in tensor]
    magma = BracketedMagma(mult, pairing)
    assert magma.is_associative()
    epi = [tight.maps.index_of(apply_mix(lattice, d)) for d in tensor]
    assert len(set(epi)) == len(tight) < n
    quotient = magma.quotient(epi, tight.quantale.mult)
    assert np.array_equal(quotient.pairing, tight.pairing)
    assert quotient.is_associative()
