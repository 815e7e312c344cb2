import itertools

import numpy as np
import pytest

from frobenius_lab.core.config_manager import Limits
from frobenius_lab.core.errors import InvalidParameter, NotAGroup, NotAssociative, ResourceLimit
from frobenius_lab.core.rel import (
    TernaryRel,
    associativity_counterexample,
    cyclic_group_table,
    cyclic_relation,
    group_relation,
    is_associative_rel,
    klein_four_table,
    random_semigroup_relation,
    search_rel_frobenius,
    semigroup_relation,
    verify_rel_frobenius,
)


def naive_witnesses(rel):
    """Every pair of maps (l, r) checked directly against the definition."""
    n = rel.size
    found = []
    for l, r in itertools.product(itertools.permutations(range(n)), repeat=2):
        if any(r[l[x]] != x for x in range(n)):
            continue
        if all(((x, y, l[z]) in rel) == ((y, z, r[x]) in rel)
               for x, y, z in itertools.product(range(n), repeat=3)):
            found.append(l)
    return found


def test_empty_relation_is_associative():
    assert is_associative_rel(TernaryRel(2, frozenset()))


def test_single_triple_is_associative():
    # no triple starts with 1, so neither bracketing ever composes
    assert is_associative_rel(TernaryRel(2, frozenset({(0, 0, 1)})))


def test_non_associative_relation():
    rel = TernaryRel(2, frozenset({(0, 0, 1), (1, 0, 0)}))
    assert not is_associative_rel(rel)
    assert associativity_counterexample(rel) == (0, 0, 0, 0)


def test_triples_out_of_range():
    with pytest.raises(InvalidParameter):
        TernaryRel(2, frozenset({(0, 0, 2)}))
    with pytest.raises(InvalidParameter):
        TernaryRel(0, frozenset())


def test_z2_sum_relation_with_identity():
    rel = cyclic_relation(2)
    assert len(rel) == 4
    report = verify_rel_frobenius(rel, (0, 1), (0, 1))
    assert report.all_passed


def test_non_bijective_witness():
    rel = cyclic_relation(2)
    report = verify_rel_frobenius(rel, (0, 0), (0, 1))
    assert not report["l_bijection"].passed
    assert report["l_bijection"].counterexample == (1,)
    with pytest.raises(InvalidParameter):
        verify_rel_frobenius(rel, (0, 2), (0, 1))


def test_z3_sum_relation_satisfies_the_condition_but_not_associativity():
    rel = cyclic_relation(3)
    report = verify_rel_frobenius(rel, (0, 1, 2), (0, 1, 2))
    assert report["frobenius_condition"].passed
    assert report["mutual_inversion"].passed
    assert not report["associativity"].passed
    negation = (0, 2, 1)
    assert not verify_rel_frobenius(rel, negation, negation)["frobenius_condition"].passed
    with pytest.raises(NotAssociative):
        search_rel_frobenius(rel)


def test_empty_relation_accepts_every_permutation():
    witnesses = search_rel_frobenius(TernaryRel(2, frozenset()))
    assert [w.l for w in witnesses] == [(0, 1), (1, 0)]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_cyclic_group_relation(n):
    rel, l, r = group_relation(cyclic_group_table(n), 0)
    assert l == r == tuple((-z) % n for z in range(n))
    assert verify_rel_frobenius(rel, l, r).all_passed
    # with l = r = id the condition says exactly that R is closed under rotation
    cyclic = all(((y, z, x) in rel) == ((x, y, z) in rel) for x, y, z in rel.triples)
    assert cyclic == verify_rel_frobenius(rel, range(n), range(n)).all_passed


def test_cyclic_relation_is_rotation_invariant():
    for n in range(1, 7):
        rel = cyclic_relation(n)
        assert all((y, z, x) in rel for x, y, z in rel.triples)


def test_z4_witness():
    rel, l, r = group_relation(cyclic_group_table(4), 0)
    assert len(rel) == 16
    assert l == (0, 3, 2, 1)
    assert (l, r) in [(w.l, w.r) for w in search_rel_frobenius(rel)]


def test_klein_four_witness_is_identity():
    rel, l, r = group_relation(klein_four_table(), 0)
    assert l == r == (0, 1, 2, 3)
    assert verify_rel_frobenius(rel, l, r).all_passed


def test_group_relation_errors():
    with pytest.raises(NotAGroup):
        group_relation([[0, 0], [0, 0]], 0)
    with pytest.raises(NotAGroup):
        group_relation([[0, 0], [0, 1]], 0)
    with pytest.raises(NotAssociative):
        group_relation([[1, 0], [0, 0]], 0)
    with pytest.raises(InvalidParameter):
        group_relation(cyclic_group_table(3), 3)


def test_non_central_dualizer():
    # S3 as permutations of (0, 1, 2), composed left to right
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(q[p[x]] for x in range(3))] for q in perms] for p in perms]
    with pytest.raises(InvalidParameter):
        group_relation(table, index[(1, 0, 2)])
    rel, l, r = group_relation(table, index[(0, 1, 2)])
    assert verify_rel_frobenius(rel, l, r).all_passed


def test_search_matches_naive_oracle():
    relations = [TernaryRel(2, frozenset()), cyclic_relation(2)]
    relations += [group_relation(cyclic_group_table(n), 0).rel for n in (3, 4)]
    relations += [group_relation(klein_four_table(), 0).rel]
    relations += [random_semigroup_relation(n, seed).rel for n in (2, 3, 4) for seed in range(6)]
    for rel in relations:
        found = [w.l for w in search_rel_frobenius(rel)]
        assert found == naive_witnesses(rel)
        for w in search_rel_frobenius(rel):
            assert verify_rel_frobenius(rel, w.l, w.r).all_passed


def test_semigroup_without_witness():
    # left-zero band {(x, y, x)}: the condition would force r(l(z)) to equal every y
    rel = semigroup_relation(np.repeat(np.arange(3)[:, None], 3, axis=1))
    assert is_associative_rel(rel)
    assert search_rel_frobenius(rel) == []


def test_search_cap():
    with pytest.raises(ResourceLimit):
        search_rel_frobenius(cyclic_relation(3), Limits(rel_cap=2))


def test_random_instances_are_reproducible():
    first = random_semigroup_relation(4, seed=7)
    second = random_semigroup_relation(4, seed=7)
    assert first == second
    assert is_associative_rel(first.rel)
    assert sorted(first.relabeling) == [0, 1, 2, 3]


def test_random_instance_family():
    instance = random_semigroup_relation(3, seed=1, family="cyclic_group")
    assert instance.family == "cyclic_group"
    assert search_rel_frobenius(instance.rel)
    with pytest.raises(InvalidParameter):
        random_semigroup_relation(3, seed=1, family="free")
    with pytest.raises(InvalidParameter):
        random_semigroup_relation(0, seed=1)
