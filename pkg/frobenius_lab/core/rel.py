"""Frobenius structures in the category of sets and relations.

A monoid object there is an associative ternary relation ``R`` on a finite set
``X``. A Frobenius structure is a permutation ``l`` with inverse ``r`` such that
``(x, y, l(z)) in R`` iff ``(y, z, r(x)) in R`` for all ``x, y, z``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from frobenius_lab.core.config_manager import DEFAULT_LIMITS
from frobenius_lab.core.errors import InvalidParameter, NotAGroup, NotAssociative, ResourceLimit
from frobenius_lab.core.log_manager import get_logger
from frobenius_lab.core.quantale import CheckResult, LawReport

logger = get_logger("frobenius_lab.rel")


@dataclass(frozen=True)
class TernaryRel:
    """A set of triples over ``{0, ..., size - 1}``."""
    size: int
    triples: frozenset

    def __post_init__(self):
        if self.size < 1:
            raise InvalidParameter(f"universe must be non-empty, got size {self.size}")
        object.__setattr__(self, "triples", frozenset(tuple(int(v) for v in t) for t in self.triples))
        for t in self.triples:
            if len(t) != 3 or not all(0 <= v < self.size for v in t):
                raise InvalidParameter(f"triple {t} out of range for size {self.size}")

    @cached_property
    def cube(self):
        """``cube[x, y, z]`` is membership of ``(x, y, z)``."""
        cube = np.zeros((self.size,) * 3, dtype=bool)
        for x, y, z in self.triples:
            cube[x, y, z] = True
        cube.setflags(write=False)
        return cube

    def __contains__(self, triple):
        return tuple(triple) in self.triples

    def __len__(self):
        return len(self.triples)


@dataclass(frozen=True)
class RelWitness:
    l: tuple
    r: tuple


def associativity_counterexample(rel):
    """The first ``(x, y, z, w)`` where the two bracketings differ, or None."""
    n = rel.size
    cube = rel.cube.astype(np.int64)
    # left[x, y, z, w]: some u with (x, y, u) and (u, z, w)
    left = (cube.reshape(n * n, n) @ cube.reshape(n, n * n)).reshape(n, n, n, n) > 0
    # right[x, y, z, w]: some v with (y, z, v) and (x, v, w)
    right = np.einsum("yzv,xvw->xyzw", cube, cube) > 0
    if np.array_equal(left, right):
        return None
    return tuple(int(i) for i in np.argwhere(left != right)[0])


def is_associative_rel(rel):
    return associativity_counterexample(rel) is None


def _bijection_check(name, perm, n):
    if sorted(perm.tolist()) == list(range(n)):
        return CheckResult(name, True)
    seen = set()
    for x, v in enumerate(perm.tolist()):
        if v in seen:
            return CheckResult(name, False, (x,))
        seen.add(v)
    return CheckResult(name, False, None)


def verify_rel_frobenius(rel, l, r):
    """Checks bijectivity, mutual inversion, associativity and the defining equivalence.

    Raises:
        InvalidParameter: If ``l`` or ``r`` is not a function on the universe.
    """
    n = rel.size
    l = np.asarray(l, dtype=np.int64)
    r = np.asarray(r, dtype=np.int64)
    for name, f in (("l", l), ("r", r)):
        if f.shape != (n,) or f.min() < 0 or f.max() >= n:
            raise InvalidParameter(f"{name} must map the {n} points into the universe")
    idx = np.arange(n)
    cube = rel.cube
    inverse = (r[l] == idx) & (l[r] == idx)
    counterexample = associativity_counterexample(rel)
    # [x, y, z]: (x, y, l(z)) in R against (y, z, r(x)) in R
    equivalence = cube[:, :, l] == cube[:, :, r].transpose(2, 0, 1)
    return LawReport((
        _bijection_check("l_bijection", l, n),
        _bijection_check("r_bijection", r, n),
        CheckResult("mutual_inversion", bool(inverse.all()),
                    None if inverse.all() else (int(np.flatnonzero(~inverse)[0]),)),
        CheckResult("associativity", counterexample is None, counterexample),
        CheckResult("frobenius_condition", bool(equivalence.all()),
                    None if equivalence.all() else tuple(int(i) for i in np.argwhere(~equivalence)[0])),
    ))


def search_rel_frobenius(rel, limits=DEFAULT_LIMITS):
    """Every witness ``(l, l^-1)``, in lexicographic order of ``l``.

    ``l`` is assigned point by point; after each assignment every triple whose
    ``l(z)`` and ``r(x)`` are both known is checked.

    Raises:
        ResourceLimit: If the universe exceeds ``limits.rel_cap``.
        NotAssociative: If ``rel`` is not associative.
    """
    n = rel.size
    if n > limits.rel_cap:
        raise ResourceLimit(f"relation search on {n} points exceeds cap {limits.rel_cap}")
    counterexample = associativity_counterexample(rel)
    if counterexample is not None:
        raise NotAssociative(f"relation is not associative at {counterexample}")
    cube = rel.cube
    l = [-1] * n
    r = [-1] * n
    witnesses = []

    def agrees(x, z):
        # for all y: (x, y, l(z)) in R iff (y, z, r(x)) in R
        return np.array_equal(cube[x, :, l[z]], cube[:, z, r[x]])

    def extend(z):
        if z == n:
            witnesses.append(RelWitness(tuple(l), tuple(r)))
            return
        for v in range(n):
            if r[v] != -1:
                continue
            l[z], r[v] = v, z
            assigned = range(z + 1)
            if all(agrees(l[w], z) for w in assigned) and all(agrees(v, w) for w in assigned):
                extend(z + 1)
            l[z], r[v] = -1, -1

    extend(0)
    logger.debug(f"search_rel_frobenius on {n} points: {len(witnesses)} witnesses")
    return witnesses


# --- instance generators -------------------------------------------------------

def _check_table(table):
    table = np.array(table, dtype=np.int64)
    n = table.shape[0] if table.ndim == 2 else 0
    if table.shape != (n, n) or n == 0 or table.min() < 0 or table.max() >= n:
        raise InvalidParameter("multiplication table must be square and non-empty with entries in range")
    if not np.array_equal(table[table, :], table[:, table]):
        raise NotAssociative("multiplication table is not associative")
    return table


def semigroup_relation(table):
    """The graph ``{(x, y, x.y)}`` of an associative table."""
    table = _check_table(table)
    n = table.shape[0]
    return TernaryRel(n, frozenset((x, y, int(table[x, y])) for x, y in itertools.product(range(n), repeat=2)))


class GroupRelation(NamedTuple):
    rel: TernaryRel
    l: tuple
    r: tuple


def group_relation(table, e):
    """The graph of a group with witness ``l = r = (z -> z^-1 . e)`` for a central ``e``.

    Raises:
        NotAssociative: If the table is not associative.
        NotAGroup: If there is no two-sided identity or some element lacks an inverse.
        InvalidParameter: If ``e`` is out of range or not central.
    """
    table = _check_table(table)
    n = table.shape[0]
    idx = np.arange(n)
    units = [u for u in range(n) if np.array_equal(table[u, :], idx) and np.array_equal(table[:, u], idx)]
    if not units:
        raise NotAGroup("table has no two-sided identity")
    one = units[0]
    inverse = []
    for x in range(n):
        candidates = np.flatnonzero((table[x, :] == one) & (table[:, x] == one))
        if candidates.size == 0:
            raise NotAGroup(f"element {x} has no inverse")
        inverse.append(int(candidates[0]))
    if not 0 <= e < n:
        raise InvalidParameter(f"dualizer {e} out of range")
    if not np.array_equal(table[e, :], table[:, e]):
        raise InvalidParameter(f"dualizer {e} is not central")
    l = tuple(int(table[inverse[z], e]) for z in range(n))
    return GroupRelation(semigroup_relation(table), l, l)


def cyclic_relation(n):
    """``{(x, y, z) : x + y + z = 0 mod n}``, invariant under cyclic rotation of triples."""
    return TernaryRel(n, frozenset((x, y, (-x - y) % n) for x, y in itertools.product(range(n), repeat=2)))


def cyclic_group_table(n):
    if n < 1:
        raise InvalidParameter(f"cyclic group order must be positive, got {n}")
    idx = np.arange(n)
    return (idx[:, None] + idx[None, :]) % n


def klein_four_table():
    idx = np.arange(4)
    return idx[:, None] ^ idx[None, :]


class SeededInstance(NamedTuple):
    """A generated relation together with what is needed to rebuild it."""
    rel: TernaryRel
    family: str
    seed: int
    relabeling: tuple


_SEMIGROUP_FAMILIES = {
    "left_zero": lambda n, rng: np.repeat(np.arange(n)[:, None], n, axis=1),
    "right_zero": lambda n, rng: np.repeat(np.arange(n)[None, :], n, axis=0),
    "null": lambda n, rng: np.zeros((n, n), dtype=np.int64),
    "cyclic_group": lambda n, rng: cyclic_group_table(n),
    "chain_max": lambda n, rng: np.maximum.outer(np.arange(n), np.arange(n)),
    "chain_min": lambda n, rng: np.minimum.outer(np.arange(n), np.arange(n)),
}


def random_semigroup_relation(n, seed, family=None):
    """The graph of a randomly relabelled semigroup from a fixed set of families.

    The family (unless given) and the relabeling are drawn from ``seed``, so the
    same arguments always yield the same instance.
    """
    if n < 1:
        raise InvalidParameter(f"universe must be non-empty, got {n}")
    rng = np.random.default_rng(seed)
    names = sorted(_SEMIGROUP_FAMILIES)
    if family is None:
        family = names[int(rng.integers(len(names)))]
    elif family not in _SEMIGROUP_FAMILIES:
        raise InvalidParameter(f"unknown semigroup family {family!r}; expected one of {names}")
    table = _SEMIGROUP_FAMILIES[family](n, rng)
    perm = rng.permutation(n)
    inv = np.argsort(perm)
    # relabel x -> perm[x]
    relabeled = perm[table[inv[:, None], inv[None, :]]]
    return SeededInstance(semigroup_relation(relabeled), family, seed, tuple(int(p) for p in perm))
