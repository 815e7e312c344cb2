"""Finite quantales, their residuals and Frobenius structures.

A quantale is a lattice with an associative multiplication that distributes
over joins in each argument. Its residuals are stored as two tables:

* ``under[x, z]`` is ``x \\ z``, the largest ``y`` with ``x * y <= z``;
* ``over[z, y]`` is ``z / y``, the largest ``x`` with ``x * y <= z``.

A Frobenius structure is a pair of mutually inverse order anti-isomorphisms
``(l, r)`` forming a Galois connection and satisfying the contraposition law
``y \\ l(x) = r(y) / x``.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from frobenius_lab.core.cache import structure_cache
from frobenius_lab.core.config_manager import DEFAULT_LIMITS
from frobenius_lab.core.errors import (
    InvalidParameter,
    NotAssociative,
    NotDualizing,
    NotSupDistributive,
    ResourceLimit,
    WitnessInvalid,
)
from frobenius_lab.core.lattice import boolean, op
from frobenius_lab.core.log_manager import get_logger
from frobenius_lab.core.slatt import hom_lattice, identity

logger = get_logger("frobenius_lab.quantale")


def _frozen(array):
    array.setflags(write=False)
    return array


class Quantale:
    """A validated finite quantale.

    Attributes:
        carrier (Lattice): The underlying lattice.
        mult (np.ndarray): ``mult[x, y]`` is ``x * y``.
        unit (int | None): Two-sided unit, if any.
        name (str): Optional label.
    """

    def __init__(self, carrier, mult, unit=None, name=None):
        self.carrier = carrier
        self.mult = _frozen(np.array(mult, dtype=np.int64))
        self.unit = None if unit is None else int(unit)
        self.size = carrier.size
        self.name = name or carrier.name

    def __repr__(self):
        return f"Quantale({self.name}, size={self.size}, unit={self.unit})"

    def mul(self, x, y):
        return int(self.mult[x, y])

    @cached_property
    def under(self):
        leq = self.carrier.leq
        table = np.empty((self.size, self.size), dtype=np.int64)
        for x in range(self.size):
            # mask[y, z]: x * y <= z
            table[x] = self.carrier.principal_max(leq[self.mult[x, :], :])
        return _frozen(table)

    @cached_property
    def over(self):
        leq = self.carrier.leq
        table = np.empty((self.size, self.size), dtype=np.int64)
        for y in range(self.size):
            # mask[w, z]: w * y <= z
            table[:, y] = self.carrier.principal_max(leq[self.mult[:, y], :])
        return _frozen(table)

    def left_residual(self, x, z):
        """``x \\ z``"""
        return int(self.under[x, z])

    def right_residual(self, z, y):
        """``z / y``"""
        return int(self.over[z, y])


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one law check; ``counterexample`` holds the first failing arguments."""
    name: str
    passed: bool
    counterexample: Optional[tuple] = None


def _scan(name, slices):
    """Builds a :class:`CheckResult` from ``(first_argument, ok_array)`` slices."""
    for first, ok in slices:
        ok = np.asarray(ok)
        if not ok.all():
            rest = tuple(int(i) for i in np.argwhere(~ok)[0])
            return CheckResult(name, False, (int(first),) + rest)
    return CheckResult(name, True)


def _detect_unit(mult):
    idx = np.arange(mult.shape[0])
    for u in idx:
        if np.array_equal(mult[u, :], idx) and np.array_equal(mult[:, u], idx):
            return int(u)
    return None


def make_quantale(carrier, mult, detect_unit=True, name=None):
    """Validates a multiplication table on ``carrier``.

    Raises:
        InvalidParameter: If the table has the wrong shape or out-of-range entries.
        NotAssociative: If ``(x*y)*z != x*(y*z)`` for some triple.
        NotSupDistributive: If bottom is not absorbing or a binary join is not preserved.
    """
    n = carrier.size
    mult = np.array(mult, dtype=np.int64)
    if mult.shape != (n, n):
        raise InvalidParameter(f"multiplication table must be {n}x{n}, got {mult.shape}")
    if mult.size and (mult.min() < 0 or mult.max() >= n):
        raise InvalidParameter("multiplication table entries out of range")
    join = carrier.join_table
    bottom = carrier.bottom
    for x in range(n):
        # [y, z]: (x*y)*z against x*(y*z)
        left, right = mult[mult[x, :], :], mult[x, mult]
        if not np.array_equal(left, right):
            y, z = np.argwhere(left != right)[0]
            raise NotAssociative(f"({x}*{y})*{z} != {x}*({y}*{z})")
    for x in range(n):
        if mult[x, bottom] != bottom or mult[bottom, x] != bottom:
            raise NotSupDistributive(f"bottom does not absorb {x}: {x}*bottom or bottom*{x} is not bottom")
    for x in range(n):
        # [y, z]: x*(y v z) against x*y v x*z, and the mirror image
        left = mult[x, join]
        right = join[mult[x, :][:, None], mult[x, :][None, :]]
        if not np.array_equal(left, right):
            y, z = np.argwhere(left != right)[0]
            raise NotSupDistributive(f"{x}*({y} v {z}) != {x}*{y} v {x}*{z}")
        left = mult[join, x]
        right = join[mult[:, x][:, None], mult[:, x][None, :]]
        if not np.array_equal(left, right):
            y, z = np.argwhere(left != right)[0]
            raise NotSupDistributive(f"({y} v {z})*{x} != {y}*{x} v {z}*{x}")
    unit = _detect_unit(mult) if detect_unit else None
    return Quantale(carrier, mult, unit=unit, name=name)


def residuals(quantale, x, z):
    """Returns ``(x \\ z, z / x)``."""
    return quantale.left_residual(x, z), quantale.right_residual(z, x)


class Actions(NamedTuple):
    lact: object
    ract: object


def actions(quantale):
    """The left action ``(y, z) -> z / y`` and the right action ``(z, x) -> x \\ z`` on ``op(Q)``."""
    return Actions(lambda y, z: quantale.right_residual(z, y), lambda z, x: quantale.left_residual(x, z))


@dataclass(frozen=True)
class LawReport:
    """A named collection of :class:`CheckResult` entries."""
    checks: tuple

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self):
        return [c.name for c in self.checks if not c.passed]


def check_action_laws(quantale):
    """Checks the residuation triple, both action laws and equivariance on all triples.

    * adjointness: ``x <= z/y`` iff ``x*y <= z`` iff ``y <= x\\z``
    * left action: ``z/(x*y) = (z/y)/x``
    * right action: ``(x*y)\\z = y\\(x\\z)``
    * equivariance: ``(x\\z)/y = x\\(z/y)``

    Arguments in counterexamples are ordered ``(x, y, z)``.
    """
    n, leq, mult = quantale.size, quantale.carrier.leq, quantale.mult
    under, over = quantale.under, quantale.over
    idx = np.arange(n)

    def adjointness():
        for x in range(n):
            a = leq[mult[x, :], :]
            b = leq[x, over.T]
            c = leq[idx[:, None], under[x, :][None, :]]
            yield x, (a == b) & (b == c)

    def left_action():
        for x in range(n):
            yield x, over.T[mult[x, :], :] == over[over.T, x]

    def right_action():
        for x in range(n):
            yield x, under[mult[x, :], :] == under[idx[:, None], under[x, :][None, :]]

    def equivariance():
        for x in range(n):
            yield x, over[under[x, :][None, :], idx[:, None]] == under[x, over.T]

    return LawReport((
        _scan("adjointness", adjointness()),
        _scan("left_action", left_action()),
        _scan("right_action", right_action()),
        _scan("equivariance", equivariance()),
    ))


# --- dualizing elements and Frobenius witnesses --------------------------------

@dataclass(frozen=True)
class DualizingElement:
    element: int
    cyclic: bool


def _is_dualizing(quantale, d):
    idx = np.arange(quantale.size)
    under, over = quantale.under, quantale.over
    return bool(np.array_equal(under[over[d, :], d], idx) and np.array_equal(over[d, under[:, d]], idx))


def dualizing_elements(quantale):
    """Every ``d`` with ``(d/x)\\d = x = d/(x\\d)``; cyclic when ``x\\d = d/x`` for all ``x``."""
    result = []
    for d in range(quantale.size):
        if _is_dualizing(quantale, d):
            cyclic = bool(np.array_equal(quantale.under[:, d], quantale.over[d, :]))
            result.append(DualizingElement(d, cyclic))
    return result


class WitnessOrigin(enum.Enum):
    FROM_DUALIZING = "from_dualizing"
    SEARCHED = "searched"
    CONSTRUCTED = "constructed"


@dataclass(frozen=True)
class FrobeniusWitness:
    """The maps ``l`` and ``r`` as permutations of the carrier."""
    l: tuple
    r: tuple
    origin: WitnessOrigin = WitnessOrigin.CONSTRUCTED
    dualizer: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "l", tuple(int(v) for v in self.l))
        object.__setattr__(self, "r", tuple(int(v) for v in self.r))

    @property
    def cyclic(self):
        return self.l == self.r


def frobenius_from_dualizing(quantale, d):
    """The witness ``l(x) = d/x``, ``r(x) = x\\d``.

    Raises:
        NotDualizing: If ``d`` is not a dualizing element.
    """
    if not 0 <= d < quantale.size or not _is_dualizing(quantale, d):
        raise NotDualizing(f"element {d} is not dualizing in {quantale.name}")
    return FrobeniusWitness(tuple(quantale.over[d, :].tolist()), tuple(quantale.under[:, d].tolist()),
                            WitnessOrigin.FROM_DUALIZING, dualizer=d)


@dataclass(frozen=True)
class FrobeniusReport(LawReport):
    """Verification outcome of a candidate ``(l, r)``."""
    l: tuple = field(default=())
    r: tuple = field(default=())


FROBENIUS_CHECKS = (
    "l_antitone_bijection",
    "r_antitone_bijection",
    "mutual_inversion",
    "galois",
    "contraposition",
    "shift",
    "pairing_associativity",
    "consistency",
)


def _antitone_bijection(name, carrier, f):
    if sorted(f.tolist()) != list(range(carrier.size)):
        seen = set()
        for x, v in enumerate(f.tolist()):
            if v in seen:
                return CheckResult(name, False, (x,))
            seen.add(v)
        return CheckResult(name, False, (int(np.setdiff1d(np.arange(carrier.size), f)[0]),))
    return _scan(name, [(0, carrier.leq == carrier.leq[f[None, :], f[:, None]])])


def verify_frobenius(quantale, l, r):
    """Checks every Frobenius law for the candidate ``(l, r)`` independently.

    Failures are report entries, never exceptions. ``consistency`` states that
    the contraposition, shift and pairing-associativity verdicts agree, which
    they must whenever the Galois condition holds.

    Raises:
        InvalidParameter: If ``l`` or ``r`` is not a function on the carrier.
    """
    n, leq, mult = quantale.size, quantale.carrier.leq, quantale.mult
    l = np.asarray(l, dtype=np.int64)
    r = np.asarray(r, dtype=np.int64)
    for name, f in (("l", l), ("r", r)):
        if f.shape != (n,) or (n and (f.min() < 0 or f.max() >= n)):
            raise InvalidParameter(f"{name} must map the {n} carrier elements into the carrier")
    idx = np.arange(n)
    under, over = quantale.under, quantale.over

    def shift():
        for x in range(n):
            a = leq[mult[x, :][:, None], l[None, :]]
            b = leq[mult, r[x]]
            c = leq[x, l[mult]]
            yield x, (a == b) & (b == c)

    def pairing():
        # pi(u, v) = not (u <= l(v)); pi(x*y, z) against pi(x, y*z)
        for x in range(n):
            yield x, leq[mult[x, :][:, None], l[None, :]] == leq[x, l[mult]]

    galois = _scan("galois", [(x, leq[x, l] == leq[idx, r[x]]) for x in range(n)])
    contraposition = _scan("contraposition", [(x, under[idx, l[x]] == over[r, x]) for x in range(n)])
    shift_law = _scan("shift", shift())
    associativity = _scan("pairing_associativity", pairing())
    verdicts = (contraposition.passed, shift_law.passed, associativity.passed)
    consistent = not galois.passed or len(set(verdicts)) == 1
    checks = (
        _antitone_bijection("l_antitone_bijection", quantale.carrier, l),
        _antitone_bijection("r_antitone_bijection", quantale.carrier, r),
        _scan("mutual_inversion", [(0, (r[l] == idx) & (l[r] == idx))]),
        galois,
        contraposition,
        shift_law,
        associativity,
        CheckResult("consistency", consistent, None if consistent else verdicts),
    )
    return FrobeniusReport(checks, l=tuple(l.tolist()), r=tuple(r.tolist()))


def anti_automorphisms(lattice):
    """Every order-reversing bijection of ``lattice`` onto itself, in lexicographic order.

    Elements are matched class by class: ``l`` must send an element with
    ``(down-set size, up-set size) = (d, u)`` to one with ``(u, d)``.
    """
    n = lattice.size
    le = lattice.leq.tolist()
    profile = [(int(lattice.downsize[x]), int(lattice.upsize[x])) for x in lattice.elements]
    options = [[v for v in lattice.elements if profile[v] == (profile[x][1], profile[x][0])] for x in lattice.elements]
    chosen = [-1] * n
    used = [False] * n
    result = []

    def extend(x):
        if x == n:
            result.append(tuple(chosen))
            return
        for v in options[x]:
            if used[v]:
                continue
            if all(le[x][w] == le[chosen[w]][v] and le[w][x] == le[v][chosen[w]] for w in range(x)):
                chosen[x] = v
                used[v] = True
                extend(x + 1)
                used[v] = False
        chosen[x] = -1

    extend(0)
    return result


def _inverse(perm):
    inverse = [0] * len(perm)
    for x, v in enumerate(perm):
        inverse[v] = x
    return tuple(inverse)


def search_frobenius(quantale, limits=DEFAULT_LIMITS):
    """All Frobenius witnesses of ``quantale``.

    A unital quantale has exactly one witness per dualizing element. Without a
    unit every anti-automorphism ``l`` is tried with ``r = l^-1``.

    Raises:
        ResourceLimit: If a unitless carrier exceeds ``limits.search_cap``.
    """
    if quantale.unit is not None:
        witnesses = [frobenius_from_dualizing(quantale, d.element) for d in dualizing_elements(quantale)]
    else:
        if quantale.size > limits.search_cap:
            raise ResourceLimit(f"unitless search on {quantale.size} elements exceeds cap {limits.search_cap}")
        witnesses = []
        for l in anti_automorphisms(quantale.carrier):
            r = _inverse(l)
            if verify_frobenius(quantale, l, r).all_passed:
                witnesses.append(FrobeniusWitness(l, r, WitnessOrigin.SEARCHED))
    logger.debug(f"search_frobenius({quantale.name}): {len(witnesses)} witnesses")
    return witnesses


def dual_multiplication(quantale, witness):
    """The multiplication ``b1 . b2 = b2 / r(b1)`` on ``op(Q)``.

    It coincides with ``l(b2) \\ b1``; both ``l`` and ``r`` become semigroup
    homomorphisms from ``Q`` to the result.

    Raises:
        WitnessInvalid: If the witness fails verification or the two formulas disagree.
    """
    report = verify_frobenius(quantale, witness.l, witness.r)
    if not report.all_passed:
        raise WitnessInvalid(f"witness fails {report.failed()}")
    l = np.asarray(witness.l)
    r = np.asarray(witness.r)
    by_over = quantale.over.T[r, :]
    by_under = quantale.under[l[None, :], np.arange(quantale.size)[:, None]]
    if not np.array_equal(by_over, by_under):
        b1, b2 = np.argwhere(by_over != by_under)[0]
        raise WitnessInvalid(f"dual multiplication legs disagree at ({b1}, {b2})")
    return make_quantale(op(quantale.carrier), by_over, name=f"dual({quantale.name})")


# --- endomorphism quantale and families ----------------------------------------

def endo_quantale(lattice, limits=DEFAULT_LIMITS):
    """Sup-endomaps of ``lattice`` under pointwise order with ``f * g`` = f then g.

    Raises:
        ResourceLimit: If the hom-lattice exceeds ``limits.hom_cap``.
    """
    def build():
        hom = hom_lattice(lattice, lattice, limits)
        v = hom.values
        m = len(hom)
        # composed[i, k, x] = g_k(f_i(x))
        composed = v[np.arange(m)[None, :, None], v[:, None, :]]
        mult = hom.indices_of_values(composed.reshape(m * m, -1)).reshape(m, m)
        unit = hom.index_of(identity(lattice))
        logger.info(f"endo_quantale({lattice.name}): {m} maps")
        return Quantale(hom.lattice, mult, unit=unit, name=f"End({lattice.name})")

    return structure_cache.get_or_compute(("endo", lattice.key, limits.hom_cap), build)


def meet_quantale(lattice):
    return make_quantale(lattice, lattice.meet_table, name=f"meet({lattice.name})")


def absorbing_join_quantale(lattice):
    """``x * y`` is bottom when either factor is, and ``x v y`` otherwise."""
    b = lattice.bottom
    idx = np.arange(lattice.size)
    absorbed = (idx[:, None] == b) | (idx[None, :] == b)
    return make_quantale(lattice, np.where(absorbed, b, lattice.join_table), name=f"absorbing_join({lattice.name})")


def left_projection_quantale(lattice):
    """``x * y`` is ``x`` unless ``y`` is bottom."""
    idx = np.arange(lattice.size)
    mult = np.where(idx[None, :] == lattice.bottom, lattice.bottom, idx[:, None])
    return make_quantale(lattice, mult, name=f"left_projection({lattice.name})")


def zero_quantale(lattice):
    mult = np.full((lattice.size, lattice.size), lattice.bottom)
    return make_quantale(lattice, mult, name=f"zero({lattice.name})")


def powerset_quantale(table, limits=DEFAULT_LIMITS):
    """Subsets of a finite semigroup under ``A * B = {a.b}``.

    Raises:
        NotAssociative: If ``table`` is not associative.
        InvalidParameter: If the semigroup is larger than ``limits.boolean_max_rank``.
    """
    table = np.array(table, dtype=np.int64)
    k = table.shape[0]
    if table.shape != (k, k) or (k and (table.min() < 0 or table.max() >= k)):
        raise InvalidParameter("semigroup table must be square with entries in range")
    if not np.array_equal(table[table, :], table[:, table]):
        raise NotAssociative("semigroup table is not associative")
    carrier = boolean(k, limits)
    products = [[1 << int(table[a, b]) for b in range(k)] for a in range(k)]
    mult = np.zeros((1 << k, 1 << k), dtype=np.int64)
    for left, right in itertools.product(range(1 << k), repeat=2):
        acc = 0
        for a in range(k):
            if (left >> a) & 1:
                for b in range(k):
                    if (right >> b) & 1:
                        acc |= products[a][b]
        mult[left, right] = acc
    return make_quantale(carrier, mult, name=f"powerset(k={k})")


# --- bracketed magmas ----------------------------------------------------------

class BracketedMagma:
    """A multiplication table with a two-valued pairing ``pairing[x, y]``."""

    def __init__(self, mult, pairing):
        self.mult = np.array(mult, dtype=np.int64)
        self.pairing = np.array(pairing, dtype=bool)
        self.size = self.mult.shape[0]

    def is_associative(self):
        """``pairing(x*y, z) == pairing(x, y*z)`` for all triples."""
        return all(
            np.array_equal(self.pairing[self.mult[x, :], :], self.pairing[x, self.mult])
            for x in range(self.size)
        )

    def quotient(self, epi_values, target_mult):
        """Pushes the pairing through a surjective magma homomorphism.

        Raises:
            InvalidParameter: If ``epi_values`` is not a surjective homomorphism onto ``target_mult``.
            WitnessInvalid: If the pairing is not constant on the fibres.
        """
        e = np.asarray(epi_values, dtype=np.int64)
        target_mult = np.asarray(target_mult, dtype=np.int64)
        k = target_mult.shape[0]
        if sorted(set(e.tolist())) != list(range(k)):
            raise InvalidParameter("quotient map is not surjective")
        if not np.array_equal(e[self.mult], target_mult[e[:, None], e[None, :]]):
            raise InvalidParameter("quotient map is not a magma homomorphism")
        pairing = np.zeros((k, k), dtype=bool)
        seen = np.zeros((k, k), dtype=bool)
        for x, y in itertools.product(range(self.size), repeat=2):
            u, v = e[x], e[y]
            if seen[u, v] and pairing[u, v] != self.pairing[x, y]:
                raise WitnessInvalid(f"pairing not constant on the fibre of ({u}, {v})")
            pairing[u, v] = self.pairing[x, y]
            seen[u, v] = True
        return BracketedMagma(target_mult, pairing)


def frobenius_pairing(quantale, witness):
    """The bracketed magma of ``Q`` with ``pairing(x, y) = not (x <= l(y))``."""
    l = np.asarray(witness.l, dtype=np.int64)
    return BracketedMagma(quantale.mult, ~quantale.carrier.leq[:, l])
