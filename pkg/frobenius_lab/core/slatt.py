"""The finite fragment of SLatt: sup-preserving maps, hom-lattices and tensors.

A sup-preserving map is stored as its value vector. The tensor product of two
lattices is modelled by bi-ideals, i.e. down-sets of ``L x M`` closed under
joins in each coordinate; a bi-ideal is an ``int`` bitset whose bit
``x * |M| + y`` records the pair ``(x, y)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from frobenius_lab.core.cache import structure_cache
from frobenius_lab.core.config_manager import DEFAULT_LIMITS
from frobenius_lab.core.errors import NoTranspose, ResourceLimit, TypeMismatch
from frobenius_lab.core.lattice import (
    Lattice,
    join_irreducibles,
    lattice_from_order,
    op,
    validate_lattice,
)
from frobenius_lab.core.log_manager import get_logger

logger = get_logger("frobenius_lab.slatt")


@dataclass(frozen=True)
class SupMap:
    """A map ``source -> target`` given by ``values[x]`` for every source element."""
    source: Lattice
    target: Lattice
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    def __call__(self, x):
        return self.values[x]

    def __repr__(self):
        return f"SupMap({self.source.name} -> {self.target.name}, {list(self.values)})"

    def le(self, other):
        """Pointwise order."""
        return all(self.target.le(a, b) for a, b in zip(self.values, other.values))

    def join(self, other):
        return SupMap(self.source, self.target, tuple(self.target.join(a, b) for a, b in zip(self.values, other.values)))


def identity(lattice):
    return SupMap(lattice, lattice, tuple(lattice.elements))


def constant_bottom(source, target):
    return SupMap(source, target, (target.bottom,) * source.size)


def is_sup_preserving(source, target, values):
    """True iff ``values`` maps bottom to bottom and preserves binary joins."""
    if len(values) != source.size:
        return False
    v = np.asarray(values, dtype=np.int64)
    if v.size and (v.min() < 0 or v.max() >= target.size):
        return False
    if v[source.bottom] != target.bottom:
        return False
    return bool(np.array_equal(v[source.join_table], target.join_table[v[:, None], v[None, :]]))


def compose(f, g):
    """``f`` first, then ``g``.

    Raises:
        TypeMismatch: If the target of ``f`` is not the source of ``g``.
    """
    if f.target != g.source:
        raise TypeMismatch(f"cannot compose {f.source.name}->{f.target.name} with {g.source.name}->{g.target.name}")
    return SupMap(f.source, g.target, tuple(g.values[v] for v in f.values))


def right_adjoint(f):
    """The right adjoint as a sup-map ``op(target) -> op(source)``.

    ``right_adjoint(f)(y)`` is the largest ``x`` with ``f(x) <= y``.
    """
    v = np.asarray(f.values, dtype=np.int64)
    # mask[x, y]: f(x) <= y
    mask = f.target.leq[v, :]
    values = f.source.principal_max(mask)
    return SupMap(op(f.target), op(f.source), tuple(values.tolist()))


def one_step(lattice, a, b):
    """The map sending ``x`` to ``b`` when ``x`` is not below ``a`` and to bottom otherwise."""
    return SupMap(lattice, lattice, tuple(lattice.bottom if lattice.le(x, a) else b for x in lattice.elements))


# --- hom-lattices --------------------------------------------------------------

def _enumerate_sup_maps(source, target, cap):
    """Value vectors of every sup-map, found by assigning join-irreducibles.

    A sup-map is determined by its values on the join-irreducibles. They are
    assigned in a linear extension of the source order, each choice is kept
    monotone, and the join-preservation constraints are tested at the step where
    their last irreducible gets a value.
    """
    order = sorted(join_irreducibles(source), key=lambda j: (int(source.downsize[j]), j))
    k = len(order)
    below = [tuple(i for i, j in enumerate(order) if source.le(j, x)) for x in source.elements]
    lower = [tuple(i for i in range(step) if source.le(order[i], order[step])) for step in range(k)]

    constraints = [[] for _ in range(k)]
    seen = set()
    for x, y in itertools.combinations_with_replacement(source.elements, 2):
        left, right = frozenset(below[x]), frozenset(below[y])
        for i in below[source.join(x, y)]:
            if i in left or i in right:
                continue
            key = (i,) + tuple(sorted((below[x], below[y])))
            if key in seen:
                continue
            seen.add(key)
            step = max({i} | left | right)
            constraints[step].append((i, below[x], below[y]))

    chosen = [target.bottom] * k
    results = []

    def span(indices):
        return target.join_of(chosen[i] for i in indices)

    def extend(step):
        if step == k:
            results.append(tuple(span(below[x]) for x in source.elements))
            if len(results) > cap:
                raise ResourceLimit(f"hom({source.name}, {target.name}) exceeds {cap} maps")
            return
        floor = span(lower[step])
        for value in target.elements:
            if not target.le(floor, value):
                continue
            chosen[step] = value
            if all(target.le(chosen[i], target.join(span(xs), span(ys))) for i, xs, ys in constraints[step]):
                extend(step + 1)

    extend(0)
    return results


class HomLattice:
    """Sup-maps ``source -> target`` under the pointwise order.

    Built by :func:`hom_lattice` with every sup-map, and reused for the tight
    maps, which are closed under pointwise joins and contain the bottom map.

    Attributes:
        source (Lattice): Domain of the maps.
        target (Lattice): Codomain of the maps.
        maps (tuple[SupMap, ...]): Every sup-map once, sorted by value vector.
        lattice (Lattice): The pointwise order over map indices.
    """

    def __init__(self, source, target, value_vectors, name=None):
        self.source = source
        self.target = target
        self.values = np.array(sorted(value_vectors), dtype=np.int64).reshape(len(value_vectors), source.size)
        self.maps = tuple(SupMap(source, target, row) for row in self.values.tolist())
        self._index = {f.values: i for i, f in enumerate(self.maps)}
        v = self.values
        leq = target.leq[v[:, None, :], v[None, :, :]].all(axis=2)
        self.lattice = lattice_from_order(leq, name=name or f"hom({source.name},{target.name})")

    def __len__(self):
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)

    def __getitem__(self, i):
        return self.maps[i]

    def index_of(self, f):
        values = f.values if isinstance(f, SupMap) else tuple(f)
        return self._index[values]

    def __contains__(self, f):
        values = f.values if isinstance(f, SupMap) else tuple(f)
        return values in self._index

    def indices_of_values(self, rows):
        """Indices of many value vectors at once; every row must be a map in the lattice."""
        rows = np.asarray(rows, dtype=np.int64)
        base = self.target.size
        if base ** self.source.size < 2 ** 62:
            # lexicographic order of the sorted vectors is numeric order of these keys
            weights = base ** np.arange(self.source.size - 1, -1, -1, dtype=np.int64)
            keys = self.values @ weights
            return np.searchsorted(keys, rows @ weights)
        return np.array([self._index[tuple(row)] for row in rows.tolist()], dtype=np.int64)


def hom_lattice(source, target, limits=DEFAULT_LIMITS):
    """All sup-preserving maps ``source -> target``.

    Raises:
        ResourceLimit: If more than ``limits.hom_cap`` maps exist.
    """
    def build():
        vectors = _enumerate_sup_maps(source, target, limits.hom_cap)
        logger.info(f"hom({source.name}, {target.name}): {len(vectors)} maps")
        return HomLattice(source, target, vectors)

    return structure_cache.get_or_compute(("hom", source.key, target.key, limits.hom_cap), build)


# --- dual pairings -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DualPairing:
    """A pairing ``A x B -> {bottom, top}``; ``table[a, b]`` is True for top."""
    A: Lattice
    B: Lattice
    table: np.ndarray

    def eval(self, a, b):
        return bool(self.table[a, b])

    @cached_property
    def transposition(self):
        """``b -> max{a : eval(a, b) is bottom}``, or None where that set is not principal."""
        zeros = ~self.table
        result = []
        for b in self.B.elements:
            column = zeros[:, b]
            top = int(self.A.principal_max(column)) if column.any() else None
            if top is None or not np.array_equal(column, self.A.leq[:, top]):
                result.append(None)
            else:
                result.append(top)
        return tuple(result)

    def check(self):
        """Returns the list of violated dual-pairing conditions (empty when valid)."""
        problems = []
        zeros = ~self.table
        for lattice, rows, side in ((self.A, zeros.T, "b"), (self.B, zeros, "a")):
            for fixed, mask in enumerate(rows):
                if not _is_principal(lattice, mask):
                    problems.append(f"not a bimorphism: zero set at {side}={fixed} is not a principal down-set")
        t = self.transposition
        if None not in t:
            if sorted(t) != list(self.A.elements):
                problems.append("transposition is not a bijection")
            else:
                tv = np.asarray(t)
                reversed_order = self.A.leq[tv[None, :], tv[:, None]]
                if not np.array_equal(self.B.leq, reversed_order):
                    problems.append("transposition is not an order anti-isomorphism")
        return problems


def _is_principal(lattice, mask):
    if not mask.any():
        return False
    top = int(lattice.principal_max(mask))
    return bool(np.array_equal(mask, lattice.leq[:, top]))


def pairing_is_valid(pairing):
    return not pairing.check()


def pairing_LLop(lattice):
    """The canonical pairing of ``L`` with ``op(L)``: bottom iff ``x <= y``."""
    return DualPairing(lattice, op(lattice), ~lattice.leq)


def chu_transpose(f, p0, p1):
    """The map ``B1 -> B0`` with ``p0(a, transpose(b)) = p1(f(a), b)``.

    Raises:
        TypeMismatch: If ``f`` does not run ``p0.A -> p1.A``.
        NoTranspose: If some column of the pulled-back pairing is missing from ``p0``.
    """
    if f.source != p0.A or f.target != p1.A:
        raise TypeMismatch("map and pairings do not match")
    columns = {p0.table[:, b].tobytes(): b for b in p0.B.elements}
    pulled = p1.table[np.asarray(f.values, dtype=np.int64), :]
    values = []
    for b in p1.B.elements:
        hit = columns.get(pulled[:, b].tobytes())
        if hit is None:
            raise NoTranspose(f"no transpose at b={b}")
        values.append(hit)
    return SupMap(p1.B, p0.B, tuple(values))


# --- tensor product ------------------------------------------------------------

@dataclass(frozen=True)
class TensorElement:
    """A bi-ideal of ``left x right`` as a bitset."""
    bits: int
    left_size: int
    right_size: int

    def __contains__(self, pair):
        x, y = pair
        return bool((self.bits >> (x * self.right_size + y)) & 1)

    @property
    def pairs(self):
        return [divmod(i, self.right_size) for i in range(self.left_size * self.right_size) if (self.bits >> i) & 1]

    def row(self, x):
        return (self.bits >> (x * self.right_size)) & ((1 << self.right_size) - 1)

    def le(self, other):
        return self.bits & ~other.bits == 0


class TensorClosure:
    """The closure operator whose closed sets are the bi-ideals of ``left x right``."""

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self.row_width = right.size
        self.row_full = (1 << right.size) - 1

    def closure(self, bits):
        left, right, w = self.left, self.right, self.row_width
        rows = [((bits >> (x * w)) & self.row_full) | (1 << right.bottom) for x in left.elements]
        rows[left.bottom] = self.row_full
        while True:
            rows = [right.down_masks[right.join_of_mask(r)] for r in rows]
            changed = False
            for y in right.elements:
                column = [x for x in left.elements if (rows[x] >> y) & 1]
                top = left.join_of(column)
                for x in left.elements:
                    if left.le(x, top) and not (rows[x] >> y) & 1:
                        rows[x] |= 1 << y
                        changed = True
            if not changed:
                return sum(r << (x * w) for x, r in enumerate(rows))

    def pair_bit(self, x, y):
        return 1 << (x * self.row_width + y)


class TensorLattice:
    """All bi-ideals of ``left x right`` ordered by inclusion.

    Attributes:
        left (Lattice): First factor.
        right (Lattice): Second factor.
        elements (tuple[TensorElement, ...]): Bi-ideals sorted by size, then bits.
        lattice (Lattice): Inclusion order over element indices.
    """

    def __init__(self, left, right, closed_sets):
        self.left = left
        self.right = right
        self.closure_operator = TensorClosure(left, right)
        ordered = sorted(closed_sets, key=lambda b: (b.bit_count(), b))
        self.elements = tuple(TensorElement(b, left.size, right.size) for b in ordered)
        self._index = {e.bits: i for i, e in enumerate(self.elements)}
        width = left.size * right.size
        members = np.array([[(b >> i) & 1 for i in range(width)] for b in ordered], dtype=np.float64)
        leq = (members @ (1.0 - members).T) == 0
        self.lattice = lattice_from_order(leq, name=f"tensor({left.name},{right.name})")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @property
    def bottom_element(self):
        return self.elements[0]

    def closure(self, bits):
        return self.closure_operator.closure(bits)

    def element(self, bits):
        """The bi-ideal generated by ``bits``."""
        return self.elements[self._index[self.closure(bits)]]

    def index_of(self, element):
        return self._index[element.bits]

    def join(self, d1, d2):
        return self.element(d1.bits | d2.bits)


def _next_closure(closure, width, cap, what):
    """All closed sets of a closure operator on ``width`` points, in lectic order."""
    full = (1 << width) - 1
    current = closure(0)
    found = [current]
    while current != full:
        for i in reversed(range(width)):
            bit = 1 << i
            if current & bit:
                continue
            low = bit - 1
            candidate = closure((current & low) | bit)
            if (candidate & ~current) & low == 0:
                current = candidate
                found.append(current)
                break
        if len(found) > cap:
            raise ResourceLimit(f"{what} exceeds {cap} elements")
    return found


def tensor_lattice(left, right, limits=DEFAULT_LIMITS):
    """All bi-ideals of ``left x right``.

    Raises:
        ResourceLimit: If more than ``limits.hom_cap`` bi-ideals exist.
    """
    def build():
        what = f"tensor({left.name}, {right.name})"
        closure = TensorClosure(left, right).closure
        closed = _next_closure(closure, left.size * right.size, limits.hom_cap, what)
        logger.info(f"{what}: {len(closed)} bi-ideals")
        return TensorLattice(left, right, closed)

    return structure_cache.get_or_compute(("tensor", left.key, right.key, limits.hom_cap), build)


def tensor_closure(tensor, bits):
    return tensor.closure(bits)


def elementary_tensor(tensor, x, y):
    """The bi-ideal generated by the single pair ``(x, y)``."""
    return tensor.element(tensor.closure_operator.pair_bit(x, y))


def tensor_to_hom(tensor, element):
    """The map ``x -> max{y : (x, y) in element}``, a sup-map ``left -> op(right)``."""
    right = tensor.right
    values = tuple(right.join_of_mask(element.row(x)) for x in tensor.left.elements)
    return SupMap(tensor.left, op(right), values)


# --- mix and nuclearity --------------------------------------------------------

def apply_mix(lattice, element):
    """The endomap ``x -> join{b : (a, b) in element, x not <= a}`` of a bi-ideal of ``op(L) x L``."""
    row_max = [lattice.join_of_mask(element.row(a)) for a in lattice.elements]
    return SupMap(lattice, lattice, tuple(
        lattice.join_of(row_max[a] for a in lattice.elements if not lattice.le(x, a)) for x in lattice.elements
    ))


def mix(lattice, limits=DEFAULT_LIMITS):
    """The mix map as a sup-map from ``tensor(op(L), L)`` to ``hom(L, L)`` (over element indices)."""
    tensor = tensor_lattice(op(lattice), lattice, limits)
    hom = hom_lattice(lattice, lattice, limits)
    values = tuple(hom.index_of(apply_mix(lattice, d)) for d in tensor)
    return SupMap(tensor.lattice, hom.lattice, values)


def is_nuclear(lattice, limits=DEFAULT_LIMITS):
    """True iff mix is a bijection between ``tensor(op(L), L)`` and ``hom(L, L)``."""
    m = mix(lattice, limits)
    return m.source.size == m.target.size == len(set(m.values))


class Factorization(NamedTuple):
    image: Lattice
    epi: SupMap
    mono: SupMap


def image_factorization(f):
    """Splits ``f`` as a surjection onto its image followed by the inclusion.

    The image of a sup-map contains bottom and is closed under the target's
    joins, so it is a lattice in the induced order.
    """
    image = sorted(set(f.values))
    position = {v: i for i, v in enumerate(image)}
    c = validate_lattice(f.target.leq[np.ix_(image, image)], name=f"Im({f.source.name}->{f.target.name})",
                         check_order=False)
    epi = SupMap(f.source, c, tuple(position[v] for v in f.values))
    mono = SupMap(c, f.target, tuple(image))
    return Factorization(c, epi, mono)


def adjunction_unit(lattice, limits=DEFAULT_LIMITS):
    """A bi-ideal of ``op(L) x L`` whose mix is the identity, or None.

    The largest candidate is generated by every pair ``(a, b)`` whose one-step
    map lies below the identity; mix is monotone, so a unit exists iff this
    candidate is one.
    """
    closure = TensorClosure(op(lattice), lattice)
    bits = 0
    for a, b in itertools.product(lattice.elements, repeat=2):
        if all(lattice.le(b, x) for x in lattice.elements if not lattice.le(x, a)):
            bits |= closure.pair_bit(a, b)
    eta = TensorElement(closure.closure(bits), lattice.size, lattice.size)
    if apply_mix(lattice, eta) == identity(lattice):
        return eta
    logger.debug(f"No adjunction unit for {lattice.name}")
    return None


def triangle_identities(lattice, eta):
    """Both triangle identities of the unit ``eta`` against the evaluation pairing.

    Returns:
        tuple[bool, bool]: ``mix(eta) == id`` and ``y == meet{a : (a, b) in eta, b not <= y}`` for all ``y``.
    """
    left_ok = apply_mix(lattice, eta) == identity(lattice)
    pairs = eta.pairs
    right_ok = all(
        lattice.meet_of(a for a, b in pairs if not lattice.le(b, y)) == y for y in lattice.elements
    )
    return left_ok, right_ok
