"""Finite complete lattices stored as dense order tables.

Elements are the indices ``0..n-1``. A :class:`Lattice` keeps the order
relation as a boolean matrix (``leq[x, y]`` is ``x <= y``) together with the
join and meet tables computed once at validation time. Every finite lattice is
complete, so the joins and meets of arbitrary subsets used throughout the lab
always exist.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import cached_property, reduce

import networkx as nx
import numpy as np

from frobenius_lab.core.cache import LRUCache
from frobenius_lab.core.config_manager import DEFAULT_LIMITS
from frobenius_lab.core.errors import InvalidParameter, NotALattice, NotAPartialOrder, ResourceLimit
from frobenius_lab.core.log_manager import get_logger

logger = get_logger("frobenius_lab.lattice")

_ENUMERATION_CACHE = LRUCache(capacity=16, name="enumeration")


def _frozen(array):
    array.setflags(write=False)
    return array


class Lattice:
    """A validated finite lattice.

    Instances are immutable and compare equal when their order relations are
    identical; the ``name`` is a label only.

    Attributes:
        size (int): Number of elements.
        leq (np.ndarray): ``size x size`` boolean order relation.
        join_table (np.ndarray): ``join_table[x, y]`` is the least upper bound of ``x`` and ``y``.
        meet_table (np.ndarray): ``meet_table[x, y]`` is the greatest lower bound of ``x`` and ``y``.
        bottom (int): Least element.
        top (int): Greatest element.
        downsize (np.ndarray): Number of elements below each element (itself included).
        name (str): Optional label.
    """

    def __init__(self, leq, join_table, meet_table, name=None):
        self.leq = _frozen(np.array(leq, dtype=bool))
        self.join_table = _frozen(np.array(join_table, dtype=np.int64))
        self.meet_table = _frozen(np.array(meet_table, dtype=np.int64))
        self.size = int(self.leq.shape[0])
        self.downsize = _frozen(self.leq.sum(axis=0))
        self.upsize = _frozen(self.leq.sum(axis=1))
        self.bottom = int(np.argmin(self.downsize))
        self.top = int(np.argmax(self.downsize))
        self.name = name
        self.key = self.size.to_bytes(4, "big") + np.packbits(self.leq).tobytes()
        self._hash = hash(self.key)

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"Lattice({self.name or 'unnamed'}, size={self.size})"

    @property
    def elements(self):
        return range(self.size)

    def renamed(self, name):
        return Lattice(self.leq, self.join_table, self.meet_table, name=name)

    @cached_property
    def _le(self):
        return self.leq.tolist()

    @cached_property
    def _join(self):
        return self.join_table.tolist()

    @cached_property
    def _meet(self):
        return self.meet_table.tolist()

    @cached_property
    def down_masks(self):
        """Bitmask of the principal down-set of every element."""
        return tuple(sum(1 << y for y in range(self.size) if self._le[y][x]) for x in range(self.size))

    @cached_property
    def up_masks(self):
        """Bitmask of the principal up-set of every element."""
        return tuple(sum(1 << y for y in range(self.size) if self._le[x][y]) for x in range(self.size))

    def le(self, x, y):
        return self._le[x][y]

    def join(self, x, y):
        return self._join[x][y]

    def meet(self, x, y):
        return self._meet[x][y]

    def join_of(self, subset):
        return reduce(self.join, subset, self.bottom)

    def meet_of(self, subset):
        return reduce(self.meet, subset, self.top)

    def join_of_mask(self, mask):
        result = self.bottom
        while mask:
            low = mask & -mask
            result = self._join[result][low.bit_length() - 1]
            mask ^= low
        return result

    def principal_max(self, mask):
        """Returns the greatest element of a principal down-set given as a boolean mask.

        Works column-wise on 2-d masks: ``mask[y, k]`` selects the candidates of
        query ``k``. Each query set must be non-empty and principal.
        """
        scores = np.where(mask, self.downsize.reshape((-1,) + (1,) * (mask.ndim - 1)), -1)
        return scores.argmax(axis=0)


@dataclass(frozen=True)
class BinRel:
    """A binary relation on the elements of a lattice."""
    lattice: Lattice
    pairs: frozenset

    def __post_init__(self):
        for x, y in self.pairs:
            if not (0 <= x < self.lattice.size and 0 <= y < self.lattice.size):
                raise InvalidParameter(f"pair {(x, y)} out of range for {self.lattice!r}")

    def __contains__(self, pair):
        return tuple(pair) in self.pairs

    def __len__(self):
        return len(self.pairs)


# --- validation --------------------------------------------------------------

def _check_partial_order(leq):
    n = leq.shape[0]
    missing = np.flatnonzero(~np.diag(leq))
    if missing.size:
        raise NotAPartialOrder(f"not reflexive at element {int(missing[0])}")
    both = leq & leq.T
    np.fill_diagonal(both, False)
    if both.any():
        x, y = np.argwhere(both)[0]
        raise NotAPartialOrder(f"not antisymmetric: {int(x)} <= {int(y)} <= {int(x)}")
    as_float = leq.astype(np.float64)
    composed = (as_float @ as_float) > 0
    broken = composed & ~leq
    if broken.any():
        x, z = np.argwhere(broken)[0]
        raise NotAPartialOrder(f"not transitive: {int(x)} <= ... <= {int(z)} but not {int(x)} <= {int(z)}")
    return n


def _least_bounds(order, what, verify=True):
    """Table of least upper bounds for ``order`` (pass ``leq.T`` for greatest lower bounds)."""
    n = order.shape[0]
    rank = order.sum(axis=0)
    table = np.empty((n, n), dtype=np.int64)
    for x in range(n):
        bounds = order[x][None, :] & order
        if verify:
            has_bound = bounds.any(axis=1)
            if not has_bound.all():
                y = int(np.flatnonzero(~has_bound)[0])
                raise NotALattice(f"elements {x} and {y} have no {what}")
        candidate = np.where(bounds, rank[None, :], n + 1).argmin(axis=1)
        if verify:
            least = (~bounds | order[candidate, :]).all(axis=1)
            if not least.all():
                y = int(np.flatnonzero(~least)[0])
                raise NotALattice(f"elements {x} and {y} have no {what}")
        table[x] = candidate
    return table


def lattice_from_order(leq, name=None):
    """Builds a lattice from an order already known to be a lattice order.

    Used for hom-lattices and tensor lattices, whose lattice property follows
    from their construction; no axiom is re-checked.
    """
    leq = np.asarray(leq, dtype=bool)
    return Lattice(leq, _least_bounds(leq, "", verify=False), _least_bounds(leq.T, "", verify=False), name=name)


def validate_lattice(leq, name=None, check_order=True):
    """Validates an order relation and computes its join and meet tables.

    Args:
        leq (array-like): Square boolean relation, ``leq[x][y]`` meaning ``x <= y``.
        name (str, optional): Label of the lattice.
        check_order (bool): Skip the partial-order axioms when the caller built
            the relation from a known order.

    Returns:
        Lattice: The validated lattice.

    Raises:
        NotAPartialOrder: If reflexivity, antisymmetry or transitivity fails.
        NotALattice: If some pair lacks a least upper or greatest lower bound.
    """
    leq = np.array(leq, dtype=bool)
    if leq.ndim != 2 or leq.shape[0] != leq.shape[1]:
        raise NotAPartialOrder(f"order relation must be square, got shape {leq.shape}")
    if leq.shape[0] == 0:
        raise NotALattice("the empty order has no bottom")
    if check_order:
        _check_partial_order(leq)
    join_table = _least_bounds(leq, "least upper bound")
    meet_table = _least_bounds(leq.T, "greatest lower bound")
    return Lattice(leq, join_table, meet_table, name=name)


# --- families ----------------------------------------------------------------

def chain(n, limits=DEFAULT_LIMITS):
    if n < 1:
        raise InvalidParameter(f"chain needs at least one element, got {n}")
    if n > limits.max_lattice_size:
        raise ResourceLimit(f"chain({n}) exceeds max_lattice_size={limits.max_lattice_size}")
    idx = np.arange(n)
    return validate_lattice(idx[:, None] <= idx[None, :], name=f"chain({n})", check_order=False)


def singleton():
    return chain(1).renamed("singleton")


def boolean(k, limits=DEFAULT_LIMITS):
    if k < 0 or k > limits.boolean_max_rank:
        raise InvalidParameter(f"boolean rank must be in 0..{limits.boolean_max_rank}, got {k}")
    idx = np.arange(1 << k)
    return validate_lattice((idx[:, None] & idx[None, :]) == idx[:, None], name=f"boolean({k})", check_order=False)


def m3():
    leq = np.eye(5, dtype=bool)
    leq[0, :] = True
    leq[:, 4] = True
    return validate_lattice(leq, name="M3", check_order=False)


def n5():
    # 0 < a=1 < b=2 < 4 and 0 < c=3 < 4
    leq = np.eye(5, dtype=bool)
    leq[0, :] = True
    leq[:, 4] = True
    leq[1, 2] = True
    return validate_lattice(leq, name="N5", check_order=False)


def product(left, right, limits=DEFAULT_LIMITS):
    if left.size * right.size > limits.max_lattice_size:
        raise ResourceLimit(
            f"product of sizes {left.size} and {right.size} exceeds max_lattice_size={limits.max_lattice_size}")
    leq = np.kron(left.leq.astype(np.int8), right.leq.astype(np.int8)).astype(bool)
    return validate_lattice(leq, name=f"product({left.name},{right.name})", check_order=False)


def op(lattice):
    """The opposite lattice: same elements, reversed order, join and meet swapped."""
    return Lattice(lattice.leq.T, lattice.meet_table, lattice.join_table, name=f"op({lattice.name})")


def make_family(name, *args, limits=DEFAULT_LIMITS):
    """Builds a named lattice.

    Args:
        name (str): One of ``chain``, ``boolean``, ``m3``, ``n5``, ``product``, ``op``, ``singleton``.
        *args: Integer parameters (``chain``, ``boolean``) or lattices (``product``, ``op``).
        limits (Limits): Caps for oversized parameters.

    Returns:
        Lattice: The requested lattice.

    Raises:
        InvalidParameter: On unknown names, wrong arity or out-of-range parameters.
        ResourceLimit: When a chain or product would exceed ``limits.max_lattice_size``.
    """
    key = name.lower()
    arity = {"chain": (int,), "boolean": (int,), "m3": (), "n5": (), "singleton": (),
             "product": (Lattice, Lattice), "op": (Lattice,)}
    if key not in arity:
        raise InvalidParameter(f"unknown lattice family {name!r}")
    expected = arity[key]
    if len(args) != len(expected) or not all(isinstance(a, t) for a, t in zip(args, expected)):
        raise InvalidParameter(f"{name} expects arguments {[t.__name__ for t in expected]}, got {args!r}")
    if key == "chain":
        return chain(args[0], limits)
    if key == "boolean":
        return boolean(args[0], limits)
    if key == "m3":
        return m3()
    if key == "n5":
        return n5()
    if key == "singleton":
        return singleton()
    if key == "product":
        return product(*args, limits=limits)
    return op(args[0])


_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\d+|[(),:]")


def parse_family(text, limits=DEFAULT_LIMITS):
    """Parses a family expression such as ``chain:3`` or ``product(chain(2),op(n5))``.

    Raises:
        InvalidParameter: If the expression is malformed.
    """
    compact = re.sub(r"\s+", "", text)
    tokens = _TOKEN.findall(compact)
    if "".join(tokens) != compact or not tokens:
        raise InvalidParameter(f"malformed family expression {text!r}")
    pos = 0

    def take(expected=None):
        nonlocal pos
        if pos >= len(tokens):
            raise InvalidParameter(f"unexpected end of family expression {text!r}")
        token = tokens[pos]
        if expected is not None and token != expected:
            raise InvalidParameter(f"expected {expected!r} at token {pos} of {text!r}")
        pos += 1
        return token

    def argument():
        if pos < len(tokens) and tokens[pos].isdigit():
            return int(take())
        return family()

    def family():
        name = take()
        if not name[0].isalpha():
            raise InvalidParameter(f"expected a family name at token {pos - 1} of {text!r}")
        args = []
        if pos < len(tokens) and tokens[pos] == ":":
            take(":")
            args.append(argument())
        elif pos < len(tokens) and tokens[pos] == "(":
            take("(")
            if tokens[pos] != ")":
                args.append(argument())
                while tokens[pos] == ",":
                    take(",")
                    args.append(argument())
            take(")")
        return make_family(name, *args, limits=limits)

    try:
        result = family()
    except IndexError:
        raise InvalidParameter(f"unexpected end of family expression {text!r}") from None
    if pos != len(tokens):
        raise InvalidParameter(f"trailing tokens in family expression {text!r}")
    return result


# --- elementwise operations --------------------------------------------------

def join_of(lattice, subset):
    return lattice.join_of(subset)


def meet_of(lattice, subset):
    return lattice.meet_of(subset)


def join_irreducibles(lattice):
    """Elements other than bottom that are not the join of two strictly smaller elements."""
    result = []
    for x in lattice.elements:
        if x == lattice.bottom:
            continue
        below = [a for a in lattice.elements if a != x and lattice.le(a, x)]
        if not any(lattice.join(a, b) == x for a, b in itertools.combinations_with_replacement(below, 2)):
            result.append(x)
    return tuple(result)


def is_distributive(lattice):
    join_t, meet_t = lattice.join_table, lattice.meet_table
    for x in lattice.elements:
        row = meet_t[x]
        if not np.array_equal(row[join_t], join_t[row[:, None], row[None, :]]):
            return False
    return True


def totally_below(lattice, limits=DEFAULT_LIMITS):
    """The totally below relation as pairs ``(y, x)``.

    ``y`` is totally below ``x`` when every subset whose join dominates ``x``
    contains an element above ``y``. Only subsets avoiding the up-set of ``y``
    can break the condition, and those are scanned exhaustively.

    Raises:
        ResourceLimit: If the lattice exceeds ``limits.totally_below_cap``.
    """
    n = lattice.size
    if n > limits.totally_below_cap:
        raise ResourceLimit(f"totally_below scans 2^{n} subsets; cap is {limits.totally_below_cap} elements")
    subset_join = [lattice.bottom] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        subset_join[mask] = lattice.join(subset_join[mask ^ low], low.bit_length() - 1)
    full = (1 << n) - 1
    pairs = set()
    for y in lattice.elements:
        avoid = full & ~lattice.up_masks[y]
        blocked = lattice.down_masks[subset_join[0]]
        sub = avoid
        while True:
            blocked |= lattice.down_masks[subset_join[sub]]
            if sub == 0:
                break
            sub = (sub - 1) & avoid
        pairs.update((y, x) for x in lattice.elements if not (blocked >> x) & 1)
    return BinRel(lattice, frozenset(pairs))


def is_completely_distributive(lattice, limits=DEFAULT_LIMITS):
    relation = totally_below(lattice, limits)
    approximants = {x: [] for x in lattice.elements}
    for y, x in relation.pairs:
        approximants[x].append(y)
    return all(lattice.join_of(approximants[x]) == x for x in lattice.elements)


# --- Hasse diagram and I/O helpers ---------------------------------------------

def cover_matrix(lattice):
    strict = lattice.leq & ~np.eye(lattice.size, dtype=bool)
    as_float = strict.astype(np.float64)
    return strict & ~((as_float @ as_float) > 0)


def covers(lattice):
    """Hasse diagram edges ``(i, j)`` meaning ``i`` is covered by ``j``, sorted."""
    return sorted((int(i), int(j)) for i, j in np.argwhere(cover_matrix(lattice)))


def from_covers(size, cover_pairs, name=None):
    """Builds a lattice from a generating relation (usually its covers).

    ``leq`` is the reflexive-transitive closure of ``cover_pairs``.

    Raises:
        NotAPartialOrder: If the pairs contain a cycle or an index out of range.
        NotALattice: If the closure is not a lattice.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(range(size))
    for i, j in cover_pairs:
        if not (0 <= i < size and 0 <= j < size):
            raise NotAPartialOrder(f"cover {(i, j)} out of range for size {size}")
        graph.add_edge(i, j)
    if not nx.is_directed_acyclic_graph(graph):
        raise NotAPartialOrder("covers contain a cycle")
    closure = nx.transitive_closure_dag(graph)
    leq = np.eye(size, dtype=bool)
    for i, j in closure.edges:
        leq[i, j] = True
    return validate_lattice(leq, name=name, check_order=False)


def ranks(lattice):
    """Length of the longest chain from bottom to each element."""
    graph = nx.DiGraph()
    graph.add_nodes_from(lattice.elements)
    graph.add_edges_from(covers(lattice))
    rank = {}
    for v in nx.topological_sort(graph):
        rank[v] = max((rank[u] + 1 for u in graph.predecessors(v)), default=0)
    return [rank[x] for x in lattice.elements]


def to_dot(lattice):
    """DOT text of the Hasse diagram, bottom at rank 0."""
    label = lattice.name or "lattice"
    lines = [f'digraph "{label}" {{', "  rankdir=BT;", "  node [shape=circle];"]
    by_rank = {}
    for x, r in enumerate(ranks(lattice)):
        by_rank.setdefault(r, []).append(x)
    for r in sorted(by_rank):
        members = "; ".join(str(x) for x in by_rank[r])
        lines.append(f"  {{ rank=same; {members}; }}  // rank {r}")
    for i, j in covers(lattice):
        lines.append(f"  {i} -> {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- isomorphism and enumeration -----------------------------------------------

def canonical_code(lattice, limits=DEFAULT_LIMITS):
    """An isomorphism-invariant byte string; equal codes iff the lattices are isomorphic.

    Elements are first partitioned by (down-set size, up-set size, lower covers,
    upper covers); the code is the lexicographically least order matrix over
    all relabelings that respect the partition.

    Raises:
        ResourceLimit: If the number of relabelings exceeds ``limits.permutation_cap``.
    """
    cov = cover_matrix(lattice)
    invariant = [
        (int(lattice.downsize[x]), int(lattice.upsize[x]), int(cov[:, x].sum()), int(cov[x, :].sum()))
        for x in lattice.elements
    ]
    ordered = sorted(lattice.elements, key=lambda x: invariant[x])
    groups = [list(g) for _, g in itertools.groupby(ordered, key=lambda x: invariant[x])]
    relabelings = math.prod(math.factorial(len(g)) for g in groups)
    if relabelings > limits.permutation_cap:
        raise ResourceLimit(f"canonical_code needs {relabelings} relabelings; cap is {limits.permutation_cap}")
    best = None
    for parts in itertools.product(*(itertools.permutations(g) for g in groups)):
        order = [x for part in parts for x in part]
        code = np.packbits(lattice.leq[np.ix_(order, order)]).tobytes()
        if best is None or code < best:
            best = code
    header = lattice.size.to_bytes(4, "big") + b"".join(
        v.to_bytes(4, "big") for x in ordered for v in invariant[x]
    )
    return header + best


def _natural_posets(m):
    """Strict down-sets of every naturally labelled poset on ``m`` points."""
    def extend(below):
        k = len(below)
        if k == m:
            yield tuple(below)
            return
        for mask in range(1 << k):
            ideal = frozenset(i for i in range(k) if (mask >> i) & 1)
            if all(below[i] <= ideal for i in ideal):
                yield from extend(below + [ideal])
    yield from extend([])


def _recognised_names(n, limits):
    candidates = [chain(n)]
    if n == 4:
        candidates.append(boolean(2, limits))
    if n == 5:
        candidates += [m3(), n5()]
    return {canonical_code(c, limits): c.name for c in candidates}


def _lattices_of_size(n, limits):
    if n <= 2:
        return (chain(n),)
    found = {}
    for below in _natural_posets(n - 2):
        leq = np.eye(n, dtype=bool)
        leq[0, :] = True
        leq[:, n - 1] = True
        for k, ideal in enumerate(below):
            for d in ideal:
                leq[d + 1, k + 1] = True
        try:
            candidate = validate_lattice(leq, check_order=False)
        except NotALattice:
            continue
        found.setdefault(canonical_code(candidate, limits), candidate)
    names = _recognised_names(n, limits)
    result = []
    for k, (code, candidate) in enumerate(sorted(found.items()), start=1):
        result.append(candidate.renamed(names.get(code, f"L{n}.{k}")))
    logger.debug(f"Enumerated {len(result)} lattices of size {n}")
    return tuple(result)


def enumerate_lattices(max_size, limits=DEFAULT_LIMITS):
    """Yields one lattice per isomorphism class of each size ``1..max_size``.

    The order is deterministic: by size, then by canonical code.

    Raises:
        InvalidParameter: If ``max_size < 1``.
        ResourceLimit: If ``max_size`` exceeds ``limits.max_enumeration_size``.
    """
    if max_size < 1:
        raise InvalidParameter(f"max_size must be at least 1, got {max_size}")
    if max_size > limits.max_enumeration_size:
        raise ResourceLimit(f"enumeration up to size {max_size} exceeds cap {limits.max_enumeration_size}")
    for n in range(1, max_size + 1):
        yield from _ENUMERATION_CACHE.get_or_compute((n, limits), lambda: _lattices_of_size(n, limits))
