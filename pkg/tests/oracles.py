"""Brute-force reference computations the fast implementations are checked against."""
import itertools

import networkx as nx
import numpy as np


def brute_force_sup_maps(source, target):
    """Every function source -> target filtered by bottom and binary-join preservation."""
    found = []
    for values in itertools.product(target.elements, repeat=source.size):
        if values[source.bottom] != target.bottom:
            continue
        if all(values[source.join(x, y)] == target.join(values[x], values[y])
               for x, y in itertools.combinations(source.elements, 2)):
            found.append(values)
    return found


def brute_force_lattice_count(n):
    """Lattices of size ``n`` up to isomorphism, by filtering all bounded relations."""
    if n <= 2:
        return 1
    middle = list(range(1, n - 1))
    pairs = [(a, b) for a in middle for b in middle if a != b]
    representatives = []
    for chosen in itertools.product((False, True), repeat=len(pairs)):
        leq = np.eye(n, dtype=bool)
        leq[0, :] = True
        leq[:, n - 1] = True
        for (a, b), on in zip(pairs, chosen):
            leq[a, b] = on
        if not _is_lattice_order(leq):
            continue
        graph = nx.DiGraph([(int(a), int(b)) for a, b in np.argwhere(leq) if a != b])
        if not any(nx.is_isomorphic(graph, other) for other in representatives):
            representatives.append(graph)
    return len(representatives)


def _is_lattice_order(leq):
    n = leq.shape[0]
    strict = leq & ~np.eye(n, dtype=bool)
    if (strict & strict.T).any():
        return False
    if ((leq.astype(int) @ leq.astype(int) > 0) & ~leq).any():
        return False
    for x, y in itertools.combinations(range(n), 2):
        upper = np.flatnonzero(leq[x] & leq[y])
        if not any(leq[u, upper].all() for u in upper):
            return False
    return True


def brute_force_totally_below(lattice):
    """Pairs ``(y, x)`` checked against every subset of the lattice."""
    subsets = [s for k in range(lattice.size + 1) for s in itertools.combinations(lattice.elements, k)]
    return {
        (y, x)
        for x, y in itertools.product(lattice.elements, repeat=2)
        if all(any(lattice.le(y, s) for s in subset)
               for subset in subsets if lattice.le(x, lattice.join_of(subset)))
    }
