"""Executable forms of the structure theorems for endomap quantales.

* The tensor ``op(L) x L`` is a semigroup with an associative pairing, and
  mix carries both onto the endomaps.
* The image of mix, the tight maps, always carries a Frobenius structure,
  even when ``L`` is not distributive.
* The full endomap quantale carries one exactly when ``L`` is nuclear.

:func:`sweep_row` evaluates every equivalent condition on one lattice.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from typing import NamedTuple, Optional

import numpy as np

from frobenius_lab.core.cache import structure_cache
from frobenius_lab.core.config_manager import DEFAULT_LIMITS
from frobenius_lab.core.errors import LabError, NotTight, ResourceLimit, WitnessInvalid
from frobenius_lab.core.lattice import (
    Lattice,
    canonical_code,
    chain,
    is_completely_distributive,
    is_distributive,
)
from frobenius_lab.core.log_manager import get_logger
from frobenius_lab.core.quantale import (
    FrobeniusReport,
    FrobeniusWitness,
    Quantale,
    WitnessOrigin,
    endo_quantale,
    search_frobenius,
    verify_frobenius,
)
from frobenius_lab.core.slatt import (
    HomLattice,
    SupMap,
    adjunction_unit,
    compose,
    hom_lattice,
    identity,
    is_nuclear,
    one_step,
)

logger = get_logger("frobenius_lab.theorems")


# --- tensor semigroup ----------------------------------------------------------

def _reachable_rows(tensor, element):
    """``reach[b]``: bitmask of every ``d`` with ``(c, d)`` in ``element`` for some ``c`` with ``b`` not below ``c``."""
    base = tensor.right
    rows = [element.row(c) for c in base.elements]
    return [
        _or_all(rows[c] for c in base.elements if not base.le(b, c))
        for b in base.elements
    ]


def _or_all(masks):
    acc = 0
    for m in masks:
        acc |= m
    return acc


def tensor_mult(tensor, d1, d2):
    """The product generated by ``(a, d)`` for ``(a, b)`` in ``d1``, ``(c, d)`` in ``d2`` with ``b`` not below ``c``."""
    reach = _reachable_rows(tensor, d2)
    width = tensor.right.size
    bits = 0
    for a, b in d1.pairs:
        bits |= reach[b] << (a * width)
    return tensor.element(bits)


def tensor_pairing(tensor, d1, d2):
    """True iff some ``(a, b)`` in ``d1`` and ``(c, d)`` in ``d2`` have ``b`` not below ``c`` and ``d`` not below ``a``."""
    reach = _reachable_rows(tensor, d2)
    down = tensor.right.down_masks
    return any(reach[b] & ~down[a] for a, b in d1.pairs)


# --- tight maps ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TightQuantale:
    """The join-closure of the one-step maps of ``base`` with composition.

    Attributes:
        base (Lattice): The lattice whose endomaps are considered.
        maps (HomLattice): The tight maps in pointwise order.
        quantale (Quantale): ``maps.lattice`` with ``f * g`` = f then g; unital iff the identity is tight.
        pairing (np.ndarray): ``pairing[f, g]`` as computed by :func:`tight_pairing`.
        negation (FrobeniusWitness | None): ``l = r``, filled in by :func:`tight_frobenius`.
        report (FrobeniusReport | None): Verification of ``negation`` on ``quantale``.
        negation_well_defined (bool | None): Every zero set of the pairing is a principal down-set.
    """
    base: Lattice
    maps: HomLattice
    quantale: Quantale
    pairing: np.ndarray
    negation: Optional[FrobeniusWitness] = None
    report: Optional[FrobeniusReport] = None
    negation_well_defined: Optional[bool] = None

    def __len__(self):
        return len(self.maps)

    def contains(self, f):
        return f.values in self.maps


def _below_one_steps(lattice, values):
    """``result[a, b]``: ``one_step(a, b) <= f`` for the map with ``values``."""
    not_leq = (~lattice.leq).astype(np.float64)
    # violations[a, b] counts x with x not <= a and b not <= f(x)
    violations = not_leq.T @ not_leq[:, values].T
    return violations == 0


def _tight_vectors(lattice, cap):
    generators = sorted({one_step(lattice, a, b).values for a in lattice.elements for b in lattice.elements})
    found = set(generators)
    queue = list(generators)
    join = lattice.join
    while queue:
        f = queue.pop()
        for g in generators:
            h = tuple(join(u, v) for u, v in zip(f, g))
            if h not in found:
                found.add(h)
                queue.append(h)
                if len(found) > cap:
                    raise ResourceLimit(f"tight maps of {lattice.name} exceed {cap}")
    return found


def tight_maps(lattice, limits=DEFAULT_LIMITS):
    """The tight maps of ``lattice`` as a quantale with their pairing, without negation.

    Raises:
        ResourceLimit: If there are more than ``limits.hom_cap`` tight maps.
        NotTight: If a composite of tight maps falls outside the family.
    """
    def build():
        maps = HomLattice(lattice, lattice, _tight_vectors(lattice, limits.hom_cap), name=f"tight({lattice.name})")
        v = maps.values
        m = len(maps)
        composed = v[np.arange(m)[None, :, None], v[:, None, :]].reshape(m * m, -1)
        mult = np.minimum(maps.indices_of_values(composed), m - 1)
        if not np.array_equal(v[mult], composed):
            bad = int(np.flatnonzero((v[mult] != composed).any(axis=1))[0])
            raise NotTight(f"composite of tight maps {divmod(bad, m)} is not tight")
        unit_values = identity(lattice).values
        unit = maps.index_of(unit_values) if unit_values in maps else None
        quantale = Quantale(maps.lattice, mult.reshape(m, m), unit=unit, name=f"Tight({lattice.name})")
        below = np.stack([_below_one_steps(lattice, row).ravel() for row in v]).astype(np.float64)
        # separated[g, (a, b)]: g(b) not <= a
        separated = np.stack([(~lattice.leq.T[:, row]).ravel() for row in v]).astype(np.float64)
        pairing = (below @ separated.T) > 0
        logger.info(f"tight_maps({lattice.name}): {m} maps, unital={unit is not None}")
        return TightQuantale(lattice, maps, quantale, pairing)

    return structure_cache.get_or_compute(("tight", lattice.key, limits.hom_cap), build)


def tight_pairing(lattice, f, g, limits=DEFAULT_LIMITS):
    """True iff some one-step map ``(a, b)`` below ``f`` has ``g(b)`` not below ``a``.

    Raises:
        NotTight: If ``f`` or ``g`` is not a tight map of ``lattice``.
    """
    tight = tight_maps(lattice, limits)
    for name, h in (("f", f), ("g", g)):
        if h.source != lattice or h.target != lattice or not tight.contains(h):
            raise NotTight(f"{name} = {list(h.values)} is not a tight map of {lattice.name}")
    return bool(tight.pairing[tight.maps.index_of(f), tight.maps.index_of(g)])


def tight_frobenius(lattice, limits=DEFAULT_LIMITS):
    """The tight quantale with negation ``l = r``.

    ``l(g)`` is the largest tight ``f`` whose pairing with ``g`` is false.
    """
    tight = tight_maps(lattice, limits)
    carrier = tight.quantale.carrier
    zeros = ~tight.pairing
    well_defined = all(
        np.array_equal(zeros[:, g], carrier.leq[:, int(carrier.principal_max(zeros[:, g]))])
        for g in range(len(tight))
    )
    l = tuple(int(carrier.principal_max(zeros[:, g])) for g in range(len(tight)))
    witness = FrobeniusWitness(l, l, WitnessOrigin.CONSTRUCTED)
    report = verify_frobenius(tight.quantale, l, l)
    if not (report.all_passed and well_defined):
        logger.warning(f"tight_frobenius({lattice.name}) failed: {report.failed()}, well_defined={well_defined}")
    return replace(tight, negation=witness, report=report, negation_well_defined=well_defined)


def endo_frobenius(lattice, limits=DEFAULT_LIMITS):
    """A Frobenius witness on ``endo_quantale(L)`` built from the tight negation, or None when ``L`` is not nuclear.

    Raises:
        WitnessInvalid: If the tight negation does not verify on the endomap quantale.
    """
    if not is_nuclear(lattice, limits):
        return None
    tight = tight_frobenius(lattice, limits)
    endo = endo_quantale(lattice, limits)
    # both carriers list the same value vectors in the same sorted order
    if not np.array_equal(tight.maps.values, hom_lattice(lattice, lattice, limits).values):
        raise WitnessInvalid(f"tight maps of nuclear {lattice.name} differ from its endomaps")
    report = verify_frobenius(endo, tight.negation.l, tight.negation.r)
    if not report.all_passed:
        raise WitnessInvalid(f"tight negation of {lattice.name} fails {report.failed()} on the endomaps")
    return tight.negation


# --- pseudo-affinity -----------------------------------------------------------

class PseudoAffineWitness(NamedTuple):
    p: SupMap
    c: SupMap
    coatom: int


def pseudo_affine_witness(lattice):
    """A retraction of ``chain(2)`` through ``lattice``, or None for the singleton.

    ``p`` sends top to top; ``c`` sends ``y`` to top iff ``y`` is not below a
    chosen coatom.
    """
    if lattice.size == 1:
        return None
    two = chain(2)
    coatom = max((x for x in lattice.elements if x != lattice.top), key=lambda x: (int(lattice.downsize[x]), -x))
    p = SupMap(two, lattice, (lattice.bottom, lattice.top))
    c = SupMap(lattice, two, tuple(0 if lattice.le(y, coatom) else 1 for y in lattice.elements))
    if compose(p, c) != identity(two):
        raise LabError(f"pseudo-affine retraction failed on {lattice.name}")
    return PseudoAffineWitness(p, c, coatom)


# --- sweep rows ----------------------------------------------------------------

EQUIVALENT_COLUMNS = (
    "distributive",
    "completely_distributive",
    "nuclear",
    "endo_frobenius_found",
    "adjunction_unit_found",
)


@dataclass(frozen=True)
class SweepRow:
    """All theorem columns for one lattice; ``error`` records a per-lattice failure."""
    code: str
    name: str
    size: int
    distributive: Optional[bool] = None
    completely_distributive: Optional[bool] = None
    nuclear: Optional[bool] = None
    endo_frobenius_found: Optional[bool] = None
    tight_frobenius_ok: Optional[bool] = None
    adjunction_unit_found: Optional[bool] = None
    pseudo_affine: Optional[bool] = None
    error: Optional[str] = None

    @property
    def consistent(self):
        """The equivalent columns agree where computed and the tight structure did not fail.

        A row cut short by a resource limit can still be consistent; any other
        error is not.
        """
        if self.error is not None and not self.error.startswith("ResourceLimit"):
            return False
        values = {getattr(self, c) for c in EQUIVALENT_COLUMNS} - {None}
        return len(values) <= 1 and self.tight_frobenius_ok is not False

    @property
    def complete(self):
        return self.error is None

    def as_dict(self):
        return asdict(self)

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]


def sweep_row(lattice, limits=DEFAULT_LIMITS):
    """Evaluates every column on ``lattice``; a :class:`ResourceLimit` leaves later columns empty."""
    values = {}
    code = canonical_code(lattice, limits).hex()
    try:
        values["distributive"] = is_distributive(lattice)
        values["pseudo_affine"] = pseudo_affine_witness(lattice) is not None
        values["completely_distributive"] = is_completely_distributive(lattice, limits)
        values["nuclear"] = is_nuclear(lattice, limits)
        values["adjunction_unit_found"] = adjunction_unit(lattice, limits) is not None
        tight = tight_frobenius(lattice, limits)
        values["tight_frobenius_ok"] = bool(tight.report.all_passed and tight.negation_well_defined)
        values["endo_frobenius_found"] = bool(search_frobenius(endo_quantale(lattice, limits), limits))
    except ResourceLimit as e:
        logger.info(f"sweep_row({lattice.name}) stopped at a resource limit: {e}")
        return SweepRow(code, lattice.name, lattice.size, error=f"ResourceLimit: {e}", **values)
    row = SweepRow(code, lattice.name, lattice.size, **values)
    if not row.consistent:
        logger.warning(f"Theorem columns disagree on {lattice.name}: {row}")
    return row
