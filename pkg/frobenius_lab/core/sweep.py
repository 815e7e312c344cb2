"""The exhaustive theorem sweep over all small lattices."""
from __future__ import annotations

from concurrent import futures
from dataclasses import dataclass

from frobenius_lab.core.config_manager import DEFAULT_LIMITS
from frobenius_lab.core.errors import ResourceLimit
from frobenius_lab.core.lattice import enumerate_lattices
from frobenius_lab.core.log_manager import get_logger
from frobenius_lab.core.theorems import SweepRow, sweep_row

logger = get_logger("frobenius_lab.sweep")


@dataclass(frozen=True)
class SweepResult:
    rows: tuple

    @property
    def violations(self):
        """Rows whose theorem columns disagree."""
        return [row for row in self.rows if not row.consistent]

    @property
    def incomplete(self):
        return [row for row in self.rows if not row.complete]

    @property
    def ok(self):
        return not self.violations


def _row_task(lattice, limits):
    try:
        return sweep_row(lattice, limits)
    except Exception as e:
        logger.error(f"Unexpected error in sweep_row for {lattice.name}: {e}")
        return SweepRow("", lattice.name, lattice.size, error=f"{type(e).__name__}: {e}")


def theorem_sweep(max_size, limits=DEFAULT_LIMITS, workers=1, progress=None):
    """One :class:`SweepRow` per enumerated lattice of size ``1..max_size``, in enumeration order.

    Args:
        max_size (int): Largest lattice size.
        limits (Limits): Caps; ``limits.sweep_max_size`` bounds ``max_size``.
        workers (int): Worker processes; ``1`` computes every row inline.
        progress (Callable[[SweepRow], None], optional): Called once per finished row.

    Returns:
        SweepResult: The rows and their consistency verdicts.

    Raises:
        ResourceLimit: If ``max_size`` exceeds ``limits.sweep_max_size``.
    """
    if max_size > limits.sweep_max_size:
        raise ResourceLimit(f"sweep up to size {max_size} exceeds cap {limits.sweep_max_size}")
    lattices = list(enumerate_lattices(max_size, limits))
    logger.info(f"Sweeping {len(lattices)} lattices up to size {max_size} with {workers} worker(s)")
    rows = [None] * len(lattices)
    if workers <= 1:
        for i, lattice in enumerate(lattices):
            rows[i] = _row_task(lattice, limits)
            if progress is not None:
                progress(rows[i])
    else:
        with futures.ProcessPoolExecutor(max_workers=workers) as pool:
            pending = {pool.submit(_row_task, lattice, limits): i for i, lattice in enumerate(lattices)}
            for future in futures.as_completed(pending):
                i = pending[future]
                try:
                    rows[i] = future.result()
                except Exception as e:
                    logger.error(f"Sweep worker failed on {lattices[i].name}: {e}")
                    rows[i] = SweepRow("", lattices[i].name, lattices[i].size, error=f"{type(e).__name__}: {e}")
                if progress is not None:
                    progress(rows[i])
    result = SweepResult(tuple(rows))
    if result.violations:
        logger.warning(f"{len(result.violations)} sweep rows violate the theorem columns")
    else:
        logger.info(f"Sweep finished: {len(rows)} rows, all consistent")
    return result
