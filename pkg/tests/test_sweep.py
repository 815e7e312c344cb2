"""Theorem sweep tests.

The default run covers sizes up to 6. The size-7 sweep (78 lattices) and the
benchmark are opt-in: ``pytest -m slow -s`` and ``pytest -m benchmark``.
"""
import pytest
from tqdm import tqdm

from frobenius_lab.core.config_manager import Limits
from frobenius_lab.core.errors import ResourceLimit
from frobenius_lab.core.sweep import theorem_sweep
from frobenius_lab.core.theorems import EQUIVALENT_COLUMNS


def assert_theorems_hold(result):
    for row in result.rows:
        assert row.complete, (row.name, row.error)
        assert row.consistent, row
        assert row.tight_frobenius_ok, row.name
        # the remaining equivalent columns all agree with distributivity
        assert all(getattr(row, c) == row.distributive for c in EQUIVALENT_COLUMNS), row.name
        assert row.pseudo_affine == (row.size > 1), row.name


def test_sweep_up_to_five():
    result = theorem_sweep(5)
    assert len(result.rows) == 10
    assert result.ok
    assert_theorems_hold(result)
    assert [row.size for row in result.rows] == [1, 2, 3, 4, 4, 5, 5, 5, 5, 5]


def test_sweep_up_to_six():
    result = theorem_sweep(6)
    assert len(result.rows) == 25
    assert_theorems_hold(result)
    assert sum(row.distributive for row in result.rows) == 1 + 1 + 1 + 2 + 3 + 5
    codes = [row.code for row in result.rows]
    assert len(set(codes)) == len(codes)


def test_sweep_with_worker_processes():
    inline = theorem_sweep(4)
    pooled = theorem_sweep(4, workers=2)
    assert pooled.rows == inline.rows


def test_sweep_reports_progress():
    seen = []
    theorem_sweep(4, progress=seen.append)
    assert [row.size for row in seen] == [1, 2, 3, 4, 4]


def test_sweep_cap():
    with pytest.raises(ResourceLimit):
        theorem_sweep(7)
    with pytest.raises(ResourceLimit):
        theorem_sweep(4, Limits(sweep_max_size=3))


def test_sweep_rows_cut_short_stay_consistent():
    result = theorem_sweep(5, Limits(hom_cap=20))
    assert result.ok
    assert result.incomplete
    assert all(row.error.startswith("ResourceLimit") for row in result.incomplete)


@pytest.mark.benchmark
def test_sweep_benchmark(benchmark):
    benchmark.extra_info.update({"max_size": 6, "workers": 1})
    result = benchmark.pedantic(theorem_sweep, args=(6,), rounds=3)
    assert result.ok


@pytest.mark.slow
def test_sweep_up_to_seven():
    limits = Limits(sweep_max_size=7)
    with tqdm(total=78, desc="Sweeping lattices up to size 7") as bar:
        result = theorem_sweep(7, limits, progress=lambda row: bar.update())
    assert len(result.rows) == 78
    assert sum(row.size == 7 for row in result.rows) == 53
    assert result.ok
    for row in result.rows:
        if row.complete:
            assert all(getattr(row, c) == row.distributive for c in EQUIVALENT_COLUMNS), row.name
