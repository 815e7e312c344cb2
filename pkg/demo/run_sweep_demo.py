"""
Demo: the theorem sweep over every lattice up to a size.

Runs the sweep with a progress bar, prints one line per lattice and a summary,
and optionally writes the rows as CSV. Sizes above the configured
``sweep_max_size`` need ``--cap-sweep``; size 7 takes a few minutes.

    python demo/run_sweep_demo.py 6
    python demo/run_sweep_demo.py 7 --cap-sweep 7 --workers 4 --csv sweep7.csv
"""
import argparse
import sys
import time

from tqdm import tqdm

from frobenius_lab.core.config_manager import get_limits_from_config, read_app_config
from frobenius_lab.core.errors import LabError
from frobenius_lab.core.log_manager import setup_logging
from frobenius_lab.core.serialization import sweep_rows_to_csv
from frobenius_lab.core.sweep import theorem_sweep
from frobenius_lab.core.theorems import EQUIVALENT_COLUMNS

# lattices of each size up to isomorphism
EXPECTED_COUNTS = {1: 1, 2: 1, 3: 1, 4: 2, 5: 5, 6: 15, 7: 53}


def main():
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("max_size", type=int, nargs="?", default=6)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--cap-sweep", type=int)
    parser.add_argument("--csv")
    args = parser.parse_args()

    setup_logging()
    limits = get_limits_from_config(read_app_config()).override(sweep_max_size=args.cap_sweep)
    total = sum(n for size, n in EXPECTED_COUNTS.items() if size <= args.max_size)

    start_time = time.time()
    try:
        with tqdm(total=total, desc=f"Sweeping lattices up to size {args.max_size}") as bar:
            result = theorem_sweep(args.max_size, limits, workers=args.workers, progress=lambda row: bar.update())
    except LabError as e:
        print(f"ERROR: {type(e).__name__}: {e}")
        sys.exit(e.exit_code)
    elapsed = time.time() - start_time

    for row in result.rows:
        agree = "all agree" if len({getattr(row, c) for c in EQUIVALENT_COLUMNS} - {None}) <= 1 else "DISAGREE"
        verdict = "distributive" if row.distributive else "not distributive"
        print(f"{row.name:<12} size {row.size}  {verdict:<16}  {agree}  tight ok: {row.tight_frobenius_ok}"
              + (f"  [{row.error}]" if row.error else ""))

    print(f"\n{len(result.rows)} lattices in {elapsed:.2f}s")
    print(f"  distributive: {sum(bool(row.distributive) for row in result.rows)}")
    print(f"  incomplete:   {len(result.incomplete)}")
    print(f"  violations:   {len(result.violations)}")

    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as f:
            f.write(sweep_rows_to_csv(result.rows))
        print(f"Rows written to {args.csv}")

    sys.exit(0 if result.ok else 1)


if __name__ == "__main__":
    main()
