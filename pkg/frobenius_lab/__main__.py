"""Entrypoint for running Frobenius Lab as a Python module."""
import sys

from frobenius_lab.cli import main


if __name__ == "__main__":
    sys.exit(main())
