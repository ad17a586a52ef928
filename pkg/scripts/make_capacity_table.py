#!/usr/bin/env python3
"""Sweep the QoS grid and write the analytic capacity table (and per-reuse
diagnostics) to out/.  The switching points land in the header comments."""

import pathlib
import sys

from mimocap.cli import main

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "out"

if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    sys.exit(
        main(
            [
                "capacity-table",
                str(ROOT / "configs" / "default.ini"),
                "--out",
                str(OUT / "capacity_table.csv"),
                "--diagnostics",
                str(OUT / "capacity_table_per_reuse.csv"),
                *sys.argv[1:],
            ]
        )
    )
