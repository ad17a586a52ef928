#!/usr/bin/env python3
"""Finite-M admissible-users table over the four QoS presets.  Heavy: the
default config runs 10^4 trials per reported point at M = 500.  Pass
--set overrides (e.g. --set finite_m.trials=1000) for a quicker look."""

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
                "finite-m-table",
                str(ROOT / "configs" / "default.ini"),
                "--out",
                str(OUT / "finite_m_table.csv"),
                *sys.argv[1:],
            ]
        )
    )
