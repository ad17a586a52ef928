#!/usr/bin/env python3
"""Empirical vs Gaussian-approximation SIR CDFs at the worst-case preset
(reuse 7, six users per cell), for both pilot allocation schemes."""

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
                "sir-cdf",
                str(ROOT / "configs" / "default.ini"),
                "--out",
                str(OUT / "sir_cdf.csv"),
                *sys.argv[1:],
            ]
        )
    )
