#!/usr/bin/env python3
"""Incoherent absorption of a mixed state parked behind a hard wall.

Evolves the uniform site mixture over [-20, -1] for resonant absorbers with
nu in {0.5, 0.4, 0.1} and records the total Dirac probability P(t); smaller
nu absorbs more completely.
"""

import sys

from nhscatter.cli import main

if __name__ == "__main__":
    sys.exit(main(["absorb", "--out", "runs/absorb", *sys.argv[1:]]))
