#!/usr/bin/env python3
"""Certification battery: transform identities, scattering-state residuals,
unitarity/symmetry controls, singular-state checks. Exit 0 iff all pass."""

import sys

from nhscatter.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify", "--out", "runs/verify", *sys.argv[1:]]))
