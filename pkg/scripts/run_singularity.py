#!/usr/bin/env python3
"""Dynamics at the spectral singularity mu*nu = -1 (delta = 0.75, gamma = 1.25).

Runs the four canonical initial states: both center seeds (persistent
two-sided emission with amplitude ratio 1:nu versus short-lived decay), a
single incident packet (linearly growing scattered norms), and the matched
counter-propagating pair (complete absorption).
"""

import sys

from nhscatter.cli import main

if __name__ == "__main__":
    sys.exit(main(["singularity", "--out", "runs/singularity", *sys.argv[1:]]))
