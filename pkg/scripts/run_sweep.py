#!/usr/bin/env python3
"""Momentum sweep of the closed-form scattering table for one center.

Writes r, t, T, R over k in (0, pi) for both incidence directions; switch
centers with e.g. --set center.kind=onsite --set center.v=2j
"""

import sys

from nhscatter.cli import main

if __name__ == "__main__":
    sys.exit(main(["sweep", "--out", "runs/sweep", *sys.argv[1:]]))
