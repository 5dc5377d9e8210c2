#!/usr/bin/env python3
"""Distortion growth under flux deviation, for packets at several momenta.

Tabulates (k0, deviation, gain, distortion) for flux offsets in units of
pi/100 and checks that zero deviation minimizes distortion and that packets
near k0 = pi/2 are the least affected.
"""

import sys

from nhscatter.cli import main

if __name__ == "__main__":
    sys.exit(main(["flux-deviation", "--out", "runs/flux-deviation", *sys.argv[1:]]))
