#!/usr/bin/env python3
"""Desk-scale reflectionless-amplification experiment.

Sends a Gaussian packet through the resonant gain/loss interferometer
(delta = -1.25, gamma = 0.75, flux pi/4) and checks gain = nu^2 = 4,
vanishing reflection, and shape fidelity against the uniform-chain reference.
Extra CLI flags pass through, e.g. --set packet.k0=1.0471975511965976
"""

import sys

from nhscatter.cli import main

if __name__ == "__main__":
    sys.exit(main(["amplify", "--out", "runs/amplify", *sys.argv[1:]]))
