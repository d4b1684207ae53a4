#!/usr/bin/env python3
"""Echo-chain amplification sweep: log(total) against sqrt(eta).

Chains the critical intervals for k = floor(sqrt(eta)) .. 1 at kappa = 0.1
over five decades of eta and fits the growth form; the sqrt form should win
the exponent comparison against 0.4 and 0.6.
"""

import json
import sys
from pathlib import Path

from inviscid_damping_lab.cli import main

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "toy.json"

if __name__ == "__main__":
    rc = main(["toy", "--config", str(CONFIG)])
    if rc == 0:
        manifest = json.load(open("out/toy/manifest.json"))
        print("fitted sqrt-eta slope:", manifest["slope"])
        print("exponent comparison r^2:", manifest["r2_by_s"])
        print("implied regularity exponent:", manifest["implied_s"])
    sys.exit(rc)
