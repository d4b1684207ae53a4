#!/usr/bin/env python3
"""Euler echo experiment: pump at (1, 0), signal at (2, 16).

The vertical kinetic energy should burst at the signal's critical time t = 8
and again, through the nonlinear hand-off to the (1, 16) daughter mode, at
the echo time t = 16.  Detected maxima land in the manifest.
"""

import json
import sys
from pathlib import Path

from inviscid_damping_lab.cli import main

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "echo.json"

if __name__ == "__main__":
    rc = main(["echo", "--config", str(CONFIG)])
    if rc == 0:
        manifest = json.load(open("out/echo/manifest.json"))
        print("predicted burst times:", manifest["predicted_times"])
        print("detected local maxima:", manifest["detected_maxima"])
    sys.exit(rc)
