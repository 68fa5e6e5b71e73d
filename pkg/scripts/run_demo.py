#!/usr/bin/env python3
"""Quick tour of the toolkit on the built-in rectangle/hexagon shapes.

Writes the demo SVG strips and JSON reports into an output directory
(default demo_out/) and prints the parallelity table for both mu variants.
"""

import sys

from shape_transport.cli import main


def run(out: str) -> int:
    rc = 0
    for which in ("table1", "hexagon_zr", "hexagon_kendall"):
        rc = max(rc, main(["--out", out, "demo", which]))
    return rc


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "demo_out"))
