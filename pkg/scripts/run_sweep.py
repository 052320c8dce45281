#!/usr/bin/env python3
"""Write the default bound sweep (K=32, L in {2,5,8,12}, B=1..32) to sweep.csv.

Extra CLI flags pass straight through, e.g.::

    python3 scripts/run_sweep.py --K 64 --L 2,4 --out wide.csv
"""
import sys

from bbp_secrecy.cli import main

if __name__ == "__main__":
    sys.exit(main(["sweep", *sys.argv[1:]]))
