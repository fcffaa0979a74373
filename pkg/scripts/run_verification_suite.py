#!/usr/bin/env python3
"""Full desk-scale verification sweep.

Drives the CLI across the default order grid and writes one artifact per
check into the output directory. Exits nonzero if any verification fails.

Usage: python scripts/run_verification_suite.py [outdir]
"""

import sys
from pathlib import Path

from dini.cli import main

NU_GRID = ("-0.9", "-0.75", "-0.5", "0", "0.5", "1.5", "3")
SANDWICH_NUS = ("-0.75", "-0.25", "0.25", "2")


def run(outdir: Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    failures = []

    def step(name, args):
        code = main(args)
        status = "ok" if code == 0 else f"FAIL({code})"
        print(f"[{status}] {name}")
        if code != 0:
            failures.append(name)

    step("zero-bound", ["verify-zero-bound", "--nu-grid", "32",
                        "--out", str(outdir / "zero_bound.json")])
    for nu in SANDWICH_NUS:
        step(f"sandwich nu={nu}",
             ["verify-sandwich", "--nu", nu, "--t", "0.01,0.1,0.5,1",
              "--grid", "20", "--n-max", "300",
              "--out", str(outdir / f"sandwich_nu{nu}.json")])
    for nu in NU_GRID:
        step(f"heat envelopes nu={nu}",
             ["verify-envelopes", "--kind", "heat", "--nu", nu,
              "--t", "1e-4,1e-3,1e-2,1e-1,1", "--grid", "20", "--n-max", "300",
              "--out", str(outdir / f"env_heat_nu{nu}.json")])
        step(f"long-time envelopes nu={nu}",
             ["verify-envelopes", "--kind", "heat-long", "--nu", nu,
              "--t", "1,2.5,5", "--grid", "20", "--n-max", "300",
              "--out", str(outdir / f"env_heat_long_nu{nu}.json")])
    for nu in ("-0.75", "0", "1.5"):
        step(f"potential envelopes nu={nu}",
             ["verify-envelopes", "--kind", "bessel", "--nu", nu,
              "--sigma", "0.3,0.5,1,1.6", "--grid", "8", "--n-max", "2500",
              "--out", str(outdir / f"env_pot_nu{nu}.json")])
    for nu in ("1.2", "2", "5"):
        step(f"weighted inequalities nu={nu}",
             ["verify-rellich", "--nu", nu, "--trials", "100",
              "--out", str(outdir / f"rellich_nu{nu}.json")])
    for nu in ("-0.5", "1"):
        step(f"boundary convergence nu={nu}",
             ["convergence", "--nu", nu, "--t", "1e-1,1e-2,1e-3,1e-4,1e-5",
              "--grid", "200", "--n-max", "1500",
              "--out", str(outdir / f"convergence_nu{nu}.csv")])

    if failures:
        print(f"\n{len(failures)} verification(s) failed: {failures}")
        return 1
    print(f"\nall verifications passed; artifacts in {outdir}")
    return 0


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("verification_out")
    sys.exit(run(out))
