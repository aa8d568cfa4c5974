#!/usr/bin/env python3
"""Stability-verdict scan over every class with a representative inside a
lattice disk, for one or more pump modes.  Emits a CSV table per pump.

    python scripts/class_scan.py --pumps 1,1 2,1 1,0 --radius 4
"""

import argparse
import pathlib

from euler_spectra.lattice import (
    WaveVector,
    canonical_label,
    classes_meeting_disk,
    lattice_points_in_disk,
)
from euler_spectra.reporting import format_float
from euler_spectra.subsystem import classify_stability


def parse_vec(text):
    k1, k2 = (int(s) for s in text.split(","))
    return WaveVector(k1, k2)


def scan(p: WaveVector, radius: float) -> str:
    disk_keys = {lab.khat.as_tuple() for lab in classes_meeting_disk(p)}
    labels = {}
    for k in lattice_points_in_disk(int(radius * radius)):
        lab = canonical_label(k, p)
        labels.setdefault(lab.khat.as_tuple(), lab)
    lines = ["khat1,khat2,parallel,meets_disk,kind,sigma"]
    for key in sorted(labels, key=lambda t: (WaveVector(*t).norm2, t)):
        lab = labels[key]
        v = classify_stability(lab)
        sigma = "" if v.sigma is None else format_float(v.sigma)
        lines.append(
            f"{key[0]},{key[1]},{str(lab.parallel).lower()},"
            f"{str(key in disk_keys).lower()},{v.kind.value},{sigma}"
        )
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pumps", nargs="+", type=parse_vec, default=[WaveVector(1, 1)])
    ap.add_argument("--radius", type=float, default=4.0)
    ap.add_argument("--outdir", type=pathlib.Path, default=pathlib.Path("out_scan"))
    args = ap.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    for p in args.pumps:
        table = scan(p, args.radius)
        path = args.outdir / f"classes_p{p.k1}_{p.k2}.csv"
        path.write_text(table)
        undetermined = sum(1 for line in table.splitlines() if "Undetermined" in line)
        print(f"p={p.as_tuple()}: {table.count(chr(10)) - 1} classes, {undetermined} undetermined -> {path}")


if __name__ == "__main__":
    main()
