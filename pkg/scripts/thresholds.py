"""EXIT thresholds (Es/N0 and Eb/N0) of every named design, with detector curves cached.

    python scripts/thresholds.py --cache results/detcache
"""
import argparse
from pathlib import Path

import numpy as np

from shapedapsk.constellation import build_apsk
from shapedapsk.designs import DESIGNS
from shapedapsk.exitlab import DetectorFamily, threshold_search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cache", type=Path, default=Path("results/detcache"))
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--lo", type=float, default=8.0)
    ap.add_argument("--hi", type=float, default=12.0)
    args = ap.parse_args()

    families = {}
    print("design,degrees,esn0_db,ebn0_db")
    for name, d in DESIGNS.items():
        key = d.shaping.fingerprint() if d.shaping else None
        if key not in families:
            p0 = d.shaping.p0 if d.shaping else 0.5
            families[key] = DetectorFamily(build_apsk(msb_partition_priors=(p0, 1 - p0)), d.shaping,
                                           samples_per_point=args.samples, cache_dir=args.cache)
        dist = d.distribution()
        thr = threshold_search(dist, family=families[key], snr_lo=args.lo, snr_hi=args.hi,
                               tol_db=0.001)
        eb = thr - 10 * np.log10(float(d.system_rate))
        print(f"{name},{dist.key()},{thr:.3f},{eb:.3f}", flush=True)


if __name__ == "__main__":
    main()
