"""BER campaign for one named design; writes a CSV with a metadata header.

    python scripts/ber_campaign.py shaped-dvb --ebn0 4.8 4.9 5.0 --out results/ber_shaped-dvb.csv
"""
import argparse
import sys
import time
from pathlib import Path

from shapedapsk.designs import DESIGNS
from shapedapsk.simkit import System, SystemConfig, ber_campaign, records_to_csv

# frame lengths that split into whole symbols and whole shaping blocks
DEFAULT_N = {"uniform-dvb": 16200, "uniform-d3": 16200, "uniform-d4": 16200,
             "shaped-dvb": 16200, "shaped-d3": 16198, "shaped-d4": 16198}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("design", choices=sorted(DESIGNS))
    ap.add_argument("--ebn0", type=float, nargs="+", required=True)
    ap.add_argument("--n", type=int)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--min-errors", type=int, default=200)
    ap.add_argument("--min-frame-errors", type=int, default=0)
    ap.add_argument("--max-bits", type=float, default=1e8)
    ap.add_argument("--max-frames", type=int)
    ap.add_argument("--batch", type=int, default=8)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--stop-ber", type=float, help="end the sweep once BER drops below this")
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    n = args.n or DEFAULT_N[args.design]
    system = System(SystemConfig.from_design(DESIGNS[args.design], n))
    t0 = time.time()

    def progress(rec):
        print(f"{args.design} {rec.ebn0_db:.3f} dB frames {rec.frames} errors {rec.bit_errors} "
              f"BER {rec.ber:.3e} FER {rec.fer:.3e} iters {rec.avg_iters:.1f} "
              f"[{time.time() - t0:.0f}s]", file=sys.stderr, flush=True)

    recs = ber_campaign(system, args.ebn0, seed=args.seed, min_errors=args.min_errors,
                        max_bits=args.max_bits, max_frames=args.max_frames, batch=args.batch,
                        workers=args.workers, progress=progress,
                        stop_ber=args.stop_ber, min_frame_errors=args.min_frame_errors)
    meta = {"design": args.design, "config_hash": system.cfg.digest(), "seed": args.seed,
            "realized_R": f"{system.realized_rate}", "n": system.n, "k": system.k,
            "N": system.N, "min_errors": args.min_errors,
            "min_frame_errors": args.min_frame_errors, "max_bits": f"{args.max_bits:g}"}
    text = records_to_csv(recs, meta, args.out)
    if args.out is None:
        print(text, end="")


if __name__ == "__main__":
    main()
