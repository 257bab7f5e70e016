"""Command-line entry point: exit | optimize | build-code | simulate | capacity."""
from __future__ import annotations

import argparse
import copy
import json
import sys
import time
from dataclasses import fields
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from .constellation import ConstellationError, build_apsk
from .exitlab import (
    DetectorFamily,
    ThresholdError,
    cnd_curve,
    detector_characteristic,
    optimize_degrees,
    threshold_search,
    vnd_curve,
)
from .ldpc import ConstructionError, write_alist
from .ldpc.degrees import enumerate_candidates, solve_degree_fractions
from .shaping import FramingError, ShapingCode
from .simkit import (
    CapacityRangeError,
    System,
    SystemConfig,
    ber_campaign,
    capacity_estimate,
    capacity_to_csv,
    records_to_csv,
    solve_capacity_limit,
)

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4

_num = {"type": "number"}
_int = {"type": "integer"}
_nums = {"type": "array", "items": _num}


def _section(props: dict) -> dict:
    return {"type": "object", "additionalProperties": False, "properties": props}


SCHEMA = _section({
    "seed": _int,
    "system": _section({
        "ring_sizes": {"type": "array", "items": _int, "minItems": 3, "maxItems": 3},
        "gamma1": _num,
        "gamma2": _num,
        "shaping": {"type": ["array", "null"], "items": {"type": "string", "pattern": "^[01]+$"}},
        "rate": {"type": "string", "pattern": r"^\d+/\d+$"},
        "check_degree": _int,
        "degrees": {"type": "array", "items": _int, "minItems": 1},
        "a2": {"type": ["number", "null"]},
        "n": _int,
        "alist": {"type": ["string", "null"]},
        "code_seed": _int,
        "pi1_seed": _int,
        "pi2_seed": _int,
        "max_iters": _int,
        "early_stop": {"type": "boolean"},
        "ebn0_db": _nums,
    }),
    "exit": _section({
        "esn0_db": _nums,
        "ia_points": _int,
        "samples": _int,
        "step_db": _num,
        "cache_dir": {"type": ["string", "null"]},
        "eps": _num,
        "delta": _num,
        "threshold": {"type": "boolean"},
        "snr_lo": _num,
        "snr_hi": _num,
    }),
    "optimize": _section({
        "D": _int,
        "top_n": _int,
        "dv_max": _int,
        "grid_step": _num,
    }),
    "simulate": _section({
        "min_errors": _int,
        "min_frame_errors": _int,
        "max_bits": _num,
        "max_frames": {"type": ["integer", "null"]},
        "batch": _int,
    }),
    "capacity": _section({
        "esn0_db": _nums,
        "target_rate": _num,
        "samples": _int,
        "lo_db": _num,
        "hi_db": _num,
    }),
    "output": _section({"dir": {"type": "string"}, "threads": _int}),
})

DEFAULTS = {
    "seed": 0,
    "system": SystemConfig().to_dict(),
    "exit": {"esn0_db": [9.5], "ia_points": 21, "samples": 200_000, "step_db": 0.1,
             "cache_dir": None, "eps": 0.001, "delta": 0.001, "threshold": False,
             "snr_lo": 6.0, "snr_hi": 14.0},
    "optimize": {"D": 3, "top_n": 10, "dv_max": 25, "grid_step": 0.01},
    "simulate": {"min_errors": 200, "min_frame_errors": 0, "max_bits": 1e8, "max_frames": None, "batch": 8},
    "capacity": {"esn0_db": [float(x) for x in np.arange(0.0, 16.5, 1.0)], "target_rate": 3.0,
                 "samples": 200_000, "lo_db": 0.0, "hi_db": 20.0},
    "output": {"dir": "out", "threads": 1},
}


class ConfigError(Exception):
    pass


class Infeasible(Exception):
    pass


def _line_of(text: str, path) -> int | None:
    """Best-effort line number of a JSON path inside ``text``."""
    pos, line = 0, None
    for key in path:
        if isinstance(key, int):
            continue
        hit = text.find(f'"{key}"', pos)
        if hit < 0:
            break
        pos = hit + 1
        line = text.count("\n", 0, hit) + 1
    return line


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        out[k] = _merge(out[k], v) if isinstance(v, dict) and isinstance(out.get(k), dict) else v
    return out


def load_config(path: str | None) -> dict:
    """Parse, validate and default-fill a JSON run config; raises ConfigError."""
    if path is None:
        return copy.deepcopy(DEFAULTS)
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(doc),
                    key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        msgs = []
        for e in errors:
            where = _line_of(text, list(e.absolute_path))
            if e.validator == "additionalProperties":
                # anchor unknown keys at their own line
                extra = [k for k in e.instance if k not in e.schema.get("properties", {})]
                where = _line_of(text, list(e.absolute_path) + extra[:1]) or where
            msgs.append(f"{path}:{where or 1}: {e.message}")
        raise ConfigError("\n".join(msgs))
    return _merge(DEFAULTS, doc)


def system_config(cfg: dict) -> SystemConfig:
    s = dict(cfg["system"])
    s["ring_sizes"] = tuple(s["ring_sizes"])
    s["degrees"] = tuple(s["degrees"])
    return SystemConfig(**{f.name: s[f.name] for f in fields(SystemConfig)})


def _shaping(cfg) -> ShapingCode | None:
    words = cfg["system"]["shaping"]
    return ShapingCode.from_strings(words) if words else None


def _constellation(cfg):
    s = cfg["system"]
    sh = _shaping(cfg)
    p0 = sh.p0 if sh is not None else 0.5
    return build_apsk(s["ring_sizes"], s["gamma1"], s["gamma2"], (p0, 1 - p0))


def _system_rate(cfg) -> Fraction:
    sh = _shaping(cfg)
    rs = sh.rate if sh is not None else Fraction(1)
    m = int(np.log2(sum(cfg["system"]["ring_sizes"])))
    return Fraction(cfg["system"]["rate"]) * (m + rs - 1)


def _distribution(cfg):
    s = cfg["system"]
    dist = solve_degree_fractions(s["rate"], s["check_degree"], tuple(s["degrees"]), a2=s["a2"])
    if dist is None:
        raise Infeasible(f"degrees {s['degrees']} are infeasible at rate {s['rate']}, "
                         f"dc={s['check_degree']}")
    return dist


def _family(cfg) -> DetectorFamily:
    e = cfg["exit"]
    return DetectorFamily(_constellation(cfg), _shaping(cfg), np.linspace(0, 1, e["ia_points"]),
                          e["samples"], cfg["seed"], e["step_db"], e["cache_dir"])


def cmd_exit(cfg, out: Path) -> dict:
    e = cfg["exit"]
    dist = _distribution(cfg)
    c, sh = _constellation(cfg), _shaping(cfg)
    ia = np.linspace(0, 1, e["ia_points"])
    written = []
    for s in e["esn0_db"]:
        det = detector_characteristic(c, sh, s, ia, e["samples"], cfg["seed"])
        det.to_csv(out / f"detector_{s:.3f}.csv")
        vnd_curve(det, dist).to_csv(out / f"vnd_{s:.3f}.csv")
        written += [f"detector_{s:.3f}.csv", f"vnd_{s:.3f}.csv"]
    cnd_curve(dist.check_degree, ia).to_csv(out / "cnd.csv")
    written.append("cnd.csv")
    result = {"files": written}
    if e["threshold"]:
        try:
            thr = threshold_search(dist, family=_family(cfg), snr_lo=e["snr_lo"],
                                   snr_hi=e["snr_hi"], eps=e["eps"], delta=e["delta"])
        except ThresholdError as exc:
            raise Infeasible(str(exc)) from None
        R = float(_system_rate(cfg))
        result.update(threshold_esn0_db=thr, threshold_ebn0_db=thr - 10 * np.log10(R))
    return result


def format_candidate(dist, thr_esn0: float, R: float) -> str:
    rows = " / ".join(f"{d} {a:.3f} {b:.3f}" for d, a, b in
                      zip(dist.degrees, dist.node_fracs, dist.edge_fracs))
    return f"{rows}   Es/N0 {thr_esn0:.3f} dB  Eb/N0 {thr_esn0 - 10 * np.log10(R):.3f} dB"


def cmd_optimize(cfg, out: Path) -> dict:
    s, o, e = cfg["system"], cfg["optimize"], cfg["exit"]
    cands = enumerate_candidates(s["rate"], s["check_degree"], o["D"], dv_max=o["dv_max"],
                                 grid_step=o["grid_step"])
    if not cands:
        raise Infeasible(f"no feasible degree distribution for rate {s['rate']}, "
                         f"dc={s['check_degree']}, D={o['D']}")
    ranked = optimize_degrees(s["rate"], s["check_degree"], o["D"], top_n=o["top_n"],
                              family=_family(cfg), snr_lo=e["snr_lo"], snr_hi=e["snr_hi"],
                              eps=e["eps"], delta=e["delta"], candidates=cands)
    if not ranked:
        raise Infeasible(f"no candidate opens the tunnel below {e['snr_hi']} dB")
    R = float(_system_rate(cfg))
    lines = [f"# rate {s['rate']}  dc {s['check_degree']}  D {o['D']}  R {R:g}  "
             f"candidates {len(cands)}",
             "# rank  d a b / ...   threshold"]
    lines += [f"{i + 1:3d}  {format_candidate(rc.dist, rc.threshold_db, R)}"
              for i, rc in enumerate(ranked)]
    (out / "optimize_report.txt").write_text("\n".join(lines) + "\n")
    return {"report": "optimize_report.txt", "best": ranked[0].dist.to_dict(),
            "best_threshold_esn0_db": ranked[0].threshold_db}


def cmd_build_code(cfg, out: Path) -> dict:
    system = System(system_config(cfg))
    write_alist(system.H, out / "code.alist")
    return {"alist": "code.alist", "n": system.n, "k": system.k, "N": system.N,
            "four_cycles": system.H.count_4cycles()}


def cmd_simulate(cfg, out: Path) -> dict:
    sim = cfg["simulate"]
    system = System(system_config(cfg))

    def progress(rec):
        print(f"  Eb/N0 {rec.ebn0_db:.2f}  frames {rec.frames}  bit errors {rec.bit_errors}  "
              f"BER {rec.ber:.3e}", file=sys.stderr, flush=True)

    recs = ber_campaign(system, cfg["system"]["ebn0_db"], seed=cfg["seed"],
                        min_errors=sim["min_errors"], max_bits=sim["max_bits"],
                        max_frames=sim["max_frames"], batch=sim["batch"],
                        workers=cfg["output"]["threads"], progress=progress,
                        min_frame_errors=sim["min_frame_errors"])
    meta = {"config_hash": system.cfg.digest(), "seed": cfg["seed"],
            "realized_R": f"{system.realized_rate} ({float(system.realized_rate):.6f})",
            "n": system.n, "k": system.k, "N": system.N}
    records_to_csv(recs, meta, out / "ber.csv")
    return {"csv": "ber.csv", "points": len(recs)}


def cmd_capacity(cfg, out: Path) -> dict:
    cap = cfg["capacity"]
    c = _constellation(cfg)
    grid = np.asarray(cap["esn0_db"], dtype=float)
    mi = capacity_estimate(c, grid, cap["samples"], cfg["seed"])
    try:
        limit = solve_capacity_limit(c, cap["target_rate"], cap["lo_db"], cap["hi_db"],
                                     cap["samples"], cfg["seed"])
    except CapacityRangeError as exc:
        raise Infeasible(str(exc)) from None
    meta = {"constellation": c.fingerprint()[:16], "msb_p0": f"{c.msb_p0:.6f}",
            "seed": cfg["seed"], "target_R": cap["target_rate"],
            "limit_ebn0_db": f"{limit:.4f}"}
    (out / "capacity.csv").write_text(capacity_to_csv(grid, mi, meta))
    return {"csv": "capacity.csv", "limit_ebn0_db": limit}


COMMANDS = {
    "exit": cmd_exit,
    "optimize": cmd_optimize,
    "build-code": cmd_build_code,
    "simulate": cmd_simulate,
    "capacity": cmd_capacity,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shapedapsk", description=__doc__)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--seed", type=int, help="master seed (overrides config)")
    p.add_argument("--out-dir", help="output directory (overrides config)")
    p.add_argument("--threads", type=int, help="worker processes (overrides config)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error:\n{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out_dir is not None:
        cfg["output"]["dir"] = args.out_dir
    if args.threads is not None:
        cfg["output"]["threads"] = args.threads
    if cfg["output"]["threads"] < 1:
        print("config error: threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    print(json.dumps({"command": args.command, "config": cfg}, indent=2))
    t0 = time.time()
    try:
        out = Path(cfg["output"]["dir"])
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}_config.json").write_text(json.dumps(cfg, indent=2) + "\n")
        result = COMMANDS[args.command](cfg, out)
    except (Infeasible, ConstructionError, FramingError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConstellationError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    result["seconds"] = round(time.time() - t0, 2)
    print(json.dumps(result, indent=2, default=str))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
