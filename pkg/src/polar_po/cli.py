"""Command-line entry point: ``polar-po <command> ...``.

Every command prints its result as canonical JSON (sorted keys) on stdout.
With ``--out-dir`` the result and any CSV are also written there together
with ``manifest.json``; otherwise the manifest goes to stderr.

Exit codes: 0 success, 2 invalid arguments, 1 internal failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=_default) + "\n"


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, int(args.threads))
    from .po_core import default_threads

    return default_threads()


def _snr_range(text: str) -> list[float]:
    """``"1.0:0.25:3.0"`` (inclusive) or a comma list."""
    try:
        if ":" in text:
            lo, step, hi = (float(t) for t in text.split(":"))
            if step <= 0 or hi < lo:
                raise ValueError
            k = int(np.floor((hi - lo) / step + 1e-9))
            return [round(lo + i * step, 10) for i in range(k + 1)]
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"malformed SNR range {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise UsageError(f"malformed integer list {text!r}") from None


# ---------------------------------------------------------------- commands
def cmd_evolve(args):
    from .bec_engine import path_bhattacharyya, path_polynomial
    from .path_algebra import parse_path, path_position
    from .polynomial import format_power

    spec = _spec(args.spec)
    paths = [parse_path(p) for p in args.path]
    out = {"spec": str(spec), "paths": []}
    for a in paths:
        rec = {"path": a, "position": path_position(a),
               "backend": "exact" if args.x is None or args.symbolic else "log-domain"}
        if args.x is None or args.symbolic:
            if len(a) > args.max_exact_length:
                raise UsageError(f"symbolic form limited to length {args.max_exact_length}")
            poly = path_polynomial(spec, a)
            rec["polynomial"] = format_power(poly)
            coef = poly.power_coefficients()
            rec["degree"] = max((k for k, c in enumerate(coef) if c), default=0)
        if args.x is not None:
            rec["value"] = float(path_bhattacharyya(spec, a, float(args.x)))
            rec["x"] = float(args.x)
        out["paths"].append(rec)
    return out, {}


def cmd_check_po(args):
    from .po_core import bmsc_po, dominates

    spec = _spec(args.spec)
    if args.sense == "bec":
        v = dominates(spec, args.a, args.b, method=args.method)
    else:
        v = bmsc_po(spec, args.a, args.b, method=args.method)
    return {"spec": str(spec), "a": args.a, "b": args.b, "sense": args.sense.upper(), **v.to_dict()}, {}


def cmd_enumerate(args):
    from .po_core import enumerate_pairs

    spec = _spec(args.spec)
    hook = None if args.hook == "none" else args.hook
    res = enumerate_pairs(spec, args.N, mother_po_hook=hook, transfer=args.transfer,
                          threads=_threads(args))
    out = res.summary()
    files = {}
    if args.pairs:
        body = {"summary": out, "pairs": res.records(args.pairs)}
        files["pairs.json"] = json.dumps(body, sort_keys=True, separators=(",", ":"), default=_default) + "\n"
    return out, files


def cmd_verify(args):
    from . import theory_checks as tc
    from .path_algebra import build_convolution_mapping

    suites = ["appendixB", "appendixC", "bounds", "transfer", "convmap"] if args.suite == "all" else [args.suite]
    out = {}
    for s in suites:
        if s == "appendixC":
            out[s] = tc.sweep_squaring(tuple(range(1, args.m_max + 1)), args.grid).to_dict()
        elif s == "appendixB":
            out[s] = tc.sweep_geometric_mean(args.N_max, args.draws, args.seed).to_dict()
        elif s == "bounds":
            out[s] = tc.sweep_bounds().to_dict()
        elif s == "transfer":
            out[s] = tc.transfer_soundness().to_dict()
        elif s == "convmap":
            bad = [K for K in range(1, args.K_max + 1) if not build_convolution_mapping(K).is_valid()]
            out[s] = {"suite": s, "tuples": args.K_max, "max_violation": float(len(bad)), "failures": bad}
    out["passed"] = all(not v["failures"] for v in out.values() if isinstance(v, dict))
    return out, {}


def _load_pairs(path):
    with open(path) as fh:
        data = json.load(fh)
    recs = data["pairs"] if isinstance(data, dict) else data
    return [(r["a"], r["b"]) if isinstance(r, dict) else tuple(r) for r in recs]


def cmd_construct(args):
    from .construction import ga_reliabilities, improve_with_pos, pw_sequence, select_info_set

    spec = _spec(args.spec)
    if args.method == "ga":
        order = ga_reliabilities(spec, args.N, args.snr)
        info = select_info_set(order, args.K, spec)
        extra = {}
    else:
        order = pw_sequence(args.N, spec)
        info = select_info_set(order, args.K, spec)
        extra = {}
        if args.method == "improved":
            if args.pairs:
                pairs = _load_pairs(args.pairs)
            else:
                from .po_core import enumerate_pairs

                res = enumerate_pairs(spec, args.N, threads=_threads(args))
                pairs = res.ordered_pairs("combined")
            imp = improve_with_pos(order, pairs, args.K, spec)
            info = imp.info_set
            extra = {"swaps": imp.swaps, "changed": imp.changed, "pairs_used": len(pairs)}
    out = {"method": args.method, "spec": str(spec), "N": args.N, "K": args.K, "provenance": order.provenance,
           "info_set": info, **extra}
    if args.method == "ga":
        out["design_snr_db"] = args.snr
    rows = ["position,path,score,rank"]
    rank = order.rank()
    n = args.N.bit_length() - 1
    for p in range(1, args.N + 1):
        rows.append(f"{p},{format(p - 1, f'0{n}b')},{order.scores[p - 1]!r},{rank[p - 1]}")
    files = {"scores.csv": "\n".join(rows) + "\n"}
    if args.config:
        from .codec_sim import CodeConfig

        cfg = CodeConfig(args.N, args.K, spec, info, label=args.method)
        files["code.json"] = _dumps(cfg.to_dict())
    return out, files


def cmd_simulate(args):
    from .codec_sim import CodeConfig, fer_experiment

    try:
        with open(args.config) as fh:
            cfg = CodeConfig.from_dict(json.load(fh))
    except OSError as e:
        raise UsageError(f"cannot read config: {e}") from None
    Ls = _int_list(args.list) if args.list else list(cfg.list_sizes)
    pts = fer_experiment(cfg, _snr_range(args.snr), max_trials=args.max_trials,
                         target_errors=args.target_errors, seed=args.seed, list_sizes=Ls,
                         threads=_threads(args))
    rows = [p.to_row() for p in pts]
    header = ["snr_db", "L", "trials", "errors", "fer", "ci_lo", "ci_hi"]
    csv = ",".join(header) + "\n" + "".join(",".join(repr(r[h]) for h in header) + "\n" for r in rows)
    out = {"config": cfg.to_dict() | {"info_set_size": cfg.K}, "points": rows, "seed": args.seed}
    out["config"].pop("info_set")
    files = {"fer.csv": csv}
    if args.out:
        Path(args.out).write_text(csv)
    return out, files


def cmd_convmap(args):
    from .path_algebra import build_convolution_mapping

    cm = build_convolution_mapping(args.K)
    return {"K": args.K, "N": cm.N, "mapping": {str(k): v for k, v in cm.as_dict().items()},
            "valid": cm.is_valid()}, {}


def _spec(text):
    from .ratematch import RateMatchSpec

    try:
        return RateMatchSpec.parse(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


# ---------------------------------------------------------------- parser
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polar-po", description="Partial orders of rate-matched polar codes.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", help="write result JSON, CSV files and manifest.json here")
    common.add_argument("--threads", type=int,
                        help="worker threads (default: $POLAR_PO_THREADS, else logical cores)")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("evolve", parents=[common], help="Bhattacharyya function of one or more paths")
    s.add_argument("--spec", default="none", help="rate matching, e.g. punc:1/4, short:3/8, none")
    s.add_argument("--path", nargs="+", required=True, help="path bit strings, first bit outermost")
    s.add_argument("--x", type=float, help="evaluate at this erasure probability")
    s.add_argument("--symbolic", action="store_true", help="also print the polynomial when --x is given")
    s.add_argument("--max-exact-length", type=int, default=12, help="longest path expanded symbolically")
    s.set_defaults(func=cmd_evolve)

    s = sub.add_parser("check-po", parents=[common], help="decide a ⪯ b")
    s.add_argument("--spec", required=True)
    s.add_argument("--a", required=True, help="lesser path")
    s.add_argument("--b", required=True, help="greater path")
    s.add_argument("--sense", choices=["bec", "bmsc"], default="bec",
                   help="erasure channel only, or all symmetric channels")
    s.add_argument("--method", choices=["auto", "exact", "grid"], default="auto")
    s.set_defaults(func=cmd_check_po)

    s = sub.add_parser("enumerate", parents=[common], help="count certified pairs of a code")
    s.add_argument("--spec", required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--hook", choices=["default", "classic", "none"], default="default",
                   help="mother-code order used on shared-prefix suffixes")
    s.add_argument("--transfer", choices=["bounds", "theorem", "corollary", "theorem+corollary"],
                   default="bounds")
    s.add_argument("--pairs", choices=["theorem", "combined"],
                   help="also write pairs.json with this pair set (needs --out-dir)")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("verify", parents=[common], help="run the numerical verification suites")
    s.add_argument("--suite", choices=["appendixB", "appendixC", "bounds", "transfer", "convmap", "all"],
                   default="all")
    s.add_argument("--m-max", type=int, default=4)
    s.add_argument("--grid", type=int, default=2049, help="interior grid points for the squaring suite")
    s.add_argument("--N-max", type=int, default=64)
    s.add_argument("--draws", type=int, default=10_000)
    s.add_argument("--K-max", type=int, default=4096)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("construct", parents=[common], help="information set by GA, PW or PO-improved PW")
    s.add_argument("--method", choices=["ga", "pw", "improved"], required=True)
    s.add_argument("--spec", required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--K", type=int, required=True, help="non-frozen positions, CRC bits included")
    s.add_argument("--snr", type=float, default=2.2, help="GA design SNR in dB")
    s.add_argument("--pairs", help="pairs.json from enumerate (default: enumerate now)")
    s.add_argument("--config", action="store_true", help="also write code.json for simulate")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("simulate", parents=[common], help="SCL frame-error rates on BPSK-AWGN")
    s.add_argument("--config", required=True, help="code.json as written by construct --config")
    s.add_argument("--snr", required=True, help="Eb/N0 grid in dB, lo:step:hi or a comma list")
    s.add_argument("--list", help="list sizes, e.g. 1,2,4,8 (default: from config)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-trials", type=int, default=100_000)
    s.add_argument("--target-errors", type=int, default=100)
    s.add_argument("--out", help="CSV path for the FER table")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("convmap", parents=[common], help="convolution mapping of {1..K} onto {K+1..2K}")
    s.add_argument("--K", type=int, required=True)
    s.set_defaults(func=cmd_convmap)
    return p


def _manifest(args, argv, files: dict[str, str], started: float) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out_dir")}
    return {
        "command": args.command,
        "argv": list(argv),
        "parameters": params,
        "version": __version__,
        "seed": params.get("seed"),
        "started": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(started)),
        "finished": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "outputs": {name: hashlib.sha256(text.encode()).hexdigest() for name, text in sorted(files.items())},
    }


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.threads:
        os.environ["POLAR_PO_THREADS"] = str(args.threads)
    started = time.time()
    try:
        result, files = args.func(args)
    except (UsageError, ValueError) as e:
        print(f"polar-po: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # pragma: no cover - reported, not hidden
        print(f"polar-po: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    text = _dumps(result)
    files = {f"{args.command}.json": text, **files}
    sys.stdout.write(text)
    manifest = _manifest(args, argv, files, started)
    try:
        if args.out_dir:
            d = Path(args.out_dir)
            d.mkdir(parents=True, exist_ok=True)
            for name, body in files.items():
                (d / name).write_text(body)
            (d / "manifest.json").write_text(_dumps(manifest))
        else:
            sys.stderr.write(json.dumps(manifest, sort_keys=True, default=_default) + "\n")
    except OSError as e:
        print(f"polar-po: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
