"""Command-line front end: ``sscode {geometry,distance,sweep,scaling,decode-debug}``.

Exit status: 0 success, 1 invalid input, 2 internal failure.
Environment: ``SSCODE_OUT_DIR`` prefixes relative output paths,
``SSCODE_THREADS`` sets the default ``--threads``.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .channel import ChannelConfig, SourceMode, transmit
from .codebook import build_codebook, export_codebook_csv
from .decoders import DecoderConfig, decode, select_antennas
from .distance import min_distance, min_distance_pairwise
from .numtheory import ArrayGeometry, GeometryError, bose_chowla_set, load_geometry, save_geometry, verify_sidon
from .sim import SweepPlan, run_sweep, runtime_scaling

DEFAULT_DECODERS = "map,window:z=2,window:z=3,window:z=5,geometric,modgeo:k=9,grmap:k=9:g=N/2"

_ALIASES = {
    "map": "map",
    "window": "window",
    "geometric": "geometric",
    "geo": "geometric",
    "modgeo": "modified-geometric",
    "modified-geometric": "modified-geometric",
    "grmap": "geo-reduced-map",
    "geo-reduced-map": "geo-reduced-map",
}
_ALLOWED_KEYS = {
    "map": set(),
    "window": {"z"},
    "geometric": {"subset", "enum"},
    "modified-geometric": {"k", "subset", "enum"},
    "geo-reduced-map": {"k", "g", "subset", "enum"},
}


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def parse_decoder(spec: str, geom: ArrayGeometry) -> DecoderConfig:
    """``name[:key=val...]``, e.g. ``grmap:k=9:g=N/2`` or ``geometric:subset=10``."""
    name, *opts = spec.strip().split(":")
    kind = _ALIASES.get(name)
    if kind is None:
        raise UsageError(f"unknown decoder {name!r}")
    kw = {"kind": kind}
    for opt in opts:
        key, sep, val = opt.partition("=")
        if not sep:
            raise UsageError(f"decoder option {opt!r} must look like key=value")
        if key not in _ALLOWED_KEYS[kind]:
            raise UsageError(f"option {key!r} does not apply to decoder {kind!r}")
        if key == "g" and val.upper() == "N/2":
            kw["g"] = geom.modulus // 2
        elif key == "subset":
            kw["antenna_subset"] = select_antennas(geom, int(val))
        elif key == "enum":
            kw["enumeration"] = val
        else:
            kw[key] = int(val)
    return DecoderConfig(**kw)


def parse_decoders(text: str, geom: ArrayGeometry) -> list[DecoderConfig]:
    return [parse_decoder(s, geom) for s in text.split(",") if s.strip()]


def parse_snr(text: str) -> list[float]:
    """``lo:step:hi`` (inclusive) or a comma list; ``inf`` means noiseless."""
    text = text.strip()
    if ":" in text:
        try:
            lo, step, hi = (float(v) for v in text.split(":"))
        except ValueError as exc:
            raise UsageError(f"bad SNR range {text!r}; expected lo:step:hi") from exc
        if step <= 0 or hi < lo:
            raise UsageError("SNR range needs step > 0 and hi >= lo")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [round(lo + i * step, 10) for i in range(count)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad SNR list {text!r}") from exc


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _output_path(path: Optional[str]) -> Optional[Path]:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get("SSCODE_OUT_DIR")
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _emit(text: str, out: Optional[str]) -> None:
    path = _output_path(out)
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _geometry(args) -> ArrayGeometry:
    if getattr(args, "geometry_file", None):
        return load_geometry(args.geometry_file)
    return bose_chowla_set(19 if args.m is None else args.m)


def cmd_geometry(args) -> int:
    geom = _geometry(args)
    ok = verify_sidon(geom)
    print(f"M = {geom.m}")
    print(f"N = {geom.modulus}")
    print("positions = " + " ".join(map(str, geom.positions)))
    print(f"Sidon verification: {'PASS' if ok else 'FAIL'}")
    if args.out:
        save_geometry(geom, _output_path(args.out))
    if args.codebook_csv:
        export_codebook_csv(build_codebook(geom), _output_path(args.codebook_csv))
    return 0 if ok else 1


def cmd_distance(args) -> int:
    geom = _geometry(args)
    book = build_codebook(geom)
    report = min_distance_pairwise(book) if args.pairwise else min_distance(book)
    d = report.as_dict(geom.m, geom.modulus)
    payload = {k: d[k] for k in ("m", "n", "d_min", "lower_bound", "upper_bound", "argmin_pair")}
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_sweep(args) -> int:
    geom = _geometry(args)
    plan = SweepPlan(
        m=geom.m,
        snr_db_points=parse_snr(args.snr_db),
        trials_per_point=args.trials,
        decoders=parse_decoders(args.decoders, geom),
        seed=args.seed,
        source_modes=_source_overrides(args.source_mode, geom),
        geometry=geom,
    )
    result = run_sweep(plan, threads=args.threads, timing=not args.no_timing)
    if args.format == "json":
        text = result.to_json(timing=not args.no_timing) + "\n"
    else:
        header = None
        if not args.no_timestamp:
            stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
            header = f"sscode {__version__} sweep m={geom.m} seed={args.seed} generated {stamp}"
        text = result.to_csv(header_line=header, timing=not args.no_timing)
    _emit(text, args.out)
    if args.plot:
        from .plotting import plot_error_rates

        plot_error_rates(result, _output_path(args.plot))
    return 0


def _source_overrides(values: Optional[Sequence[str]], geom) -> Optional[dict]:
    if not values:
        return None
    out = {}
    for item in values:
        spec, sep, mode = item.rpartition("=")
        if not sep:
            raise UsageError(f"--source-mode expects DECODER=MODE, got {item!r}")
        try:
            out[parse_decoder(spec, geom).label] = SourceMode(mode).value
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    return out


def cmd_scaling(args) -> int:
    m_points = _int_list(args.m_points)
    decoders = [parse_decoder(s, bose_chowla_set(m_points[0])) for s in args.decoders.split(",")]
    for d in decoders:
        if d.antenna_subset is not None or (d.kind == "geo-reduced-map" and d.g is not None):
            raise UsageError("scaling runs need size-free decoder options (use g=N/2 implicitly, no subset)")
    report = runtime_scaling(decoders, m_points, trials=args.trials, snr_db=args.snr_db, seed=args.seed)
    _emit(json.dumps(report.as_dict(), indent=2) + "\n", args.out)
    if args.plot:
        from .plotting import plot_scaling

        plot_scaling(report, _output_path(args.plot))
    return 0


def cmd_decode_debug(args) -> int:
    geom = _geometry(args)
    if not 1 <= args.index <= geom.modulus:
        raise UsageError(f"--index must lie in [1, {geom.modulus}]")
    book = build_codebook(geom)
    cfg = parse_decoder(args.decoder, geom)
    snr = parse_snr(args.snr_db)
    if len(snr) != 1:
        raise UsageError("decode-debug takes a single SNR value")
    ch = ChannelConfig(snr[0], SourceMode(args.source_mode), args.seed, args.substream)
    sig = transmit(geom, args.index, ch)
    out = decode(sig, cfg, book)
    payload = {"decoder": cfg.label, "true_index": args.index, "snr_db": snr[0],
               "x_used": [sig.x_used.real, sig.x_used.imag], **out.as_dict()}
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sscode", description="Bose-Chowla sensing subspace codes and DoA decoders.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def geometry_flags(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--m", type=int, default=None, help="prime antenna count (default 19)")
        g.add_argument("--geometry-file", help="load 'M N' / positions file instead of constructing")
        sp.add_argument("--out", help="output path (default: stdout)")

    sp = sub.add_parser("geometry", help="construct and verify a Bose-Chowla array")
    geometry_flags(sp)
    sp.add_argument("--codebook-csv", help="also dump the codebook as CSV (debug)")
    sp.set_defaults(func=cmd_geometry)

    sp = sub.add_parser("distance", help="minimum subspace distance and its bounds, as JSON")
    geometry_flags(sp)
    sp.add_argument("--pairwise", action="store_true", help="use the exhaustive O(N^2) pair scan")
    sp.set_defaults(func=cmd_distance)

    threads_default = int(os.environ.get("SSCODE_THREADS", "1"))

    sp = sub.add_parser("sweep", help="Monte Carlo error rate vs SNR")
    geometry_flags(sp)
    sp.add_argument("--decoders", default=DEFAULT_DECODERS, help=f"comma list of name[:key=val] (default {DEFAULT_DECODERS})")
    sp.add_argument("--snr-db", default="-10:2:10", help="lo:step:hi or comma list (default -10:2:10)")
    sp.add_argument("--trials", type=int, default=1000, help="trials per SNR point (default 1000)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=threads_default, help="worker threads, 0 = auto (default 1)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--source-mode", action="append", metavar="DECODER=MODE",
                    help="override the source model for one decoder (fixed-unit|random-phase)")
    sp.add_argument("--no-timestamp", action="store_true", help="omit the timestamped CSV header line")
    sp.add_argument("--no-timing", action="store_true", help="leave mean_decode_ns empty (byte-reproducible output)")
    sp.add_argument("--plot", help="write an error-rate figure to this path")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("scaling", help="median decode time vs M and fitted log-log slopes")
    sp.add_argument("--decoders", default="map,window:z=2,geometric,modgeo:k=9,grmap:k=9")
    sp.add_argument("--m-points", default="7,13,19,31,43")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--snr-db", type=float, default=10.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.add_argument("--plot", help="write a log-log timing figure to this path")
    sp.set_defaults(func=cmd_scaling)

    sp = sub.add_parser("decode-debug", help="decode one simulated observation and print the outcome")
    geometry_flags(sp)
    sp.add_argument("--decoder", default="map")
    sp.add_argument("--index", type=int, default=1, help="true 1-based grid index")
    sp.add_argument("--snr-db", default="inf")
    sp.add_argument("--source-mode", default="fixed-unit", choices=[m.value for m in SourceMode])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--substream", type=int, default=0)
    sp.set_defaults(func=cmd_decode_debug)
    return p


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    """Glue ``--snr-db -5:1:15`` into ``--snr-db=-5:1:15``; argparse would read -5:1:15 as a flag."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok == "--snr-db":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_join_negative_values(argv))
        return args.func(args)
    except (UsageError, GeometryError, ValueError, OSError) as exc:
        print(f"sscode: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"sscode: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
