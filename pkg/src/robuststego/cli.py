"""Command-line entry point: embed, extract, attack, bench, analyze.

Exit status: 0 success, 1 operational error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench
from .channel import ChannelSpec, changed_coefficients, recompress
from .coding.stc import StcParams
from .io import encode_jfif, load_coefs, read_pgm, write_jcof, write_pgm
from .jpeg import compress, decompress
from .schemes import SCHEMES, SchemeConfig, embed, extract, message_length


def _load_image(path: str, quality: int | None):
    data = Path(path).read_bytes()
    if data[:2] == b"P5":
        if quality is None:
            raise ValueError("a PGM cover needs --qc to be compressed")
        return compress(read_pgm(data), quality)
    return load_coefs(data)


def _save_image(img, path: str):
    suffix = Path(path).suffix.lower()
    if suffix in (".jpg", ".jpeg", ".jfif"):
        data = encode_jfif(img)
    elif suffix == ".pgm":
        data = write_pgm(decompress(img))
    else:
        data = write_jcof(img)
    Path(path).write_bytes(data)


def _scheme_config(args) -> SchemeConfig:
    return SchemeConfig(
        scheme=args.scheme,
        domain=args.domain,
        quality=args.qc,
        payload=args.payload,
        key=args.key,
        stc=StcParams(args.h, args.key),
        modification_passes=args.passes,
    )


def _pack(bits) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def _unpack(data: bytes, nbits: int | None = None) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    return bits if nbits is None else bits[:nbits]


def _emit(obj):
    print(json.dumps(obj, indent=1))


# ------------------------------------------------------------------ commands


def cmd_embed(args) -> int:
    cfg = _scheme_config(args)
    cover = _load_image(args.cover, args.qc)
    if args.message:
        msg = _unpack(Path(args.message).read_bytes())
    else:
        n = message_length(cover, cfg.payload)
        msg = np.random.default_rng(args.seed).integers(0, 2, n, dtype=np.uint8)
    res = embed(cover, msg, cfg)
    _save_image(res.stego, args.out)
    if args.message_out:
        Path(args.message_out).write_bytes(_pack(msg))
    _emit({"scheme": cfg.scheme, "domain": str(cfg.domain), "msg_len": int(msg.size),
           "changed_elements": int(np.count_nonzero(res.modified)), "stego": args.out})  # fmt: skip
    return 0


def cmd_extract(args) -> int:
    cfg = _scheme_config(args)
    stego = _load_image(args.stego, None)
    out = extract(stego, cfg, args.msg_len)
    if args.out:
        Path(args.out).write_bytes(_pack(out.message))
    # an RS failure is a result, not an operational error
    _emit({"status": "ok" if out.ok else "rs_failure", "msg_len": args.msg_len,
           "rs_failures": out.rs_failures, "message": None if args.out else _pack(out.message).hex()})  # fmt: skip
    return 0


def cmd_attack(args) -> int:
    img = _load_image(args.image, args.quality)
    counts = []
    for _ in range(args.iterations):
        nxt = recompress(img, ChannelSpec(args.quality))
        if nxt.table == img.table:
            counts.append(changed_coefficients(img, nxt))
        img = nxt
    _save_image(img, args.out)
    if args.verbose:
        for k, n in enumerate(counts, 1):
            print(f"pass {k}: {n} coefficients changed", file=sys.stderr)
    return 0


def _bench_config(args) -> bench.BenchConfig:
    cfg = bench.BenchConfig.load(args.config) if args.config else bench.BenchConfig()
    changes = {}
    for name in ("seed", "n_images", "corpus"):
        if getattr(args, name, None) is not None:
            changes[name] = getattr(args, name)
    if getattr(args, "qc", None):
        changes["qualities"] = tuple(args.qc)
    if args.passes is not None or args.domain is not None:
        curves = []
        for c in cfg.curves:
            s = c.scheme
            if s.scheme == "proposed":
                if args.passes is not None:
                    s = s.replace(modification_passes=args.passes)
                if args.domain is not None:
                    s = s.replace(domain=args.domain)
            curves.append(bench.Curve(c.label, s))
        changes["curves"] = tuple(curves)
    return cfg.replace(**changes)


def cmd_bench(args) -> int:
    cfg = _bench_config(args)
    report = bench.run_robustness(cfg, jobs=args.jobs)
    report_path = args.report or cfg.report_path or "report.json"
    csv_path = args.csv or cfg.csv_path or "curves.csv"
    bench.write_report(report, report_path, csv_path)
    for c in report["curves"]:
        print(f"{c['scheme']:>12} qc={c['qc']} payload={c['payload']:.2f} error={c['mean_error_rate']:.5f}")
    if report["failures"]:
        print(f"{len(report['failures'])} per-image failures recorded", file=sys.stderr)
    return 0


def cmd_analyze(args) -> int:
    cfg = _bench_config(argparse.Namespace(**{**vars(args), "passes": None, "domain": None}))
    report = bench.run_sequence_error_analysis(
        cfg, domain=args.domain or "E_2345", payload=args.payload, passes=tuple(args.passes), jobs=args.jobs
    )
    if args.report:
        bench.write_report(report, args.report, args.csv)
    _emit(report["analysis"])
    return 0


# ------------------------------------------------------------------- parsing


def _scheme_args(p, need_payload=True):
    p.add_argument("--scheme", choices=SCHEMES, default="proposed")
    p.add_argument("--qc", type=int, default=65, help="channel (and cover) quality factor")
    if need_payload:
        p.add_argument("--payload", type=float, default=0.05, help="bits per nonzero AC coefficient")
    p.add_argument("--key", type=int, default=SchemeConfig.key, help="shared secret key")
    p.add_argument("--h", type=int, default=StcParams.h, help="STC constraint height")
    p.add_argument("--domain", default=None, help="embedding domain, e.g. E_45")
    p.add_argument("--passes", type=int, default=None, help="modification-with-recompression passes")


def _bench_args(p):
    p.add_argument("--config", help="BenchConfig JSON file")
    p.add_argument("--seed", type=int)
    p.add_argument("--n-images", type=int, dest="n_images")
    p.add_argument("--corpus", help="directory of grayscale images")
    p.add_argument("--qc", type=int, nargs="+", help="channel qualities")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--domain", default=None)
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--csv", help="CSV path")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="robuststego", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="hide a message in a cover image")
    p.add_argument("cover", help="PGM (compressed at --qc), JFIF or JCOF cover")
    p.add_argument("out", help="stego output (.jpg for JFIF, .pgm for pixels, else JCOF)")
    _scheme_args(p)
    p.add_argument("--message", help="message file (raw bytes); random bits otherwise")
    p.add_argument("--message-out", help="write the embedded message bits here")
    p.add_argument("--seed", type=int, default=0, help="seed for the random message")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover a message from a stego image")
    p.add_argument("stego")
    p.add_argument("--msg-len", type=int, required=True, help="message length in bits")
    p.add_argument("--out", help="write the message bytes here")
    _scheme_args(p, need_payload=False)
    p.set_defaults(func=cmd_extract, payload=0.05)

    p = sub.add_parser("attack", help="JPEG re-compression channel")
    p.add_argument("image")
    p.add_argument("out")
    p.add_argument("--quality", type=int, default=65)
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("bench", help="robustness sweep over a corpus")
    _bench_args(p)
    p.add_argument("--passes", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("analyze", help="post-channel sequence errors, modified vs unmodified")
    _bench_args(p)
    p.add_argument("--payload", type=float, default=0.05)
    p.add_argument("--passes", type=int, nargs="+", default=[0, 2])
    p.set_defaults(func=cmd_analyze)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
