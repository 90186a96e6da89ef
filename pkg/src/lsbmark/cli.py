"""Command-line front end: embed, extract, attack, evaluate, capacity.

Exit codes: 0 success, 1 usage/parse error, 2 I/O error, 3 capacity error,
4 no watermark found.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .attacks import AttackError, AttackSpec, center_region, parse_attack
from .codec import (
    DEFAULT_THRESHOLD,
    CodecError,
    CorruptHeaderError,
    EmptyWatermarkError,
    Method,
    NoWatermarkFoundError,
    WatermarkTooLargeError,
    capacity,
    detect,
    embed,
    extract,
    max_watermark_pixels,
)
from .images import ImageError, load_argb, load_gray, save_argb, save_gray
from .keystream import InvalidKeyError, SecretKey
from .metrics import ZeroVarianceError, ber, psnr, to_bits

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CAPACITY = 3
EXIT_NO_WATERMARK = 4

KEY_ENV = "LSBMARK_KEY"

EVALUATION_ATTACKS = (
    "none",
    "zero-lsb:k=1",
    "zero-lsb:k=2",
    "cut-center-25",
    "noise:amp=4,seed=1",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def resolve_key(args) -> SecretKey:
    """``--key`` beats ``--key-file`` beats the LSBMARK_KEY variable.

    A key file is read as UTF-8 text with one trailing newline removed, then
    parsed like ``--key`` (so ``hex:...`` works there too).
    """
    if args.key is not None:
        text = args.key
    elif args.key_file is not None:
        try:
            text = Path(args.key_file).read_text(encoding="utf-8")
        except OSError as exc:
            raise ImageError(f"cannot read key file: {exc}") from None
        if text.endswith("\r\n"):
            text = text[:-2]
        elif text.endswith("\n"):
            text = text[:-1]
    elif os.environ.get(KEY_ENV):
        text = os.environ[KEY_ENV]
    else:
        raise UsageError(f"no key given (use --key, --key-file or ${KEY_ENV})")
    return SecretKey.from_text(text)


def _fmt_db(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.2f}"


def cmd_embed(args) -> int:
    host = load_argb(args.host)
    watermark = load_gray(args.watermark)
    key = resolve_key(args)
    method = Method(args.method)
    marked = embed(host, watermark, key, method)
    save_argb(marked, args.out)
    used = 8 * watermark.size
    total = capacity(host, method)
    print(f"method: {method.value}")
    print(f"watermark: {watermark.width}x{watermark.height} ({used} payload bits)")
    print(f"capacity used: {used}/{total} bits ({100.0 * used / total:.2f}%)")
    print(f"psnr: {_fmt_db(psnr(host, marked))} dB")
    return EXIT_OK


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"--size must look like WIDTHxHEIGHT, got {text!r}") from None
    return w, h


def cmd_extract(args) -> int:
    image = load_argb(args.image)
    key = resolve_key(args)
    dims = _parse_size(args.size) if args.size else None
    result = extract(image, key, Method(args.method), dimensions=dims)
    save_gray(result.watermark, args.out)
    wm = result.watermark
    print(f"watermark: {wm.width}x{wm.height}")
    print(f"header_valid: {str(result.header_valid).lower()}")
    print(f"checksum_valid: {str(result.checksum_valid).lower()}")
    return EXIT_OK


def cmd_attack(args) -> int:
    spec = parse_attack(args.spec)
    image = load_argb(args.image)
    save_argb(spec.apply(image), args.out)
    print(f"applied {spec}")
    return EXIT_OK


def cmd_capacity(args) -> int:
    host = load_argb(args.host)
    method = Method(args.method)
    print(f"host: {host.width}x{host.height}")
    print(f"method: {method.value}")
    print(f"payload bits: {capacity(host, method)}")
    print(f"max watermark pixels: {max_watermark_pixels(host, method)}")
    return EXIT_OK


def _evaluation_attack(name: str, host) -> AttackSpec:
    if name == "cut-center-25":
        r = center_region(host, 0.25)
        return parse_attack(f"cut:x={r.x},y={r.y},w={r.w},h={r.h},fill=0")
    return parse_attack(name)


def evaluate(host, watermark, key: SecretKey, threshold: float = DEFAULT_THRESHOLD) -> dict:
    """Run the fixed method x attack grid and return the report dict."""
    for method in Method:
        needed, available = 8 * watermark.size, capacity(host, method)
        if needed > available:
            raise WatermarkTooLargeError(
                f"evaluate needs the watermark to fit both methods; {method.value} "
                f"offers {available} bits, watermark needs {needed}",
                required_bits=needed,
                available_bits=available,
            )
    reference_bits = to_bits(watermark)
    dims = (watermark.width, watermark.height)
    cases = []
    for method in (Method.CLASSIC, Method.MODIFIED):
        marked = embed(host, watermark, key, method)
        for name in EVALUATION_ATTACKS:
            spec = _evaluation_attack(name, host)
            attacked = spec.apply(marked)
            recovered = extract(attacked, key, method, dimensions=dims)
            try:
                extract(attacked, key, method)
                header_valid = True
            except CorruptHeaderError:
                header_valid = True
            except NoWatermarkFoundError:
                header_valid = False
            score, detected = detect(attacked, key, watermark, method, threshold)
            cases.append({
                "method": method.value,
                "attack": str(spec) if name != "cut-center-25" else f"{name} ({spec})",
                "psnr_db": psnr(host, attacked),
                "ber": ber(reference_bits, to_bits(recovered.watermark)),
                "nc": score,
                "detected": bool(detected),
                "header_valid": header_valid,
            })
    return {
        "meta": {
            "key_fingerprint": key.fingerprint(),
            "host": {"width": host.width, "height": host.height},
            "watermark": {"width": watermark.width, "height": watermark.height},
            "threshold": threshold,
        },
        "cases": cases,
    }


def _json_ready(report: dict) -> dict:
    def fix(value):
        if isinstance(value, float) and math.isinf(value):
            return "inf"
        if isinstance(value, dict):
            return {k: fix(v) for k, v in value.items()}
        if isinstance(value, list):
            return [fix(v) for v in value]
        return value

    return fix(report)


def format_table(report: dict) -> str:
    rows = [("method", "attack", "psnr_db", "ber", "nc", "detected", "header")]
    for c in report["cases"]:
        rows.append((
            c["method"], c["attack"], _fmt_db(float(c["psnr_db"])),
            f"{c['ber']:.4f}", f"{c['nc']:.4f}",
            "yes" if c["detected"] else "no", "ok" if c["header_valid"] else "lost",
        ))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows)


def cmd_evaluate(args) -> int:
    host = load_argb(args.host)
    watermark = load_gray(args.watermark)
    key = resolve_key(args)
    report = _json_ready(evaluate(host, watermark, key, args.threshold))
    path = Path(args.report)
    try:
        path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ImageError(f"cannot write report {path}: {exc}") from None
    print(format_table(report))
    return EXIT_OK


def _add_key_args(p):
    p.add_argument("--key", help="secret key (UTF-8 text, or hex:... for raw bytes)")
    p.add_argument("--key-file", help="file holding the key")


def _add_method_arg(p):
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.MODIFIED.value)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lsbmark", description="Spatial-domain LSB watermarking toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("embed", help="hide a grayscale watermark in a PNG host")
    p.add_argument("host")
    p.add_argument("watermark")
    p.add_argument("-o", "--out", required=True)
    _add_key_args(p)
    _add_method_arg(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover a watermark with the key")
    p.add_argument("image")
    p.add_argument("-o", "--out", required=True, help=".pgm or .png output")
    p.add_argument("--size", help="WIDTHxHEIGHT; read the payload even if the header is damaged")
    _add_key_args(p)
    _add_method_arg(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("attack", help="apply an attack, e.g. zero-lsb:k=1")
    p.add_argument("image")
    p.add_argument("spec")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("evaluate", help="run the method x attack grid and write a JSON report")
    p.add_argument("host")
    p.add_argument("watermark")
    p.add_argument("--report", required=True)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    _add_key_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("capacity", help="print payload capacity of a host")
    p.add_argument("host")
    _add_method_arg(p)
    p.set_defaults(func=cmd_capacity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidKeyError, AttackError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ImageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (WatermarkTooLargeError, EmptyWatermarkError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (NoWatermarkFoundError, CorruptHeaderError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_WATERMARK
    except (CodecError, ZeroVarianceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
