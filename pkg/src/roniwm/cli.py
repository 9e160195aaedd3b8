"""Command-line interface.

Exit codes: 0 success/authentic, 1 tampered, 2 invalid parameters or
capacity, 3 malformed input. Outputs are written to temporary files and
renamed into place only once every output of a command is ready.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .analysis import (
    KILOBIT,
    TamperSpec,
    clone_tamper,
    emit_report,
    histogram_delta,
    sweep_with_images,
    synthetic_ultrasound,
)
from .auth import HashKey
from .codec import read_dicom, read_pgm, sniff, write_dicom, write_pgm
from .embed import EmbedKey
from .errors import FormatError, ManifestError, ParameterError, WatermarkError
from .image import GrayImage, RoiRect
from .saw import Status, WatermarkManifest, saw_embed, saw_verify

log = logging.getLogger("roniwm")

EXIT_OK, EXIT_TAMPERED, EXIT_PARAMS, EXIT_MALFORMED = 0, 1, 2, 3
DEFAULT_PAYLOADS = "270k,430k,475k,510k,550k"


class _Container:
    """Loaded image plus enough context to write it back in the same format."""

    def __init__(self, img: GrayImage, dataset=None):
        self.img = img
        self.dataset = dataset

    def encode(self, img: GrayImage) -> bytes:
        if self.dataset is not None:
            return write_dicom(self.dataset, img)
        return write_pgm(img)


def _load(path: str) -> _Container:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ParameterError(f"cannot read {path}: {exc.strerror}") from exc
    if sniff(data) == "dicom":
        ds, img = read_dicom(data)
        return _Container(img, ds)
    return _Container(read_pgm(data))


def _write_all(outputs: list[tuple[str, bytes]]) -> None:
    """Write every (path, data) pair or none of them."""
    staged = []
    try:
        for path, data in outputs:
            target = Path(path)
            fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
            staged.append((tmp, target))
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
        for tmp, target in staged:
            os.replace(tmp, target)
    except OSError as exc:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise ParameterError(f"cannot write output: {exc}") from exc


def _hash_key(args) -> HashKey | None:
    if args.hash_key_env:
        value = os.environ.get(args.hash_key_env)
        if value is None:
            raise ParameterError(f"environment variable {args.hash_key_env} is not set")
        return HashKey(value.encode("utf-8"))
    if args.hash_key_file:
        try:
            return HashKey(Path(args.hash_key_file).read_bytes())
        except OSError as exc:
            raise ParameterError(f"cannot read key file: {exc.strerror}") from exc
    return None


def _payloads(text: str) -> list[int]:
    out = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        try:
            out.append(int(float(tok[:-1]) * KILOBIT) if tok.endswith("k") else int(tok))
        except ValueError as exc:
            raise ParameterError(f"bad payload size {tok!r}") from exc
    return out


def cmd_embed(args) -> int:
    if not args.roi:
        raise ParameterError("--roi is required")
    roi = RoiRect.parse(args.roi)
    key = _hash_key(args)
    src = _load(args.input)
    marked, manifest = saw_embed(src.img, roi, EmbedKey(args.key_k), args.lsb, key, args.hash_mode)
    _write_all([(args.output, src.encode(marked)), (args.manifest, manifest.to_json().encode())])
    log.info("embedded %d bits, manifest at %s", manifest.h, args.manifest)
    return EXIT_OK


def cmd_verify(args) -> int:
    key = _hash_key(args)
    src = _load(args.input)
    try:
        text = Path(args.manifest).read_bytes()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest: {exc.strerror}") from exc
    manifest = WatermarkManifest.from_json(text)
    report = saw_verify(src.img, manifest, key)
    print(report.summary())
    if args.restore_out and report.recovered_image is not None:
        _write_all([(args.restore_out, src.encode(report.recovered_image))])
    return {
        Status.AUTHENTIC: EXIT_OK,
        Status.TAMPERED: EXIT_TAMPERED,
        Status.MALFORMED: EXIT_MALFORMED,
    }[report.status]


def _verdicts(img: GrayImage, roi: RoiRect) -> dict:
    from .saw import saw_embed as _embed

    try:
        marked, manifest = _embed(img, roi)
    except ParameterError as exc:
        return {"saw_embed": f"skipped: {exc}"}
    out = {"untampered": saw_verify(marked, manifest).status.value}
    side = min(50, roi.width // 2, roi.height // 2)
    if side >= 1:
        spec = TamperSpec(
            RoiRect(roi.x0, roi.y0, roi.x0 + side, roi.y0 + side),
            RoiRect(roi.x1 - side, roi.y1 - side, roi.x1, roi.y1),
        )
        out[f"clone_{side}x{side}"] = saw_verify(clone_tamper(marked, spec), manifest).status.value
    return out


def cmd_analyze(args) -> int:
    sizes = _payloads(args.payloads)
    if args.input:
        if not args.roi:
            raise ParameterError("--roi is required with --in")
        img, roi = _load(args.input).img, RoiRect.parse(args.roi)
        roi.check_within(img)
    else:
        img, roi = synthetic_ultrasound(seed=args.seed)
    rows, last = [], None
    for row, marked in sweep_with_images(img, roi, sizes, seed=args.seed, k=args.key_k):
        rows.append(row)
        if marked is not None:
            last = marked
    deltas = histogram_delta(img, last) if last is not None else None
    csv_bytes, json_bytes = emit_report(rows, deltas, _verdicts(img, roi))
    prefix = args.output
    _write_all([(f"{prefix}.csv", csv_bytes), (f"{prefix}.json", json_bytes)])
    return EXIT_OK


def cmd_tamper(args) -> int:
    if not (args.clone_src and args.clone_dst):
        raise ParameterError("--clone-src and --clone-dst are required")
    spec = TamperSpec(RoiRect.parse(args.clone_src), RoiRect.parse(args.clone_dst))
    src = _load(args.input)
    _write_all([(args.output, src.encode(clone_tamper(src.img, spec)))])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="roniwm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def keyed(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--hash-key-env", metavar="NAME", help="environment variable holding the hash key")
        g.add_argument("--hash-key-file", metavar="PATH", help="file whose bytes are the hash key")

    e = sub.add_parser("embed", help="watermark an image")
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--out", dest="output", required=True)
    e.add_argument("--manifest", required=True)
    e.add_argument("--roi", help="x0,y0,x1,y1 (x1, y1 exclusive)")
    e.add_argument("--key-k", type=int, default=1)
    e.add_argument("--lsb", type=int, choices=(1, 2), default=1)
    e.add_argument("--hash-mode", choices=("whole", "roi"), default="whole")
    keyed(e)
    e.set_defaults(func=cmd_embed)

    v = sub.add_parser("verify", help="authenticate a watermarked image")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--manifest", required=True)
    v.add_argument("--restore-out", help="write the recovered original here")
    keyed(v)
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("analyze", help="capacity/PSNR sweep and histogram report")
    a.add_argument("--in", dest="input", help="image to analyse (default: synthetic ultrasound)")
    a.add_argument("--out", dest="output", required=True, help="report path prefix (.csv/.json appended)")
    a.add_argument("--roi")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--key-k", type=int, default=1)
    a.add_argument("--payloads", default=DEFAULT_PAYLOADS, help="comma list of bit counts; 'k' suffix = x1024")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("tamper", help="clone one block over another")
    t.add_argument("--in", dest="input", required=True)
    t.add_argument("--out", dest="output", required=True)
    t.add_argument("--clone-src", help="x0,y0,x1,y1")
    t.add_argument("--clone-dst", help="x0,y0,x1,y1")
    t.set_defaults(func=cmd_tamper)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (FormatError, ManifestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except WatermarkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
