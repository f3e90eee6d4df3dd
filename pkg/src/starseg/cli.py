"""Command-line front end.

Subcommands: ``decompose``, ``segment``, ``evaluate``, ``sweep``, ``synth``.
Exit status is 0 on success, 1 on usage errors and 2 on data errors.  All
diagnostics go to stderr.  Outputs are rendered in memory first and then
written through a temporary file and an atomic rename, so a failing run
leaves no partial files behind.
"""

import argparse
import os
import sys
import tempfile
from pathlib import Path

from . import fileio
from .errors import StarsegError
from .evaluation import confusion, metrics, overlay
from .segmentation import (
    SCORE_MODES,
    ThresholdPolicy,
    binarize,
    score_map,
    select_optimal_level,
    sweep_levels,
)
from .starlet import starlet_decompose
from .synth import SynthParams, generate

DEFAULT_LEVELS = 6
DEFAULT_JMIN = 3
DEFAULT_RANGE = (3, 10)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")

    def exit(self, status=0, message=None):
        # --help exits 0; anything else argparse wants to abort is a usage error
        if message:
            sys.stderr.write(message)
        if status:
            raise UsageError(message or "usage error")
        raise SystemExit(0)


def _level_range(text):
    lo, sep, hi = text.partition("..")
    try:
        lo, hi = int(lo), int(hi if sep else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _policy(text):
    try:
        return ThresholdPolicy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pair(text, conv=float):
    lo, sep, hi = text.partition("..")
    try:
        return conv(lo), conv(hi if sep else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None


def _add_score_options(p):
    p.add_argument("--jmin", type=int, default=DEFAULT_JMIN,
                   help="first detail level kept in the score map (default 3)")
    p.add_argument("--threshold", type=_policy, default=ThresholdPolicy("otsu"),
                   help="otsu | positive | fixed:<t> (default otsu)")
    p.add_argument("--score", choices=[s.replace("_", "-") for s in SCORE_MODES], default="band",
                   help="score map: band = sum of kept detail levels (default); "
                        "band-minus-input = that sum minus the input image")


def build_parser():
    parser = _Parser(prog="starseg", description="Starlet segmentation of bright isotropic particles.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("decompose", help="write starlet detail planes and residual")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--raw-csv", action="store_true", help="also dump raw plane values as CSV")

    p = sub.add_parser("segment", help="segment an image into a binary mask")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--score-map", type=Path, help="also write the min-max normalized score map")
    _add_score_options(p)

    p = sub.add_parser("evaluate", help="compare a predicted mask with ground truth")
    p.add_argument("--pred", required=True, type=Path)
    p.add_argument("--gt", required=True, type=Path)
    p.add_argument("--overlay", type=Path, help="color comparison image (.ppm or .png)")
    p.add_argument("--out", type=Path, help="metrics CSV (default: stdout)")
    p.add_argument("--image-id", help="row label (default: prediction file stem)")
    p.add_argument("--level", type=int, default=0, help="level recorded in the CSV row")

    p = sub.add_parser("sweep", help="segment over a range of levels and pick the best")
    p.add_argument("--input", required=True, type=Path, action="append",
                   help="image; repeat together with --gt for a batch")
    p.add_argument("--gt", required=True, type=Path, action="append")
    p.add_argument("--range", type=_level_range, default=DEFAULT_RANGE, dest="level_range",
                   help="levels LO..HI (default 3..10)")
    p.add_argument("--out", type=Path, help="report CSV (default: stdout)")
    _add_score_options(p)

    p = sub.add_parser("synth", help="generate a synthetic image and its truth mask")
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--name", default="synth")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=SynthParams.width)
    p.add_argument("--height", type=int, default=SynthParams.height)
    p.add_argument("--blobs", type=int, default=SynthParams.blob_count)
    p.add_argument("--radius", type=_pair, default=SynthParams.radius_range, help="RMIN..RMAX")
    p.add_argument("--peak", type=float, default=SynthParams.blob_peak)
    p.add_argument("--background", type=float, default=SynthParams.background_level)
    p.add_argument("--roughness", type=float, default=SynthParams.roughness_amplitude)
    p.add_argument("--noise", type=float, default=SynthParams.noise_sigma)
    p.add_argument("--allow-overlap", action="store_true")
    return parser


def _write_atomic(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _commit(outputs):
    for path, data in outputs:
        _write_atomic(path, data)


def _read(path, reader=fileio.read_image):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise StarsegError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return reader(data)
    except StarsegError as exc:
        raise StarsegError(f"{path}: {exc}") from exc


def _image_fmt(path):
    return "png" if Path(path).suffix.lower() == ".png" else "pgm"


def _score(args):
    return args.score.replace("-", "_")


def _check_levels(args):
    if args.jmin < 1:
        raise UsageError(f"--jmin must be >= 1, got {args.jmin}")
    levels = args.levels if hasattr(args, "levels") else args.level_range[0]
    if levels < args.jmin:
        raise UsageError(
            f"levels must be >= j_min={args.jmin}: the score map sums detail levels "
            f"{args.jmin}..L (got L={levels})"
        )


def _decompose(args):
    if args.levels < 1:
        raise UsageError(f"--levels must be >= 1, got {args.levels}")
    img = _read(args.input)
    d = starlet_decompose(img, args.levels)
    outputs = []
    for j, w in enumerate(d.details, start=1):
        outputs.append((args.out_dir / f"w{j}.pgm", fileio.write_image(fileio.minmax_normalize(w))))
        if args.raw_csv:
            outputs.append((args.out_dir / f"w{j}.csv", fileio.write_plane_csv(w)))
    outputs.append((args.out_dir / f"c{d.levels}.pgm", fileio.write_image(d.residual)))
    if args.raw_csv:
        outputs.append((args.out_dir / f"c{d.levels}.csv", fileio.write_plane_csv(d.residual)))
    return outputs


def _segment(args):
    _check_levels(args)
    img = _read(args.input)
    d = starlet_decompose(img, args.levels)
    s = score_map(d, img, args.jmin, _score(args))
    outputs = [(args.out, fileio.write_mask(binarize(s, args.threshold), _image_fmt(args.out)))]
    if args.score_map:
        outputs.append((args.score_map,
                        fileio.write_image(fileio.minmax_normalize(s), _image_fmt(args.score_map))))
    return outputs


def _csv_out(args, data):
    if args.out:
        return [(args.out, data)]
    sys.stdout.buffer.write(data)
    sys.stdout.flush()
    return []


def _evaluate(args):
    pred = _read(args.pred, fileio.read_mask)
    gt = _read(args.gt, fileio.read_mask)
    c = confusion(pred, gt)
    m = metrics(c)
    image_id = args.image_id or args.pred.stem
    row = fileio.ReportRow(image_id, args.level, c.tp, c.fp, c.fn, c.tn,
                           m.precision, m.recall, m.accuracy, m.f1)
    outputs = []
    if args.overlay:
        fmt = "png" if args.overlay.suffix.lower() == ".png" else "ppm"
        outputs.append((args.overlay, fileio.write_overlay(overlay(pred, gt), fmt)))
    data = fileio.write_metrics_csv([row])
    if args.out:
        return outputs + [(args.out, data)]
    _commit(outputs)
    return _csv_out(args, data)


def _sweep(args):
    _check_levels(args)
    if len(args.input) != len(args.gt):
        raise UsageError("--input and --gt must be given the same number of times")
    lo, hi = args.level_range
    rows = []
    for img_path, gt_path in zip(args.input, args.gt):
        img = _read(img_path)
        gt = _read(gt_path, fileio.read_mask)
        result = sweep_levels(img, gt, lo, hi, args.threshold, args.jmin, _score(args))
        if result.capped_at is not None:
            print(f"starseg: {img_path}: image too small beyond L={result.capped_at}; "
                  f"sweep capped ({lo}..{hi} requested)", file=sys.stderr)
        rows += fileio.report_rows(img_path.stem, result, select_optimal_level(result))
    return _csv_out(args, fileio.write_metrics_csv(rows))


def _synth(args):
    params = SynthParams(
        width=args.width, height=args.height, blob_count=args.blobs,
        radius_range=args.radius, blob_peak=args.peak, background_level=args.background,
        roughness_amplitude=args.roughness, noise_sigma=args.noise,
        allow_overlap=args.allow_overlap, seed=args.seed,
    )
    try:
        params.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sample = generate(params)
    return [
        (args.out_dir / f"{args.name}.pgm", fileio.write_image(sample.image)),
        (args.out_dir / f"{args.name}_gt.pgm", fileio.write_mask(sample.truth)),
    ]


COMMANDS = {
    "decompose": _decompose,
    "segment": _segment,
    "evaluate": _evaluate,
    "sweep": _sweep,
    "synth": _synth,
}


def run(argv=None):
    """Run the CLI with ``argv`` (default ``sys.argv[1:]``); return the exit status."""
    try:
        args = build_parser().parse_args(argv)
        outputs = COMMANDS[args.command](args)
        _commit(outputs)
    except UsageError as exc:
        print(f"starseg: usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return exc.code or 0
    except StarsegError as exc:
        print(f"starseg: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"starseg: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())
