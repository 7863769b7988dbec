"""Batch command line interface.

Exit status is 0 on success, 1 for invalid input or arguments and 2 for
I/O failures. Every command reads and validates all of its inputs before
writing anything.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import io as odvio
from .geometry import (
    FrameSize,
    SphericalCoord,
    ViewportSpec,
    latitude_weight_map,
    midline_discontinuity_score,
    seam_discontinuity_score,
    seam_stitch,
    viewport_project,
)
from .imfr import ImfrConfig, imfr_pipeline
from .kernels import bicubic_resize, output_size, parse_scale
from .loss import LossConfig, lsa_total, normalize_saliency
from .metrics import ViewpointList, block_matching_flow, evaluate_sequence
from .ope import cyclic_frequencies, ope_map


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(obj):
    print(json.dumps(obj, indent=2))


def _write_raw_f32(arr, path):
    np.ascontiguousarray(arr, dtype="<f4").tofile(path)


def _stats(w):
    return {"min": float(w.min()), "max": float(w.max()), "mean": float(w.mean())}


def cmd_weights(args):
    w_lat = latitude_weight_map(args.height, args.width)
    w_sal = None
    if args.saliency:
        w_sal = normalize_saliency(odvio.read_image(args.saliency))
        if w_sal.shape != w_lat.shape:
            raise ValueError(f"{args.saliency}: size {w_sal.shape} differs from {w_lat.shape}")
    out = {"height": args.height, "width": args.width, "w_lat": {**_stats(w_lat), "rows": w_lat[:, 0].tolist()}}
    if w_sal is not None:
        out["w_sal"] = _stats(w_sal)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        odvio.write_png16(w_lat, os.path.join(args.out, "w_lat.png"))
        _write_raw_f32(w_lat, os.path.join(args.out, "w_lat.f32"))
        if w_sal is not None:
            odvio.write_png16(w_sal, os.path.join(args.out, "w_sal.png"))
            _write_raw_f32(w_sal, os.path.join(args.out, "w_sal.f32"))
    _emit(out)


def cmd_ope(args):
    mode = "literal" if args.literal else "cyclic"
    pe = ope_map(args.d, args.height, args.width, mode)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for c, channel in enumerate(pe):
            odvio.write_png16((channel + 1.0) / 2.0, os.path.join(args.out, f"ope_{c:03d}.png"))
        np.save(os.path.join(args.out, "ope.npy"), pe)
    info = {"channels": int(pe.shape[0]), "height": args.height, "width": args.width, "mode": mode}
    if mode == "cyclic":
        info["cycles_per_revolution"] = cyclic_frequencies(args.d, args.width).tolist()
    _emit(info)


def cmd_degrade(args):
    scale = parse_scale(args.scale)
    manifest = odvio.load_manifest(args.manifest)
    frames = odvio.load_sequence(manifest, args.luma)
    output_size(frames.shape[1], frames.shape[2], scale)
    out = np.stack([bicubic_resize(f, scale) for f in frames])
    path = odvio.write_sequence(out, args.out, args.format)
    _emit({"manifest": path, "frames": int(out.shape[0]), "height": int(out.shape[1]), "width": int(out.shape[2])})


def cmd_metrics(args):
    hr_m = odvio.load_manifest(args.hr)
    sr_m = odvio.load_manifest(args.sr)
    hr = odvio.load_sequence(hr_m, args.luma)
    sr = odvio.load_sequence(sr_m, args.luma)
    if hr.shape != sr.shape:
        raise ValueError(f"HR sequence {hr.shape} and SR sequence {sr.shape} differ in shape")
    vp_path = args.viewpoints or hr_m.viewpoints
    viewpoints = odvio.load_viewpoints(vp_path) if vp_path else None
    if viewpoints is not None and args.k is not None:
        viewpoints = ViewpointList(viewpoints.centers, args.k, viewpoints.scores)
    report = evaluate_sequence(
        hr,
        sr,
        viewpoints=viewpoints,
        flows=odvio.load_flows(sr_m),
        masks=odvio.load_masks(sr_m),
        fov=math.radians(args.fov_deg),
        viewport_size=(args.viewport_size, args.viewport_size),
        block=args.flow_block,
        radius=args.flow_radius,
    )
    odvio.write_report(report, args.report, args.format)
    _emit({"report": args.report, "frames": report.frames})


def cmd_viewport(args):
    frames = odvio.load_sequence(args.manifest, args.luma)
    fov_v = args.fov_v_deg if args.fov_v_deg is not None else args.fov_deg
    vp = ViewportSpec(
        SphericalCoord(math.radians(args.lon_deg), math.radians(args.lat_deg)),
        math.radians(args.fov_deg),
        math.radians(fov_v),
        FrameSize(*args.size),
        math.radians(args.roll_deg),
    )
    views = np.stack([viewport_project(f, vp) for f in frames])
    path = odvio.write_sequence(views, args.out, "png8", prefix="view")
    _emit({"manifest": path, "frames": int(views.shape[0])})


def cmd_seam(args):
    frames = odvio.load_sequence(args.manifest, args.luma)
    fov = math.radians(args.fov_deg)
    size = FrameSize(*args.size)
    views = np.stack([seam_stitch(f, fov, size) for f in frames])
    scores = {
        "erp_seam_score": [seam_discontinuity_score(f) for f in frames],
        "stitched_midline_score": [midline_discontinuity_score(v) for v in views],
    }
    path = odvio.write_sequence(views, args.out, "png8", prefix="seam")
    with open(os.path.join(args.out, "seam_scores.json"), "w") as fh:
        json.dump(odvio.round_floats(scores), fh, indent=2)
        fh.write("\n")
    _emit({"manifest": path, **odvio.round_floats(scores)})


def cmd_flow(args):
    frames = odvio.load_sequence(args.manifest, args.luma)
    if len(frames) < 2:
        raise ValueError("flow needs at least two frames")
    flows = [block_matching_flow(a, b, args.block, args.radius) for a, b in zip(frames[:-1], frames[1:])]
    os.makedirs(args.out, exist_ok=True)
    names = []
    for t, flow in enumerate(flows):
        name = f"flow_{t:05d}.odvf"
        odvio.write_flow(flow, os.path.join(args.out, name))
        names.append(name)
    _emit({"flows": names})


def cmd_imfr(args):
    seq = np.load(args.features)
    raw = np.load(args.weights) if args.weights else None
    cfg = ImfrConfig(args.alpha1, args.beta1, not args.no_normalize)
    out = imfr_pipeline(seq, raw, cfg, args.upscale)
    np.save(args.out, out)
    _emit({"output": args.out, "shape": list(out.shape)})


def cmd_loss(args):
    hr = odvio.read_image(args.hr, args.luma)
    sr = odvio.read_image(args.sr, args.luma)
    if hr.shape != sr.shape:
        raise ValueError(f"{args.sr}: size {sr.shape} differs from {hr.shape}")
    w_lat = latitude_weight_map(*hr.shape)
    if args.saliency:
        w_sal = normalize_saliency(odvio.read_image(args.saliency))
        if w_sal.shape != hr.shape:
            raise ValueError(f"{args.saliency}: size {w_sal.shape} differs from {hr.shape}")
    else:
        w_sal = np.zeros_like(hr)
    cfg = LossConfig(args.epsilon, args.alpha2, args.beta2, args.charbonnier)
    b = lsa_total(hr, sr, w_lat, w_sal, cfg)
    _emit({"charbonnier": b.charbonnier, "l_lat": b.l_lat, "l_sal": b.l_sal, "total": b.total})


def build_parser():
    parser = _Parser(prog="odvkit", description="Omnidirectional video geometry, metrics and dataset tools")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help):
        p = sub.add_parser(name, help=help, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        p.set_defaults(func=func)
        return p

    def luma(p):
        p.add_argument("--luma", choices=sorted(odvio.LUMA_COEFFS), default="bt601", help="RGB to luma conversion")

    p = add("weights", cmd_weights, "latitude (and saliency) weight maps")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--saliency", help="saliency image to max-normalize")
    p.add_argument("--out", help="directory for 16-bit PNG and float32 sidecar")

    p = add("ope", cmd_ope, "omni-positional encoding stack")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--d", type=int, default=8, help="number of horizontal frequency pairs")
    p.add_argument("--literal", action="store_true", help="non-periodic transformer-style frequencies")
    p.add_argument("--out")

    p = add("degrade", cmd_degrade, "bicubic resize of a sequence")
    p.add_argument("--manifest", required=True)
    p.add_argument("--scale", default="0.25", help="e.g. 0.25, 1/4 or 4")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=odvio.FORMATS, default="png8")
    luma(p)

    p = add("metrics", cmd_metrics, "full-reference quality report")
    p.add_argument("--hr", required=True, help="reference manifest")
    p.add_argument("--sr", required=True, help="test manifest")
    p.add_argument("--report", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--viewpoints", help="viewpoint list (overrides the HR manifest entry)")
    p.add_argument("--k", type=int, help="number of viewpoints to average")
    p.add_argument("--fov-deg", type=float, default=90.0)
    p.add_argument("--viewport-size", type=int, default=480)
    p.add_argument("--flow-block", type=int, default=8)
    p.add_argument("--flow-radius", type=int, default=4)
    luma(p)

    p = add("viewport", cmd_viewport, "render rectilinear views")
    p.add_argument("--manifest", required=True)
    p.add_argument("--lon-deg", type=float, default=180.0)
    p.add_argument("--lat-deg", type=float, default=0.0)
    p.add_argument("--fov-deg", type=float, default=90.0)
    p.add_argument("--fov-v-deg", type=float)
    p.add_argument("--roll-deg", type=float, default=0.0)
    p.add_argument("--size", type=int, nargs=2, default=[480, 480], metavar=("H", "W"))
    p.add_argument("--out", required=True)
    luma(p)

    p = add("seam", cmd_seam, "stitch the ERP seam into one view and score it")
    p.add_argument("--manifest", required=True)
    p.add_argument("--fov-deg", type=float, default=90.0)
    p.add_argument("--size", type=int, nargs=2, default=[480, 480], metavar=("H", "W"))
    p.add_argument("--out", required=True)
    luma(p)

    p = add("flow", cmd_flow, "block-matching flow between consecutive frames")
    p.add_argument("--manifest", required=True)
    p.add_argument("--block", type=int, default=8)
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--out", required=True)
    luma(p)

    p = add("imfr", cmd_imfr, "interlaced reconstruction fusion on a feature stack")
    p.add_argument("--features", required=True, help=".npy array (n, 3C, H, W)")
    p.add_argument("--weights", help=".npy raw weights (n, 2, C or 1, H, W)")
    p.add_argument("--alpha1", type=float, default=0.01)
    p.add_argument("--beta1", type=float, default=0.01)
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--upscale", type=int, default=1)
    p.add_argument("--out", required=True, help="output .npy path")

    p = add("loss", cmd_loss, "latitude-saliency adaptive loss of one frame pair")
    p.add_argument("--hr", required=True)
    p.add_argument("--sr", required=True)
    p.add_argument("--saliency")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--alpha2", type=float, default=0.1)
    p.add_argument("--beta2", type=float, default=0.1)
    p.add_argument("--charbonnier", choices=("pixel", "global"), default="pixel")
    luma(p)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or an argument error reported by _Parser
        return exc.code
    try:
        args.func(args)
    except (ValueError, TypeError) as exc:
        print(f"odvkit {args.command}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"odvkit {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
