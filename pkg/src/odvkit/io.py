"""Frame, manifest, flow-file and report I/O.

Manifests are JSON files::

    {
      "format": "png8",               # or "raw8" (then "height"/"width" are required)
      "frames": ["f000.png", ...],    # relative to the manifest's directory
      "saliency": [...],              # optional, one map per frame
      "flows": [...],                 # optional, n - 1 ODVF flow files
      "masks": [...],                 # optional, n - 1 mask images
      "viewpoints": "views.json"      # optional viewpoint list
    }

Viewpoint lists are JSON objects ``{"k": 5, "viewpoints": [{"lon_deg": ...,
"lat_deg": ..., "score": ...}, ...]}``, ordered best first.
"""

import csv
import io
import json
import math
import os
import struct
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .metrics import ViewpointList

FLOW_MAGIC = b"ODVF"
LUMA_COEFFS = {
    "bt601": (0.299, 0.587, 0.114),
    "bt709": (0.2126, 0.7152, 0.0722),
}
REPORT_SCHEMA = 1
FORMATS = ("png8", "raw8")


class ManifestError(ValueError):
    """A manifest or one of the files it references is malformed."""


@dataclass
class SequenceManifest:
    path: str
    format: str
    frames: list
    height: int = None
    width: int = None
    saliency: list = None
    flows: list = None
    masks: list = None
    viewpoints: str = None


def to_luma(rgb, standard="bt601"):
    """Weighted sum of the R, G, B planes of an ``(..., 3)`` array."""
    try:
        r, g, b = LUMA_COEFFS[standard]
    except KeyError:
        raise ValueError(f"unknown luma standard {standard!r}") from None
    rgb = np.asarray(rgb, dtype=np.float64)
    return r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]


def read_image(path, luma="bt601"):
    """Decode a PNG (or any Pillow format) to a float ``(H, W)`` plane in ``[0, 1]``."""
    try:
        img = Image.open(path)
        img.load()
    except UnidentifiedImageError:
        raise ManifestError(f"{path}: unsupported or corrupt image") from None
    with img:
        mode = img.mode
        if mode in ("I;16", "I;16B", "I;16L", "I"):
            arr = np.asarray(img, dtype=np.float64)
            return arr / 65535.0
        if mode == "L":
            return np.asarray(img, dtype=np.float64) / 255.0
        if mode in ("RGB", "RGBA", "P", "LA"):
            arr = np.asarray(img.convert("RGB"), dtype=np.float64)
            return to_luma(arr, luma) / 255.0
    raise ManifestError(f"{path}: unsupported image mode {mode}")


def read_raw8(path, height, width):
    data = np.fromfile(path, dtype=np.uint8)
    if data.size != height * width:
        raise ManifestError(f"{path}: expected {height * width} bytes for {height}x{width}, got {data.size}")
    return data.reshape(height, width).astype(np.float64) / 255.0


def quantize8(frame):
    return np.clip(np.rint(np.asarray(frame, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)


def write_png8(frame, path):
    Image.fromarray(quantize8(frame), mode="L").save(path)


def write_png16(frame, path):
    arr = np.clip(np.rint(np.asarray(frame, dtype=np.float64) * 65535.0), 0, 65535).astype(np.uint16)
    Image.fromarray(arr).save(path)


def write_raw8(frame, path):
    quantize8(frame).tofile(path)


def _resolve(base, rel):
    return rel if os.path.isabs(rel) else os.path.join(base, rel)


def load_manifest(path):
    """Parse and validate a manifest; every referenced file must exist."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ManifestError(f"{path}: manifest must be a JSON object")
    fmt = doc.get("format", "png8")
    if fmt not in FORMATS:
        raise ManifestError(f"{path}: unsupported format {fmt!r}")
    frames = doc.get("frames")
    if not isinstance(frames, list) or not frames:
        raise ManifestError(f"{path}: 'frames' must be a non-empty list")
    height, width = doc.get("height"), doc.get("width")
    if fmt == "raw8" and not (isinstance(height, int) and isinstance(width, int) and height > 0 and width > 0):
        raise ManifestError(f"{path}: raw8 manifests need positive integer 'height' and 'width'")

    base = os.path.dirname(os.path.abspath(path))
    m = SequenceManifest(path, fmt, [_resolve(base, f) for f in frames], height, width)
    for key in ("saliency", "flows", "masks"):
        if doc.get(key) is not None:
            setattr(m, key, [_resolve(base, f) for f in doc[key]])
    if doc.get("viewpoints") is not None:
        m.viewpoints = _resolve(base, doc["viewpoints"])

    n = len(m.frames)
    if m.saliency is not None and len(m.saliency) != n:
        raise ManifestError(f"{path}: {len(m.saliency)} saliency maps for {n} frames")
    for key in ("flows", "masks"):
        items = getattr(m, key)
        if items is not None and len(items) != n - 1:
            raise ManifestError(f"{path}: expected {n - 1} {key}, got {len(items)}")
    for f in m.frames + (m.saliency or []) + (m.flows or []) + (m.masks or []) + ([m.viewpoints] if m.viewpoints else []):
        if not os.path.isfile(f):
            raise FileNotFoundError(f"{f}: referenced by {path} but missing")
    return m


def _read_plane(path, manifest, luma):
    if manifest.format == "raw8":
        return read_raw8(path, manifest.height, manifest.width)
    return read_image(path, luma)


def _read_stack(paths, manifest, luma):
    planes = []
    for p in paths:
        plane = _read_plane(p, manifest, luma)
        if planes and plane.shape != planes[0].shape:
            raise ManifestError(f"{p}: size {plane.shape} differs from {planes[0].shape}")
        planes.append(plane)
    return np.stack(planes)


def load_sequence(manifest, luma="bt601"):
    """Decode every frame of a manifest (path or :class:`SequenceManifest`) to ``(n, H, W)``."""
    if not isinstance(manifest, SequenceManifest):
        manifest = load_manifest(manifest)
    return _read_stack(manifest.frames, manifest, luma)


def load_saliency(manifest, luma="bt601"):
    if manifest.saliency is None:
        return None
    return _read_stack(manifest.saliency, manifest, luma)


def load_masks(manifest):
    if manifest.masks is None:
        return None
    return _read_stack(manifest.masks, manifest, "bt601")


def load_flows(manifest):
    if manifest.flows is None:
        return None
    return [read_flow(p) for p in manifest.flows]


def write_sequence(frames, out_dir, fmt="png8", prefix="frame"):
    """Write frames plus a ``manifest.json`` into ``out_dir``; returns the manifest path."""
    if fmt not in FORMATS:
        raise ValueError(f"unsupported format {fmt!r}")
    frames = np.asarray(frames, dtype=np.float64)
    os.makedirs(out_dir, exist_ok=True)
    names = []
    for i, frame in enumerate(frames):
        name = f"{prefix}_{i:05d}.{'png' if fmt == 'png8' else 'raw'}"
        (write_png8 if fmt == "png8" else write_raw8)(frame, os.path.join(out_dir, name))
        names.append(name)
    doc = {"format": fmt, "frames": names}
    if fmt == "raw8":
        doc["height"], doc["width"] = int(frames.shape[1]), int(frames.shape[2])
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return path


def write_flow(flow, path):
    """Write a ``(2, H, W)`` flow as ODVF: magic, u32 H, u32 W, float32 (du, dv) pairs row-major."""
    flow = np.asarray(flow)
    if flow.ndim != 3 or flow.shape[0] != 2:
        raise ValueError(f"flow must be (2, H, W), got {flow.shape}")
    _, h, w = flow.shape
    payload = np.ascontiguousarray(flow.transpose(1, 2, 0), dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(FLOW_MAGIC + struct.pack("<II", h, w) + payload)


def read_flow(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != FLOW_MAGIC:
        raise ManifestError(f"{path}: not an ODVF flow file")
    h, w = struct.unpack("<II", data[4:12])
    if len(data) - 12 != 8 * h * w:
        raise ManifestError(f"{path}: payload is {len(data) - 12} bytes, expected {8 * h * w}")
    arr = np.frombuffer(data, dtype="<f4", offset=12).reshape(h, w, 2)
    return arr.transpose(2, 0, 1).astype(np.float64)


def load_viewpoints(path):
    with open(path) as fh:
        doc = json.load(fh)
    try:
        entries = doc["viewpoints"]
        centers = [(math.radians(e["lon_deg"]), math.radians(e["lat_deg"])) for e in entries]
        scores = [e.get("score") for e in entries]
        return ViewpointList(centers, doc.get("k", min(5, len(centers))), scores)
    except (KeyError, TypeError) as exc:
        raise ManifestError(f"{path}: malformed viewpoint list ({exc})") from None


def fmt_float(x):
    """Round to 6 significant digits; infinities and NaN become strings."""
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return float(f"{x:.6g}")


def round_floats(obj):
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def report_to_dict(report):
    """Plain, ordered dict for a :class:`~odvkit.metrics.MetricReport`."""
    names = ("psnr", "ssim", "ws_psnr", "ws_ssim")
    doc = {
        "schema": REPORT_SCHEMA,
        "frames": report.frames,
        "params": dict(sorted(report.params.items())),
        "mean": {n: report.mean(n) for n in names},
        "per_frame": [{"index": i, **{n: getattr(report, n)[i] for n in names}} for i in range(report.frames)],
        "e_warp": report.e_warp,
        "e_warp_pairs": report.e_warp_pairs,
    }
    if report.viewports:
        doc["viewports"] = {
            "top_k_psnr": report.top_k_psnr,
            "top_k_ssim": report.top_k_ssim,
            "per_frame": [{"psnr": v.psnr, "ssim": v.ssim} for v in report.viewports],
        }
    return round_floats(doc)


def report_to_csv(report):
    names = ("psnr", "ssim", "ws_psnr", "ws_ssim")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["frame", *names, "e_warp"])
    pairs = report.e_warp_pairs or []
    for i in range(report.frames):
        ew = fmt_float(pairs[i - 1]) if 0 < i <= len(pairs) else ""
        writer.writerow([i, *(fmt_float(getattr(report, n)[i]) for n in names), ew])
    writer.writerow(["mean", *(fmt_float(report.mean(n)) for n in names), fmt_float(report.e_warp) if pairs else ""])
    return buf.getvalue()


def write_report(report, path, fmt="json"):
    """Serialize a report deterministically as JSON (``schema: 1``) or CSV."""
    if fmt == "json":
        text = json.dumps(report_to_dict(report), indent=2) + "\n"
    elif fmt == "csv":
        text = report_to_csv(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w") as fh:
        fh.write(text)
    return path
