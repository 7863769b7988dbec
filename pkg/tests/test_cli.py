import json

import numpy as np
import pytest

from conftest import band_limited
from odvkit.cli import main
from odvkit.io import load_sequence, read_flow, write_png8, write_sequence


@pytest.fixture
def seq_manifest(tmp_path):
    frames = np.stack([np.roll(band_limited(32, 64), 2 * t, axis=1) for t in range(3)])
    return str(write_sequence(frames, tmp_path / "hr"))


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if code == 0 and out.strip() else out)


def test_weights(tmp_path, capsys):
    code, out = run(["weights", "--height", 4, "--width", 8, "--out", tmp_path], capsys)
    assert code == 0
    np.testing.assert_allclose(out["w_lat"]["rows"], [0.3826834, 0.9238795, 0.9238795, 0.3826834], atol=1e-6)
    raw = np.fromfile(tmp_path / "w_lat.f32", dtype="<f4").reshape(4, 8)
    np.testing.assert_allclose(raw[:, 0], out["w_lat"]["rows"], atol=1e-7)


def test_weights_with_saliency(tmp_path, capsys):
    write_png8(np.full((4, 8), 0.5), tmp_path / "s.png")
    code, out = run(["weights", "--height", 4, "--width", 8, "--saliency", tmp_path / "s.png"], capsys)
    assert code == 0 and out["w_sal"]["max"] == 1.0
    code, _ = run(["weights", "--height", 5, "--width", 8, "--saliency", tmp_path / "s.png"], capsys)
    assert code == 1


def test_ope(tmp_path, capsys):
    code, out = run(["ope", "--height", 4, "--width", 8, "--d", 1, "--out", tmp_path], capsys)
    assert code == 0 and out["channels"] == 3 and out["cycles_per_revolution"] == [1]
    assert np.load(tmp_path / "ope.npy").shape == (3, 4, 8)


def test_degrade(tmp_path, capsys, seq_manifest):
    code, out = run(["degrade", "--manifest", seq_manifest, "--scale", "1/4", "--out", tmp_path / "lr"], capsys)
    assert code == 0 and (out["height"], out["width"]) == (8, 16)
    assert load_sequence(out["manifest"]).shape == (3, 8, 16)


def test_viewport_and_seam(tmp_path, capsys, seq_manifest):
    code, out = run(["viewport", "--manifest", seq_manifest, "--size", 12, 12, "--out", tmp_path / "v"], capsys)
    assert code == 0 and load_sequence(out["manifest"]).shape == (3, 12, 12)
    code, out = run(["seam", "--manifest", seq_manifest, "--size", 16, 32, "--out", tmp_path / "s"], capsys)
    assert code == 0 and len(out["erp_seam_score"]) == 3
    assert (tmp_path / "s" / "seam_scores.json").exists()


def test_flow_then_metrics(tmp_path, capsys, seq_manifest):
    code, out = run(["flow", "--manifest", seq_manifest, "--out", tmp_path / "hr"], capsys)
    assert code == 0 and out["flows"] == ["flow_00000.odvf", "flow_00001.odvf"]
    assert np.all(read_flow(tmp_path / "hr" / "flow_00000.odvf")[0] == -2)

    doc = json.loads(open(seq_manifest).read())
    doc["flows"] = out["flows"]
    with open(seq_manifest, "w") as fh:
        json.dump(doc, fh)
    code, _ = run(["metrics", "--hr", seq_manifest, "--sr", seq_manifest, "--report", tmp_path / "r.csv",
                   "--format", "csv"], capsys)
    assert code == 0
    assert (tmp_path / "r.csv").read_text().splitlines()[-1] == "mean,inf,1.0,inf,1.0,0.0"


def test_metrics_with_viewpoints(tmp_path, capsys, seq_manifest):
    vp = tmp_path / "v.json"
    vp.write_text(json.dumps({"viewpoints": [{"lon_deg": 180, "lat_deg": 0}, {"lon_deg": 0, "lat_deg": 30}]}))
    code, _ = run(["metrics", "--hr", seq_manifest, "--sr", seq_manifest, "--report", tmp_path / "r.json",
                   "--viewpoints", vp, "--k", 1, "--viewport-size", 16], capsys)
    assert code == 0
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["viewports"]["top_k_psnr"] == "inf" and doc["params"]["top_k"] == 1


def test_imfr(tmp_path, capsys):
    feats = np.random.default_rng(0).random((3, 12, 4, 4))
    np.save(tmp_path / "f.npy", feats)
    code, out = run(["imfr", "--features", tmp_path / "f.npy", "--upscale", 2, "--out", tmp_path / "o.npy"], capsys)
    assert code == 0 and out["shape"] == [3, 1, 8, 8]


def test_loss(tmp_path, capsys):
    write_png8(np.full((4, 8), 0.2), tmp_path / "a.png")
    code, out = run(["loss", "--hr", tmp_path / "a.png", "--sr", tmp_path / "a.png"], capsys)
    assert code == 0 and out["total"] == 1e-3


def test_exit_codes(tmp_path, capsys):
    assert main(["degrade", "--manifest", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 2
    assert main(["weights", "--height", "0", "--width", "8"]) == 1
    assert main(["ope", "--height", "4"]) == 1
    assert main(["nonsense"]) == 1
    capsys.readouterr()


def test_metrics_shape_mismatch(tmp_path, capsys, seq_manifest):
    other = str(write_sequence(np.zeros((3, 16, 32)), tmp_path / "small"))
    assert main(["metrics", "--hr", seq_manifest, "--sr", other, "--report", str(tmp_path / "r.json")]) == 1
    assert not (tmp_path / "r.json").exists()
    capsys.readouterr()
