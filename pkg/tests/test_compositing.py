import hashlib
import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from mattekit import compositing
from mattekit.errors import AssetError, ShapeMismatchError
from mattekit.imageio import load_alpha, quantize_u8, save_alpha, save_image


def test_alpha_one_reproduces_fg_exactly(rng):
    fg = rng.random((16, 16, 3))
    bg = rng.random((16, 16, 3))
    out = compositing.composite(fg, bg, np.ones((16, 16)))
    assert np.array_equal(out, fg)


def test_alpha_zero_reproduces_bg_exactly(rng):
    fg = rng.random((16, 16, 3))
    bg = rng.random((16, 16, 3))
    out = compositing.composite(fg, bg, np.zeros((16, 16)))
    assert np.array_equal(out, bg)


def test_midpoint_blend():
    fg = np.ones((8, 8, 3))
    bg = np.zeros((8, 8, 3))
    out = compositing.composite(fg, bg, np.full((8, 8), 0.5))
    assert np.allclose(out, 0.5)


def test_linearity_identity(rng):
    for _ in range(100):
        fg = rng.random((16, 16, 3))
        bg = rng.random((16, 16, 3))
        alpha = rng.random((16, 16))
        lhs = compositing.composite(fg, bg, alpha) \
            + compositing.composite(bg, fg, alpha)
        assert np.allclose(lhs, fg + bg, atol=1e-12)


def test_monotone_in_alpha_where_fg_exceeds_bg(rng):
    fg = np.full((12, 12, 3), 0.9)
    bg = np.full((12, 12, 3), 0.1)
    a1 = rng.random((12, 12))
    a2 = np.clip(a1 + rng.random((12, 12)) * (1 - a1), 0, 1)
    out1 = compositing.composite(fg, bg, a1)
    out2 = compositing.composite(fg, bg, a2)
    assert np.all(out2 >= out1 - 1e-12)


def test_dimension_mismatch_raises(rng):
    with pytest.raises(ShapeMismatchError):
        compositing.composite(rng.random((8, 8, 3)), rng.random((8, 8, 3)),
                              rng.random((8, 9)))
    with pytest.raises(ShapeMismatchError):
        compositing.composite(rng.random((8, 8, 3)), rng.random((9, 8, 3)),
                              rng.random((8, 8)))


def test_load_pair_8bit_scaling(tmp_path):
    img = np.zeros((4, 4, 3), dtype=np.uint8)
    alpha = np.array([[0, 128], [255, 64]] * 2, dtype=np.uint8).reshape(4, 2)
    alpha = np.repeat(alpha, 2, axis=1)
    Image.fromarray(img, "RGB").save(tmp_path / "img.png")
    Image.fromarray(alpha, "L").save(tmp_path / "alpha.png")
    image, a = compositing.load_pair(tmp_path / "img.png",
                                     tmp_path / "alpha.png")
    assert a[0, 0] == 0.0
    assert a[0, 2] == 128 / 255
    assert a[1, 0] == 1.0
    assert a[1, 2] == 64 / 255
    assert image.shape == (4, 4, 3)


def test_load_pair_size_mismatch(tmp_path):
    Image.fromarray(np.zeros((4, 4, 3), dtype=np.uint8), "RGB").save(
        tmp_path / "img.png")
    Image.fromarray(np.zeros((5, 4), dtype=np.uint8), "L").save(
        tmp_path / "alpha.png")
    with pytest.raises(ShapeMismatchError):
        compositing.load_pair(tmp_path / "img.png", tmp_path / "alpha.png")


def test_plan_split_paper_protocol_counts():
    # 431 training mattes x 100 composites; 50 test mattes x 20
    assert len(compositing.plan_split(431, 70, per_fg=100, seed=1)) == 43100
    assert len(compositing.plan_split(50, 30, per_fg=20, seed=2)) == 1000


def test_plan_split_validation():
    with pytest.raises(ValueError):
        compositing.plan_split(3, 2, per_fg=0, seed=0)
    with pytest.raises(ValueError):
        compositing.plan_split(3, 0, per_fg=1, seed=0)


def _tiny_assets(rng, n_fg=2, n_bg=2, size=(24, 24)):
    fgs = [(rng.random((*size, 3)), rng.random(size)) for _ in range(n_fg)]
    bgs = [rng.random((*size, 3)) for _ in range(n_bg)]
    return fgs, bgs


def _dir_digest(root):
    digest = hashlib.sha256()
    for path in sorted(Path(root).rglob("*")):
        if path.is_file():
            digest.update(path.relative_to(root).as_posix().encode())
            digest.update(path.read_bytes())
    return digest.hexdigest()


def test_synthesize_deterministic_byte_identical(rng, tmp_path):
    fgs, bgs = _tiny_assets(rng)
    r1 = compositing.synthesize_split(fgs, bgs, per_fg=3, seed=9,
                                      out_dir=tmp_path / "a")
    r2 = compositing.synthesize_split(fgs, bgs, per_fg=3, seed=9,
                                      out_dir=tmp_path / "b")
    assert len(r1.records) == len(r2.records) == 6
    assert _dir_digest(tmp_path / "a") == _dir_digest(tmp_path / "b")
    r3 = compositing.synthesize_split(fgs, bgs, per_fg=3, seed=10,
                                      out_dir=tmp_path / "c")
    assert [r.bg_id for r in r3.records] != [r.bg_id for r in r1.records] or \
        _dir_digest(tmp_path / "c") != _dir_digest(tmp_path / "a")


def test_single_record_matches_direct_composite(rng, tmp_path):
    fg = rng.random((20, 20, 3))
    alpha = rng.random((20, 20))
    bg = rng.random((20, 20, 3))
    report = compositing.synthesize_split([(fg, alpha)], [bg], per_fg=1,
                                          seed=4, out_dir=tmp_path)
    assert len(report.records) == 1
    rec = report.records[0]
    stored = np.asarray(Image.open(tmp_path / rec.composite))
    expected = quantize_u8(compositing.composite(fg, bg, alpha))
    assert np.array_equal(stored, expected)
    stored_alpha = np.asarray(Image.open(tmp_path / rec.alpha))
    assert np.array_equal(stored_alpha, quantize_u8(alpha))


def test_manifest_fields_and_roundtrip(rng, tmp_path):
    fgs, bgs = _tiny_assets(rng)
    report = compositing.synthesize_split(fgs, bgs, per_fg=2, seed=1,
                                          out_dir=tmp_path, split="test")
    lines = (tmp_path / "manifest.jsonl").read_text().strip().splitlines()
    assert len(lines) == 4
    first = json.loads(lines[0])
    assert set(first) == {"composite", "alpha", "fg_id", "bg_id", "seed",
                          "split"}
    assert first["split"] == "test"
    loaded = compositing.read_manifest(report.manifest_path)
    assert loaded == report.records
    compositing.verify_manifest(report.manifest_path, per_fg=2)


def test_unreadable_asset_collected_not_skipped(rng, tmp_path):
    def broken():
        raise AssetError("decode failed")

    fg = rng.random((16, 16, 3))
    alpha = rng.random((16, 16))
    report = compositing.synthesize_split(
        [(fg, alpha), broken], [rng.random((16, 16, 3))], per_fg=2, seed=0,
        out_dir=tmp_path)
    assert len(report.records) == 2          # the healthy foreground
    assert len(report.errors) == 2           # both draws of the broken one
    assert "decode failed" in report.errors[0]["error"]
    assert (tmp_path / "synthesis_errors.json").is_file()


def test_background_fitted_to_foreground_dims(rng, tmp_path):
    fg = rng.random((32, 20, 3))
    alpha = rng.random((32, 20))
    bg = rng.random((10, 50, 3))  # wrong aspect, must be scaled+cropped
    report = compositing.synthesize_split([(fg, alpha)], [bg], per_fg=1,
                                          seed=0, out_dir=tmp_path)
    comp = np.asarray(Image.open(tmp_path / report.records[0].composite))
    assert comp.shape == (32, 20, 3)


def test_verify_manifest_detects_missing_file(rng, tmp_path):
    fgs, bgs = _tiny_assets(rng, n_fg=1, n_bg=1)
    report = compositing.synthesize_split(fgs, bgs, per_fg=1, seed=0,
                                          out_dir=tmp_path)
    (tmp_path / report.records[0].composite).unlink()
    with pytest.raises(AssetError):
        compositing.verify_manifest(report.manifest_path)


def test_quantization_error_bound(rng, tmp_path):
    alpha = rng.random((16, 16))
    save_alpha(tmp_path / "a.png", alpha)
    back = load_alpha(tmp_path / "a.png")
    assert np.max(np.abs(back - alpha)) <= 1 / 510 + 1e-12


def test_synthesize_from_dirs_missing_dir(tmp_path):
    (tmp_path / "fg").mkdir()
    (tmp_path / "alpha").mkdir()
    with pytest.raises(AssetError):
        compositing.synthesize_from_dirs(tmp_path / "fg", tmp_path / "alpha",
                                         tmp_path / "nope", per_fg=1, seed=0,
                                         out_dir=tmp_path / "out")
    assert not (tmp_path / "out").exists()
