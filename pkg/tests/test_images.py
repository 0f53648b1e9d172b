import numpy as np
import pytest

from lnopt.images import Image, PpmError, generate_synthetic_fakes, read_ppm, write_ppm


def test_ppm_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    img = Image(rng.random((6, 4, 3)), id="x")
    path = tmp_path / "x.ppm"
    write_ppm(path, img)
    back = read_ppm(path)
    assert back.pixels.shape == (6, 4, 3)
    assert back.id == "x"
    quantized = np.rint(img.pixels * 255.0) / 255.0
    assert np.allclose(back.pixels, quantized, atol=1e-12)


def test_ppm_header_bytes(tmp_path):
    img = Image(np.zeros((2, 4, 3)), id="z")
    path = tmp_path / "z.ppm"
    write_ppm(path, img)
    raw = path.read_bytes()
    assert raw.startswith(b"P6\n4 2\n255\n")
    assert len(raw) == len(b"P6\n4 2\n255\n") + 2 * 4 * 3


def test_ppm_round_half_to_even(tmp_path):
    # 0.5/255 and 1.5/255 both sit exactly halfway; ties go to even
    img = Image(np.full((1, 2, 3), 0.5 / 255.0), id="t")
    img.pixels[0, 1, :] = 1.5 / 255.0
    path = tmp_path / "t.ppm"
    write_ppm(path, img)
    raw = path.read_bytes()
    body = raw[len(b"P6\n2 1\n255\n"):]
    assert list(body) == [0, 0, 0, 2, 2, 2]


def test_ppm_comments_and_whitespace(tmp_path):
    data = b"P6 # comment\n# another comment\n 2 \t1\n255\n" + bytes([10, 20, 30, 40, 50, 60])
    path = tmp_path / "c.ppm"
    path.write_bytes(data)
    img = read_ppm(path)
    assert img.pixels.shape == (1, 2, 3)
    assert img.pixels[0, 0, 0] == pytest.approx(10 / 255)


def test_ppm_errors(tmp_path):
    p = tmp_path / "bad.ppm"
    p.write_bytes(b"P5\n2 2\n255\n" + bytes(12))
    with pytest.raises(PpmError):
        read_ppm(p)
    p.write_bytes(b"P6\n2 2\n128\n" + bytes(12))
    with pytest.raises(PpmError):
        read_ppm(p)
    p.write_bytes(b"P6\n2 2\n255\n" + bytes(5))  # truncated pixels
    with pytest.raises(PpmError):
        read_ppm(p)


def test_synthetic_fakes_contract():
    assert generate_synthetic_fakes(0, seed=1) == []
    imgs = generate_synthetic_fakes(5, seed=1)
    assert len(imgs) == 5
    for i, img in enumerate(imgs):
        assert img.pixels.shape == (64, 64, 3)
        assert img.pixels.min() >= 0.0 and img.pixels.max() <= 1.0
        assert img.id == f"synthetic-{i}"
    again = generate_synthetic_fakes(5, seed=1)
    for a, b in zip(imgs, again):
        assert np.array_equal(a.pixels, b.pixels)
    other = generate_synthetic_fakes(5, seed=2)
    assert not np.array_equal(imgs[0].pixels, other[0].pixels)


def test_synthetic_fakes_are_smooth_fields():
    # neighboring pixels should correlate far more than uniform noise would
    img = generate_synthetic_fakes(1, seed=3)[0].pixels
    horizontal_diff = np.abs(np.diff(img[:, :, 0], axis=1)).mean()
    assert horizontal_diff < 0.05
