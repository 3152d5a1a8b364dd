import numpy as np
import pytest

from jqpie.imagio import (BlockGrid, GrayscaleImage, ImageFormatError,
                          assemble_image, load_image, pad_and_partition,
                          pad_to_pow2, write_pgm)

from conftest import random_image


def test_load_p2_ascii(tmp_path):
    path = tmp_path / "tiny.pgm"
    path.write_text("P2\n2 2\n255\n0 255\n128 64\n")
    img = load_image(path)
    assert np.array_equal(img.pixels, [[0, 255], [128, 64]])
    assert img.max_value == 255
    assert img.bit_depth == 8


def test_load_p5_binary(tmp_path):
    path = tmp_path / "tiny5.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    img = load_image(path)
    assert np.array_equal(img.pixels, [[0, 255], [128, 64]])


def test_load_p2_with_comment(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_text("P2\n# a comment\n2 1\n255\n7 9\n")
    img = load_image(path)
    assert np.array_equal(img.pixels, [[7, 9]])


def test_rgb_equal_channels_is_identity_luminance(tmp_path):
    path = tmp_path / "rgb.ppm"
    path.write_bytes(b"P6\n2 2\n255\n" + bytes([10, 10, 10] * 4))
    img = load_image(path)
    assert np.allclose(img.pixels, 10.0)


def test_rgb_bt601_weights(tmp_path):
    path = tmp_path / "rgb601.ppm"
    path.write_bytes(b"P6\n1 1\n255\n" + bytes([100, 50, 200]))
    img = load_image(path)
    assert img.pixels[0, 0] == pytest.approx(0.299 * 100 + 0.587 * 50 + 0.114 * 200)


def test_png_behind_feature_switch(tmp_path):
    PIL = pytest.importorskip("PIL.Image")
    path = tmp_path / "im.png"
    arr = np.full((4, 4, 3), 10, dtype=np.uint8)
    PIL.fromarray(arr).save(path)
    with pytest.raises(ImageFormatError):
        load_image(path)
    img = load_image(path, allow_png=True)
    assert np.allclose(img.pixels, 10.0)


def test_truncated_p5_payload_errors(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P5\n4 4\n255\n" + bytes(7))
    with pytest.raises(ImageFormatError, match="corrupt payload"):
        load_image(path)


def test_unsupported_format_errors(tmp_path):
    path = tmp_path / "notes.txt"
    path.write_bytes(b"hello world")
    with pytest.raises(ImageFormatError, match="unsupported"):
        load_image(path)


def test_missing_file_errors(tmp_path):
    with pytest.raises(ImageFormatError, match="unreadable"):
        load_image(tmp_path / "nope.pgm")


def test_pgm_write_read_roundtrip(tmp_path, rng):
    img = random_image(rng, 9, 13)
    for binary in (True, False):
        path = tmp_path / f"rt{binary}.pgm"
        write_pgm(img, path, binary=binary)
        back = load_image(path)
        assert np.array_equal(back.pixels, img.pixels)


def test_partition_16x16_no_padding(rng):
    img = random_image(rng, 16, 16)
    grid = pad_and_partition(img)
    assert grid.n_b_x == 2 and grid.n_b_y == 2
    assert grid.blocks.shape == (4, 8, 8)
    assert grid.padded_dims == (16, 16)
    # row-major block order: block 1 is the top-right 8x8 tile
    assert np.array_equal(grid.blocks[1], img.pixels[0:8, 8:16])


def test_partition_9x9_pads_with_zeros(rng):
    img = random_image(rng, 9, 9)
    grid = pad_and_partition(img)
    assert grid.padded_dims == (16, 16)
    assert grid.blocks.shape == (4, 8, 8)
    # bottom-right block is mostly padding
    assert np.all(grid.blocks[3][1:, :] == 0)
    assert np.all(grid.blocks[3][:, 1:] == 0)


def test_partition_8x24_block_counts(rng):
    img = random_image(rng, 8, 24)
    grid = pad_and_partition(img)
    assert grid.n_b_x == 1 and grid.n_b_y == 3


def test_partition_assemble_roundtrip_32(rng):
    img = random_image(rng, 32, 32)
    back = assemble_image(pad_and_partition(img))
    assert np.array_equal(back.pixels, img.pixels)


def test_partition_assemble_crops_padding(rng):
    img = random_image(rng, 9, 9)
    back = assemble_image(pad_and_partition(img))
    assert back.pixels.shape == (9, 9)
    assert np.array_equal(back.pixels, img.pixels)


def test_assemble_clamps_out_of_range():
    blocks = np.full((1, 8, 8), 300.0)
    grid = BlockGrid(blocks, 1, 1, (8, 8))
    out = assemble_image(grid)
    assert np.all(out.pixels == 255.0)
    raw = assemble_image(grid, clamp=False)
    assert np.all(raw.pixels == 300.0)


def test_assemble_dimension_mismatch():
    grid = BlockGrid(np.zeros((1, 8, 8)), 1, 1, (8, 8))
    with pytest.raises(ValueError):
        assemble_image(grid, original_dims=(9, 9))


def test_roundtrip_and_block_count_property(rng):
    # block count is ceil(H/8) * ceil(W/8) for arbitrary dimensions
    for _ in range(25):
        h = int(rng.integers(1, 129))
        w = int(rng.integers(1, 129))
        img = random_image(rng, h, w)
        grid = pad_and_partition(img)
        assert grid.n_b_x == -(-h // 8)
        assert grid.n_b_y == -(-w // 8)
        assert grid.blocks.shape[0] == grid.n_b_x * grid.n_b_y
        back = assemble_image(grid)
        assert np.array_equal(back.pixels, img.pixels)


def test_pad_to_pow2():
    img = GrayscaleImage(np.ones((20, 9)))
    padded = pad_to_pow2(img)
    assert padded.pixels.shape == (32, 16)
    assert padded.original_dims == (20, 9)
    assert np.all(padded.pixels[20:, :] == 0)
    tiny = pad_to_pow2(GrayscaleImage(np.ones((2, 2))))
    assert tiny.pixels.shape == (8, 8)


def test_images_are_immutable(rng):
    img = random_image(rng, 8, 8)
    with pytest.raises(ValueError):
        img.pixels[0, 0] = 1.0
