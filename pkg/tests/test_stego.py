import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonlab.stego import (
    RgbImage,
    ascii_to_bits,
    bits_to_ascii,
    lsb_capacity_bits,
    lsb_embed,
    lsb_extract,
    read_ppm,
    write_ppm,
)

GOLDEN_PIXELS = np.array(
    [[255, 0, 0], [0, 0, 255], [0, 0, 0], [0, 255, 0]], dtype=np.uint8
)
# 24-bit payload of the worked pixel example (note: its first byte encodes
# 'b', not 'c'; the raw bit string is the contract here).
GOLDEN_BITS = np.array([int(b) for b in "011000100110000101110100"], dtype=np.uint8)
GOLDEN_RESULT = np.array([[253, 2, 0], [2, 1, 254], [0, 1, 1], [3, 253, 0]], dtype=np.uint8)


def _image(pixels, width=None, height=None):
    px = np.asarray(pixels, dtype=np.uint8)
    if width is None:
        width, height = px.shape[0], 1
    return RgbImage(width=width, height=height, pixels=px)


class TestGoldenVector:
    def test_worked_pixel_example(self):
        out = lsb_embed(_image(GOLDEN_PIXELS, 2, 2), GOLDEN_BITS)
        assert np.array_equal(out.pixels, GOLDEN_RESULT)

    def test_extract_recovers_payload(self):
        out = lsb_embed(_image(GOLDEN_PIXELS, 2, 2), GOLDEN_BITS)
        assert np.array_equal(lsb_extract(out, 24), GOLDEN_BITS)


class TestLsb:
    def test_empty_payload_keeps_image(self):
        img = _image(GOLDEN_PIXELS, 2, 2)
        out = lsb_embed(img, np.empty(0, dtype=np.uint8))
        assert np.array_equal(out.pixels, img.pixels)

    @settings(max_examples=200)
    @given(st.data())
    def test_round_trip(self, data):
        n_pix = data.draw(st.integers(min_value=1, max_value=40))
        rng_vals = data.draw(
            st.lists(st.integers(0, 255), min_size=3 * n_pix, max_size=3 * n_pix)
        )
        n_bits = data.draw(st.integers(min_value=0, max_value=6 * n_pix))
        bits = data.draw(st.lists(st.integers(0, 1), min_size=n_bits, max_size=n_bits))
        img = _image(np.array(rng_vals, dtype=np.uint8).reshape(-1, 3))
        stego = lsb_embed(img, np.array(bits, dtype=np.uint8))
        assert np.array_equal(
            lsb_extract(stego, n_bits), np.array(bits, dtype=np.uint8)
        )

    def test_only_low_two_bits_change(self):
        rng = np.random.default_rng(5)
        img = _image(rng.integers(0, 256, (30, 3)).astype(np.uint8))
        bits = rng.integers(0, 2, 90).astype(np.uint8)
        out = lsb_embed(img, bits)
        delta = out.pixels.astype(int) - img.pixels.astype(int)
        assert np.max(np.abs(delta)) <= 3
        assert np.array_equal(out.pixels & 0xFC, img.pixels & 0xFC)

    def test_untouched_channels_preserved(self):
        rng = np.random.default_rng(6)
        img = _image(rng.integers(0, 256, (10, 3)).astype(np.uint8))
        bits = rng.integers(0, 2, 7).astype(np.uint8)  # 4 channels touched
        out = lsb_embed(img, bits)
        assert np.array_equal(out.pixels.reshape(-1)[4:], img.pixels.reshape(-1)[4:])

    def test_odd_bit_count_round_trip(self):
        img = _image(GOLDEN_PIXELS, 2, 2)
        bits = np.array([1, 0, 1], dtype=np.uint8)
        out = lsb_embed(img, bits)
        assert np.array_equal(lsb_extract(out, 3), bits)

    def test_capacity_enforced(self):
        img = _image(GOLDEN_PIXELS, 2, 2)
        assert lsb_capacity_bits(img) == 24
        with pytest.raises(ValueError):
            lsb_embed(img, np.ones(25, dtype=np.uint8))
        with pytest.raises(ValueError):
            lsb_extract(img, 25)


class TestAsciiBits:
    def test_known_letters(self):
        assert "".join(map(str, ascii_to_bits("a"))) == "01100001"
        assert "".join(map(str, ascii_to_bits("t"))) == "01110100"
        assert "".join(map(str, ascii_to_bits("c"))) == "01100011"

    def test_round_trip_printable(self):
        import string

        text = string.printable
        assert bits_to_ascii(ascii_to_bits(text)) == text

    def test_rejects_non_ascii(self):
        with pytest.raises(ValueError):
            ascii_to_bits("café")

    def test_rejects_partial_bytes(self):
        with pytest.raises(ValueError):
            bits_to_ascii([0, 1, 1])


class TestPpm:
    def test_binary_round_trip_byte_exact(self, tmp_path):
        rng = np.random.default_rng(7)
        img = RgbImage(5, 4, rng.integers(0, 256, (20, 3)).astype(np.uint8))
        path = tmp_path / "img.ppm"
        write_ppm(path, img, binary=True)
        back = read_ppm(path)
        assert back.width == 5 and back.height == 4
        assert np.array_equal(back.pixels, img.pixels)
        # canonical writer: write(read(f)) reproduces f byte for byte
        path2 = tmp_path / "img2.ppm"
        write_ppm(path2, back, binary=True)
        assert path.read_bytes() == path2.read_bytes()

    def test_ascii_round_trip(self, tmp_path):
        img = _image(GOLDEN_PIXELS, 2, 2)
        path = tmp_path / "img_p3.ppm"
        write_ppm(path, img, binary=False)
        back = read_ppm(path)
        assert np.array_equal(back.pixels, img.pixels)
        path2 = tmp_path / "img_p3_2.ppm"
        write_ppm(path2, back, binary=False)
        assert path.read_bytes() == path2.read_bytes()

    def test_comment_header(self, tmp_path):
        path = tmp_path / "c.ppm"
        path.write_bytes(b"P3\n# a comment\n2 1\n255\n1 2 3\n4 5 6\n")
        img = read_ppm(path)
        assert img.width == 2 and img.height == 1
        assert img.pixels.tolist() == [[1, 2, 3], [4, 5, 6]]

    def test_rejects_bad_magic(self, tmp_path):
        path = tmp_path / "bad.ppm"
        path.write_bytes(b"P5\n1 1\n255\n\x00")
        with pytest.raises(ValueError):
            read_ppm(path)

    def test_rejects_truncated(self, tmp_path):
        path = tmp_path / "trunc.ppm"
        path.write_bytes(b"P6\n2 2\n255\n\x00\x01")
        with pytest.raises(ValueError):
            read_ppm(path)

    def test_stego_pipeline_through_files(self, tmp_path):
        rng = np.random.default_rng(9)
        img = RgbImage(8, 8, rng.integers(0, 256, (64, 3)).astype(np.uint8))
        cover = tmp_path / "cover.ppm"
        write_ppm(cover, img)
        payload = ascii_to_bits("hidden message")
        stego = lsb_embed(read_ppm(cover), payload)
        out = tmp_path / "stego.ppm"
        write_ppm(out, stego)
        recovered = bits_to_ascii(lsb_extract(read_ppm(out), payload.size))
        assert recovered == "hidden message"


class TestRgbImageValidation:
    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            RgbImage(2, 2, np.zeros((3, 3), dtype=np.uint8))

    def test_range_check(self):
        with pytest.raises(ValueError):
            RgbImage(1, 1, np.array([[300, 0, 0]]))
