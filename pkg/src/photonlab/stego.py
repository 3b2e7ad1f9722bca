"""LSB image steganography on plain PPM images.

Payload bits are consumed most-significant-first, two bits per color
channel, channels in R, G, B order and pixels in row-major order. Only the
two least significant bits of touched channels ever change. PPM reading and
writing is dependency-free and byte-exact for canonical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "RgbImage",
    "read_ppm",
    "write_ppm",
    "lsb_capacity_bits",
    "lsb_embed",
    "lsb_extract",
    "ascii_to_bits",
    "bits_to_ascii",
]


@dataclass(frozen=True)
class RgbImage:
    """8-bit RGB raster; pixels row-major with shape (width*height, 3)."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")
        px = np.asarray(self.pixels)
        if px.shape != (self.width * self.height, 3):
            raise ValueError(
                f"pixel array shape {px.shape} does not match {self.width}x{self.height}"
            )
        if px.dtype != np.uint8:
            if px.min(initial=0) < 0 or px.max(initial=0) > 255:
                raise ValueError("channel values must be in [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", px)


def read_ppm(path) -> RgbImage:
    """Read a P3 (ASCII) or P6 (binary) PPM file with maxval 255."""
    raw = Path(path).read_bytes()
    if raw[:2] not in (b"P3", b"P6"):
        raise ValueError(f"not a PPM file: magic {raw[:2]!r}")
    magic = raw[:2].decode()

    # Header: magic, width, height, maxval; '#' comments allowed between tokens.
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos])
    width, height, maxval = (int(t) for t in tokens)
    if maxval != 255:
        raise ValueError(f"only maxval 255 is supported, got {maxval}")

    if magic == "P6":
        pos += 1  # single whitespace byte after maxval
        data = np.frombuffer(raw[pos : pos + width * height * 3], dtype=np.uint8)
    else:
        values = raw[pos:].split()
        data = np.array([int(v) for v in values], dtype=np.uint8)
    if data.size != width * height * 3:
        raise ValueError(f"truncated pixel data: {data.size} of {width * height * 3} values")
    return RgbImage(width=width, height=height, pixels=data.reshape(-1, 3))


def write_ppm(path, image: RgbImage, binary: bool = True) -> None:
    """Write a canonical P6 (binary) or P3 (ASCII) PPM file."""
    header = f"{'P6' if binary else 'P3'}\n{image.width} {image.height}\n255\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if binary:
            fh.write(image.pixels.tobytes())
        else:
            lines = [" ".join(str(v) for v in px) for px in image.pixels]
            fh.write(("\n".join(lines) + "\n").encode("ascii"))


def lsb_capacity_bits(image: RgbImage) -> int:
    """Six payload bits per pixel: two per color channel."""
    return 6 * image.width * image.height


def lsb_embed(image: RgbImage, payload) -> RgbImage:
    """Hide payload bits in the two low bits of each color channel.

    An odd trailing bit occupies the higher of the two low bits and leaves
    the lowest bit untouched.
    """
    bits = np.asarray(payload, dtype=np.uint8)
    if bits.ndim != 1 or (bits.size and bits.max(initial=0) > 1):
        raise ValueError("payload must be a flat bit sequence")
    if bits.size > lsb_capacity_bits(image):
        raise ValueError(
            f"payload of {bits.size} bits exceeds capacity "
            f"{lsb_capacity_bits(image)} of a {image.width}x{image.height} image"
        )
    flat = image.pixels.reshape(-1).copy()
    n_full, tail = divmod(bits.size, 2)
    if n_full:
        pairs = bits[: 2 * n_full].reshape(-1, 2)
        fields = (pairs[:, 0] << 1) | pairs[:, 1]
        flat[:n_full] = (flat[:n_full] & 0xFC) | fields
    if tail:
        flat[n_full] = (flat[n_full] & 0xFD) | (bits[-1] << 1)
    return RgbImage(width=image.width, height=image.height, pixels=flat.reshape(-1, 3))


def lsb_extract(image: RgbImage, n_bits: int) -> np.ndarray:
    """Read back ``n_bits`` payload bits embedded by :func:`lsb_embed`."""
    if n_bits < 0:
        raise ValueError("bit count must be non-negative")
    if n_bits > lsb_capacity_bits(image):
        raise ValueError(f"requested {n_bits} bits exceeds capacity {lsb_capacity_bits(image)}")
    flat = image.pixels.reshape(-1)
    n_channels = (n_bits + 1) // 2
    out = np.empty(2 * n_channels, dtype=np.uint8)
    fields = flat[:n_channels]
    out[0::2] = (fields >> 1) & 1
    out[1::2] = fields & 1
    return out[:n_bits]


def ascii_to_bits(text: str) -> np.ndarray:
    """8-bit big-endian code points, concatenated; 7-bit characters only."""
    codes = []
    for ch in text:
        value = ord(ch)
        if value > 127:
            raise ValueError(f"character {ch!r} is not 7-bit representable")
        codes.append(value)
    if not codes:
        return np.empty(0, dtype=np.uint8)
    arr = np.array(codes, dtype=np.uint8)
    return np.unpackbits(arr.reshape(-1, 1), axis=1).reshape(-1)


def bits_to_ascii(bits) -> str:
    """Inverse of :func:`ascii_to_bits`; length must be a byte multiple."""
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.size % 8:
        raise ValueError(f"bit count {arr.size} is not a multiple of 8")
    if arr.size == 0:
        return ""
    if arr.max(initial=0) > 1:
        raise ValueError("inputs must be bits")
    values = np.packbits(arr)
    if values.max(initial=0) > 127:
        raise ValueError("decoded byte exceeds 7-bit range")
    return "".join(chr(v) for v in values)
