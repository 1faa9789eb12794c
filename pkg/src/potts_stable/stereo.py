"""Stereo Potts instances from grayscale image pairs.

Conventions (frozen):

* Pixel ``(r, x)`` of the left image matches ``(r, x - d)`` in the right
  image at disparity ``d = 0 .. k-1``.
* Matching cost is the symmetric Birchfield-Tomasi dissimilarity with
  half-pixel linear interpolation over ``{x - 1/2, x, x + 1/2}``; at the image
  border the missing neighbour is replicated.
* If ``x - d`` falls outside the right image the cost is ``cap`` when one is
  given, otherwise the dissimilarity against the border column ``0``.
* Edge weights of the 4-connected grid are ``P * s`` when
  ``|I(u) - I(v)| < T`` on the left image and ``s`` otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .core import Instance
from .instances import grid_edges


class PGMError(ValueError):
    pass


_TOKEN = re.compile(rb"#[^\n]*|\S+")


def parse_pgm(data: bytes) -> np.ndarray:
    """Grayscale image from PGM bytes (P2 or P5, maxval at most 255)."""
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PGMError(f"unsupported PGM magic {magic!r}; expected P2 or P5")
    header, pos = [], 2
    while len(header) < 3:
        m = _TOKEN.search(data, pos)
        if m is None:
            raise PGMError("truncated PGM header")
        pos = m.end()
        if not m.group().startswith(b"#"):
            header.append(m.group())
    try:
        width, height, maxval = (int(t) for t in header)
    except ValueError:
        raise PGMError("malformed PGM header") from None
    if width <= 0 or height <= 0:
        raise PGMError("PGM dimensions must be positive")
    if not 0 < maxval <= 255:
        raise PGMError(f"PGM maxval {maxval} not supported (must be 1..255)")
    count = width * height
    if magic == b"P5":
        raster = data[pos + 1:pos + 1 + count]   # single whitespace after maxval
        if len(raster) != count:
            raise PGMError(f"P5 raster has {len(raster)} bytes, expected {count}")
        img = np.frombuffer(raster, dtype=np.uint8)
    else:
        toks = [t for t in _TOKEN.findall(data, pos) if not t.startswith(b"#")]
        if len(toks) != count:
            raise PGMError(f"P2 raster has {len(toks)} samples, expected {count}")
        try:
            img = np.array([int(t) for t in toks], dtype=np.int64)
        except ValueError:
            raise PGMError("P2 raster contains a non-integer sample") from None
    if img.max(initial=0) > maxval:
        raise PGMError("sample exceeds maxval")
    return img.reshape(height, width).astype(np.uint8)


def read_pgm(path) -> np.ndarray:
    return parse_pgm(Path(path).read_bytes())


def format_pgm(img: np.ndarray, binary: bool = True) -> bytes:
    img = np.asarray(img)
    if img.ndim != 2 or img.min(initial=0) < 0 or img.max(initial=0) > 255:
        raise PGMError("image must be 2-D with values in 0..255")
    img = img.astype(np.uint8)
    h, w = img.shape
    if binary:
        return f"P5\n{w} {h}\n255\n".encode() + img.tobytes()
    rows = "\n".join(" ".join(str(v) for v in row) for row in img)
    return f"P2\n{w} {h}\n255\n{rows}\n".encode()


def write_pgm(path, img: np.ndarray, binary: bool = True) -> None:
    Path(path).write_bytes(format_pgm(img, binary))


def _half_pixel_range(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel min and max over the samples at ``x - 1/2, x, x + 1/2``."""
    left = np.concatenate([img[:, :1], img[:, :-1]], axis=1)
    right = np.concatenate([img[:, 1:], img[:, -1:]], axis=1)
    lo_half = 0.5 * (img + left)
    hi_half = 0.5 * (img + right)
    stack = np.stack([lo_half, img, hi_half])
    return stack.min(axis=0), stack.max(axis=0)


def bt_costs(left: np.ndarray, right: np.ndarray, k: int, cap: float | None = None) -> np.ndarray:
    """Symmetric Birchfield-Tomasi cost volume of shape ``(H, W, k)``."""
    if left.shape != right.shape:
        raise ValueError(f"image dimensions differ: {left.shape} vs {right.shape}")
    if k < 1:
        raise ValueError("k must be positive")
    L = np.asarray(left, dtype=float)
    R = np.asarray(right, dtype=float)
    h, w = L.shape
    lmin, lmax = _half_pixel_range(L)
    rmin, rmax = _half_pixel_range(R)
    cols = np.arange(w)
    out = np.empty((h, w, k))
    for d in range(k):
        xr = cols - d
        outside = xr < 0
        xr = np.maximum(xr, 0)
        IR, IRmin, IRmax = R[:, xr], rmin[:, xr], rmax[:, xr]
        d_lr = np.maximum.reduce([np.zeros_like(L), L - IRmax, IRmin - L])
        d_rl = np.maximum.reduce([np.zeros_like(L), IR - lmax, lmin - IR])
        c = np.minimum(d_lr, d_rl)
        if cap is not None:
            c = np.minimum(c, cap)
            c[:, outside] = cap
        out[:, :, d] = c
    return out


def grid_weights(img: np.ndarray, P: float = 2.0, T: float = 50.0, s: float = 4.0) -> np.ndarray:
    """Weights aligned with :func:`grid_edges` for the image's shape."""
    I = np.asarray(img, dtype=float)
    edges = grid_edges(*I.shape)
    flat = I.ravel()
    diff = np.abs(flat[edges[:, 0]] - flat[edges[:, 1]])
    return np.where(diff < T, P * s, s)


@dataclass(frozen=True)
class StereoConfig:
    left: str | None = None
    right: str | None = None
    k: int = 5
    P: float = 2.0
    T: float = 50.0
    s: float = 4.0
    crop: tuple[int, int, int, int] | None = None   # (x, y, w, h)
    cap: float | None = None

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if min(self.P, self.T, self.s) <= 0:
            raise ValueError("P, T and s must be positive")
        if self.crop is not None and (len(self.crop) != 4 or min(self.crop[2:]) <= 0
                                      or min(self.crop[:2]) < 0):
            raise ValueError("crop must be (x, y, w, h) with w, h > 0")


def crop_slices(shape, crop) -> tuple[slice, slice]:
    if crop is None:
        return slice(None), slice(None)
    x, y, w, h = crop
    if y + h > shape[0] or x + w > shape[1]:
        raise ValueError(f"crop {tuple(crop)} exceeds image of size {shape[1]}x{shape[0]}")
    return slice(y, y + h), slice(x, x + w)


def build_stereo_instance(left: np.ndarray, right: np.ndarray, cfg: StereoConfig) -> Instance:
    """Grid Potts instance; cropping happens after the costs so the crop
    still sees right-image pixels outside the window."""
    costs = bt_costs(left, right, cfg.k, cfg.cap)
    rs, cs = crop_slices(np.shape(left), cfg.crop)
    window = np.asarray(left)[rs, cs]
    costs = costs[rs, cs]
    return Instance(costs.reshape(-1, cfg.k), grid_edges(*window.shape),
                    grid_weights(window, cfg.P, cfg.T, cfg.s))


def load_stereo_instance(cfg: StereoConfig) -> Instance:
    if cfg.left is None or cfg.right is None:
        raise ValueError("left and right image paths are required")
    return build_stereo_instance(read_pgm(cfg.left), read_pgm(cfg.right), cfg)


def synthetic_pair(rows: int = 40, cols: int = 40, k: int = 5, seed: int = 0,
                   contrast: float = 30.0, noise: float = 4.0, smooth: float = 1.5):
    """Deterministic smooth-textured scene with three fronto-parallel layers.

    Returns ``(left, right, disparity)``; ``disparity`` is the ground truth
    on the left image, with values in ``0 .. k-1``.  Both images receive
    independent sensor noise of standard deviation ``noise``.
    """
    rng = np.random.default_rng(seed)
    disp = np.full((rows, cols), 1, dtype=np.int64)
    r0, c0 = rows // 4, cols // 4
    disp[r0:rows - r0, c0:cols - c0] = min(k - 1, 3)
    disp[rows // 2:, : cols // 3] = min(k - 1, 2)
    tex = ndimage.gaussian_filter(rng.standard_normal((rows, cols)), smooth)
    tex = 128.0 + contrast * tex / tex.std()
    left = tex.copy()
    right = tex.copy()
    # right pixel x - d shows left pixel x; later (nearer) writes win
    for layer in np.unique(disp):
        r, x = np.nonzero(disp == layer)
        ok = x - layer >= 0
        right[r[ok], x[ok] - layer] = left[r[ok], x[ok]]
    left += rng.normal(0.0, noise, left.shape)
    right += rng.normal(0.0, noise, right.shape)
    to8 = lambda a: np.clip(a, 0, 255).round().astype(np.uint8)
    return to8(left), to8(right), disp


def shifted_pair(rows: int, cols: int, shift: int, seed: int = 0):
    """Left texture and a right image shifted by an integer disparity."""
    rng = np.random.default_rng(seed)
    full = rng.integers(0, 256, size=(rows, cols + shift)).astype(np.uint8)
    left = full[:, :cols]
    right = full[:, shift:shift + cols]
    return left, right
