"""Seed derivation.

One master seed feeds every consumer; each consumer hashes
``(master, purpose tag, index)`` into its own stream so results never depend
on scheduling order.
"""
import zlib

import numpy as np


def _tag_word(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def derive_seed(master: int, tag: str, index: int = 0) -> int:
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, _tag_word(tag), int(index)])
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def stream(master: int, tag: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, tag, index))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def haar_isometry(rng: np.random.Generator, m: int, r: int) -> np.ndarray:
    """Haar-distributed m x r isometry (QR of a Ginibre draw, phase fixed)."""
    if r > m:
        raise ValueError("isometry needs m >= r")
    z = complex_normal(rng, (m, r))
    q, rr = np.linalg.qr(z)
    diag = np.diag(rr)
    phases = np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)
    return q * phases[np.newaxis, :]


def polar_isometry(a: np.ndarray) -> np.ndarray:
    """Isometric factor of the polar decomposition of a tall matrix."""
    u, _, vh = np.linalg.svd(a, full_matrices=False)
    return u @ vh
