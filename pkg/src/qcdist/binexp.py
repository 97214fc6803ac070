"""Sign-split fixed-point digit planes and the extended-index bit vectors.

A real array ``w`` is written as ``w = sum_k 2^(u-k) (pos_k - neg_k)`` with a
single top exponent ``u = floor(log2 max|w|)`` shared by every element, and
digit planes ``pos``/``neg`` of shape ``(K, *w.shape)``.  Digits are obtained
by truncation, so each component is reproduced to within ``2^(u-K+1)``
(K capped at 60 live digits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UsageError

# float64 carries 53 significant bits; deeper planes are identically zero
_MAX_LIVE_DIGITS = 60


@dataclass(frozen=True)
class FixedPointExpansion:
    top_exponent: int
    pos: np.ndarray
    neg: np.ndarray

    @property
    def digits(self) -> int:
        return self.pos.shape[0]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.pos.shape[1:]

    def row(self, j: int) -> "FixedPointExpansion":
        """Expansion of row ``j`` of a matrix, keeping the shared exponent."""
        return FixedPointExpansion(self.top_exponent, self.pos[:, j], self.neg[:, j])

    def plane(self, k: int, sign: int) -> np.ndarray:
        """Digit plane ``k`` of the positive (+1) or negative (-1) part; zero if k >= K."""
        planes = self.pos if sign > 0 else self.neg
        if k >= planes.shape[0]:
            return np.zeros(planes.shape[1:], dtype=np.uint8)
        return planes[k]


def top_exponent(values) -> int:
    peak = float(np.max(np.abs(values))) if np.size(values) else 0.0
    if peak == 0.0:
        return 0
    return math.floor(math.log2(peak))


def expand(values, digits: int, exponent: int | None = None) -> FixedPointExpansion:
    """Truncated sign-magnitude binary expansion, most significant digit first.

    ``exponent`` overrides the automatic top exponent; it must be at least
    floor(log2 max|values|).
    """
    if digits < 1:
        raise UsageError(f"digit count must be >= 1, got {digits}")
    values = np.asarray(values, dtype=np.float64)
    if not np.isfinite(values).all():
        raise UsageError("values must be finite")
    u = top_exponent(values) if exponent is None else int(exponent)
    if exponent is not None and top_exponent(values) > u:
        raise UsageError(f"exponent {u} too small for max |value|")
    live = min(digits, _MAX_LIVE_DIGITS)
    # exact power-of-two scaling followed by truncation
    mags = np.floor(np.ldexp(np.abs(values), live - 1 - u)).astype(np.int64)
    shifts = np.arange(live - 1, -1, -1, dtype=np.int64).reshape((live,) + (1,) * values.ndim)
    planes = ((mags[None] >> shifts) & 1).astype(np.uint8)
    if digits > live:
        planes = np.concatenate(
            [planes, np.zeros((digits - live,) + values.shape, dtype=np.uint8)]
        )
    negative = (values < 0)[None]
    pos = np.where(negative, 0, planes).astype(np.uint8)
    neg = np.where(negative, planes, 0).astype(np.uint8)
    return FixedPointExpansion(u, pos, neg)


def reconstruct(e: FixedPointExpansion) -> np.ndarray:
    weights = np.ldexp(1.0, e.top_exponent - np.arange(e.digits))
    signed = e.pos.astype(np.float64) - e.neg.astype(np.float64)
    return np.tensordot(weights, signed, axes=1)


def truncation_bound(e: FixedPointExpansion) -> float:
    """Worst-case |value - reconstruction|; planes past the live cap carry no digits."""
    return math.ldexp(1.0, e.top_exponent - min(e.digits, _MAX_LIVE_DIGITS) + 1)


@dataclass(frozen=True)
class ExtendedIndexMap:
    """Index (k, i) -> k*N + i over r+1 blocks of N entries."""

    size: int
    r: int

    @property
    def length(self) -> int:
        return self.size * (self.r + 1)

    @property
    def padded_length(self) -> int:
        return 1 << max(1, (self.length - 1).bit_length())

    def position(self, k: int, i: int) -> int:
        if not (0 <= k <= self.r and 0 <= i < self.size):
            raise UsageError(f"(k={k}, i={i}) outside the extended index")
        return k * self.size + i

    def unpack(self, pos: int) -> tuple[int, int]:
        return divmod(pos, self.size)


SIGN_PAIRS = ((1, 1), (-1, -1), (1, -1), (-1, 1))


def sign_weight(pair: tuple[int, int]) -> int:
    return pair[0] * pair[1]


def build_convolution_vectors(
    xrow: FixedPointExpansion, yexp: FixedPointExpansion, r: int, signs: tuple[int, int]
) -> tuple[np.ndarray, np.ndarray]:
    """Alice's and Bob's bit vectors whose inner product is
    sum_{k<=r} sum_i x^{(k)}_i y^{(r-k)}_i for the chosen sign parts.

    Block k of Alice's vector is x-plane k, block k of Bob's is y-plane r-k.
    """
    if xrow.shape != yexp.shape or len(xrow.shape) != 1:
        raise UsageError("expansions must be one-dimensional and of equal length")
    sx, sy = signs
    a = np.concatenate([xrow.plane(k, sx) for k in range(r + 1)])
    b = np.concatenate([yexp.plane(r - k, sy) for k in range(r + 1)])
    return a, b


def convolution_counts(xrow: FixedPointExpansion, yexp: FixedPointExpansion,
                       signs: tuple[int, int], r_max: int) -> np.ndarray:
    """Counts sum_k <x^{(k)}, y^{(r-k)}> for r = 0..r_max, from the plane Gram matrix."""
    sx, sy = signs
    depth = r_max + 1
    px = np.stack([xrow.plane(k, sx) for k in range(depth)]).astype(np.int64)
    py = np.stack([yexp.plane(k, sy) for k in range(depth)]).astype(np.int64)
    gram = px @ py.T
    flipped = gram[:, ::-1]
    # anti-diagonal r of gram is the diagonal with offset depth-1-r of the flip
    return np.array([np.trace(flipped, offset=depth - 1 - r) for r in range(depth)])
