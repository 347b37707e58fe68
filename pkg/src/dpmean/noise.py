"""Seedable noise sources: Laplace and two-sided geometric draws.

Reproducibility contract
------------------------
A stream is identified by a ``(seed, stream_id)`` pair of 64-bit unsigned
integers.  Draws come from a Philox4x64 counter-based generator keyed with
exactly those two words (``key = [seed, stream_id]``, counter starting at
zero), with uniforms produced by numpy's ``Generator.random()`` (one 64-bit
word per double, top 53 bits).  Distinct key words give statistically
independent streams, and the same key reproduces the same draws on any
platform.

Both distributions are sampled by inverse CDF on a single uniform draw from
the open interval (0, 1); a uniform equal to 0.0 is rejected and redrawn so
the Laplace transform can never return an infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class LaplaceParams:
    """Scale b of the Laplace distribution with density exp(-|x|/b)/(2b)."""

    scale: float

    def __post_init__(self) -> None:
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"Laplace scale must be positive and finite, got {self.scale}")


@dataclass(frozen=True)
class GeometricParams:
    """Decay alpha of the two-sided geometric distribution P[Z=k] ~ alpha^|k|."""

    alpha: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"geometric alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class RandomStream:
    """Immutable descriptor of one substream; open a Cursor to draw from it."""

    seed: int
    stream_id: int

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not (0 <= v <= _UINT64_MAX):
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v}")

    def cursor(self) -> "Cursor":
        return Cursor(self)


def derive_stream(seed: int, stream_id: int) -> RandomStream:
    """Return the substream descriptor for (seed, stream_id)."""
    return RandomStream(seed, stream_id)


class Cursor:
    """Stateful draw position within one stream.

    A cursor owns its generator state and must not be shared between
    concurrent workers; distinct cursors on distinct streams are safe to use
    in parallel.  ``jump_to`` repositions an existing cursor at the start of
    another stream without reallocating, and is bit-identical to constructing
    a fresh cursor for that stream.
    """

    def __init__(self, stream: RandomStream):
        self._bitgen = np.random.Philox(
            key=np.array([stream.seed, stream.stream_id], dtype=np.uint64)
        )
        self._gen = np.random.Generator(self._bitgen)
        self._state = self._bitgen.state
        self._stream = stream

    @property
    def stream(self) -> RandomStream:
        return self._stream

    def jump_to(self, stream: RandomStream) -> None:
        """Reposition this cursor at the origin of ``stream``."""
        st = self._state
        inner = st["state"]
        inner["key"][0] = stream.seed
        inner["key"][1] = stream.stream_id
        inner["counter"][:] = 0
        st["buffer"][:] = 0
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bitgen.state = st
        self._stream = stream

    def uniform_open(self) -> float:
        """One uniform draw from the open interval (0, 1)."""
        u = self._gen.random()
        while u == 0.0:
            u = self._gen.random()
        return u

    def uniforms_open(self, size: int) -> np.ndarray:
        """Batch of open-interval uniforms; consumes the same words as
        ``size`` scalar calls (unless a zero occurs, probability 2^-53 each)."""
        u = self._gen.random(size)
        zeros = u == 0.0
        while np.any(zeros):
            u[zeros] = self._gen.random(int(zeros.sum()))
            zeros = u == 0.0
        return u


def laplace_from_uniform(u, scale):
    """Map uniform(0,1) draws through the Laplace inverse CDF.

    x = -scale * sign(u - 1/2) * log(1 - 2|u - 1/2|).  Accepts scalars or
    arrays; vectorized evaluation may differ from the scalar sampler in the
    last ulp.
    """
    t = np.asarray(u, dtype=np.float64) - 0.5
    x = -scale * np.sign(t) * np.log1p(-2.0 * np.abs(t))
    return x if x.ndim else float(x)


def laplace_sample(cursor: Cursor, params: LaplaceParams) -> float:
    """One Laplace draw by inverse CDF on one uniform."""
    t = cursor.uniform_open() - 0.5
    if t == 0.0:
        return 0.0
    mag = -params.scale * math.log1p(-2.0 * abs(t))
    return mag if t > 0.0 else -mag


def two_sided_geometric_from_uniform(u, alpha):
    """Map uniform(0,1) draws through the two-sided geometric inverse CDF.

    The CDF of P[Z=k] = (1-alpha)/(1+alpha) * alpha^|k| is
    F(k) = alpha^(-k)/(1+alpha) for k <= -1 and 1 - alpha^(k+1)/(1+alpha)
    for k >= 0; this returns min{k : F(k) >= u}.  Accepts scalars or arrays.
    """
    u = np.asarray(u, dtype=np.float64)
    log_alpha = math.log(alpha)
    neg = u * (1.0 + alpha) <= alpha
    k_neg = np.ceil(-np.log(u * (1.0 + alpha)) / log_alpha)
    k_pos = np.maximum(0.0, np.ceil(np.log((1.0 - u) * (1.0 + alpha)) / log_alpha - 1.0))
    k = np.where(neg, k_neg, k_pos)
    return k.astype(np.int64) if k.ndim else int(k)


def two_sided_geometric_sample(cursor: Cursor, params: GeometricParams) -> int:
    """One two-sided geometric draw by inverse CDF on one uniform."""
    alpha = params.alpha
    u = cursor.uniform_open()
    log_alpha = math.log(alpha)
    if u * (1.0 + alpha) <= alpha:
        return math.ceil(-math.log(u * (1.0 + alpha)) / log_alpha)
    return max(0, math.ceil(math.log((1.0 - u) * (1.0 + alpha)) / log_alpha - 1.0))
