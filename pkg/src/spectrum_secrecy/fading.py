"""Rayleigh block-fading environment, modeled at the power-gain level.

Rayleigh amplitudes mean the power gains h = |g|^2 are exponentially
distributed, so everything here works with exponential power gains directly:
h_M (main link), h_E (eavesdropper link), h_P (link to the primary receiver).
Gains are constant within a coherence interval and independent across
intervals and across links.

Sampling uses the counter-based Philox generator keyed by
(master_seed, stream_index), so independent substreams are reproducible and
safe to hand to parallel workers. The exponential draws come from the
inverse CDF, -gamma * log(1 - u) with u in [0, 1), which excludes the
infinite-gain edge by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FadingParams",
    "ChannelState",
    "SampleStream",
    "sample_state",
    "sample_gains",
    "sample_gains_partitioned",
    "pdf_h",
    "cdf_h",
]

_U64_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class FadingParams:
    """Mean power gains of the main, eavesdropper and primary links."""

    gamma_M: float
    gamma_E: float
    gamma_P: float

    def __post_init__(self):
        for name in ("gamma_M", "gamma_E", "gamma_P"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0.0:
                raise ValueError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class ChannelState:
    """One channel realization (or a batch of them, with ndarray fields)."""

    h_M: float | np.ndarray
    h_E: float | np.ndarray
    h_P: float | np.ndarray

    def __post_init__(self):
        for name in ("h_M", "h_E", "h_P"):
            v = np.asarray(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(v)) or np.any(v < 0.0):
                raise ValueError(f"{name} must be finite and >= 0")


@dataclass
class SampleStream:
    """Deterministic substream of channel draws.

    Identical (master_seed, stream_index) pairs always reproduce the identical
    sample sequence; distinct stream_index values give independent substreams
    for parallel partitions. The draw position advances as samples are taken.
    """

    master_seed: int
    stream_index: int = 0
    _rng: np.random.Generator | None = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if self.stream_index < 0:
            raise ValueError("stream_index must be nonnegative")

    @property
    def rng(self) -> np.random.Generator:
        if self._rng is None:
            key = np.array(
                [int(self.master_seed) & _U64_MASK, int(self.stream_index)],
                dtype=np.uint64,
            )
            self._rng = np.random.Generator(np.random.Philox(key=key))
        return self._rng


def _exponential_from_uniform(u, gamma):
    # u in [0, 1): log1p(-u) is finite, so gains are finite by construction
    return -gamma * np.log1p(-u)


def sample_state(params: FadingParams, stream: SampleStream) -> ChannelState:
    """Draw one channel state; advances the stream by exactly three uniforms."""
    u = stream.rng.random(3)
    return ChannelState(
        h_M=float(_exponential_from_uniform(u[0], params.gamma_M)),
        h_E=float(_exponential_from_uniform(u[1], params.gamma_E)),
        h_P=float(_exponential_from_uniform(u[2], params.gamma_P)),
    )


def sample_gains(params: FadingParams, stream: SampleStream, n: int) -> ChannelState:
    """Draw a batch of n states from one stream.

    The n-batch consumes the same uniform sequence as n successive
    sample_state calls, so batched and one-at-a-time sampling agree exactly.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    u = stream.rng.random((n, 3))
    return ChannelState(
        h_M=_exponential_from_uniform(u[:, 0], params.gamma_M),
        h_E=_exponential_from_uniform(u[:, 1], params.gamma_E),
        h_P=_exponential_from_uniform(u[:, 2], params.gamma_P),
    )


def sample_gains_partitioned(
    params: FadingParams,
    master_seed: int,
    n_samples: int,
    n_partitions: int = 1,
    base_stream_index: int = 0,
) -> ChannelState:
    """Draw n_samples states split across substreams, concatenated in index order.

    Partition i uses SampleStream(master_seed, base_stream_index + i); sizes
    and the reduction order are fixed, so the result is bit-stable for a given
    (master_seed, n_partitions).
    """
    if n_partitions <= 0:
        raise ValueError("n_partitions must be positive")
    if n_samples < n_partitions:
        raise ValueError("n_samples must be >= n_partitions")
    base, extra = divmod(n_samples, n_partitions)
    chunks = []
    for i in range(n_partitions):
        size = base + (1 if i < extra else 0)
        chunks.append(sample_gains(params, SampleStream(master_seed, base_stream_index + i), size))
    return ChannelState(
        h_M=np.concatenate([c.h_M for c in chunks]),
        h_E=np.concatenate([c.h_E for c in chunks]),
        h_P=np.concatenate([c.h_P for c in chunks]),
    )


def _check_pdf_args(gamma, h):
    if not np.isfinite(gamma) or gamma <= 0.0:
        raise ValueError(f"gamma must be positive and finite, got {gamma!r}")
    h = np.asarray(h, dtype=float)
    if not np.all(np.isfinite(h)) or np.any(h < 0.0):
        raise ValueError("h must be finite and >= 0")
    return h


def pdf_h(gamma: float, h):
    """Density (1/gamma) * exp(-h/gamma) of an exponential power gain."""
    harr = _check_pdf_args(gamma, h)
    out = np.exp(-harr / gamma) / gamma
    return float(out) if harr.ndim == 0 else out


def cdf_h(gamma: float, h):
    """Distribution function 1 - exp(-h/gamma); nondecreasing in h."""
    harr = _check_pdf_args(gamma, h)
    out = -np.expm1(-harr / gamma)
    return float(out) if harr.ndim == 0 else out
