"""Single-snapshot received signal ``y = h(theta) x + w``.

SNR convention: per-antenna SNR = 1 / sigma^2 with |x| = |h_m| = 1, where
sigma^2 is the complex noise variance (sigma^2 / 2 per real component).
``snr_db = inf`` gives a noiseless observation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .codebook import manifold
from .numtheory import ArrayGeometry

__all__ = [
    "SourceMode",
    "ChannelConfig",
    "ReceivedSignal",
    "manifold",
    "noise_variance",
    "substream_rng",
    "transmit",
]


class SourceMode(str, Enum):
    FIXED_UNIT = "fixed-unit"
    RANDOM_PHASE = "random-phase"


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float
    source_mode: SourceMode = SourceMode.RANDOM_PHASE
    seed: int = 0
    substream_id: int = 0

    def __post_init__(self):
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError(f"invalid snr_db {self.snr_db}")
        object.__setattr__(self, "source_mode", SourceMode(self.source_mode))

    @property
    def noise_variance(self) -> float:
        return noise_variance(self.snr_db)


@dataclass(frozen=True)
class ReceivedSignal:
    y: np.ndarray
    true_index: int
    snr_db: float
    x_used: complex


def noise_variance(snr_db: float) -> float:
    if snr_db == math.inf:
        return 0.0
    return 10.0 ** (-snr_db / 10.0)


def substream_rng(seed: int, *substream: int) -> np.random.Generator:
    """Independent generator keyed by ``(seed, *substream)``.

    The key is hashed by SeedSequence, so neighbouring ids give unrelated
    streams and nothing depends on the order in which streams are created.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=substream)))


def complex_noise(rng: np.random.Generator, size, variance: float) -> np.ndarray:
    scale = math.sqrt(variance / 2.0)
    z = rng.standard_normal((2,) + tuple(np.atleast_1d(size)))
    return scale * (z[0] + 1j * z[1])


def transmit(geom: ArrayGeometry, n: int, cfg: ChannelConfig) -> ReceivedSignal:
    rng = substream_rng(cfg.seed, cfg.substream_id)
    # draw order is fixed: phase first, then noise
    phi = rng.uniform(0.0, 2.0 * math.pi)
    x = 1.0 + 0j if cfg.source_mode is SourceMode.FIXED_UNIT else complex(np.exp(1j * phi))
    h = manifold(geom, n)
    var = cfg.noise_variance
    w = complex_noise(rng, geom.m, var) if var > 0 else np.zeros(geom.m, complex)
    return ReceivedSignal(h * x + w, n, cfg.snr_db, x)
