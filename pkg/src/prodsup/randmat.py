"""
Reproducible complex Gaussian sampling and pilot matrices.

Every Monte Carlo sample owns a private random substream whose seed is a
64-bit avalanche mix of ``(root_seed, sample_index)``. A sample therefore
draws the same numbers no matter how the index range is split across
workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SystemConfig, validate_config

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """Finalizer of the SplitMix64 generator (a bijective 64-bit avalanche mix)."""
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeedStream:
    root_seed: int
    sample_index: int

    def seed(self) -> int:
        mixed_index = splitmix64((self.sample_index + 1) * _GOLDEN_GAMMA)
        return splitmix64((self.root_seed & _MASK64) ^ mixed_index)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed()))


def _cgauss_flat(gen: np.random.Generator, count: int) -> np.ndarray:
    # real and imaginary parts each N(0, 1/2)
    re_im = gen.standard_normal(2 * count) * np.sqrt(0.5)
    return re_im[0::2] + 1j * re_im[1::2]


def sample_cgauss(rows: int, cols: int, stream: SeedStream) -> np.ndarray:
    """A ``rows x cols`` matrix of i.i.d. CN(0, 1) entries drawn from ``stream``."""
    return _cgauss_flat(stream.generator(), rows * cols).reshape(rows, cols)


def sample_cgauss_batch(shapes, root_seed: int, indices) -> list:
    """Draw several matrices per sample for a batch of sample indices.

    Sample ``i`` consumes its own substream in the order given by ``shapes``;
    the result is one array per shape with a leading batch axis.
    """
    indices = np.asarray(indices, dtype=np.int64)
    sizes = [r * c for r, c in shapes]
    total = sum(sizes)
    flat = np.empty((indices.size, total), dtype=complex)
    for row, idx in enumerate(indices):
        flat[row] = _cgauss_flat(SeedStream(root_seed, int(idx)).generator(), total)
    out = []
    start = 0
    for (r, c), size in zip(shapes, sizes):
        out.append(flat[:, start:start + size].reshape(indices.size, r, c))
        start += size
    return out


@dataclass(frozen=True)
class ChannelSample:
    """One realization of every random quantity in a coherence block.

    Attributes carry a leading batch axis when produced by
    :func:`sample_channels`.
    """

    h_dynamic: np.ndarray   # N_d x M
    h_static: np.ndarray    # N_s x M
    x_s: np.ndarray         # M x N_d, static user's data block
    w_train: np.ndarray     # N_d x N_d, dynamic user's pilot-phase noise
    w_train_static: np.ndarray  # N_s x N_d, static user's pilot-phase noise
    x_delta: np.ndarray     # N_d x (T_d - N_d), dynamic user's data


def channel_shapes(cfg: SystemConfig):
    nd, ns, m = cfg.n_dynamic, cfg.n_static, cfg.m_tx
    return [(nd, m), (ns, m), (m, nd), (nd, nd), (ns, nd), (nd, cfg.data_slots)]


def sample_channels(cfg: SystemConfig, root_seed: int, indices) -> ChannelSample:
    """Batched :class:`ChannelSample` for the given sample indices.

    All rate evaluators share this layout, so evaluators run with the same
    seed see the same channel draws (common random numbers).
    """
    cfg = validate_config(cfg)
    return ChannelSample(*sample_cgauss_batch(channel_shapes(cfg), root_seed, indices))


def unitary_pilot(n: int) -> np.ndarray:
    """Normalized ``n``-point DFT matrix, so that ``X X^H = I``."""
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def baseline_pilot(n: int) -> np.ndarray:
    """Orthogonal pilot with ``S S^H = n I``."""
    return np.sqrt(n) * unitary_pilot(n)
