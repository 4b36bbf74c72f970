"""Spike-and-slab ensembles for the encoder ``D``, decoder ``E`` and demand ``F``.

Every entry is a pure function of ``(master_seed, stream_id, replication_index,
entry_index)`` through a Philox4x32-10 counter, so any replication can be
regenerated alone, on any worker, in any order.
"""
from dataclasses import dataclass, replace

import numpy as np

from reachged._backend import kernels
from reachged.linalg import as_matrix

STREAM_D = 0
STREAM_E = 1
STREAM_F = 2

_U64 = (1 << 64) - 1
_U32 = (1 << 32) - 1


def _check_density(name, p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")


@dataclass(frozen=True)
class EnsembleParams:
    """Dimensions, densities and slab moments of one ensemble.

    ``p_D`` and ``p_E`` are the operating point used when sampling; the
    planner overrides them point by point.
    """

    K: int = 64
    N: int = 64
    L: int = 800
    p_D: float = 0.1
    p_E: float = 0.2
    p_F: float = 0.1
    v_D: float = 0.5
    v_E: float = 0.5
    v_F: float = 0.5
    mu_F: float = 0.0

    def __post_init__(self):
        for name in ("K", "N", "L"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value}")
        for name in ("p_D", "p_E", "p_F"):
            _check_density(name, getattr(self, name))
        for name in ("v_D", "v_E", "v_F"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def gamma(self):
        """Computation load, read as the expected fraction of active server->subfunction links."""
        return self.p_E

    @property
    def delta(self):
        """Communication load, read as the expected fraction of active user->server links."""
        return self.p_D

    def with_point(self, p_D=None, p_E=None):
        return replace(
            self,
            p_D=self.p_D if p_D is None else p_D,
            p_E=self.p_E if p_E is None else p_E,
        )


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0
    replication_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= _U64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if not 0 <= self.stream_id <= _U32:
            raise ValueError("stream_id must fit in 32 bits")
        if not 0 <= self.replication_index <= _U32:
            raise ValueError("replication_index must fit in 32 bits")


def sample_spike_slab(rows, cols, density, variance, mean, seed):
    """Draw a ``rows x cols`` matrix with i.i.d. entries ``(1-density) delta_0 + density N(mean, variance)``.

    The spike/slab decision and the Gaussian value use the two halves of the
    same Philox block; the Gaussian is an inverse-CDF transform.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    _check_density("density", density)
    if not variance > 0:
        raise ValueError("variance must be positive")
    if not np.isfinite(mean):
        raise ValueError("mean must be finite")
    out = kernels.spike_slab(
        int(rows), int(cols), float(density), float(np.sqrt(variance)), float(mean),
        int(seed.master_seed), int(seed.stream_id), int(seed.replication_index),
    )
    return as_matrix(out)


def sample_instance(params, master_seed, replication_index=0):
    """Return ``(D, E, F)`` for one replication, each on its own stream."""
    D = sample_spike_slab(params.K, params.N, params.p_D, params.v_D, 0.0,
                          SeedSpec(master_seed, STREAM_D, replication_index))
    E = sample_spike_slab(params.N, params.L, params.p_E, params.v_E, 0.0,
                          SeedSpec(master_seed, STREAM_E, replication_index))
    F = sample_spike_slab(params.K, params.L, params.p_F, params.v_F, params.mu_F,
                          SeedSpec(master_seed, STREAM_F, replication_index))
    return D, E, F
