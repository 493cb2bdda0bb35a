"""Discrete RIS phase configuration and element-wise local search."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class PhaseConfigError(ValueError):
    pass


def phase_set(bits):
    """Uniform b-bit grid ``{p * 2pi / 2**b : p = 0 .. 2**b - 1}``."""
    if bits < 1:
        raise PhaseConfigError(f"need at least one quantization bit, got {bits}")
    levels = 2 ** bits
    return np.arange(levels) * (2 * math.pi / levels)


@dataclass(frozen=True, eq=False)
class ReflectionConfig:
    indices: np.ndarray  # per-element index into phase_set(bits)
    bits: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int)
        if idx.ndim != 1 or (idx < 0).any() or (idx >= 2 ** self.bits).any():
            raise PhaseConfigError("phase indices outside the quantized set")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    @property
    def phases(self):
        return phase_set(self.bits)[self.indices]

    @property
    def m(self):
        return self.indices.size

    @classmethod
    def zeros(cls, m, bits):
        return cls(np.zeros(m, dtype=int), bits)

    @classmethod
    def random(cls, m, bits, rng):
        return cls(rng.integers(0, 2 ** bits, size=m), bits)

    def __eq__(self, other):
        return (isinstance(other, ReflectionConfig) and self.bits == other.bits
                and np.array_equal(self.indices, other.indices))


def local_search(probe, w, f, phi_init):
    """One sweep over the elements; each takes the arg-max phase with the rest fixed.

    Uses exactly ``M * 2**b`` probes. Strict comparison keeps the lowest phase
    index on ties.
    """
    grid = phase_set(phi_init.bits)
    idx = phi_init.indices.copy()
    phases = grid[idx]
    for m in range(idx.size):
        best_p, best_r = 0, -math.inf
        for p, value in enumerate(grid):
            phases[m] = value
            r = probe(w, f, phases)
            if r > best_r:
                best_p, best_r = p, r
        idx[m] = best_p
        phases[m] = grid[best_p]
    return ReflectionConfig(idx, phi_init.bits)
