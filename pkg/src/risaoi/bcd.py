"""Block coordinate descent over (beam pair, RIS phases) for a single UE."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .beam_training import hierarchical_search
from .ris_search import ReflectionConfig, local_search

MAX_OUTER_ITERATIONS = 50


class ChannelProbe:
    """Rate oracle closed over one UE's hidden channel.

    Caches ``G^H w`` and ``H_r f`` so that a probe costs O(M) once the beam
    pair is fixed, which is the common case during the RIS sweep.
    """

    def __init__(self, g, h_r, budget):
        self.g = g
        self.h_r = h_r
        self.scale = budget.tx_power / budget.noise_power
        self.calls = 0
        self._tx = {}
        self._rx = {}

    @staticmethod
    def _cached(cache, key_vec, fn):
        key = key_vec.tobytes()
        hit = cache.get(key)
        if hit is None:
            if len(cache) > 256:
                cache.clear()
            hit = cache[key] = fn(key_vec)
        return hit

    def snr(self, w, f, phases):
        gw = self._cached(self._tx, np.ascontiguousarray(w), lambda v: self.g.conj().T @ v)
        hf = self._cached(self._rx, np.ascontiguousarray(f), lambda v: self.h_r @ v)
        amp = np.dot(hf.conj() * gw, np.exp(-1j * np.asarray(phases)))
        return float(amp.real ** 2 + amp.imag ** 2) * self.scale

    def __call__(self, w, f, phases):
        self.calls += 1
        return math.log2(1.0 + self.snr(w, f, phases))


@dataclass
class LinkSolution:
    w: np.ndarray
    f: np.ndarray
    phi: ReflectionConfig
    rate: float
    snr: float
    iterations: int
    rate_history: list = field(default_factory=list)
    hit_cap: bool = False
    w_idx: int = 0
    f_idx: int = 0


def _converged(r_new, r_old, delta):
    if r_old == 0:
        return r_new == 0
    return abs(r_new - r_old) / r_old < delta


def _leaf_index(codebook, w):
    return int(np.argmax(np.abs(codebook.leaves.conj() @ w))) + 1


def joint_optimize(probe, cb_tx, cb_rx, m, bits, delta, rng, max_iter=MAX_OUTER_ITERATIONS):
    """Alternate hierarchical beam search and RIS local search until the
    relative rate change drops below ``delta``.

    The incumbent is initialised from random leaf codewords and random phases
    and its measured rate is the first entry of ``rate_history``.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    phi = ReflectionConfig.random(m, bits, rng)
    w = cb_tx.leaves[rng.integers(cb_tx.n)]
    f = cb_rx.leaves[rng.integers(cb_rx.n)]
    history = [probe(w, f, phi.phases)]
    hit_cap = False
    while True:
        w_bf, f_bf = hierarchical_search(probe, cb_tx, cb_rx, phi.phases)
        r_bf = probe(w_bf, f_bf, phi.phases)
        if not history[-1] > r_bf:
            w, f = w_bf, f_bf
        phi = local_search(probe, w, f, phi)
        history.append(probe(w, f, phi.phases))
        if _converged(history[-1], history[-2], delta):
            break
        if len(history) - 1 >= max_iter:
            hit_cap = True
            break
    final_rate = history[-1]
    return LinkSolution(w=w, f=f, phi=phi, rate=final_rate, snr=2.0 ** final_rate - 1.0,
                        iterations=len(history) - 1, rate_history=history, hit_cap=hit_cap,
                        w_idx=_leaf_index(cb_tx, w), f_idx=_leaf_index(cb_rx, f))
