"""Binary-tree hierarchical codebook built by joint sub-array and deactivation.

Codewords live in sin-space: the leaf ``n`` (1-based) of an N-antenna array
points at ``-1 + (2n - 1)/N`` and every layer-``l`` codeword covers a
sin-space interval of width ``2 / 2**l``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .channel import ula_response


class CodebookError(ValueError):
    pass


def _log2(n):
    if n < 2 or n & (n - 1):
        raise CodebookError(f"codebook size must be a power of two >= 2, got {n}")
    return n.bit_length() - 1


@dataclass(frozen=True, eq=False)
class HierarchicalCodebook:
    n: int
    layers: tuple  # layers[l] is a (2**l, n) complex array, one codeword per row

    @property
    def depth(self):
        """Index of the last layer, log2(n)."""
        return len(self.layers) - 1

    def codeword(self, layer, n_idx):
        """Codeword ``n_idx`` (1-based) of ``layer``."""
        if not 1 <= n_idx <= 2 ** layer:
            raise CodebookError(f"codeword {n_idx} out of range for layer {layer}")
        return self.layers[layer][n_idx - 1]

    @property
    def leaves(self):
        return self.layers[-1]

    def coverage(self, layer, n_idx):
        width = 2.0 / 2 ** layer
        return -1.0 + (n_idx - 1) * width, -1.0 + n_idx * width


def _first_codeword(n, layer):
    p = _log2(n) - layer
    q_count = 2 ** ((p + 1) // 2)
    n_s = n // q_count
    n_active = q_count // 2 if p % 2 else q_count
    w = np.zeros(n, dtype=complex)
    for q in range(1, n_active + 1):
        theta = -q * (n_s - 1) / n_s * math.pi
        w[(q - 1) * n_s:q * n_s] = np.exp(1j * theta) * ula_response(n_s, -1 + (2 * q - 1) / n_s)
    return w


def build_codebook(n):
    depth = _log2(n)
    layers = []
    for layer in range(depth + 1):
        if layer == depth:
            cw = np.stack([ula_response(n, -1 + (2 * k - 1) / n) for k in range(1, n + 1)])
        else:
            first = _first_codeword(n, layer)
            shifts = 2.0 * np.arange(2 ** layer) / 2 ** layer
            cw = first[None, :] * np.stack([math.sqrt(n) * ula_response(n, s) for s in shifts])
        cw = cw / np.linalg.norm(cw, axis=1, keepdims=True)
        cw.setflags(write=False)
        layers.append(cw)
    return HierarchicalCodebook(n=n, layers=tuple(layers))


def beam_gain(w, psi, n=None):
    """|sqrt(n) a(n, psi)^H w| for psi in radians."""
    return beam_gain_sin(w, math.sin(psi), n)


def beam_gain_sin(w, u, n=None):
    """Vectorised beam gain over sin-space points ``u``."""
    w = np.asarray(w)
    n = w.size if n is None else n
    if w.size != n:
        raise CodebookError(f"codeword length {w.size} != {n}")
    u = np.atleast_1d(np.asarray(u, dtype=float))
    steer = np.exp(2j * np.pi * 0.5 * np.outer(u, np.arange(n)))
    g = np.abs(steer.conj() @ w)
    return g if g.size > 1 else float(g[0])


def children(layer, n_idx, depth=None):
    if n_idx < 1 or n_idx > 2 ** layer:
        raise CodebookError(f"index {n_idx} out of range for layer {layer}")
    if depth is not None and layer >= depth:
        raise CodebookError(f"layer {layer} is the last layer")
    return 2 * n_idx - 1, 2 * n_idx


def dump_csv(codebook, path):
    """One row per codeword: layer, 1-based index, then re/im pairs."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["layer", "index"] + [f"{p}{i}" for i in range(codebook.n) for p in ("re", "im")])
        for layer, cws in enumerate(codebook.layers):
            for k, w in enumerate(cws, start=1):
                vals = np.column_stack([w.real, w.imag]).ravel()
                out.writerow([layer, k] + [f"{v:.9g}" for v in vals])
