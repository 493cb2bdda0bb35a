"""CSI-free beam training by binary-tree descent over hierarchical codebooks.

The only channel access is a rate probe ``probe(w, f, phases) -> float``.
"""
from __future__ import annotations

import numpy as np

from .codebook import children


def omni_codeword(n):
    """Single active antenna: a flat beam over all angles."""
    w = np.zeros(n, dtype=complex)
    w[0] = 1.0
    return w


def _descend(score, codebook):
    """Walk layers 1..depth keeping the better child; ties go to the lower index.

    Returns the 1-based leaf index and the list of kept indices per layer.
    """
    kept = []
    left, right = 1, 2
    for layer in range(1, codebook.depth + 1):
        r_left = score(codebook.codeword(layer, left))
        r_right = score(codebook.codeword(layer, right))
        best = right if r_right > r_left else left
        kept.append(best)
        if layer < codebook.depth:
            left, right = children(layer, best)
    return kept[-1], kept


def hierarchical_search(probe, cb_tx, cb_rx, phases, trace=None):
    """Receive codeword first with the BS in omni mode, then the transmit codeword.

    ``trace`` (a dict) receives the kept index path of each stage when given.
    """
    omni = omni_codeword(cb_tx.n)
    f_idx, rx_path = _descend(lambda f: probe(omni, f, phases), cb_rx)
    f = cb_rx.codeword(cb_rx.depth, f_idx)
    w_idx, tx_path = _descend(lambda w: probe(w, f, phases), cb_tx)
    w = cb_tx.codeword(cb_tx.depth, w_idx)
    if trace is not None:
        trace["rx_path"] = rx_path
        trace["tx_path"] = tx_path
        trace["w_idx"] = w_idx
        trace["f_idx"] = f_idx
    return w, f
