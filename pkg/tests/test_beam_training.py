import math

import numpy as np
import pytest

from risaoi.bcd import ChannelProbe
from risaoi.beam_training import hierarchical_search, omni_codeword
from risaoi.channel import ArrayConfig, LinkBudget, SystemGeometry, draw_channel, ula_steering
from risaoi.codebook import beam_gain, beam_gain_sin, build_codebook, children


class CountingProbe:
    def __init__(self, fn):
        self.fn = fn
        self.calls = []

    def __call__(self, w, f, phases):
        self.calls.append((w.copy(), f.copy()))
        return self.fn(w, f, phases)


def channel_probe(seed, n_t, n_r, m=(2, 2), paths=1):
    arrays = ArrayConfig(n_t, n_r, *m)
    budget = LinkBudget.from_db()
    ch = draw_channel(SystemGeometry(), arrays, budget, paths, paths, 1, np.random.default_rng(seed))
    return ChannelProbe(ch.g, ch.h_r[0], budget)


def test_omni_codeword():
    assert np.array_equal(omni_codeword(1), [1])
    assert np.array_equal(omni_codeword(4), [1, 0, 0, 0])
    gains = [beam_gain(omni_codeword(8), psi, 8) for psi in np.linspace(-1.5, 1.5, 31)]
    assert np.allclose(gains, 1.0)


@pytest.mark.parametrize("n_t,n_r", [(2, 2), (4, 8), (16, 4), (64, 64)])
def test_probe_budget(n_t, n_r):
    probe = CountingProbe(lambda w, f, p: float(np.abs(w).sum() + np.abs(f[:2]).sum()))
    hierarchical_search(probe, build_codebook(n_t), build_codebook(n_r), np.zeros(4))
    assert len(probe.calls) == 2 * (math.log2(n_t) + math.log2(n_r))


@pytest.mark.parametrize("seed", range(20))
def test_two_antenna_search_is_stagewise_exhaustive(seed):
    probe = channel_probe(seed, 2, 2)
    cb = build_codebook(2)
    phases = np.zeros(4)
    w, f = hierarchical_search(probe, cb, cb, phases)
    omni = omni_codeword(2)
    # one layer per stage: f is the best leaf against omni, w the best leaf against f
    assert probe(omni, f, phases) == max(probe(omni, c, phases) for c in cb.leaves)
    assert probe(w, f, phases) == max(probe(c, f, phases) for c in cb.leaves)


def test_single_path_two_antennas_matches_exhaustive_pairs():
    # rank-one channel: the rx and tx gains separate, so stagewise search is globally optimal
    cb = build_codebook(2)
    phases = np.zeros(4)
    for seed in range(20):
        probe = channel_probe(seed, 2, 2, paths=1)
        w, f = hierarchical_search(probe, cb, cb, phases)
        best = max(probe(a, b, phases) for a in cb.leaves for b in cb.leaves)
        assert probe(w, f, phases) == pytest.approx(best, rel=1e-12)


def test_constant_probe_picks_first_leaves():
    cb = build_codebook(8)
    w, f = hierarchical_search(lambda *a: 1.0, cb, cb, np.zeros(2))
    assert np.array_equal(w, cb.codeword(3, 1))
    assert np.array_equal(f, cb.codeword(3, 1))


@pytest.mark.parametrize("u0", [-0.8, -0.3, 0.1, 0.62])
def test_nearest_leaf_for_known_direction(u0):
    cb = build_codebook(4)
    target = math.asin(u0)
    probe = lambda w, f, p: beam_gain(f, target, 4) ** 2 + beam_gain(w, target, 4) ** 2
    w, f = hierarchical_search(probe, cb, cb, np.zeros(1))
    centers = [-1 + (2 * k - 1) / 4 for k in range(1, 5)]
    nearest = int(np.argmin([abs(c - u0) for c in centers])) + 1
    assert np.array_equal(f, cb.codeword(2, nearest))
    assert np.array_equal(w, cb.codeword(2, nearest))


@pytest.mark.parametrize("seed", range(10))
def test_kept_path_is_well_formed(seed):
    n = 32
    cb = build_codebook(n)
    probe = channel_probe(seed, n, n, m=(4, 4), paths=4)
    trace = {}
    phases = np.random.default_rng(seed).uniform(0, 2 * np.pi, 16)
    w, f = hierarchical_search(probe, cb, cb, phases, trace=trace)
    for path in (trace["rx_path"], trace["tx_path"]):
        assert path[0] in (1, 2)
        for layer, (parent, child) in enumerate(zip(path, path[1:]), start=1):
            assert child in children(layer, parent)
    assert np.array_equal(f, cb.codeword(cb.depth, trace["f_idx"]))
    # the kept leaf beats its rejected sibling at the last layer of each stage
    sib = lambda k: k + 1 if k % 2 else k - 1
    assert probe(w, f, phases) >= probe(cb.codeword(cb.depth, sib(trace["w_idx"])), f, phases)
    omni = omni_codeword(n)
    assert probe(omni, f, phases) >= probe(omni, cb.codeword(cb.depth, sib(trace["f_idx"])), phases)


def test_gain_helper_matches_scalar():
    w = build_codebook(16).layers[2][1]
    u = np.array([-0.4, 0.2])
    assert np.allclose(beam_gain_sin(w, u), [beam_gain(w, math.asin(x), 16) for x in u])
    assert beam_gain(ula_steering(16, 0.2), 0.2) == pytest.approx(4)
