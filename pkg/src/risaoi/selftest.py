"""Small-instance oracle checks runnable from the command line."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .bcd import ChannelProbe, joint_optimize
from .beam_training import hierarchical_search
from .channel import ArrayConfig, LinkBudget, SystemGeometry, draw_channel
from .codebook import beam_gain_sin, build_codebook
from .ris_search import ReflectionConfig, local_search, phase_set
from .scheduler import (RateProfile, brute_force_schedule, design_schedule, phase_one, sum_rate,
                        validate_schedule)


def _tiny_probe(seed, n=2, m_rows=1, m_cols=2):
    arrays = ArrayConfig(n, n, m_rows, m_cols)
    chan = draw_channel(SystemGeometry(), arrays, LinkBudget.from_db(), 4, 4, 1,
                        np.random.default_rng(seed))
    return ChannelProbe(chan.g, chan.h_r[0], LinkBudget.from_db()), arrays


def check_codebook():
    for n in (2, 4, 8, 16, 32, 64):
        cb = build_codebook(n)
        grid = np.linspace(-1, 1, 512, endpoint=False)
        for layer, cws in enumerate(cb.layers):
            assert np.allclose(np.linalg.norm(cws, axis=1), 1, atol=1e-12)
            ref = beam_gain_sin(cws[0], grid)
            for k in range(1, len(cws)):
                shift = 2 * k / 2 ** layer
                assert np.allclose(beam_gain_sin(cws[k], grid + shift), ref, atol=1e-9)


def check_beam_search():
    for seed in range(50):
        probe, _ = _tiny_probe(seed)
        cb = build_codebook(2)
        phases = np.zeros(2)
        w, f = hierarchical_search(probe, cb, cb, phases)
        best = max(probe(a, b, phases) for a in cb.leaves for b in cb.leaves)
        # with one layer the receive stage is exhaustive against omni, not jointly
        assert probe(w, f, phases) >= max(probe(a, f, phases) for a in cb.leaves) - 1e-12
        assert best >= probe(w, f, phases) - 1e-12


def check_local_search():
    for seed in range(50):
        probe, _ = _tiny_probe(seed, m_rows=1, m_cols=1)
        cb = build_codebook(2)
        w, f = cb.leaves[0], cb.leaves[1]
        phi = local_search(probe, w, f, ReflectionConfig.zeros(1, 1))
        brute = max(probe(w, f, np.array([p])) for p in phase_set(1))
        assert math.isclose(probe(w, f, phi.phases), brute, rel_tol=0, abs_tol=1e-12)


def check_bcd_sandwich(seeds=100):
    cb = build_codebook(2)
    for seed in range(seeds):
        probe, _ = _tiny_probe(seed)
        sol = joint_optimize(probe, cb, cb, 2, 1, 3e-3, np.random.default_rng(seed))
        best = max(probe(w, f, np.array(p)) for w in cb.leaves for f in cb.leaves
                   for p in itertools.product(phase_set(1), repeat=2))
        assert sol.rate_history[0] <= sol.rate + 1e-12 <= best + 2e-12
        assert all(b >= a for a, b in zip(sol.rate_history, sol.rate_history[1:]))


def check_scheduler(instances=200):
    rng = np.random.default_rng(1)
    profile = RateProfile([3.0, 1.0], [True, True])
    assert sum_rate(design_schedule(profile, 4, [3, 3]), profile) == 10
    assert brute_force_schedule(profile, 4, [3, 3])[1] == 10
    for _ in range(instances):
        k, t = int(rng.integers(1, 4)), int(rng.integers(1, 9))
        profile = RateProfile(rng.uniform(0.5, 10, k), rng.uniform(size=k) < 0.85)
        if not profile.k_u:
            continue
        a_max = rng.integers(1, 6, k).astype(float)
        heur = design_schedule(profile, t, a_max)
        opt, opt_rate = brute_force_schedule(profile, t, a_max)
        assert (heur.u.sum(axis=0) == 1).all()
        pone = validate_schedule(phase_one(profile, t)[None, :] == np.arange(k)[:, None],
                                 profile, a_max)
        if pone.demodulable_ok(profile):
            assert validate_schedule(heur, profile, a_max).demodulable_ok(profile)
            assert sum_rate(heur, profile) <= opt_rate + 1e-9


SUITES = [
    ("codebook", check_codebook),
    ("beam_search", check_beam_search),
    ("local_search", check_local_search),
    ("bcd_sandwich", check_bcd_sandwich),
    ("scheduler_oracle", check_scheduler),
]


def run(out=print):
    failed = 0
    for name, fn in SUITES:
        try:
            fn()
        except AssertionError as exc:
            failed += 1
            out(f"FAIL {name}: {exc}")
        else:
            out(f"PASS {name}")
    return failed
