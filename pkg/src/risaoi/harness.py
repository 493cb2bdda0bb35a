"""End-to-end pipeline, baseline schemes, Monte Carlo averaging and sweeps."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bcd import ChannelProbe, LinkSolution, joint_optimize
from .beam_training import hierarchical_search
from .channel import draw_channel
from .codebook import build_codebook
from .config import SCHEMES, SWEEP_AXES, ConfigError, link_key
from .ris_search import ReflectionConfig, local_search
from .scheduler import (FeasibilityReport, RateProfile, ScheduleMatrix, design_schedule,
                        sum_rate, validate_schedule)

log = logging.getLogger(__name__)

# substream purposes
CHANNEL, BCD_INIT, RANDOM_RIS, RANDOM_BF = range(4)

# schemes sharing one per-UE optimisation
LINK_FAMILY = {"proposed": "optimized", "round_robin": "optimized",
               "random_ris": "random_ris", "random_bf": "random_bf"}

# axes that only touch the scheduling stage
SCHEDULE_AXES = ("a_max", "high_requirement_count", "t_slots")


def substream(seed, index, purpose, sub=0):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index, purpose, sub)))


@dataclass
class RealizationResult:
    scheme: str
    links: list
    profile: RateProfile
    schedule: ScheduleMatrix | None
    sum_rate: float
    avg_sum_rate_per_slot: float
    ue_aoi: np.ndarray
    system_aoi: float
    report: FeasibilityReport | None
    bcd_iterations: list = field(default_factory=list)

    @property
    def feasible(self):
        """Every demodulable UE meets its AoI limit (False when none is demodulable)."""
        return self.report is not None and self.report.demodulable_ok(self.profile)

    @property
    def per_slot(self):
        """Per-slot (w, f, phase indices) assembled from the schedule."""
        if self.schedule is None:
            return []
        return [(self.links[k].w, self.links[k].f, self.links[k].phi.indices)
                for k in self.schedule.scheduled_ue]


_codebooks = {}


def codebook(n):
    if n not in _codebooks:
        _codebooks[n] = build_codebook(n)
    return _codebooks[n]


def _channel(config, index):
    return draw_channel(config.geometry, config.arrays, config.budget, config.p_paths,
                        config.l_paths, config.k_ues, substream(config.seed, index, CHANNEL))


def _finish(sol, probe):
    sol.snr = probe.snr(sol.w, sol.f, sol.phi.phases)
    return sol


def optimize_links(config, index, family):
    """Per-UE link stage for one scheme family on realization ``index``."""
    chan = _channel(config, index)
    cb_tx, cb_rx = codebook(config.n_tx), codebook(config.n_rx)
    budget = config.budget
    links = []
    for k, h_r in enumerate(chan.h_r):
        probe = ChannelProbe(chan.g, h_r, budget)
        if family == "optimized":
            rng = substream(config.seed, index, BCD_INIT, k)
            sol = joint_optimize(probe, cb_tx, cb_rx, config.n_ris, config.bits,
                                 config.delta, rng)
        elif family == "random_ris":
            rng = substream(config.seed, index, RANDOM_RIS, k)
            phi = ReflectionConfig.random(config.n_ris, config.bits, rng)
            w, f = hierarchical_search(probe, cb_tx, cb_rx, phi.phases)
            r = probe(w, f, phi.phases)
            sol = LinkSolution(w, f, phi, r, 0.0, 0, [r])
        elif family == "random_bf":
            rng = substream(config.seed, index, RANDOM_BF, k)
            w = cb_tx.leaves[rng.integers(cb_tx.n)]
            f = cb_rx.leaves[rng.integers(cb_rx.n)]
            phi = local_search(probe, w, f, ReflectionConfig.random(config.n_ris, config.bits, rng))
            r = probe(w, f, phi.phases)
            sol = LinkSolution(w, f, phi, r, 0.0, 0, [r])
        else:
            raise ConfigError(f"unknown link family {family!r}")
        links.append(_finish(sol, probe))
    return links


def schedule_links(config, links, scheme):
    """Scheduling stage and metrics for fixed per-UE link solutions."""
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    profile = RateProfile.from_link([s.rate for s in links], [s.snr for s in links],
                                    config.budget.snr_threshold)
    iters = [s.iterations for s in links] if LINK_FAMILY[scheme] == "optimized" else []
    a_max = config.a_max_per_ue()
    t = config.t_slots
    if not profile.k_u:
        never = (t + 3) / 2.0
        aoi = np.full(profile.k, never)
        return RealizationResult(scheme, links, profile, None, 0.0, 0.0, aoi, float(aoi.mean()),
                                 None, iters)
    schedule = design_schedule(profile, t, a_max, adjust=scheme != "round_robin")
    report = validate_schedule(schedule, profile, a_max)
    total = sum_rate(schedule, profile)
    return RealizationResult(scheme, links, profile, schedule, total, total / t,
                             report.average_aoi, float(report.average_aoi.mean()), report, iters)


def run_realization(config, realization_index):
    links = optimize_links(config, realization_index, LINK_FAMILY[config.scheme])
    return schedule_links(config, links, config.scheme)


def run_baseline(config, scheme, realization_index=0):
    if scheme == "proposed":
        raise ConfigError("run_baseline expects a baseline scheme")
    return run_realization(config.replace(scheme=scheme), realization_index)


def run_schemes(config, realization_index, schemes=SCHEMES, variants=None):
    """All requested schemes on one realization, sharing the link stage.

    ``variants`` is an optional list of configs that differ from ``config``
    only in scheduling parameters; results come back as
    ``{(variant_pos, scheme): RealizationResult}``.
    """
    variants = variants or [config]
    for v in variants:
        if link_key(v) != link_key(config):
            raise ConfigError("variants must share the link-stage parameters")
    out = {}
    cache = {}
    for scheme in schemes:
        family = LINK_FAMILY[scheme]
        if family not in cache:
            cache[family] = optimize_links(config, realization_index, family)
        for pos, v in enumerate(variants):
            out[(pos, scheme)] = schedule_links(v, cache[family], scheme)
    return out


# ---------------------------------------------------------------------------
# aggregation


def _sd(x):
    x = np.asarray(x, dtype=float)
    return float(x.std(ddof=1)) if x.size > 1 else 0.0


def monte_carlo_mean(results):
    if not results:
        raise ValueError("no results to aggregate")
    sums = [r.sum_rate for r in results]
    per_slot = [r.avg_sum_rate_per_slot for r in results]
    sys_aoi = [r.system_aoi for r in results]
    iters = [i for r in results for i in r.bcd_iterations]
    ue_aoi = None
    if len({r.ue_aoi.size for r in results}) == 1:
        stacked = np.stack([r.ue_aoi for r in results])
        ue_aoi = stacked.mean(axis=0)
    return {
        "n": len(results),
        "mean_sum_rate": float(np.mean(sums)),
        "sd_sum_rate": _sd(sums),
        "mean_rate_per_slot": float(np.mean(per_slot)),
        "sd_rate_per_slot": _sd(per_slot),
        "mean_system_aoi": float(np.mean(sys_aoi)),
        "sd_system_aoi": _sd(sys_aoi),
        "mean_ue_aoi": ue_aoi,
        "feasible_fraction": float(np.mean([r.feasible for r in results])),
        "mean_bcd_iters": float(np.mean(iters)) if iters else 0.0,
        "sd_bcd_iters": _sd(iters) if iters else 0.0,
    }


# ---------------------------------------------------------------------------
# sweeps


def _task(args):
    config, index, schemes, variants = args
    return run_schemes(config, index, schemes, variants)


def _map(fn, tasks, workers):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


@dataclass
class SweepResult:
    axis: str
    values: list
    schemes: tuple
    results: dict  # (value, scheme) -> list of RealizationResult, realization order

    def summary(self):
        return {key: monte_carlo_mean(rs) for key, rs in self.results.items()}

    def rows(self):
        summ = self.summary()
        return [(v, s, summ[(v, s)]) for v in self.values for s in self.schemes]


def sweep(config, axis, values, schemes=SCHEMES, workers=None):
    """Run ``schemes`` for every axis value over ``config.realizations`` paired seeds."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}")
    values = list(values)
    if not values:
        raise ConfigError("sweep needs at least one value")
    workers = workers or config.workers
    configs = [config.with_axis(axis, v) for v in values]
    # group axis values whose link stage is identical
    groups = {}
    for v, c in zip(values, configs):
        groups.setdefault(link_key(c), []).append((v, c))
    tasks, owners = [], []
    for members in groups.values():
        base = members[0][1]
        for i in range(config.realizations):
            tasks.append((base, i, tuple(schemes), [c for _, c in members]))
            owners.append(members)
    results = {(v, s): [] for v in values for s in schemes}
    for members, out in zip(owners, _map(_task, tasks, workers)):
        for pos, (v, _) in enumerate(members):
            for s in schemes:
                results[(v, s)].append(out[(pos, s)])
    log.info("sweep %s done: %d values x %d schemes", axis, len(values), len(schemes))
    return SweepResult(axis, values, tuple(schemes), results)


def run_all(config, schemes=SCHEMES, workers=None):
    """All schemes on ``config.realizations`` realizations without a sweep axis."""
    workers = workers or config.workers
    tasks = [(config, i, tuple(schemes), None) for i in range(config.realizations)]
    results = {("", s): [] for s in schemes}
    for out in _map(_task, tasks, workers):
        for s in schemes:
            results[("", s)].append(out[(0, s)])
    return SweepResult("", [""], tuple(schemes), results)
