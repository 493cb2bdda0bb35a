"""AoI bookkeeping, the two-phase TDMA schedule heuristic and a brute-force oracle.

UE indices are 0-based throughout; a schedule is stored both as the K x T
binary matrix and as the per-slot UE index.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

INITIAL_AOI = 1
BRUTE_FORCE_LIMIT = 10 ** 7


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RateProfile:
    rates: np.ndarray        # R_k*, bit/s/Hz
    demodulable: np.ndarray  # gamma_k* > gamma_th

    def __post_init__(self):
        object.__setattr__(self, "rates", np.asarray(self.rates, dtype=float))
        object.__setattr__(self, "demodulable", np.asarray(self.demodulable, dtype=bool))
        if self.rates.shape != self.demodulable.shape:
            raise ScheduleError("rates and demodulable flags differ in length")

    @classmethod
    def from_link(cls, rates, snrs, snr_threshold):
        return cls(rates, np.asarray(snrs) > snr_threshold)

    @property
    def k(self):
        return self.rates.size

    @property
    def k_u(self):
        return [int(k) for k in np.flatnonzero(self.demodulable)]

    @property
    def effective_rates(self):
        """Rates with non-demodulable UEs zeroed."""
        return np.where(self.demodulable, self.rates, 0.0)

    def by_rate(self):
        """Demodulable UEs, highest rate first, lower index on ties."""
        return sorted(self.k_u, key=lambda k: (-self.rates[k], k))


@dataclass(frozen=True, eq=False)
class ScheduleMatrix:
    scheduled_ue: np.ndarray  # length T, UE index per slot
    k: int

    @property
    def u(self):
        mat = np.zeros((self.k, self.scheduled_ue.size), dtype=int)
        mat[self.scheduled_ue, np.arange(self.scheduled_ue.size)] = 1
        return mat

    @property
    def t(self):
        return self.scheduled_ue.size

    def slots_of(self, k):
        return int(np.sum(self.scheduled_ue == k))


def aoi_step(prev, scheduled, demod_ok):
    if prev < 1:
        raise ScheduleError("AoI cannot drop below 1")
    return 1 if (scheduled and demod_ok) else prev + 1


def aoi_trace(served, demod_ok=True, a0=INITIAL_AOI):
    """AoI after each slot for one UE given a boolean per-slot service vector."""
    out = np.empty(len(served), dtype=int)
    a = a0
    for t, s in enumerate(served):
        a = aoi_step(a, bool(s), demod_ok)
        out[t] = a
    return out


def average_aoi(trace):
    trace = np.asarray(trace)
    if trace.size < 1:
        raise ScheduleError("empty AoI trace")
    return float(trace.mean())


def ue_average_aoi(scheduled_ue, k, demod_ok=True):
    return average_aoi(aoi_trace(np.asarray(scheduled_ue) == k, demod_ok))


def _limits(a_max, k):
    arr = np.broadcast_to(np.asarray(a_max, dtype=float), (k,))
    return arr


def phase_one(profile, t_slots):
    """Descending-rate round robin over the demodulable UEs."""
    order = profile.by_rate()
    if not order:
        raise ScheduleError("no demodulable UE to schedule")
    if t_slots < 1:
        raise ScheduleError("need at least one slot")
    return np.array([order[t % len(order)] for t in range(t_slots)], dtype=int)


def phase_two(profile, slots, a_max):
    """Greedy hand-over of slots to the top-rate UE under average-AoI limits."""
    limits = _limits(a_max, profile.k)
    slots = slots.copy()
    k_max = profile.by_rate()[0]
    for t in range(slots.size):
        displaced = slots[t]
        if displaced == k_max:
            continue
        slots[t] = k_max
        if ue_average_aoi(slots, displaced) > limits[displaced]:
            slots[t] = displaced
    return slots


def design_schedule(profile, t_slots, a_max, adjust=True):
    """Phase I round robin, then (if ``adjust``) Phase II slot reassignment."""
    slots = phase_one(profile, t_slots)
    if adjust:
        slots = phase_two(profile, slots, a_max)
    return ScheduleMatrix(slots, profile.k)


def sum_rate(schedule, profile):
    return float(profile.effective_rates[schedule.scheduled_ue].sum())


@dataclass
class FeasibilityReport:
    one_per_slot: bool
    binary: bool
    aoi_ok: np.ndarray
    average_aoi: np.ndarray

    @property
    def feasible(self):
        return self.one_per_slot and self.binary and bool(self.aoi_ok.all())

    def demodulable_ok(self, profile):
        """AoI constraints restricted to the demodulable UEs."""
        return bool(self.aoi_ok[profile.demodulable].all())


def validate_schedule(u, profile, a_max):
    """Check one-UE-per-slot, binary entries and every UE's average AoI.

    ``u`` may be a ScheduleMatrix or a raw K x T array.
    """
    mat = np.asarray(u.u if isinstance(u, ScheduleMatrix) else u)
    limits = _limits(a_max, profile.k)
    binary = bool(np.isin(mat, (0, 1)).all())
    one_per_slot = bool((mat.sum(axis=0) == 1).all())
    avg = np.array([average_aoi(aoi_trace(mat[k] == 1, bool(profile.demodulable[k])))
                    for k in range(profile.k)])
    return FeasibilityReport(one_per_slot=one_per_slot, binary=binary,
                             aoi_ok=avg <= limits, average_aoi=avg)


def brute_force_schedule(profile, t_slots, a_max):
    """Exhaustive search over all |K_u|^T schedules.

    Returns ``(ScheduleMatrix, sum_rate)`` or ``(None, None)`` when no
    schedule satisfies every demodulable UE's AoI limit.
    """
    ues = profile.k_u
    if not ues:
        return None, None
    if len(ues) ** t_slots > BRUTE_FORCE_LIMIT:
        raise ScheduleError(f"{len(ues)}^{t_slots} schedules exceed the brute-force guard")
    limits = _limits(a_max, profile.k)
    rates = profile.effective_rates
    best, best_rate = None, -math.inf
    for combo in itertools.product(ues, repeat=t_slots):
        slots = np.array(combo)
        total = float(rates[slots].sum())
        if total <= best_rate:
            continue
        if all(ue_average_aoi(slots, k) <= limits[k] for k in ues):
            best, best_rate = slots, total
    if best is None:
        return None, None
    return ScheduleMatrix(best, profile.k), best_rate
