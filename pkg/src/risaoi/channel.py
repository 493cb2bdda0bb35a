"""Geometry, Saleh-Valenzuela channel draws and link-level SNR/rate.

Conventions
-----------
G has shape (n_tx, M) and each H_r has shape (M, n_rx), so the effective
channel G @ diag(e^{j phi}) @ H_r is (n_tx, n_rx) and the received amplitude
is f^H H^H w.

Angles for the linear arrays are measured from broadside, so the array
response only depends on ``sin(psi)``. The RIS lies in the y-z plane facing
+x; rows run along y and columns along z. For a unit direction ``u`` leaving
the RIS, ``cos(zeta) = u_z`` and ``sin(zeta) sin(phi) = u_y``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_SPACING = 0.5


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class SystemGeometry:
    bs_position: tuple = (2.0, 0.0, 10.0)
    ris_position: tuple = (0.0, 40.0, 2.5)
    ue_circle_center: tuple = (10.0, 40.0, 1.5)
    ue_circle_radius: float = 5.0
    # unit vectors along the BS and UE linear arrays
    bs_array_axis: tuple = (1.0, 0.0, 0.0)
    ue_array_axis: tuple = (0.0, 1.0, 0.0)

    def __post_init__(self):
        if self.ue_circle_radius <= 0:
            raise ChannelError("ue_circle_radius must be positive")
        for p in (self.bs_position, self.ris_position, self.ue_circle_center):
            if len(p) != 3:
                raise ChannelError("positions must be 3-D")
            if p[2] < 0:
                raise ChannelError("heights must be non-negative")

    @property
    def bs_height(self):
        return self.bs_position[2]

    @property
    def ris_height(self):
        return self.ris_position[2]

    @property
    def ue_height(self):
        return self.ue_circle_center[2]


@dataclass(frozen=True)
class ArrayConfig:
    n_tx: int = 64
    n_rx: int = 64
    ris_rows: int = 10
    ris_cols: int = 10
    element_spacing_ratio: float = DEFAULT_SPACING

    def __post_init__(self):
        for name in ("n_tx", "n_rx"):
            n = getattr(self, name)
            if n < 1 or n & (n - 1):
                raise ChannelError(f"{name}={n} is not a power of two")
        if self.ris_rows < 1 or self.ris_cols < 1:
            raise ChannelError("RIS needs at least one element")
        if self.element_spacing_ratio <= 0:
            raise ChannelError("element_spacing_ratio must be positive")

    @property
    def n_ris(self):
        return self.ris_rows * self.ris_cols


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class LinkBudget:
    """Linear-scale link budget. Use :meth:`from_db` for dB-valued inputs."""

    tx_power: float
    noise_power: float
    snr_threshold: float
    pathloss_a: float = 61.4
    pathloss_b: float = 2.0
    shadow_sigma: float = 5.8
    rician_mu: float = 10.0

    def __post_init__(self):
        if self.tx_power <= 0 or self.noise_power <= 0:
            raise ChannelError("powers must be positive")
        if self.snr_threshold <= 0:
            raise ChannelError("snr_threshold must be positive")

    @classmethod
    def from_db(cls, tx_power_dbm=45.0, noise_power_dbm=-90.0, snr_threshold_db=2.0,
                pathloss_a=61.4, pathloss_b=2.0, shadow_sigma_db=5.8, rician_mu_db=10.0):
        return cls(tx_power=db_to_linear(tx_power_dbm),
                   noise_power=db_to_linear(noise_power_dbm),
                   snr_threshold=db_to_linear(snr_threshold_db),
                   pathloss_a=pathloss_a, pathloss_b=pathloss_b,
                   shadow_sigma=shadow_sigma_db, rician_mu=rician_mu_db)


@dataclass(frozen=True)
class PathComponent:
    complex_gain: complex
    azimuth_aod: float
    elevation_aod: float
    azimuth_aoa: float
    elevation_aoa: float
    is_los: bool


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    g: np.ndarray
    h_r: tuple
    paths_g: tuple
    paths_h: tuple
    ue_positions: np.ndarray = field(repr=False)

    @property
    def k_ues(self):
        return len(self.h_r)


# ---------------------------------------------------------------------------
# array responses


def ula_response(n, u, spacing=DEFAULT_SPACING):
    """ULA response for spatial frequency ``u = sin(psi)``, unit norm."""
    idx = np.arange(n)
    return np.exp(2j * np.pi * spacing * idx * u) / math.sqrt(n)


def ula_steering(n, psi, spacing=DEFAULT_SPACING):
    if n < 1:
        raise ChannelError("n must be >= 1")
    return ula_response(n, math.sin(psi), spacing)


def upa_steering(m_a, m_b, phi, zeta, spacing=DEFAULT_SPACING):
    """Planar response, flattened row-major over (row i, column j)."""
    if m_a < 1 or m_b < 1:
        raise ChannelError("m_a and m_b must be >= 1")
    i = np.arange(m_a)[:, None]
    j = np.arange(m_b)[None, :]
    phase = 2 * np.pi * spacing * (i * math.sin(zeta) * math.sin(phi) + j * math.cos(zeta))
    return (np.exp(1j * phase) / math.sqrt(m_a * m_b)).ravel()


# ---------------------------------------------------------------------------
# large-scale fading


def pathloss_db(distance, shadow_db, budget):
    if distance <= 0:
        raise ChannelError(f"distance must be positive, got {distance}")
    return budget.pathloss_a + 10 * budget.pathloss_b * math.log10(distance) + shadow_db


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def ula_angle(direction, axis):
    """Broadside angle of ``direction`` for a ULA lying along ``axis``."""
    s = float(np.clip(_unit(direction) @ _unit(axis), -1.0, 1.0))
    return math.asin(s)


def ris_angles(direction):
    """(azimuth, elevation) of a direction leaving the RIS."""
    ux, uy, uz = _unit(direction)
    zeta = math.acos(float(np.clip(uz, -1.0, 1.0)))
    phi = math.atan2(uy, ux) if ux >= 0 else math.atan2(uy, -ux)
    # keep phi in [-pi/2, pi/2]; a node behind the surface mirrors onto the front
    return phi, zeta


def _cn(rng, var):
    return complex(rng.normal(scale=math.sqrt(var / 2), size=2) @ np.array([1, 1j]))


def _draw_paths(rng, los_ula, los_ris, kappa, mu, n_paths, ris_is_rx):
    """LOS path first, then NLOS paths with uniform angle laws."""
    paths = []
    for i in range(n_paths):
        if i == 0:
            psi = los_ula
            phi, zeta = los_ris
            var = db_to_linear(-kappa)
        else:
            psi = math.asin(rng.uniform(-1.0, 1.0))
            phi = rng.uniform(-math.pi / 2, math.pi / 2)
            zeta = rng.uniform(0.0, math.pi)
            var = db_to_linear(-(kappa + mu))
        gain = _cn(rng, var)
        if ris_is_rx:
            # BS -> RIS: departs the ULA, arrives at the RIS
            paths.append(PathComponent(gain, psi, 0.0, phi, zeta, i == 0))
        else:
            paths.append(PathComponent(gain, phi, zeta, psi, 0.0, i == 0))
    return paths


def sample_ue_positions(geometry, k_ues, rng):
    r = geometry.ue_circle_radius * np.sqrt(rng.uniform(size=k_ues))
    theta = rng.uniform(0, 2 * np.pi, size=k_ues)
    cx, cy, cz = geometry.ue_circle_center
    return np.column_stack([cx + r * np.cos(theta), cy + r * np.sin(theta), np.full(k_ues, cz)])


def draw_paths(geometry, budget, p_paths, l_paths, k_ues, rng):
    """Draw every random quantity of one realization.

    The draw order does not depend on array sizes, so the same rng state gives
    the same propagation geometry for any ArrayConfig.
    """
    if p_paths < 1 or l_paths < 1 or k_ues < 1:
        raise ChannelError("p_paths, l_paths and k_ues must be >= 1")
    bs = np.asarray(geometry.bs_position, float)
    ris = np.asarray(geometry.ris_position, float)
    ues = sample_ue_positions(geometry, k_ues, rng)

    d_g = float(np.linalg.norm(ris - bs))
    kappa_g = pathloss_db(d_g, rng.normal(0.0, budget.shadow_sigma), budget)
    paths_g = _draw_paths(rng, ula_angle(ris - bs, geometry.bs_array_axis), ris_angles(bs - ris),
                          kappa_g, budget.rician_mu, p_paths, ris_is_rx=True)
    paths_h = []
    for ue in ues:
        d_h = float(np.linalg.norm(ue - ris))
        kappa_h = pathloss_db(d_h, rng.normal(0.0, budget.shadow_sigma), budget)
        paths_h.append(_draw_paths(rng, ula_angle(ris - ue, geometry.ue_array_axis),
                                   ris_angles(ue - ris), kappa_h, budget.rician_mu,
                                   l_paths, ris_is_rx=False))
    return paths_g, paths_h, ues


def assemble_bs_ris(paths, arrays):
    n_t, m = arrays.n_tx, arrays.n_ris
    d = arrays.element_spacing_ratio
    g = np.zeros((n_t, m), dtype=complex)
    for p in paths:
        a_bs = ula_response(n_t, math.sin(p.azimuth_aod), d)
        a_ris = upa_steering(arrays.ris_rows, arrays.ris_cols, p.azimuth_aoa, p.elevation_aoa, d)
        # (a_ris a_bs^H)^H, the transpose convention noted in the module docstring
        g += np.conj(p.complex_gain) * np.outer(a_bs, a_ris.conj())
    return math.sqrt(n_t * m / len(paths)) * g


def assemble_ris_ue(paths, arrays):
    n_r, m = arrays.n_rx, arrays.n_ris
    d = arrays.element_spacing_ratio
    h = np.zeros((m, n_r), dtype=complex)
    for p in paths:
        a_ris = upa_steering(arrays.ris_rows, arrays.ris_cols, p.azimuth_aod, p.elevation_aod, d)
        a_ue = ula_response(n_r, math.sin(p.azimuth_aoa), d)
        h += np.conj(p.complex_gain) * np.outer(a_ris, a_ue.conj())
    return math.sqrt(m * n_r / len(paths)) * h


def draw_channel(geometry, arrays, budget, p_paths, l_paths, k_ues, rng):
    paths_g, paths_h, ues = draw_paths(geometry, budget, p_paths, l_paths, k_ues, rng)
    g = assemble_bs_ris(paths_g, arrays)
    h_r = tuple(assemble_ris_ue(ph, arrays) for ph in paths_h)
    return ChannelRealization(g=g, h_r=h_r, paths_g=tuple(paths_g),
                              paths_h=tuple(tuple(ph) for ph in paths_h), ue_positions=ues)


# ---------------------------------------------------------------------------
# link evaluation


def effective_channel(g, phases, h_r):
    phases = np.asarray(phases, dtype=float)
    if g.shape[1] != phases.size or h_r.shape[0] != phases.size:
        raise ChannelError(f"dimension mismatch: G{g.shape}, phi({phases.size}), H_r{h_r.shape}")
    return (g * np.exp(1j * phases)[None, :]) @ h_r


def snr(f, w, h_eff, budget):
    amp = np.vdot(f, h_eff.conj().T @ w)
    return float(abs(amp) ** 2 * budget.tx_power / budget.noise_power)


def rate(snr_linear):
    if snr_linear < 0:
        raise ChannelError(f"negative SNR {snr_linear}")
    return math.log2(1.0 + snr_linear)


def snr_db(snr_linear):
    return 10 * math.log10(snr_linear)
