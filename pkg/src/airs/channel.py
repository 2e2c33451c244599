"""Deterministic line-of-sight channel model.

Both uniform linear arrays (the source's and the AIRS's) are oriented
along the x-axis, so the "sine of an angle" of a link is the x-component
of its unit direction vector.  Free-space path loss, far-field array
responses.

:func:`snr_full` evaluates the received SNR by explicit matrix
arithmetic.  It deliberately avoids every closed-form shortcut and is
used as the reference for the reduced expressions in
:mod:`airs.beamform`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from airs.scenario import GroundPoint, Placement, ScenarioConfig

__all__ = [
    "LinkGeometry",
    "array_response",
    "channel_G",
    "channel_h",
    "link_geometry",
    "path_gain_airs_gnd",
    "path_gain_src_airs",
    "sin_aoa_airs",
    "sin_aod_airs",
    "snr_full",
]

# Reference length for the propagation-phase scalars exp(-j 2 pi d / lambda).
# Only |.|^2 of the channels ever matters, so any constant works.
PHASE_REFERENCE_M = 1.0


@dataclass(frozen=True)
class LinkGeometry:
    dist_src_airs_m: float
    dist_airs_gnd_m: float
    sin_aoa_airs: float
    sin_aod_airs: float
    sin_aod_src: float


def path_gain_src_airs(cfg: ScenarioConfig, q: Placement) -> float:
    """Free-space power gain source -> AIRS: ``beta0 / (H^2 + |q|^2)``."""
    return cfg.beta0 / (cfg.altitude_m**2 + q[0] ** 2 + q[1] ** 2)


def path_gain_airs_gnd(cfg: ScenarioConfig, q: Placement, w: GroundPoint) -> float:
    """Free-space power gain AIRS -> ground point ``w``."""
    return cfg.beta0 / (cfg.altitude_m**2 + (q[0] - w[0]) ** 2 + (q[1] - w[1]) ** 2)


def sin_aoa_airs(cfg: ScenarioConfig, q: Placement):
    """Sine of the arrival angle at the AIRS (direction from AIRS back to the source)."""
    return -q[0] / math.sqrt(cfg.altitude_m**2 + q[0] ** 2 + q[1] ** 2)


def sin_aod_airs(cfg: ScenarioConfig, q: Placement, wx, wy):
    """Sine of the departure angle from the AIRS towards ground point(s) ``(wx, wy)``.

    Vectorised over ``wx``/``wy``.
    """
    dx = np.asarray(wx, dtype=float) - q[0]
    dy = np.asarray(wy, dtype=float) - q[1]
    out = dx / np.sqrt(cfg.altitude_m**2 + dx**2 + dy**2)
    return float(out) if out.ndim == 0 else out


def link_geometry(cfg: ScenarioConfig, q: Placement, w: GroundPoint) -> LinkGeometry:
    H = cfg.altitude_m
    d_g = math.sqrt(H**2 + q[0] ** 2 + q[1] ** 2)
    d_h = math.sqrt(H**2 + (q[0] - w[0]) ** 2 + (q[1] - w[1]) ** 2)
    return LinkGeometry(
        dist_src_airs_m=d_g,
        dist_airs_gnd_m=d_h,
        sin_aoa_airs=-q[0] / d_g,
        sin_aod_airs=(w[0] - q[0]) / d_h,
        sin_aod_src=q[0] / d_g,
    )


def array_response(n_elems: int, spacing_wl: float, sin_angle: float) -> np.ndarray:
    """ULA steering vector, element ``k`` = ``exp(-j 2 pi k d sin)`` for k = 0..n-1."""
    if not -1.0 - 1e-12 <= sin_angle <= 1.0 + 1e-12:
        raise ValueError(f"sine of angle must lie in [-1, 1], got {sin_angle}")
    k = np.arange(n_elems)
    return np.exp(-2j * np.pi * k * spacing_wl * sin_angle)


def channel_G(cfg: ScenarioConfig, q: Placement, wavelength_m: float = PHASE_REFERENCE_M) -> np.ndarray:
    """Source -> AIRS channel matrix (N x M), rank one."""
    geo = link_geometry(cfg, q, GroundPoint(0.0, 0.0))
    a_r = array_response(cfg.irs_elements, cfg.irs_spacing_wavelengths, geo.sin_aoa_airs)
    a_ts = array_response(cfg.tx_antennas, cfg.tx_spacing_wavelengths, geo.sin_aod_src)
    scale = math.sqrt(path_gain_src_airs(cfg, q)) * np.exp(-2j * np.pi * geo.dist_src_airs_m / wavelength_m)
    return scale * np.outer(a_r, a_ts.conj())


def channel_h(
    cfg: ScenarioConfig, q: Placement, w: GroundPoint, wavelength_m: float = PHASE_REFERENCE_M
) -> np.ndarray:
    """AIRS -> ground channel ``h`` (length N); the link applies ``h^H``."""
    geo = link_geometry(cfg, q, w)
    a_t = array_response(cfg.irs_elements, cfg.irs_spacing_wavelengths, geo.sin_aod_airs)
    h_herm = math.sqrt(path_gain_airs_gnd(cfg, q, w)) * np.exp(
        -2j * np.pi * geo.dist_airs_gnd_m / wavelength_m
    ) * a_t.conj()
    return h_herm.conj()


def snr_full(
    cfg: ScenarioConfig,
    q: Placement,
    phases,
    w: GroundPoint,
    v: np.ndarray,
    wavelength_m: float = PHASE_REFERENCE_M,
) -> float:
    """Linear received SNR ``P/sigma^2 |h^H Theta G v|^2`` by dense matrix products.

    ``phases`` is a :class:`~airs.beamform.PhasePlan` or any length-N
    sequence of phase shifts in radians.
    """
    theta = np.asarray(getattr(phases, "phases", phases), dtype=float)
    if theta.shape != (cfg.irs_elements,):
        raise ValueError(f"expected {cfg.irs_elements} phase shifts, got shape {theta.shape}")
    v = np.asarray(v, dtype=complex)
    if v.shape != (cfg.tx_antennas,):
        raise ValueError(f"expected a beamforming vector of length {cfg.tx_antennas}")
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValueError(f"beamforming vector must have unit norm, got {np.linalg.norm(v)}")
    G = channel_G(cfg, q, wavelength_m)
    h = channel_h(cfg, q, w, wavelength_m)
    Theta = np.diag(np.exp(1j * theta))
    y = h.conj() @ Theta @ G @ v
    return cfg.snr_scale * float(abs(y) ** 2)
