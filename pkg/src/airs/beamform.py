"""Active (MRT) and passive (phase-shift) beamforming.

The AIRS is treated like an analog phased array.  A block of elements
steered towards spatial frequency ``s`` (sine of the departure angle) has
the familiar ``|sin(pi N d x) / sin(pi d x)|^2`` gain pattern around
``s``.  When the full-array main lobe cannot cover the whole area, the
elements are split into ``L`` contiguous sub-arrays with wider beams,
each steered to the centre of one slice of the spatial-frequency range
spanned by the area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from airs.channel import array_response, link_geometry, sin_aoa_airs, sin_aod_airs
from airs.scenario import AreaGrid, GroundPoint, Placement, ScenarioConfig

__all__ = [
    "HALF_POWER_CONSTANT",
    "PartitionError",
    "PartitionPlan",
    "PhasePlan",
    "array_gain",
    "choose_partition",
    "design_phases",
    "max_spatial_deviation",
    "mrt_vector",
    "null_beamwidth",
    "optimal_phases_single",
    "partition_phases",
    "passive_gain",
    "snr_grid",
    "snr_reduced",
    "subarray_slices",
    "three_db_beamwidth",
]

HALF_POWER_CONSTANT = 0.8858
TWO_PI = 2.0 * np.pi


class PartitionError(RuntimeError):
    """No sub-array count satisfies the beamwidth condition."""


@dataclass(frozen=True)
class PartitionPlan:
    """How the N reflecting elements are split and where each block points.

    ``target_sines`` are the spatial frequencies the blocks are steered
    to; ``targets`` are the matching ground points on the x-axis, clamped
    to the area's x-range.
    """

    num_subarrays: int
    subarray_sizes: tuple[int, ...]
    targets: tuple[GroundPoint, ...]
    target_sines: tuple[float, ...]
    max_deviation: float = 0.0

    def __post_init__(self):
        if self.num_subarrays < 1:
            raise ValueError("num_subarrays must be >= 1")
        if not (len(self.subarray_sizes) == len(self.targets) == len(self.target_sines) == self.num_subarrays):
            raise ValueError("sizes, targets and target_sines must each have num_subarrays entries")
        if min(self.subarray_sizes) < 1 or max(self.subarray_sizes) - min(self.subarray_sizes) > 1:
            raise ValueError(f"sub-array sizes must be positive and differ by at most 1: {self.subarray_sizes}")

    @property
    def num_elements(self) -> int:
        return sum(self.subarray_sizes)

    @property
    def full_array(self) -> bool:
        return self.num_subarrays == 1


@dataclass(frozen=True)
class PhasePlan:
    """Per-element phase shifts in ``[0, 2 pi)`` and the partition that produced them."""

    phases: np.ndarray
    partition: PartitionPlan
    common_phase: float = 0.0

    def __post_init__(self):
        ph = np.asarray(self.phases, dtype=float)
        if ph.ndim != 1 or ph.size != self.partition.num_elements:
            raise ValueError(f"expected {self.partition.num_elements} phases, got shape {ph.shape}")
        ph = _wrap(ph)
        ph.setflags(write=False)
        object.__setattr__(self, "phases", ph)

    def __len__(self) -> int:
        return self.phases.size

    def shifted(self, delta: float) -> "PhasePlan":
        """Same plan with ``delta`` added to every element (and to the common phase)."""
        return PhasePlan(self.phases + delta, self.partition, (self.common_phase + delta) % TWO_PI)


def _wrap(theta: np.ndarray) -> np.ndarray:
    out = np.mod(theta, TWO_PI)
    out[out >= TWO_PI] = 0.0
    return out


def subarray_slices(sizes) -> list[slice]:
    """Contiguous element ranges for the given block sizes."""
    edges = np.concatenate(([0], np.cumsum(sizes)))
    return [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


# --- active beamforming ---------------------------------------------------


def mrt_vector(cfg: ScenarioConfig, q: Placement) -> np.ndarray:
    """Maximum-ratio transmit vector towards the AIRS, unit norm.

    It depends on the placement only; the reflected link never enters.
    """
    geo = link_geometry(cfg, q, GroundPoint(0.0, 0.0))
    a = array_response(cfg.tx_antennas, cfg.tx_spacing_wavelengths, geo.sin_aod_src)
    return a / math.sqrt(cfg.tx_antennas)


# --- reduced SNR -----------------------------------------------------------


def _phases_array(phases) -> np.ndarray:
    return np.asarray(getattr(phases, "phases", phases), dtype=float)


def passive_gain(cfg: ScenarioConfig, q: Placement, phases, wx, wy, elements=None):
    """Array gain ``|sum_n exp(j(theta_n + 2 pi n d (sinT - sinR)))|^2`` at ground point(s).

    ``elements`` optionally restricts the sum to a slice or index array of
    reflecting elements.  Vectorised over ``wx``/``wy``.
    """
    theta = _phases_array(phases)
    k = np.arange(theta.size)
    if elements is not None:
        theta, k = theta[elements], k[elements]
    sin_t = np.atleast_1d(sin_aod_airs(cfg, q, wx, wy))
    spatial = sin_t - sin_aoa_airs(cfg, q)
    arg = theta[None, :] + TWO_PI * cfg.irs_spacing_wavelengths * spatial[:, None] * k[None, :]
    gain = np.abs(np.exp(1j * arg).sum(axis=1)) ** 2
    return float(gain[0]) if np.ndim(wx) == 0 and np.ndim(wy) == 0 else gain


def _path_product(cfg: ScenarioConfig, q: Placement, wx, wy):
    H2 = cfg.altitude_m**2
    wx = np.asarray(wx, dtype=float)
    wy = np.asarray(wy, dtype=float)
    return (H2 + (q[0] - wx) ** 2 + (q[1] - wy) ** 2) * (H2 + q[0] ** 2 + q[1] ** 2)


def snr_reduced(cfg: ScenarioConfig, q: Placement, phases, w: GroundPoint, elements=None) -> float:
    """Linear SNR at ``w`` with MRT at the source, via the scalar closed form."""
    num = cfg.snr_scale * cfg.beta0**2 * cfg.tx_antennas * passive_gain(cfg, q, phases, w[0], w[1], elements)
    return float(num / _path_product(cfg, q, w[0], w[1]))


def snr_grid(cfg: ScenarioConfig, q: Placement, phases, grid: AreaGrid) -> np.ndarray:
    """Linear SNR (MRT at the source) at every grid point, in grid order."""
    f1 = np.atleast_1d(passive_gain(cfg, q, phases, grid.x, grid.y))
    return cfg.snr_scale * cfg.beta0**2 * cfg.tx_antennas * f1 / _path_product(cfg, q, grid.x, grid.y)


# --- passive beamforming ---------------------------------------------------


def _steer(cfg: ScenarioConfig, q: Placement, sin_target: float, k: np.ndarray) -> np.ndarray:
    return -TWO_PI * k * cfg.irs_spacing_wavelengths * (sin_target - sin_aoa_airs(cfg, q))


def optimal_phases_single(cfg: ScenarioConfig, q: Placement, target: GroundPoint) -> PhasePlan:
    """Phase shifts adding all reflected rays coherently at ``target`` (common phase 0)."""
    s = sin_aod_airs(cfg, q, target[0], target[1])
    plan = PartitionPlan(1, (cfg.irs_elements,), (GroundPoint(*map(float, target)),), (float(s),))
    return PhasePlan(_steer(cfg, q, s, np.arange(cfg.irs_elements)), plan)


def partition_phases(cfg: ScenarioConfig, q: Placement, plan: PartitionPlan) -> PhasePlan:
    """Steer each contiguous block of elements to its own spatial frequency.

    Every block gets the single-target phase progression indexed from its
    own first element (common phase 0 per block), exactly as if it were a
    stand-alone array of ``size`` elements.
    """
    if plan.num_elements != cfg.irs_elements:
        raise ValueError(f"partition covers {plan.num_elements} elements, scenario has {cfg.irs_elements}")
    theta = np.empty(cfg.irs_elements)
    for sl, s in zip(subarray_slices(plan.subarray_sizes), plan.target_sines):
        theta[sl] = _steer(cfg, q, s, np.arange(sl.stop - sl.start))
    return PhasePlan(theta, plan)


def array_gain(delta_sin, n_elems: int, spacing_wl: float):
    """Gain pattern ``|sin(pi N d x) / sin(pi d x)|^2`` of an N-element steered ULA.

    ``x`` is the spatial-frequency offset from the steering direction.  At
    the main lobe and grating lobes (denominator zero) the limit ``N^2``
    is returned.
    """
    u = spacing_wl * np.asarray(delta_sin, dtype=float)
    # period 1 in d*x; reducing first keeps sin accurate near grating lobes
    r = u - np.round(u)
    den = np.sin(np.pi * r)
    num = np.sin(np.pi * n_elems * r)
    singular = np.abs(den) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(singular, float(n_elems) ** 2, (num / np.where(singular, 1.0, den)) ** 2)
    return float(g) if g.ndim == 0 else g


def null_beamwidth(n_elems: int, spacing_wl: float) -> float:
    """Spatial-frequency width between the first nulls, ``2 / (N d)``."""
    return 2.0 / (n_elems * spacing_wl)


def three_db_beamwidth(n_elems: int, spacing_wl: float) -> float:
    """Large-array approximation of the half-power beamwidth, ``0.8858 / (N d)``."""
    return HALF_POWER_CONSTANT / (n_elems * spacing_wl)


def max_spatial_deviation(cfg: ScenarioConfig, q: Placement, grid: AreaGrid):
    """Largest ``|sinT(q, w) - sinT(q, w0)|`` over the grid, plus the signed range.

    Returns ``(max_dev, (lo, hi))`` where ``lo <= 0 <= hi`` bracket the
    signed deviations from the area centre ``w0``.
    """
    if len(grid) == 0:
        raise ValueError("grid is empty")
    w0 = cfg.area_center
    dev = np.atleast_1d(sin_aod_airs(cfg, q, grid.x, grid.y)) - sin_aod_airs(cfg, q, w0[0], w0[1])
    lo = min(float(dev.min()), 0.0)
    hi = max(float(dev.max()), 0.0)
    return max(-lo, hi), (lo, hi)


def _ground_point_for_sine(cfg: ScenarioConfig, q: Placement, s: float) -> GroundPoint:
    # point on y = 0 whose departure sine from q equals s, clamped to the area
    x_lo, x_hi = cfg.x_extent
    if s >= 1.0:
        return GroundPoint(x_hi, 0.0)
    if s <= -1.0:
        return GroundPoint(x_lo, 0.0)
    x = q[0] + s * math.sqrt(cfg.altitude_m**2 + q[1] ** 2) / math.sqrt(1.0 - s * s)
    return GroundPoint(min(max(x, x_lo), x_hi), 0.0)


def choose_partition(cfg: ScenarioConfig, q: Placement, grid: AreaGrid) -> PartitionPlan:
    """Pick the full array or the smallest sub-array split that covers the area.

    Full array when half the 3-dB beamwidth reaches the largest deviation.
    Otherwise the smallest ``L >= 2`` with ``max_dev / L`` within half the
    3-dB beamwidth of the smallest block (``N // L`` elements).
    """
    N, d = cfg.irs_elements, cfg.irs_spacing_wavelengths
    max_dev, (lo, hi) = max_spatial_deviation(cfg, q, grid)
    w0 = cfg.area_center
    s0 = sin_aod_airs(cfg, q, w0[0], w0[1])

    if three_db_beamwidth(N, d) / 2 >= max_dev:
        return PartitionPlan(1, (N,), (w0,), (float(s0),), max_dev)

    for L in range(2, N + 1):
        if max_dev / L <= three_db_beamwidth(N // L, d) / 2:
            break
    else:
        raise PartitionError(
            f"no sub-array count up to N={N} covers a spatial-frequency deviation of {max_dev:.4g}"
        )

    base, extra = divmod(N, L)
    sizes = tuple(base + 1 if i < extra else base for i in range(L))
    width = (hi - lo) / L
    sines = tuple(float(s0 + lo + (i + 0.5) * width) for i in range(L))
    targets = tuple(_ground_point_for_sine(cfg, q, s) for s in sines)
    return PartitionPlan(L, sizes, targets, sines, max_dev)


def design_phases(cfg: ScenarioConfig, q: Placement, grid: AreaGrid) -> PhasePlan:
    """Partition the array for ``q`` and synthesise the corresponding phase shifts."""
    return partition_phases(cfg, q, choose_partition(cfg, q, grid))
