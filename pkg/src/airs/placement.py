"""AIRS placement: closed-form single-target solution and area line search.

For a single target at distance ``D`` the concatenated path loss of an
AIRS at ``q = xi * w_hat`` (altitude ``H``) is proportional to

    f(xi) = (xi^2 + rho^2) * ((xi - 1)^2 + rho^2),   rho = H / D.

Its stationary points are the roots of the cubic ``f'(xi)``, solved here
through the depressed cubic in ``zeta = xi - 1/2`` with an explicit
branch on the discriminant.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from airs.beamform import PhasePlan, design_phases, mrt_vector, snr_grid
from airs.scenario import AreaGrid, ConfigError, GroundPoint, Placement, ScenarioConfig, linear_to_db

__all__ = [
    "RatioSolution",
    "SolveResult",
    "StationaryPoint",
    "cubic_stationary_points",
    "evaluate_placement",
    "loss_ratio",
    "loss_ratio_d1",
    "loss_ratio_d2",
    "placement_line_search",
    "single_location_placement",
    "single_location_ratio",
    "single_location_snr",
    "solve_depressed_cubic",
    "worst_case_snr",
]

log = logging.getLogger(__name__)

# |discriminant| below this is treated as a triple root
DISCRIMINANT_TOL = 1e-18


def loss_ratio(xi, rho):
    """Normalised concatenated path loss ``f(xi)``."""
    xi = np.asarray(xi, dtype=float)
    return (xi**2 + rho**2) * ((xi - 1.0) ** 2 + rho**2)


def loss_ratio_d1(xi, rho):
    return 4 * xi**3 - 6 * xi**2 + (2 + 4 * rho**2) * xi - 2 * rho**2


def loss_ratio_d2(xi, rho):
    return 12 * (xi**2 - xi + 1 / 6 + rho**2 / 3)


def solve_depressed_cubic(a: float, b: float, tol: float = DISCRIMINANT_TOL):
    """Real roots of ``z^3 + a z + b = 0``.

    Returns ``(roots, case)`` with roots ascending (repeated roots listed
    once) and ``case`` one of ``"one_real"`` (discriminant > 0, Cardano),
    ``"repeated"`` (discriminant ~ 0) or ``"three_real"`` (discriminant < 0,
    trigonometric form).
    """
    disc = (b / 2) ** 2 + (a / 3) ** 3
    if disc > tol:
        r = math.sqrt(disc)
        z = np.cbrt(-b / 2 + r) + np.cbrt(-b / 2 - r)
        return [float(z)], "one_real"
    if disc >= -tol:
        u = float(np.cbrt(-b / 2))
        roots = sorted({2 * u, -u})
        return roots, "repeated"
    m = 2 * math.sqrt(-a / 3)
    cos_arg = -b * math.sqrt(-27 * a) / (2 * a * a)
    angle = math.acos(min(1.0, max(-1.0, cos_arg)))
    roots = [m * math.cos(angle / 3 - 2 * math.pi * k / 3) for k in range(3)]
    return sorted(roots), "three_real"


class StationaryPoint(NamedTuple):
    xi: float
    kind: str  # "min", "max" or "inflection"


def _classify(xi: float, rho: float) -> str:
    curv = loss_ratio_d2(xi, rho)
    if curv > 1e-9:
        return "min"
    if curv < -1e-9:
        return "max"
    # flat second derivative: fall back on the sign change of f'
    h = 1e-3
    left, right = loss_ratio_d1(xi - h, rho), loss_ratio_d1(xi + h, rho)
    if left < 0 < right:
        return "min"
    if left > 0 > right:
        return "max"
    return "inflection"


def cubic_stationary_points(rho: float) -> list[StationaryPoint]:
    """Stationary points of ``f(xi)``, each classified as minimum or maximum.

    ``f'(xi) = 4 xi^3 - 6 xi^2 + (2 + 4 rho^2) xi - 2 rho^2`` becomes
    ``zeta^3 + (rho^2 - 1/4) zeta = 0`` after ``xi = zeta + 1/2``.
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    roots, _ = solve_depressed_cubic(rho**2 - 0.25, 0.0)
    return [StationaryPoint(z + 0.5, _classify(z + 0.5, rho)) for z in roots]


@dataclass(frozen=True)
class RatioSolution:
    rho: float
    roots: tuple[float, ...]
    regime: str  # "high" (rho > 1/2), "critical" (rho = 1/2) or "low"


def single_location_ratio(rho: float) -> RatioSolution:
    """Optimal ratio coefficient(s) ``xi*`` for height-to-distance ratio ``rho``.

    ``1/2`` for ``rho >= 1/2``; otherwise the symmetric pair
    ``1/2 -+ sqrt(1/4 - rho^2)``.
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if rho > 0.5:
        return RatioSolution(rho, (0.5,), "high")
    if rho == 0.5:
        return RatioSolution(rho, (0.5,), "critical")
    r = math.sqrt(0.25 - rho * rho)
    # product of the roots is rho^2; avoids cancellation in 1/2 - r
    low = rho * rho / (0.5 + r)
    return RatioSolution(rho, (low, 1.0 - low), "low")


def single_location_snr(cfg: ScenarioConfig, q: Placement, target: GroundPoint) -> float:
    """Linear SNR at ``target`` with MRT and coherent phase shifts."""
    H2 = cfg.altitude_m**2
    f2 = (H2 + (q[0] - target[0]) ** 2 + (q[1] - target[1]) ** 2) * (H2 + q[0] ** 2 + q[1] ** 2)
    return cfg.snr_scale * cfg.beta0**2 * cfg.tx_antennas * cfg.irs_elements**2 / f2


def single_location_placement(cfg: ScenarioConfig, target: GroundPoint, branch: str = "near"):
    """Optimal AIRS placement for one target and the SNR (dB) it achieves.

    When two optima exist, ``branch="near"`` returns the one closer to the
    source and ``branch="far"`` the one closer to the target.
    """
    D = math.hypot(target[0], target[1])
    if D == 0:
        raise ConfigError("target coincides with the source node (D = 0)")
    if branch not in ("near", "far"):
        raise ValueError(f"branch must be 'near' or 'far', got {branch!r}")
    sol = single_location_ratio(cfg.altitude_m / D)
    xi = sol.roots[0] if branch == "near" else sol.roots[-1]
    q = Placement(xi * target[0], xi * target[1])
    return q, linear_to_db(single_location_snr(cfg, q, target))


def worst_case_snr(cfg: ScenarioConfig, q: Placement, phases, grid: AreaGrid):
    """Minimum SNR (dB) over the grid and the first grid point attaining it."""
    snr = snr_grid(cfg, q, phases, grid)
    i = int(np.argmin(snr))
    return linear_to_db(float(snr[i])), grid[i]


@dataclass(frozen=True)
class SolveResult:
    placement: Placement
    phases: PhasePlan
    tx_beam: np.ndarray = field(repr=False)
    worst_snr_db: float
    worst_point: GroundPoint
    snr_map: np.ndarray = field(repr=False)
    grid: AreaGrid = field(repr=False)
    search_x: np.ndarray = field(default=None, repr=False)
    search_worst_db: np.ndarray = field(default=None, repr=False)

    @property
    def num_subarrays(self) -> int:
        return self.phases.partition.num_subarrays

    def worst_at(self, point, atol: float = 1e-6) -> bool:
        return abs(self.worst_point[0] - point[0]) <= atol and abs(self.worst_point[1] - point[1]) <= atol


def evaluate_placement(cfg: ScenarioConfig, q: Placement, grid: AreaGrid):
    """Phase design at ``q`` and the resulting SNR map (dB) over the grid."""
    phases = design_phases(cfg, q, grid)
    return phases, linear_to_db(snr_grid(cfg, q, phases, grid))


def _lattice(x_lo: float, x_hi: float, step: float) -> np.ndarray:
    n = int(math.floor((x_hi - x_lo) / step + 1e-9))
    xs = x_lo + step * np.arange(n + 1)
    return xs


def placement_line_search(cfg: ScenarioConfig, grid: AreaGrid, x_range=None, step_m: float = 10.0) -> SolveResult:
    """Best AIRS position ``(x, 0)`` on a regular lattice by worst-case SNR.

    Each candidate gets its own partition and phase design.  Ties (within
    1e-12 dB) resolve to the smaller ``x``.
    """
    if x_range is None:
        x_range = (0.0, cfg.boundary_point[0])
    x_lo, x_hi = map(float, x_range)
    if not step_m > 0:
        raise ValueError(f"step_m must be positive, got {step_m}")
    if x_hi < x_lo:
        raise ValueError(f"empty search range [{x_lo}, {x_hi}]")

    xs = _lattice(x_lo, x_hi, step_m)
    worst = np.empty(xs.size)
    best = None
    for i, x in enumerate(xs):
        q = Placement(float(x), 0.0)
        phases, snr_db = evaluate_placement(cfg, q, grid)
        worst[i] = snr_db.min()
        if best is None or worst[i] > best[0] + 1e-12:
            best = (worst[i], q, phases, snr_db)
    log.debug("line search over %d candidates, best x = %.3f m", xs.size, best[1][0])

    _, q, phases, snr_db = best
    j = int(np.argmin(snr_db))
    return SolveResult(
        placement=q,
        phases=phases,
        tx_beam=mrt_vector(cfg, q),
        worst_snr_db=float(snr_db[j]),
        worst_point=grid[j],
        snr_map=snr_db,
        grid=grid,
        search_x=xs,
        search_worst_db=worst,
    )
