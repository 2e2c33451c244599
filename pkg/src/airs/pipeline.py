"""End-to-end solver and the parameter sweeps behind the reference figures.

Sweeps return plain tables (:class:`SweepResult`) that can be written to
CSV; no plotting happens here.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from airs.beamform import array_gain, optimal_phases_single, snr_reduced
from airs.placement import (
    SolveResult,
    evaluate_placement,
    placement_line_search,
    single_location_placement,
    single_location_ratio,
    worst_case_snr,
)
from airs.scenario import GroundPoint, Placement, ScenarioConfig, linear_to_db, make_grid

__all__ = ["SWEEP_KINDS", "SweepResult", "SweepSpec", "lattice", "run_sweep", "solve"]

log = logging.getLogger(__name__)

SWEEP_KINDS = (
    "ratio_curve",
    "gain_profile",
    "elements_sweep",
    "placement_sweep",
    "power_sweep",
    "single_location",
)
BENCHMARKS = ("optimal", "midpoint", "area_center")

# (start, stop, step) used when a SweepSpec leaves the range unset
_DEFAULT_RANGES = {
    "ratio_curve": (0.01, 1.0, 0.01),
    "gain_profile": (-0.5, 0.5, 0.001),
    "elements_sweep": (50, 500, 10),
    "placement_sweep": (0.0, None, 10.0),
    "power_sweep": (10.0, 30.0, 1.0),
    "single_location": (50, 500, 10),
}
_DEFAULT_BENCHMARK = {"elements_sweep": "midpoint", "power_sweep": "area_center"}


def lattice(start: float, stop: float, step: float) -> np.ndarray:
    """``start, start + step, ...`` up to and including ``stop`` (within 1e-9 steps)."""
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"empty range [{start}, {stop}]")
    n = int(np.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(n + 1)


def solve(cfg: ScenarioConfig, x_range=None, step_m: float = 10.0, grid=None) -> SolveResult:
    """Joint MRT, phase-shift and placement design maximising the worst-case SNR.

    Searches ``q = (x, 0)`` for ``x`` in ``x_range`` (default
    ``[0, x0 + Dx/2]``) on a ``step_m`` lattice.
    """
    grid = make_grid(cfg) if grid is None else grid
    result = placement_line_search(cfg, grid, x_range, step_m)
    if not result.worst_at(cfg.boundary_point):
        log.warning(
            "worst-case point %s differs from the far boundary point %s",
            tuple(result.worst_point), tuple(cfg.boundary_point),
        )
    return result


@dataclass(frozen=True)
class SweepSpec:
    """One experiment: a sweep kind, its abscissa range and the base scenario.

    ``start``/``stop``/``step`` default per kind.  ``target`` is the
    single-location target (default: area centre), ``gain_elements`` the
    array sizes drawn by ``gain_profile``.
    """

    kind: str
    config: ScenarioConfig = field(default_factory=ScenarioConfig)
    start: float | None = None
    stop: float | None = None
    step: float | None = None
    benchmark: str | None = None
    target: GroundPoint | None = None
    gain_elements: Sequence[int] = (10, 20, 50, 100)
    step_m: float = 10.0

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}; expected one of {', '.join(SWEEP_KINDS)}")
        if self.benchmark is not None and self.benchmark not in BENCHMARKS:
            raise ValueError(f"unknown benchmark {self.benchmark!r}; expected one of {', '.join(BENCHMARKS)}")
        if self.step is not None and not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if not self.step_m > 0:
            raise ValueError(f"step_m must be positive, got {self.step_m}")
        start, stop, _ = self.resolved_range()
        if stop < start:
            raise ValueError(f"empty sweep range [{start}, {stop}]")

    def resolved_range(self) -> tuple[float, float, float]:
        start, stop, step = _DEFAULT_RANGES[self.kind]
        if stop is None:  # placement sweep runs up to the far edge of the area
            stop = self.config.boundary_point[0]
        return (
            start if self.start is None else self.start,
            stop if self.stop is None else self.stop,
            step if self.step is None else self.step,
        )

    def resolved_benchmark(self) -> str:
        return self.benchmark or _DEFAULT_BENCHMARK.get(self.kind, "optimal")

    def resolved_target(self) -> GroundPoint:
        return self.target if self.target is not None else self.config.area_center


@dataclass(frozen=True)
class SweepResult:
    kind: str
    columns: tuple[str, ...]
    units: tuple[str, ...]
    rows: tuple[tuple, ...]

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def __len__(self) -> int:
        return len(self.rows)

    def header(self) -> list[str]:
        return [f"{c} [{u}]" if u else c for c, u in zip(self.columns, self.units)]

    def to_csv(self, path=None) -> str:
        """CSV with a ``name [unit]`` header and 17 significant digits.

        Written to ``path`` when given; the text is returned either way.
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header())
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Run one experiment and return its table (rows in lattice order)."""
    runner = {
        "ratio_curve": _ratio_curve,
        "gain_profile": _gain_profile,
        "elements_sweep": _elements_sweep,
        "placement_sweep": _placement_sweep,
        "power_sweep": _power_sweep,
        "single_location": _single_location,
    }[spec.kind]
    return runner(spec)


def _ratio_curve(spec: SweepSpec) -> SweepResult:
    rows = []
    for rho in lattice(*spec.resolved_range()):
        roots = single_location_ratio(float(rho)).roots
        rows.append((float(rho), roots[0], roots[-1]))
    return SweepResult(spec.kind, ("rho", "xi_near", "xi_far"), ("", "", ""), tuple(rows))


def _gain_profile(spec: SweepSpec) -> SweepResult:
    d = spec.config.irs_spacing_wavelengths
    xs = lattice(*spec.resolved_range())
    gains = [np.atleast_1d(array_gain(xs, int(n), d)) for n in spec.gain_elements]
    rows = tuple((float(x), *(float(g[i]) for g in gains)) for i, x in enumerate(xs))
    columns = ("delta_sin", *(f"gain_N{int(n)}" for n in spec.gain_elements))
    return SweepResult(spec.kind, columns, ("",) * len(columns), rows)


def _benchmark_placement(spec: SweepSpec, cfg: ScenarioConfig, target: GroundPoint) -> Placement:
    mode = spec.resolved_benchmark()
    if mode == "midpoint":
        return Placement(target[0] / 2, target[1] / 2)
    if mode == "area_center":
        return Placement(*cfg.area_center)
    return single_location_placement(cfg, target)[0]


def _single_snr_db(cfg: ScenarioConfig, q: Placement, target: GroundPoint) -> float:
    return linear_to_db(snr_reduced(cfg, q, optimal_phases_single(cfg, q, target), target))


def _elements_sweep(spec: SweepSpec) -> SweepResult:
    target = spec.resolved_target()
    bench = spec.resolved_benchmark()
    rows = []
    for n in lattice(*spec.resolved_range()):
        cfg = spec.config.replace(irs_elements=int(round(n)))
        q_opt = single_location_placement(cfg, target)[0]
        q_bench = _benchmark_placement(spec, cfg, target)
        rows.append((cfg.irs_elements, _single_snr_db(cfg, q_opt, target), _single_snr_db(cfg, q_bench, target)))
    return SweepResult(spec.kind, ("N", "snr_optimal_db", f"snr_{bench}_db"), ("", "dB", "dB"), tuple(rows))


def _single_location(spec: SweepSpec) -> SweepResult:
    target = spec.resolved_target()
    rows = []
    for n in lattice(*spec.resolved_range()):
        cfg = spec.config.replace(irs_elements=int(round(n)))
        q = single_location_placement(cfg, target)[0]
        rows.append((cfg.irs_elements, q[0], q[1], _single_snr_db(cfg, q, target)))
    return SweepResult(spec.kind, ("N", "q_x_m", "q_y_m", "snr_db"), ("", "m", "m", "dB"), tuple(rows))


def _placement_sweep(spec: SweepSpec) -> SweepResult:
    cfg = spec.config
    grid = make_grid(cfg)
    rows = []
    for x in lattice(*spec.resolved_range()):
        q = Placement(float(x), 0.0)
        phases, snr_db = evaluate_placement(cfg, q, grid)
        j = int(np.argmin(snr_db))
        worst = grid[j]
        rows.append((float(x), float(snr_db[j]), phases.partition.num_subarrays, worst[0], worst[1]))
    return SweepResult(
        spec.kind,
        ("x_m", "worst_snr_db", "num_subarrays", "worst_x_m", "worst_y_m"),
        ("m", "dB", "", "m", "m"),
        tuple(rows),
    )


def _power_sweep(spec: SweepSpec) -> SweepResult:
    base = spec.config
    grid = make_grid(base)
    bench = spec.resolved_benchmark()
    # placement, partition and phases do not depend on P, so both designs are fixed once
    opt = solve(base, step_m=spec.step_m, grid=grid)
    if bench == "optimal":
        q_bench, phases_bench = opt.placement, opt.phases
    else:
        q_bench = (
            Placement(*base.area_center) if bench == "area_center"
            else Placement(base.area_center[0] / 2, 0.0)
        )
        phases_bench, _ = evaluate_placement(base, q_bench, grid)
    rows = []
    for p in lattice(*spec.resolved_range()):
        cfg = base.replace(tx_power_dbm=float(p))
        rows.append((
            float(p),
            worst_case_snr(cfg, opt.placement, opt.phases, grid)[0],
            worst_case_snr(cfg, q_bench, phases_bench, grid)[0],
        ))
    return SweepResult(
        spec.kind, ("tx_power_dbm", "snr_optimal_db", f"snr_{bench}_db"), ("dBm", "dB", "dB"), tuple(rows)
    )
