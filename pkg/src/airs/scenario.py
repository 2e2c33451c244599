"""Problem-instance definition and coverage-area geometry.

All physical quantities are stored as given (meters, dB, dBm); linear
values are derived on demand through the properties of
:class:`ScenarioConfig`.  The source node sits at the origin and the
coverage rectangle is centred on the x-axis at ``(area_center_x_m, 0)``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Mapping, NamedTuple

import numpy as np
import yaml

__all__ = [
    "AreaGrid",
    "ConfigError",
    "GroundPoint",
    "Placement",
    "ScenarioConfig",
    "db_to_linear",
    "linear_to_db",
    "load_config",
    "make_grid",
]


class ConfigError(ValueError):
    """Invalid scenario parameters or configuration file content."""


def db_to_linear(v_db):
    """Convert a dB (or dBm) value to linear scale (ratio or mW)."""
    if np.ndim(v_db):
        return 10.0 ** (np.asarray(v_db, dtype=float) / 10.0)
    return 10.0 ** (float(v_db) / 10.0)


def linear_to_db(v):
    """Inverse of :func:`db_to_linear`."""
    return 10.0 * np.log10(v) if np.ndim(v) else 10.0 * math.log10(v)


class GroundPoint(NamedTuple):
    """A location ``w`` on the ground (meters)."""

    x_m: float
    y_m: float


class Placement(NamedTuple):
    """Horizontal AIRS coordinate ``q`` (meters).  Altitude is a scenario parameter."""

    x_m: float
    y_m: float = 0.0


_INT_FIELDS = ("tx_antennas", "irs_elements", "grid_nx", "grid_ny")


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical constants and geometry of one problem instance.

    Defaults reproduce the numerical setup used for the reference results:
    H = 100 m, a 1000 m x 600 m area centred at (1000, 0), P = 20 dBm,
    noise -110 dBm, beta0 = -40 dB, M = 16, N = 200, d = lambda/10 and
    d0 = lambda/2.
    """

    altitude_m: float = 100.0
    area_center_x_m: float = 1000.0
    area_length_m: float = 1000.0
    area_width_m: float = 600.0
    tx_power_dbm: float = 20.0
    noise_power_dbm: float = -110.0
    ref_gain_db: float = -40.0
    tx_antennas: int = 16
    irs_elements: int = 200
    irs_spacing_wavelengths: float = 0.1
    tx_spacing_wavelengths: float = 0.5
    grid_nx: int = 50
    grid_ny: int = 30

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name in _INT_FIELDS:
                if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                    raise ConfigError(f"{f.name}: expected an integer, got {value!r}")
                if value < 1:
                    raise ConfigError(f"{f.name}: must be a positive integer, got {value}")
            else:
                if isinstance(value, bool) or not isinstance(value, (int, float, np.number)):
                    raise ConfigError(f"{f.name}: expected a real number, got {value!r}")
                if not math.isfinite(value):
                    raise ConfigError(f"{f.name}: must be finite, got {value}")
        if self.altitude_m <= 0:
            raise ConfigError(f"altitude_m: must be > 0, got {self.altitude_m}")
        if self.area_width_m < 0:
            raise ConfigError(f"area_width_m: must be >= 0, got {self.area_width_m}")
        if self.area_length_m < self.area_width_m:
            raise ConfigError(
                f"area_length_m: must be >= area_width_m ({self.area_length_m} < {self.area_width_m})"
            )
        if not 0 < self.irs_spacing_wavelengths < 1:
            raise ConfigError(
                f"irs_spacing_wavelengths: must lie in (0, 1), got {self.irs_spacing_wavelengths}"
            )
        if self.tx_spacing_wavelengths <= 0:
            raise ConfigError(
                f"tx_spacing_wavelengths: must be > 0, got {self.tx_spacing_wavelengths}"
            )
        # dB fields must map to positive, finite linear values
        for name in ("tx_power_dbm", "noise_power_dbm", "ref_gain_db"):
            lin = db_to_linear(getattr(self, name))
            if not (lin > 0 and math.isfinite(lin)):
                raise ConfigError(f"{name}: linear value out of range")

    # derived linear quantities

    @property
    def snr_scale(self) -> float:
        """Transmit-power-to-noise ratio P/sigma^2 (linear)."""
        return db_to_linear(self.tx_power_dbm - self.noise_power_dbm)

    @property
    def beta0(self) -> float:
        return db_to_linear(self.ref_gain_db)

    @property
    def area_center(self) -> GroundPoint:
        return GroundPoint(float(self.area_center_x_m), 0.0)

    @property
    def boundary_point(self) -> GroundPoint:
        """Far edge midpoint ``(x0 + Dx/2, 0)``."""
        return GroundPoint(self.area_center_x_m + self.area_length_m / 2, 0.0)

    @property
    def x_extent(self) -> tuple[float, float]:
        half = self.area_length_m / 2
        return self.area_center_x_m - half, self.area_center_x_m + half

    @property
    def y_extent(self) -> tuple[float, float]:
        half = self.area_width_m / 2
        return -half, half

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], base: "ScenarioConfig | None" = None) -> "ScenarioConfig":
        """Build a config from flat key/value pairs, starting from ``base`` (or defaults).

        Unknown keys and values of the wrong type raise :class:`ConfigError`
        naming the offending field.
        """
        known = set(cls.field_names())
        changes = {}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"{key}: unknown configuration field")
            changes[key] = _coerce(key, value)
        return dataclasses.replace(base or cls(), **changes)


def _coerce(key: str, value: Any):
    # strings come from --set overrides, or from YAML scalars like "1e-4"
    if isinstance(value, str):
        text = value.strip()
        try:
            value = int(text)
        except ValueError:
            try:
                value = float(text)
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {value!r} as a number") from None
    if key in _INT_FIELDS:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a real number, got {value!r}")
    return float(value)


def load_config(path: str | Path) -> ScenarioConfig:
    """Read a flat YAML/JSON mapping of :class:`ScenarioConfig` fields.

    Missing keys take their default values.
    """
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not a valid YAML/JSON document ({exc})") from exc
    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        raise ConfigError(f"{path}: expected a flat key/value mapping")
    return ScenarioConfig.from_mapping(data)


@dataclass(frozen=True)
class AreaGrid:
    """Sample points of the coverage rectangle, stored column-wise.

    Points are the ``grid_nx x grid_ny`` lattice (x varies slowest)
    followed by whichever forced points are not already on the lattice.
    """

    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError("x and y must be 1-D arrays of equal length")
        self.x.setflags(write=False)
        self.y.setflags(write=False)

    def __len__(self) -> int:
        return self.x.size

    def __iter__(self) -> Iterator[GroundPoint]:
        for x, y in zip(self.x, self.y):
            yield GroundPoint(float(x), float(y))

    def __getitem__(self, i: int) -> GroundPoint:
        return GroundPoint(float(self.x[i]), float(self.y[i]))

    def __contains__(self, point) -> bool:
        return self.index_of(point) is not None

    def index_of(self, point, atol: float = 1e-9) -> int | None:
        hits = np.flatnonzero((np.abs(self.x - point[0]) <= atol) & (np.abs(self.y - point[1]) <= atol))
        return int(hits[0]) if hits.size else None

    @classmethod
    def from_points(cls, points) -> "AreaGrid":
        pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
        return cls(pts[:, 0].copy(), pts[:, 1].copy())


def make_grid(cfg: ScenarioConfig, nx: int | None = None, ny: int | None = None) -> AreaGrid:
    """Uniform lattice over the coverage area plus forced points.

    The four corners, the area centre ``(x0, 0)`` and the far boundary
    point ``(x0 + Dx/2, 0)`` are always present.  Duplicates (e.g. for a
    degenerate area) are removed keeping the first occurrence.
    """
    nx = cfg.grid_nx if nx is None else nx
    ny = cfg.grid_ny if ny is None else ny
    if nx < 2 or ny < 2:
        raise ConfigError(f"grid dimensions must be >= 2, got {nx}x{ny}")
    x_lo, x_hi = cfg.x_extent
    y_lo, y_hi = cfg.y_extent
    gx, gy = np.meshgrid(np.linspace(x_lo, x_hi, nx), np.linspace(y_lo, y_hi, ny), indexing="ij")
    candidates = list(zip(gx.ravel(), gy.ravel()))
    candidates += [
        (x_lo, y_lo), (x_lo, y_hi), (x_hi, y_lo), (x_hi, y_hi),
        tuple(cfg.area_center), tuple(cfg.boundary_point),
    ]

    seen = set()
    points = []
    for x, y in candidates:
        key = (round(float(x), 9), round(float(y), 9))
        if key in seen:
            continue
        seen.add(key)
        points.append((float(x), float(y)))
    return AreaGrid.from_points(points)
