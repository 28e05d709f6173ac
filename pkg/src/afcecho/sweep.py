"""Parameter sweeps, figure datasets and threshold solvers."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from ._solvers import NoBracketError, bisect, bisect_predicate, golden_max
from .comb import CombSpec, Square, ToothShape
from .metrics import MetricPoint, efficiency, metric_point, optimal_cloning_fidelity, snr

AXIS_NAMES = ("b", "chi", "finesse")


class NoCrossingError(NoBracketError):
    """The requested threshold does not occur inside the search bracket."""


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    steps: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if self.scale != "linear":
            raise ValueError(f"only linear axes are supported, got {self.scale!r}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"axis steps must be a positive integer, got {self.steps}")
        if self.steps == 1 and self.min != self.max:
            raise ValueError("a single-step axis needs min == max")
        if self.max < self.min:
            raise ValueError(f"axis {self.name}: max < min")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.steps)

    def as_dict(self) -> dict:
        return {"name": self.name, "min": self.min, "max": self.max, "steps": self.steps, "scale": self.scale}


@dataclass(frozen=True)
class SweepGrid:
    """Rectangular grid of metric points; ``points[i][j]`` sits at (axes[0][i], axes[1][j])."""

    axes: tuple[Axis, Axis]
    fixed: dict
    points: tuple[tuple[MetricPoint, ...], ...]
    tooth: ToothShape = field(default_factory=Square)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.axes[0].steps, self.axes[1].steps)

    def spec_at(self, i: int, j: int) -> CombSpec:
        params = dict(self.fixed)
        params[self.axes[0].name] = float(self.axes[0].values[i])
        params[self.axes[1].name] = float(self.axes[1].values[j])
        return CombSpec(b=params["b"], finesse=params["finesse"], chi=params["chi"], tooth=self.tooth)

    def field(self, name: str) -> np.ndarray:
        """2-D float array of one MetricPoint attribute (None becomes nan)."""
        def conv(v):
            if v is None:
                return math.nan
            return float(v)

        return np.array([[conv(getattr(p, name)) for p in row] for row in self.points])

    @property
    def eta(self) -> np.ndarray:
        return self.field("eta")

    @property
    def fidelity(self) -> np.ndarray:
        return self.field("fidelity")

    @property
    def in_region(self) -> np.ndarray:
        return self.field("in_cloning_region").astype(bool)


@dataclass(frozen=True)
class ParametricCurve:
    """(eta, F) along increasing finesse for fixed background and excited fraction."""

    b: float
    chi: float
    finesse: tuple[float, ...]
    eta: tuple[float, ...]
    fidelity: tuple[float, ...]

    def __post_init__(self):
        if any(f2 <= f1 for f1, f2 in zip(self.finesse, self.finesse[1:])):
            raise ValueError("finesse samples must be strictly increasing")

    @property
    def f_opt_gap(self) -> tuple[Optional[float], ...]:
        """Vertical distance F_opt(eta) - F, where F_opt is defined (eta >= 1)."""
        return tuple(
            optimal_cloning_fidelity(e) - f if e >= 1.0 else None
            for e, f in zip(self.eta, self.fidelity)
        )


def sweep(axis1: Axis, axis2: Axis, fixed: dict, tooth: ToothShape = Square(),
          workers: int = 1) -> SweepGrid:
    """Evaluate metric_point on the product of two axes; the third parameter is in ``fixed``."""
    if axis1.name == axis2.name:
        raise ValueError("sweep axes must differ")
    missing = set(AXIS_NAMES) - {axis1.name, axis2.name} - set(fixed)
    if missing:
        raise ValueError(f"fixed parameters missing: {sorted(missing)}")
    fixed = {k: float(v) for k, v in fixed.items() if k not in (axis1.name, axis2.name)}
    template = SweepGrid((axis1, axis2), fixed, (), tooth)
    cells = [(i, j) for i in range(axis1.steps) for j in range(axis2.steps)]

    def one(cell):
        return metric_point(template.spec_at(*cell))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(one, cells))
    else:
        flat = [one(c) for c in cells]
    n2 = axis2.steps
    points = tuple(tuple(flat[i * n2:(i + 1) * n2]) for i in range(axis1.steps))
    return SweepGrid((axis1, axis2), fixed, points, tooth)


def efficiency_map(chi: float, b_range=(0.0, 1.0), finesse_range=(2.0, 12.0), steps=(50, 50),
                   tooth: ToothShape = Square()) -> SweepGrid:
    return sweep(
        Axis("b", b_range[0], b_range[1], steps[0]),
        Axis("finesse", finesse_range[0], finesse_range[1], steps[1]),
        {"chi": chi},
        tooth,
    )


def fidelity_map(chi: float, b_range=(0.0, 1.0), finesse_range=(2.0, 12.0), steps=(50, 50),
                 tooth: ToothShape = Square()) -> SweepGrid:
    if not chi > 0:
        raise ValueError("fidelity map needs chi > 0; fidelity is identically 1 at chi = 0")
    return efficiency_map(chi, b_range, finesse_range, steps, tooth)


def fidelity_vs_efficiency_curves(b: float, chi_list: Iterable[float], finesse_min: float = 2.0,
                                  finesse_max: float = 11.0, points: int = 10,
                                  tooth: ToothShape = Square()) -> list[ParametricCurve]:
    if not 0.0 <= b < 1.0:
        raise ValueError(f"curves need 0 <= b < 1, got {b}")
    finesse = np.linspace(finesse_min, finesse_max, points)
    curves = []
    for chi in chi_list:
        mps = [metric_point(CombSpec(b, float(f), float(chi), tooth)) for f in finesse]
        curves.append(ParametricCurve(
            b=float(b),
            chi=float(chi),
            finesse=tuple(float(f) for f in finesse),
            eta=tuple(p.eta for p in mps),
            fidelity=tuple(p.fidelity for p in mps),
        ))
    return curves


def cloning_region(grid: SweepGrid) -> list[tuple[int, int]]:
    return [
        (i, j)
        for i, row in enumerate(grid.points)
        for j, p in enumerate(row)
        if p.in_cloning_region
    ]


def classical_limit_finesse(b: float, chi: float, bracket=(2.0, 100.0), xtol: float = 1e-6,
                            tooth: ToothShape = Square()) -> float:
    """Finesse where the single-photon SNR drops through 1 (fidelity 2/3)."""
    if not chi > 0:
        raise ValueError("classical-limit crossing needs chi > 0")

    def g(f: float) -> float:
        return snr(CombSpec(b, f, chi, tooth)) - 1.0

    try:
        return bisect(g, bracket[0], bracket[1], xtol)
    except NoBracketError as exc:
        raise NoCrossingError(f"SNR = 1 not crossed for finesse in {list(bracket)}: {exc}") from None


def peak_efficiency(b: float, chi: float, bracket=(2.0, 50.0), xtol: float = 1e-4,
                    tooth: ToothShape = Square()) -> tuple[float, float]:
    """(finesse, eta) maximizing the efficiency over the finesse bracket."""
    return golden_max(lambda f: efficiency(CombSpec(b, f, chi, tooth)), bracket[0], bracket[1], xtol)


def background_threshold_for_unit_gain(chi: float, finesse_bracket=(2.0, 50.0), tol: float = 1e-4,
                                       tooth: ToothShape = Square()) -> float:
    """Largest background for which some finesse in the bracket still gives eta >= 1."""
    if chi < 0:
        raise ValueError(f"chi must be non-negative, got {chi}")

    def reaches_unit_gain(b: float) -> bool:
        return peak_efficiency(b, chi, finesse_bracket, tol, tooth)[1] >= 1.0

    if not reaches_unit_gain(0.0):
        return 0.0
    return bisect_predicate(reaches_unit_gain, 0.0, 1.0, tol)


def cloning_intervals(b: float, chi: float, bracket=(2.0, 100.0), scan_points: int = 981,
                      xtol: float = 1e-6, tooth: ToothShape = Square()) -> list[tuple[float, float]]:
    """Finesse intervals where the comb is in the cloning region; endpoints refined by bisection."""
    def inside(f: float) -> bool:
        return metric_point(CombSpec(b, f, chi, tooth)).in_cloning_region

    grid = np.linspace(bracket[0], bracket[1], scan_points)
    flags = [inside(float(f)) for f in grid]
    intervals = []
    k = 0
    while k < len(grid):
        if not flags[k]:
            k += 1
            continue
        start = k
        while k + 1 < len(grid) and flags[k + 1]:
            k += 1
        lo = float(grid[start]) if start == 0 else bisect_predicate(inside, float(grid[start]), float(grid[start - 1]), xtol)
        hi = float(grid[k]) if k == len(grid) - 1 else bisect_predicate(inside, float(grid[k]), float(grid[k + 1]), xtol)
        intervals.append((lo, hi))
        k += 1
    return intervals


# Fixed parameters of the published figures; the CLI lets any of them be overridden.
FIGURE_DEFAULTS: dict[int, dict] = {
    2: {"chi": 0.0, "b_min": 0.0, "b_max": 1.0, "finesse_min": 2.0, "finesse_max": 30.0, "steps": 50},
    3: {"chi": 1.0, "b_min": 0.0, "b_max": 1.0, "finesse_min": 2.0, "finesse_max": 12.0, "steps": 50},
    4: {"b": 0.0, "chi_list": (0.0, 0.2, 0.4, 0.6, 0.8, 1.0), "finesse_min": 2.0, "finesse_max": 11.0, "points": 10},
    5: {"b": 0.1, "chi_list": (0.0, 0.2, 0.4, 0.6, 0.8, 1.0), "finesse_min": 2.0, "finesse_max": 11.0, "points": 10},
}

# Contour levels the map figures are banded at.
FIGURE_LEVELS: dict[int, tuple[float, ...]] = {
    2: tuple(round(0.1 * k, 10) for k in range(11)),
    3: tuple(round(0.53 + 0.01 * k, 10) for k in range(21)),
}
DENSE_POINTS = 100


def figure_dataset(fig: int, params: dict, workers: int = 1):
    """SweepGrid for figures 2 and 3, list of ParametricCurve for 4 and 5."""
    if fig in (2, 3):
        steps = int(params["steps"])
        grid = sweep(
            Axis("b", params["b_min"], params["b_max"], steps),
            Axis("finesse", params["finesse_min"], params["finesse_max"], steps),
            {"chi": params["chi"]},
            workers=workers,
        )
        return grid
    if fig in (4, 5):
        return fidelity_vs_efficiency_curves(
            params["b"], params["chi_list"], params["finesse_min"], params["finesse_max"], int(params["points"])
        )
    raise ValueError(f"unknown figure {fig}; choose 2, 3, 4 or 5")


__all__: Sequence[str] = [
    "Axis",
    "NoCrossingError",
    "ParametricCurve",
    "SweepGrid",
    "background_threshold_for_unit_gain",
    "classical_limit_finesse",
    "cloning_intervals",
    "cloning_region",
    "efficiency_map",
    "fidelity_map",
    "fidelity_vs_efficiency_curves",
    "figure_dataset",
    "peak_efficiency",
    "sweep",
]
