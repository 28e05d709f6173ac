"""Spectral model of an atomic frequency comb with ground and excited populations.

All frequencies are expressed in units of the tooth width (gamma = 1), so the
comb spacing equals the finesse.
"""
from __future__ import annotations

import csv
import math
import numbers
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence, Union

import numpy as np

MIN_FINESSE = 2.0
LOW_FINESSE_WARNING = "finesse-below-2"

_QUAD_RTOL = 1e-9
_QUAD_MAX_LEVEL = 20


class CombError(ValueError):
    """Invalid comb parameters or tooth profile."""


class QuadratureError(CombError):
    """Quadrature of a sampled tooth failed to converge."""


@dataclass(frozen=True)
class Square:
    """Square tooth: 1 on the closed interval |delta| <= 1/2, else 0."""

    def __call__(self, delta):
        return np.where(np.abs(delta) <= 0.5, 1.0, 0.0)

    @property
    def half_support(self) -> float:
        return 0.5


@dataclass(frozen=True)
class Sampled:
    """Tabulated symmetric tooth profile, linearly interpolated between samples."""

    offsets: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        off = np.asarray(self.offsets, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if off.ndim != 1 or off.shape != val.shape or off.size < 2:
            raise CombError("sampled tooth needs matching 1-D offsets and values (>= 2 samples)")
        if not np.all(np.isfinite(off)) or not np.all(np.isfinite(val)):
            raise CombError("sampled tooth contains non-finite entries")
        if np.any(np.diff(off) <= 0):
            raise CombError("sampled tooth offsets must be strictly increasing")
        if val.min() < 0 or val.max() > 1:
            raise CombError("sampled tooth values must lie in [0, 1]")
        if val.max() != 1.0:
            raise CombError("sampled tooth must be normalized to a peak value of exactly 1")
        object.__setattr__(self, "offsets", tuple(off.tolist()))
        object.__setattr__(self, "values", tuple(val.tolist()))

    def __call__(self, delta):
        off = np.asarray(self.offsets)
        return np.interp(delta, off, np.asarray(self.values), left=0.0, right=0.0)

    @property
    def half_support(self) -> float:
        # outermost point where the interpolant can be nonzero
        off = np.asarray(self.offsets)
        val = np.asarray(self.values)
        nz = np.flatnonzero(val > 0)
        lo = off[max(nz[0] - 1, 0)]
        hi = off[min(nz[-1] + 1, off.size - 1)]
        return float(max(abs(lo), abs(hi)))

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "Sampled":
        """Load a two-column (offset_in_gamma, amplitude) CSV with a header row."""
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise CombError(f"{path}: empty tooth profile file")
        offsets, values = [], []
        for lineno, row in enumerate(rows[1:], start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise CombError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                offsets.append(float(row[0]))
                values.append(float(row[1]))
            except ValueError as exc:
                raise CombError(f"{path}:{lineno}: {exc}") from None
        return cls(tuple(offsets), tuple(values))


ToothShape = Union[Square, Sampled]


def square_profile(finesse: float, samples: int = 4096) -> Sampled:
    """Tabulate the square tooth over one period with its edges midway between samples.

    Placing the edges between samples makes the interpolated ramps symmetric about
    |delta| = 1/2, so the tabulated tooth keeps the exact area of the square one.
    """
    if samples < 4 or samples % 2:
        raise CombError("samples must be an even integer >= 4")
    half = samples // 2
    # the outermost sample sits at (half - 0.5) * h <= finesse / 2
    k = math.ceil((half - 0.5) / finesse)
    h = 0.5 / k
    offsets = (np.arange(-half, half) + 0.5) * h
    values = np.where(np.abs(offsets) < 0.5, 1.0, 0.0)
    return Sampled(tuple(offsets.tolist()), tuple(values.tolist()))


@dataclass(frozen=True)
class CombSpec:
    """Dimensionless comb description.

    ``allow_low_finesse`` admits 1 < finesse < 2 for exploration; such specs carry
    a warning flag that propagates into every metric computed from them.
    """

    b: float
    finesse: float
    chi: float
    tooth: ToothShape = field(default_factory=Square)
    allow_low_finesse: bool = False

    def __post_init__(self):
        for name in ("b", "finesse", "chi"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, numbers.Real) or not math.isfinite(v):
                raise CombError(f"{name} must be a finite number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not 0.0 <= self.b <= 1.0:
            raise CombError(f"background must satisfy 0 <= b <= 1, got b={self.b}")
        if not 0.0 <= self.chi <= 1.0:
            raise CombError(f"excited fraction must satisfy 0 <= chi <= 1, got chi={self.chi}")
        if self.finesse < MIN_FINESSE:
            if not self.allow_low_finesse:
                raise CombError(f"finesse must satisfy finesse >= 2, got finesse={self.finesse}")
            if self.finesse <= 1.0:
                raise CombError(f"finesse must exceed 1 even in soft mode, got finesse={self.finesse}")
        if not isinstance(self.tooth, (Square, Sampled)):
            raise CombError(f"unsupported tooth shape {self.tooth!r}")
        if self.tooth.half_support > self.finesse / 2 + 1e-12:
            raise CombError("tooth support exceeds half the comb spacing; teeth would overlap")

    @property
    def warnings(self) -> tuple[str, ...]:
        return (LOW_FINESSE_WARNING,) if self.finesse < MIN_FINESSE else ()

    def replace(self, **changes) -> "CombSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class FourierCoeff:
    n: int
    a_n: float


@dataclass(frozen=True)
class ReducedCombComponents:
    """Harmonic 0 and 1 of the ground and excited populations, per tooth, in units of gamma."""

    g0: float
    g1: float
    e0: float
    e1: float


def _fold(delta, finesse: float):
    # reduce into [-finesse/2, finesse/2)
    return (np.asarray(delta, dtype=float) + finesse / 2) % finesse - finesse / 2


def tooth_comb(delta, spec: CombSpec):
    """Periodized tooth, i.e. the tooth convolved with the Dirac comb."""
    return spec.tooth(_fold(delta, spec.finesse))


def pg_at(delta, spec: CombSpec):
    """Ground-state population at detuning ``delta``; scalar in, float out."""
    out = spec.b + (1.0 - spec.b) * tooth_comb(delta, spec)
    return float(out) if np.ndim(out) == 0 else out


def pe_at(delta, spec: CombSpec):
    """Excited-state population, chi times the population pumped out of the ground state."""
    out = spec.chi * (1.0 - spec.b) * (1.0 - tooth_comb(delta, spec))
    return float(out) if np.ndim(out) == 0 else out


def _sampled_cosine_integral(tooth: Sampled, n: int, finesse: float) -> float:
    x = np.asarray(tooth.offsets)
    y = np.asarray(tooth.values)
    w = 2.0 * math.pi * n / finesse
    x0, x1 = x[:-1], x[1:]
    y0, y1 = y[:-1], y[1:]
    scale = float(np.sum(0.5 * (y0 + y1) * (x1 - x0))) or 1.0

    def simpson(level: int) -> float:
        # 2**level Simpson panels inside every linear segment
        panels = 2**level
        t = np.linspace(0.0, 1.0, 2 * panels + 1)
        wts = np.ones_like(t)
        wts[1:-1:2] = 4.0
        wts[2:-1:2] = 2.0
        xs = x0[:, None] + (x1 - x0)[:, None] * t[None, :]
        ys = y0[:, None] + (y1 - y0)[:, None] * t[None, :]
        seg = (ys * np.cos(w * xs)) @ wts
        return float(np.sum(seg * (x1 - x0)) / (6.0 * panels))

    prev = simpson(0)
    for level in range(1, _QUAD_MAX_LEVEL + 1):
        # keep the panel array bounded; later levels reuse the same budget
        if x0.size * 2**level > 2**22:
            break
        cur = simpson(level)
        if abs(cur - prev) <= _QUAD_RTOL * max(abs(cur), scale):
            return cur
        prev = cur
    raise QuadratureError(
        f"tooth quadrature for harmonic n={n} did not converge; profile is ill-conditioned"
    )


def fourier_a(n: int, spec: CombSpec) -> FourierCoeff:
    """Reduced Fourier coefficient of a single tooth at harmonic ``n``."""
    n = int(n)
    if isinstance(spec.tooth, Square):
        x = n * math.pi / spec.finesse
        a = 1.0 if n == 0 else math.sin(x) / x
    else:
        a = _sampled_cosine_integral(spec.tooth, abs(n), spec.finesse)
    return FourierCoeff(n, a)


def reduced_components(spec: CombSpec) -> ReducedCombComponents:
    a0 = fourier_a(0, spec).a_n
    a1 = fourier_a(1, spec).a_n
    b, f, chi = spec.b, spec.finesse, spec.chi
    g0 = b * f + (1.0 - b) * a0
    g1 = (1.0 - b) * a1
    return ReducedCombComponents(g0=g0, g1=g1, e0=chi * (f - g0), e1=-chi * g1)


def sample_band(spec: CombSpec, m_teeth: int, samples_per_period: int) -> np.ndarray:
    """Uniform detuning grid of ``m_teeth`` periods starting at -m F/2, i.e. [-m F/2, m F/2)."""
    step = spec.finesse / samples_per_period
    return -m_teeth * spec.finesse / 2 + step * np.arange(m_teeth * samples_per_period)


__all__: Sequence[str] = [
    "CombError",
    "CombSpec",
    "FourierCoeff",
    "QuadratureError",
    "ReducedCombComponents",
    "Sampled",
    "Square",
    "ToothShape",
    "fourier_a",
    "pe_at",
    "pg_at",
    "reduced_components",
    "sample_band",
    "square_profile",
]
