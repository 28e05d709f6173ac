"""Time-domain ensemble simulation of the AFC echo.

Each detuning sample carries a 2x2 density matrix in the (g, e) basis. The input
pulse applies the small-angle operator, free evolution adds a detuning-dependent
phase, and the macroscopic polarization is the detuning sum of the e-g coherence.
Nothing here uses the Fourier-coefficient closed forms; it exists to check them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .comb import CombError, CombSpec, pe_at, pg_at, sample_band
from .metrics import MetricPoint, fidelity_from_snr, in_cloning_region, optimal_cloning_fidelity

MAX_EPSILON = 0.05
MIN_TEETH = 8
MIN_SAMPLES_PER_PERIOD = 64
TRACE_SPAN = 2.5  # echo periods covered by the polarization trace

_CHUNK = 2**22  # complex entries per phase-matrix block


class MalformedCombError(RuntimeError):
    """No echo peak can be located near one comb period."""


@dataclass(frozen=True)
class OracleConfig:
    spec: CombSpec
    m_teeth: int = 32
    samples_per_period: int = 256
    epsilon: float = 0.01
    n_density: float = 1.0
    time_points: int = 256

    def __post_init__(self):
        if not isinstance(self.spec, CombSpec):
            raise CombError("oracle config needs a CombSpec")
        if int(self.m_teeth) != self.m_teeth or self.m_teeth < MIN_TEETH:
            raise CombError(f"m_teeth must be an integer >= {MIN_TEETH}, got {self.m_teeth}")
        if int(self.samples_per_period) != self.samples_per_period or self.samples_per_period < MIN_SAMPLES_PER_PERIOD:
            raise CombError(
                f"samples_per_period must be an integer >= {MIN_SAMPLES_PER_PERIOD}, got {self.samples_per_period}"
            )
        if not 0.0 < self.epsilon <= MAX_EPSILON:
            raise CombError(f"epsilon must satisfy 0 < epsilon <= {MAX_EPSILON}, got {self.epsilon}")
        if not self.n_density > 0:
            raise CombError(f"n_density must be positive, got {self.n_density}")
        if int(self.time_points) != self.time_points or self.time_points < 8 or self.time_points % 2:
            raise CombError(f"time_points must be an even integer >= 8, got {self.time_points}")

    @property
    def echo_time(self) -> float:
        return 2.0 * math.pi / self.spec.finesse


@dataclass(frozen=True)
class EnsembleGrid:
    """Detuning samples with their populations and full density matrices (g, e order)."""

    detunings: np.ndarray
    pg: np.ndarray
    pe: np.ndarray
    rho: np.ndarray  # shape (n, 2, 2)

    @property
    def step(self) -> float:
        return float(self.detunings[1] - self.detunings[0])

    @property
    def coherence(self) -> np.ndarray:
        """<g|rho|e> for every sample."""
        return self.rho[:, 0, 1]


@dataclass(frozen=True)
class EchoTrace:
    times: np.ndarray
    polarization: np.ndarray
    echo_peak_time: float
    echo_peak_intensity: float
    spontaneous_intensity: float
    absorbed_intensity: float
    epsilon: float
    ground_area: float  # N * sum(pg) * step

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.polarization) ** 2


def input_operator(epsilon: float) -> np.ndarray:
    return np.array([[1.0, 1j * epsilon], [1j * epsilon, 1.0]])


def free_rotation(delta, t: float) -> np.ndarray:
    """Stack of diag(1, exp(-i delta t)) for each detuning."""
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    out = np.zeros((delta.size, 2, 2), dtype=complex)
    out[:, 0, 0] = 1.0
    out[:, 1, 1] = np.exp(-1j * delta * t)
    return out


def build_grid(config: OracleConfig) -> EnsembleGrid:
    spec = config.spec
    delta = sample_band(spec, config.m_teeth, config.samples_per_period)
    pg = np.asarray(pg_at(delta, spec), dtype=float)
    pe = np.asarray(pe_at(delta, spec), dtype=float)
    rho = np.zeros((delta.size, 2, 2), dtype=complex)
    rho[:, 0, 0] = pg
    rho[:, 1, 1] = pe
    return EnsembleGrid(delta, pg, pe, rho)


def apply_input(grid: EnsembleGrid, epsilon: float) -> EnsembleGrid:
    """Rotate every atom's density matrix by the weak input pulse, U rho U^dagger."""
    if np.any(grid.rho[:, 0, 1] != 0) or np.any(grid.rho[:, 1, 0] != 0):
        raise ValueError("input pulse must act on a grid without coherence")
    u = input_operator(epsilon)
    rho = u[None, :, :] @ grid.rho @ u.conj().T[None, :, :]
    return replace(grid, rho=rho)


def evolve(grid: EnsembleGrid, t: float) -> np.ndarray:
    """Density matrices after free evolution for time ``t``."""
    ut = free_rotation(grid.detunings, t)
    return ut @ grid.rho @ np.conj(np.swapaxes(ut, 1, 2))


def _polarization(grid: EnsembleGrid, times: np.ndarray, n_density: float) -> np.ndarray:
    # <e|rho(t)|g> = exp(-i delta t) <e|rho(0)|g>; summed block-wise over times
    c = grid.rho[:, 1, 0]
    d = grid.detunings
    out = np.empty(times.size, dtype=complex)
    block = max(1, _CHUNK // d.size)
    for start in range(0, times.size, block):
        t = times[start:start + block]
        out[start:start + block] = np.exp(-1j * np.outer(t, d)) @ c
    return n_density * grid.step * out


def _locate_echo(times: np.ndarray, intensity: np.ndarray, echo_time: float, m_teeth: int) -> tuple[float, float]:
    window = np.flatnonzero((times > 0.5 * echo_time) & (times < 1.5 * echo_time))
    k = window[np.argmax(intensity[window])]
    dt = times[1] - times[0]
    lobe = max(echo_time / (2 * m_teeth), dt)
    if k in (window[0], window[-1]) or abs(times[k] - echo_time) > lobe:
        raise MalformedCombError(
            "no echo peak near one comb period; the comb has no periodic structure to rephase"
        )
    y0, y1, y2 = intensity[k - 1], intensity[k], intensity[k + 1]
    curv = y0 - 2.0 * y1 + y2
    if not (y1 >= y0 and y1 >= y2) or curv >= 0:
        raise MalformedCombError("echo maximum is not a strict local peak")
    shift = 0.5 * (y0 - y2) / curv
    peak = y1 - 0.125 * (y0 - y2) ** 2 / curv
    return float(times[k] + shift * dt), float(peak)


def polarization_trace(grid: EnsembleGrid, config: OracleConfig) -> EchoTrace:
    period = config.echo_time
    n_t = int(round(TRACE_SPAN * config.time_points))
    times = period * np.arange(n_t + 1) / config.time_points
    pol = _polarization(grid, times, config.n_density)
    t_peak, i_peak = _locate_echo(times, np.abs(pol) ** 2, period, config.m_teeth)
    n = config.n_density
    step = grid.step
    ground_area = n * float(np.sum(grid.pg)) * step
    return EchoTrace(
        times=times,
        polarization=pol,
        echo_peak_time=t_peak,
        echo_peak_intensity=i_peak,
        spontaneous_intensity=n * float(np.sum(grid.pe)) * step,
        absorbed_intensity=(config.epsilon * ground_area) ** 2,
        epsilon=config.epsilon,
        ground_area=ground_area,
    )


def simulate(config: OracleConfig) -> EchoTrace:
    grid = apply_input(build_grid(config), config.epsilon)
    return polarization_trace(grid, config)


def oracle_metrics(config: OracleConfig, trace: Optional[EchoTrace] = None) -> MetricPoint:
    """Recompute efficiency, SNR and fidelity from simulated intensities.

    The SNR uses a single fully absorbed photon, N * sum(pg) * step * eps**2 = 1; the
    echo intensity is rescaled to that epsilon, which the small-angle regime allows.
    """
    tr = simulate(config) if trace is None else trace
    eta = tr.echo_peak_intensity / tr.absorbed_intensity
    single_photon_echo = tr.echo_peak_intensity / (tr.epsilon**2 * tr.ground_area)
    if tr.spontaneous_intensity == 0.0:
        snr = math.inf
    else:
        snr = single_photon_echo / tr.spontaneous_intensity
    fid = fidelity_from_snr(snr)
    return MetricPoint(
        eta=eta,
        snr=snr,
        fidelity=fid,
        f_opt=optimal_cloning_fidelity(eta) if eta >= 1.0 else None,
        in_cloning_region=in_cloning_region(eta, fid),
        warnings=config.spec.warnings,
    )


def write_trace_csv(trace: EchoTrace, path_or_file, echo_time: float) -> None:
    """Dump (t_over_echo_period, re_polarization, im_polarization, intensity)."""
    from .io import format_float

    lines = ["t_over_echo_period,re_polarization,im_polarization,intensity"]
    for t, p in zip(trace.times, trace.polarization):
        lines.append(",".join(format_float(v) for v in (t / echo_time, p.real, p.imag, abs(p) ** 2)))
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
