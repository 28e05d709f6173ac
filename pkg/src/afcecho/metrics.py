"""Echo readout efficiency, SNR and fidelity of an AFC at the single-photon level."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .comb import CombSpec, Square, fourier_a, reduced_components

CLASSICAL_FIDELITY = 2.0 / 3.0
UNDEFINED_SNR = "undefined-snr"


class DomainError(ValueError):
    """Argument outside the domain where a metric is defined."""


class UndefinedSNRError(ArithmeticError):
    """SNR is the indeterminate 0/0 (no echo and no excited population)."""


@dataclass(frozen=True)
class MetricPoint:
    """Metrics at one parameter point.

    ``snr`` is ``math.inf`` for an empty excited state and ``None`` when undefined;
    ``fidelity`` is ``None`` exactly when ``snr`` is. ``f_opt`` is only set for eta >= 1.
    """

    eta: float
    snr: Optional[float]
    fidelity: Optional[float]
    f_opt: Optional[float]
    in_cloning_region: bool
    warnings: tuple[str, ...] = ()


def efficiency(spec: CombSpec) -> float:
    """Echo intensity over the intensity absorbed by the ground-state population."""
    c = reduced_components(spec)
    if c.g0 == 0.0:
        raise DomainError("ground-state population vanishes; efficiency undefined")
    return ((c.e1 - c.g1) / c.g0) ** 2


def snr(spec: CombSpec) -> float:
    """Echo over spontaneous-emission intensity for one fully absorbed input photon.

    Returns ``math.inf`` when the excited state is empty but an echo exists, and
    raises :class:`UndefinedSNRError` when both vanish.
    """
    b, chi, f = spec.b, spec.chi, spec.finesse
    a0 = fourier_a(0, spec).a_n
    a1 = fourier_a(1, spec).a_n
    num = (1.0 + chi) ** 2 * (1.0 - b) * a1 * a1
    den = chi * (b * f + (1.0 - b) * a0) * (f - a0)
    if den == 0.0:
        if num == 0.0:
            raise UndefinedSNRError(f"SNR is 0/0 at b={b}, chi={chi}, finesse={f}")
        return math.inf
    return num / den


def fidelity_from_snr(snr: float) -> float:
    if math.isnan(snr) or snr < 0:
        raise DomainError(f"SNR must be non-negative, got {snr}")
    if math.isinf(snr):
        return 1.0
    return (snr + 1.0) / (snr + 2.0)


def optimal_cloning_fidelity(eta: float) -> float:
    """Fidelity of an ideal inverted-medium cloner with gain ``eta`` (eta >= 1)."""
    if not eta >= 1.0:
        raise DomainError(f"optimal cloning fidelity needs eta >= 1, got {eta}")
    if math.isinf(eta):
        return CLASSICAL_FIDELITY
    return (2.0 * eta - 1.0) / (3.0 * eta - 2.0)


def in_cloning_region(eta: float, fidelity: Optional[float]) -> bool:
    return fidelity is not None and eta >= 1.0 and fidelity > CLASSICAL_FIDELITY


def metric_point(spec: CombSpec) -> MetricPoint:
    eta = efficiency(spec)
    warnings = list(spec.warnings)
    try:
        s: Optional[float] = snr(spec)
    except UndefinedSNRError:
        s = None
        warnings.append(UNDEFINED_SNR)
    fid = None if s is None else fidelity_from_snr(s)
    f_opt = optimal_cloning_fidelity(eta) if eta >= 1.0 else None
    return MetricPoint(
        eta=eta,
        snr=s,
        fidelity=fid,
        f_opt=f_opt,
        in_cloning_region=in_cloning_region(eta, fid),
        warnings=tuple(warnings),
    )


def gain_condition(spec: CombSpec) -> bool:
    """Necessary condition for eta >= 1, obtained by bounding a_1 by a_0.

    For the square tooth this reduces to chi (1 - b) >= b * finesse.
    """
    a0 = 1.0 if isinstance(spec.tooth, Square) else fourier_a(0, spec).a_n
    lhs = spec.chi * (1.0 - spec.b) * a0
    rhs = spec.b * spec.finesse
    return lhs >= rhs * (1.0 - 1e-12)


def background_upper_limit(chi: float, finesse: float) -> float:
    """Largest background allowed by the necessary gain condition."""
    if chi < 0:
        raise DomainError(f"chi must be non-negative, got {chi}")
    if finesse <= 0:
        raise DomainError(f"finesse must be positive, got {finesse}")
    if chi == 0:
        return 0.0
    return 1.0 / (1.0 + finesse / chi)


def zero_background_limits(chi: float, a0: float, a1: float, finesse: float) -> tuple[float, float]:
    """(eta, snr) of a background-free comb from its tooth coefficients."""
    if a0 <= 0:
        raise DomainError(f"a0 must be positive, got {a0}")
    if finesse <= a0:
        raise DomainError(f"finesse must exceed a0, got finesse={finesse}, a0={a0}")
    eta = (1.0 + chi) ** 2 * (a1 / a0) ** 2
    if chi == 0:
        return eta, math.inf
    return eta, eta * a0 / (chi * (finesse - a0))


def square_efficiency(b: float, chi: float, finesse: float) -> float:
    """Square-tooth efficiency written directly in terms of sinc(pi / finesse)."""
    x = math.pi / finesse
    sinc = math.sin(x) / x
    return ((1.0 + chi) * (1.0 - b) / (b * finesse + 1.0 - b) * sinc) ** 2


def square_snr(b: float, chi: float, finesse: float) -> float:
    x = math.pi / finesse
    sinc2 = (math.sin(x) / x) ** 2
    return (1.0 + chi) ** 2 * (1.0 - b) * sinc2 / (chi * (b * finesse + 1.0 - b) * (finesse - 1.0))
