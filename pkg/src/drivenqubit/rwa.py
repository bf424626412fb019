"""Rotating-wave-approximation predictors and the weak-driving limit.

In a frame rotating with the drive, the coupling splits into a ladder of
harmonics weighted by Bessel functions J_n(A/omega).  Near the n-photon
resonance n*omega + epsilon0 = 0 the slow dynamics is an oscillation at
Omega = Delta*|J_n(A/omega)|, with a resonance width of order Omega/|n|.
The n = 0 channel reproduces coherent destruction of tunnelling: the
oscillation freezes wherever J_0(A/omega) = 0.

These formulas assume omega well above Delta; predictions carry a
quality grade instead of silently degrading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import DriveParams
from .errors import ConfigError
from .specfun import MAX_BESSEL_ORDER, MAX_J0_ZERO_INDEX, bessel_j0_zero, bessel_jn

__all__ = [
    "RwaPrediction",
    "RabiPrediction",
    "rwa_resonant_index",
    "rwa_frequency",
    "rwa_width",
    "cdt_amplitudes",
    "rabi_weak_driving",
    "rwa_predict",
]

# Quality thresholds on omega/delta; the approximation needs omega well
# above delta, and breaks down below it.
_INVALID_BELOW = 1.0
_OK_ABOVE = 3.0


@dataclass(frozen=True)
class RwaPrediction:
    """Resonance report: photon index n, detuning n*omega + epsilon0,
    on-resonance frequency, width scale (None when n = 0), and validity."""

    n: int
    detuning: float
    omega_osc: float
    width: float | None
    valid: bool
    quality: str
    reason: str


@dataclass(frozen=True)
class RabiPrediction:
    """Weak-driving limit: resonance frequency sqrt(delta^2 + epsilon0^2)
    and Rabi frequency A*sin(alpha)/2; weak_driving is False once A
    exceeds a fifth of the level splitting."""

    omega_res: float
    omega_rabi: float
    weak_driving: bool


def rwa_resonant_index(p: DriveParams) -> int:
    """Integer n minimizing |n*omega + epsilon0|.

    For positive bias the resonant index is negative (n = -epsilon0/omega
    at exact resonance); |n| is the photon number.  Exact half-integer
    epsilon0/omega is a tie between two equally detuned resonances and is
    broken toward the smaller |n|.
    """
    x = p.epsilon0 / p.omega
    lo = math.floor(-x)
    hi = lo + 1
    d_lo = abs(lo * p.omega + p.epsilon0)
    d_hi = abs(hi * p.omega + p.epsilon0)
    if abs(d_lo - d_hi) <= 1e-12 * p.omega:
        return hi if abs(hi) < abs(lo) else lo
    return lo if d_lo < d_hi else hi


def rwa_frequency(p: DriveParams, n: int) -> float:
    """On-resonance oscillation frequency Omega = delta*|J_n(A/omega)|."""
    if abs(n) > MAX_BESSEL_ORDER:
        raise ValueError(f"photon index |{n}| exceeds the validated Bessel range")
    return p.delta * abs(bessel_jn(int(n), p.amplitude / p.omega))


def rwa_width(omega_osc: float, n: int) -> float:
    """Resonance width scale delta_omega = Omega/|n| (a scale, not a sharp FWHM).

    Raises ValueError for n = 0: the zero-photon resonance has no
    detuning slope, so no width scale is defined there.
    """
    if n == 0:
        raise ValueError("width is not applicable for n = 0 (no detuning scale)")
    if not (math.isfinite(omega_osc) and omega_osc >= 0.0):
        raise ValueError(f"omega_osc must be nonnegative, got {omega_osc!r}")
    return omega_osc / abs(n)


def cdt_amplitudes(omega: float, k_max: int) -> list[float]:
    """Drive amplitudes A_k = omega*j_{0,k} where tunnelling is frozen.

    At epsilon0 = 0 the slow frequency is delta*|J_0(A/omega)|, so the
    first k_max zeros of J_0 mark the coherent-destruction points.
    """
    if not (isinstance(omega, (int, float)) and math.isfinite(omega) and omega > 0):
        raise ConfigError(f"omega must be positive and finite, got {omega!r}")
    if not isinstance(k_max, int) or isinstance(k_max, bool) or not 1 <= k_max <= MAX_J0_ZERO_INDEX:
        raise ConfigError(f"k_max must be an integer in [1, {MAX_J0_ZERO_INDEX}], got {k_max!r}")
    return [omega * bessel_j0_zero(k) for k in range(1, k_max + 1)]


def rabi_weak_driving(p: DriveParams) -> RabiPrediction:
    """Rabi-limit frequencies for weak driving at the static bias point."""
    omega_res = math.hypot(p.delta, p.epsilon0)
    alpha = math.atan2(p.delta, p.epsilon0)
    omega_rabi = 0.5 * p.amplitude * math.sin(alpha)
    return RabiPrediction(
        omega_res=omega_res,
        omega_rabi=omega_rabi,
        weak_driving=p.amplitude <= 0.2 * omega_res,
    )


def rwa_predict(p: DriveParams) -> RwaPrediction:
    """Full resonance report for the nearest multi-photon resonance."""
    n = rwa_resonant_index(p)
    omega_osc = rwa_frequency(p, n)
    width = None if n == 0 else rwa_width(omega_osc, n)
    ratio = p.omega / p.delta
    if ratio < _INVALID_BELOW:
        quality, valid = "invalid", False
        reason = f"omega/delta = {ratio:.3g} < {_INVALID_BELOW:g}: rotating-frame expansion breaks down"
    elif ratio < _OK_ABOVE:
        quality, valid = "marginal", True
        reason = f"omega/delta = {ratio:.3g} in [{_INVALID_BELOW:g}, {_OK_ABOVE:g}): treat quantitatively with care"
    else:
        quality, valid = "ok", True
        reason = f"omega/delta = {ratio:.3g} >= {_OK_ABOVE:g}"
    return RwaPrediction(
        n=n,
        detuning=n * p.omega + p.epsilon0,
        omega_osc=omega_osc,
        width=width,
        valid=valid,
        quality=quality,
        reason=reason,
    )
