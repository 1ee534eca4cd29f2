"""Weakly nonlinear two-mode theory above the PT-broken laser threshold.

Near threshold the field is a superposition of the two marginal modes,
psi ~ c1 u1 exp(i*omega*t) + conj(c2) u2 exp(-i*omega*t) with u2(x) = conj(u1(-x)),
and the slow amplitudes obey

    dc1/dt = eps2 c1 - (alpha |c1|^2 + beta |c2|^2) c1
    dc2/dt = eps2 c2 - (alpha |c2|^2 + beta |c1|^2) c2

with eps2 = g0 - g0_th.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import PowerTrace
from .lattice import Grid
from .spectra import ModePair


class SelfOrthogonalModeError(ValueError):
    pass


@dataclass(frozen=True)
class SaturationCoefficients:
    alpha: complex  # self saturation
    beta: complex  # cross saturation

    @property
    def ratio(self) -> float:
        """alpha_R / beta_R."""
        return self.alpha.real / self.beta.real


@dataclass(frozen=True)
class LimitCycle:
    kind: str  # "SingleMode1", "SingleMode2" or "TwoMode"
    amplitude2: float
    delta: float
    exists: bool
    stable: bool
    note: str = ""


def reflect(u: np.ndarray, grid: Grid) -> np.ndarray:
    """u(-x) on a grid symmetric about the origin."""
    if not grid.is_symmetric:
        raise ValueError("x -> -x reflection needs a grid symmetric about 0")
    return np.asarray(u)[::-1]


def saturation_coeffs(u1: np.ndarray, grid: Grid) -> SaturationCoefficients:
    u1 = np.asarray(u1, dtype=complex)
    u1r = reflect(u1, grid)
    sq = u1 * u1
    norm_sq = grid.integrate(sq)
    norm = grid.integrate(np.abs(u1) ** 2).real
    if abs(norm_sq) < 1e-10 * norm:
        raise SelfOrthogonalModeError(
            "integral of u1^2 vanishes: self-orthogonal mode (at exceptional point)"
        )
    alpha = grid.integrate(sq * np.abs(u1) ** 2) / norm_sq
    beta = 2.0 * grid.integrate(sq * np.abs(u1r) ** 2) / norm_sq
    return SaturationCoefficients(complex(alpha), complex(beta))


def amplitude_rhs(c1: complex, c2: complex, g0: float, g0_th: float, coeffs: SaturationCoefficients):
    eps2 = g0 - g0_th
    a, b = coeffs.alpha, coeffs.beta
    p1, p2 = abs(c1) ** 2, abs(c2) ** 2
    return eps2 * c1 - (a * p1 + b * p2) * c1, eps2 * c2 - (a * p2 + b * p1) * c2


def slow_amplitude_rhs(a1: complex, a2: complex, coeffs: SaturationCoefficients):
    """Solvability-condition form on the slow time eps^2 t, with conjugated coefficients for a2."""
    a, b = coeffs.alpha, coeffs.beta
    p1, p2 = abs(a1) ** 2, abs(a2) ** 2
    return a1 - (a * p1 + b * p2) * a1, a2 - (a.conjugate() * p2 + b.conjugate() * p1) * a2


def integrate_amplitudes(rhs, y0: tuple[complex, complex], dt: float, n_steps: int) -> np.ndarray:
    """Fixed-step RK4 for a two-amplitude right-hand side ``rhs(y1, y2)``; returns (n_steps+1, 2)."""
    out = np.empty((n_steps + 1, 2), dtype=complex)
    y = np.array(y0, dtype=complex)
    out[0] = y

    def f(v):
        return np.array(rhs(v[0], v[1]), dtype=complex)

    for i in range(n_steps):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = y
    return out


def limit_cycles(g0: float, g0_th: float, coeffs: SaturationCoefficients) -> list[LimitCycle]:
    eps2 = g0 - g0_th
    ar, ai = coeffs.alpha.real, coeffs.alpha.imag
    br, bi = coeffs.beta.real, coeffs.beta.imag
    if eps2 <= 0:
        return [
            LimitCycle(kind, 0.0, 0.0, False, False, "below threshold")
            for kind in ("SingleMode1", "SingleMode2", "TwoMode")
        ]
    degenerate = ar == br
    note = "degenerate: alpha_R == beta_R" if degenerate else ""

    single_exists = ar > 0
    single = dict(
        amplitude2=eps2 / ar if single_exists else 0.0,
        delta=-(ai / ar) * eps2 if ar != 0 else 0.0,
        exists=single_exists,
        stable=single_exists and br > ar,
        note=note,
    )
    two_exists = ar + br > 0
    two = LimitCycle(
        "TwoMode",
        eps2 / (ar + br) if two_exists else 0.0,
        -((ai + bi) / (ar + br)) * eps2 if ar + br != 0 else 0.0,
        two_exists,
        two_exists and br < ar,
        note,
    )
    return [LimitCycle("SingleMode1", **single), LimitCycle("SingleMode2", **single), two]


def predicted_power(
    c1: complex,
    c2: complex,
    u1: np.ndarray,
    omega: float,
    grid: Grid,
    t_samples,
    delta: float = 0.0,
    u2: np.ndarray | None = None,
) -> PowerTrace:
    """Power of psi = c1 e^{i delta t} u1 e^{i omega t} + conj(c2 e^{i delta t}) u2 e^{-i omega t}.

    By default u2(x) = conj(u1(-x)). The beat term oscillates at 2*(omega + delta)
    with an amplitude set by the overlap <u2|u1>, which vanishes for orthogonal modes.
    """
    t = np.asarray(t_samples, dtype=float)
    u1 = np.asarray(u1, dtype=complex)
    u2 = np.conj(reflect(u1, grid)) if u2 is None else np.asarray(u2, dtype=complex)
    n1 = grid.integrate(np.abs(u1) ** 2).real
    n2 = grid.integrate(np.abs(u2) ** 2).real
    overlap = grid.integrate(np.conj(u2) * u1)
    mean = abs(c1) ** 2 * n1 + abs(c2) ** 2 * n2
    beat = 2.0 * np.real(c1 * c2 * np.exp(2j * (omega + delta) * t) * overlap)
    return PowerTrace(t, mean + beat)


def beat_period(omega: float, delta: float = 0.0) -> float:
    return float(np.pi / abs(omega + delta))


def analyze(pair: ModePair, g0: float) -> dict:
    """Saturation coefficients and limit cycles for a computed mode pair, with the predicted beating."""
    coeffs = saturation_coeffs(pair.u1, pair.grid)
    cycles = limit_cycles(g0, pair.g0_th, coeffs)
    two = cycles[2]
    report = {
        "g0": g0,
        "g0_th": pair.g0_th,
        "omega": pair.omega,
        "alpha": coeffs.alpha,
        "beta": coeffs.beta,
        "alpha_R_over_beta_R": coeffs.ratio,
        "cycles": [c.__dict__ for c in cycles],
    }
    if two.exists:
        report["two_mode_beat_period"] = beat_period(pair.omega, two.delta)
        overlap = pair.grid.integrate(reflect(pair.u1, pair.grid) * pair.u1)
        n1 = pair.grid.integrate(np.abs(pair.u1) ** 2).real
        report["two_mode_mean_power"] = 2.0 * two.amplitude2 * n1
        report["two_mode_modulation_depth"] = 2.0 * abs(overlap) / n1
    return report
