"""Two coupled laser oscillators (the reduced double-well model) and their Adler phase dynamics.

    da1/dt = (eta - i sigma) a1 + kappa a2 - rho |a1|^2 a1
    da2/dt = (eta + i sigma) a2 + kappa a1 - rho |a2|^2 a2
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DIVERGENCE = 1e6


class DivergenceError(FloatingPointError):
    pass


class PolarChartError(ValueError):
    pass


class RegimeError(ValueError):
    pass


@dataclass(frozen=True)
class DimerParams:
    eta: float  # net gain g0 - q
    kappa: float
    sigma: float
    rho: float
    g0: float | None = None
    q: float | None = None

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")

    @classmethod
    def from_gain(cls, g0: float, q: float, kappa: float, sigma: float, rho: float) -> "DimerParams":
        return cls(g0 - q, kappa, sigma, rho, g0, q)


# Fitted reduced-model values for the beta=7e-6, x0=10 double well.
FIG3_KAPPA = 0.00515
FIG3_Q = 0.0469
FIG3_RHO = 0.074
FIG3_SIGMA_SLOPE = 7.72


@dataclass(frozen=True)
class DimerState:
    a1: complex
    a2: complex


@dataclass(frozen=True)
class PolarState:
    r1: float
    r2: float
    phi: float  # phi2 - phi1, unwrapped


@dataclass(frozen=True)
class Locked:
    phi_star: float
    r_star2: float


@dataclass(frozen=True)
class Drift:
    period: float


@dataclass(frozen=True)
class LockReport:
    regime: Locked | Drift
    measured_period: float | None
    measured_r2_mean: float


@dataclass(frozen=True, eq=False)
class DimerTrajectory:
    times: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    phi: np.ndarray  # unwrapped relative phase

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.a1) ** 2 + np.abs(self.a2) ** 2

    @property
    def final(self) -> DimerState:
        return DimerState(complex(self.a1[-1]), complex(self.a2[-1]))


def dimer_rhs(state: DimerState, p: DimerParams) -> tuple[complex, complex]:
    a1, a2 = state.a1, state.a2
    return (
        complex(p.eta, -p.sigma) * a1 + p.kappa * a2 - p.rho * abs(a1) ** 2 * a1,
        complex(p.eta, p.sigma) * a2 + p.kappa * a1 - p.rho * abs(a2) ** 2 * a2,
    )


def _wrap(x: float) -> float:
    return (x + math.pi) % (2.0 * math.pi) - math.pi


def evolve_dimer(
    state0: DimerState,
    p: DimerParams,
    dt: float = 0.1,
    t_end: float = 1000.0,
    record_stride: int = 1,
) -> DimerTrajectory:
    """Classical RK4; the relative phase is accumulated every step so it never jumps by 2*pi."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = int(round(t_end / dt))
    m1, m2 = complex(p.eta, -p.sigma), complex(p.eta, p.sigma)
    k, rho = p.kappa, p.rho

    def f(a1, a2):
        return (
            m1 * a1 + k * a2 - rho * (a1.real**2 + a1.imag**2) * a1,
            m2 * a2 + k * a1 - rho * (a2.real**2 + a2.imag**2) * a2,
        )

    a1, a2 = complex(state0.a1), complex(state0.a2)
    phi = math.atan2(a2.imag, a2.real) - math.atan2(a1.imag, a1.real) if a1 and a2 else 0.0
    raw_prev = phi
    n_rec = n // record_stride + 1
    ts = np.empty(n_rec)
    A1 = np.empty(n_rec, complex)
    A2 = np.empty(n_rec, complex)
    PH = np.empty(n_rec)
    ts[0], A1[0], A2[0], PH[0] = 0.0, a1, a2, phi
    j = 1
    h2, h6 = 0.5 * dt, dt / 6.0
    for i in range(1, n + 1):
        k1a, k1b = f(a1, a2)
        k2a, k2b = f(a1 + h2 * k1a, a2 + h2 * k1b)
        k3a, k3b = f(a1 + h2 * k2a, a2 + h2 * k2b)
        k4a, k4b = f(a1 + dt * k3a, a2 + dt * k3b)
        a1 = a1 + h6 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        a2 = a2 + h6 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        if not (abs(a1) < DIVERGENCE and abs(a2) < DIVERGENCE):
            raise DivergenceError(f"amplitudes diverged at t={i * dt:g}")
        if a1 and a2:
            raw = math.atan2(a2.imag, a2.real) - math.atan2(a1.imag, a1.real)
            phi += _wrap(raw - raw_prev)
            raw_prev = raw
        if i % record_stride == 0:
            ts[j], A1[j], A2[j], PH[j] = i * dt, a1, a2, phi
            j += 1
    return DimerTrajectory(ts[:j], A1[:j], A2[:j], PH[:j])


def polar_rhs(state: PolarState, p: DimerParams) -> tuple[float, float, float]:
    r1, r2, phi = state.r1, state.r2, state.phi
    if r1 <= 0 or r2 <= 0:
        raise PolarChartError("polar chart singular: an amplitude is zero")
    c, s = math.cos(phi), math.sin(phi)
    return (
        p.eta * r1 + p.kappa * r2 * c - p.rho * r1**3,
        p.eta * r2 + p.kappa * r1 * c - p.rho * r2**3,
        2.0 * p.sigma - p.kappa * (r1 / r2 + r2 / r1) * s,
    )


def evolve_polar(state0: PolarState, p: DimerParams, dt: float = 0.1, t_end: float = 100.0) -> np.ndarray:
    """RK4 in (r1, r2, phi); returns an (n+1, 3) array."""
    n = int(round(t_end / dt))
    y = np.array([state0.r1, state0.r2, state0.phi], dtype=float)
    out = np.empty((n + 1, 3))
    out[0] = y

    def f(v):
        return np.array(polar_rhs(PolarState(*v), p))

    for i in range(1, n + 1):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i] = y
    return out


def to_polar(state: DimerState) -> PolarState:
    return PolarState(abs(state.a1), abs(state.a2), float(np.angle(state.a2) - np.angle(state.a1)))


# --- symmetric reduction (r1 = r2) ------------------------------------------


def adler_rhs(phi, sigma: float, kappa: float):
    return 2.0 * (sigma - kappa * np.sin(phi))


def integrate_adler(phi0: float, sigma: float, kappa: float, dt: float = 0.1, t_end: float = 100.0):
    """RK4 for the phase equation; returns (times, phi)."""
    n = int(round(t_end / dt))
    phi = np.empty(n + 1)
    phi[0] = y = float(phi0)
    for i in range(1, n + 1):
        k1 = adler_rhs(y, sigma, kappa)
        k2 = adler_rhs(y + 0.5 * dt * k1, sigma, kappa)
        k3 = adler_rhs(y + 0.5 * dt * k2, sigma, kappa)
        k4 = adler_rhs(y + dt * k3, sigma, kappa)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        phi[i] = y
    return dt * np.arange(n + 1), phi


def lyapunov_G(phi, sigma: float, kappa: float):
    """Potential of the phase equation: dphi/dt = -dG/dphi."""
    return -2.0 * sigma * np.asarray(phi) - 2.0 * kappa * np.cos(phi)


def is_nonincreasing(values, slack: float = 1e-9) -> bool:
    return bool(np.all(np.diff(np.asarray(values)) <= slack))


def locked_state(p: DimerParams) -> tuple[float, float]:
    """Phase-locked fixed point (phi*, r*^2) of the symmetric reduction."""
    if abs(p.sigma) >= p.kappa:
        raise RegimeError(f"drift regime: |sigma|={abs(p.sigma):g} >= kappa={p.kappa:g}")
    phi = math.asin(p.sigma / p.kappa)
    r2 = float(asymptotic_r2(np.array([phi]), p)[0])
    if not r2 > 0:
        raise RegimeError(f"below oscillation threshold: r*^2 = {r2:g}")
    return phi, r2


def locked_r2_closed_form(p: DimerParams) -> float:
    """(eta + sqrt(kappa^2 - sigma^2)) / rho, the fixed point of dr/dt at phi*."""
    return (p.eta + math.sqrt(p.kappa**2 - p.sigma**2)) / p.rho


def drift_period(p: DimerParams) -> float:
    if abs(p.sigma) <= p.kappa:
        raise RegimeError(f"locked regime: |sigma|={abs(p.sigma):g} <= kappa={p.kappa:g}")
    return math.pi / math.sqrt(p.sigma**2 - p.kappa**2)


def asymptotic_r2(phi_t, p: DimerParams) -> np.ndarray:
    phi = np.asarray(phi_t, dtype=float)
    s2e2 = p.sigma**2 + p.eta**2
    den = s2e2 - p.kappa * p.eta * np.cos(phi) - p.kappa * p.sigma * np.sin(phi)
    bad = np.flatnonzero(~(np.abs(den) > 0))
    if bad.size == 0 and den.size > 1:
        flips = np.flatnonzero(np.sign(den[1:]) != np.sign(den[:-1]))
        bad = flips + 1
    if bad.size:
        raise ZeroDivisionError(f"denominator vanishes at sample {int(bad[0])}")
    return (s2e2 - p.kappa**2) * p.eta / (p.rho * den)


# --- measurements -----------------------------------------------------------


def measure_drift_period(traj: DimerTrajectory, transient_frac: float = 0.5) -> float:
    """Mean time for the unwrapped phase to advance by 2*pi after the transient."""
    start = int(transient_frac * traj.times.size)
    t = traj.times[start:]
    phi = traj.phi[start:]
    direction = 1.0 if phi[-1] >= phi[0] else -1.0
    turns = np.floor(direction * phi / (2.0 * np.pi))
    idx = np.flatnonzero(np.diff(turns) != 0)
    if idx.size < 2:
        raise RegimeError("phase advanced less than two full turns: no drift measured")
    level = 2.0 * np.pi * np.maximum(turns[idx], turns[idx + 1])
    p0, p1 = direction * phi[idx], direction * phi[idx + 1]
    tc = t[idx] + (level - p0) / (p1 - p0) * (t[idx + 1] - t[idx])
    return float(np.diff(tc).mean())


def is_drifting(traj: DimerTrajectory, transient_frac: float = 0.5) -> bool:
    start = int(transient_frac * traj.times.size)
    return bool(abs(traj.phi[-1] - traj.phi[start]) > 2.0 * np.pi)


def lock_report(p: DimerParams, traj: DimerTrajectory | None = None, transient_frac: float = 0.5) -> LockReport:
    regime = Locked(*locked_state(p)) if abs(p.sigma) < p.kappa else Drift(drift_period(p))
    if traj is None:
        return LockReport(regime, None, float("nan"))
    start = int(transient_frac * traj.times.size)
    r2 = 0.5 * traj.power[start:]
    measured = None
    if is_drifting(traj, transient_frac):
        try:
            measured = measure_drift_period(traj, transient_frac)
        except RegimeError:
            measured = None
    return LockReport(regime, measured, float(r2.mean()))


def sweep_sigma(
    kappa: float,
    eta: float,
    rho: float,
    sigmas,
    dt: float = 0.1,
    t_end: float = 20000.0,
    state0: DimerState = DimerState(0.01 + 0.002j, 0.013 - 0.001j),
) -> list[dict]:
    """Lock/drift classification and periods along a detuning sweep."""
    rows = []
    for s in sigmas:
        p = DimerParams(eta, kappa, float(s), rho)
        traj = evolve_dimer(state0, p, dt, t_end, record_stride=10)
        drifting = is_drifting(traj)
        measured = None
        if drifting:
            try:
                measured = measure_drift_period(traj)
            except RegimeError:
                measured = None
        predicted = drift_period(p) if abs(p.sigma) > kappa else float("nan")
        rows.append(
            {
                "sigma": float(s),
                "sigma_over_kappa": float(s) / kappa,
                "drifting": drifting,
                "measured_period": float("nan") if measured is None else measured,
                "predicted_period": predicted,
            }
        )
    return rows


# --- reduced parameters from the double-well spectrum -----------------------


@dataclass(frozen=True)
class ReducedParams:
    kappa: float
    q: float
    sigma_slope: float

    @property
    def gamma_pt(self) -> float:
        """Threshold of the reduced model, sigma = kappa."""
        return self.kappa / self.sigma_slope

    def levels(self, gammas) -> np.ndarray:
        """Reduced-model energies q -+ sqrt(kappa^2 - sigma^2) as an (m, 2) complex array."""
        sig = self.sigma_slope * np.asarray(gammas, dtype=float)
        root = np.sqrt((self.kappa**2 - sig**2).astype(complex))
        # lower branch first, matching the (real, then imaginary) ordering of computed spectra
        return np.column_stack([self.q - root, self.q + root])


def extract_reduced_params(
    gammas,
    levels,
    tol_real: float = 1e-7,
    gamma_max: float | None = None,
) -> ReducedParams:
    """Fit the reduced dimer model to the two lowest levels of the full spectrum.

    ``levels`` is (m, >= 2); row j holds the spectrum at ``gammas[j]``. kappa and q
    come from the gamma = 0 row; the slope is the least-squares fit of
    ((E2 - E1)/2)^2 = kappa^2 - (slope*gamma)^2 over the rows where both levels
    are still real (and gamma <= gamma_max when given).
    """
    g = np.asarray(gammas, dtype=float)
    e = np.asarray(levels)[:, :2]
    zero = np.flatnonzero(g == 0.0)
    if zero.size == 0:
        raise ValueError("spectrum at gamma = 0 is required")
    e0 = e[zero[0]]
    if np.any(np.abs(e0.imag) > tol_real):
        raise ValueError("fewer than two real levels at gamma = 0")
    e0 = np.sort(e0.real)
    kappa = 0.5 * (e0[1] - e0[0])
    q = 0.5 * (e0[0] + e0[1])
    real_rows = np.all(np.abs(e.imag) <= tol_real, axis=1) & (g > 0)
    if gamma_max is not None:
        real_rows &= g <= gamma_max
    if np.count_nonzero(real_rows) < 2:
        raise ValueError("need at least two gamma > 0 samples below the threshold")
    gg = g[real_rows]
    half_split = 0.5 * np.abs(e[real_rows, 1].real - e[real_rows, 0].real)
    y = kappa**2 - half_split**2  # = slope^2 gamma^2
    slope2 = np.sum(y * gg**2) / np.sum(gg**4)
    return ReducedParams(float(kappa), float(q), float(math.sqrt(slope2)))
