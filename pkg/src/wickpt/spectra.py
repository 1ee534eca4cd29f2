"""Complex spectra of the discretized operator, PT-threshold scans and the coalescing mode pair."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from ._cstql import cs_tql
from .io import write_csv
from .lattice import Grid, OperatorMatrix, PotentialSpec, assemble_hamiltonian

log = logging.getLogger(__name__)

TOL_REAL = 1e-7
NEAR_DEFECTIVE = 1e-6
_TIE = 1e-9
_QL_MAXIT = 60
_INVIT_STEPS = 3


class EigenSolverError(RuntimeError):
    pass


class NoTransitionError(ValueError):
    pass


class BelowThresholdError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Spectrum:
    """k eigenpairs sorted by real part (near-ties by imaginary part).

    Columns of ``right_vectors`` have unit Euclidean norm with their
    largest-magnitude entry real and positive.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray | None
    residuals: np.ndarray | None = None
    near_defective: np.ndarray | None = None
    left_vectors: np.ndarray | None = None

    def __len__(self):
        return self.eigenvalues.size


@dataclass(frozen=True)
class ThresholdResult:
    gamma_pt: float
    bracket: tuple[float, float]
    pair_index: tuple[int, int]
    max_imag_at_hi: float
    history: tuple[tuple[float, float], ...] = field(default=(), repr=False)


@dataclass(frozen=True, eq=False)
class ModePair:
    """Marginal modes of L = -H(g0 = g0_th): L u1 = +i*omega*u1, L u2 = -i*omega*u2.

    The adjoint vectors are scaled so that <u_i_adj | u_i> = 1.
    """

    omega: float
    energy: complex  # eigenvalue of H (at the op's own g0) belonging to u1
    g0_th: float
    u1: np.ndarray
    u2: np.ndarray
    u1_adj: np.ndarray
    u2_adj: np.ndarray
    grid: Grid | None = None
    near_defective: bool = False


def sort_spectrum(values: np.ndarray) -> np.ndarray:
    """Index order: ascending real part; real parts equal to ~1e-9 are ordered by imaginary part."""
    values = np.asarray(values)
    order = np.argsort(values.real, kind="stable")
    re = values.real[order]
    scale = np.maximum(1.0, np.abs(re))
    # group runs of (numerically) equal real parts
    breaks = np.concatenate(([True], np.diff(re) > _TIE * scale[1:]))
    group = np.cumsum(breaks)
    return order[np.lexsort((values.imag[order], group))]


def _as_operator(op) -> OperatorMatrix | np.ndarray:
    if isinstance(op, OperatorMatrix):
        return op
    a = np.asarray(op, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    return a


def _dense_eigvals(a: np.ndarray) -> np.ndarray:
    # LAPACK zgeev: Hessenberg reduction + shifted QR
    try:
        return sla.eigvals(a, check_finite=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f"dense QR iteration failed: {exc}") from exc


def all_eigenvalues(op) -> np.ndarray:
    """Full sorted spectrum without vectors."""
    op = _as_operator(op)
    if isinstance(op, OperatorMatrix):
        if not (np.all(np.isfinite(op.diag)) and np.all(np.isfinite(op.lower))):
            raise EigenSolverError("operator has non-finite entries")
        if op.is_complex_symmetric:
            w, status = cs_tql(op.diag.astype(np.complex128), op.lower.astype(np.complex128), _QL_MAXIT)
            if status == 0:
                return w[sort_spectrum(w)]
            log.warning("tridiagonal QL gave status %d; falling back to dense QR", status)
        w = _dense_eigvals(op.dense())
    else:
        w = _dense_eigvals(op)
    return w[sort_spectrum(w)]


def eigenvalues(op, k: int | None = None) -> np.ndarray:
    w = all_eigenvalues(op)
    return w if k is None else w[:k]


class _ShiftSolver:
    """Factorization of (A - mu I) for repeated inverse-iteration solves."""

    def __init__(self, op, mu: complex):
        self.tridiag = isinstance(op, OperatorMatrix)
        if self.tridiag:
            out = lapack.zgttrf(op.lower.astype(complex), (op.diag - mu).astype(complex), op.upper.astype(complex))
            *self.factors, info = out
            self.singular = info > 0
        else:
            a = op - mu * np.eye(op.shape[0])
            self.lu = sla.lu_factor(a, check_finite=False)
            self.singular = np.any(np.diag(self.lu[0]) == 0)

    def solve(self, b):
        if self.tridiag:
            x, info = lapack.zgttrs(*self.factors, b)
            return x
        return sla.lu_solve(self.lu, b, check_finite=False)


def _norm_inf(op) -> float:
    if isinstance(op, OperatorMatrix):
        return op.norm_inf()
    return float(np.abs(op).sum(axis=1).max())


def _matvec(op, v):
    return op.matvec(v) if isinstance(op, OperatorMatrix) else op @ v


def fix_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    j = int(np.argmax(np.abs(v)))
    return v * (abs(v[j]) / v[j])


def inverse_iteration(op, value: complex, steps: int = _INVIT_STEPS, seed: int = 12345) -> np.ndarray:
    """Eigenvector for a (converged) eigenvalue by shifted inverse iteration."""
    op = _as_operator(op)
    n = op.n if isinstance(op, OperatorMatrix) else op.shape[0]
    scale = max(_norm_inf(op), 1.0)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    delta = 1e-14 * scale
    for _ in range(8):
        solver = _ShiftSolver(op, value + delta)
        if not solver.singular:
            break
        delta *= 10.0
    else:
        raise EigenSolverError(f"cannot factor shifted operator near {value}")
    for _ in range(steps):
        v = solver.solve(v / np.linalg.norm(v))
        if not np.all(np.isfinite(v)):
            raise EigenSolverError(f"inverse iteration overflow near {value}")
    return fix_phase(v)


def eig(op, k: int, adjoint: bool = False) -> Spectrum:
    """The k eigenpairs of smallest real part.

    Eigenvalues come from a QR-type iteration (complex-symmetric tridiagonal QL
    when the structure allows it, LAPACK otherwise); vectors from inverse
    iteration. With ``adjoint=True`` the eigenvectors of the conjugate-transpose
    belonging to conj(E) are returned too.
    """
    op = _as_operator(op)
    n = op.n if isinstance(op, OperatorMatrix) else op.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    w_all = all_eigenvalues(op)
    w = w_all[:k]
    scale = _norm_inf(op)
    vecs = np.empty((n, k), dtype=complex)
    res = np.empty(k)
    for j, e in enumerate(w):
        v = inverse_iteration(op, e)
        r = np.linalg.norm(_matvec(op, v) - e * v)
        if r > 1e-10 * max(scale, 1.0) and isinstance(op, OperatorMatrix):
            # the non-unitary fast path lost accuracy: redo with dense QR
            log.warning("residual %.3g for eigenvalue %s; recomputing densely", r, e)
            return eig(op.dense(), k, adjoint)
        vecs[:, j] = v
        res[j] = r
    near = np.zeros(k, dtype=bool)
    if n > 1:
        for j, e in enumerate(w):
            near[j] = np.min(np.abs(np.delete(w_all, j) - e)) < NEAR_DEFECTIVE
    left = None
    if adjoint:
        adj = op.adjoint() if isinstance(op, OperatorMatrix) else op.conj().T
        left = np.column_stack([inverse_iteration(adj, np.conj(e)) for e in w])
    return Spectrum(w, vecs, res, near, left)


def max_abs_imag(s) -> float:
    values = s.eigenvalues if isinstance(s, Spectrum) else np.asarray(s)
    if values.size == 0:
        raise ValueError("empty spectrum")
    return float(np.max(np.abs(values.imag)))


def with_gamma(family: PotentialSpec, gamma: float) -> PotentialSpec:
    return replace(family, gamma=float(gamma))


def _probe(family, grid, g0, gamma, k):
    return max_abs_imag(eigenvalues(assemble_hamiltonian(with_gamma(family, gamma), grid, g0), k))


def scan_threshold(
    family: PotentialSpec,
    grid: Grid,
    g0: float = 0.0,
    gamma_range: tuple[float, float] = (0.0, 0.1),
    tol_real: float = TOL_REAL,
    tol_gamma: float = 1e-4,
    k: int = 6,
) -> ThresholdResult:
    """Bisect on gamma for the onset of complex eigenvalues among the k lowest levels."""
    lo, hi = map(float, gamma_range)
    if not hi > lo:
        raise ValueError("gamma_range must be increasing")
    history = []
    f_lo = _probe(family, grid, g0, lo, k)
    f_hi = _probe(family, grid, g0, hi, k)
    history += [(lo, f_lo), (hi, f_hi)]
    if f_lo > tol_real or f_hi <= tol_real:
        raise NoTransitionError(
            f"no transition in range [{lo}, {hi}]: max|Im E| = {f_lo:.3g} .. {f_hi:.3g}"
        )
    while hi - lo > tol_gamma:
        mid = 0.5 * (lo + hi)
        f_mid = _probe(family, grid, g0, mid, k)
        history.append((mid, f_mid))
        if f_mid > tol_real:
            hi, f_hi = mid, f_mid
        else:
            lo = mid
    w = eigenvalues(assemble_hamiltonian(with_gamma(family, hi), grid, g0), k)
    cplx = np.flatnonzero(np.abs(w.imag) > tol_real)
    pair = (int(cplx[0]), int(cplx[1])) if cplx.size >= 2 else (int(cplx[0]), int(cplx[0]))
    return ThresholdResult(0.5 * (lo + hi), (lo, hi), pair, f_hi, tuple(sorted(history)))


def mode_pair_at(op: OperatorMatrix, tol_real: float = TOL_REAL) -> ModePair:
    """The two lowest modes once they have become a complex-conjugate pair."""
    spec = eig(op, 2, adjoint=True)
    e = spec.eigenvalues
    if abs(e[0].imag) <= tol_real or abs(e[1].imag) <= tol_real:
        raise BelowThresholdError(f"lowest eigenvalues {e} are real: below the PT threshold")
    i1 = 0 if e[0].imag < 0 else 1  # L = -(H - i Im E) so Im E < 0 gives +i*omega
    i2 = 1 - i1
    u1 = spec.right_vectors[:, i1]
    u2 = spec.right_vectors[:, i2]
    a1 = spec.left_vectors[:, i1]
    a2 = spec.left_vectors[:, i2]
    near = bool(spec.near_defective[:2].any())
    if not near:
        a1 = a1 / np.vdot(a1, u1).conj()
        a2 = a2 / np.vdot(a2, u2).conj()
    g0_th = float(e[i1].real + op.g0)
    return ModePair(float(abs(e[i1].imag)), complex(e[i1]), g0_th, u1, u2, a1, a2, op.grid, near)


@dataclass(frozen=True, eq=False)
class SpectrumTable:
    gammas: np.ndarray
    sorted_values: np.ndarray  # (m, k), each row sorted
    branches: np.ndarray  # (m, k), columns continued across gamma

    def to_csv(self, path, branches: bool = True, extra: dict | None = None):
        vals = self.branches if branches else self.sorted_values
        k = vals.shape[1]
        header = ["gamma"] + [f"re_E{j + 1}" for j in range(k)] + [f"im_E{j + 1}" for j in range(k)]
        cols = [self.gammas] + [vals[:, j].real for j in range(k)] + [vals[:, j].imag for j in range(k)]
        for name, col in (extra or {}).items():
            header.append(name)
            cols.append(col)
        return write_csv(path, header, cols)


def match_branches(rows: np.ndarray) -> np.ndarray:
    """Continue eigenvalue branches row to row by nearest neighbour in the complex plane."""
    rows = np.asarray(rows)
    out = np.empty_like(rows)
    out[0] = rows[0]
    k = rows.shape[1]
    for r in range(1, rows.shape[0]):
        prev, cur = out[r - 1], rows[r]
        dist = np.abs(prev[:, None] - cur[None, :])
        # global greedy: smallest distance first, ties by smaller (branch, candidate) index
        order = np.lexsort((np.tile(np.arange(k), k), np.repeat(np.arange(k), k), dist.ravel()))
        taken_b = np.zeros(k, bool)
        taken_c = np.zeros(k, bool)
        for flat in order:
            b, c = divmod(int(flat), k)
            if taken_b[b] or taken_c[c]:
                continue
            out[r, b] = cur[c]
            taken_b[b] = taken_c[c] = True
    return out


def spectrum_vs_gamma(
    family: PotentialSpec,
    grid: Grid,
    g0: float,
    gammas: Sequence[float],
    k: int,
    jobs: int = 1,
) -> SpectrumTable:
    gammas = np.asarray(gammas, dtype=float)
    if not np.all(np.isfinite(gammas)):
        raise ValueError("gamma samples must be finite")

    def one(g):
        return eigenvalues(assemble_hamiltonian(with_gamma(family, g), grid, g0), k)

    if jobs > 1 and gammas.size > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, gammas))
    else:
        rows = [one(g) for g in gammas]
    rows = np.array(rows)
    return SpectrumTable(gammas, rows, match_branches(rows))
