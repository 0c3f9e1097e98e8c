"""Optimal approximants in orbit spans.

Given a monoid ``{T_j}``, a vector ``h`` and a target ``sigma``, the N-th
optimal approximant is the orthogonal projection of ``sigma`` onto
``V_N = span{T_j h : n0 <= j <= N}``. Its coefficients solve the Gram system
``G c = r`` with ``G[j, k] = <T_k h, T_j h>`` and ``r[j] = <sigma, T_j h>``,
and ``dist^2(sigma, V_N) = ||sigma||^2 - sum_j c_j conj(r[j])``.

When ``sigma`` is a normalized aleph ``u`` every entry of ``r`` past the
first vanishes, so the distance only needs ``c_{n0}``:
``dist^2 = 1 - c_{n0} <h, u>``.
"""
from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import linalg

from .errors import NotAnAleph, SingularGram, SolverError, ValidationError, ZeroVector
from .monoids import MonoidSpec, apply, coerce_space, exact_degree_bound
from .series import CoefficientSeries, _vdot, inner_product, norm_sq

COND_LIMIT = 1e12
PINV_CUTOFF = 1e-12
NEGATIVE_DIST_SLACK = 1e-8
DEFAULT_TRUNCATION = 4096

SeriesSource = Union[CoefficientSeries, Callable[[int], CoefficientSeries]]


class Solver(str, enum.Enum):
    CHOLESKY = "cholesky"
    EIGEN_PSEUDOINVERSE = "eigen_pseudoinverse"


@dataclass(frozen=True)
class GramSystem:
    indices: tuple
    gram: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)
    truncation: int = 0

    def __post_init__(self):
        n = len(self.indices)
        if self.gram.shape != (n, n) or self.rhs.shape != (n,):
            raise ValidationError("Gram system dimensions disagree")

    def leading(self, N: int) -> "GramSystem":
        """The sub-system for the window ``n0..N``."""
        size = self.indices.index(N) + 1
        return GramSystem(
            self.indices[:size],
            self.gram[:size, :size],
            self.rhs[:size],
            self.truncation,
        )

    def to_dict(self) -> dict:
        return {
            "indices": list(self.indices),
            "gram": [[_pair(z) for z in row] for row in self.gram],
            "rhs": [_pair(z) for z in self.rhs],
            "truncation": self.truncation,
        }


@dataclass(frozen=True)
class ApproximantResult:
    indices: tuple
    coefficients: np.ndarray = field(repr=False)
    dist_sq: float
    condition_estimate: float
    solver_used: Solver

    @property
    def c_n0(self) -> complex:
        return complex(self.coefficients[0])

    def to_dict(self) -> dict:
        return {
            "indices": list(self.indices),
            "coefficients": [_pair(z) for z in self.coefficients],
            "dist_sq": self.dist_sq,
            "condition_estimate": _finite_or_none(self.condition_estimate),
            "solver_used": self.solver_used.value,
        }


@dataclass(frozen=True)
class TraceRow:
    N: int
    dist_sq: float
    c_n0: complex
    condition_estimate: float
    truncation: int
    truncation_error: float = 0.0


@dataclass
class ConvergenceTrace:
    rows: list = field(default_factory=list)

    CSV_HEADER = "N,dist_sq,c_n0_re,c_n0_im,cond,trunc,trunc_err"

    @property
    def dist_sq(self) -> np.ndarray:
        return np.array([r.dist_sq for r in self.rows])

    @property
    def c_n0(self) -> np.ndarray:
        return np.array([r.c_n0 for r in self.rows])

    def is_nonincreasing(self, slack: float = 1e-8) -> bool:
        d = self.dist_sq
        return bool(np.all(np.diff(d) <= slack))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(self.CSV_HEADER + "\n")
        for r in self.rows:
            buf.write(
                f"{r.N},{r.dist_sq!r},{r.c_n0.real!r},{r.c_n0.imag!r},"
                f"{r.condition_estimate!r},{r.truncation},{r.truncation_error!r}\n"
            )
        return buf.getvalue()


def _pair(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


# --- Gram assembly --------------------------------------------------------

def _require_nonzero(h: CoefficientSeries) -> None:
    if h.is_zero():
        raise ZeroVector("the orbit generator must be a nonzero vector")


def orbit_truncation(m: MonoidSpec, h: CoefficientSeries, N: int) -> int:
    deg = h.degree()
    return exact_degree_bound(m, N, 0 if deg is None else deg)


def orbit(
    m: MonoidSpec, h: CoefficientSeries, indices: Sequence[int], truncation: int
) -> list:
    return [apply(m, j, h, truncation).coeffs for j in indices]


def gram_matrix(columns: Sequence[np.ndarray]) -> np.ndarray:
    """``G[j, k] = <col_k, col_j>``; the lower triangle is the exact conjugate."""
    n = len(columns)
    G = np.empty((n, n), dtype=np.complex128)
    for j in range(n):
        for k in range(j, n):
            G[j, k] = _vdot(columns[k], columns[j])
            G[k, j] = G[j, k].conjugate()
    return G


def build_gram(
    m: MonoidSpec,
    h: CoefficientSeries,
    sigma: CoefficientSeries,
    N: int,
    truncation: Optional[int] = None,
) -> GramSystem:
    """Assemble the Gram system for the window ``n0..N``.

    ``truncation`` is the degree at which every ``T_j h`` is cut; by default
    the smallest one that keeps the polynomial ``h`` exact.
    """
    h = coerce_space(m, h)
    _require_nonzero(h)
    indices = m.window(N)
    if truncation is None:
        truncation = orbit_truncation(m, h, N)
    cols = orbit(m, h, indices, truncation)
    rhs = np.array([_vdot(sigma.coeffs, c) for c in cols], dtype=np.complex128)
    return GramSystem(tuple(indices), gram_matrix(cols), rhs, truncation)


# --- solving --------------------------------------------------------------

def _condition(G: np.ndarray) -> tuple:
    w = linalg.eigvalsh(G)
    top = float(w[-1])
    low = float(w[0])
    cond = top / low if low > 0 else math.inf
    return cond, w


def _cholesky_solve(G: np.ndarray, rhs: np.ndarray, cond: float) -> np.ndarray:
    if cond > COND_LIMIT:
        raise SingularGram(f"condition estimate {cond:.3e} exceeds {COND_LIMIT:.0e}")
    try:
        factor = linalg.cho_factor(G, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise SingularGram(str(exc)) from None
    return linalg.cho_solve(factor, rhs, check_finite=False)


def _pinv_solve(G: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    w, V = linalg.eigh(G)
    top = w[-1] if w.size else 0.0
    if top <= 0:
        raise SingularGram("Gram matrix has no positive spectrum")
    keep = w > PINV_CUTOFF * top
    Vk = V[:, keep]
    return Vk @ ((Vk.conj().T @ rhs) / w[keep])


def solve_system(G: np.ndarray, rhs: np.ndarray) -> tuple:
    """Solve ``G c = rhs`` for Hermitian PSD ``G``; Cholesky first, then a
    spectral pseudo-inverse. Returns ``(c, condition_estimate, solver)``."""
    cond, _ = _condition(G)
    try:
        return _cholesky_solve(G, rhs, cond), cond, Solver.CHOLESKY
    except SingularGram:
        return _pinv_solve(G, rhs), cond, Solver.EIGEN_PSEUDOINVERSE


def _clamp_distance(d: float, scale: float) -> float:
    if d < 0:
        if d < -NEGATIVE_DIST_SLACK * max(1.0, scale):
            raise SolverError(f"squared distance {d:.3e} is negative beyond rounding")
        return 0.0
    return d


def solve_approximant(g: GramSystem, sigma_norm_sq: float) -> ApproximantResult:
    c, cond, solver = solve_system(g.gram, g.rhs)
    captured = float(np.real(np.sum(c * np.conj(g.rhs))))
    dist = _clamp_distance(sigma_norm_sq - captured, sigma_norm_sq)
    return ApproximantResult(g.indices, c, dist, cond, solver)


def optimal_approximant(
    m: MonoidSpec,
    h: CoefficientSeries,
    sigma: CoefficientSeries,
    N: int,
    truncation: Optional[int] = None,
) -> ApproximantResult:
    return solve_approximant(build_gram(m, h, sigma, N, truncation), norm_sq(sigma))


def approximant_series(
    m: MonoidSpec, h: CoefficientSeries, result: ApproximantResult, truncation: int
) -> CoefficientSeries:
    """Materialize ``sum_j c_j T_j h``."""
    total = np.zeros(truncation + 1, dtype=np.complex128)
    for j, c in zip(result.indices, result.coefficients):
        col = apply(m, j, h, truncation).coeffs
        total[: col.size] += c * col
    return CoefficientSeries(total)


# --- aleph shortcut -------------------------------------------------------

ALEPH_TOL = 1e-10
RHS_TOL = 1e-8


def check_aleph(m: MonoidSpec, u: CoefficientSeries, N: int) -> None:
    """Raise :class:`NotAnAleph` unless ``u`` is normalized and inner up to ``N``."""
    u = coerce_space(m, u)
    if abs(norm_sq(u) - 1.0) > 1e-12:
        raise NotAnAleph(f"aleph must be normalized, ||u||^2 = {norm_sq(u)!r}")
    for k in m.window(N)[1:]:
        v = abs(inner_product(u, apply(m, k, u)))
        if v > ALEPH_TOL:
            raise NotAnAleph(f"|<u, T_{k} u>| = {v:.3e}")


def _aleph_rhs(g: GramSystem, u_h: complex) -> np.ndarray:
    if g.rhs.size > 1:
        worst = float(np.max(np.abs(g.rhs[1:])))
        if worst > RHS_TOL:
            raise NotAnAleph(f"<u, T_k h> = {worst:.3e} for some k > n0")
    rhs = np.zeros_like(g.rhs)
    rhs[0] = u_h
    return rhs


def _aleph_solve(g: GramSystem, h_u: complex) -> ApproximantResult:
    rhs = _aleph_rhs(g, h_u.conjugate())
    c, cond, solver = solve_system(g.gram, rhs)
    dist = _clamp_distance(1.0 - float(np.real(c[0] * h_u)), 1.0)
    return ApproximantResult(g.indices, c, dist, cond, solver)


def aleph_distance(
    m: MonoidSpec,
    h: CoefficientSeries,
    u: CoefficientSeries,
    N: int,
    truncation: Optional[int] = None,
) -> ApproximantResult:
    """``dist^2(u, V_N)`` through ``1 - Re(c_{n0} <h, u>)``."""
    check_aleph(m, u, N)
    g = build_gram(m, h, u, N, truncation)
    return _aleph_solve(g, inner_product(coerce_space(m, h), u))


def _series_at(source: SeriesSource, D: int) -> CoefficientSeries:
    return source(D) if callable(source) else source


def _trace_rows(m, h, u, N_max, truncation):
    g = build_gram(m, h, u, N_max, truncation)
    h_u = inner_product(coerce_space(m, h), u)
    out = []
    for N in g.indices:
        sub = g.leading(N)
        trunc = truncation if truncation is not None else orbit_truncation(m, h, N)
        out.append((N, _aleph_solve(sub, h_u), trunc))
    return out


def cyclicity_trace(
    m: MonoidSpec,
    h: SeriesSource,
    u: CoefficientSeries,
    N_max: int,
    D: Optional[int] = None,
) -> ConvergenceTrace:
    """Aleph distances for ``N = n0..N_max``.

    A polynomial ``h`` is handled at exact truncation. ``h`` may instead be a
    callable ``D -> CoefficientSeries`` producing a truncated series; it is
    then evaluated at ``D`` (default 4096) and ``2 D`` and the gap between the
    two distances is reported as the truncation error of each row.
    """
    check_aleph(m, u, N_max)
    if callable(h):
        D = DEFAULT_TRUNCATION if D is None else D
        coarse = _trace_rows(m, h(D), u, N_max, None)
        fine = _trace_rows(m, h(2 * D), u, N_max, None)
        rows = [
            TraceRow(N, r.dist_sq, r.c_n0, r.condition_estimate, t,
                     abs(r.dist_sq - rf.dist_sq))
            for (N, r, t), (_, rf, _) in zip(coarse, fine)
        ]
    else:
        rows = [
            TraceRow(N, r.dist_sq, r.c_n0, r.condition_estimate, t)
            for N, r, t in _trace_rows(m, h, u, N_max, None)
        ]
    return ConvergenceTrace(rows)


def distance_trace(
    m: MonoidSpec, h: CoefficientSeries, sigma: CoefficientSeries, N_max: int
) -> ConvergenceTrace:
    """Generic ``dist^2(sigma, V_N)`` for ``N = n0..N_max`` with any target."""
    g = build_gram(m, h, sigma, N_max)
    s2 = norm_sq(sigma)
    rows = []
    for N in g.indices:
        r = solve_approximant(g.leading(N), s2)
        rows.append(TraceRow(N, r.dist_sq, r.c_n0, r.condition_estimate,
                             orbit_truncation(m, h, N)))
    return ConvergenceTrace(rows)


# --- stabilization --------------------------------------------------------

@dataclass(frozen=True)
class StabilizationReport:
    """Outcome of :func:`stabilization_check`.

    ``aleph_orthogonal`` is set when ``<u, h> = 0``: every approximant is then
    zero, so stability holds without saying anything about inner-ness.
    """

    stable: bool
    N_max: int
    tol: float
    witness: Optional[tuple] = None
    deviation: float = 0.0
    aleph_orthogonal: bool = False

    def to_dict(self) -> dict:
        return {
            "stable": self.stable,
            "N_max": self.N_max,
            "tol": self.tol,
            "witness": None if self.witness is None else list(self.witness),
            "deviation": self.deviation,
            "aleph_orthogonal": self.aleph_orthogonal,
        }


def stabilization_check(
    m: MonoidSpec,
    h: CoefficientSeries,
    u: CoefficientSeries,
    N_max: int,
    tol: float = 1e-9,
) -> StabilizationReport:
    """Do the approximants to ``u`` stay at ``c_{n0}^{(n0)} h`` for every N?

    On failure the witness is the first ``(N, j)`` whose coefficient moved.
    """
    check_aleph(m, u, N_max)
    g = build_gram(m, h, u, N_max)
    orthogonal = bool(abs(g.rhs[0]) <= tol)
    c_first = None
    for N in g.indices:
        sub = g.leading(N)
        c, _, _ = solve_system(sub.gram, sub.rhs)
        if c_first is None:
            c_first = c[0]
        expected = np.zeros_like(c)
        expected[0] = c_first
        dev = np.abs(c - expected)
        bad = np.flatnonzero(dev > tol)
        if bad.size:
            i = int(bad[0])
            return StabilizationReport(
                False, N_max, tol, (N, g.indices[i]), float(dev[i]), orthogonal
            )
    return StabilizationReport(True, N_max, tol, aleph_orthogonal=orthogonal)
