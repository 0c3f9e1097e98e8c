"""Inner-vector detection and construction."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .approx import build_gram, orbit_truncation, solve_system
from .errors import NotCoprime, PowerTooSmall, ValidationError, ZeroVector
from .monoids import MonoidSpec, apply, coerce_space
from .series import CoefficientSeries, SpaceTag, inner_product

POLY_TOL = 1e-10
SERIES_TOL = 1e-6


@dataclass(frozen=True)
class InnerReport:
    max_index_checked: int
    max_violation: float
    violating_index: Optional[int]
    tol: float

    @property
    def passed(self) -> bool:
        return self.violating_index is None

    def to_dict(self) -> dict:
        return {
            "max_index_checked": self.max_index_checked,
            "max_violation": self.max_violation,
            "violating_index": self.violating_index,
            "tol": self.tol,
            "passed": self.passed,
        }


def inner_check(
    m: MonoidSpec, h: CoefficientSeries, K: int, tol: float = POLY_TOL
) -> InnerReport:
    """Scan ``|<h, T_k h>|`` for ``n0 < k <= K``.

    ``violating_index`` is the index of the largest violation when it exceeds
    ``tol``. Images are computed without truncation, so a polynomial ``h``
    is checked exactly; for a truncated series pass a looser ``tol``.
    """
    h = coerce_space(m, h)
    if h.is_zero():
        raise ZeroVector("inner_check needs a nonzero vector")
    worst, where = 0.0, None
    for k in range(m.n0 + 1, K + 1):
        v = abs(inner_product(h, apply(m, k, h)))
        if v > worst:
            worst, where = v, k
    return InnerReport(K, worst, where if worst > tol else None, tol)


def _project_out(m: MonoidSpec, h: CoefficientSeries, K: int, truncation) -> CoefficientSeries:
    others = list(range(m.n0 + 1, K + 1))
    if not others:
        return h
    if truncation is None:
        truncation = orbit_truncation(m, h, K)
    cols = [apply(m, k, h, truncation).coeffs for k in others]
    # Reuse the Gram assembly: window n0..K, then drop the identity row/column.
    g = build_gram(m, h, h, K, truncation)
    G, rhs = g.gram[1:, 1:], g.rhs[1:]
    c, _, _ = solve_system(G, rhs)
    length = max(truncation + 1, len(h))
    proj = np.zeros(length, dtype=np.complex128)
    for cj, col in zip(c, cols):
        proj[: col.size] += cj * col
    return CoefficientSeries(h.padded(length) - proj, h.space).trimmed()


def inner_project(
    m: MonoidSpec, h: CoefficientSeries, K: int, truncation: Optional[int] = None
) -> CoefficientSeries:
    """``h - P h`` with ``P`` the orthogonal projection onto
    ``span{T_k h : n0 < k <= K}``."""
    h = coerce_space(m, h)
    if h.is_zero():
        raise ZeroVector("inner_project needs a nonzero vector")
    if K < m.n0:
        raise ValidationError(f"K must be >= {m.n0}")
    return _project_out(m, h, K, truncation)


def inner_project_report(m: MonoidSpec, h: CoefficientSeries, K: int) -> dict:
    """Project at windows ``K`` and ``2K`` and report how far the outputs moved."""
    out_k = inner_project(m, h, K)
    out_2k = inner_project(m, h, 2 * K)
    n = max(len(out_k), len(out_2k))
    gap = float(np.max(np.abs(out_k.padded(n) - out_2k.padded(n)))) if n else 0.0
    report = None if out_k.is_zero() else inner_check(m, out_k, K).to_dict()
    return {
        "K": K,
        "series": out_k,
        "series_2K": out_2k,
        "k_stability": gap,
        "inner_report": report,
    }


def coprime_inner(powers: Sequence[int], amplitudes: Sequence[complex]) -> CoefficientSeries:
    """``sum_j a_j z**p_j`` with pairwise coprime exponents ``p_j > 1``."""
    if len(powers) != len(amplitudes):
        raise ValidationError("powers and amplitudes differ in length")
    for p in powers:
        if int(p) != p or p <= 1:
            raise PowerTooSmall(f"power {p} must be an integer > 1")
    for p, q in combinations(powers, 2):
        if math.gcd(int(p), int(q)) != 1:
            raise NotCoprime(f"gcd({p}, {q}) = {math.gcd(int(p), int(q))}")
    if not powers:
        return CoefficientSeries.zero(SpaceTag.H2_ZERO)
    coeffs = np.zeros(max(powers) + 1, dtype=np.complex128)
    for p, a in zip(powers, amplitudes):
        coeffs[int(p)] = a
    return CoefficientSeries(coeffs, SpaceTag.H2_ZERO)
