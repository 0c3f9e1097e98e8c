"""The monoid W_n f = (1 + ... + z**(n-1)) f(z**n) and the functions h_k.

    h_k(z) = log((1 - z**k) / (k (1 - z))) / (1 - z),   k >= 2,

whose Maclaurin coefficients are ``H_n - H_{floor(n/k)} - log k``. The
span of the h_k is W-invariant because ``W_j h_k = h_{jk} - h_j`` with
``h_1 = 0``. The RH trace solves the Gram system of a combination
``f = sum beta_k h_k`` against the normalized aleph ``(1 - z)/sqrt(2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .approx import (
    DEFAULT_TRUNCATION,
    ConvergenceTrace,
    TraceRow,
    _clamp_distance,
    build_gram,
    check_aleph,
    solve_approximant,
    solve_system,
)
from .errors import DegenerateTarget, KTooSmall, ValidationError, ZeroVector
from .monoids import NOOR, apply
from .series import CoefficientSeries, inner_product

SQRT2 = math.sqrt(2.0)
ALEPH = NOOR.aleph


@dataclass(frozen=True)
class HkSeries:
    k: int
    truncation: int
    series: CoefficientSeries = field(repr=False)


def hk_coefficients(k: int, D: int) -> HkSeries:
    """Coefficients ``c_0..c_D`` of h_k by a running sum.

    The bracket ``log(1 - z^k) - log(1 - z) - log k`` has coefficients
    ``a_0 = -log k`` and ``a_m = 1/m - (k/m) [k | m]``; dividing by ``1 - z``
    turns them into prefix sums.
    """
    if int(k) != k or k < 2:
        raise KTooSmall(f"h_k needs k >= 2, got {k}")
    if D < 0:
        raise ValidationError("truncation must be non-negative")
    m = np.arange(1, D + 1, dtype=np.float64)
    a = np.empty(D + 1, dtype=np.float64)
    a[0] = -math.log(k)
    a[1:] = 1.0 / m
    a[k::k] -= k / m[k - 1 :: k]
    return HkSeries(int(k), D, CoefficientSeries(np.cumsum(a)))


def hk_series(k: int, D: int) -> CoefficientSeries:
    """h_k truncated at ``D``; ``k = 1`` gives the zero series."""
    if k == 1:
        return CoefficientSeries(np.zeros(D + 1))
    return hk_coefficients(k, D).series


def hk_tail_bound(k: int, D: int) -> float:
    """Upper bound on ``sum_{n > D} |c_n|^2`` from ``|c_n| <= (k+1)/n``."""
    from scipy.special import polygamma

    # sum_{n > D} 1/n^2 = psi'(D + 1)
    return float((k + 1) ** 2 * polygamma(1, D + 1))


def combination(combo: Mapping[int, complex], D: int) -> CoefficientSeries:
    """``sum_k beta_k h_k`` truncated at ``D``."""
    if not combo:
        raise ValidationError("empty h_k combination")
    total = np.zeros(D + 1, dtype=np.complex128)
    for k, beta in sorted(combo.items()):
        total += complex(beta) * hk_coefficients(k, D).series.coeffs
    return CoefficientSeries(total)


def parse_combo(text: str) -> dict:
    """``"2:1.0,3:-0.5"`` -> ``{2: 1.0, 3: -0.5}``; betas may be complex."""
    from .series import _parse_complex

    out: dict = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            k_txt, beta_txt = part.split(":")
            k = int(k_txt)
        except ValueError:
            raise ValidationError(f"bad combination term {part!r}") from None
        out[k] = out.get(k, 0) + _parse_complex(beta_txt)
    if not out:
        raise ValidationError("empty h_k combination")
    return out


def verify_wj_hk_identity(j: int, k: int, D: int) -> float:
    """Max deviation between ``W_j h_k`` and ``h_{jk} - h_j``.

    ``h_k`` is cut at ``D``; ``W_j`` of it is exact up to ``z**(jD + j - 1)``
    and both sides are compared on that range.
    """
    if j < 1:
        raise ValidationError("j must be >= 1")
    lhs = apply(NOOR, j, hk_coefficients(k, D).series).coeffs
    top = j * D + j - 1
    rhs = hk_series(j * k, top).coeffs - hk_series(j, top).coeffs
    return float(np.max(np.abs(lhs[: top + 1] - rhs[: top + 1])))


def dyadic_residual(g: CoefficientSeries, K: int) -> float:
    """``max_{1<=k<=K} |2 g_k - g_{2k} - g_{2k+1}|``.

    Any vector orthogonal to every ``W_k (1 - z)`` has residual zero.
    """
    if len(g) < 2 * K + 2:
        raise ValidationError(f"need at least {2 * K + 2} coefficients, got {len(g)}")
    if K < 1:
        return 0.0
    c = g.coeffs
    k = np.arange(1, K + 1)
    return float(np.max(np.abs(2 * c[k] - c[2 * k] - c[2 * k + 1])))


@dataclass
class RHTrace:
    trace: ConvergenceTrace
    target: complex
    D: int
    generic_dist_sq: np.ndarray = field(repr=False)

    def header(self) -> dict:
        return {"target_re": self.target.real, "target_im": self.target.imag, "D": self.D}


def _rh_solve(f: CoefficientSeries, N_max: int):
    g = build_gram(NOOR, f, ALEPH, N_max)
    u_f = inner_product(ALEPH, f)
    # rhs exactly as (1/sqrt 2) (conj(f(0) - f'(0)), 0, ..., 0)
    shortcut_rhs = np.zeros(len(g.indices), dtype=np.complex128)
    shortcut_rhs[0] = (f[0] - f[1]).conjugate() / SQRT2
    rows = []
    for N in g.indices:
        sub = g.leading(N)
        c, cond, _ = solve_system(sub.gram, shortcut_rhs[: len(sub.indices)])
        dist = _clamp_distance(1.0 - float(np.real(c[0] * u_f.conjugate())), 1.0)
        generic = solve_approximant(sub, 1.0).dist_sq
        rows.append((N, dist, complex(c[0]), cond, generic))
    return g, rows


def rh_trace(combo: Mapping[int, complex], D: int = DEFAULT_TRUNCATION, N_max: int = 32) -> RHTrace:
    """Trace ``c_1^{(N)}`` for ``f = sum beta_k h_k`` and the value it would
    have to approach if ``f`` were W-cyclic, ``sqrt(2) / (f(0) - f'(0))``.

    Rows carry the aleph-shortcut distance; ``generic_dist_sq`` holds the
    full-solve distance for the same windows. Each row's truncation error is
    the change in distance between ``D`` and ``2D``.
    """
    f = combination(combo, D)
    if f.is_zero():
        raise ZeroVector("the h_k combination vanishes")
    gap = f[0] - f[1]
    if abs(gap) <= 1e-12:
        raise DegenerateTarget("f(0) = f'(0): f is orthogonal to the aleph 1 - z")
    check_aleph(NOOR, ALEPH, N_max)
    g, coarse = _rh_solve(f, N_max)
    _, fine = _rh_solve(combination(combo, 2 * D), N_max)
    rows = [
        TraceRow(N, d, c1, cond, NOOR.degree_bound(N, D), abs(d - fd))
        for (N, d, c1, cond, _), (_, fd, _, _, _) in zip(coarse, fine)
    ]
    return RHTrace(
        trace=ConvergenceTrace(rows),
        target=SQRT2 / gap,
        D=D,
        generic_dist_sq=np.array([r[4] for r in coarse]),
    )
