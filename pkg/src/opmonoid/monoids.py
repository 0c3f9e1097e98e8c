"""Integer-indexed forward operator monoids acting on coefficient vectors.

Four instances are provided:

``shift``      T_j f = z**j f                    (additive, identity 0, on H^2)
``dilation``   T_n f = f(z**n)                   (multiplicative, identity 1, on H^2_0)
``noor``       W_n f = (1 + ... + z**(n-1)) f(z**n)  (multiplicative, identity 1, on H^2)
``scalar(a)``  A^j f = a**j f                    (additive, identity 0, on H^2)

Each monoid stores the index operation and the identity index so that the
least-squares machinery in :mod:`opmonoid.approx` can treat them uniformly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import IndexOverflow, SpaceMismatch, ValidationError
from .series import CoefficientSeries, SpaceTag

MAX_INDEX = 2**64 - 1


@dataclass(frozen=True)
class MonoidSpec:
    """A forward operator monoid indexed by ``n0, n0 + 1, ...``.

    ``action(j, coeffs)`` returns the untruncated image of a coefficient
    vector and ``degree_bound(j, d)`` the degree of that image for an input
    of degree ``d``.
    """

    name: str
    n0: int
    index_op: Callable[[int, int], int] = field(repr=False)
    action: Callable[[int, np.ndarray], np.ndarray] = field(repr=False)
    degree_bound: Callable[[int, int], int] = field(repr=False)
    space: SpaceTag = SpaceTag.H2
    aleph: Optional[CoefficientSeries] = field(default=None, repr=False)

    def compose(self, j: int, k: int) -> int:
        self.check_index(j)
        self.check_index(k)
        out = self.index_op(j, k)
        if out > MAX_INDEX:
            raise IndexOverflow(f"{self.name}: b({j}, {k}) exceeds {MAX_INDEX}")
        return out

    def check_index(self, j: int) -> None:
        if int(j) != j or j < self.n0:
            raise ValidationError(f"{self.name}: index {j} is below n0={self.n0}")
        if j > MAX_INDEX:
            raise IndexOverflow(f"{self.name}: index {j} exceeds {MAX_INDEX}")

    def window(self, N: int) -> list[int]:
        """Indices ``n0..N`` in order."""
        self.check_index(N)
        return list(range(self.n0, N + 1))


def _shift_action(j, c):
    return np.concatenate([np.zeros(j, dtype=np.complex128), c]) if c.size else c


def _dilation_action(n, c):
    if c.size == 0:
        return c
    out = np.zeros(n * (c.size - 1) + 1, dtype=np.complex128)
    out[::n] = c
    return out


def _noor_action(n, c):
    # (1 + z + ... + z^(n-1)) f(z^n) has coefficient f_{floor(m/n)} at z^m:
    # each window of n consecutive indices holds exactly one multiple of n.
    return np.repeat(c, n)


SHIFT = MonoidSpec(
    name="shift",
    n0=0,
    index_op=lambda j, k: j + k,
    action=_shift_action,
    degree_bound=lambda j, d: j + d,
    space=SpaceTag.H2,
    aleph=CoefficientSeries.from_coeffs([1.0]),
)

DILATION = MonoidSpec(
    name="dilation",
    n0=1,
    index_op=lambda j, k: j * k,
    action=_dilation_action,
    degree_bound=lambda j, d: j * d,
    space=SpaceTag.H2_ZERO,
    aleph=CoefficientSeries.from_coeffs([0.0, 1.0], SpaceTag.H2_ZERO),
)

NOOR = MonoidSpec(
    name="noor",
    n0=1,
    index_op=lambda j, k: j * k,
    action=_noor_action,
    degree_bound=lambda j, d: j * d + j - 1,
    space=SpaceTag.H2,
    aleph=CoefficientSeries.from_coeffs([1 / math.sqrt(2), -1 / math.sqrt(2)]),
)


def is_root_of_unity(alpha: complex, max_order: int = 10_000, tol: float = 1e-12) -> bool:
    if abs(abs(alpha) - 1.0) > tol:
        return False
    turns = (math.atan2(alpha.imag, alpha.real) / (2 * math.pi)) % 1.0
    frac = Fraction(turns).limit_denominator(max_order)
    return abs(float(frac) - turns) <= tol


def scalar(alpha: complex) -> MonoidSpec:
    """The monoid ``{(alpha I)^j}``; ``alpha`` must be nonzero and not a root of unity."""
    alpha = complex(alpha)
    if alpha == 0:
        raise ValidationError("scalar monoid needs alpha != 0")
    if is_root_of_unity(alpha):
        raise ValidationError(f"scalar monoid: {alpha} is a root of unity")
    return MonoidSpec(
        name=f"scalar({alpha})",
        n0=0,
        index_op=lambda j, k: j + k,
        action=lambda j, c: (alpha**j) * c,
        degree_bound=lambda j, d: d,
        space=SpaceTag.H2,
        aleph=None,
    )


def get_monoid(selector: str) -> MonoidSpec:
    """Resolve a selector: ``shift``, ``dilation``, ``noor`` or ``scalar:RE,IM``."""
    sel = selector.strip().lower()
    builtin = {"shift": SHIFT, "dilation": DILATION, "noor": NOOR}
    if sel in builtin:
        return builtin[sel]
    if sel.startswith("scalar:"):
        parts = sel[len("scalar:"):].split(",")
        try:
            re = float(parts[0])
            im = float(parts[1]) if len(parts) > 1 else 0.0
        except (ValueError, IndexError):
            raise ValidationError(f"bad scalar selector {selector!r}") from None
        if len(parts) > 2:
            raise ValidationError(f"bad scalar selector {selector!r}")
        return scalar(complex(re, im))
    raise ValidationError(f"unknown monoid {selector!r}")


def coerce_space(m: MonoidSpec, h: CoefficientSeries) -> CoefficientSeries:
    """Check ``h`` is admissible for ``m`` and retag it if needed."""
    if m.space is SpaceTag.H2_ZERO and h.space is not SpaceTag.H2_ZERO:
        if len(h) and h.coeffs[0] != 0:
            raise SpaceMismatch(
                f"{m.name} acts on H2_zero; constant term is {h.coeffs[0]}"
            )
        return h.in_space(SpaceTag.H2_ZERO)
    return h


def exact_degree_bound(m: MonoidSpec, j: int, input_degree: int) -> int:
    """Smallest truncation degree at which ``apply(m, j, h)`` loses nothing."""
    m.check_index(j)
    return m.degree_bound(j, input_degree)


def apply(
    m: MonoidSpec, j: int, h: CoefficientSeries, max_degree: Optional[int] = None
) -> CoefficientSeries:
    """The image ``T_j h`` kept up to ``z**max_degree`` (exact when omitted)."""
    m.check_index(j)
    h = coerce_space(m, h)
    out = m.action(j, h.coeffs)
    if max_degree is not None:
        if max_degree < 0:
            raise ValidationError("max_degree must be non-negative")
        out = out[: max_degree + 1]
    space = h.space if m is SHIFT else m.space
    return CoefficientSeries(out, space)


@dataclass(frozen=True)
class ForwardReport:
    monoid: str
    max_index: int
    passed: bool
    checks: int
    counterexample: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "monoid": self.monoid,
            "max_index": self.max_index,
            "passed": self.passed,
            "checks": self.checks,
            "counterexample": self.counterexample,
        }


def verify_forward_properties(
    m: MonoidSpec, max_index: int, probe: CoefficientSeries, tol: float = 1e-12
) -> ForwardReport:
    """Check the composition law and the forward properties on a probe vector.

    Composition is compared componentwise at exact truncation. Distinctness
    uses ``T_j probe != probe`` for every ``j != n0`` as a witness that no
    non-identity element collapses onto the identity.
    """
    if max_index < m.n0:
        raise ValidationError(f"max_index must be >= {m.n0}")
    probe = coerce_space(m, probe)
    idx = m.window(max_index)
    checks = 1

    def fail(msg):
        return ForwardReport(m.name, max_index, False, checks, msg)

    if not apply(m, m.n0, probe).allclose(probe, atol=tol):
        return fail(f"T_{m.n0} is not the identity on the probe")

    for j in idx:
        for k in idx:
            b = m.compose(j, k)
            checks += 1
            if b != m.compose(k, j):
                return fail(f"b({j},{k}) != b({k},{j})")
            if (b == m.n0) != (j == m.n0 and k == m.n0):
                return fail(f"b({j},{k}) = {b} breaks the first forward property")
            if (b == k) != (j == m.n0):
                return fail(f"b({j},{k}) = {b} breaks the second forward property")
            lhs = apply(m, j, apply(m, k, probe))
            rhs = apply(m, b, probe)
            if not lhs.allclose(rhs, atol=tol):
                return fail(f"T_{j} T_{k} probe != T_{b} probe")
    if not probe.is_zero():
        for j in idx:
            if j == m.n0:
                continue
            checks += 1
            if apply(m, j, probe).allclose(probe, atol=tol):
                return fail(f"T_{j} probe == probe")
    return ForwardReport(m.name, max_index, True, checks)
