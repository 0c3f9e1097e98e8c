"""Truncated Maclaurin coefficient vectors and the H^2 pairing.

A :class:`CoefficientSeries` is an immutable complex vector whose entry ``n``
is the coefficient of ``z**n``. Series of different lengths are compared and
combined as if zero padded.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from .errors import SpaceMismatch, ValidationError

Number = Union[int, float, complex]


class SpaceTag(str, enum.Enum):
    H2 = "H2"
    H2_ZERO = "H2_zero"


@dataclass(frozen=True, eq=False)
class CoefficientSeries:
    coeffs: np.ndarray
    space: SpaceTag = SpaceTag.H2

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        if not np.all(np.isfinite(arr)):
            raise ValidationError("series coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "space", SpaceTag(self.space))
        if self.space is SpaceTag.H2_ZERO and arr.size and arr[0] != 0:
            raise SpaceMismatch(
                f"H2_zero series needs a zero constant term, got {arr[0]}"
            )

    @classmethod
    def from_coeffs(cls, values: Iterable[Number], space=SpaceTag.H2):
        return cls(np.asarray(list(values), dtype=np.complex128), space)

    @classmethod
    def zero(cls, space=SpaceTag.H2) -> "CoefficientSeries":
        return cls(np.zeros(0, dtype=np.complex128), space)

    @classmethod
    def monomial(cls, n: int, c: Number = 1.0, space=SpaceTag.H2):
        arr = np.zeros(n + 1, dtype=np.complex128)
        arr[n] = c
        return cls(arr, space)

    def __len__(self) -> int:
        return self.coeffs.size

    def __getitem__(self, n: int) -> complex:
        if n < 0:
            raise IndexError("negative coefficient index")
        return complex(self.coeffs[n]) if n < self.coeffs.size else 0j

    def degree(self) -> Optional[int]:
        """Largest index carrying a nonzero coefficient; ``None`` for the zero series."""
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else None

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def padded(self, length: int) -> np.ndarray:
        """Exactly ``length`` coefficients: zero filled or cut."""
        out = np.zeros(length, dtype=np.complex128)
        n = min(length, self.coeffs.size)
        out[:n] = self.coeffs[:n]
        return out

    def truncate(self, max_degree: int) -> "CoefficientSeries":
        return CoefficientSeries(self.coeffs[: max_degree + 1], self.space)

    def trimmed(self) -> "CoefficientSeries":
        deg = self.degree()
        return CoefficientSeries(self.coeffs[: 0 if deg is None else deg + 1], self.space)

    def in_space(self, space) -> "CoefficientSeries":
        return CoefficientSeries(self.coeffs, space)

    def allclose(self, other: "CoefficientSeries", atol: float = 1e-10) -> bool:
        n = max(len(self), len(other))
        return bool(np.all(np.abs(self.padded(n) - other.padded(n)) <= atol))

    def __eq__(self, other):
        if not isinstance(other, CoefficientSeries):
            return NotImplemented
        n = max(len(self), len(other))
        return bool(np.array_equal(self.padded(n), other.padded(n)))

    __hash__ = None

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(-1.0, other))

    def __neg__(self):
        return scale(-1.0, self)

    def __rmul__(self, c):
        return scale(c, self)

    def __repr__(self):
        return f"CoefficientSeries({format_series(self)!r}, {self.space.value})"


def _joint_space(a: CoefficientSeries, b: CoefficientSeries) -> SpaceTag:
    if a.space is SpaceTag.H2_ZERO and b.space is SpaceTag.H2_ZERO:
        return SpaceTag.H2_ZERO
    return SpaceTag.H2


def add(a: CoefficientSeries, b: CoefficientSeries) -> CoefficientSeries:
    n = max(len(a), len(b))
    return CoefficientSeries(a.padded(n) + b.padded(n), _joint_space(a, b))


def scale(c: Number, a: CoefficientSeries) -> CoefficientSeries:
    return CoefficientSeries(complex(c) * a.coeffs, a.space)


def _vdot(a: np.ndarray, b: np.ndarray) -> complex:
    # Real dot products only: keeps <a,b> == conj(<b,a>) bit for bit.
    n = min(a.size, b.size)
    if n == 0:
        return 0j
    a, b = a[:n], b[:n]
    ar, ai, br, bi = a.real, a.imag, b.real, b.imag
    re = float(np.dot(ar, br)) + float(np.dot(ai, bi))
    im = float(np.dot(ai, br)) - float(np.dot(ar, bi))
    return complex(re, im)


def inner_product(a: CoefficientSeries, b: CoefficientSeries) -> complex:
    """``sum_n a_n * conj(b_n)``, linear in the first slot."""
    return _vdot(a.coeffs, b.coeffs)


def norm_sq(a: CoefficientSeries) -> float:
    return inner_product(a, a).real


def cauchy_product(
    a: CoefficientSeries, b: CoefficientSeries, max_degree: int
) -> CoefficientSeries:
    """Coefficient convolution of ``a`` and ``b`` kept up to ``z**max_degree``."""
    if max_degree < 0:
        raise ValidationError("max_degree must be non-negative")
    space = SpaceTag.H2_ZERO if SpaceTag.H2_ZERO in (a.space, b.space) else SpaceTag.H2
    if len(a) == 0 or len(b) == 0:
        return CoefficientSeries.zero(space)
    aa = a.coeffs[: max_degree + 1]
    bb = b.coeffs[: max_degree + 1]
    return CoefficientSeries(np.convolve(aa, bb)[: max_degree + 1], space)


# --- literals -------------------------------------------------------------

def _parse_complex(token: str) -> complex:
    t = token.strip().replace(" ", "")
    if not t:
        raise ValidationError("empty coefficient in series literal")
    t = t.replace("I", "i").replace("J", "j").replace("i", "j")
    try:
        value = complex(t)
    except ValueError:
        raise ValidationError(f"cannot parse coefficient {token!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValidationError(f"non-finite coefficient {token!r}")
    return value


def parse_series(text: str, space=SpaceTag.H2) -> CoefficientSeries:
    """Parse ``"c0,c1,c2,..."`` where each entry may be complex, e.g. ``"1-2.5i"``."""
    text = text.strip()
    if not text:
        return CoefficientSeries.zero(space)
    return CoefficientSeries.from_coeffs(
        (_parse_complex(tok) for tok in text.split(",")), space
    )


def _fmt_real(x: float) -> str:
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def format_complex(c: complex) -> str:
    re, im = float(c.real), float(c.imag)
    if im == 0.0:
        return _fmt_real(re)
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    if re == 0.0:
        return ("-" if sign == "-" else "") + _fmt_real(abs(im)) + "i"
    return f"{_fmt_real(re)}{sign}{_fmt_real(abs(im))}i"


def format_series(a: CoefficientSeries) -> str:
    return ",".join(format_complex(c) for c in a.coeffs)
