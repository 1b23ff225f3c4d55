"""Binary forms, the Bombieri scalar product and the rotation operator D.

A binary form of degree d is stored by its plain monomial coefficients
``c_0..c_d`` so that ``f = sum(c_i * x**i * y**(d - i))``.  The scalar
product is the SO(2)-invariant one for which ``<l^d, m^d> = <l, m>^d``;
in Bombieri coordinates ``a_i = c_i / binom(d, i)`` it reads
``sum(binom(d, i) * a_i * b_i)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "BinaryForm",
    "LinearForm",
    "DegreeMismatch",
    "LengthMismatch",
    "ZERO_RTOL",
    "binomials",
    "bombieri_dot",
    "norm",
    "split_dot",
    "apply_D",
    "perp",
    "power",
    "contract",
    "circle_power",
    "product",
]

# relative threshold under which a form counts as zero
ZERO_RTOL = 1e-13


class DegreeMismatch(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


@lru_cache(maxsize=None)
def _binomials(d: int) -> np.ndarray:
    out = np.array([math.comb(d, i) for i in range(d + 1)], dtype=float)
    out.setflags(write=False)
    return out


def binomials(d: int) -> np.ndarray:
    """Row ``d`` of Pascal's triangle as a read-only float array."""
    return _binomials(int(d))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BinaryForm:
    """Homogeneous polynomial in ``x, y`` with coefficients ``c_i`` of ``x^i y^(d-i)``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-D sequence")
        if np.iscomplexobj(c):
            c = c.astype(complex)
            if not np.any(c.imag):
                c = c.real.copy()
        else:
            c = c.astype(float)
        object.__setattr__(self, "coeffs", _freeze(c))

    # construction -------------------------------------------------------

    @classmethod
    def from_bombieri(cls, a) -> "BinaryForm":
        a = np.asarray(a)
        return cls(a * binomials(a.size - 1))

    @classmethod
    def zero(cls, d: int, complex_: bool = False) -> "BinaryForm":
        return cls(np.zeros(d + 1, dtype=complex if complex_ else float))

    @classmethod
    def monomial(cls, i: int, d: int) -> "BinaryForm":
        c = np.zeros(d + 1)
        c[i] = 1.0
        return cls(c)

    # basic attributes ---------------------------------------------------

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.coeffs)

    @property
    def field(self) -> str:
        return "complex" if self.is_complex else "real"

    @property
    def bombieri(self) -> np.ndarray:
        return self.coeffs / binomials(self.degree)

    def norm(self) -> float:
        return norm(self)

    def is_zero(self, scale: float = 1.0) -> bool:
        return self.norm() <= ZERO_RTOL * max(1.0, scale)

    def __call__(self, x, y):
        """Evaluate at the point ``(x, y)``."""
        d = self.degree
        i = np.arange(d + 1)
        return np.sum(self.coeffs * np.power(x, i) * np.power(y, d - i))

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, BinaryForm):
            return NotImplemented
        if other.degree != self.degree:
            raise DegreeMismatch(f"degrees {self.degree} and {other.degree}")
        return BinaryForm(self.coeffs + other.coeffs)

    def __sub__(self, other):
        if not isinstance(other, BinaryForm):
            return NotImplemented
        if other.degree != self.degree:
            raise DegreeMismatch(f"degrees {self.degree} and {other.degree}")
        return BinaryForm(self.coeffs - other.coeffs)

    def __neg__(self):
        return BinaryForm(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, BinaryForm):
            return BinaryForm(np.convolve(self.coeffs, other.coeffs))
        if isinstance(other, LinearForm):
            return self * other.as_form()
        if np.isscalar(other):
            return BinaryForm(self.coeffs * other)
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return BinaryForm(self.coeffs * other)
        return NotImplemented

    def __truediv__(self, other):
        if np.isscalar(other):
            return BinaryForm(self.coeffs / other)
        return NotImplemented

    def __pow__(self, n: int):
        out = BinaryForm(np.ones(1))
        for _ in range(int(n)):
            out = out * self
        return out

    def allclose(self, other: "BinaryForm", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        if other.degree != self.degree:
            return False
        scale = max(self.norm(), other.norm())
        return norm(self - other) <= atol + rtol * scale

    def __repr__(self):
        return f"BinaryForm({np.array2string(self.coeffs, precision=6)})"


@dataclass(frozen=True)
class LinearForm:
    """The linear form ``a*x + b*y``, also read as the vector ``(a, b)``."""

    a: complex
    b: complex

    def __post_init__(self):
        for name in ("a", "b"):
            val = getattr(self, name)
            if isinstance(val, (complex, np.complexfloating)) and val.imag == 0:
                val = float(val.real)
            elif isinstance(val, (int, np.integer, np.floating)):
                val = float(val)
            object.__setattr__(self, name, val)

    @classmethod
    def from_array(cls, v) -> "LinearForm":
        v = np.asarray(v)
        return cls(v[0].item(), v[1].item())

    @classmethod
    def from_angle(cls, theta: float) -> "LinearForm":
        return cls(math.cos(theta), math.sin(theta))

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b])

    def as_form(self) -> BinaryForm:
        # c_0 multiplies y, c_1 multiplies x
        return BinaryForm(np.array([self.b, self.a]))

    @property
    def is_real(self) -> bool:
        return not (isinstance(self.a, complex) or isinstance(self.b, complex))

    def norm2(self) -> float:
        return abs(self.a) ** 2 + abs(self.b) ** 2

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    @property
    def is_unit(self) -> bool:
        return abs(self.norm() - 1.0) <= 1e-12

    def dot(self, other: "LinearForm", hermitian: bool = False):
        if hermitian:
            return self.a * np.conj(other.a) + self.b * np.conj(other.b)
        return self.a * other.a + self.b * other.b

    def normalized(self) -> "LinearForm":
        n = self.norm()
        return LinearForm(self.a / n, self.b / n)

    def __neg__(self):
        return LinearForm(-self.a, -self.b)

    def __mul__(self, other):
        if np.isscalar(other):
            return LinearForm(self.a * other, self.b * other)
        if isinstance(other, (LinearForm, BinaryForm)):
            return self.as_form() * other
        return NotImplemented

    __rmul__ = __mul__


def _check_degrees(f: BinaryForm, g: BinaryForm) -> int:
    if f.degree != g.degree:
        raise DegreeMismatch(f"degrees {f.degree} and {g.degree}")
    return f.degree


def bombieri_dot(f: BinaryForm, g: BinaryForm, hermitian: bool = True):
    """Scalar product ``sum(binom(d, i) a_i conj(b_i))`` in Bombieri coordinates.

    With ``hermitian=False`` the second argument is not conjugated, which is
    the bilinear pairing used by criticality certificates over C.
    """
    d = _check_degrees(f, g)
    other = np.conj(g.coeffs) if hermitian else g.coeffs
    val = np.sum(f.coeffs * other / binomials(d))
    if not np.iscomplexobj(val) or (hermitian and f is g):
        return float(np.real(val))
    return complex(val)


def norm(f: BinaryForm) -> float:
    c = f.coeffs
    return math.sqrt(float(np.sum(np.abs(c) ** 2 / binomials(f.degree))))


def split_dot(ls, ms, hermitian: bool = True):
    """Scalar product of two split forms via the permanent of ``<l_i, m_j>``.

    Equals ``bombieri_dot(prod(ls), prod(ms))``; exponential in ``len(ls)``.
    """
    ls, ms = list(ls), list(ms)
    if len(ls) != len(ms):
        raise LengthMismatch(f"{len(ls)} and {len(ms)} linear factors")
    d = len(ls)
    if d == 0:
        raise LengthMismatch("empty factor lists")
    gram = np.array([[l.dot(m, hermitian) for m in ms] for l in ls])
    total = 0
    for sigma in itertools.permutations(range(d)):
        total += np.prod(gram[np.arange(d), sigma])
    val = total / math.factorial(d)
    return complex(val) if np.iscomplexobj(val) else float(val)


def apply_D(f: BinaryForm) -> BinaryForm:
    """``D(f) = y f_x - x f_y``, the infinitesimal rotation; preserves degree."""
    d = f.degree
    c = f.coeffs
    out = np.zeros_like(c)
    if d == 0:
        return BinaryForm(out)
    i = np.arange(d + 1)
    # y * i x^(i-1) y^(d-i) lands on index i-1
    out[:-1] += i[1:] * c[1:]
    # -x * (d-i) x^i y^(d-i-1) lands on index i+1
    out[1:] -= (d - i[:-1]) * c[:-1]
    return BinaryForm(out)


def perp(l: LinearForm) -> LinearForm:
    """``l^perp = D(l) = -b x + a y``."""
    return LinearForm(-l.b, l.a)


def power(l: LinearForm, d: int) -> BinaryForm:
    """The rank one form ``l^d``; coefficient i is ``binom(d, i) a^i b^(d-i)``."""
    i = np.arange(d + 1)
    return BinaryForm(binomials(d) * np.power(l.a, i) * np.power(l.b, d - i))


def product(forms) -> BinaryForm:
    out = BinaryForm(np.ones(1))
    for g in forms:
        out = out * g
    return out


def contract(f: BinaryForm, v: LinearForm) -> LinearForm:
    """The vector ``f . v^(d-1)``, i.e. the w* with ``<w*, w> = <f, v^(d-1) w>``.

    The pairing is bilinear, so this is ``grad f(v) / d``.
    """
    d = f.degree
    if d == 0:
        return LinearForm(0.0, 0.0)
    fx = BinaryForm(np.arange(1, d + 1) * f.coeffs[1:])
    fy = BinaryForm(np.arange(d, 0, -1) * f.coeffs[:-1])
    gx = fx(v.a, v.b) / d
    gy = fy(v.a, v.b) / d
    return LinearForm(gx.item(), gy.item())


def circle_power(d: int) -> BinaryForm:
    """``(x^2 + y^2)^(d/2)`` for even d."""
    if d % 2:
        raise ValueError("circle_power needs an even degree")
    return BinaryForm(np.array([1.0, 0.0, 1.0])) ** (d // 2)
