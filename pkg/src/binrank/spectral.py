"""Spectral decomposition of a binary form over its critical rank-1 tensors."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .critical import (
    CriticalRankK,
    DegenerateCircle,
    DegenerateInput,
    eigen_pairs,
    singular_space,
)
from .forms import BinaryForm, LinearForm, binomials, bombieri_dot, circle_power, norm, power

SVD_CUTOFF = 1e-8


class MultipleRootsWarning(UserWarning):
    """D(f) has repeated roots; the eigenbasis may not span the singular space."""


class OddDegree(ValueError):
    pass


@dataclass(frozen=True)
class SpectralDecomposition:
    eigen: tuple  # CriticalRank1, in basis order
    basis: tuple  # v_i^d
    coeffs: np.ndarray
    residual: float  # |f - sum c_i v_i^d|
    rank: int  # numerical rank of the basis matrix
    simple: bool  # D(f) had d simple roots
    hyperplane_residual: float  # membership of f in H_f

    def reconstruct(self) -> BinaryForm:
        out = BinaryForm.zero(self.basis[0].degree, complex_=True)
        for c, b in zip(self.coeffs, self.basis):
            out = out + c * b
        return out


@dataclass(frozen=True)
class RezDecomposition:
    """``(x^2+y^2)^(d/2) = c_d * sum_k l_k^d`` over consecutive vertices of a (d+2)-gon."""

    d: int
    phi: float
    c_d: float
    summands: tuple  # LinearForm
    residual: float


def _lstsq(basis, target: BinaryForm):
    d = target.degree
    w = 1.0 / np.sqrt(binomials(d))
    B = np.array([b.coeffs for b in basis]).T * w[:, None]
    y = np.asarray(target.coeffs) * w
    coeffs, _, rank, sv = np.linalg.lstsq(B, y, rcond=SVD_CUTOFF)
    res = float(np.linalg.norm(y - B @ coeffs))
    return coeffs, res, int(rank)


def _eigenbasis(f: BinaryForm):
    pairs = eigen_pairs(f)
    if isinstance(pairs, DegenerateCircle):
        raise DegenerateInput("f is a multiple of (x^2+y^2)^(d/2); use rez() for its decomposition")
    simple = all(e.multiplicity == 1 for e in pairs)
    if not simple:
        warnings.warn("D(f) has multiple roots; the eigenbasis may be rank deficient",
                      MultipleRootsWarning, stacklevel=3)
    return pairs, simple


def spectral_decompose(f: BinaryForm) -> SpectralDecomposition:
    """Coefficients of f over its critical rank-1 tensors ``v_i^d``.

    The basis follows :func:`eigen_pairs` order (decreasing ``|lambda|``).
    The least-squares solve uses an SVD cutoff, so rank-deficient cases get
    the minimum-norm solution.
    """
    pairs, simple = _eigenbasis(f)
    d = f.degree
    basis = tuple(power(e.v, d) for e in pairs)
    coeffs, res, rank = _lstsq(basis, f)
    member = singular_space(f).membership(f)
    coeffs = _clean(coeffs)
    return SpectralDecomposition(tuple(pairs), basis, coeffs, res, rank, simple, member)


def express_in_eigenbasis(f: BinaryForm, g) -> tuple[np.ndarray, float]:
    """Least-squares coefficients of ``g`` over the critical rank-1 tensors of ``f``.

    ``g`` may be a form or a :class:`CriticalRankK`.  Returns the coefficients
    and the residual relative to ``|g|``.
    """
    if isinstance(g, CriticalRankK):
        g = g.tensor
    pairs, _ = _eigenbasis(f)
    basis = tuple(power(e.v, f.degree) for e in pairs)
    coeffs, res, _ = _lstsq(basis, g)
    ng = norm(g)
    return _clean(coeffs), (res / ng if ng > 0 else res)


def _clean(c: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(c) and not np.any(c.imag):
        return c.real
    return c


def rez(d: int, phi: float = 0.0) -> RezDecomposition:
    if d % 2 or d < 2:
        raise OddDegree(f"rez needs an even degree >= 2, got {d}")
    n = d // 2 + 1
    angles = 2 * np.pi * np.arange(n) / (d + 2) + phi
    summands = tuple(LinearForm(math.cos(a), math.sin(a)) for a in angles)
    F = circle_power(d)
    S = BinaryForm(np.sum([power(l, d).coeffs for l in summands], axis=0))
    c_d = bombieri_dot(F, F) / bombieri_dot(S, F)
    residual = norm(F - c_d * S)
    return RezDecomposition(d, float(phi), float(c_d), summands, residual)


__all__ = [
    "SpectralDecomposition",
    "RezDecomposition",
    "MultipleRootsWarning",
    "OddDegree",
    "spectral_decompose",
    "express_in_eigenbasis",
    "rez",
]
