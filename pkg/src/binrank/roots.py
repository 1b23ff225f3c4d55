"""Projective roots of binary forms over C.

A root is a point ``(a, b)`` of P^1 with ``f(a, b) = 0``; the matching linear
factor is ``b*x - a*y``.  Roots are found by Aberth-Ehrlich iteration on the
dehomogenized polynomial ``f(x, 1)``, the missing degree is assigned to the
point at infinity ``(1, 0)`` (the factor y), and close roots are merged into
one root with multiplicity.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .forms import ZERO_RTOL, BinaryForm, LinearForm, norm

log = logging.getLogger(__name__)

# Fubini-Study distance under which roots are always merged
CLUSTER_TOL = 1e-7
# looser radius inside which a cluster is merged if it looks like a multiple root
LOOSE_CLUSTER_TOL = 1e-3
ABERTH_MAXITER = 200


@dataclass(frozen=True)
class ProjectiveRootSet:
    """Roots of a form over C, each with its multiplicity."""

    roots: tuple = field(default_factory=tuple)  # of (LinearForm, int)
    degenerate: bool = False

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.roots)

    @property
    def simple(self) -> bool:
        return not self.degenerate and all(m == 1 for _, m in self.roots)

    def points(self) -> np.ndarray:
        return np.array([[r.a, r.b] for r, _ in self.roots], dtype=complex).reshape(-1, 2)


def fubini_study(p, q) -> float:
    """Angle between the complex lines through ``p`` and ``q``."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    c = abs(np.vdot(p, q)) / (np.linalg.norm(p) * np.linalg.norm(q))
    return math.acos(min(1.0, c))


def is_real_point(p, tol: float = 1e-8) -> bool:
    """True when the projective point ``p`` has a real representative."""
    p = np.asarray(p, dtype=complex)
    p = p / np.linalg.norm(p)
    return abs((p[0] * np.conj(p[1])).imag) <= tol


def aberth(coeffs, maxiter: int = ABERTH_MAXITER, tol: float = 1e-15):
    """Simultaneous roots of ``sum(coeffs[i] * z**i)``.

    Returns ``(roots, converged)``.  ``coeffs`` is in ascending order and the
    leading coefficient must be nonzero.
    """
    p = np.asarray(coeffs, dtype=complex)
    n = p.size - 1
    if n < 1:
        return np.zeros(0, dtype=complex), True
    p = p / p[-1]
    if n == 1:
        return np.array([-p[0]]), True
    dp = p[1:] * np.arange(1, n + 1)
    # starting points on a circle of the Cauchy-like radius, rotated off axes
    radius = max(1e-3, np.max(np.abs(p[:-1])) ** (1.0 / n)) if np.any(p[:-1]) else 1.0
    radius = min(radius, 1.0 + np.max(np.abs(p[:-1])))
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    asc = p[::-1]
    dasc = dp[::-1]
    absp = np.abs(p)[::-1]
    converged = False
    for _ in range(maxiter):
        pz = np.polyval(asc, z)
        dz = np.polyval(dasc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        # backward error stopping rule
        bound = np.polyval(absp, np.abs(z))
        if np.all(np.abs(np.polyval(asc, z)) <= 8 * n * tol * bound) or np.all(
            np.abs(w) <= tol * np.maximum(np.abs(z), 1.0)
        ):
            converged = True
            break
    if not np.all(np.isfinite(z)):
        return z, False
    if converged:
        # per-root backward errors pass when a spurious point joins a multiple
        # root; the whole set must also rebuild the polynomial
        rebuilt = np.poly(z)
        converged = np.max(np.abs(rebuilt - p[::-1])) <= 1e-8 * max(1.0, np.max(np.abs(p)))
    return z, bool(converged)


def _cluster(points: np.ndarray, radius: float):
    """Single-linkage groups of rows of ``points`` under Fubini-Study ``radius``."""
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if fubini_study(points[i], points[j]) < radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _centroid(pts: np.ndarray) -> np.ndarray:
    # align phases to the first point before averaging
    ref = pts[0]
    aligned = [p * np.exp(-1j * np.angle(np.vdot(ref, p))) for p in pts]
    c = np.mean(aligned, axis=0)
    return c / np.linalg.norm(c)


def _derivative_residuals(c: np.ndarray, point: np.ndarray, m: int) -> np.ndarray:
    """Relative sizes of the directional derivatives of order < m at ``point``.

    Uses the direction orthogonal to ``point`` so that the test is chart free.
    """
    d = c.size - 1
    a, b = point
    u, w = -np.conj(b), np.conj(a)  # unit direction orthogonal to point
    # g(s) = f(point + s*(u, w)) as polynomial in s, via binomial expansion
    gs = np.zeros(d + 1, dtype=complex)
    for i in range(d + 1):
        if c[i] == 0:
            continue
        px = np.polynomial.polynomial.polypow([a, u], i)
        py = np.polynomial.polynomial.polypow([b, w], d - i)
        prod = np.polynomial.polynomial.polymul(px, py)
        gs[: prod.size] += c[i] * prod
    scale = np.linalg.norm(c)
    return np.abs(gs[:m]) / scale


def _merge(c: np.ndarray, pts: np.ndarray, mult: list):
    """Merge clustered roots into (point, multiplicity) pairs."""
    out = []
    for group in _cluster(pts, CLUSTER_TOL):
        sub = pts[group]
        out.append((_centroid(sub), sum(mult[i] for i in group)))
    if len(out) < 2:
        return out
    # second pass: looser radius, merged only when f vanishes to matching order
    pts2 = np.array([p for p, _ in out])
    mult2 = [m for _, m in out]
    final = []
    for group in _cluster(pts2, LOOSE_CLUSTER_TOL):
        if len(group) == 1:
            final.append(out[group[0]])
            continue
        m = sum(mult2[i] for i in group)
        cen = _centroid(pts2[group])
        res = _derivative_residuals(c, cen, m)
        # an m-fold root leaves derivatives of order j near eps^((m-j)/m)
        ok = all(res[j] <= 1e-6 ** ((m - j) / m) * 1e-2 for j in range(m))
        if ok:
            final.append((cen, m))
        else:
            final.extend(out[i] for i in group)
    return final


def _polish(c: np.ndarray, point: np.ndarray, mult: int = 1, iters: int = 4) -> np.ndarray:
    """Newton refinement in the chart where the root is bounded.

    An m-fold root is a simple root of the (m-1)-th derivative, which is
    where the iteration runs.
    """
    a, b = point
    if abs(b) >= abs(a):
        z = a / b
        p = c[::-1]  # f(z, 1), descending powers
    else:
        z = b / a
        p = c  # f(1, z), descending powers
    p = np.polyder(p, mult - 1) if mult > 1 else p
    dp = np.polyder(p)
    z0 = z
    for _ in range(iters):
        dv = np.polyval(dp, z)
        if dv == 0:
            break
        step = np.polyval(p, z) / dv
        if not np.isfinite(step):
            break
        z = z - step
    if abs(z - z0) > 1e-3 * max(1.0, abs(z0)):
        z = z0
    q = np.array([z, 1.0]) if abs(b) >= abs(a) else np.array([1.0, z])
    return q / np.linalg.norm(q)


def _canonical_point(p: np.ndarray) -> LinearForm:
    """Unit representative, real when the point is real, with a nonnegative lead."""
    p = np.asarray(p, dtype=complex)
    p = p / np.linalg.norm(p)
    k = 0 if abs(p[0]) >= abs(p[1]) else 1
    p = p * np.exp(-1j * np.angle(p[k]))
    if is_real_point(p, 1e-12):
        p = p.real.astype(complex)
        p = p / np.linalg.norm(p)
    a, b = p
    a = a.real if a.imag == 0 else a
    b = b.real if b.imag == 0 else b
    return LinearForm(a, b)


def _sort_key(p: LinearForm):
    a, b = complex(p.a), complex(p.b)
    return (not p.is_real, math.atan2(b.real, a.real) % math.pi, a.imag, b.imag)


def roots(f: BinaryForm, scale: float | None = None) -> ProjectiveRootSet:
    """All projective roots of ``f`` over C with multiplicities summing to d."""
    d = f.degree
    nf = norm(f)
    if nf <= ZERO_RTOL * max(1.0, scale if scale is not None else 1.0):
        return ProjectiveRootSet((), degenerate=True)
    if d == 0:
        return ProjectiveRootSet(())
    c = np.asarray(f.coeffs, dtype=complex) / np.max(np.abs(f.coeffs))
    small = 1e-14
    # leading zeros in x^d.. mean the factor y, i.e. the point (1, 0)
    top = d
    while top > 0 and abs(c[top]) <= small:
        top -= 1
    # trailing zeros in y^d.. mean the factor x, i.e. the point (0, 1)
    bottom = 0
    while bottom < top and abs(c[bottom]) <= small:
        bottom += 1
    inner = c[bottom : top + 1]
    pts, mult = [], []
    if inner.size > 1:
        z, ok = aberth(inner)
        if not ok:
            log.debug("aberth did not converge, using companion eigenvalues")
            z = np.roots(inner[::-1])
        for zi in z:
            pts.append(np.array([zi, 1.0]) / math.hypot(abs(zi), 1.0))
            mult.append(1)
    if d - top:
        pts.append(np.array([1.0, 0.0], dtype=complex))
        mult.append(d - top)
    if bottom:
        pts.append(np.array([0.0, 1.0], dtype=complex))
        mult.append(bottom)
    pts = np.array(pts, dtype=complex).reshape(-1, 2)
    merged = _merge(c, pts, mult)
    out = []
    for p, m in merged:
        p = _polish(c, p, m)
        out.append((_canonical_point(p), m))
    out.sort(key=lambda rm: _sort_key(rm[0]))
    return ProjectiveRootSet(tuple(out))
