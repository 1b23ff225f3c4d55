"""Critical rank-1 and rank-k tensors of a binary form.

A rank-k tensor ``g = sum(mu_i * l_i^d)`` is critical for ``f`` when ``f - g``
is orthogonal to the tangent space at ``g``; for distinct ``l_i`` this holds
exactly when ``f - g = h * prod((l_i^perp)^2)`` for some form ``h`` of degree
``d - 2k``.  That identity doubles as a checkable certificate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import solver
from .forms import (
    ZERO_RTOL,
    BinaryForm,
    LinearForm,
    apply_D,
    binomials,
    bombieri_dot,
    circle_power,
    contract,
    norm,
    perp,
    power,
    product,
)
from .roots import fubini_study, is_real_point, roots

log = logging.getLogger(__name__)

GRAD_RTOL = 1e-8
CERT_RTOL = 1e-8
DEDUP_RTOL = 1e-6
COLLAPSE_TOL = 1e-6
REAL_RTOL = 1e-8
NEWTON_TOL = 1e-10
CHUNK = 100


class ZeroForm(ValueError):
    pass


class DegenerateInput(ValueError):
    """The input is a multiple of ``(x^2 + y^2)^(d/2)``."""


class CollapsedDirections(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    """The search ended below the known critical count; ``partial`` holds what was found."""

    def __init__(self, message, partial, expected):
        super().__init__(message)
        self.partial = partial
        self.expected = expected


@dataclass(frozen=True)
class SearchBudget:
    starts: int | None = None  # defaults to 200 * k
    max_newton_iters: int = 100
    seed: int = 0

    def n_starts(self, k: int) -> int:
        return int(self.starts) if self.starts else 200 * k


@dataclass(frozen=True)
class DegenerateCircle:
    """``f = c (x^2 + y^2)^(d/2)``: every unit vector is an eigenvector with eigenvalue c."""

    degree: int
    eigenvalue: float


@dataclass(frozen=True)
class CriticalRank1:
    v: LinearForm
    lam: complex
    multiplicity: int
    is_real: bool

    def tensor(self, d: int) -> BinaryForm:
        return self.lam * power(self.v, d)


@dataclass(frozen=True)
class Hyperplane:
    normal: BinaryForm
    degenerate: bool

    def membership(self, g: BinaryForm) -> float:
        """``|<g, D(f)>| / (|g| |D(f)|)``; zero for the whole space when degenerate."""
        if self.degenerate:
            return 0.0
        ng = norm(g)
        if ng == 0:
            return 0.0
        return abs(bombieri_dot(g, self.normal, hermitian=False)) / (ng * norm(self.normal))


@dataclass(frozen=True)
class CriticalRankK:
    k: int
    summands: tuple  # of (mu, LinearForm)
    cofactor: BinaryForm
    distance: float
    grad_residual: float
    cert_residual: float
    is_real: bool
    boundary: bool = False
    # for boundary points: (nu, l) giving the extra term nu * l^(d-1) * l^perp,
    # where l is the direction of the first summand
    tangent: tuple | None = None
    real_summands: bool = False
    cluster_size: int = 1
    degree: int = field(default=0, repr=False)

    @property
    def tensor(self) -> BinaryForm:
        d = self.degree
        g = BinaryForm.zero(d, complex_=True)
        for mu, l in self.summands:
            g = g + mu * power(l, d)
        if self.tangent is not None:
            nu, l = self.tangent
            g = g + nu * (power(l, d - 1) * perp(l))
        if self.is_real:
            g = BinaryForm(np.real(g.coeffs))
        return g


# ---------------------------------------------------------------------------
# rank one


def _check_nonzero(f: BinaryForm) -> float:
    nf = norm(f)
    if nf <= ZERO_RTOL:
        raise ZeroForm("the form is zero")
    return nf


def is_circle_multiple(f: BinaryForm) -> bool:
    nf = norm(f)
    return f.degree % 2 == 0 and norm(apply_D(f)) <= ZERO_RTOL * max(1.0, nf)


def _sign_key(p: np.ndarray):
    return tuple(np.round([p[0].real, p[1].real, p[0].imag, p[1].imag], 12))


def unit_direction(p) -> tuple[LinearForm, complex]:
    """A unit representative ``u`` of the point ``p`` and ``s`` with ``p = s u``.

    Real points get a real unit vector; complex points are normalized with the
    bilinear form (``u.u = 1``) unless isotropic.  The sign is fixed so that
    ``u`` is lexicographically largest in (Re a, Re b, Im a, Im b).
    """
    p = np.asarray(p, dtype=complex)
    big = 0 if abs(p[0]) >= abs(p[1]) else 1
    if is_real_point(p, 1e-10):
        q = p * np.exp(-1j * np.angle(p[big]))
        u = q.real / np.linalg.norm(q.real)
        u = u.astype(complex)
    else:
        sq = p[0] ** 2 + p[1] ** 2
        if abs(sq) > 1e-10 * np.vdot(p, p).real:
            u = p / np.sqrt(sq)
        else:
            u = p / np.linalg.norm(p)
    if _sign_key(-u) > _sign_key(u):
        u = -u
    s = p[big] / u[big]
    a, b = u
    if is_real_point(u, 0.0) and abs(a.imag) == 0 and abs(b.imag) == 0:
        return LinearForm(float(a.real), float(b.real)), s
    return LinearForm(complex(a), complex(b)), s


def _eigen_sort_key(e: CriticalRank1):
    a = complex(e.v.a)
    b = complex(e.v.b)
    return (-round(abs(e.lam), 9), not e.is_real, math.atan2(b.real, a.real) % math.pi, a.imag, b.imag)


def eigen_pairs(f: BinaryForm):
    """Eigenvectors and eigenvalues of ``f``, or a :class:`DegenerateCircle`.

    The eigenvectors are the roots of ``D(f)`` as points of P^1 (the linear
    factor of ``D(f)`` at a root v is ``v^perp``), with eigenvalue ``f(v)``.
    Sorted by decreasing ``|lambda|``, real ones first, then by angle.
    """
    _check_nonzero(f)
    d = f.degree
    if d < 1:
        raise ValueError("eigenvectors need degree >= 1")
    if is_circle_multiple(f):
        F = circle_power(d)
        c = bombieri_dot(f, F) / bombieri_dot(F, F)
        return DegenerateCircle(d, c)
    out = []
    for p, m in roots(apply_D(f)):
        v, _ = unit_direction(p.as_array())
        lam = complex(f(v.a, v.b))
        real = v.is_real and not f.is_complex
        if real:
            lam = lam.real
        out.append(CriticalRank1(v, lam, m, real))
    out.sort(key=_eigen_sort_key)
    return out


def critical_rank_one(f: BinaryForm):
    """The tensors ``lambda v^d`` with multiplicities, or a DegenerateCircle."""
    pairs = eigen_pairs(f)
    if isinstance(pairs, DegenerateCircle):
        return pairs
    return [(e.lam, e.tensor(f.degree), e.multiplicity) for e in pairs]


def singular_space(f: BinaryForm) -> Hyperplane:
    _check_nonzero(f)
    return Hyperplane(apply_D(f), is_circle_multiple(f))


# ---------------------------------------------------------------------------
# certificates


def _bombieri_lstsq(M: np.ndarray, r: np.ndarray, d: int):
    w = 1.0 / np.sqrt(binomials(d))
    x, *_ = np.linalg.lstsq(M * w[:, None], r * w, rcond=None)
    res = r - M @ x
    return x, math.sqrt(float(np.sum(np.abs(res * w) ** 2)))


def _normal_factor(dirs, tangent_dir=None) -> BinaryForm:
    factors = [perp(l) for l in dirs for _ in range(2)]
    if tangent_dir is not None:
        factors += [perp(tangent_dir)] * 4
    return product(factors)


def _check_distinct(dirs):
    for i in range(len(dirs)):
        for j in range(i + 1, len(dirs)):
            if fubini_study(dirs[i].as_array(), dirs[j].as_array()) <= COLLAPSE_TOL:
                raise CollapsedDirections(f"directions {i} and {j} coincide")


def certify(f: BinaryForm, summands, tangent=None):
    """Cofactor ``h`` and relative residual of ``f = g + h * prod((l_i^perp)^2)``.

    ``summands`` is a sequence of ``(mu, l)``.  With ``tangent = (nu, l)`` the
    candidate is the boundary point ``g + nu l^(d-1) l^perp`` and the normal
    factor for that direction is ``(l^perp)^4``; ``l`` must then be the
    direction of ``summands[0]``, which is excluded from the squared factors.
    """
    d = f.degree
    summands = list(summands)
    dirs = [l for _, l in summands]
    k = len(summands) + (1 if tangent is not None else 0)
    if 2 * k > d:
        raise ValueError(f"rank {k} needs degree >= {2 * k}")
    g = BinaryForm.zero(d, complex_=True)
    for mu, l in summands:
        g = g + mu * power(l, d)
    if tangent is not None:
        nu, l0 = tangent
        g = g + nu * (power(l0, d - 1) * perp(l0))
        rest = dirs[1:] if dirs and fubini_study(dirs[0].as_array(), l0.as_array()) <= COLLAPSE_TOL else dirs
        _check_distinct([l0] + rest)
        P = _normal_factor(rest, l0)
    else:
        _check_distinct(dirs)
        P = _normal_factor(dirs)
    m = d - P.degree + 1
    M = solver.shifts(np.asarray(P.coeffs, dtype=complex), m)
    r = np.asarray((f - g).coeffs, dtype=complex)
    h, res = _bombieri_lstsq(M, r, d)
    if not (f.is_complex or np.iscomplexobj(g.coeffs) and np.any(g.coeffs.imag)):
        h = h.real
    nf = norm(f)
    return BinaryForm(h), res / nf if nf > 0 else res


def tangent_basis(summands, d: int, tangent=None):
    """Spanning forms of the tangent space of the secant variety at the candidate."""
    basis = []
    start = 0
    if tangent is not None:
        _, l0 = tangent
        lp = perp(l0)
        basis += [power(l0, d - j) * (power(lp, j) if j else BinaryForm(np.ones(1))) for j in range(4)]
        start = 1
    for _, l in list(summands)[start:]:
        basis += [power(l, d), power(l, d - 1) * perp(l)]
    return basis


def gradient_residual(f: BinaryForm, summands, tangent=None) -> float:
    """Size of the pairing of ``f - g`` with the tangent space at ``g``."""
    d = f.degree
    g = BinaryForm.zero(d, complex_=True)
    for mu, l in summands:
        g = g + mu * power(l, d)
    if tangent is not None:
        nu, l0 = tangent
        g = g + nu * (power(l0, d - 1) * perp(l0))
    r = f - g
    vals = [bombieri_dot(r, e, hermitian=False) for e in tangent_basis(summands, d, tangent)]
    return float(np.linalg.norm(vals))


# ---------------------------------------------------------------------------
# rank k search


def expected_count(d: int, k: int, f: BinaryForm | None = None) -> int | None:
    """Number of complex critical points when it is known, else None.

    Rank one: d for forms whose D(f) has simple roots.  Rank two on quartics: 7.
    """
    if k == 1 and f is not None:
        rs = roots(apply_D(f))
        return d if rs.simple else None
    if (d, k) == (4, 2):
        return 7
    return None


def _tensors(batch: solver.Batch, d: int) -> np.ndarray:
    a, b, _, _ = solver.chart_point(batch.t, batch.chart)
    g = np.einsum("nk,nkj->nj", batch.mu, solver.bpow(a, b, d))
    if batch.tangential:
        a0, b0, _, _ = solver.chart_point(batch.t0, batch.chart0)
        lp = solver.linear(-b0, a0)
        g = g + batch.mu0[:, None] * solver.bpow(a0, b0, d)
        g = g + batch.nu0[:, None] * solver.bconv(solver.bpow(a0, b0, d - 1), lp)
    return g


class _Pool:
    """Deduplicated solutions keyed by their tensor."""

    def __init__(self, d: int):
        self.d = d
        self.g = []
        self.rows = []  # (batch, index)
        self.counts = []

    def add(self, batch: solver.Batch, ok: np.ndarray) -> None:
        idx = np.flatnonzero(ok)
        if idx.size == 0:
            return
        gs = _tensors(batch.take(idx), self.d)
        for i, g in zip(idx, gs):
            if self.g:
                dist = solver.bombieri_norms(np.asarray(self.g) - g)
                j = int(np.argmin(dist))
                if dist[j] <= DEDUP_RTOL:
                    self.counts[j] += 1
                    continue
            self.g.append(g)
            self.rows.append((batch, int(i)))
            self.counts.append(1)

    def __len__(self):
        return len(self.g)


def _honest_round(fn, d, k, rng, n, budget, pool, collapsed):
    batch = solver.honest_batch(rng, n, k, d)
    solver.linear_init(batch, fn, d)
    res = solver.newton(batch, fn, d, maxiter=budget.max_newton_iters)
    sep = solver.min_separation(solver.directions(batch))
    conv = np.isfinite(res) & (res <= NEWTON_TOL)
    mu_ok = np.all(np.abs(batch.mu) < 1e6, axis=1)
    pool.add(batch, conv & (sep > COLLAPSE_TOL) & mu_ok)
    # near-collapsed iterates seed the tangential chart
    near = np.isfinite(res) & (sep < 1e-2) & (res < 1e-2)
    if k >= 2 and np.any(near):
        collapsed.append(batch.take(near))


def _tangential_round(fn, d, k, rng, n, budget, pool, seeds):
    batch = solver.tangential_batch(rng, n, k, d)
    for s in seeds:
        extra = solver.Batch(
            s.t[:, 2:], s.chart[:, 2:], s.mu[:, 2:], s.h[:, : d - 2 * k + 1],
            s.t[:, 0].copy(), s.chart[:, 0].copy(), s.mu[:, 0].copy(), np.zeros(len(s.t), complex),
        )
        batch = solver.Batch(*(np.concatenate([getattr(batch, f), getattr(extra, f)])
                               for f in batch.__dataclass_fields__))
    solver.linear_init(batch, fn, d)
    res = solver.newton(batch, fn, d, maxiter=budget.max_newton_iters)
    conv = np.isfinite(res) & (res <= NEWTON_TOL)
    if k > 2:
        pts = np.concatenate([
            np.stack(solver.chart_point(batch.t0, batch.chart0)[:2], axis=-1)[:, None],
            solver.directions(batch),
        ], axis=1)
        conv &= solver.min_separation(pts) > COLLAPSE_TOL
    pool.add(batch, conv)


def _build(f: BinaryForm, nf: float, batch: solver.Batch, i: int, k: int, count: int) -> CriticalRankK:
    d = f.degree
    a, b, _, _ = solver.chart_point(batch.t[i], batch.chart[i])
    summands = []
    for j in range(len(a)):
        u, s = unit_direction([a[j], b[j]])
        summands.append((complex(batch.mu[i, j] * s**d * nf), u))
    tangent = None
    if batch.tangential:
        a0, b0, _, _ = solver.chart_point(batch.t0[i : i + 1], batch.chart0[i : i + 1])
        u0, s0 = unit_direction([a0[0], b0[0]])
        summands.insert(0, (complex(batch.mu0[i] * s0**d * nf), u0))
        tangent = (complex(batch.nu0[i] * s0**d * nf), u0)
    summands, tangent = _canonical(summands, tangent, d)
    cand = CriticalRankK(k, tuple(summands), BinaryForm(np.zeros(1)), 0.0, 0.0, 0.0,
                         False, tangent is not None, tangent, degree=d)
    g = cand.tensor
    real = norm(BinaryForm(np.imag(g.coeffs))) <= REAL_RTOL * nf
    real_summands = real and all(l.is_real and abs(np.imag(mu)) <= REAL_RTOL * nf for mu, l in summands)
    if tangent is not None:
        real_summands = real_summands and abs(np.imag(tangent[0])) <= REAL_RTOL * nf
    if real_summands:
        summands = [(float(np.real(mu)), l) for mu, l in summands]
        if tangent is not None:
            tangent = (float(np.real(tangent[0])), tangent[1])
    h, cert = certify(f, summands, tangent)
    grad = gradient_residual(f, summands, tangent)
    out = replace(cand, summands=tuple(summands), tangent=tangent, cofactor=h,
                  grad_residual=grad, cert_residual=cert, is_real=real,
                  real_summands=real_summands, cluster_size=count)
    dist = norm(f - out.tensor)
    return replace(out, distance=dist)


def _canonical(summands, tangent, d):
    if tangent is not None:
        head, rest = summands[0], summands[1:]
    else:
        head, rest = None, summands

    def key(s):
        l = s[1]
        a, b = complex(l.a), complex(l.b)
        return (not l.is_real, math.atan2(b.real, a.real) % math.pi, a.imag, b.imag)

    rest = sorted(rest, key=key)
    return ([head] + rest if head else rest), tangent


def critical_rank_k(f: BinaryForm, k: int, field: str = "complex", budget: SearchBudget | None = None,
                    expected: int | None = -1, conjugates: bool = True, tol: float = GRAD_RTOL):
    """Certified critical points of the distance from ``f`` to the k-th secant variety.

    Multi-start Newton on the certificate system in affine charts, followed
    by a tangential-chart search for boundary points where two summands
    collapse.  ``field="real"`` keeps the real critical points only (real
    tensors, whose summands may still form conjugate pairs).

    ``expected`` is the known number of complex critical points; the default
    looks it up with :func:`expected_count`.  Falling short of it raises
    :class:`BudgetExhausted` carrying the partial list.  Points are kept when
    both the gradient residual (relative to ``|f|``) and the certificate
    residual are at most ``tol``.
    """
    budget = budget or SearchBudget()
    d = f.degree
    if k < 1 or 2 * k > d:
        raise ValueError(f"need 1 <= k and 2k <= d, got k={k}, d={d}")
    nf = _check_nonzero(f)
    if is_circle_multiple(f):
        raise DegenerateInput("f is a multiple of (x^2+y^2)^(d/2); its critical set is not finite")
    if field not in ("real", "complex"):
        raise ValueError(f"unknown field {field!r}")
    if expected == -1:
        expected = expected_count(d, k, f)
    fn = np.asarray(f.coeffs, dtype=complex) / nf
    rng = np.random.default_rng(budget.seed)
    total = budget.n_starts(k)
    pool = _Pool(d)
    collapsed = []
    done = 0
    while done < total:
        n = min(CHUNK * k, total - done)
        _honest_round(fn, d, k, rng, n, budget, pool, collapsed)
        done += n
        if conjugates and not f.is_complex and len(pool):
            _add_conjugates(fn, d, pool, budget)
        if expected is not None and len(pool) >= expected:
            break
    if k >= 2 and (expected is None or len(pool) < expected):
        n_tan = max(50, total // 4)
        _tangential_round(fn, d, k, rng, n_tan, budget, pool, collapsed[:4])
    found = []
    for (batch, i), count in zip(pool.rows, pool.counts):
        try:
            found.append(_build(f, nf, batch, i, k, count))
        except CollapsedDirections:
            continue
    found = [c for c in found if c.grad_residual <= tol * nf and c.cert_residual <= tol]
    found.sort(key=lambda c: (c.boundary, round(c.distance / nf, 9), _summand_key(c)))
    if expected is not None and len(found) < expected:
        raise BudgetExhausted(
            f"found {len(found)} of {expected} critical points with {total} starts",
            _filter_field(found, field), expected,
        )
    return _filter_field(found, field)


def _summand_key(c: CriticalRankK):
    return tuple((complex(l.a).real, complex(l.b).real, complex(l.a).imag, complex(l.b).imag) for _, l in c.summands)


def _filter_field(found, field):
    return [c for c in found if c.is_real] if field == "real" else found


def _add_conjugates(fn, d, pool, budget):
    """Complex conjugates of solutions are solutions for real f; polish and merge them."""
    rows = [(b, i) for b, i in pool.rows if not b.tangential]
    if not rows:
        return
    parts = [b.take(np.array([i])) for b, i in rows]
    batch = solver.Batch(*(np.concatenate([getattr(p, f) for p in parts]) for f in ("t", "chart", "mu", "h")))
    batch.t = np.conj(batch.t)
    batch.mu = np.conj(batch.mu)
    batch.h = np.conj(batch.h)
    res = solver.newton(batch, fn, d, maxiter=10)
    sep = solver.min_separation(solver.directions(batch))
    pool.add(batch, np.isfinite(res) & (res <= NEWTON_TOL) & (sep > COLLAPSE_TOL))


def rank_one_as_rank_k(f: BinaryForm, e: CriticalRank1) -> CriticalRankK:
    """Wrap an eigenpair as a certified rank-1 critical point."""
    d = f.degree
    summands = [(e.lam, e.v)]
    h, cert = certify(f, summands)
    g = e.tensor(d)
    return CriticalRankK(
        1, tuple(summands), h, norm(f - g), gradient_residual(f, summands), cert,
        e.is_real, real_summands=e.is_real, cluster_size=e.multiplicity, degree=d,
    )


def best_rank_k(f: BinaryForm, k: int, budget: SearchBudget | None = None, tol: float = GRAD_RTOL) -> CriticalRankK:
    """Real critical point of smallest distance.

    Real means the tensor is real; its summands may be a conjugate pair, which
    ``real_summands`` reports.  The infimum over forms of real rank k can sit
    on the tangential boundary instead, and is never below this distance.
    """
    if f.is_complex:
        raise ValueError("best approximation is defined for real forms")
    if k == 1:
        _check_nonzero(f)
        if is_circle_multiple(f):
            raise DegenerateInput("f is a multiple of (x^2+y^2)^(d/2); every unit v^d is optimal")
        cands = [rank_one_as_rank_k(f, e) for e in eigen_pairs(f) if e.is_real]
    else:
        try:
            cands = critical_rank_k(f, k, "real", budget, tol=tol)
        except BudgetExhausted as exc:
            log.warning("%s; choosing among the points found", exc)
            cands = exc.partial
    if not cands:
        raise RuntimeError("no real critical point found")
    return min(cands, key=lambda c: c.distance)


# ---------------------------------------------------------------------------
# real counts


def real_root_count(f: BinaryForm) -> int:
    return sum(1 for p, _ in roots(f) if p.is_real)


def count_real(f: BinaryForm, budget: SearchBudget | None = None):
    """``(#real roots, #real critical rank-1, #real critical rank-2)`` of a real form.

    The last entry is None for forms of degree below 4.
    """
    if f.is_complex:
        raise ValueError("real counts need a real form")
    n_roots = real_root_count(f)
    pairs = eigen_pairs(f)
    if isinstance(pairs, DegenerateCircle):
        raise DegenerateInput("f is a multiple of (x^2+y^2)^(d/2)")
    n1 = sum(1 for e in pairs if e.is_real)
    n2 = None
    if f.degree >= 4:
        found = critical_rank_k(f, 2, "complex", budget or SearchBudget(starts=400))
        n2 = sum(1 for c in found if c.is_real and not c.boundary)
    return n_roots, n1, n2


def eigen_residual(f: BinaryForm, e: CriticalRank1) -> float:
    """``|f . v^(d-1) - lambda v|``."""
    w = contract(f, e.v)
    return math.hypot(abs(w.a - e.lam * e.v.a), abs(w.b - e.lam * e.v.b))


__all__ = [
    "ZeroForm",
    "DegenerateInput",
    "CollapsedDirections",
    "BudgetExhausted",
    "SearchBudget",
    "DegenerateCircle",
    "CriticalRank1",
    "CriticalRankK",
    "Hyperplane",
    "eigen_pairs",
    "critical_rank_one",
    "singular_space",
    "certify",
    "gradient_residual",
    "critical_rank_k",
    "best_rank_k",
    "count_real",
    "real_root_count",
    "eigen_residual",
    "expected_count",
    "rank_one_as_rank_k",
    "is_circle_multiple",
    "unit_direction",
]
