"""Batched multi-start Newton for critical points on secant varieties.

Every start is one row of a batch; all rows are advanced together with numpy.
Two polynomial systems are solved, both in the affine charts ``l = x + t*y``
(chart 0) and ``l = t*x + y`` (chart 1):

* the honest system, unknowns ``(t_i, mu_i, h)``::

      sum_i mu_i l_i^d + h * prod_i (l_i^perp)^2 = f

  which is square (d + 1 equations and unknowns);

* the tangential system for a collapsed pair ``l_1 = l_2 = l``::

      mu l^d + nu l^(d-1) l^perp + sum_{i>2} mu_i l_i^d
          + h * (l^perp)^4 * prod_{i>2} (l_i^perp)^2 = f

  which has one equation more than unknowns and is solved by Gauss-Newton.

Forms are coefficient arrays in the monomial basis (index i is ``x^i y^(d-i)``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forms import binomials

MAX_T = 1.5
DIVERGED_MU = 1e8


def bpow(a, b, n: int) -> np.ndarray:
    """Coefficients of ``(a x + b y)^n`` for batched ``a, b``."""
    j = np.arange(n + 1)
    a = np.asarray(a)[..., None]
    b = np.asarray(b)[..., None]
    return binomials(n) * a**j * b ** (n - j)


def bconv(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Batched product of forms (convolution on the last axis)."""
    m, n = p.shape[-1], q.shape[-1]
    shape = np.broadcast_shapes(p.shape[:-1], q.shape[:-1]) + (m + n - 1,)
    out = np.zeros(shape, dtype=np.result_type(p, q))
    for j in range(n):
        out[..., j : j + m] += p * q[..., j : j + 1]
    return out


def linear(a, b) -> np.ndarray:
    """Coefficients of ``a x + b y`` (index 0 is y)."""
    return np.stack(np.broadcast_arrays(b, a), axis=-1)


def shifts(p: np.ndarray, m: int) -> np.ndarray:
    """Columns ``x^j * p`` for j < m, i.e. the matrix of ``h -> h*p``; shape (..., deg p + m, m)."""
    n = p.shape[-1]
    out = np.zeros(p.shape[:-1] + (n + m - 1, m), dtype=p.dtype)
    for j in range(m):
        out[..., j : j + n, j] = p
    return out


def chart_point(t, chart):
    """``(a, b)`` and their t-derivatives for the chart flags."""
    one = np.ones_like(t)
    zero = np.zeros_like(t)
    a = np.where(chart, t, one)
    b = np.where(chart, one, t)
    da = np.where(chart, one, zero)
    db = np.where(chart, zero, one)
    return a, b, da, db


def solve_batch(J: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Least-squares steps ``-J^+ R`` for a stack of systems."""
    if J.shape[-1] == J.shape[-2]:
        try:
            return -np.linalg.solve(J, R[..., None])[..., 0]
        except np.linalg.LinAlgError:
            pass
    return -np.einsum("nij,nj->ni", np.linalg.pinv(J, rcond=1e-13), R)


@dataclass
class Batch:
    """State of a batch of starts for either system.

    ``t, chart``: directions of the honest summands, shape (N, k_h).
    ``mu``: their weights.  ``tangent``: optional ``(t0, chart0, mu0, nu0)`` of
    shape (N,) each for the collapsed pair.  ``h``: cofactor coefficients.
    """

    t: np.ndarray
    chart: np.ndarray
    mu: np.ndarray
    h: np.ndarray
    t0: np.ndarray | None = None
    chart0: np.ndarray | None = None
    mu0: np.ndarray | None = None
    nu0: np.ndarray | None = None

    @property
    def tangential(self) -> bool:
        return self.t0 is not None

    def take(self, mask) -> "Batch":
        def sel(x):
            return None if x is None else x[mask]

        return Batch(*(sel(getattr(self, f)) for f in self.__dataclass_fields__))

    def params(self) -> np.ndarray:
        parts = [self.t, self.mu]
        if self.tangential:
            parts = [self.t0[:, None], self.mu0[:, None], self.nu0[:, None]] + parts
        return np.concatenate(parts + [self.h], axis=1)

    def update(self, step: np.ndarray) -> None:
        k = self.t.shape[1]
        i = 0
        if self.tangential:
            self.t0 = self.t0 + step[:, 0]
            self.mu0 = self.mu0 + step[:, 1]
            self.nu0 = self.nu0 + step[:, 2]
            i = 3
        self.t = self.t + step[:, i : i + k]
        self.mu = self.mu + step[:, i + k : i + 2 * k]
        self.h = self.h + step[:, i + 2 * k :]

    def rechart(self, d: int) -> None:
        """Flip charts where ``|t|`` is large, rescaling weights and cofactor."""
        big = np.abs(self.t) > MAX_T
        if np.any(big):
            tb = np.where(big, self.t, 1.0)
            self.mu = np.where(big, self.mu * tb**d, self.mu)
            self.h = self.h * np.prod(np.where(big, tb, 1.0) ** 2, axis=1)[:, None]
            self.t = np.where(big, 1.0 / tb, self.t)
            self.chart = np.where(big, ~self.chart, self.chart)
        if self.tangential:
            big0 = np.abs(self.t0) > MAX_T
            if np.any(big0):
                tb = np.where(big0, self.t0, 1.0)
                self.mu0 = self.mu0 * tb**d
                self.nu0 = self.nu0 * tb**d
                self.h = self.h * (tb**4)[:, None]
                self.t0 = np.where(big0, 1.0 / tb, self.t0)
                self.chart0 = np.where(big0, ~self.chart0, self.chart0)


def evaluate(batch: Batch, d: int, jacobian: bool = True):
    """Tensor part ``g``, cofactor product ``P`` and, optionally, the Jacobian."""
    n, k = batch.t.shape
    a, b, da, db = chart_point(batch.t, batch.chart)
    L = bpow(a, b, d)  # (N, k, d+1)
    lp = linear(-b, a)
    Q = bconv(lp, lp)  # (N, k, 3)
    g = np.einsum("nk,nkj->nj", batch.mu, L) if k else np.zeros((n, d + 1), dtype=complex)
    P = np.ones((n, 1), dtype=complex)
    for i in range(k):
        P = bconv(P, Q[:, i])
    if batch.tangential:
        a0, b0, da0, db0 = chart_point(batch.t0, batch.chart0)
        l0p = linear(-b0, a0)
        L0 = bpow(a0, b0, d)
        T0 = bconv(bpow(a0, b0, d - 1), l0p)
        g = g + batch.mu0[:, None] * L0 + batch.nu0[:, None] * T0
        Q0 = bconv(bconv(l0p, l0p), bconv(l0p, l0p))
        Pk = P
        P = bconv(P, Q0)
    m = batch.h.shape[1]
    hp = bconv(batch.h, P)
    if not jacobian:
        return g + hp, None
    cols = []
    if batch.tangential:
        dl0 = linear(da0, db0)
        dl0p = linear(-db0, da0)
        Lm1 = bpow(a0, b0, d - 1)
        Lm2 = bpow(a0, b0, d - 2)
        dL0 = d * bconv(Lm1, dl0)
        dT0 = (d - 1) * bconv(bconv(Lm2, dl0), l0p) + bconv(Lm1, dl0p)
        dQ0 = 4 * bconv(bconv(bconv(l0p, l0p), l0p), dl0p)
        dg0 = batch.mu0[:, None] * dL0 + batch.nu0[:, None] * dT0 + bconv(batch.h, bconv(Pk, dQ0))
        cols += [dg0, L0, T0]
    dl = linear(da, db)
    dlp = linear(-db, da)
    Lm1 = bpow(a, b, d - 1)
    dQ = 2 * bconv(lp, dlp)
    extra = Q0 if batch.tangential else np.ones((n, 1), dtype=complex)
    for i in range(k):
        rest = extra
        for j in range(k):
            if j != i:
                rest = bconv(rest, Q[:, j])
        dPi = bconv(rest, dQ[:, i])
        cols.append(batch.mu[:, i, None] * d * bconv(Lm1[:, i], dl[:, i]) + bconv(batch.h, dPi))
    cols += [L[:, i] for i in range(k)]
    J = np.concatenate([np.stack(cols, axis=-1), shifts(P, m)], axis=-1)
    return g + hp, J


def linear_init(batch: Batch, f: np.ndarray, d: int) -> None:
    """Best weights and cofactor for the sampled directions, in place."""
    _, J = evaluate(batch, d)
    k = batch.t.shape[1]
    if batch.tangential:
        keep = [1, 2] + list(range(3 + k, J.shape[-1]))
    else:
        keep = list(range(k, J.shape[-1]))
    A = J[..., keep]
    x = np.einsum("nij,j->ni", np.linalg.pinv(A, rcond=1e-12), f)
    i = 0
    if batch.tangential:
        batch.mu0, batch.nu0 = x[:, 0], x[:, 1]
        i = 2
    batch.mu = x[:, i : i + k]
    batch.h = x[:, i + k :]


def newton(batch: Batch, f: np.ndarray, d: int, maxiter: int = 100, tol: float = 1e-14):
    """Advance every start until convergence or divergence.

    Returns the final residual norms; entries that diverged are ``inf``.
    """
    n = batch.t.shape[0]
    res = np.full(n, np.inf)
    active = np.ones(n, dtype=bool)
    polish = np.zeros(n, dtype=int)
    for _ in range(maxiter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        sub = batch.take(idx)
        val, J = evaluate(sub, d)
        R = val - f
        r = np.linalg.norm(R, axis=1)
        res[idx] = r
        bad = ~np.isfinite(r) | (np.max(np.abs(sub.params()), axis=1) > DIVERGED_MU)
        step = solve_batch(J, R)
        # cap the change of direction per step
        k = sub.t.shape[1]
        tcols = ([0] if sub.tangential else []) + list(range(3 if sub.tangential else 0, (3 if sub.tangential else 0) + k))
        tstep = np.max(np.abs(step[:, tcols]), axis=1) if tcols else np.zeros(len(idx))
        scale = np.minimum(1.0, 0.5 / np.maximum(tstep, 1e-300))
        step = step * scale[:, None]
        sub.update(step)
        sub.rechart(d)
        _scatter(batch, sub, idx)
        done = r <= tol
        polish[idx[done]] += 1
        finished = polish[idx] >= 2
        bad |= ~np.isfinite(step).all(axis=1)
        active[idx[finished | bad]] = False
        res[idx[bad]] = np.inf
    # final residual after the last update
    val, _ = evaluate(batch, d, jacobian=False)
    final = np.linalg.norm(val - f, axis=1)
    final[~np.isfinite(final)] = np.inf
    return np.where(np.isfinite(res), final, np.inf)


def _scatter(batch: Batch, sub: Batch, idx: np.ndarray) -> None:
    for name in batch.__dataclass_fields__:
        full = getattr(batch, name)
        if full is None:
            continue
        part = getattr(sub, name)
        full = full.copy()
        full[idx] = part
        setattr(batch, name, full)


def random_directions(rng: np.random.Generator, shape, real_fraction: float = 0.25):
    """Chart coordinates and flags: a share of real directions, the rest in a disk of radius 3."""
    n = shape[0]
    r = 3.0 * np.sqrt(rng.uniform(size=shape))
    phi = rng.uniform(0, 2 * np.pi, size=shape)
    t = r * np.exp(1j * phi)
    n_real = int(round(real_fraction * n))
    if n_real:
        theta = rng.uniform(0, np.pi, size=(n_real,) + tuple(shape[1:]))
        # direction (cos, sin) in chart 0 is x + tan(theta) y
        t[:n_real] = np.tan(theta) + 0j
    chart = rng.uniform(size=shape) < 0.5
    big = np.abs(t) > MAX_T
    t = np.where(big, 1.0 / np.where(t == 0, 1, t), t)
    chart = np.where(big, ~chart, chart)
    # chart 1 with a real slope means direction (t, 1): keep it real as well
    return t.astype(complex), chart


def honest_batch(rng, n: int, k: int, d: int, real_fraction: float = 0.25) -> Batch:
    t, chart = random_directions(rng, (n, k), real_fraction)
    m = d - 2 * k + 1
    return Batch(t, chart, np.zeros((n, k), complex), np.zeros((n, m), complex))


def tangential_batch(rng, n: int, k: int, d: int, real_fraction: float = 0.25) -> Batch:
    t, chart = random_directions(rng, (n, k - 1), real_fraction)
    m = d - 2 * k + 1
    z = np.zeros(n, complex)
    return Batch(
        t[:, 1:], chart[:, 1:], np.zeros((n, k - 2), complex), np.zeros((n, m), complex),
        t[:, 0], chart[:, 0], z, z.copy(),
    )


def directions(batch: Batch) -> np.ndarray:
    """Honest directions as unit-free points, shape (N, k, 2)."""
    a, b, _, _ = chart_point(batch.t, batch.chart)
    return np.stack([a, b], axis=-1)


def min_separation(pts: np.ndarray) -> np.ndarray:
    """Smallest Fubini-Study angle between the k directions of each row."""
    n, k, _ = pts.shape
    out = np.full(n, np.pi / 2)
    if k < 2:
        return out
    u = pts / np.linalg.norm(pts, axis=-1, keepdims=True)
    for i in range(k):
        for j in range(i + 1, k):
            c = np.abs(np.sum(np.conj(u[:, i]) * u[:, j], axis=-1))
            out = np.minimum(out, np.arccos(np.clip(c, 0.0, 1.0)))
    return out


def bombieri_norms(coeffs: np.ndarray) -> np.ndarray:
    d = coeffs.shape[-1] - 1
    return np.sqrt(np.sum(np.abs(coeffs) ** 2 / binomials(d), axis=-1))


__all__ = [
    "Batch",
    "bpow",
    "bconv",
    "linear",
    "shifts",
    "evaluate",
    "linear_init",
    "newton",
    "honest_batch",
    "tangential_batch",
    "directions",
    "min_separation",
    "bombieri_norms",
]
