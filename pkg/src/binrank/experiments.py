"""Experiments on real binary quartics: real-count table search and the
real-roots versus real-eigenvectors inequality sweep."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .critical import (
    BudgetExhausted,
    DegenerateCircle,
    SearchBudget,
    critical_rank_k,
    eigen_pairs,
)
from .forms import BinaryForm, LinearForm, apply_D, binomials, norm, product
from .roots import fubini_study, roots

log = logging.getLogger(__name__)

# rows of the published table marked as found
KNOWN_ROWS = (
    (0, 2, 3), (2, 2, 3), (0, 2, 5), (2, 2, 5),
    (0, 4, 3), (2, 4, 3), (4, 4, 3), (0, 4, 5), (2, 4, 5),
)
# rows left open there: (4, 4, 5) and any quartic with 7 real critical rank-2 tensors
OPEN_ROWS = ((4, 4, 5), (None, None, 7))

# realness of a root point is ambiguous between these two bounds
REAL_CLEAR = 1e-9
COMPLEX_CLEAR = 1e-5
# minimum root separation for a sample to count as having simple roots
SIMPLE_SEP = 1e-4


class InvariantViolation(AssertionError):
    def __init__(self, message, form):
        super().__init__(message)
        self.form = form


@dataclass
class Census:
    form: BinaryForm
    n_real_roots: int
    n_real_crit1: int
    n_real_crit2: int | None
    # continuous measures steering the targeted search
    root_gap: float  # smallest angle between adjacent real roots
    root_imag: float  # smallest non-realness among complex roots
    crit2_imag: float  # smallest relative imaginary part among non-real rank-2 points

    @property
    def counts(self):
        return (self.n_real_roots, self.n_real_crit1, self.n_real_crit2)


def _realness(p) -> float:
    p = np.asarray(p, dtype=complex)
    p = p / np.linalg.norm(p)
    return abs((p[0] * np.conj(p[1])).imag)


def _real_roots(f: BinaryForm, strict: bool):
    """Real root angles and the smallest non-realness of the others.

    With ``strict`` the result is None when a root is ambiguous or repeated.
    """
    rs = roots(f)
    if rs.degenerate:
        return None
    angles, imag = [], math.inf
    for p, m in rs:
        r = _realness(p.as_array())
        if strict and (m > 1 or REAL_CLEAR < r < COMPLEX_CLEAR):
            return None
        if r <= REAL_CLEAR or (not strict and r < COMPLEX_CLEAR):
            angles.extend([math.atan2(np.real(p.b), np.real(p.a)) % math.pi] * m)
        else:
            imag = min(imag, r)
    pts = rs.points()
    if strict:
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if fubini_study(pts[i], pts[j]) < SIMPLE_SEP:
                    return None
    return sorted(angles), imag


def _gap(angles) -> float:
    if len(angles) < 2:
        return math.inf
    return min((angles[(i + 1) % len(angles)] - angles[i]) % math.pi for i in range(len(angles)))


def classify(f: BinaryForm, budget: SearchBudget | None = None) -> Census | None:
    """Real counts of a real quartic, or None when the sample is not clean.

    A sample is rejected when f or D(f) has repeated or ambiguous roots, when
    the complex rank-2 census is incomplete, or when a rank-2 point is too
    close to the real locus to call.
    """
    if f.degree != 4 or f.is_complex:
        raise ValueError("classify needs a real quartic")
    froots = _real_roots(f, strict=True)
    droots = _real_roots(apply_D(f), strict=True)
    if froots is None or droots is None:
        return None
    try:
        found = critical_rank_k(f, 2, "complex", budget or SearchBudget(starts=400))
    except (BudgetExhausted, ValueError):
        return None
    nf = norm(f)
    n2 = 0
    crit_imag = math.inf
    for c in found:
        if c.boundary:
            return None
        g = c.tensor
        im = norm(BinaryForm(np.imag(g.coeffs))) / nf if np.iscomplexobj(g.coeffs) else 0.0
        if c.is_real:
            n2 += 1
        elif im < COMPLEX_CLEAR:
            return None
        else:
            crit_imag = min(crit_imag, im)
    return Census(f, len(froots[0]), len(droots[0]), n2, _gap(froots[0]), froots[1], crit_imag)


# ---------------------------------------------------------------------------
# sampling


def sample_quartic(rng: np.random.Generator, kind: str) -> BinaryForm:
    """Random real quartic from one of the search distributions.

    ``gaussian``: iid coefficients.  ``kostlan``: SO(2)-invariant Gaussian.
    ``roots0/2/4``: products of real linear forms and positive quadratics
    with the given number of real roots.
    """
    if kind == "gaussian":
        return BinaryForm(rng.normal(size=5))
    if kind == "kostlan":
        return BinaryForm(rng.normal(size=5) * np.sqrt(binomials(4)))
    if kind.startswith("roots"):
        n_real = int(kind[5:])
        factors = [LinearForm(*rng.normal(size=2)).as_form() for _ in range(n_real)]
        for _ in range((4 - n_real) // 2):
            u, v = LinearForm(*rng.normal(size=2)), LinearForm(*rng.normal(size=2))
            factors.append(u * u + v * v)
        return product(factors)
    raise ValueError(f"unknown sample kind {kind!r}")


KINDS = ("kostlan", "gaussian", "roots0", "roots2", "roots4")


def perturb(rng, f: BinaryForm, eps: float) -> BinaryForm:
    g = f / norm(f)
    step = rng.normal(size=5) * np.sqrt(binomials(4))
    step /= norm(BinaryForm(step))
    return BinaryForm(g.coeffs + eps * step)


# ---------------------------------------------------------------------------
# table search


@dataclass
class TableRow:
    n_real_roots: int | None
    n_real_crit1: int | None
    n_real_crit2: int
    witness: BinaryForm | None = None
    found: bool = False
    known: bool = True  # row marked as realized in the published table

    def label(self):
        star = lambda v: "*" if v is None else str(v)  # noqa: E731
        return (star(self.n_real_roots), star(self.n_real_crit1), star(self.n_real_crit2))


@dataclass
class TableResult:
    rows: list
    other: dict = field(default_factory=dict)  # further combinations seen, with witnesses
    samples: int = 0
    rejected: int = 0
    seconds: float = 0.0
    time_limited: bool = False


def _matches(row: TableRow, counts) -> bool:
    want = (row.n_real_roots, row.n_real_crit1, row.n_real_crit2)
    return all(w is None or w == c for w, c in zip(want, counts))


def _measure(target, census: Census) -> float | None:
    """Distance-like quantity to shrink when walking from ``census`` toward ``target``."""
    r, n1, n2 = census.counts
    tr, tn1, tn2 = target
    if tn1 is not None and tn1 != n1:
        return None
    if tn2 is not None and tn2 > n2 and (tr is None or tr == r):
        return census.crit2_imag
    if tn2 is not None and tn2 != n2:
        return None
    if tr is not None and tr < r:
        return census.root_gap
    if tr is not None and tr > r:
        return census.root_imag
    return None


class _Search:
    def __init__(self, seed, starts, time_limit):
        self.rng = np.random.default_rng(seed)
        self.budget_seed = np.random.default_rng(seed + 1)
        self.starts = starts
        self.deadline = time.monotonic() + time_limit if time_limit else math.inf
        self.seen = {}
        self.samples = 0
        self.rejected = 0
        self.stopped = False

    def classify(self, f):
        if time.monotonic() > self.deadline:
            self.stopped = True
            return None
        self.samples += 1
        seed = int(self.budget_seed.integers(2**32))
        c = classify(f, SearchBudget(starts=self.starts, seed=seed))
        if c is None:
            self.rejected += 1
            return None
        self.seen.setdefault(c.counts, c.form)
        return c

    def climb(self, start: Census, target, steps: int, eps: float = 0.05):
        """Random-walk from ``start`` shrinking the measure toward ``target``."""
        cur = start
        best = _measure(target, cur)
        if best is None:
            return None
        for _ in range(steps):
            if self.stopped:
                return None
            cand = self.classify(perturb(self.rng, cur.form, eps))
            if cand is None:
                continue
            if _matches_counts(target, cand.counts):
                return cand
            m = _measure(target, cand)
            if m is not None and m < best and _compatible(target, cur.counts, cand.counts):
                cur, best = cand, m
        return None


def _matches_counts(target, counts):
    return all(t is None or t == c for t, c in zip(target, counts))


def _compatible(target, old, new):
    """A move may not take any count farther from the target."""
    for t, o, n in zip(target, old, new):
        if t is not None and abs(t - n) > abs(t - o):
            return False
    return True


def _neighbours(target, seen):
    """Witness counts from which a single change of one count reaches ``target``."""
    tr, tn1, tn2 = target
    out = []
    for counts in seen:
        r, n1, n2 = counts
        if tn1 is not None and n1 != tn1:
            continue
        if tn2 is None or n2 == tn2:
            if tr is not None and abs(r - tr) == 2:
                out.append(counts)
        elif n2 == tn2 - 2 and (tr is None or r == tr):
            out.append(counts)
    return sorted(out)


def search_table(seed: int = 0, samples: int = 2000, climb_steps: int = 150, open_steps: int = 300,
                 starts: int = 400, time_limit: float | None = 600.0,
                 stop_when_complete: bool = True) -> TableResult:
    """Random and targeted search for real quartics realizing each table row.

    Sampling cycles through :data:`KINDS`.  Every 100 samples, rows still
    missing are attacked by random walks from witnesses that differ in one
    count, shrinking the matching measure (gap between two real roots, how
    non-real a complex root pair is, how non-real a pair of rank-2 points is).
    The open rows get ``open_steps`` walk steps each at the end.  Output is
    deterministic for a fixed seed unless ``time_limit`` cuts the run short.
    """
    t0 = time.monotonic()
    rows = [TableRow(*r) for r in KNOWN_ROWS] + [TableRow(*r, known=False) for r in OPEN_ROWS]
    s = _Search(seed, starts, time_limit)

    def record(c: Census | None):
        if c is None:
            return
        for row in rows:
            if not row.found and _matches(row, c.counts):
                row.found, row.witness = True, c.form

    def missing():
        return [r for r in rows if r.known and not r.found]

    censuses = {}
    i = 0
    while i < samples and not s.stopped:
        kind = KINDS[i % len(KINDS)]
        c = s.classify(sample_quartic(s.rng, kind))
        i += 1
        if c is not None:
            censuses.setdefault(c.counts, c)
            record(c)
        if stop_when_complete and not missing():
            break
        if i % 100 == 0:
            for row in missing():
                target = (row.n_real_roots, row.n_real_crit1, row.n_real_crit2)
                for counts in _neighbours(target, censuses):
                    hit = s.climb(censuses[counts], target, climb_steps)
                    if hit is not None:
                        censuses.setdefault(hit.counts, hit)
                        record(hit)
                        break
    for row in rows:
        if row.known or row.found:
            continue
        target = (row.n_real_roots, row.n_real_crit1, row.n_real_crit2)
        sources = _neighbours(target, censuses)
        per = max(1, open_steps // max(1, len(sources))) if sources else 0
        for counts in sources:
            hit = s.climb(censuses[counts], target, per)
            if hit is not None:
                record(hit)
                break
    other = {k: v for k, v in s.seen.items() if not any(_matches(r, k) for r in rows)}
    return TableResult(rows, dict(sorted(other.items())), s.samples, s.rejected,
                       time.monotonic() - t0, s.stopped)


# ---------------------------------------------------------------------------
# inequality sweep


@dataclass
class MaccioniReport:
    degree: int
    samples: int
    checked: int
    skipped: int
    histogram: dict  # (n_real_roots, n_real_crit1) -> count


def maccioni_sweep(samples: int = 1000, seed: int = 0, d: int = 4) -> MaccioniReport:
    """Check ``#real roots <= #real eigenvectors`` and their parity on random forms.

    Forms are Kostlan-Gaussian.  A violation raises :class:`InvariantViolation`
    with the offending form; forms with repeated or ambiguous roots are skipped.
    """
    if d < 2:
        raise ValueError("degree must be at least 2")
    rng = np.random.default_rng(seed)
    hist = {}
    skipped = 0
    for _ in range(samples):
        f = BinaryForm(rng.normal(size=d + 1) * np.sqrt(binomials(d)))
        fr = _real_roots(f, strict=True)
        pairs = eigen_pairs(f)
        if fr is None or isinstance(pairs, DegenerateCircle):
            skipped += 1
            continue
        dr = _real_roots(apply_D(f), strict=True)
        if dr is None:
            skipped += 1
            continue
        n_roots = len(fr[0])
        n1 = sum(1 for e in pairs if e.is_real)
        if n1 != len(dr[0]):
            raise InvariantViolation("real eigenvectors disagree with real roots of D(f)", f)
        if n_roots > n1:
            raise InvariantViolation(f"{n_roots} real roots but {n1} real eigenvectors", f)
        if (n_roots - d) % 2 or (n1 - d) % 2:
            raise InvariantViolation(f"parity: {n_roots} real roots, {n1} real eigenvectors, d={d}", f)
        hist[(n_roots, n1)] = hist.get((n_roots, n1), 0) + 1
    return MaccioniReport(d, samples, samples - skipped, skipped, dict(sorted(hist.items())))
