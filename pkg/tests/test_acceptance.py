"""Acceptance criteria, one test each.

Every test prints a single ``[criterion N] PASS|FAIL ...`` line; under
pytest the lines are repeated in the terminal summary.  Tolerances are pinned in the constants below.  Run the file as a
script to print the lines without pytest.
"""

import math
import sys
import time

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from binrank import cli
from binrank.critical import (
    BudgetExhausted,
    critical_rank_k,
    eigen_pairs,
    eigen_residual,
    singular_space,
)
from binrank.experiments import OPEN_ROWS, KNOWN_ROWS, InvariantViolation, maccioni_sweep, search_table
from binrank.forms import (
    BinaryForm,
    LinearForm,
    apply_D,
    binomials,
    bombieri_dot,
    norm,
    perp,
    power,
    product,
    split_dot,
)
from binrank.roots import roots
from binrank.spectral import rez, spectral_decompose
from binrank.critical import certify

EIGEN_RTOL = 1e-8
EIGEN_SECONDS = 5.0
CENSUS_MIN_OK = 95
CENSUS_SECONDS = 60.0
BOUNDARY_RTOL = 1e-6
MEMBERSHIP_TOL = 1e-8
CERT_OK = 1e-10
CERT_FAIL = 1e-4
SPECTRAL_RTOL = 1e-8
SPECTRAL_OFF_AXIS = 1e-10
REZ_TOL = 1e-10
C2_TOL = 1e-12
PROPERTY_TOL = 1e-12
PROPERTY_INSTANCES = 200
TABLE_SECONDS = 600.0

# critical points gathered by criteria 1-3 for criterion 4: (f, g)
_COLLECTED = []


def report(n: int, ok: bool, detail: str):
    line = f"[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def kostlan(rng, d):
    return BinaryForm(rng.normal(size=d + 1) * np.sqrt(binomials(d)))


def test_criterion_01_eigen_count():
    rng = np.random.default_rng(101)
    bad_count = bad_res = 0
    worst = 0.0
    t0 = time.perf_counter()
    for d in (3, 4, 5, 8):
        for _ in range(100):
            f = kostlan(rng, d)
            pairs = eigen_pairs(f)
            if sum(e.multiplicity for e in pairs) != d:
                bad_count += 1
            for e in pairs:
                r = eigen_residual(f, e) / norm(f)
                worst = max(worst, r)
                bad_res += r > EIGEN_RTOL
                _COLLECTED.append((f, e.tensor(d)))
    dt = time.perf_counter() - t0
    ok = bad_count == 0 and bad_res == 0 and dt <= EIGEN_SECONDS
    report(1, ok, f"400 forms, count errors {bad_count}, max rel residual {worst:.1e} "
                  f"(<= {EIGEN_RTOL:g}), {dt:.2f} s (<= {EIGEN_SECONDS:g} s)")


def test_criterion_02_quartic_census():
    rng = np.random.default_rng(202)
    exact = exhausted = silent = 0
    t0 = time.perf_counter()
    for _ in range(100):
        f = BinaryForm(rng.normal(size=5))
        try:
            found = critical_rank_k(f, 2, "complex")
        except BudgetExhausted as exc:
            exhausted += 1
            _COLLECTED.extend((f, c.tensor) for c in exc.partial)
            continue
        if len(found) == 7:
            exact += 1
        else:
            silent += 1
        _COLLECTED.extend((f, c.tensor) for c in found)
    dt = time.perf_counter() - t0
    ok = exact >= CENSUS_MIN_OK and silent == 0 and dt <= CENSUS_SECONDS
    report(2, ok, f"exactly 7 in {exact}/100 (>= {CENSUS_MIN_OK}), BudgetExhausted {exhausted}, "
                  f"silent undercount {silent}, {dt:.1f} s (<= {CENSUS_SECONDS:g} s)")


def test_criterion_03_worked_example():
    f = BinaryForm(np.array([2.0, 0.0, 0.0, 1.0, 0.0]))  # x^3 y + 2 y^4
    found = critical_rank_k(f, 2, "complex")
    honest = [c for c in found if not c.boundary]
    boundary = [c for c in found if c.boundary]
    x3y = BinaryForm.monomial(3, 4)
    match = min((norm(c.tensor - x3y) / norm(x3y) for c in boundary), default=math.inf)
    _COLLECTED.extend((f, c.tensor) for c in found)
    ok = len(honest) == 6 and len(boundary) == 1 and match <= BOUNDARY_RTOL
    report(3, ok, f"{len(honest)} honest, {len(boundary)} boundary, "
                  f"boundary vs x^3y rel {match:.1e} (<= {BOUNDARY_RTOL:g})")


def test_criterion_04_singular_space():
    if not _COLLECTED:
        for fn in (test_criterion_01_eigen_count, test_criterion_02_quartic_census,
                   test_criterion_03_worked_example):
            try:
                fn()
            except AssertionError:
                pass
    worst = 0.0
    bad = 0
    for f, g in _COLLECTED:
        m = singular_space(f).membership(g)
        worst = max(worst, m)
        bad += m > MEMBERSHIP_TOL
    ok = bad == 0 and len(_COLLECTED) > 0
    report(4, ok, f"{len(_COLLECTED)} critical points, {bad} exceptions, "
                  f"max |<g,D(f)>|/(|g||D(f)|) {worst:.1e} (<= {MEMBERSHIP_TOL:g})")


def test_criterion_05_certificate():
    rng = np.random.default_rng(505)
    worst_ok, best_bad = 0.0, math.inf
    for _ in range(100):
        d = int(rng.integers(2, 11))
        k = int(rng.integers(1, d // 2 + 1))
        summands = [(rng.normal(), LinearForm(*rng.normal(size=2))) for _ in range(k)]
        h0 = BinaryForm(rng.normal(size=d - 2 * k + 1))
        f = h0 * product([perp(l) for _, l in summands for _ in range(2)])
        for mu, l in summands:
            f = f + mu * power(l, d)
        worst_ok = max(worst_ok, certify(f, summands)[1])
    for _ in range(100):
        d = int(rng.integers(2, 11))
        k = int(rng.integers(1, d // 2 + 1))
        f = kostlan(rng, d)
        summands = [(rng.normal(), LinearForm(*rng.normal(size=2))) for _ in range(k)]
        best_bad = min(best_bad, certify(f, summands)[1])
    ok = worst_ok <= CERT_OK and best_bad >= CERT_FAIL
    report(5, ok, f"forward max residual {worst_ok:.1e} (<= {CERT_OK:g}), "
                  f"random min residual {best_bad:.1e} (>= {CERT_FAIL:g})")


def test_criterion_06_spectral():
    rng = np.random.default_rng(606)
    worst = 0.0
    done = 0
    while done < 100:
        d = int(rng.integers(2, 9))
        f = kostlan(rng, d)
        if not roots(apply_D(f)).simple:
            continue
        s = spectral_decompose(f)
        worst = max(worst, s.residual / norm(f))
        done += 1
    off = 0.0
    # x^2 + y^2 is the circle form, so start at d = 3
    for d in range(3, 11):
        s = spectral_decompose(BinaryForm.monomial(0, d) + BinaryForm.monomial(d, d))
        for e, c in zip(s.eigen, s.coeffs):
            if min(abs(e.v.a), abs(e.v.b)) > 1e-12:
                off = max(off, abs(c))
    ok = worst <= SPECTRAL_RTOL and off <= SPECTRAL_OFF_AXIS
    report(6, ok, f"100 forms max rel residual {worst:.1e} (<= {SPECTRAL_RTOL:g}); "
                  f"x^d+y^d off-axis max {off:.1e} (<= {SPECTRAL_OFF_AXIS:g})")


def test_criterion_07_rez():
    worst = 0.0
    for d in (2, 4, 6, 8, 10):
        for phi in (0.0, 0.37):
            worst = max(worst, rez(d, phi).residual)
    c2 = abs(rez(2).c_d - 1.0)
    ok = worst <= REZ_TOL and c2 <= C2_TOL
    report(7, ok, f"max residual {worst:.1e} (<= {REZ_TOL:g}), |c_2 - 1| {c2:.1e} (<= {C2_TOL:g})")


def test_criterion_08_properties():
    rng = np.random.default_rng(808)
    n = PROPERTY_INSTANCES

    def form(d):
        return BinaryForm(rng.uniform(-1, 1, size=d + 1))

    def lin():
        return LinearForm(complex(*rng.uniform(-1, 1, 2)), complex(*rng.uniform(-1, 1, 2)))

    worst = {"leibniz": 0.0, "skew": 0.0, "split": 0.0, "power": 0.0}
    for _ in range(n):
        f, g = form(int(rng.integers(1, 8))), form(int(rng.integers(1, 8)))
        lhs = apply_D(f * g)
        rhs = apply_D(f) * g + f * apply_D(g)
        worst["leibniz"] = max(worst["leibniz"], norm(lhs - rhs) / max(1.0, norm(f) * norm(g)))
    for _ in range(n):
        d = int(rng.integers(1, 8))
        f, g = form(d), form(d)
        err = abs(bombieri_dot(apply_D(f), g) + bombieri_dot(f, apply_D(g)))
        worst["skew"] = max(worst["skew"], err / max(1.0, norm(f) * norm(g)))
    for _ in range(n):
        d = int(rng.integers(1, 7))
        ls, ms = [lin() for _ in range(d)], [lin() for _ in range(d)]
        want = bombieri_dot(product(l.as_form() for l in ls), product(m.as_form() for m in ms))
        worst["split"] = max(worst["split"], abs(split_dot(ls, ms) - want) / max(1.0, abs(want)))
    for _ in range(n):
        d = int(rng.integers(1, 11))
        l, m = lin(), lin()
        want = l.dot(m, hermitian=True) ** d
        worst["power"] = max(worst["power"], abs(bombieri_dot(power(l, d), power(m, d)) - want) / max(1.0, abs(want)))
    ok = all(v <= PROPERTY_TOL for v in worst.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(8, ok, f"{n} instances each: {detail} (<= {PROPERTY_TOL:g})")


def test_criterion_09_maccioni():
    parts = []
    ok = True
    for d in (4, 3):
        try:
            rep = maccioni_sweep(1000, seed=909 + d, d=d)
            parts.append(f"d={d}: {rep.checked} checked, {rep.skipped} skipped, 0 violations")
        except InvariantViolation as exc:
            ok = False
            parts.append(f"d={d}: violation {exc} at {exc.form}")
    report(9, ok, "; ".join(parts))


@pytest.mark.slow
def test_criterion_10_table():
    t0 = time.perf_counter()
    res = search_table(seed=0, time_limit=TABLE_SECONDS)
    dt = time.perf_counter() - t0
    yes = [r for r in res.rows if r.known]
    found = sum(r.found for r in yes)
    open_rows = [r for r in res.rows if not r.known]
    outcomes = ", ".join(f"{r.label()} {'found' if r.found else 'not found'}" for r in open_rows)
    ok = found == len(KNOWN_ROWS) and len(open_rows) == len(OPEN_ROWS) and dt <= TABLE_SECONDS
    report(10, ok, f"{found}/{len(KNOWN_ROWS)} rows witnessed in {dt:.0f} s (<= {TABLE_SECONDS:g} s), "
                   f"{res.samples} samples; open rows: {outcomes}")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion")]
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
