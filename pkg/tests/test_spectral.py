import numpy as np
import pytest

from binrank.critical import DegenerateInput, critical_rank_k
from binrank.forms import BinaryForm, apply_D, bombieri_dot, circle_power, norm
from binrank.spectral import MultipleRootsWarning, OddDegree, express_in_eigenbasis, rez, spectral_decompose

from conftest import kostlan


def test_random_forms_reconstruct(rng):
    for _ in range(50):
        d = int(rng.integers(2, 9))
        f = kostlan(rng, d)
        s = spectral_decompose(f)
        assert s.simple and s.rank == d
        assert s.residual <= 1e-8 * norm(f)
        assert norm(s.reconstruct() - f) <= 1e-8 * norm(f)


def test_basis_orthogonal_to_D(rng):
    for _ in range(20):
        f = kostlan(rng, int(rng.integers(2, 9)))
        Df = apply_D(f)
        for b in spectral_decompose(f).basis:
            assert abs(bombieri_dot(b, Df, hermitian=False)) <= 1e-10 * norm(Df) * norm(b)


@pytest.mark.parametrize("d", [3, 4, 5, 6, 7, 8])
def test_sum_of_powers(d):
    f = BinaryForm.monomial(0, d) + BinaryForm.monomial(d, d)
    s = spectral_decompose(f)
    for e, c in zip(s.eigen, s.coeffs):
        v = e.v
        on_axis = min(abs(v.a), abs(v.b)) <= 1e-12
        if on_axis:
            assert abs(c) == pytest.approx(1.0, abs=1e-10)
        else:
            assert abs(c) <= 1e-10


def test_basis_ordering(rng):
    s = spectral_decompose(kostlan(rng, 6))
    lams = [abs(e.lam) for e in s.eigen]
    assert lams == sorted(lams, reverse=True)


def test_circle_rejected():
    with pytest.raises(DegenerateInput):
        spectral_decompose(circle_power(6))


def test_multiple_roots_warn():
    # D(x^3 y) = x^2 (3 y^2 - x^2) has a double root
    with pytest.warns(MultipleRootsWarning):
        s = spectral_decompose(BinaryForm.monomial(3, 4))
    assert not s.simple
    # three distinct eigenvectors cannot span the four-dimensional singular space
    assert s.rank == 3 and s.residual > 1e-3


def test_critical_points_in_eigenbasis(rng):
    for _ in range(5):
        f = kostlan(rng, 4)
        for c in critical_rank_k(f, 2):
            _, res = express_in_eigenbasis(f, c)
            assert res <= 1e-8


@pytest.mark.parametrize("d", [2, 4, 6, 8, 10])
@pytest.mark.parametrize("phi", [0.0, 0.37])
def test_rez(d, phi):
    r = rez(d, phi)
    assert r.residual <= 1e-10
    assert len(r.summands) == d // 2 + 1
    assert r.c_d == pytest.approx(rez(d, 0.0).c_d, abs=1e-12)


def test_rez_values():
    assert rez(2).c_d == pytest.approx(1.0, abs=1e-12)
    # c_4 from the inner product oracle: |F|^2 / <S, F> with |F|^2 = 8/3, <S, F> = 3
    assert rez(4).c_d == pytest.approx(8 / 9, abs=1e-12)


def test_rez_odd():
    with pytest.raises(OddDegree):
        rez(3)
