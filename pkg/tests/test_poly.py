import numpy as np
import pytest
from hypothesis import given, strategies as st

from gnets.poly import Poly, PolySystem


def random_poly(rng, nvars, terms=5, max_exp=3):
    out = Poly(nvars)
    for _ in range(terms):
        mono = tuple(int(e) for e in rng.integers(0, max_exp + 1, size=nvars))
        out = out + Poly(nvars, {mono: complex(rng.normal(), rng.normal())})
    return out


@given(st.integers(0, 10**6))
def test_arithmetic_matches_evaluation(seed):
    rng = np.random.default_rng(seed)
    p, q = random_poly(rng, 3), random_poly(rng, 3)
    x = rng.normal(size=3) + 1j * rng.normal(size=3)
    assert (p * q)(x) == pytest.approx(p(x) * q(x))
    assert (p - q)(x) == pytest.approx(p(x) - q(x))
    assert (p ** 2)(x) == pytest.approx(p(x) ** 2)


@given(st.integers(0, 10**6))
def test_substitute_is_composition(seed):
    rng = np.random.default_rng(seed)
    p = random_poly(rng, 2)
    images = [random_poly(rng, 3, terms=3, max_exp=2) for _ in range(2)]
    x = rng.normal(size=3)
    inner = np.array([img(x) for img in images])
    assert p.substitute(images)(x) == pytest.approx(p(inner))


@given(st.integers(0, 10**6))
def test_diff_matches_central_difference(seed):
    rng = np.random.default_rng(seed)
    p = random_poly(rng, 3)
    x = rng.normal(size=3)
    h = 1e-6
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        fd = (p(x + e) - p(x - e)) / (2 * h)
        assert p.diff(i)(x) == pytest.approx(fd, rel=1e-5, abs=1e-6)


@given(st.integers(0, 10**6))
def test_compiled_system_agrees_with_terms(seed):
    rng = np.random.default_rng(seed)
    eqs = [random_poly(rng, 3) for _ in range(3)]
    sysm = PolySystem(eqs)
    x = rng.normal(size=3) + 1j * rng.normal(size=3)
    assert np.allclose(sysm(x), [e(x) for e in eqs])
    jac = sysm.jacobian(x)
    for i, e in enumerate(eqs):
        assert np.allclose(jac[i], [e.diff(v)(x) for v in range(3)])


def test_degree_and_total_degree():
    x = Poly.var(2, 0)
    y = Poly.var(2, 1)
    s = PolySystem([x * x * y - 1, y + 2])
    assert s.degrees == [3, 1]
    assert s.total_degree == 3


def test_chop_removes_cancellation_noise():
    p = Poly(1, {(0,): 1.0, (1,): 1e-17})
    assert p.chop().terms == {(0,): 1.0}
