import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from dpainleve import kernels
from dpainleve.errors import StencilCrossesSingularity, ZeroArgument
from dpainleve.specialfn import FdConfig, fd_derivative, li2, li2_array, li2_region, principal_log

ZETA2 = math.pi ** 2 / 6

# mpmath.polylog(2, z) at 30 digits; real z > 1 taken just below the cut
REFERENCE = [
    (0.5, 0.5822405264650125),
    (-1, -0.8224670334241132),
    (2, 2.4674011002723395 - 2.177586090303602j),
    (3, 2.3201804233130985 - 3.4513922952232026j),
    (-0.5 + 0.5j, -0.48347280636107853 + 0.4001561537420076j),
    (0.5 + 0.8660254037844386j, 0.2741556778080378 + 1.0149416064096535j),
    (1.5 + 0.2j, 1.9895165024320542 + 1.387727336741074j),
    (10 - 3j, -0.42811265662201115 - 6.714354948863829j),
    (0.9999 + 0.01j, 1.6290198153981599 + 0.055976625027829456j),
    (-20, -6.08275148390949),
    (1j, -0.2056167583560283 + 0.915965594177219j),
]

finite = st.floats(-6, 6, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


def rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


@pytest.mark.parametrize("z,expected", REFERENCE)
def test_li2_reference_values(z, expected):
    assert rel(li2(z), expected) < 2e-15


def test_li2_special_points():
    assert li2(0) == 0
    assert abs(li2(1) - ZETA2) < 1e-15
    assert abs(li2(-1) + ZETA2 / 2) < 1e-15
    # Landen-type value: Li2(1/2) = pi^2/12 - log(2)^2/2
    assert abs(li2(0.5) - (ZETA2 / 2 - math.log(2) ** 2 / 2)) < 1e-15


def test_li2_cut_is_approached_from_below():
    for x in (1.5, 2.0, 7.0, 1e3):
        v = li2(x)
        assert abs(v.imag + math.pi * math.log(x)) < 1e-12 * max(1, math.log(x))
        below = li2(complex(x, -1e-13))
        assert abs(v - below) < 1e-9


@pytest.mark.parametrize("seed", [0, 1])
def test_li2_against_mpmath_random(seed):
    rng = np.random.default_rng(seed)
    zs = rng.normal(scale=2.0, size=200) + 1j * rng.normal(scale=2.0, size=200)
    got = li2_array(zs)
    for z, v in zip(zs, got):
        ref = complex(mpmath.polylog(2, mpmath.mpc(z)))
        assert rel(v, ref) < 1e-14, z


def test_li2_unit_circle_near_sixth_roots():
    # the hardest region for plain series + functional equations
    for t in np.linspace(-math.pi, math.pi, 73):
        z = cmath.exp(1j * t) * (1 + 1e-9)
        ref = complex(mpmath.polylog(2, mpmath.mpc(z)))
        assert rel(li2(z), ref) < 1e-14


@given(cplx)
def test_reflection(z):
    assume(abs(z) > 1e-3 and abs(1 - z) > 1e-3)
    # off the real axis only, where the identity needs no branch bookkeeping
    assume(abs(z.imag) > 1e-6)
    lhs = li2(z) + li2(1 - z)
    rhs = ZETA2 - cmath.log(z) * cmath.log(1 - z)
    assert rel(lhs, rhs) < 1e-12


@given(cplx)
def test_inversion(z):
    assume(abs(z) > 1e-3 and abs(z.imag) > 1e-6)
    lhs = li2(z) + li2(1 / z)
    rhs = -ZETA2 - 0.5 * cmath.log(-z) ** 2
    assert rel(lhs, rhs) < 1e-12


@given(cplx)
def test_duplication(z):
    assume(abs(z) > 1e-3 and abs(z.imag) > 1e-3)
    assume(abs(z * z) < 30)
    assert rel(li2(z * z), 2 * (li2(z) + li2(-z))) < 1e-12


@given(st.builds(complex, st.floats(-3, 3), st.floats(0.05, 3)))
def test_derivative_matches_log(z):
    assume(abs(z) > 0.05)
    d = fd_derivative(li2, z)
    exact = -cmath.log(1 - z) / z
    assert abs(d.value - exact) <= max(1e-7 * (1 + abs(exact)), 10 * d.error)


@given(st.builds(complex, st.floats(-3, 3), st.floats(0.1, 3)), st.floats(0, 2 * math.pi))
def test_cauchy_riemann(z, theta):
    # a holomorphic function has the same derivative in every direction
    d0 = fd_derivative(li2, z).value
    d1 = fd_derivative(li2, z, direction=cmath.exp(1j * theta)).value
    assert abs(d0 - d1) < 1e-7 * (1 + abs(d0))


def test_three_paths_agree():
    rng = np.random.default_rng(7)
    zs = rng.normal(scale=3.0, size=300) + 1j * rng.normal(scale=3.0, size=300)
    zs = np.concatenate([zs, [0, 1, -1, 2.0, 0.5, 1j, -1j, 3 + 0j]])
    py = np.array([kernels.li2_py(complex(z)) for z in zs])
    npy = kernels.li2_array_numpy(zs)
    assert np.allclose(py, npy, rtol=1e-14, atol=1e-15)
    if kernels.HAVE_NUMBA:
        nb = kernels.li2_loop_nb(zs.astype(np.complex128))
        assert np.allclose(py, nb, rtol=1e-14, atol=1e-15)


def test_li2_region_labels():
    assert li2_region(0) == "exact"
    assert li2_region(1) == "exact"
    assert li2_region(0.3) == "series"
    assert li2_region(0.9) == "reflection+series"
    assert li2_region(-0.9) == "bernoulli"
    assert li2_region(5) == "inversion+series"
    assert li2_region(1.5) == "inversion+reflection+series"


def test_principal_log():
    assert principal_log(-1) == 1j * math.pi
    assert principal_log(complex(-1, -0.0)) == 1j * math.pi
    assert principal_log(1) == 0
    with pytest.raises(ZeroArgument):
        principal_log(0)


def test_fd_config_validation(monkeypatch):
    with pytest.raises(ValueError):
        FdConfig(base_step=0)
    with pytest.raises(ValueError):
        FdConfig(base_step=0.1)
    with pytest.raises(ValueError):
        FdConfig(richardson_levels=0)
    monkeypatch.setenv("DP_FD_STEP", "2e-4")
    assert FdConfig.from_env().base_step == 2e-4


def test_fd_polynomial_is_exact_enough():
    d = fd_derivative(lambda z: z ** 3, 1.5 + 0.5j)
    assert abs(d.value - 3 * (1.5 + 0.5j) ** 2) < 1e-9
    assert d.error < 1e-8


def test_fd_detects_pole():
    with pytest.raises(StencilCrossesSingularity):
        fd_derivative(lambda z: 1 / z if z != 0 else 1 / 0, 0.0)
    with pytest.raises(StencilCrossesSingularity):
        fd_derivative(lambda z: 1 / z, 1e-7)


def test_fd_detects_log_cut():
    # the stencil straddles the negative real axis
    with pytest.raises(StencilCrossesSingularity):
        fd_derivative(lambda z: cmath.log(z), -1.0, direction=1j)
