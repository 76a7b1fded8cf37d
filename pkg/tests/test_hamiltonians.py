import cmath
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import assume, given
from hypothesis import strategies as st

from dpainleve import hamiltonians as H
from dpainleve.errors import LogSingular, SingularDenominator, UnsupportedFamily
from dpainleve.maps import step
from dpainleve.model import BiquadMatrix, PhasePoint, builtin_matrix, make_spec
from dpainleve.specialfn import fd_derivative

D4_ZERO = {"a1": 0, "a2": 0, "a3": 0, "a4": 0, "s": 2}
MULTIPLICATIVE = {
    "A3": {"a0": 0.7 + 0.1j, "a1": 1.3, "a2": -0.8 + 0.4j, "a3": 1.1j, "a5": 0.6},
    "A4": {"a0": 0.5, "a2": 1.4 - 0.2j, "a3": -0.9, "a4": 0.8j},
    "A5": {"a0": 1.2, "a1": -0.7 + 0.7j, "a2": 0.9, "b1": 1.5j},
    "A6": {"a1": 0.8 - 0.3j, "b": 1.6},
    "A7": {"a0": -1.3 + 0.2j},
    "A7prime": {"a0": 2.1 - 0.5j},
}


def close(a, b, tol=1e-12):
    return abs(complex(a) - complex(b)) <= tol * (1 + abs(complex(b)))


# --- spot values ------------------------------------------------------------

def test_w_e7_vanishes():
    assert H.eval_W(make_spec("E7", {"a1": 3.7, "s": 0}), 0, 1).value == 0


def test_w_d7_hand_value():
    assert H.eval_W(make_spec("D7", {"a1": 0, "s": 0}), 1, 1).value == -2


def test_w_a7_hand_value():
    w = H.eval_W(make_spec("A7", {"a0": -1}), 0.5, 1)
    assert abs(w.value + math.pi ** 2 / 12) < 1e-15
    assert w.branch_note is None


def test_branch_note_reports_li2_route():
    w = H.eval_W(make_spec("A6", {"a1": 1, "b": 1}), 3.0 + 0.5j, 0.4)
    assert w.branch_note and "Li2(f)" in w.branch_note


def test_log_singular_names_term():
    with pytest.raises(LogSingular) as exc:
        H.eval_W(make_spec("D5", {"a1": 1, "a2": 1, "a3": 1, "s": 1}), 1, 0.5)
    assert exc.value.term == "log(f-1)"
    with pytest.raises(LogSingular):
        H.eval_W(make_spec("A7", {"a0": 1}), 0, 1)
    # a zero coefficient removes the term, so f = 1 is harmless then
    H.eval_W(make_spec("D5", {"a1": 1, "a2": 1, "a3": 0, "s": 1}), 1, 0.5)


def test_unsupported_surfaces():
    with pytest.raises(UnsupportedFamily):
        H.eval_W(make_spec("A1", {"r": 1}), 1, 1)


def test_e7_gradient_examples():
    assert H.grad_W(make_spec("E7", {"a1": 2, "s": 1}), 2, 1)[0] == 4
    assert H.grad_W(make_spec("E7", {"a1": 2, "s": 1}), 0, 1)[1] == -2


def test_map_examples():
    g, fb = H.map_from_W(make_spec("E7", {"a1": 2, "s": 1}), 0, 1)
    assert (g, fb) == (0, -2)
    g, fb = H.map_from_W(make_spec("A7prime", {"a0": 3}), 2, 1)
    assert close(g, -0.5) and close(fb, 0.5)
    g, fb = H.map_from_W(make_spec("D4", D4_ZERO), 1, -3)
    assert close(g, 3) and close(fb, 2)


# --- symbolic oracle for the gradients ------------------------------------------

f_, g_ = sp.symbols("f gbar")


def _sym_w(surface, a):
    L, Li = sp.log, lambda x: sp.polylog(2, x)
    if surface == "D5":
        return (-f_ * g_ - f_ * a["s"] + g_ + a["a3"] * L(f_ - 1) + a["a1"] * L(f_) - a["a2"] * L(g_)
                + (a["a1"] + a["a2"] + a["a3"]) * L(g_ + a["s"]))
    if surface == "D4":
        s = a["s"]
        big = a["a1"] + 2 * a["a2"] + a["a3"] + a["a4"]
        return (-g_ * L(f_) + a["a4"] * L(f_) - a["a3"] * L(1 - f_) - big * L(1 - f_ / s)
                + g_ * (L(g_) + L(s)) - (g_ + a["a1"] + a["a2"]) * L(g_ + a["a1"] + a["a2"])
                - (g_ + a["a2"]) * L(g_ + a["a2"]) + (g_ - a["a4"]) * L(g_ - a["a4"]))
    if surface == "A3":
        a0, a1, a2, a3, a5 = (a[k] for k in ("a0", "a1", "a2", "a3", "a5"))
        return (-L(f_) * L(g_) + Li(f_) + Li(a0 * f_) - Li(f_ / a2) - Li(f_ / (a1 * a2)) - Li(g_)
                + Li(g_ / a3) - Li(a5 * g_) + Li(a0 * a1 * a2 ** 2 * a3 * a5 * g_)
                - L(a5) * L(f_) + L(a1 * a2 ** 2) * L(g_))
    raise KeyError(surface)


SYM_CASES = {
    "D5": {"a1": sp.Rational(1, 2), "a2": -sp.I, "a3": sp.Rational(3, 10), "s": sp.Rational(11, 10)},
    "D4": {"a1": sp.Rational(3, 10), "a2": -sp.I / 5, "a3": sp.Rational(4, 5), "a4": sp.Rational(1, 2),
           "s": sp.Rational(3, 2) + sp.I / 2},
    "A3": {"a0": sp.Rational(7, 10), "a1": sp.Rational(13, 10), "a2": -sp.Rational(4, 5) + sp.I * 2 / 5,
           "a3": sp.Rational(11, 10) * sp.I, "a5": sp.Rational(3, 5)},
}


@pytest.mark.parametrize("surface", sorted(SYM_CASES))
def test_gradient_against_symbolic_derivative(surface):
    a = SYM_CASES[surface]
    w = _sym_w(surface, a)
    dwf = sp.lambdify((f_, g_), sp.diff(w, f_), "mpmath")
    dwg = sp.lambdify((f_, g_), sp.diff(w, g_), "mpmath")
    spec = make_spec(surface, {k: complex(v) for k, v in a.items()})
    for f, gb in [(0.3 + 0.4j, 0.6 - 0.2j), (-0.5 + 0.2j, 0.25 + 0.5j), (0.2 - 0.6j, -0.4 + 0.3j)]:
        gf, gg = H.grad_W(spec, f, gb)
        assert close(gf, complex(dwf(f, gb)), 1e-12)
        assert close(gg, complex(dwg(f, gb)), 1e-12)


# --- properties -------------------------------------------------------------------

ALL_TYPES = {
    "D5": {"a1": 0.5, "a2": -1j, "a3": 0.3, "s": 1.1},
    "D6": {"a1": 0.4 + 0.2j, "b1": -0.6, "s": 0.9},
    "D7": {"a1": 1.2, "s": -0.4 + 0.3j},
    "E6": {"a1": 0.6, "a2": -0.3j, "s": 0.2},
    "E7": {"a1": 1.5, "s": 0.7j},
    "D4": {"a1": 0.3, "a2": -0.2j, "a3": 0.8, "a4": 0.5, "s": 1.5 + 0.5j},
    **MULTIPLICATIVE,
}

moduli = st.floats(0.2, 1.8)
angles = st.floats(-3.0, 3.0)


@pytest.mark.parametrize("surface", sorted(ALL_TYPES))
@given(rf=moduli, tf=angles, rg=moduli, tg=angles)
def test_gradient_matches_fd(surface, rf, tf, rg, tg):
    spec = make_spec(surface, ALL_TYPES[surface])
    f, gb = cmath.rect(rf, tf), cmath.rect(rg, tg)
    try:
        gf, gg = H.grad_W(spec, f, gb)
        df = fd_derivative(lambda z: H.eval_W(spec, z, gb).value, f)
        dg = fd_derivative(lambda z: H.eval_W(spec, f, z).value, gb)
    except ArithmeticError:
        assume(False)
    assert abs(gf - df.value) <= 1e-6 * (1 + abs(gf))
    assert abs(gg - dg.value) <= 1e-6 * (1 + abs(gg))


@pytest.mark.parametrize("surface", sorted(ALL_TYPES))
@given(rf=moduli, tf=angles, rg=moduli, tg=angles)
def test_map_from_w_inverts_step(surface, rf, tf, rg, tg):
    spec = make_spec(surface, ALL_TYPES[surface])
    f, g = cmath.rect(rf, tf), cmath.rect(rg, tg)
    try:
        r = step(spec, PhasePoint(f, g))
        g2, fb2 = H.map_from_W(spec, f, r.next.g)
    except ArithmeticError:
        assume(False)
    assume(abs(r.next.g) < 1e4 and abs(r.next.f) < 1e4)
    assert abs(g2 - g) <= 1e-9 * (1 + abs(g)) * (1 + abs(r.next.g))
    assert abs(fb2 - r.next.f) <= 1e-9 * (1 + abs(r.next.f)) * (1 + abs(r.next.g))


@pytest.mark.parametrize("surface", sorted(MULTIPLICATIVE))
def test_exponentiated_map_ignores_log_sheets(surface):
    spec = make_spec(surface, MULTIPLICATIVE[surface])
    f, gb = 0.4 + 0.7j, -0.6 + 0.3j
    base = H.map_from_W(spec, f, gb)
    names = {term for kind, term, _ in H.term_arguments(spec, f, gb) if kind == "log"}
    assert names
    for name in sorted(names):
        for k in (-1, 1):
            r1, r2 = H.raw_derivatives(spec, f, gb, {name: k})
            shifted = (cmath.exp(r1), cmath.exp(r2))
            assert close(shifted[0], base[0], 1e-10) and close(shifted[1], base[1], 1e-10), name


# --- continuous and biquadratic Hamiltonians -------------------------------------

def test_continuous_examples():
    assert H.eval_continuous_H("I", {}, 0, 0, 1) == 1
    assert H.eval_continuous_H("II", {"a1": 0}, 0, 0, 1) == 1
    assert H.eval_continuous_H("IV", {"a1": 0, "a2": 0}, 0, 1, 1) == 0
    with pytest.raises(SingularDenominator):
        H.eval_continuous_H("III_D8", {}, 0, 0, 1)
    with pytest.raises(ValueError):
        H.eval_continuous_H("VII", {}, 0, 0, 1)
    with pytest.raises(ValueError):
        H.eval_continuous_H("VI", {"a1": 1}, 0, 0, 1)


def test_continuous_all_names_evaluate():
    params = {"a1": 0.3, "a2": 0.2, "a3": -0.1, "a4": 0.5, "b1": 0.7, "s": 0.4}
    for name, needed in H.CONTINUOUS_PARAMS.items():
        v = H.eval_continuous_H(name, {k: params[k] for k in needed}, 0.1, 0.6, -0.3)
        assert cmath.isfinite(v)


def test_biquadratic_h_examples():
    m = BiquadMatrix([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    assert H.eval_biquadratic_H(m, 2, 3) == 36
    m = builtin_matrix(make_spec("E7", {"a1": 1, "s": 0}))
    assert H.eval_biquadratic_H(m, 1, 1) == -1


def test_biquadratic_h_array_kernel():
    m = builtin_matrix(make_spec("D6", ALL_TYPES["D6"]))
    rng = np.random.default_rng(4)
    f = rng.normal(size=30) + 1j * rng.normal(size=30)
    g = rng.normal(size=30) + 1j * rng.normal(size=30)
    arr = H.eval_biquadratic_H_array(m, f, g)
    for i in range(30):
        assert close(arr[i], H.eval_biquadratic_H(m, f[i], g[i]), 1e-13)


def test_hvi_identity_symbolic():
    q, p, s, a1, a2, a3, a4 = sp.symbols("q p s a1 a2 a3 a4")
    M = sp.Matrix([[1, -1 - s, s],
                   [a1 + 2 * a2, -a1 - 2 * a2 + (s - 1) * a3 + s * a4, -s * a4],
                   [a2 * (a1 + a2), 0, 0]])
    lhs = (sp.Matrix([[q ** 2 * p ** 2, q * p, 1]]) * M * sp.Matrix([q ** 2, q, 1]))[0] / q
    hvi = (q * (q - 1) * (q - s) * p ** 2
           + ((a1 + 2 * a2) * q * (q - 1) + a3 * (s - 1) * q + a4 * s * (q - 1)) * p
           + a2 * (a1 + a2) * q)
    assert sp.simplify(lhs - hvi) == 0


def test_hvi_identity_numeric():
    rng = np.random.default_rng(5)
    vals = {k: complex(*rng.normal(size=2)) for k in ("a1", "a2", "a3", "a4", "s")}
    m = builtin_matrix(make_spec("D4", vals))
    for _ in range(20):
        q, p = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        assert close(H.hvi_from_matrix(m, q, p), H.eval_continuous_H("VI", vals, 0, q, p), 1e-10)


# --- q-P(A2) ----------------------------------------------------------------------

QPA2 = {"b1": 1.2, "b2": 0.8 + 0.1j, "b3": 1.5, "b4": 0.9 - 0.2j,
        "b5": 1.1, "b6": 0.7, "b7": 1.3 + 0.2j, "b8": 0.6}


def test_qpa2_expressed_system_reproduces_step():
    spec = make_spec("qPA2", QPA2)
    f, g = 0.5 + 0.3j, 0.9 - 0.4j
    r = step(spec, PhasePoint(f, g))
    wf, wg = H.grad_W(spec, f, r.next.g)
    g2, fb2 = H.qpa2_system(spec, f, r.next.g, wf, wg)
    assert close(g2, g, 1e-10) and close(fb2, r.next.f, 1e-10)
    _, fb_printed = H.qpa2_system(spec, f, r.next.g, wf, wg, printed=True)
    assert not close(fb_printed, r.next.f, 1e-3)


def test_qpa2_printed_w_differs_from_corrected():
    spec = make_spec("qPA2", QPA2)
    f, gb = 0.5 + 0.3j, 0.4 - 0.2j
    corrected = H.eval_W(spec, f, gb).value
    printed = H.eval_W(spec, f, gb, printed=True).value
    assert abs(corrected - printed) > 1e-3
