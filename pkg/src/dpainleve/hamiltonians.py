"""Discrete Hamiltonians (generating functions) W(f, gbar).

For each surface type we provide the closed form of W, its analytic partial
derivatives, and the rule that turns those derivatives into the map:

=============  =======================  ==========================
family         g                        fbar
=============  =======================  ==========================
biquadratic    dW/df                    dW/dgbar
multiplicative exp(f dW/df)             exp(gbar dW/dgbar)
mixed          f dW/df                  exp(dW/dgbar)
=============  =======================  ==========================

Parameters that multiply functions of ``f`` are the current ones; those that
multiply functions of ``gbar`` are the evolved (barred) ones. All logs and
dilogarithms use the principal branch. A log or pole term whose coefficient
is exactly zero is dropped, so degenerate parameter values are allowed.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import LogSingular, SingularDenominator, UnsupportedFamily
from .model import (SING_REL, BiquadMatrix, EquationSpec, Family, SurfaceType,
                    evolve_params)
from .specialfn import li2, li2_region, principal_log

S = SurfaceType
IPI = 1j * math.pi


@dataclass(frozen=True)
class WValue:
    value: complex
    branch_note: str | None = None


class _Terms:
    """Evaluation context: records every log/Li2 argument by term name."""

    def __init__(self, shifts=None):
        self.args = []
        self.notes = []
        self.shifts = shifts or {}

    def log(self, z, term):
        z = complex(z)
        self.args.append(("log", term, z))
        if z == 0:
            raise LogSingular(term)
        return principal_log(z) + 2j * math.pi * self.shifts.get(term, 0)

    def clog(self, c, z, term):
        if c == 0:
            return 0j
        return c * self.log(z, term)

    def li2(self, z, term):
        z = complex(z)
        self.args.append(("li2", term, z))
        region = li2_region(z)
        if region not in ("series", "exact"):
            self.notes.append(f"{term}: {region}")
        return li2(z)

    def pole(self, c, den, term):
        if c == 0:
            return 0j
        den = complex(den)
        if abs(den) <= SING_REL * (1 + abs(c)):
            raise LogSingular(term)
        return c / den

    def xlogx(self, x, term):
        return x * self.log(x, term)


# --- biquadratic family: raw derivatives are (W_f, W_gbar) ---------------------

def _w_d5(t, a, ab, f, gb):
    return (-f * gb - f * a["s"] + gb + t.clog(a["a3"], f - 1, "log(f-1)") + t.clog(a["a1"], f, "log f")
            - t.clog(ab["a2"], gb, "log gbar")
            + t.clog(ab["a1"] + ab["a2"] + ab["a3"], gb + ab["s"], "log(gbar+s)"))


def _d_d5(t, a, ab, f, gb):
    wf = -gb - a["s"] + t.pole(a["a3"], f - 1, "a3/(f-1)") + t.pole(a["a1"], f, "a1/f")
    wg = (-f + 1 - t.pole(ab["a2"], gb, "a2/gbar")
          + t.pole(ab["a1"] + ab["a2"] + ab["a3"], gb + ab["s"], "1/(gbar+s)"))
    return wf, wg


def _w_d6(t, a, ab, f, gb):
    return (-f * gb - f - t.pole(a["a1"], f, "a1/f") + t.clog(a["a1"] + a["b1"], f, "log f")
            + t.clog(ab["s"], gb, "log gbar")
            + t.clog(ab["a1"] + ab["b1"] - ab["s"], gb + 1, "log(gbar+1)"))


def _d_d6(t, a, ab, f, gb):
    wf = -gb - 1 + t.pole(a["a1"], f * f, "a1/f^2") + t.pole(a["a1"] + a["b1"], f, "(a1+b1)/f")
    wg = -f + t.pole(ab["s"], gb, "s/gbar") + t.pole(ab["a1"] + ab["b1"] - ab["s"], gb + 1, "1/(gbar+1)")
    return wf, wg


def _w_d7(t, a, ab, f, gb):
    return (-f * gb - t.pole(1, f, "1/f") + t.pole(ab["s"], gb, "s/gbar")
            - t.clog(a["a1"], f, "log f") - t.clog(ab["a1"], gb, "log gbar"))


def _d_d7(t, a, ab, f, gb):
    wf = -gb + t.pole(1, f * f, "1/f^2") - t.pole(a["a1"], f, "a1/f")
    wg = -f - t.pole(ab["s"], gb * gb, "s/gbar^2") - t.pole(ab["a1"], gb, "a1/gbar")
    return wf, wg


def _w_e6(t, a, ab, f, gb):
    return (-f * gb + f * f / 2 + a["s"] * f + gb * gb / 2 - ab["s"] * gb
            + t.clog(a["a2"], f, "log f") - t.clog(ab["a1"], gb, "log gbar"))


def _d_e6(t, a, ab, f, gb):
    wf = -gb + f + a["s"] + t.pole(a["a2"], f, "a2/f")
    wg = -f + gb - ab["s"] - t.pole(ab["a1"], gb, "a1/gbar")
    return wf, wg


def _w_e7(t, a, ab, f, gb):
    return -f * gb + a["s"] * f + f ** 3 / 3 - t.clog(ab["a1"], gb, "log gbar")


def _d_e7(t, a, ab, f, gb):
    return -gb + a["s"] + f * f, -f - t.pole(ab["a1"], gb, "a1/gbar")


# --- multiplicative family: raw derivatives are (f W_f, gbar W_gbar) -----------

def _w_a3(t, a, ab, f, gb):
    a0, a1, a2, a5 = a["a0"], a["a1"], a["a2"], a["a5"]
    c0, c1, c2, c3, c5 = ab["a0"], ab["a1"], ab["a2"], ab["a3"], ab["a5"]
    lf, lg = t.log(f, "log f"), t.log(gb, "log gbar")
    return (-lf * lg + t.li2(f, "Li2(f)") + t.li2(a0 * f, "Li2(a0 f)") - t.li2(f / a2, "Li2(f/a2)")
            - t.li2(f / (a1 * a2), "Li2(f/(a1 a2))")
            - t.li2(gb, "Li2(gbar)") + t.li2(gb / c3, "Li2(gbar/a3)") - t.li2(c5 * gb, "Li2(a5 gbar)")
            + t.li2(c0 * c1 * c2 ** 2 * c3 * c5 * gb, "Li2(a0 a1 a2^2 a3 a5 gbar)")
            - t.log(a5, "log a5") * lf + t.log(c1 * c2 ** 2, "log(a1 a2^2)") * lg)


def _d_a3(t, a, ab, f, gb):
    a0, a1, a2, a5 = a["a0"], a["a1"], a["a2"], a["a5"]
    c0, c1, c2, c3, c5 = ab["a0"], ab["a1"], ab["a2"], ab["a3"], ab["a5"]
    fwf = (-t.log(gb, "log gbar") - t.log(1 - f, "log(1-f)") - t.log(1 - a0 * f, "log(1-a0 f)")
           + t.log(1 - f / a2, "log(1-f/a2)") + t.log(1 - f / (a1 * a2), "log(1-f/(a1 a2))")
           - t.log(a5, "log a5"))
    gwg = (-t.log(f, "log f") + t.log(1 - gb, "log(1-gbar)") - t.log(1 - gb / c3, "log(1-gbar/a3)")
           + t.log(1 - c5 * gb, "log(1-a5 gbar)")
           - t.log(1 - c0 * c1 * c2 ** 2 * c3 * c5 * gb, "log(1-a0 a1 a2^2 a3 a5 gbar)")
           + t.log(c1 * c2 ** 2, "log(a1 a2^2)"))
    return fwf, gwg


def _w_a4(t, a, ab, f, gb):
    a0, a2, a3, a4 = a["a0"], a["a2"], a["a3"], a["a4"]
    c0, c2, c3, c4 = ab["a0"], ab["a2"], ab["a3"], ab["a4"]
    lf, lg = t.log(f, "log f"), t.log(gb, "log gbar")
    return (-lf * lg + t.li2(f, "Li2(f)") - t.li2(f / a2, "Li2(f/a2)") - t.li2(a0 * a3 * a4 * f, "Li2(a0 a3 a4 f)")
            - t.li2(gb, "Li2(gbar)") - t.li2(c4 * gb, "Li2(a4 gbar)") + t.li2(gb / c3, "Li2(gbar/a3)")
            - t.log(a4, "log a4") * lf + t.log(c2 / (c0 * c3 * c4), "log(a2/(a0 a3 a4))") * lg)


def _d_a4(t, a, ab, f, gb):
    a0, a2, a3, a4 = a["a0"], a["a2"], a["a3"], a["a4"]
    c0, c2, c3, c4 = ab["a0"], ab["a2"], ab["a3"], ab["a4"]
    fwf = (-t.log(gb, "log gbar") - t.log(1 - f, "log(1-f)") + t.log(1 - f / a2, "log(1-f/a2)")
           + t.log(1 - a0 * a3 * a4 * f, "log(1-a0 a3 a4 f)") - t.log(a4, "log a4"))
    gwg = (-t.log(f, "log f") + t.log(1 - gb, "log(1-gbar)") + t.log(1 - c4 * gb, "log(1-a4 gbar)")
           - t.log(1 - gb / c3, "log(1-gbar/a3)") + t.log(c2 / (c0 * c3 * c4), "log(a2/(a0 a3 a4))"))
    return fwf, gwg


def _w_a5(t, a, ab, f, gb):
    a1, b1 = a["a1"], a["b1"]
    c0, c1, c2, d1 = ab["a0"], ab["a1"], ab["a2"], ab["b1"]
    lf, lg = t.log(f, "log f"), t.log(gb, "log gbar")
    lq = t.log(b1 * f / a1, "log(b1 f/a1)")
    return (-lf * lg - t.li2(f, "Li2(f)") - t.li2(f / a1, "Li2(f/a1)")
            - t.li2(d1 * gb / c2, "Li2(b1 gbar/a2)") + t.li2(-c0 * c1 * gb, "Li2(-a0 a1 gbar)")
            - 0.5 * lq * lq + t.log(c1, "log a1") * lg)


def _d_a5(t, a, ab, f, gb):
    a1, b1 = a["a1"], a["b1"]
    c0, c1, c2, d1 = ab["a0"], ab["a1"], ab["a2"], ab["b1"]
    fwf = (-t.log(gb, "log gbar") + t.log(1 - f, "log(1-f)") + t.log(1 - f / a1, "log(1-f/a1)")
           - t.log(b1 * f / a1, "log(b1 f/a1)"))
    gwg = (-t.log(f, "log f") + t.log(1 - d1 * gb / c2, "log(1-b1 gbar/a2)")
           - t.log(1 + c0 * c1 * gb, "log(1+a0 a1 gbar)") + t.log(c1, "log a1"))
    return fwf, gwg


def _w_a6(t, a, ab, f, gb):
    a1, b = a["a1"], a["b"]
    c1, d = ab["a1"], ab["b"]
    lf, lg = t.log(f, "log f"), t.log(gb, "log gbar")
    lfb = t.log(f / b, "log(f/b)")
    return (-lf * lg - t.li2(f, "Li2(f)") - t.li2(gb / (c1 * d), "Li2(gbar/(a1 b))")
            - 0.5 * lfb * lfb - 0.5 * lg * lg + t.log(a1, "log a1") * lf + t.log(c1, "log a1bar") * lg)


def _d_a6(t, a, ab, f, gb):
    a1, b = a["a1"], a["b"]
    c1, d = ab["a1"], ab["b"]
    fwf = -t.log(gb, "log gbar") + t.log(1 - f, "log(1-f)") - t.log(f / b, "log(f/b)") + t.log(a1, "log a1")
    gwg = (-t.log(f, "log f") + t.log(1 - gb / (c1 * d), "log(1-gbar/(a1 b))") - t.log(gb, "log gbar")
           + t.log(c1, "log a1bar"))
    return fwf, gwg


def _w_a7p(t, a, ab, f, gb):
    a0 = a["a0"]
    lf, lg = t.log(f, "log f"), t.log(gb, "log gbar")
    return (-lf * lg - t.li2(f, "Li2(f)") + t.li2(f / a0, "Li2(f/a0)") - 0.5 * lf * lf - lg * lg
            - t.log(a0, "log a0") * lf)


def _d_a7p(t, a, ab, f, gb):
    a0 = a["a0"]
    fwf = (-t.log(gb, "log gbar") + t.log(1 - f, "log(1-f)") - t.log(1 - f / a0, "log(1-f/a0)")
           - t.log(f, "log f") - t.log(a0, "log a0"))
    gwg = -t.log(f, "log f") - 2 * t.log(gb, "log gbar")
    return fwf, gwg


def _w_a7(t, a, ab, f, gb):
    lf, lg = t.log(f, "log f"), t.log(gb, "log gbar")
    la = t.log(-a["a0"] * f, "log(-a0 f)")
    return -lf * lg - t.li2(f, "Li2(f)") - 0.5 * la * la - 0.5 * lg * lg


def _d_a7(t, a, ab, f, gb):
    fwf = -t.log(gb, "log gbar") + t.log(1 - f, "log(1-f)") - t.log(-a["a0"] * f, "log(-a0 f)")
    gwg = -t.log(f, "log f") - t.log(gb, "log gbar")
    return fwf, gwg


# --- mixed: raw derivatives are (f W_f, W_gbar) --------------------------------

def _d4_big(a):
    return a["a1"] + 2 * a["a2"] + a["a3"] + a["a4"]


def _w_d4(t, a, ab, f, gb):
    s, sb = a["s"], ab["s"]
    b1, b2, b4 = ab["a1"], ab["a2"], ab["a4"]
    out = (-gb * t.log(f, "log f") + t.clog(a["a4"], f, "log f") - t.clog(a["a3"], 1 - f, "log(1-f)")
           - t.clog(_d4_big(a), 1 - f / s, "log(1-f/s)"))
    out += gb * (t.log(gb, "log gbar") + t.log(sb, "log s"))
    out += (-t.xlogx(gb + b1 + b2, "log(gbar+a1+a2)") - t.xlogx(gb + b2, "log(gbar+a2)")
            + t.xlogx(gb - b4, "log(gbar-a4)"))
    return out


def _d_d4(t, a, ab, f, gb):
    s, sb = a["s"], ab["s"]
    b1, b2, b4 = ab["a1"], ab["a2"], ab["a4"]
    fwf = (-gb + a["a4"] + t.pole(a["a3"] * f, 1 - f, "a3 f/(1-f)")
           + t.pole(_d4_big(a) * f, s - f, "f/(s-f)"))
    wg = (-t.log(f, "log f") + t.log(gb, "log gbar") + t.log(sb, "log s") - t.log(gb + b1 + b2, "log(gbar+a1+a2)")
          - t.log(gb + b2, "log(gbar+a2)") + t.log(gb - b4, "log(gbar-a4)"))
    return fwf, wg


# --- q-P(A2) ------------------------------------------------------------------

def _qpa2_b(a):
    return {k: a[f"b{k}"] for k in range(1, 9)}, a["q"]


def _qpa2_u(b, f, gb):
    num = (1 - f / b[1]) * (1 - f / b[2]) * (1 - f / b[3]) * (1 - f / b[4])
    return num / ((1 - f * gb) * (1 - f / b[5]) * (1 - f / b[6]))


def _w_qpa2(t, a, ab, f, gb, printed=False):
    """W~_A2. ``printed=True`` gives the closed form exactly as typeset,
    which does not integrate the derivative expressions (two sign slips);
    the default is the corrected antiderivative."""
    b, q = _qpa2_b(a)
    s_u = 1 if printed else -1
    s_b = 1 if printed else -1
    out = t.li2(f * gb, "Li2(f gbar)") + s_u * t.li2(_qpa2_u(b, f, gb), "Li2(u)")
    out += t.log(f, "log f") * t.log(1 - f * gb, "log(1-f gbar)")
    for k in (1, 2, 3, 4):
        out += t.li2(1 - f / b[k], f"Li2(1-f/b{k})")
        out += s_b * t.log(b[k], f"log b{k}") * t.log(1 - f / b[k], f"log(1-f/b{k})")
        out -= t.li2(b[k] * gb, f"Li2(b{k} gbar)")
    for l in (5, 6):
        out -= t.li2(1 - f / b[l], f"Li2(1-f/b{l})")
        out -= s_b * t.log(b[l], f"log b{l}") * t.log(1 - f / b[l], f"log(1-f/b{l})")
    for l in (7, 8):
        out += t.li2(gb / (q * b[l]), f"Li2(gbar/(q b{l}))")
    return out + IPI * t.log(gb, "log gbar")


def qpa2_phi_psi(spec: EquationSpec, f, gb):
    """phi(f, gbar) = g and psi(f, gbar) = fbar of the q-P(A2) system."""
    b, q = _qpa2_b(spec.params)
    t = _Terms()
    pf = (f - b[1]) * (f - b[2]) * (f - b[3]) * (f - b[4])
    phi = (1 + t.pole(q * b[7] * b[8] * pf, (f * gb - 1) * (f - b[5]) * (f - b[6]), "phi")) / f
    rg = (gb - 1 / b[1]) * (gb - 1 / b[2]) * (gb - 1 / b[3]) * (gb - 1 / b[4])
    psi = (1 + t.pole(q * b[5] * b[6] * rg, (f * gb - 1) * (gb - q * b[7]) * (gb - q * b[8]), "psi")) / gb
    return phi, psi


def qpa2_S(spec: EquationSpec, f, gb):
    """sum_k (1/b_k)/(1-f/b_k) - sum_l (1/b_l)/(1-f/b_l) - gbar/(1-f gbar)."""
    b, _ = _qpa2_b(spec.params)
    t = _Terms()
    out = sum(t.pole(1 / b[k], 1 - f / b[k], f"1-f/b{k}") for k in (1, 2, 3, 4))
    out -= sum(t.pole(1 / b[l], 1 - f / b[l], f"1-f/b{l}") for l in (5, 6))
    return out - t.pole(gb, 1 - f * gb, "1-f gbar")


def _d_qpa2(t, a, ab, f, gb):
    """The derivative expressions written in terms of phi and psi:
    dW/df = (phi + f phi_f)/(f phi - 1) log phi,
    dW/dgbar = log(gbar psi - 1)/gbar + f phi_gbar/(f phi - 1) log phi."""
    spec_like = _SpecShim(a)
    phi, psi = qpa2_phi_psi(spec_like, f, gb)
    log_phi = t.log(phi, "log phi")
    # f phi = 1 + K with K = q b7 b8 P(f)/(f gbar - 1): (phi + f phi_f)/(f phi - 1) = (log K)_f = -S
    wf = -qpa2_S(spec_like, f, gb) * log_phi
    wg = t.log(gb * psi - 1, "log(gbar psi-1)") / gb - t.pole(f, f * gb - 1, "f/(f gbar-1)") * log_phi
    return wf, wg


class _SpecShim:
    def __init__(self, params):
        self.params = params


def qpa2_system(spec: EquationSpec, f, gb, dwdf, dwdgb, printed=False):
    """(g, fbar) from the gradient of W~_A2.

    g = exp(-dW/df / S) as printed. For fbar the printed display multiplies
    f gbar/(1 - f gbar) by dW/df; the chain rule gives log phi = -dW/df / S
    there instead, which is the default. ``printed=True`` reproduces the
    typeset formula.
    """
    f, gb = complex(f), complex(gb)
    s = qpa2_S(spec, f, gb)
    log_phi = -dwdf / s
    g = cmath.exp(log_phi)
    corr = dwdf if printed else log_phi
    fbar = (1 + cmath.exp(gb * dwdgb - f * gb / (1 - f * gb) * corr)) / gb
    return g, fbar


# --- registry ---------------------------------------------------------------

_TABLE = {
    S.D5: (_w_d5, _d_d5), S.D6: (_w_d6, _d_d6), S.D7: (_w_d7, _d_d7),
    S.E6: (_w_e6, _d_e6), S.E7: (_w_e7, _d_e7),
    S.A3: (_w_a3, _d_a3), S.A4: (_w_a4, _d_a4), S.A5: (_w_a5, _d_a5),
    S.A6: (_w_a6, _d_a6), S.A7: (_w_a7, _d_a7), S.A7prime: (_w_a7p, _d_a7p),
    S.D4: (_w_d4, _d_d4), S.qPA2: (_w_qpa2, _d_qpa2),
}


def _lookup(spec):
    try:
        return _TABLE[spec.surface]
    except KeyError:
        raise UnsupportedFamily(f"no closed-form discrete Hamiltonian for {spec.surface.value}") from None


def eval_W(spec: EquationSpec, f, gbar, printed: bool = False) -> WValue:
    """Closed-form W(f, gbar).

    ``printed`` only matters for q-P(A2): it selects the literal typeset W~
    instead of the corrected antiderivative.
    """
    wfun, _ = _lookup(spec)
    t = _Terms()
    ab = evolve_params(spec.params)
    if spec.surface is S.qPA2:
        v = wfun(t, spec.params, ab, complex(f), complex(gbar), printed=printed)
    else:
        v = wfun(t, spec.params, ab, complex(f), complex(gbar))
    return WValue(complex(v), "; ".join(t.notes) if t.notes else None)


def raw_derivatives(spec: EquationSpec, f, gbar, log_shifts=None) -> tuple[complex, complex]:
    """Derivatives in the form the family's extraction rule consumes:
    (W_f, W_gbar), (f W_f, gbar W_gbar) or (f W_f, W_gbar).

    ``log_shifts`` maps a log term name to an integer k and moves that log
    to the sheet shifted by 2 pi i k. Only useful for probing branch
    (in)sensitivity.
    """
    _, dfun = _lookup(spec)
    t = _Terms(log_shifts)
    return dfun(t, spec.params, evolve_params(spec.params), complex(f), complex(gbar))



def grad_W(spec: EquationSpec, f, gbar) -> tuple[complex, complex]:
    """(dW/df, dW/dgbar) from the analytically differentiated closed form."""
    f, gbar = complex(f), complex(gbar)
    r1, r2 = raw_derivatives(spec, f, gbar)
    fam = spec.family
    if fam is Family.MULTIPLICATIVE:
        return r1 / f, r2 / gbar
    if fam is Family.MIXED:
        return r1 / f, r2
    return r1, r2


def map_from_W(spec: EquationSpec, f, gbar) -> tuple[complex, complex]:
    """(g, fbar) generated by W at (f, gbar)."""
    f, gbar = complex(f), complex(gbar)
    r1, r2 = raw_derivatives(spec, f, gbar)
    fam = spec.family
    if fam is Family.BIQUADRATIC:
        return r1, r2
    if fam is Family.MULTIPLICATIVE:
        return cmath.exp(r1), cmath.exp(r2)
    if fam is Family.MIXED:
        return r1, cmath.exp(r2)
    return qpa2_system(spec, f, gbar, r1, r2)


def term_arguments(spec: EquationSpec, f, gbar) -> list[tuple[str, str, complex]]:
    """Every (kind, term, argument) that W and its gradient evaluate at
    (f, gbar); kind is ``"log"`` or ``"li2"``. Raises like :func:`eval_W`."""
    wfun, dfun = _lookup(spec)
    t = _Terms()
    ab = evolve_params(spec.params)
    wfun(t, spec.params, ab, complex(f), complex(gbar))
    dfun(t, spec.params, ab, complex(f), complex(gbar))
    return t.args


# --- Hamiltonians of the differential equations --------------------------------

CONTINUOUS_PARAMS = {
    "VI": ("a1", "a2", "a3", "a4", "s"),
    "V": ("a1", "a2", "a3"),
    "III_D6": ("a1", "b1"),
    "III_D7": ("a1",),
    "III_D8": (),
    "IV": ("a1", "a2"),
    "II": ("a1",),
    "I": (),
}


def eval_continuous_H(name: str, params, t, q, p) -> complex:
    """Painleve Hamiltonians H(t; q, p). For VI the parameter s stands for
    the time variable (ds/dt = s(s-1)), so ``t`` is unused there."""
    if name not in CONTINUOUS_PARAMS:
        raise ValueError(f"unknown Painleve Hamiltonian {name!r}")
    missing = [k for k in CONTINUOUS_PARAMS[name] if k not in params]
    if missing:
        raise ValueError(f"H_{name}: missing parameters {missing}")
    a = {k: complex(v) for k, v in params.items()}
    t, q, p = complex(t), complex(q), complex(p)
    if name == "VI":
        a1, a2, a3, a4, s = (a[k] for k in ("a1", "a2", "a3", "a4", "s"))
        return (q * (q - 1) * (q - s) * p * p
                + ((a1 + 2 * a2) * q * (q - 1) + a3 * (s - 1) * q + a4 * s * (q - 1)) * p
                + a2 * (a1 + a2) * q)
    if name == "V":
        et = cmath.exp(t)
        return p * (p + et) * q * (q - 1) - a["a1"] * p * (q - 1) - a["a3"] * p * q + a["a2"] * et * q
    if name == "III_D6":
        return p * (p + 1) * q * q - a["a1"] * p * (q - 1) - a["b1"] * p * q - t * q
    if name == "III_D7":
        return p * p * q * q + a["a1"] * q * p + cmath.exp(t) * p + q
    if name == "III_D8":
        if q == 0:
            raise SingularDenominator("q")
        return p * p * q * q + q * p - q - cmath.exp(t) / q
    if name == "IV":
        return p * q * (p - q - t) - a["a1"] * p - a["a2"] * q
    if name == "II":
        return p * (p - q * q - t) - a["a1"] * q
    return p * p - q ** 3 - t * q


def eval_biquadratic_H(M: BiquadMatrix, f, g) -> complex:
    """(g^2, g, 1) M (f^2, f, 1)^T."""
    f, g = complex(f), complex(g)
    r = M.rows
    fv = (f * f, f, 1.0)
    gv = (g * g, g, 1.0)
    return complex(sum(gv[i] * sum(complex(r[i, j]) * fv[j] for j in range(3)) for i in range(3)))


def eval_biquadratic_H_array(M: BiquadMatrix, f, g) -> np.ndarray:
    """Vectorised :func:`eval_biquadratic_H` (numba kernel when enabled)."""
    return kernels.biquad_array(M.rows, np.asarray(f), np.asarray(g))


def hvi_from_matrix(M: BiquadMatrix, q, p) -> complex:
    """(1/q)(q^2 p^2, q p, 1) M_D4 (q^2, q, 1)^T, i.e. the biquadratic form at
    f = q, g = q p divided by q."""
    q, p = complex(q), complex(p)
    return eval_biquadratic_H(M, q, q * p) / q
