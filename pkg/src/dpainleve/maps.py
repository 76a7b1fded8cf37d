"""One-step birational maps (f, g) -> (fbar, gbar).

Every family writes its map as two implicit relations; the forward step
solves the first for gbar (it is linear in gbar) and then evaluates fbar
from the second with the evolved parameters.

Two routes exist for the matrix families:

``"matrix"``
    The generic formulas driven by the printed coefficient matrix.
``"canonical"``
    The form consistent with the generating function. It coincides with the
    matrix route except for the surfaces in :data:`KNOWN_DISCREPANCIES`,
    where the printed matrix and the printed Hamiltonian disagree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SingularDenominator, UnsupportedFamily, ZeroCoordinate
from .model import (SING_REL, BiquadMatrix, EquationSpec, Family, ParameterSet, PhasePoint,
                    SurfaceType, evolve_params, matrix_for)

S = SurfaceType

KNOWN_DISCREPANCIES = {
    S.A7prime: "matrix route gives gbar with the opposite sign of the W-derived "
               "g = (1-f)/(gbar f (a0-f)); fbar = 1/(f gbar^2) is unaffected",
    S.A5: "printed matrix has m21 = b1/a2 but W_A5 implies b1/a1; the matrix "
          "route's gbar is a2/a1 times the W-derived one",
    S.D4: "printed matrix and printed W_D4 disagree in the a3 terms; the matrix "
          "route's gbar exceeds the printed one by 2 a3 f/(f-1)",
}

EXPLICIT_SURFACES = (S.E7, S.A7prime, S.D4)


@dataclass(frozen=True)
class StepResult:
    next: PhasePoint
    next_params: ParameterSet
    diagnostics: list = field(default_factory=list)


def _ratio(num, den, name, diags):
    mag = abs(den)
    if mag < SING_REL * (1.0 + abs(num)):
        raise SingularDenominator(name, mag)
    diags.append((name, mag))
    return num / den


def _quad(a, b, c, x):
    return (a * x + b) * x + c


def canonical_matrix(surface: SurfaceType, params: ParameterSet) -> BiquadMatrix:
    """Printed matrix with the corrections needed to match the Hamiltonian.

    Only A5 can be repaired at the matrix level (m21 enters the first
    relation alone); A7' and D4 use their printed explicit systems instead.
    """
    m = matrix_for(surface, params)
    if surface is S.A5:
        rows = m.rows.copy()
        rows[0, 1] = params["b1"] / params["a1"]
        m = BiquadMatrix(rows)
    return m


# --- biquadratic ------------------------------------------------------------

def biquadratic_step(spec: EquationSpec, p: PhasePoint, route: str = "matrix") -> StepResult:
    if spec.family is not Family.BIQUADRATIC:
        raise UnsupportedFamily(f"{spec.surface.value} is not biquadratic")
    if route == "explicit":
        return explicit_step(spec, p)
    f, g = complex(p.f), complex(p.g)
    nxt = evolve_params(spec.params)
    m = matrix_for(spec.surface, spec.params)
    mb = matrix_for(spec.surface, nxt)
    diags = []
    r1 = _ratio(_quad(m.m(1, 2), m.m(1, 1), m.m(1, 0), f),
                _quad(m.m(2, 2), m.m(2, 1), m.m(2, 0), f), "m22 f^2+m21 f+m20", diags)
    gb = -g - r1
    r2 = _ratio(_quad(mb.m(2, 1), mb.m(1, 1), mb.m(0, 1), gb),
                _quad(mb.m(2, 2), mb.m(1, 2), mb.m(0, 2), gb), "mb22 gb^2+mb12 gb+mb02", diags)
    return StepResult(PhasePoint(-f - r2, gb), nxt, diags)


# --- multiplicative ---------------------------------------------------------

def _matrix_multiplicative(nxt, f, g, m, mb):
    diags = []
    gb = _ratio(_quad(m.m(0, 2), m.m(0, 1), m.m(0, 0), f),
                g * _quad(m.m(2, 2), m.m(2, 1), m.m(2, 0), f), "g (m22 f^2+m21 f+m20)", diags)
    fb = _ratio(_quad(mb.m(2, 0), mb.m(1, 0), mb.m(0, 0), gb),
                f * _quad(mb.m(2, 2), mb.m(1, 2), mb.m(0, 2), gb), "f (mb22 gb^2+mb12 gb+mb02)", diags)
    return StepResult(PhasePoint(fb, gb), nxt, diags)


def multiplicative_step(spec: EquationSpec, p: PhasePoint, route: str = "canonical") -> StepResult:
    """g gbar = N(f)/D(f), f fbar = Nbar(gbar)/Dbar(gbar); see module docstring for routes."""
    if spec.family is not Family.MULTIPLICATIVE:
        raise UnsupportedFamily(f"{spec.surface.value} is not multiplicative")
    f, g = complex(p.f), complex(p.g)
    if f == 0:
        raise ZeroCoordinate("f")
    if g == 0:
        raise ZeroCoordinate("g")
    nxt = evolve_params(spec.params)
    if route == "matrix":
        m, mb = matrix_for(spec.surface, spec.params), matrix_for(spec.surface, nxt)
    elif route in ("canonical", "explicit"):
        if spec.surface is S.A7prime:
            return explicit_step(spec, p)
        if route == "explicit":
            raise UnsupportedFamily(f"no printed explicit system for {spec.surface.value}")
        m, mb = canonical_matrix(spec.surface, spec.params), canonical_matrix(spec.surface, nxt)
    else:
        raise ValueError(f"unknown route {route!r}")
    return _matrix_multiplicative(nxt, f, g, m, mb)


# --- mixed (D4) -------------------------------------------------------------

def mixed_step(spec: EquationSpec, p: PhasePoint, route: str = "canonical") -> StepResult:
    """Additive first relation, multiplicative second relation.

    The canonical route is the printed explicit D4 system; ``route="matrix"``
    uses the printed M_D4 in the generic formulas.
    """
    if spec.family is not Family.MIXED:
        raise UnsupportedFamily(f"{spec.surface.value} is not of mixed type")
    f, g = complex(p.f), complex(p.g)
    if f == 0:
        raise ZeroCoordinate("f")
    if route in ("canonical", "explicit"):
        return explicit_step(spec, p)
    if route != "matrix":
        raise ValueError(f"unknown route {route!r}")
    nxt = evolve_params(spec.params)
    m, mb = matrix_for(spec.surface, spec.params), matrix_for(spec.surface, nxt)
    diags = []
    r1 = _ratio(_quad(m.m(1, 2), m.m(1, 1), m.m(1, 0), f),
                _quad(m.m(2, 2), m.m(2, 1), m.m(2, 0), f), "m22 f^2+m21 f+m20", diags)
    gb = -g - r1
    fb = _ratio(_quad(mb.m(2, 0), mb.m(1, 0), mb.m(0, 0), gb),
                f * _quad(mb.m(2, 2), mb.m(1, 2), mb.m(0, 2), gb), "f (mb22 gb^2+mb12 gb+mb02)", diags)
    return StepResult(PhasePoint(fb, gb), nxt, diags)


# --- printed explicit systems -------------------------------------------------

def _term(coef, den, name, diags):
    """coef/den; the term is absent when coef == 0."""
    if coef == 0:
        return 0j
    return _ratio(coef, den, name, diags)


def explicit_step(spec: EquationSpec, p: PhasePoint) -> StepResult:
    """Printed worked examples (E7, A7', D4), solved forward."""
    f, g = complex(p.f), complex(p.g)
    a, nxt = spec.params, evolve_params(spec.params)
    diags = []
    if spec.surface is S.E7:
        gb = -g + a["s"] + f * f
        fb = -f - _ratio(nxt["a1"], gb, "gb", diags)
    elif spec.surface is S.A7prime:
        if f == 0:
            raise ZeroCoordinate("f")
        if g == 0:
            raise ZeroCoordinate("g")
        a0 = a["a0"]
        gb = _ratio(1 - f, g * f * (a0 - f), "g f (a0-f)", diags)
        fb = _ratio(1, f * gb * gb, "f gb^2", diags)
    elif spec.surface is S.D4:
        if f == 0:
            raise ZeroCoordinate("f")
        a1, a2, a3, a4, s = (a[k] for k in ("a1", "a2", "a3", "a4", "s"))
        big = a1 + 2 * a2 + a3 + a4
        gb = (-g - a1 - 2 * a2 - 2 * a3 + _term(a3, 1 - f, "1-f", diags)
              + _term(big, 1 - f / s, "1-f/s", diags))
        b1, b2, b4, sb = nxt["a1"], nxt["a2"], nxt["a4"], nxt["s"]
        fb = _ratio(sb * gb * (gb - b4), f * (gb + b1 + b2) * (gb + b2),
                    "f (gb+a1+a2)(gb+a2)", diags)
    else:
        raise UnsupportedFamily(f"no printed explicit system for {spec.surface.value}")
    return StepResult(PhasePoint(fb, gb), nxt, diags)


def predicted_matrix_step(spec: EquationSpec, p: PhasePoint) -> PhasePoint:
    """Matrix-route output predicted from the canonical step and the
    documented discrepancy; equal to the matrix route iff the discrepancy is
    exactly the documented one."""
    f = complex(p.f)
    can = explicit_step(spec, p) if spec.surface in EXPLICIT_SURFACES else step(spec, p)
    gb = can.next.g
    a = spec.params
    if spec.surface is S.A7prime:
        gb_m = -gb
    elif spec.surface is S.A5:
        gb_m = gb * a["a2"] / a["a1"]
    elif spec.surface is S.D4:
        gb_m = gb + 2 * a["a3"] * f / (f - 1)
    else:
        return can.next
    mb = matrix_for(spec.surface, can.next_params)
    fb_m = _quad(mb.m(2, 0), mb.m(1, 0), mb.m(0, 0), gb_m) / (f * _quad(mb.m(2, 2), mb.m(1, 2), mb.m(0, 2), gb_m))
    return PhasePoint(fb_m, gb_m)


# --- q-P(A2) ----------------------------------------------------------------

def qpa2_relation_residuals(spec: EquationSpec, f, g, gb, fb) -> tuple[float, float]:
    """Relative residuals of the two printed product relations."""
    b = {k: spec.params[f"b{k}"] for k in range(1, 9)}
    q = spec.params["q"]
    lhs1 = (f * g - 1) * (f * gb - 1) / (q * b[7] * b[8])
    rhs1 = ((f - b[1]) * (f - b[2]) * (f - b[3]) * (f - b[4])) / ((f - b[5]) * (f - b[6]))
    lhs2 = (f * gb - 1) * (fb * gb - 1) / (q * b[5] * b[6])
    rhs2 = ((gb - 1 / b[1]) * (gb - 1 / b[2]) * (gb - 1 / b[3]) * (gb - 1 / b[4])
            / ((gb - q * b[7]) * (gb - q * b[8])))
    return (abs(lhs1 - rhs1) / (1 + max(abs(lhs1), abs(rhs1))),
            abs(lhs2 - rhs2) / (1 + max(abs(lhs2), abs(rhs2))))


def qpa2_step(spec: EquationSpec, p: PhasePoint) -> StepResult:
    """Solve the first product relation for gbar (linear after clearing
    f gbar - 1), then the second for fbar."""
    if spec.family is not Family.QPA2:
        raise UnsupportedFamily(f"{spec.surface.value} is not q-P(A2)")
    f, g = complex(p.f), complex(p.g)
    if f == 0:
        raise ZeroCoordinate("f")
    b = {k: spec.params[f"b{k}"] for k in range(1, 9)}
    q = spec.params["q"]
    nxt = evolve_params(spec.params)
    diags = []
    num1 = q * b[7] * b[8] * (f - b[1]) * (f - b[2]) * (f - b[3]) * (f - b[4])
    rhs1 = _ratio(num1, (f - b[5]) * (f - b[6]), "(f-b5)(f-b6)", diags)
    fgb_m1 = _ratio(rhs1, f * g - 1, "fg-1", diags)
    gb = _ratio(1 + fgb_m1, f, "f", diags)
    num2 = q * b[5] * b[6] * (gb - 1 / b[1]) * (gb - 1 / b[2]) * (gb - 1 / b[3]) * (gb - 1 / b[4])
    rhs2 = _ratio(num2, (gb - q * b[7]) * (gb - q * b[8]), "(gb-q b7)(gb-q b8)", diags)
    t = _ratio(rhs2, f * gb - 1, "f gb-1", diags)
    fb = _ratio(1 + t, gb, "gb", diags)
    r1, r2 = qpa2_relation_residuals(spec, f, g, gb, fb)
    if max(r1, r2) > 1e-9:
        raise SingularDenominator("product relation residual", min(r1, r2))
    return StepResult(PhasePoint(fb, gb), nxt, diags)


def step(spec: EquationSpec, p: PhasePoint, route: str = "canonical") -> StepResult:
    """Forward step for any family that has one."""
    fam = spec.family
    if fam is Family.BIQUADRATIC:
        return biquadratic_step(spec, p, "matrix" if route == "canonical" else route)
    if fam is Family.MULTIPLICATIVE:
        return multiplicative_step(spec, p, route)
    if fam is Family.MIXED:
        return mixed_step(spec, p, route)
    if fam is Family.QPA2:
        return qpa2_step(spec, p)
    raise UnsupportedFamily(f"{spec.surface.value} has no map (chart only)")
