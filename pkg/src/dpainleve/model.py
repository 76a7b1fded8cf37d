"""Equation registry: surface types, parameters, coefficient matrices, charts.

Complex numbers are plain Python ``complex`` values. In JSON they are
``[re, im]`` pairs.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import ChartSingular, ConstraintViolated, UnsupportedFamily

SING_REL = 1e-12


class Family(str, enum.Enum):
    BIQUADRATIC = "biquadratic"
    MULTIPLICATIVE = "multiplicative"
    MIXED = "mixed"
    QPA2 = "qpa2"
    CHART_ONLY = "chart_only"


class SurfaceType(str, enum.Enum):
    D4 = "D4"
    D5 = "D5"
    D6 = "D6"
    D7 = "D7"
    E6 = "E6"
    E7 = "E7"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    A6 = "A6"
    A7 = "A7"
    A7prime = "A7prime"
    qPA2 = "qPA2"
    A2star = "A2star"
    A1star = "A1star"
    A0starstar = "A0starstar"
    A1 = "A1"
    A0star = "A0star"

    @classmethod
    def parse(cls, tag: str) -> "SurfaceType":
        """Accepts the enum value; ``A2`` is read as the q-P(A2) surface."""
        aliases = {"A2": "qPA2", "A7'": "A7prime", "A7p": "A7prime"}
        tag = aliases.get(tag, tag)
        try:
            return cls(tag)
        except ValueError:
            raise ValueError(f"unknown surface type {tag!r}") from None

    @property
    def family(self) -> Family:
        return _FAMILY[self]


_FAMILY = {
    **{t: Family.BIQUADRATIC for t in ("D5", "D6", "D7", "E6", "E7")},
    **{t: Family.MULTIPLICATIVE for t in ("A3", "A4", "A5", "A6", "A7", "A7prime")},
    "D4": Family.MIXED,
    "qPA2": Family.QPA2,
    **{t: Family.CHART_ONLY for t in ("A2star", "A1star", "A0starstar", "A1", "A0star")},
}
_FAMILY = {SurfaceType(k): v for k, v in _FAMILY.items()}

REQUIRED_PARAMS: dict[SurfaceType, tuple[str, ...]] = {
    SurfaceType.D4: ("a1", "a2", "a3", "a4", "s"),
    SurfaceType.D5: ("a1", "a2", "a3", "s"),
    SurfaceType.D6: ("a1", "b1", "s"),
    SurfaceType.D7: ("a1", "s"),
    SurfaceType.E6: ("a1", "a2", "s"),
    SurfaceType.E7: ("a1", "s"),
    SurfaceType.A3: ("a0", "a1", "a2", "a3", "a5"),
    SurfaceType.A4: ("a0", "a2", "a3", "a4"),
    SurfaceType.A5: ("a0", "a1", "a2", "b1"),
    SurfaceType.A6: ("a1", "b"),
    SurfaceType.A7: ("a0",),
    SurfaceType.A7prime: ("a0",),
    SurfaceType.qPA2: tuple(f"b{k}" for k in range(1, 9)),
    SurfaceType.A2star: (),
    SurfaceType.A1star: ("r",),
    SurfaceType.A0starstar: ("r",),
    SurfaceType.A1: ("r",),
    SurfaceType.A0star: ("r",),
}

# parameters that are divided by, or whose logarithm is taken
_NONZERO = {
    SurfaceType.D4: ("s",),
    SurfaceType.A3: ("a0", "a1", "a2", "a3", "a5"),
    SurfaceType.A4: ("a0", "a2", "a3", "a4"),
    SurfaceType.A5: ("a1", "a2"),
    SurfaceType.A6: ("a1", "b"),
    SurfaceType.A7: ("a0",),
    SurfaceType.A7prime: ("a0",),
    SurfaceType.qPA2: tuple(f"b{k}" for k in range(1, 9)),
    SurfaceType.A0star: ("r",),
}


def qpa2_q(values: Mapping[str, complex]) -> complex:
    b = [values[f"b{k}"] for k in range(1, 9)]
    return b[4] * b[5] / (b[0] * b[1] * b[2] * b[3] * b[6] * b[7])


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


class EvolutionKind(str, enum.Enum):
    FROZEN = "frozen"
    BUILTIN_QPA2 = "builtin_qpa2"
    USER_TABLE = "user_table"


@dataclass(frozen=True)
class EvolutionRule:
    """How parameters change over one step.

    ``table`` maps a parameter name to ``(scale, shift)``; the update is
    ``new = scale * old + shift``. Names absent from the table are frozen.
    """

    kind: EvolutionKind = EvolutionKind.FROZEN
    table: Mapping[str, tuple[complex, complex]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "kind", EvolutionKind(self.kind))
        object.__setattr__(self, "table", MappingProxyType(
            {k: (complex(a), complex(b)) for k, (a, b) in dict(self.table).items()}))
        if self.kind is not EvolutionKind.USER_TABLE and self.table:
            raise ValueError("a table is only meaningful for kind 'user_table'")


@dataclass(frozen=True)
class ParameterSet:
    values: Mapping[str, complex]
    evolution: EvolutionRule = EvolutionRule()

    def __post_init__(self):
        object.__setattr__(self, "values", MappingProxyType({k: complex(v) for k, v in dict(self.values).items()}))

    def __getitem__(self, name: str) -> complex:
        return self.values[name]

    def replace(self, **values) -> "ParameterSet":
        new = dict(self.values)
        new.update(values)
        return ParameterSet(new, self.evolution)


@dataclass(frozen=True)
class PhasePoint:
    f: complex
    g: complex

    def __post_init__(self):
        for name in ("f", "g"):
            v = getattr(self, name)
            if not math.isfinite(abs(complex(v))):
                raise ValueError(f"phase point coordinate {name} is not finite: {v!r}")

    def __iter__(self):
        yield self.f
        yield self.g


@dataclass(frozen=True)
class EquationSpec:
    surface: SurfaceType
    params: ParameterSet

    @property
    def family(self) -> Family:
        return self.surface.family


def make_spec(surface, values: Mapping[str, complex] | None = None, evolution: EvolutionRule | None = None,
              ) -> EquationSpec:
    """Validated :class:`EquationSpec`.

    For q-P(A2) the derived parameter ``q`` is added when absent and checked
    against b5 b6 / (b1 b2 b3 b4 b7 b8) when present; the default evolution
    there is ``builtin_qpa2``, elsewhere ``frozen``.
    """
    surface = surface if isinstance(surface, SurfaceType) else SurfaceType.parse(surface)
    values = {k: complex(v) for k, v in dict(values or {}).items()}
    required = REQUIRED_PARAMS[surface]
    allowed = set(required) | ({"q"} if surface is SurfaceType.qPA2 else set())
    missing = [k for k in required if k not in values]
    extra = sorted(set(values) - allowed)
    if missing:
        raise ValueError(f"{surface.value}: missing parameters {missing}")
    if extra:
        raise ValueError(f"{surface.value}: unexpected parameters {extra}")
    for name in _NONZERO.get(surface, ()):
        if values[name] == 0:
            raise ValueError(f"{surface.value}: parameter {name} must be nonzero")
    for k, v in values.items():
        if not math.isfinite(abs(v)):
            raise ValueError(f"parameter {k} is not finite")

    if evolution is None:
        evolution = EvolutionRule(EvolutionKind.BUILTIN_QPA2 if surface is SurfaceType.qPA2
                                  else EvolutionKind.FROZEN)
    if evolution.kind is EvolutionKind.BUILTIN_QPA2 and surface is not SurfaceType.qPA2:
        raise ValueError("builtin_qpa2 evolution is only valid for qPA2")
    unknown = sorted(set(evolution.table) - set(required))
    if unknown:
        raise ValueError(f"evolution table names unknown parameters {unknown}")

    if surface is SurfaceType.qPA2:
        q = qpa2_q(values)
        if "q" in values:
            if _rel(values["q"], q) > 1e-12:
                raise ConstraintViolated(
                    f"q = {values['q']} but b5 b6/(b1 b2 b3 b4 b7 b8) = {q}")
        else:
            values["q"] = q
        if evolution.kind is EvolutionKind.USER_TABLE and "q" in evolution.table:
            raise ValueError("q is derived; evolve the b parameters instead")
    return EquationSpec(surface, ParameterSet(values, evolution))


def evolve_params(params: ParameterSet) -> ParameterSet:
    """Parameters after one step of the map (the barred parameters)."""
    rule = params.evolution
    if rule.kind is EvolutionKind.FROZEN:
        return params
    new = dict(params.values)
    if rule.kind is EvolutionKind.BUILTIN_QPA2:
        q = new["q"]
        for k in (5, 6, 7, 8):
            new[f"b{k}"] = q * new[f"b{k}"]
        recomputed = qpa2_q(new)
        if _rel(recomputed, q) > 1e-12:
            raise ConstraintViolated(f"q drifted to {recomputed} (expected {q})")
    else:
        for name, (scale, shift) in rule.table.items():
            new[name] = scale * new[name] + shift
        if "q" in new and all(f"b{k}" in new for k in range(1, 9)):
            q = qpa2_q(new)
            if _rel(q, new["q"]) > 1e-12:
                raise ConstraintViolated(f"user evolution breaks the q constraint ({q} vs {new['q']})")
    return ParameterSet(new, rule)


# --- coefficient matrices -------------------------------------------------

def _matrix_rows(surface: SurfaceType, p: Mapping[str, complex]):
    S = SurfaceType
    if surface is S.D5:
        a1, a2, a3, s = p["a1"], p["a2"], p["a3"], p["s"]
        return [[1, -1, 0], [s, -a1 - a3 - s, a1], [0, s * a2, 0]]
    if surface is S.D6:
        a1, b1, s = p["a1"], p["b1"], p["s"]
        return [[1, 0, 0], [1, -a1 - b1, -a1], [0, -s, 0]]
    if surface is S.D7:
        a1, s = p["a1"], p["s"]
        return [[1, 0, 0], [0, a1, -1], [0, s, 0]]
    if surface is S.E6:
        a1, a2, s = p["a1"], p["a2"], p["s"]
        return [[0, 1, 0], [-1, -s, -a2], [0, -a1, 0]]
    if surface is S.E7:
        a1, s = p["a1"], p["s"]
        return [[0, 0, 1], [-1, 0, -s], [0, -a1, 0]]
    if surface is S.A7:
        a0 = p["a0"]
        return [[0, -a0, 0], [1, 0, 0], [0, -1, 1]]
    if surface is S.A7prime:
        a0 = p["a0"]
        return [[1, -a0, 0], [0, 0, 0], [0, -1, 1]]
    if surface is S.A6:
        a1, b = p["a1"], p["b"]
        return [[0, 1 / b, 0], [1, 0, -1 / b], [0, -a1, a1]]
    if surface is S.A5:
        a0, a1, a2, b1 = p["a0"], p["a1"], p["a2"], p["b1"]
        return [[0, b1 / a2, 0], [a0, 0, -b1 / a2], [1 / a1, -1 - 1 / a1, 1]]
    if surface is S.A4:
        a0, a2, a3, a4 = p["a0"], p["a2"], p["a3"], p["a4"]
        return [[0, 1, -1],
                [a0 / a2, 0, 1 + 1 / a4],
                [-a0 * a3 / a2, a0 * a3 + 1 / (a2 * a4), -1 / a4]]
    if surface is S.A3:
        a0, a1, a2, a3, a5 = p["a0"], p["a1"], p["a2"], p["a3"], p["a5"]
        return [[a0 * a5, -(1 + a0) * a5, a5],
                [-1 / (a1 * a2 ** 2 * a3) - a0 * a3 * a5, 0, -1 - a5],
                [1 / (a1 * a2 ** 2), -(1 + a1) / (a1 * a2), 1]]
    if surface is S.D4:
        a1, a2, a3, a4, s = p["a1"], p["a2"], p["a3"], p["a4"], p["s"]
        return [[1, -1 - s, s],
                [a1 + 2 * a2, -a1 - 2 * a2 + (s - 1) * a3 + s * a4, -s * a4],
                [a2 * (a1 + a2), 0, 0]]
    raise UnsupportedFamily(f"no coefficient matrix for {surface.value}")


@dataclass(frozen=True)
class BiquadMatrix:
    """3x3 coefficients of (g^2, g, 1) M (f^2, f, 1)^T.

    ``rows`` is stored in printed order, so ``rows[0] = (m22, m21, m20)``;
    use :meth:`m` for the (g^2, g, 1) M (f^2, f, 1)^T index convention.
    """

    rows: np.ndarray

    def __post_init__(self):
        arr = np.array(self.rows, dtype=np.complex128).reshape(3, 3)
        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)

    def m(self, i: int, j: int) -> complex:
        """Entry m_ij, i = power of g, j = power of f."""
        return complex(self.rows[2 - i, 2 - j])

    def __eq__(self, other):
        return isinstance(other, BiquadMatrix) and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash(self.rows.tobytes())


def builtin_matrix(spec: EquationSpec) -> BiquadMatrix:
    if spec.family not in (Family.BIQUADRATIC, Family.MULTIPLICATIVE, Family.MIXED):
        raise UnsupportedFamily(f"{spec.surface.value} ({spec.family.value}) has no coefficient matrix")
    return BiquadMatrix(_matrix_rows(spec.surface, spec.params.values))


def matrix_for(surface: SurfaceType, params: ParameterSet) -> BiquadMatrix:
    return BiquadMatrix(_matrix_rows(surface, params.values))


# --- exceptional charts ---------------------------------------------------

CHART_SURFACES = (SurfaceType.A2star, SurfaceType.A1star, SurfaceType.A0starstar,
                  SurfaceType.qPA2, SurfaceType.A1, SurfaceType.A0star)


def _check_den(den, num, name):
    if abs(den) <= SING_REL * (1 + abs(num)):
        raise ChartSingular(name)


def exceptional_chart(surface, point: PhasePoint, r=None):
    """Chart coordinates (F, G) on the exceptional surfaces.

    On A2*, A1*, A0** the symplectic form is dG ^ dlog F; on A2 (the q-P(A2)
    surface), A1, A0* it is dlog G ^ dlog F. Exact arithmetic is preserved
    for ``Fraction`` inputs.
    """
    surface = surface if isinstance(surface, SurfaceType) else SurfaceType.parse(surface)
    f, g = point.f, point.g
    S = SurfaceType
    if surface is S.A2star:
        return f + g, g
    if surface is S.A1star:
        _check_den(f + g, 2 * r, "f+g")
        return 1 - 2 * r / (f + g), g
    if surface is S.A0starstar:
        return (f - g) ** 2 - 8 * r ** 2 * (f + g) + 16 * r ** 4, f - g
    if surface is S.qPA2:
        return f * g - 1, g
    if surface is S.A1:
        _check_den(f * g - 1, r ** 2 - 1, "fg-1")
        return 1 - (r ** 2 - 1) / (f * g - 1), g
    if surface is S.A0star:
        _check_den(r, 1, "r")
        return (f + g) ** 2 - (r ** 2 + 1 / r ** 2) * f * g + r ** 2 - 1 / r ** 2, -f / r + r * g
    raise UnsupportedFamily(f"{surface.value} has no exceptional chart")


# --- JSON -----------------------------------------------------------------

def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real + 0.0, z.imag + 0.0]


def complex_from_json(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ValueError(f"expected [re, im], got {v!r}")


def spec_to_json(spec: EquationSpec) -> dict:
    rule = spec.params.evolution
    evo: dict = {"kind": rule.kind.value}
    if rule.kind is EvolutionKind.USER_TABLE:
        evo["table"] = {k: {"scale": complex_to_json(a), "shift": complex_to_json(b)}
                        for k, (a, b) in rule.table.items()}
    return {
        "surface": spec.surface.value,
        "params": {k: complex_to_json(v) for k, v in spec.params.values.items()},
        "evolution": evo,
    }


def spec_from_json(data) -> EquationSpec:
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict) or "surface" not in data:
        raise ValueError("spec JSON must be an object with a 'surface' key")
    params = {k: complex_from_json(v) for k, v in data.get("params", {}).items()}
    evo = data.get("evolution")
    rule = None
    if evo is not None:
        table = {}
        for name, upd in evo.get("table", {}).items():
            table[name] = (complex_from_json(upd.get("scale", [1, 0])),
                           complex_from_json(upd.get("shift", [0, 0])))
        rule = EvolutionRule(EvolutionKind(evo.get("kind", "frozen")), table)
    return make_spec(data["surface"], params, rule)


def load_spec(path) -> EquationSpec:
    with open(path, encoding="utf-8") as fh:
        return spec_from_json(json.load(fh))
