"""Principal-branch logarithm, the complex dilogarithm, and a holomorphic
finite-difference engine."""
from __future__ import annotations

import cmath
import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import StencilCrossesSingularity, ZeroArgument

__all__ = [
    "FdConfig",
    "FdResult",
    "fd_derivative",
    "li2",
    "li2_array",
    "li2_region",
    "principal_log",
]

_EPS = np.finfo(float).eps


def principal_log(z) -> complex:
    """log|z| + i Arg z with Arg in (-pi, pi].

    Signed zeros are normalised so that the negative real axis maps to
    ``+i*pi`` (``principal_log(-1) == 1j*pi`` whatever the sign of the zero).
    """
    z = complex(z)
    if z == 0:
        raise ZeroArgument("log(0)")
    if z.imag == 0.0:
        z = complex(z.real, 0.0)
    return cmath.log(z)


def li2(z) -> complex:
    """Dilogarithm Li2(z) = sum z^k/k^2 on the principal branch.

    The cut is [1, inf); values on the cut are the limits from below
    (Im Li2(x) = -pi log x for real x > 1). Relative accuracy is about
    1e-15 everywhere except in the immediate vicinity of z = 1.
    """
    return kernels.li2_scalar(complex(z))


def li2_array(z) -> np.ndarray:
    """Elementwise :func:`li2` over an array (flattened)."""
    return kernels.li2_array(z)


def li2_region(z) -> str:
    """Name of the evaluation route :func:`li2` takes for ``z``.

    ``"series"`` means the Maclaurin series was summed directly; anything
    else means the argument was mapped by inversion and/or reflection or
    handled by the Bernoulli expansion in -log(1-z).
    """
    z = complex(z)
    if z == 0 or z == 1:
        return "exact"
    parts = []
    if abs(z) > 1.0:
        parts.append("inversion")
        z = 1.0 / z
    if z.real > 0.5:
        parts.append("reflection")
        z = 1.0 - z
    parts.append("series" if abs(z) <= 0.5 else "bernoulli")
    return "+".join(parts)


@dataclass(frozen=True)
class FdConfig:
    """Central differences with Richardson extrapolation.

    The step is ``base_step * max(1, |z|)``; each Richardson level halves it
    and removes one more even power of the step from the error.
    """

    base_step: float = 1e-5
    richardson_levels: int = 2

    def __post_init__(self):
        if not (0.0 < self.base_step <= 1e-2):
            raise ValueError(f"base_step must lie in (0, 1e-2], got {self.base_step}")
        if not (1 <= self.richardson_levels <= 4):
            raise ValueError(f"richardson_levels must lie in [1, 4], got {self.richardson_levels}")

    @classmethod
    def from_env(cls, **overrides) -> "FdConfig":
        """Default config, with ``DP_FD_STEP`` overriding ``base_step``."""
        raw = os.environ.get("DP_FD_STEP")
        if raw is not None and "base_step" not in overrides:
            overrides["base_step"] = float(raw)
        return cls(**overrides)


@dataclass(frozen=True)
class FdResult:
    value: complex
    error: float

    def __complex__(self):
        return complex(self.value)


def fd_derivative(fun, z, cfg: FdConfig | None = None, direction: complex = 1.0) -> FdResult:
    """Derivative of a holomorphic ``fun`` at ``z``.

    The stencil runs along ``direction`` (a unit complex number; 1 means the
    real direction of the argument). For a holomorphic function every
    direction gives the same derivative, which is what the Cauchy-Riemann
    checks exploit.

    Returns the extrapolated value with an error estimate: the change made
    by the last Richardson level plus a rounding bound.

    Raises
    ------
    StencilCrossesSingularity
        A stencil evaluation raised or returned a non-finite value, or the
        Richardson table does not converge.
    """
    cfg = cfg or FdConfig()
    z = complex(z)
    d = complex(direction)
    d = d / abs(d)
    h = cfg.base_step * max(1.0, abs(z))
    levels = cfg.richardson_levels

    col = []
    fmax = 0.0
    for k in range(levels + 1):
        hk = h / 2 ** k
        try:
            fp = complex(fun(z + hk * d))
            fm = complex(fun(z - hk * d))
        except (ArithmeticError, ValueError) as exc:
            raise StencilCrossesSingularity(f"stencil evaluation failed at step {hk:.3e}: {exc}") from exc
        if not (cmath.isfinite(fp) and cmath.isfinite(fm)):
            raise StencilCrossesSingularity(f"non-finite value on stencil at step {hk:.3e}")
        fmax = max(fmax, abs(fp), abs(fm))
        col.append((fp - fm) / (2.0 * hk * d))

    # rounding in a central difference ~ eps*|f|/h, amplified a little by extrapolation
    round_err = 8.0 * _EPS * max(fmax, 1e-300) / (h / 2 ** levels)
    table = list(col)
    prev_best = table[0]
    for j in range(1, levels + 1):
        factor = 4.0 ** j
        new = [(factor * table[k + 1] - table[k]) / (factor - 1.0) for k in range(len(table) - 1)]
        prev_best = table[-1]
        table = new
    best = table[-1]
    err = abs(best - prev_best) + round_err

    raw_diffs = [abs(col[k + 1] - col[k]) for k in range(len(col) - 1)]
    if len(raw_diffs) >= 2 and raw_diffs[-1] > 2.0 * raw_diffs[0] and raw_diffs[-1] > 1e3 * round_err:
        raise StencilCrossesSingularity("Richardson sequence diverges")
    if err > 1e-4 * (1.0 + abs(best)):
        raise StencilCrossesSingularity(f"finite difference unreliable (error estimate {err:.3e})")
    return FdResult(best, float(err))
