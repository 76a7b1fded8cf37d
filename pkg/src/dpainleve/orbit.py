"""Orbit iteration with parameter evolution, and CSV trajectory export."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .errors import PainleveError, UnsupportedFamily
from .maps import step
from .model import EquationSpec, Family, ParameterSet, PhasePoint
from .verify import step_jacobian

OVERFLOW = 1e100
CSV_HEADER = ("step", "f_re", "f_im", "g_re", "g_im")


@dataclass
class OrbitRecord:
    """``steps`` holds (index, point, parameters in force at that point)."""

    steps: list = field(default_factory=list)
    terminated_by: str = "completed"
    singular_info: tuple | None = None

    @property
    def points(self) -> list[PhasePoint]:
        return [p for _, p, _ in self.steps]


def iterate(spec: EquationSpec, start: PhasePoint, n_steps: int) -> OrbitRecord:
    """Apply the forward step ``n_steps`` times.

    A singular denominator or an overflow (|f| or |g| > 1e100) ends the orbit
    with a structured termination; the record then stops at the last regular
    point. A start point at which no step can be taken is recorded alone
    with ``terminated_by="singularity"`` at step 0.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if spec.family is Family.CHART_ONLY:
        raise UnsupportedFamily(f"{spec.surface.value} has no map to iterate")
    params: ParameterSet = spec.params
    point = start
    rec = OrbitRecord([(0, start, params)])
    for i in range(n_steps):
        cur = EquationSpec(spec.surface, params)
        try:
            res = step(cur, point)
        except (PainleveError, ArithmeticError) as exc:
            name = getattr(exc, "name", None) or getattr(exc, "term", None) or str(exc)
            rec.terminated_by = "singularity"
            rec.singular_info = (i, name)
            return rec
        nxt = res.next
        if not (abs(complex(nxt.f)) <= OVERFLOW and abs(complex(nxt.g)) <= OVERFLOW):
            rec.terminated_by = "overflow"
            rec.singular_info = (i + 1, "|f| or |g| > 1e100")
            return rec
        params = res.next_params
        point = nxt
        rec.steps.append((i + 1, point, params))
    return rec


def _fmt(x: float) -> str:
    if x == 0:
        return "0"
    return "%.17g" % x


def to_csv(record: OrbitRecord, fh=None) -> str | None:
    """Write ``step,f_re,f_im,g_re,g_im`` rows (17 significant digits).
    Returns the text when ``fh`` is None."""
    own = fh is None
    buf = io.StringIO() if own else fh
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for idx, p, _ in record.steps:
        f, g = complex(p.f), complex(p.g)
        w.writerow([idx, _fmt(f.real), _fmt(f.imag), _fmt(g.real), _fmt(g.imag)])
    return buf.getvalue() if own else None


def read_csv(fh) -> list[tuple[int, PhasePoint]]:
    """Parse a trajectory written by :func:`to_csv`."""
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"expected header {','.join(CSV_HEADER)}")
    out = []
    for row in rows[1:]:
        i, fr, fi, gr, gi = row
        out.append((int(i), PhasePoint(complex(float(fr), float(fi)), complex(float(gr), float(gi)))))
    return out


def det_product(spec: EquationSpec, record: OrbitRecord) -> complex:
    """Product of the finite-difference step Jacobian determinants along an
    orbit (excluding the last recorded point)."""
    prod = 1.0 + 0j
    for _, p, params in record.steps[:-1]:
        J = step_jacobian(EquationSpec(spec.surface, params), p)
        prod *= J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    return prod


__all__ = ["OrbitRecord", "iterate", "to_csv", "read_csv", "det_product", "OVERFLOW", "CSV_HEADER"]
