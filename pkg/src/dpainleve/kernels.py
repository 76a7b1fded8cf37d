"""Hot numeric kernels: complex dilogarithm and biquadratic forms.

Every kernel exists twice, built from one source by :func:`_build`: once
compiled with numba and once as plain Python/cmath. Array entry points also
have a vectorised numpy variant. ``DP_NUMBA=0`` selects the non-numba paths
for the public names (``li2_scalar``, ``li2_array``, ``biquad_array``,
``biquadratic_step_array``); both variants stay importable for benchmarking.
"""
import cmath
import math
from fractions import Fraction
from math import comb

import numpy as np

from ._accel import HAVE_NUMBA, USE_NUMBA, njit

ZETA2 = math.pi ** 2 / 6.0
_SERIES_TERMS = 64
_N_BERN = 32


def _bernoulli_coefficients(n):
    """B_k / (k+1)! for k = 0..n-1 (convention B_1 = -1/2)."""
    b = [Fraction(1)]
    for m in range(1, n):
        b.append(-sum(comb(m + 1, k) * b[k] for k in range(m)) / (m + 1))
    return np.array([float(b[k] / math.factorial(k + 1)) for k in range(n)])


_BERN = _bernoulli_coefficients(_N_BERN)


def _build(deco):
    bern = _BERN
    nterms = _SERIES_TERMS
    zeta2 = ZETA2

    @deco
    def disk(z):
        # |z| <= 1 and Re z <= 1/2 on entry
        if abs(z) <= 0.5:
            term = z
            total = z
            for k in range(2, nterms):
                term = term * z
                inc = term / (k * k)
                total += inc
                if abs(inc) < 1e-17 * abs(total):
                    break
            return total
        u = -cmath.log(1.0 - z)
        acc = 0j
        for k in range(bern.shape[0] - 1, -1, -1):
            acc = acc * u + bern[k]
        return acc * u

    @deco
    def li2(z):
        if z == 0:
            return 0j
        if z == 1:
            return complex(zeta2, 0.0)
        const = 0j
        sign = 1.0
        if abs(z) > 1.0:
            w = -z
            if w.imag == 0.0:
                # signed zero would flip the side of the cut
                w = complex(w.real, 0.0)
            lw = cmath.log(w)
            const = -zeta2 - 0.5 * lw * lw
            sign = -1.0
            z = 1.0 / z
        if z.real > 0.5:
            one_m = 1.0 - z
            if one_m == 0:
                val = complex(zeta2, 0.0)
            else:
                val = zeta2 - cmath.log(z) * cmath.log(one_m) - disk(one_m)
        else:
            val = disk(z)
        return const + sign * val

    @deco
    def li2_loop(zs):
        out = np.empty(zs.shape[0], dtype=np.complex128)
        for i in range(zs.shape[0]):
            out[i] = li2(zs[i])
        return out

    @deco
    def biquad_loop(m, f, g):
        # m in printed order: m[0] = (m22, m21, m20), ...
        out = np.empty(f.shape[0], dtype=np.complex128)
        for i in range(f.shape[0]):
            ff = f[i]
            gg = g[i]
            r2 = m[0, 0] * ff * ff + m[0, 1] * ff + m[0, 2]
            r1 = m[1, 0] * ff * ff + m[1, 1] * ff + m[1, 2]
            r0 = m[2, 0] * ff * ff + m[2, 1] * ff + m[2, 2]
            out[i] = gg * gg * r2 + gg * r1 + r0
        return out

    @deco
    def biquad_step_loop(m, mb, f, g):
        n = f.shape[0]
        fb = np.empty(n, dtype=np.complex128)
        gb = np.empty(n, dtype=np.complex128)
        nan = complex(np.nan, np.nan)
        for i in range(n):
            ff = f[i]
            num = m[1, 0] * ff * ff + m[1, 1] * ff + m[1, 2]
            den = m[0, 0] * ff * ff + m[0, 1] * ff + m[0, 2]
            if abs(den) < 1e-12 * (1.0 + abs(num)):
                fb[i] = nan
                gb[i] = nan
                continue
            gg = -g[i] - num / den
            num2 = mb[0, 1] * gg * gg + mb[1, 1] * gg + mb[2, 1]
            den2 = mb[0, 0] * gg * gg + mb[1, 0] * gg + mb[2, 0]
            if abs(den2) < 1e-12 * (1.0 + abs(num2)):
                fb[i] = nan
                gb[i] = nan
                continue
            gb[i] = gg
            fb[i] = -ff - num2 / den2
        return fb, gb

    return li2, li2_loop, biquad_loop, biquad_step_loop


def _identity(fn):
    return fn


li2_py, li2_loop_py, biquad_loop_py, biquad_step_loop_py = _build(_identity)

if HAVE_NUMBA:
    li2_nb, li2_loop_nb, biquad_loop_nb, biquad_step_loop_nb = _build(njit)
else:  # pragma: no cover
    li2_nb = li2_loop_nb = biquad_loop_nb = biquad_step_loop_nb = None


def li2_array_numpy(z):
    """Vectorised numpy dilogarithm; same region strategy as the scalar kernel."""
    z = np.asarray(z, dtype=np.complex128).ravel().copy()
    out = np.zeros_like(z)
    const = np.zeros_like(z)
    sign = np.ones(z.shape, dtype=np.float64)

    zero = z == 0
    one = z == 1
    work = ~(zero | one)

    inv = work & (np.abs(z) > 1.0)
    w = -z[inv]
    w = np.where(w.imag == 0.0, w.real + 0j, w)
    lw = np.log(w)
    const[inv] = -ZETA2 - 0.5 * lw * lw
    sign[inv] = -1.0
    z[inv] = 1.0 / z[inv]

    refl = work & (z.real > 0.5)
    base = np.zeros_like(z)
    arg = z.copy()
    one_m = 1.0 - z[refl]
    safe = one_m != 0
    lz = np.log(np.where(refl, z, 1.0))[refl]
    lom = np.log(np.where(safe, one_m, 1.0))
    base[refl] = ZETA2 - np.where(safe, lz * lom, 0.0)
    arg[refl] = one_m

    ser = work & (np.abs(arg) <= 0.5)
    ber = work & ~ser
    disk = np.zeros_like(z)
    if ser.any():
        x = arg[ser]
        k = np.arange(1, _SERIES_TERMS)
        disk[ser] = (x[:, None] ** k / (k * k)).sum(axis=1)
    if ber.any():
        u = -np.log(1.0 - arg[ber])
        acc = np.zeros_like(u)
        for c in _BERN[::-1]:
            acc = acc * u + c
        disk[ber] = acc * u
    # arg == 0 after reflection means z == 1 from inversion; disk(0) = 0
    disk = np.where(refl & (arg == 0), 0.0, disk)
    val = np.where(refl, base - disk, disk)
    out[work] = const[work] + sign[work] * val[work]
    out[one] = ZETA2
    return out


def biquad_array_numpy(m, f, g):
    m = np.asarray(m, dtype=np.complex128)
    f = np.asarray(f, dtype=np.complex128)
    g = np.asarray(g, dtype=np.complex128)
    fv = np.stack([f * f, f, np.ones_like(f)])
    gv = np.stack([g * g, g, np.ones_like(g)])
    return np.einsum("in,ij,jn->n", gv, m, fv)


def biquadratic_step_numpy(m, mb, f, g):
    m = np.asarray(m, dtype=np.complex128)
    mb = np.asarray(mb, dtype=np.complex128)
    f = np.asarray(f, dtype=np.complex128)
    g = np.asarray(g, dtype=np.complex128)
    num = m[1, 0] * f * f + m[1, 1] * f + m[1, 2]
    den = m[0, 0] * f * f + m[0, 1] * f + m[0, 2]
    bad = np.abs(den) < 1e-12 * (1.0 + np.abs(num))
    with np.errstate(divide="ignore", invalid="ignore"):
        gb = -g - num / den
        num2 = mb[0, 1] * gb * gb + mb[1, 1] * gb + mb[2, 1]
        den2 = mb[0, 0] * gb * gb + mb[1, 0] * gb + mb[2, 0]
        bad |= np.abs(den2) < 1e-12 * (1.0 + np.abs(num2))
        fb = -f - num2 / den2
    fb[bad] = np.nan + 1j * np.nan
    gb[bad] = np.nan + 1j * np.nan
    return fb, gb


if USE_NUMBA:
    li2_scalar = li2_nb

    def li2_array(z):
        return li2_loop_nb(np.ascontiguousarray(np.asarray(z, dtype=np.complex128).ravel()))

    def biquad_array(m, f, g):
        return biquad_loop_nb(np.asarray(m, dtype=np.complex128),
                              np.asarray(f, dtype=np.complex128).ravel(),
                              np.asarray(g, dtype=np.complex128).ravel())

    def biquadratic_step_array(m, mb, f, g):
        return biquad_step_loop_nb(np.asarray(m, dtype=np.complex128),
                                   np.asarray(mb, dtype=np.complex128),
                                   np.asarray(f, dtype=np.complex128).ravel(),
                                   np.asarray(g, dtype=np.complex128).ravel())
else:
    li2_scalar = li2_py
    li2_array = li2_array_numpy
    biquad_array = biquad_array_numpy
    biquadratic_step_array = biquadratic_step_numpy
