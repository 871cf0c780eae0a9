"""Pure numpy implementation of the hot kernels.

Mirrors the compiled ``_kernels`` extension function for function; it is
selected automatically when the extension is missing, or on request through
``RAMAN3D_PURE_PYTHON=1``.  Angles are passed in units of ``scale`` (the
forward-cone angle) so that all integrals are O(1).
"""

from __future__ import annotations

import numpy as np
from scipy import special

from .quadrature import adaptive_gk15, sinc

NAME = "python"

_CHUNK = 1 << 15


def cone_integral(k0L, gauss, scale, edges, abs_tol, rel_tol, max_sub):
    """∫ (sinθ/scale) exp(-gauss sin²θ) sinc²(k0L sin²(θ/2)) du, θ = scale*u."""

    def f(u):
        t = scale * u
        s = np.sin(t)
        h = np.sin(0.5 * t)
        sc = sinc(k0L * h * h)
        return (s / scale) * np.exp(-gauss * s * s) * sc * sc, None

    return adaptive_gk15(f, edges, abs_tol, rel_tol, max_sub)


def chi_double(k0L, csig, cb, scale, edges, abs_outer, abs_inner, rel_tol, max_sub):
    """Iterated integral of the correlation-weighted mode overlap, in scaled angles.

    csig = (k0 sigma)^2/4 and cb = (k0 r_eff)^2/4.
    """
    edges = np.asarray(edges, dtype=float)
    evaluations = [0]

    def inner_factory(s1, h1, sinc1):
        def g(u2):
            t2 = scale * u2
            s2 = np.sin(t2)
            h2 = np.sin(0.5 * t2) ** 2
            w = np.exp(-csig * (s1 - s2) ** 2 - cb * (s1 * s1 + s2 * s2)) * special.i0e(2.0 * csig * s1 * s2)
            val = (s1 / scale) * (s2 / scale) * w * sinc(k0L * (h1 - h2)) * sinc1 * sinc(k0L * h2)
            return val, None
        return g

    def outer(us):
        vals = np.empty(len(us))
        errs = np.empty(len(us))
        for i, u in enumerate(us):
            t = scale * u
            s1 = np.sin(t)
            h1 = np.sin(0.5 * t) ** 2
            v, e, n, ok = adaptive_gk15(inner_factory(s1, h1, sinc(k0L * h1)), edges, abs_inner, rel_tol, max_sub)
            evaluations[0] += n
            if not ok:
                raise _InnerFailure(v, e)
            vals[i] = v
            errs[i] = e
        return vals, errs

    try:
        value, err, _, ok = adaptive_gk15(outer, edges, abs_outer, rel_tol, max_sub)
    except _InnerFailure as exc:
        return exc.value, exc.error, evaluations[0], False
    return value, err, evaluations[0], ok


class _InnerFailure(Exception):
    def __init__(self, value, error):
        super().__init__("inner integral did not converge")
        self.value = value
        self.error = error


def mode_sums(x, y, z, u, k0, thetas, phi):
    """Per-angle sums of u*exp(i k0 z (1-cosθ) - i k0 sinθ (x cosφ + y sinφ))."""
    thetas = np.asarray(thetas, dtype=float)
    a = k0 * (1.0 - np.cos(thetas))
    b = k0 * np.sin(thetas)
    sre = np.zeros(len(thetas))
    sim = np.zeros(len(thetas))
    sre2 = np.zeros(len(thetas))
    sim2 = np.zeros(len(thetas))
    proj = x * np.cos(phi) + y * np.sin(phi)
    for start in range(0, len(x), _CHUNK):
        sl = slice(start, start + _CHUNK)
        phase = np.outer(z[sl], a) - np.outer(proj[sl], b)
        re = u[sl, None] * np.cos(phase)
        im = u[sl, None] * np.sin(phase)
        sre += re.sum(axis=0)
        sim += im.sum(axis=0)
        sre2 += (re * re).sum(axis=0)
        sim2 += (im * im).sum(axis=0)
    return sre, sim, sre2, sim2


def corr_sums(x, y, z, u2, k0, theta, theta_p, dphi):
    """Sums of |u|² exp(-i (k - k')·r) with k at azimuth 0 and k' at azimuth dphi (per sample)."""
    kx = np.sin(theta) - np.sin(theta_p) * np.cos(dphi)
    ky = -np.sin(theta_p) * np.sin(dphi)
    kz = np.cos(theta) - np.cos(theta_p)
    phase = -k0 * (kx * x + ky * y + kz * z)
    re = u2 * np.cos(phase)
    im = u2 * np.sin(phase)
    return float(re.sum()), float(im.sum()), float((re * re).sum()), float((im * im).sum())


def chi_sums(x, y, z, u2, k0, thetas, coef):
    """Sum and sum of squares of |u|² |Σ_j coef_j J0(k0 ρ sinθ_j) exp(-i k0 z (1-cosθ_j))|²."""
    thetas = np.asarray(thetas, dtype=float)
    a = k0 * (1.0 - np.cos(thetas))
    b = k0 * np.sin(thetas)
    rho = np.hypot(x, y)
    total = 0.0
    total2 = 0.0
    for start in range(0, len(x), _CHUNK):
        sl = slice(start, start + _CHUNK)
        j0 = special.j0(np.outer(rho[sl], b)) * coef[None, :]
        phase = np.outer(z[sl], a)
        hre = (j0 * np.cos(phase)).sum(axis=1)
        him = -(j0 * np.sin(phase)).sum(axis=1)
        q = u2[sl] * (hre * hre + him * him)
        total += q.sum()
        total2 += (q * q).sum()
    return float(total), float(total2)
