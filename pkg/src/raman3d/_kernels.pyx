# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: adaptive GK15 on the angular integrands and Monte-Carlo sums.

Same signatures and algorithm as ``raman3d._pykernels``.
"""

from libc.math cimport sin, cos, exp, fabs, hypot
from libc.stdlib cimport malloc, realloc, free
from scipy.special.cython_special cimport i0e, j0

import numpy as np

NAME = "cython"

cdef double[8] XGK = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
]
cdef double[8] WGK = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
]
cdef double[4] WG = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
]

# f(x, params, &aux_err) -> value; aux_err carries a per-point error to integrate
ctypedef double (*integrand_t)(double, void*, double*) noexcept nogil


cdef inline double _sinc(double x) noexcept nogil:
    cdef double x2
    if fabs(x) < 1e-4:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return sin(x) / x


cdef struct Panel:
    double a
    double b
    double val
    double err
    long seq


cdef struct Heap:
    Panel* data
    long size
    long cap


cdef inline bint _before(Panel* p, Panel* q) noexcept nogil:
    # max-heap on err, ties broken by insertion order
    if p.err != q.err:
        return p.err > q.err
    return p.seq < q.seq


cdef int _heap_push(Heap* h, Panel p) noexcept nogil:
    cdef long i, parent
    cdef Panel* grown
    cdef Panel tmp
    if h.size == h.cap:
        grown = <Panel*>realloc(h.data, 2 * h.cap * sizeof(Panel))
        if grown == NULL:
            return -1
        h.data = grown
        h.cap *= 2
    i = h.size
    h.data[i] = p
    h.size += 1
    while i > 0:
        parent = (i - 1) // 2
        if _before(&h.data[i], &h.data[parent]):
            tmp = h.data[i]
            h.data[i] = h.data[parent]
            h.data[parent] = tmp
            i = parent
        else:
            break
    return 0


cdef Panel _heap_pop(Heap* h) noexcept nogil:
    cdef Panel top = h.data[0]
    cdef long i = 0, l, r, best
    cdef Panel tmp
    h.size -= 1
    h.data[0] = h.data[h.size]
    while True:
        l = 2 * i + 1
        r = l + 1
        best = i
        if l < h.size and _before(&h.data[l], &h.data[best]):
            best = l
        if r < h.size and _before(&h.data[r], &h.data[best]):
            best = r
        if best == i:
            break
        tmp = h.data[i]
        h.data[i] = h.data[best]
        h.data[best] = tmp
        i = best
    return top


cdef void _gk15(integrand_t f, void* p, double a, double b, double* val, double* err) noexcept nogil:
    cdef double c = 0.5 * (a + b)
    cdef double h = 0.5 * (b - a)
    cdef double aux = 0.0, aux1 = 0.0, aux2 = 0.0
    cdef double fc = f(c, p, &aux)
    cdef double resk = fc * WGK[7]
    cdef double resg = fc * WG[3]
    cdef double resaux = aux * WGK[7]
    cdef double dx, f1, f2
    cdef int j
    for j in range(7):
        dx = h * XGK[j]
        aux1 = 0.0
        aux2 = 0.0
        f1 = f(c - dx, p, &aux1)
        f2 = f(c + dx, p, &aux2)
        resk += WGK[j] * (f1 + f2)
        resaux += WGK[j] * (aux1 + aux2)
        if j % 2 == 1:
            resg += WG[j // 2] * (f1 + f2)
    val[0] = h * resk
    err[0] = fabs(h * (resk - resg)) + h * resaux


cdef double _sum_heap(Heap* h, bint use_err) noexcept nogil:
    # compensated sum in array order
    cdef double s = 0.0, comp = 0.0, y, t, x
    cdef long i
    for i in range(h.size):
        x = h.data[i].err if use_err else h.data[i].val
        y = x - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


cdef int _adaptive(integrand_t f, void* p, double* edges, long n_edges, double abs_tol,
                   double rel_tol, long max_sub, double* out_val, double* out_err,
                   long* out_nev) noexcept nogil:
    """Returns 0 on convergence, 1 if the subdivision budget ran out, -1 on allocation failure."""
    cdef Heap h
    cdef Panel pn, left, right
    cdef long i, steps = 0, seq = 0
    cdef double total, total_err, m, v1, e1, v2, e2
    cdef int status = 0
    cdef long n_init = n_edges - 1
    h.cap = n_init + 64
    h.size = 0
    h.data = <Panel*>malloc(h.cap * sizeof(Panel))
    if h.data == NULL:
        return -1
    out_nev[0] = 0
    for i in range(n_init):
        pn.a = edges[i]
        pn.b = edges[i + 1]
        _gk15(f, p, pn.a, pn.b, &pn.val, &pn.err)
        pn.seq = seq
        seq += 1
        if _heap_push(&h, pn) != 0:
            free(h.data)
            return -1
    out_nev[0] += 15 * n_init
    total = _sum_heap(&h, False)
    total_err = _sum_heap(&h, True)
    while total_err > abs_tol and total_err > rel_tol * fabs(total):
        if h.size >= max_sub:
            status = 1
            break
        pn = _heap_pop(&h)
        m = 0.5 * (pn.a + pn.b)
        if not (pn.a < m and m < pn.b):
            pn.err = 0.0
            _heap_push(&h, pn)
            status = 1
            break
        _gk15(f, p, pn.a, m, &v1, &e1)
        _gk15(f, p, m, pn.b, &v2, &e2)
        out_nev[0] += 30
        left.a = pn.a
        left.b = m
        left.val = v1
        left.err = e1
        left.seq = seq
        right.a = m
        right.b = pn.b
        right.val = v2
        right.err = e2
        right.seq = seq + 1
        seq += 2
        if _heap_push(&h, left) != 0 or _heap_push(&h, right) != 0:
            free(h.data)
            return -1
        total += v1 + v2 - pn.val
        total_err += e1 + e2 - pn.err
        steps += 1
        if steps % 64 == 0:
            total = _sum_heap(&h, False)
            total_err = _sum_heap(&h, True)
    total = _sum_heap(&h, False)
    total_err = _sum_heap(&h, True)
    if status == 0 and total_err > abs_tol and total_err > rel_tol * fabs(total):
        status = 1
    out_val[0] = total
    out_err[0] = total_err
    free(h.data)
    return status


# ---------------------------------------------------------------- cone integral

cdef struct ConeParams:
    double k0L
    double gauss
    double scale


cdef double _cone_f(double u, void* p, double* aux) noexcept nogil:
    cdef ConeParams* cp = <ConeParams*>p
    cdef double t = cp.scale * u
    cdef double s = sin(t)
    cdef double h = sin(0.5 * t)
    cdef double sc = _sinc(cp.k0L * h * h)
    return (s / cp.scale) * exp(-cp.gauss * s * s) * sc * sc


def cone_integral(double k0L, double gauss, double scale, edges, double abs_tol,
                  double rel_tol, long max_sub):
    cdef double[::1] e = np.ascontiguousarray(edges, dtype=np.float64)
    cdef ConeParams cp
    cdef double val = 0.0, err = 0.0
    cdef long nev = 0
    cdef int status
    cp.k0L = k0L
    cp.gauss = gauss
    cp.scale = scale
    with nogil:
        status = _adaptive(_cone_f, &cp, &e[0], e.shape[0], abs_tol, rel_tol, max_sub, &val, &err, &nev)
    if status < 0:
        raise MemoryError("panel heap allocation failed")
    return val, err, nev, status == 0


# ---------------------------------------------------------------- chi double integral

cdef struct ChiParams:
    double k0L
    double csig
    double cb
    double scale
    double s1
    double h1
    double sinc1
    double* edges
    long n_edges
    double abs_inner
    double rel_tol
    long max_sub
    long nev
    int failed


cdef double _chi_inner(double u2, void* p, double* aux) noexcept nogil:
    cdef ChiParams* cp = <ChiParams*>p
    cdef double t2 = cp.scale * u2
    cdef double s2 = sin(t2)
    cdef double hh = sin(0.5 * t2)
    cdef double h2 = hh * hh
    cdef double ds = cp.s1 - s2
    cdef double w = exp(-cp.csig * ds * ds - cp.cb * (cp.s1 * cp.s1 + s2 * s2)) * i0e(2.0 * cp.csig * cp.s1 * s2)
    return ((cp.s1 / cp.scale) * (s2 / cp.scale) * w * _sinc(cp.k0L * (cp.h1 - h2))
            * cp.sinc1 * _sinc(cp.k0L * h2))


cdef double _chi_outer(double u, void* p, double* aux) noexcept nogil:
    cdef ChiParams* cp = <ChiParams*>p
    cdef double t = cp.scale * u
    cdef double hh = sin(0.5 * t)
    cdef double val = 0.0, err = 0.0
    cdef long nev = 0
    cdef int status
    cp.s1 = sin(t)
    cp.h1 = hh * hh
    cp.sinc1 = _sinc(cp.k0L * cp.h1)
    status = _adaptive(_chi_inner, p, cp.edges, cp.n_edges, cp.abs_inner, cp.rel_tol, cp.max_sub,
                       &val, &err, &nev)
    cp.nev += nev
    if status != 0:
        cp.failed = 1
    aux[0] = err
    return val


def chi_double(double k0L, double csig, double cb, double scale, edges, double abs_outer,
               double abs_inner, double rel_tol, long max_sub):
    cdef double[::1] e = np.ascontiguousarray(edges, dtype=np.float64)
    cdef ChiParams cp
    cdef double val = 0.0, err = 0.0
    cdef long nev = 0
    cdef int status
    cp.k0L = k0L
    cp.csig = csig
    cp.cb = cb
    cp.scale = scale
    cp.edges = &e[0]
    cp.n_edges = e.shape[0]
    cp.abs_inner = abs_inner
    cp.rel_tol = rel_tol
    cp.max_sub = max_sub
    cp.nev = 0
    cp.failed = 0
    with nogil:
        status = _adaptive(_chi_outer, &cp, &e[0], e.shape[0], abs_outer, rel_tol, max_sub, &val, &err, &nev)
    if status < 0:
        raise MemoryError("panel heap allocation failed")
    return val, err, cp.nev, status == 0 and cp.failed == 0


# ---------------------------------------------------------------- Monte-Carlo sums

def mode_sums(const double[::1] x, const double[::1] y, const double[::1] z, const double[::1] u,
              double k0, thetas, double phi):
    cdef double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], m = th.shape[0], i, j
    out = np.zeros((4, m))
    cdef double[:, ::1] o = out
    cdef double[::1] a = np.empty(m)
    cdef double[::1] b = np.empty(m)
    cdef double cphi = cos(phi), sphi = sin(phi), proj, ph, re, im
    for j in range(m):
        a[j] = k0 * (1.0 - cos(th[j]))
        b[j] = k0 * sin(th[j])
    with nogil:
        for i in range(n):
            proj = x[i] * cphi + y[i] * sphi
            for j in range(m):
                ph = z[i] * a[j] - proj * b[j]
                re = u[i] * cos(ph)
                im = u[i] * sin(ph)
                o[0, j] += re
                o[1, j] += im
                o[2, j] += re * re
                o[3, j] += im * im
    return out[0], out[1], out[2], out[3]


def corr_sums(const double[::1] x, const double[::1] y, const double[::1] z, const double[::1] u2,
              double k0, double theta, double theta_p, const double[::1] dphi):
    cdef Py_ssize_t n = x.shape[0], i
    cdef double st = sin(theta), stp = sin(theta_p), kz = cos(theta) - cos(theta_p)
    cdef double kx, ky, ph, re, im
    cdef double sre = 0.0, sim = 0.0, sre2 = 0.0, sim2 = 0.0
    with nogil:
        for i in range(n):
            kx = st - stp * cos(dphi[i])
            ky = -stp * sin(dphi[i])
            ph = -k0 * (kx * x[i] + ky * y[i] + kz * z[i])
            re = u2[i] * cos(ph)
            im = u2[i] * sin(ph)
            sre += re
            sim += im
            sre2 += re * re
            sim2 += im * im
    return sre, sim, sre2, sim2


def chi_sums(const double[::1] x, const double[::1] y, const double[::1] z, const double[::1] u2,
             double k0, thetas, coef):
    cdef double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef double[::1] c = np.ascontiguousarray(coef, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], m = th.shape[0], i, j
    cdef double[::1] a = np.empty(m)
    cdef double[::1] b = np.empty(m)
    cdef double rho, hre, him, w, ph, q, total = 0.0, total2 = 0.0
    for j in range(m):
        a[j] = k0 * (1.0 - cos(th[j]))
        b[j] = k0 * sin(th[j])
    with nogil:
        for i in range(n):
            rho = hypot(x[i], y[i])
            hre = 0.0
            him = 0.0
            for j in range(m):
                w = c[j] * j0(rho * b[j])
                ph = z[i] * a[j]
                hre += w * cos(ph)
                him -= w * sin(ph)
            q = u2[i] * (hre * hre + him * him)
            total += q
            total2 += q * q
    return total, total2
