# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled quadrature kernels.

Same contract as sqgeo._quadnp.corrected_eval.  Each output entry is
accumulated in a fixed per-target order, so results are bitwise identical
for any thread count.
"""

from cython.parallel cimport prange
from libc.math cimport sqrt, floor, lrint

import numpy as np

COMPILED = True

cdef double TWO_PI = 6.283185307179586476925286766559


cdef inline double _chi(double r, double rho0, double rho) noexcept nogil:
    cdef double t
    if r <= rho0:
        return 1.0
    if r >= rho:
        return 0.0
    t = (r - rho0) / (rho - rho0)
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


cdef inline double _cr_interp(const double[:, ::1] g, double px, double py,
                              double L, double h, Py_ssize_t n) noexcept nogil:
    cdef double u = (px + L) / h
    cdef double v = (py + L) / h
    cdef Py_ssize_t ix = <Py_ssize_t>floor(u)
    cdef Py_ssize_t iy = <Py_ssize_t>floor(v)
    cdef Py_ssize_t a, b, rr, cc
    cdef double fx, fy, acc, rowacc
    cdef double wx[4]
    cdef double wy[4]
    if ix < 0:
        ix = 0
    if ix > n - 2:
        ix = n - 2
    if iy < 0:
        iy = 0
    if iy > n - 2:
        iy = n - 2
    fx = u - ix
    fy = v - iy
    wx[0] = fx * (-0.5 + fx * (1.0 - 0.5 * fx))
    wx[1] = 1.0 + fx * fx * (-2.5 + 1.5 * fx)
    wx[2] = fx * (0.5 + fx * (2.0 - 1.5 * fx))
    wx[3] = fx * fx * (-0.5 + 0.5 * fx)
    wy[0] = fy * (-0.5 + fy * (1.0 - 0.5 * fy))
    wy[1] = 1.0 + fy * fy * (-2.5 + 1.5 * fy)
    wy[2] = fy * (0.5 + fy * (2.0 - 1.5 * fy))
    wy[3] = fy * fy * (-0.5 + 0.5 * fy)
    acc = 0.0
    for a in range(4):
        rr = iy + a - 1
        if rr < 0:
            rr = 0
        if rr > n - 1:
            rr = n - 1
        rowacc = 0.0
        for b in range(4):
            cc = ix + b - 1
            if cc < 0:
                cc = 0
            if cc > n - 1:
                cc = n - 1
            rowacc = rowacc + wx[b] * g[rr, cc]
        acc = acc + wy[a] * rowacc
    return acc


cdef inline void _far_riesz(double txt, double tyt,
                            const double[::1] sx, const double[::1] sy,
                            const double[::1] sw,
                            Py_ssize_t lo, Py_ssize_t hi,
                            double* a1, double* a2) noexcept nogil:
    cdef Py_ssize_t s
    cdef double dx, dy, r2, q
    cdef double s1 = 0.0, s2 = 0.0
    for s in range(lo, hi):
        dx = txt - sx[s]
        dy = tyt - sy[s]
        r2 = dx * dx + dy * dy
        q = sw[s] / (r2 * sqrt(r2))
        s1 = s1 - dy * q
        s2 = s2 + dx * q
    a1[0] += s1
    a2[0] += s2


cdef inline void _far_pot(double txt, double tyt,
                          const double[::1] sx, const double[::1] sy,
                          const double[::1] sw,
                          Py_ssize_t lo, Py_ssize_t hi,
                          double* a1) noexcept nogil:
    cdef Py_ssize_t s
    cdef double dx, dy
    cdef double s1 = 0.0
    for s in range(lo, hi):
        dx = txt - sx[s]
        dy = tyt - sy[s]
        s1 = s1 + sw[s] / sqrt(dx * dx + dy * dy)
    a1[0] += s1


def corrected_eval(int kind,
                   const double[::1] tx, const double[::1] ty,
                   const double[::1] ta1, const double[::1] ta2,
                   const long[::1] self_pos,
                   const unsigned char[::1] polar_flag,
                   const double[::1] c0, const double[::1] cx,
                   const double[::1] cy, const double[::1] cxx,
                   const double[::1] cxy, const double[::1] cyy,
                   const double[::1] sx, const double[::1] sy,
                   const double[::1] sw,
                   const double[:, ::1] gx, const double[:, ::1] gy,
                   double L, double h, double rho, double rho0,
                   const long[::1] disc_di, const long[::1] disc_dj,
                   const double[::1] pr, const double[::1] pw,
                   const double[::1] pcos, const double[::1] psin,
                   int num_threads=1):
    cdef Py_ssize_t nt = tx.shape[0]
    cdef Py_ssize_t ns = sx.shape[0]
    cdef Py_ssize_t nd = disc_di.shape[0]
    cdef Py_ssize_t nr = pr.shape[0]
    cdef Py_ssize_t na = pcos.shape[0]
    cdef Py_ssize_t n = gx.shape[0]
    cdef double h2pi = h * h / TWO_PI
    out1 = np.zeros(nt)
    out2 = np.zeros(nt)
    cdef double[::1] o1 = out1
    cdef double[::1] o2 = out2
    cdef Py_ssize_t t, sp, d, k, j, ii, jj, iox, ioy
    cdef double a1, a2, b1, b2, cc1, cc2
    cdef double txt, tyt, ta1t, ta2t
    cdef double bx, by, l1, l2, rl, ch, model, w, dx, dy, r2, q
    cdef double rk, wk, dd1, dd2, y1, y2, xt1, xt2, z1, z2
    cdef int nth = num_threads if num_threads > 0 else 1

    with nogil:
        for t in prange(nt, schedule='static', num_threads=nth):
            txt = tx[t]
            tyt = ty[t]
            ta1t = ta1[t]
            ta2t = ta2[t]
            sp = self_pos[t]
            a1 = 0.0
            a2 = 0.0
            if kind == 0:
                if sp >= 0:
                    _far_riesz(txt, tyt, sx, sy, sw, 0, sp, &a1, &a2)
                    _far_riesz(txt, tyt, sx, sy, sw, sp + 1, ns, &a1, &a2)
                else:
                    _far_riesz(txt, tyt, sx, sy, sw, 0, ns, &a1, &a2)
            else:
                if sp >= 0:
                    _far_pot(txt, tyt, sx, sy, sw, 0, sp, &a1)
                    _far_pot(txt, tyt, sx, sy, sw, sp + 1, ns, &a1)
                else:
                    _far_pot(txt, tyt, sx, sy, sw, 0, ns, &a1)

            b1 = 0.0
            b2 = 0.0
            cc1 = 0.0
            cc2 = 0.0
            if polar_flag[t]:
                iox = lrint((ta1t + L) / h)
                ioy = lrint((ta2t + L) / h)
                for d in range(nd):
                    ii = iox + disc_di[d]
                    jj = ioy + disc_dj[d]
                    if ii < 0 or ii >= n or jj < 0 or jj >= n:
                        continue
                    bx = -L + ii * h
                    by = -L + jj * h
                    l1 = bx - ta1t
                    l2 = by - ta2t
                    rl = sqrt(l1 * l1 + l2 * l2)
                    if rl >= rho:
                        continue
                    ch = _chi(rl, rho0, rho)
                    model = (c0[t] + cx[t] * l1 + cy[t] * l2
                             + 0.5 * (cxx[t] * l1 * l1 + 2.0 * cxy[t] * l1 * l2
                                      + cyy[t] * l2 * l2))
                    w = ch * model
                    dx = txt - gx[jj, ii]
                    dy = tyt - gy[jj, ii]
                    r2 = dx * dx + dy * dy
                    if kind == 0:
                        q = w / (r2 * sqrt(r2))
                        b1 = b1 - dy * q
                        b2 = b2 + dx * q
                    else:
                        b1 = b1 + w / sqrt(r2)
                for k in range(nr):
                    rk = pr[k]
                    wk = pw[k]
                    for j in range(na):
                        dd1 = rk * pcos[j]
                        dd2 = rk * psin[j]
                        y1 = ta1t + dd1
                        y2 = ta2t + dd2
                        xt1 = _cr_interp(gx, y1, y2, L, h, n)
                        xt2 = _cr_interp(gy, y1, y2, L, h, n)
                        model = (c0[t] + cx[t] * dd1 + cy[t] * dd2
                                 + 0.5 * (cxx[t] * dd1 * dd1
                                          + 2.0 * cxy[t] * dd1 * dd2
                                          + cyy[t] * dd2 * dd2))
                        z1 = txt - xt1
                        z2 = tyt - xt2
                        r2 = z1 * z1 + z2 * z2
                        if kind == 0:
                            q = wk * model / (r2 * sqrt(r2))
                            cc1 = cc1 - z2 * q
                            cc2 = cc2 + z1 * q
                        else:
                            cc1 = cc1 + wk * model / sqrt(r2)

            o1[t] = (a1 - b1) * h2pi + cc1 / TWO_PI
            if kind == 0:
                o2[t] = (a2 - b2) * h2pi + cc2 / TWO_PI

    return out1, out2
