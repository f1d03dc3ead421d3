"""Reference quadrature backend in pure numpy.

Implements the desingularized kernel sums used by the Lagrangian velocity
layer: a far-field midpoint sum over declared-support sources, minus a
windowed quadratic-model sum on the label disc around each near target,
plus the matching polar integral of the model against the interpolated map.
The compiled twin in ``_quadcore`` follows the same contract; summation
order is fixed per target so repeated calls are bitwise identical.

kind 0: Riesz kernel  K(z) = z_perp / (2 pi |z|^3), z_perp = (-z2, z1),
        two output components.
kind 1: potential kernel G(z) = 1 / (2 pi |z|), one output component.
"""

from __future__ import annotations

import numpy as np

from .flow.fields import interp_bicubic

COMPILED = False

_CHUNK = 192
_TWO_PI = 2.0 * np.pi


def _chi(r, rho0, rho):
    t = np.clip((r - rho0) / (rho - rho0), 0.0, 1.0)
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def corrected_eval(kind, tx, ty, ta1, ta2, self_pos, polar_flag,
                   c0, cx, cy, cxx, cxy, cyy,
                   sx, sy, sw,
                   gx, gy, L, h, rho, rho0,
                   disc_di, disc_dj, pr, pw, pcos, psin,
                   num_threads=1):
    nt = tx.shape[0]
    n = gx.shape[0]
    acc_a1 = np.zeros(nt)
    acc_a2 = np.zeros(nt)

    # far sum over sources, self cell excluded
    for lo in range(0, nt, _CHUNK):
        hi_ = min(lo + _CHUNK, nt)
        dx = tx[lo:hi_, None] - sx[None, :]
        dy = ty[lo:hi_, None] - sy[None, :]
        r2 = dx * dx + dy * dy
        sp = self_pos[lo:hi_]
        rows = np.nonzero(sp >= 0)[0]
        r2[rows, sp[rows]] = 1.0
        if kind == 0:
            q = sw[None, :] / (r2 * np.sqrt(r2))
            q[rows, sp[rows]] = 0.0
            acc_a1[lo:hi_] = np.sum(-dy * q, axis=1)
            acc_a2[lo:hi_] = np.sum(dx * q, axis=1)
        else:
            q = sw[None, :] / np.sqrt(r2)
            q[rows, sp[rows]] = 0.0
            acc_a1[lo:hi_] = np.sum(q, axis=1)

    out1 = acc_a1 * (h * h / _TWO_PI)
    out2 = acc_a2 * (h * h / _TWO_PI)

    pidx = np.nonzero(polar_flag)[0]
    if pidx.size == 0:
        if kind != 0:
            out2[:] = 0.0
        return out1, out2

    iox = np.rint((ta1 + L) / h).astype(np.int64)
    ioy = np.rint((ta2 + L) / h).astype(np.int64)

    # local model subtraction on the label disc
    for lo in range(0, pidx.size, _CHUNK):
        sel = pidx[lo:lo + _CHUNK]
        ii = iox[sel][:, None] + disc_di[None, :]
        jj = ioy[sel][:, None] + disc_dj[None, :]
        inbox = (ii >= 0) & (ii < n) & (jj >= 0) & (jj < n)
        iic = np.clip(ii, 0, n - 1)
        jjc = np.clip(jj, 0, n - 1)
        b1 = -L + ii * h
        b2 = -L + jj * h
        l1 = b1 - ta1[sel][:, None]
        l2 = b2 - ta2[sel][:, None]
        rl = np.hypot(l1, l2)
        use = inbox & (rl < rho)
        chi = _chi(rl, rho0, rho)
        model = (c0[sel][:, None] + cx[sel][:, None] * l1 + cy[sel][:, None] * l2
                 + 0.5 * (cxx[sel][:, None] * l1 * l1
                          + 2.0 * cxy[sel][:, None] * l1 * l2
                          + cyy[sel][:, None] * l2 * l2))
        w = chi * model
        w[~use] = 0.0
        dx = tx[sel][:, None] - gx[jjc, iic]
        dy = ty[sel][:, None] - gy[jjc, iic]
        r2 = dx * dx + dy * dy
        r2[~use] = 1.0
        if kind == 0:
            q = w / (r2 * np.sqrt(r2))
            out1[sel] -= np.sum(-dy * q, axis=1) * (h * h / _TWO_PI)
            out2[sel] -= np.sum(dx * q, axis=1) * (h * h / _TWO_PI)
        else:
            q = w / np.sqrt(r2)
            out1[sel] -= np.sum(q, axis=1) * (h * h / _TWO_PI)

    # polar integral of the windowed model against the interpolated map
    d1 = (pr[:, None] * pcos[None, :]).ravel()
    d2 = (pr[:, None] * psin[None, :]).ravel()
    wq = np.repeat(pw, pcos.shape[0])
    for lo in range(0, pidx.size, _CHUNK):
        sel = pidx[lo:lo + _CHUNK]
        y1 = ta1[sel][:, None] + d1[None, :]
        y2 = ta2[sel][:, None] + d2[None, :]
        xt1 = interp_bicubic(gx, y1, y2, L, h)
        xt2 = interp_bicubic(gy, y1, y2, L, h)
        model = (c0[sel][:, None] + cx[sel][:, None] * d1[None, :]
                 + cy[sel][:, None] * d2[None, :]
                 + 0.5 * (cxx[sel][:, None] * d1[None, :] ** 2
                          + 2.0 * cxy[sel][:, None] * d1[None, :] * d2[None, :]
                          + cyy[sel][:, None] * d2[None, :] ** 2))
        z1 = tx[sel][:, None] - xt1
        z2 = ty[sel][:, None] - xt2
        r2 = z1 * z1 + z2 * z2
        w = wq[None, :] * model
        if kind == 0:
            q = w / (r2 * np.sqrt(r2))
            out1[sel] += np.sum(-z2 * q, axis=1) / _TWO_PI
            out2[sel] += np.sum(z1 * q, axis=1) / _TWO_PI
        else:
            q = w / np.sqrt(r2)
            out1[sel] += np.sum(q, axis=1) / _TWO_PI

    if kind != 0:
        out2[:] = 0.0
    return out1, out2
