"""Desingularized kernel quadrature for the Lagrangian velocity law.

The velocity of a transported scalar is the perpendicular Riesz kernel
integral

    F(X, theta0)(a) = int K(X(a) - X(b)) theta0(b) J_X(b) db,
    K(z) = z_perp / (2 pi |z|^3),

a principal-value integral.  It is evaluated as

  * a midpoint sum of the integrand over the declared-support sources with
    the target's own cell dropped, minus
  * a midpoint sum of chi(|b-a|) m_a(b-a) K(X(a)-X(b)) over the label disc
    |b-a| < rho, where m_a is the quadratic finite-difference model of
    omega = theta0 J_X at the target and chi a C^2 plateau window, plus
  * the same windowed model integrated in polar coordinates against the
    bicubically interpolated map (trapezoid in angle, Gauss-Legendre in
    radius).

The subtracted and re-added function is identical, so the splitting is
exact for any model; the model's only job is to make the residual
integrand smooth at the target.  The uniform angle grid annihilates the
odd kernel harmonics, which realizes the principal value.  All index sets
are geometric (declared support radius, fixed disc offsets), never
value-dependent, so the map from field samples to output is smooth.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..backend import get_backend
from .._quadnp import _chi
from .fields import ScalarField2D, axis_coords, interp_bicubic
from .maps import FlowMap, gradient_arrays
from .membership import MembershipReport, membership

RHO = 0.25
RHO0 = 0.125
N_ALPHA = 24
N_RADIAL = 10


class MembershipError(RuntimeError):
    """A flow map failed the admissible-set check required by quadrature."""

    def __init__(self, report: MembershipReport):
        self.report = report
        super().__init__(
            "flow map is outside the admissible set; failed criteria: "
            + ", ".join(report.failed))


@lru_cache(maxsize=4)
def _polar_rule(rho: float, n_alpha: int, n_radial: int):
    x, w = np.polynomial.legendre.leggauss(n_radial)
    pr = 0.5 * rho * (x + 1.0)
    pw = 0.5 * rho * w * pr * (2.0 * math.pi / n_alpha) * _chi(pr, RHO0, rho)
    ang = 2.0 * math.pi * np.arange(n_alpha) / n_alpha
    out = (pr, pw, np.cos(ang), np.sin(ang))
    for a in out:
        a.setflags(write=False)
    return out


@lru_cache(maxsize=8)
def _disc_offsets(h: float, rho: float):
    reach = int(math.ceil(rho / h)) + 2
    di, dj = np.meshgrid(np.arange(-reach, reach + 1),
                         np.arange(-reach, reach + 1), indexing="xy")
    keep = (di * di + dj * dj > 0) & ((di * di + dj * dj) * h * h
                                      < (rho + 1.5 * h) ** 2)
    out = (np.ascontiguousarray(di[keep], dtype=np.int64),
           np.ascontiguousarray(dj[keep], dtype=np.int64))
    for a in out:
        a.setflags(write=False)
    return out


def _model_grids(omega: np.ndarray, h: float):
    """Quadratic Taylor coefficients of omega at every interior node."""
    c0 = omega
    cx = np.zeros_like(omega)
    cy = np.zeros_like(omega)
    cxx = np.zeros_like(omega)
    cyy = np.zeros_like(omega)
    cxy = np.zeros_like(omega)
    cx[:, 1:-1] = (omega[:, 2:] - omega[:, :-2]) / (2.0 * h)
    cy[1:-1, :] = (omega[2:, :] - omega[:-2, :]) / (2.0 * h)
    cxx[:, 1:-1] = (omega[:, 2:] - 2.0 * omega[:, 1:-1] + omega[:, :-2]) / (h * h)
    cyy[1:-1, :] = (omega[2:, :] - 2.0 * omega[1:-1, :] + omega[:-2, :]) / (h * h)
    cxy[1:-1, 1:-1] = (omega[2:, 2:] - omega[2:, :-2]
                       - omega[:-2, 2:] + omega[:-2, :-2]) / (4.0 * h * h)
    return c0, cx, cy, cxx, cxy, cyy


@lru_cache(maxsize=16)
def _source_indices(L: float, h: float, support_radius: float | None):
    ax = axis_coords(L, h)
    xx, yy = np.meshgrid(ax, ax, indexing="xy")
    if support_radius is None:
        idx = np.arange(xx.size, dtype=np.int64)
    else:
        mask = (xx * xx + yy * yy) <= support_radius * support_radius
        idx = np.nonzero(mask.ravel())[0].astype(np.int64)
    idx.setflags(write=False)
    return idx


def _self_positions(src_idx: np.ndarray, owner_flat: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(src_idx, owner_flat)
    pos_c = np.minimum(pos, src_idx.size - 1)
    ok = src_idx[pos_c] == owner_flat
    return np.where(ok, pos_c, -1).astype(np.int64)


def _run_quadrature(kind, x1, x2, omega, L, h, support_radius,
                    targets, target_positions, backend, threads):
    """Dispatch one corrected kernel sum; targets may be None (all nodes),
    an int array of flat node indices, or an (N, 2) array of label points."""
    mod = get_backend(backend) if not hasattr(backend, "corrected_eval") else backend
    n = x1.shape[0]
    if not omega.any():
        # every term of the sum carries a factor of omega, so the result is
        # exactly zero; skipping the loops returns the identical bits
        if targets is None:
            z = np.zeros((n, n))
            return z, z.copy()
        nt = len(targets)
        return np.zeros(nt), np.zeros(nt)
    ax = axis_coords(L, h)
    xx, yy = np.meshgrid(ax, ax, indexing="xy")
    coefs = _model_grids(omega, h)
    src_idx = _source_indices(L, h, support_radius)
    sx = np.ascontiguousarray(x1.ravel()[src_idx])
    sy = np.ascontiguousarray(x2.ravel()[src_idx])
    sw = np.ascontiguousarray(omega.ravel()[src_idx])
    r_pol = (support_radius if support_radius is not None
             else math.hypot(L, L)) + RHO

    grid_shape = None
    if targets is None:
        ta1 = xx.ravel()
        ta2 = yy.ravel()
        tx = x1.ravel()
        ty = x2.ravel()
        owner = np.arange(n * n, dtype=np.int64)
        cts = [np.ascontiguousarray(c.ravel()) for c in coefs]
        grid_shape = (n, n)
    else:
        targets = np.asarray(targets)
        if targets.ndim == 1:
            idx = targets.astype(np.int64)
            ta1 = xx.ravel()[idx]
            ta2 = yy.ravel()[idx]
            tx = x1.ravel()[idx]
            ty = x2.ravel()[idx]
            owner = idx
            cts = [np.ascontiguousarray(c.ravel()[idx]) for c in coefs]
        else:
            ta1 = np.ascontiguousarray(targets[:, 0], dtype=float)
            ta2 = np.ascontiguousarray(targets[:, 1], dtype=float)
            if np.max(np.abs(targets)) > L:
                raise ValueError("target points must lie inside the box")
            if target_positions is not None:
                tx = np.ascontiguousarray(target_positions[:, 0], dtype=float)
                ty = np.ascontiguousarray(target_positions[:, 1], dtype=float)
            else:
                tx = interp_bicubic(x1, ta1, ta2, L, h)
                ty = interp_bicubic(x2, ta1, ta2, L, h)
            iox = np.clip(np.rint((ta1 + L) / h).astype(np.int64), 0, n - 1)
            ioy = np.clip(np.rint((ta2 + L) / h).astype(np.int64), 0, n - 1)
            owner = ioy * n + iox
            cts = [np.ascontiguousarray(interp_bicubic(c, ta1, ta2, L, h))
                   for c in coefs]

    self_pos = _self_positions(src_idx, owner)
    polar = ((ta1 * ta1 + ta2 * ta2) <= r_pol * r_pol).astype(np.uint8)
    disc_di, disc_dj = _disc_offsets(h, RHO)
    pr, pw, pcos, psin = _polar_rule(RHO, N_ALPHA, N_RADIAL)

    out1, out2 = mod.corrected_eval(
        kind,
        np.ascontiguousarray(tx), np.ascontiguousarray(ty),
        np.ascontiguousarray(ta1), np.ascontiguousarray(ta2),
        self_pos, np.ascontiguousarray(polar),
        *cts,
        sx, sy, sw,
        np.ascontiguousarray(x1), np.ascontiguousarray(x2),
        L, h, RHO, RHO0,
        disc_di, disc_dj, pr, pw, pcos, psin,
        int(threads))
    if grid_shape is not None:
        return out1.reshape(grid_shape), out2.reshape(grid_shape)
    return out1, out2


# -- public operations -----------------------------------------------------


def _check_pair(flow: FlowMap, theta0: ScalarField2D):
    if (flow.L, flow.h) != (theta0.L, theta0.h):
        raise ValueError("flow map and field live on different grids")


def eval_F(flow: FlowMap, theta0: ScalarField2D, *, targets=None,
           target_positions=None, backend=None, threads: int = 1,
           check_membership: bool = True):
    """Velocity integral of theta0 transported by X at the requested targets.

    Returns a pair of arrays (U1, U2) shaped like the grid (targets=None),
    or 1-D for flat-index / label-point targets.
    """
    _check_pair(flow, theta0)
    theta0.require_decay()
    if check_membership:
        rep = membership(flow)
        if not rep.in_O:
            raise MembershipError(rep)
    x1, x2 = flow.position_arrays()
    omega = theta0.samples * flow.jacobian_arrays()
    return _run_quadrature(0, x1, x2, omega, flow.L, flow.h,
                           theta0.support_radius, targets, target_positions,
                           backend, threads)


def riesz_velocity_grid(theta: ScalarField2D, *, backend=None,
                        threads: int = 1):
    """Perpendicular Riesz transform of theta at every grid node."""
    theta.require_decay()
    ax = theta.axis()
    xx, yy = np.meshgrid(ax, ax, indexing="xy")
    return _run_quadrature(0, xx, yy, np.asarray(theta.samples), theta.L,
                           theta.h, theta.support_radius, None, None,
                           backend, threads)


def riesz_velocity(theta: ScalarField2D, x, *, backend=None,
                   threads: int = 1):
    """Velocity at arbitrary points x (shape (2,) or (N, 2))."""
    theta.require_decay()
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if pts.shape[1] != 2:
        raise ValueError("points must have shape (2,) or (N, 2)")
    if np.max(np.abs(pts)) > theta.L:
        raise ValueError("evaluation points must lie inside the box")
    ax = theta.axis()
    xx, yy = np.meshgrid(ax, ax, indexing="xy")
    u1, u2 = _run_quadrature(0, xx, yy, np.asarray(theta.samples), theta.L,
                             theta.h, theta.support_radius, pts, pts,
                             backend, threads)
    out = np.stack([u1, u2], axis=-1)
    return out[0] if np.asarray(x).ndim == 1 else out


def eval_gradF(flow: FlowMap, theta0: ScalarField2D, *, targets=None,
               backend=None, threads: int = 1,
               check_membership: bool = True):
    """Label-space gradient of the velocity integral.

    Differentiating the kernel and integrating by parts in b (the cofactor
    columns are divergence free) gives

        grad_a F(a) = T(a) . grad X(a),
        T_ij(a) = int K_i(X(a)-X(b)) w_j(b) db,
        w = cof(grad X) . grad theta0,

    which only ever differentiates theta0, so the same corrected quadrature
    applies with omega replaced by the components of w.  Result shape is
    (..., 2, 2) with entry [i, al] = dF_i/da_al.
    """
    _check_pair(flow, theta0)
    theta0.require_decay()
    if check_membership:
        rep = membership(flow)
        if not rep.in_O:
            raise MembershipError(rep)
    x1, x2 = flow.position_arrays()
    x1x, x1y, x2x, x2y = flow.grad_arrays()
    tgy, tgx = np.gradient(np.asarray(theta0.samples), flow.h, edge_order=2)
    w1 = x2y * tgx - x2x * tgy
    w2 = -x1y * tgx + x1x * tgy
    cols = []
    for wgt in (w1, w2):
        t1, t2 = _run_quadrature(0, x1, x2, wgt, flow.L, flow.h,
                                 theta0.support_radius, targets, None,
                                 backend, threads)
        cols.append((t1, t2))
    # T[..., i, j]
    T = np.stack([np.stack([cols[0][0], cols[1][0]], axis=-1),
                  np.stack([cols[0][1], cols[1][1]], axis=-1)], axis=-2)
    if targets is None:
        G = np.stack([np.stack([x1x, x1y], axis=-1),
                      np.stack([x2x, x2y], axis=-1)], axis=-2)
    else:
        targets_arr = np.asarray(targets)
        if targets_arr.ndim == 1:
            idx = targets_arr.astype(np.int64)
            parts = [g.ravel()[idx] for g in (x1x, x1y, x2x, x2y)]
        else:
            parts = [interp_bicubic(g, targets_arr[:, 0], targets_arr[:, 1],
                                    flow.L, flow.h)
                     for g in (x1x, x1y, x2x, x2y)]
        G = np.stack([np.stack([parts[0], parts[1]], axis=-1),
                      np.stack([parts[2], parts[3]], axis=-1)], axis=-2)
    return T @ G


def interaction_energy(flow: FlowMap, theta0: ScalarField2D, *,
                       backend=None, threads: int = 1) -> float:
    """Quadratic interaction energy int int w(a) G(X(a)-X(b)) w(b) da db
    with w = theta0 J_X and G(z) = 1/(2 pi |z|); conserved by the flow."""
    _check_pair(flow, theta0)
    theta0.require_decay()
    x1, x2 = flow.position_arrays()
    omega = theta0.samples * flow.jacobian_arrays()
    sub = _source_indices(flow.L, flow.h, theta0.support_radius)
    phi, _ = _run_quadrature(1, x1, x2, omega, flow.L, flow.h,
                             theta0.support_radius, sub, None,
                             backend, threads)
    w = omega.ravel()[sub]
    return float(np.dot(w, phi) * flow.h * flow.h)
