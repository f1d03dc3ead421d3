"""Diagnostics deciding whether a flow map stays in the good deformation set.

A map X = id + Y is accepted when inf det(grad X) > 9/10 and the C^{1,gamma}
norm of Y stays below 7/20.  Accepted maps are invertible with chord-arc
constant at most 3/2 and max-entry bound on (grad X)^{-1} below 3/2; both
are measured and reported so the implications can be tested.

Pair-sampled quantities (Holder seminorm, chord-arc ratios) use every node
pair within distance 4h plus a fixed quasi-random set of 4096 long-range
pairs.  The sample is a pure function of the grid size, so reports are
deterministic, and the seminorm is a lower estimate of the true supremum.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fields import axis_coords
from .maps import FlowMap, gradient_arrays

DET_FLOOR = 9.0 / 10.0
HOLDER_CAP = 7.0 / 20.0
CHORD_ARC_LAMBDA = 1.5
GRAD_INV_CAP = 1.5

_NEAR_RANGE = 4          # pairs within 4h
_N_LONG_PAIRS = 4096
_PHI1 = (math.sqrt(5.0) - 1.0) / 2.0
_PHI2 = _PHI1 * _PHI1


@lru_cache(maxsize=8)
def near_offsets(reach: int = _NEAR_RANGE):
    """Unique half-plane grid offsets with 0 < |d| <= reach."""
    out = []
    for dj in range(0, reach + 1):
        for di in range(-reach, reach + 1):
            if di * di + dj * dj == 0 or di * di + dj * dj > reach * reach:
                continue
            if dj == 0 and di < 0:
                continue
            out.append((di, dj))
    return tuple(out)


@lru_cache(maxsize=8)
def long_pair_indices(n: int):
    """Deterministic low-discrepancy sample of distant node pairs."""
    k = np.arange(1, _N_LONG_PAIRS + 1, dtype=np.float64)
    nn = n * n
    ia = np.floor((k * _PHI1 % 1.0) * nn).astype(np.int64)
    ib = np.floor((k * _PHI2 % 1.0) * nn).astype(np.int64)
    keep = ia != ib
    return ia[keep], ib[keep]


def _offset_views(arr: np.ndarray, di: int, dj: int):
    """(base, shifted) views with shifted[iy, ix] = arr[iy+dj, ix+di]; dj >= 0."""
    n = arr.shape[0]
    rows0 = slice(0, n - dj)
    rows1 = slice(dj, n)
    if di >= 0:
        cols0 = slice(0, n - di)
        cols1 = slice(di, n)
    else:
        cols0 = slice(-di, n)
        cols1 = slice(0, n + di)
    return arr[rows0, cols0], arr[rows1, cols1]


def holder_seminorm(grads, gamma: float, L: float, h: float) -> float:
    """max over the pair sample of |grad(a) - grad(b)|_maxentry / |a-b|^gamma."""
    n = grads[0].shape[0]
    best = 0.0
    for di, dj in near_offsets():
        dist = h * math.hypot(di, dj)
        m = 0.0
        for g in grads:
            a, b = _offset_views(g, di, dj)
            m = max(m, float(np.max(np.abs(a - b))))
        best = max(best, m / dist ** gamma)
    ia, ib = long_pair_indices(n)
    ax = axis_coords(L, h)
    px = ax[ia % n] - ax[ib % n]
    py = ax[ia // n] - ax[ib // n]
    dist = np.hypot(px, py)
    m = np.zeros(ia.shape)
    for g in grads:
        flat = g.ravel()
        np.maximum(m, np.abs(flat[ia] - flat[ib]), out=m)
    best = max(best, float(np.max(m / dist ** gamma)))
    return best


def holder_norm(flow_or_Y, gamma: float | None = None) -> float:
    """||Y||_inf + ||grad Y||_inf + sampled C^gamma seminorm of grad Y.

    All sup norms are max absolute entry over the grid.
    """
    if isinstance(flow_or_Y, FlowMap):
        flow = flow_or_Y
        if gamma is None:
            gamma = flow.gamma
        Y1, Y2, L, h = flow.Y1, flow.Y2, flow.L, flow.h
    else:
        Y1, Y2, L, h = flow_or_Y
        if gamma is None:
            raise ValueError("gamma required when passing raw arrays")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0,1), got {gamma}")
    sup = max(float(np.max(np.abs(Y1))), float(np.max(np.abs(Y2))))
    grads = gradient_arrays(Y1, Y2, h)
    sup_grad = max(float(np.max(np.abs(g))) for g in grads)
    semi = holder_seminorm(grads, gamma, L, h)
    return sup + sup_grad + semi


def chord_arc_lambda(flow: FlowMap) -> float:
    """Smallest lambda with 1/lambda <= |a-b|/|X(a)-X(b)| <= lambda on the sample."""
    x1, x2 = flow.position_arrays()
    n = flow.n
    h = flow.h
    hi = 1.0
    lo = 1.0
    for di, dj in near_offsets():
        dist = h * math.hypot(di, dj)
        a1, b1 = _offset_views(x1, di, dj)
        a2, b2 = _offset_views(x2, di, dj)
        sep = np.hypot(a1 - b1, a2 - b2)
        smin = float(np.min(sep))
        smax = float(np.max(sep))
        if smin <= 0.0:
            return math.inf
        hi = max(hi, dist / smin)
        lo = max(lo, smax / dist)
    ia, ib = long_pair_indices(n)
    ax = axis_coords(flow.L, h)
    dist = np.hypot(ax[ia % n] - ax[ib % n], ax[ia // n] - ax[ib // n])
    f1, f2 = x1.ravel(), x2.ravel()
    sep = np.hypot(f1[ia] - f1[ib], f2[ia] - f2[ib])
    if float(np.min(sep)) <= 0.0:
        return math.inf
    hi = max(hi, float(np.max(dist / sep)))
    lo = max(lo, float(np.max(sep / dist)))
    return max(hi, lo)


def grad_inverse_bound(flow: FlowMap) -> float:
    """Max absolute entry of (grad X)^{-1} over the grid; inf if det <= 0."""
    x1x, x1y, x2x, x2y = flow.grad_arrays()
    det = x1x * x2y - x1y * x2x
    if float(np.min(det)) <= 0.0:
        return math.inf
    entry = np.maximum(np.maximum(np.abs(x2y), np.abs(x1y)),
                       np.maximum(np.abs(x2x), np.abs(x1x)))
    return float(np.max(entry / np.abs(det)))


@dataclass(frozen=True)
class MembershipReport:
    inf_det: float
    holder_norm: float
    in_O: bool
    chord_arc_lambda: float
    grad_inv_bound: float
    gamma: float
    failed: tuple = ()

    def to_dict(self) -> dict:
        return {
            "inf_det": self.inf_det,
            "holder_norm": self.holder_norm,
            "in_O": self.in_O,
            "chord_arc_lambda": self.chord_arc_lambda,
            "grad_inv_bound": self.grad_inv_bound,
            "gamma": self.gamma,
            "failed": list(self.failed),
            "thresholds": {"inf_det": DET_FLOOR, "holder_norm": HOLDER_CAP},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def membership(flow: FlowMap, gamma: float | None = None) -> MembershipReport:
    if gamma is None:
        gamma = flow.gamma
    inf_det = float(np.min(flow.jacobian_arrays()))
    hnorm = holder_norm(flow, gamma)
    failed = []
    if not inf_det > DET_FLOOR:
        failed.append("inf_det")
    if not hnorm < HOLDER_CAP:
        failed.append("holder_norm")
    return MembershipReport(
        inf_det=inf_det,
        holder_norm=hnorm,
        in_O=not failed,
        chord_arc_lambda=chord_arc_lambda(flow),
        grad_inv_bound=grad_inverse_bound(flow),
        gamma=gamma,
        failed=tuple(failed),
    )
