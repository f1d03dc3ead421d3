"""Flow maps X = id + Y sampled on the box grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (ScalarField2D, axis_coords, grid_size, interp_bicubic)


def gradient_arrays(f1: np.ndarray, f2: np.ndarray, h: float):
    """Centered-difference gradients (one-sided at the boundary).

    Returns (d1x, d1y, d2x, d2y) where dIx = d f_I / dx.  Axis 0 of the
    sample arrays is y, axis 1 is x.
    """
    d1y, d1x = np.gradient(f1, h, edge_order=2)
    d2y, d2x = np.gradient(f2, h, edge_order=2)
    return d1x, d1y, d2x, d2y


@dataclass(frozen=True)
class FlowMap:
    """Displacement samples Y with X = id + Y on the grid of ``fields``."""

    L: float
    h: float
    Y1: np.ndarray
    Y2: np.ndarray
    gamma: float = 0.5

    def __post_init__(self):
        n = grid_size(self.L, self.h)
        for name in ("Y1", "Y2"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            if arr.shape != (n, n):
                raise ValueError(f"{name} shape {arr.shape} != grid {(n, n)}")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0,1), got {self.gamma}")

    @classmethod
    def identity(cls, L: float, h: float, gamma: float = 0.5) -> "FlowMap":
        n = grid_size(L, h)
        z = np.zeros((n, n))
        return cls(L, h, z, z, gamma)

    @classmethod
    def from_displacement(cls, like: "FlowMap", Y1, Y2) -> "FlowMap":
        return cls(like.L, like.h, Y1, Y2, like.gamma)

    @property
    def n(self) -> int:
        return self.Y1.shape[0]

    def axis(self) -> np.ndarray:
        return axis_coords(self.L, self.h)

    def position_arrays(self):
        """(X1, X2) = id + Y as full grid arrays."""
        ax = self.axis()
        xx, yy = np.meshgrid(ax, ax, indexing="xy")
        return xx + self.Y1, yy + self.Y2

    def is_identity(self) -> bool:
        return not (self.Y1.any() or self.Y2.any())

    def displacement_max(self) -> float:
        return max(float(np.max(np.abs(self.Y1))),
                   float(np.max(np.abs(self.Y2))))

    # -- differential quantities ------------------------------------------

    def grad_arrays(self):
        """(X1x, X1y, X2x, X2y) of the full map X = id + Y."""
        y1x, y1y, y2x, y2y = gradient_arrays(self.Y1, self.Y2, self.h)
        return y1x + 1.0, y1y, y2x, y2y + 1.0

    def jacobian_arrays(self) -> np.ndarray:
        x1x, x1y, x2x, x2y = self.grad_arrays()
        return x1x * x2y - x1y * x2x

    # -- pointwise evaluation ---------------------------------------------

    def displacement_at(self, px, py):
        return (interp_bicubic(self.Y1, px, py, self.L, self.h),
                interp_bicubic(self.Y2, px, py, self.L, self.h))

    def position_at(self, px, py):
        dy1, dy2 = self.displacement_at(px, py)
        return np.asarray(px, dtype=float) + dy1, np.asarray(py, dtype=float) + dy2

    def inverse_at(self, qx, qy, *, iters: int = 12, tol: float = 1e-12):
        """Solve X(p) = q by Newton iteration with interpolated gradients."""
        qx = np.asarray(qx, dtype=float)
        qy = np.asarray(qy, dtype=float)
        g = self.grad_arrays()
        px = qx - interp_bicubic(self.Y1, qx, qy, self.L, self.h)
        py = qy - interp_bicubic(self.Y2, qx, qy, self.L, self.h)
        for _ in range(iters):
            fx, fy = self.position_at(px, py)
            rx = fx - qx
            ry = fy - qy
            if max(np.max(np.abs(rx)), np.max(np.abs(ry))) < tol:
                break
            a = interp_bicubic(g[0], px, py, self.L, self.h)
            b = interp_bicubic(g[1], px, py, self.L, self.h)
            c = interp_bicubic(g[2], px, py, self.L, self.h)
            d = interp_bicubic(g[3], px, py, self.L, self.h)
            det = a * d - b * c
            px = px - (d * rx - b * ry) / det
            py = py - (-c * rx + a * ry) / det
        return px, py


def jacobian_det(flow: FlowMap) -> ScalarField2D:
    """det of the finite-difference gradient of X, as raw grid data.

    The determinant tends to 1 far from the data, so the decay invariant is
    not meaningful here; callers should not pass the result to quadrature.
    """
    return ScalarField2D(flow.L, flow.h, flow.jacobian_arrays(), flow.gamma)
