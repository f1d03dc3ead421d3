"""Jacobi fields along the rotation geodesic on the sphere.

The steady stream function f = -cos(phi) (rigid rotation) is a geodesic of
the F(p)=|p| metric; perturbations decompose over spherical harmonics
Y_nm, and each (n, m) coefficient pair (h, g) obeys the linear system

    h'(t) = i a_n m h(t),          a_n = (sqrt(2) - lambda_n) / lambda_n,
    g'(t) = h(t) - i m g(t),       lambda_n = sqrt(n(n+1)),

with g(0) = 0 so that the perturbation is a proper Jacobi field.  The
closed-form solution is

    h(t) = C exp(i a_n m t)
    g(t) = -i C / ((1+a_n) m) * e^{-imt} (e^{i(1+a_n)mt} - 1)

whose zeros  t_nm = 2 pi sqrt(n(n+1)) / (sqrt(2) m)  are the conjugate
times.  (Direct integration of g' + img = h fixes the overall phase factor
as e^{-imt}; an e^{-int} variant appears in circulation and is adopted
here in the -imt form, which the RK4 oracle confirms.  The zero locations
are identical either way.)  Along the diagonal m = n the times decrease
strictly to pi*sqrt(2): conjugate points cluster at a finite time, so the
exponential map is epiconjugate there without being monoconjugate.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

__all__ = [
    "SphericalHarmonicIndex",
    "JacobiModeSolution",
    "ConjugatePoint",
    "lambda_n",
    "mode_solution",
    "integrate_jacobi_ode",
    "conjugate_time",
    "cluster_scan",
    "steady_background_check",
    "locate_zero",
    "CLUSTER_LIMIT",
]

#: The cluster-limit time pi*sqrt(2) = lim_{n} t_nn.
CLUSTER_LIMIT = math.pi * math.sqrt(2.0)

MAX_STEPS = 10**8


def lambda_n(n: int) -> float:
    """Square-root Laplacian eigenvalue sqrt(n(n+1)) on degree-n harmonics."""
    if n < 1:
        raise ValueError("degree n must be a positive integer")
    return math.sqrt(n * (n + 1))


@dataclasses.dataclass(frozen=True)
class SphericalHarmonicIndex:
    """Degree/order pair (n, m) with -n <= m <= n, n >= 1."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("degree n must be >= 1")
        if not -self.n <= self.m <= self.n:
            raise ValueError(f"order m={self.m} out of range for n={self.n}")

    @property
    def eigenvalue(self) -> float:
        return lambda_n(self.n)


def _a_n(n: int) -> float:
    lam = lambda_n(n)
    return (math.sqrt(2.0) - lam) / lam


@dataclasses.dataclass(frozen=True)
class JacobiModeSolution:
    """Closed-form (h, g) coefficient pair for one spherical-harmonic mode.

    ``trivial`` marks the m = 0 branch, where the bracket term vanishes:
    h stays constant and g(t) = C t, with no conjugate time.
    """

    index: SphericalHarmonicIndex
    amplitude: complex
    a_n: float
    trivial: bool = False

    def h(self, t):
        t = np.asarray(t, dtype=float)
        if self.trivial:
            return self.amplitude * np.ones_like(t, dtype=complex)
        return self.amplitude * np.exp(1j * self.a_n * self.index.m * t)

    def g(self, t):
        t = np.asarray(t, dtype=float)
        C, m = self.amplitude, self.index.m
        if self.trivial:
            return C * t.astype(complex)
        a = self.a_n
        return (
            -1j
            * C
            / ((1.0 + a) * m)
            * np.exp(-1j * m * t)
            * (np.exp(1j * (1.0 + a) * m * t) - 1.0)
        )


def mode_solution(n: int, m: int, C: complex) -> JacobiModeSolution:
    """Closed-form Jacobi mode; g(0) = 0 holds by construction.

    Negative orders are obtained from the conjugation symmetry
    (h, g)_{n,-m}(t; C) = conj( (h, g)_{n,m}(t; conj(C)) ), which the
    returned object applies internally.
    """
    index = SphericalHarmonicIndex(n, m)
    if m == 0:
        return JacobiModeSolution(index, complex(C), _a_n(n), trivial=True)
    if m < 0:
        return _ConjugatedSolution(index, complex(C), _a_n(n))
    return JacobiModeSolution(index, complex(C), _a_n(n))


class _ConjugatedSolution(JacobiModeSolution):
    """m < 0 via conjugation of the mirrored m > 0 solution."""

    def _mirror(self) -> JacobiModeSolution:
        return JacobiModeSolution(
            SphericalHarmonicIndex(self.index.n, -self.index.m),
            self.amplitude.conjugate(),
            self.a_n,
        )

    def h(self, t):
        return np.conj(self._mirror().h(t))

    def g(self, t):
        return np.conj(self._mirror().g(t))


def integrate_jacobi_ode(
    n: int, m: int, C: complex, t_end: float, dt: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Classical RK4 on h' = i a_n m h,  g' = h - i m g.

    Returns (times, h, g) sampled at every step including t = 0.  The
    generator of h is purely imaginary, so |h| = |C| along the exact flow;
    the integrator preserves it to O(dt^6) per step.
    """
    if dt <= 0.0 or t_end <= 0.0:
        raise ValueError("dt and t_end must be positive")
    n_steps = int(round(t_end / dt))
    if n_steps > MAX_STEPS:
        raise ValueError(f"t_end/dt = {t_end / dt:.3g} exceeds step budget")
    SphericalHarmonicIndex(n, m)  # validate the index range
    ia = 1j * _a_n(n) * m
    im = 1j * m

    def rhs(h, g):
        return ia * h, h - im * g

    times = np.empty(n_steps + 1)
    hs = np.empty(n_steps + 1, dtype=complex)
    gs = np.empty(n_steps + 1, dtype=complex)
    h, g = complex(C), 0.0 + 0.0j
    times[0], hs[0], gs[0] = 0.0, h, g
    for step in range(1, n_steps + 1):
        k1h, k1g = rhs(h, g)
        k2h, k2g = rhs(h + 0.5 * dt * k1h, g + 0.5 * dt * k1g)
        k3h, k3g = rhs(h + 0.5 * dt * k2h, g + 0.5 * dt * k2g)
        k4h, k4g = rhs(h + dt * k3h, g + dt * k3g)
        h = h + dt / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h)
        g = g + dt / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        times[step] = step * dt
        hs[step] = h
        gs[step] = g
    return times, hs, gs


def conjugate_time(n: int, m: int) -> float:
    """First positive zero of g: t_nm = 2 pi sqrt(n(n+1)) / (sqrt(2) m).

    Evaluated as 2 pi sqrt(n(n+1)/2) / m; the triangular number n(n+1)/2
    is exact in floating point, so t_11 = 2 pi exactly.
    """
    if n < 1 or m < 1:
        raise ValueError("conjugate_time requires n >= 1 and m >= 1")
    return 2.0 * math.pi * math.sqrt(n * (n + 1) / 2) / m


@dataclasses.dataclass(frozen=True)
class ConjugatePoint:
    """A located conjugate time, or the cluster limit itself."""

    index: SphericalHarmonicIndex
    t: float
    kind: str  # "monoconjugate_candidate" | "cluster_limit"

    def __post_init__(self):
        if self.t <= 0.0:
            raise ValueError("conjugate time must be positive")
        if self.kind not in ("monoconjugate_candidate", "cluster_limit"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "cluster_limit" and self.t != CLUSTER_LIMIT:
            raise ValueError("cluster_limit must sit at pi*sqrt(2)")


def cluster_scan(n_max: int) -> list[tuple[int, float, float]]:
    """Rows (n, t_nn, t_nn - pi*sqrt(2)) for n = 2..n_max.

    The diagonal times t_nn = pi sqrt(2) sqrt(1 + 1/n) decrease strictly
    to the cluster limit; every neighborhood of pi*sqrt(2) contains all but
    finitely many of them.
    """
    if n_max < 2:
        raise ValueError("cluster_scan requires n_max >= 2")
    return [
        (n, conjugate_time(n, n), conjugate_time(n, n) - CLUSTER_LIMIT)
        for n in range(2, n_max + 1)
    ]


def steady_background_check() -> dict:
    """Algebraic sanity of the background: eigenvalue, steadiness, period.

    * the degree-1 eigenvalue squares to exactly 2 (integer arithmetic),
      i.e. sqrt(-Laplacian) cos(phi) = sqrt(2) cos(phi);
    * a_1 = 0, so degree-1 perturbations have constant h (the background
      is steady in the rotating frame);
    * the (1,1) conjugate time is one full period 2 pi.
    """
    eigen_sq_residual = 1 * (1 + 1) - 2  # lambda_1^2 - 2, exact
    a1 = _a_n(1)
    t11 = conjugate_time(1, 1)
    return {
        "eigenvalue_sq_residual": float(eigen_sq_residual),
        "a_1": a1,
        "t_11": t11,
        "t_11_is_2pi": t11 == 2.0 * math.pi,
        "pass": eigen_sq_residual == 0 and a1 == 0.0 and t11 == 2.0 * math.pi,
    }


def locate_zero(times: np.ndarray, values: np.ndarray, near: float) -> float:
    """Refine the zero of |values| nearest ``near`` from a sampled trajectory.

    Fits a parabola to |v|^2 at the three samples around the local minimum;
    for a simple zero of a smooth complex trajectory this recovers the
    crossing time to O(dt^2).
    """
    mag2 = np.abs(values) ** 2
    idx = int(np.argmin(np.abs(times - near)))
    # walk downhill to the local minimum of |v|^2
    while 0 < idx < len(mag2) - 1:
        if mag2[idx - 1] < mag2[idx]:
            idx -= 1
        elif mag2[idx + 1] < mag2[idx]:
            idx += 1
        else:
            break
    idx = max(1, min(len(mag2) - 2, idx))
    y0, y1, y2 = mag2[idx - 1], mag2[idx], mag2[idx + 1]
    denom = y0 - 2.0 * y1 + y2
    shift = 0.0 if denom == 0.0 else 0.5 * (y0 - y2) / denom
    shift = float(np.clip(shift, -1.0, 1.0))
    return float(times[idx] + shift * (times[idx] - times[idx - 1]))
