"""Time integration of the flow-map equation dX/dt = F(X, theta0).

Classical fourth-order Runge-Kutta on the displacement samples.  After
every completed step the admissible-set report is recomputed; if the map
leaves the set, integration halts with the last good state attached, since
the quadrature error bounds are conditional on membership.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..backend import backend_name, get_backend
from .fields import ScalarField2D
from .maps import FlowMap
from .membership import MembershipReport, membership
from .velocity import eval_F, interaction_energy

DEFAULT_DT = 1.0 / 32.0
MAX_STEPS = 100_000


@dataclass(frozen=True)
class FlowState:
    t: float
    flow: FlowMap
    report: MembershipReport
    energy: float | None = None


class DomainDepartureError(RuntimeError):
    """The map left the admissible set; carries the last good trajectory."""

    def __init__(self, t: float, states, report: MembershipReport):
        self.t = t
        self.states = states
        self.report = report
        super().__init__(
            f"flow left the admissible set at t={t:g}; failed criteria: "
            + ", ".join(report.failed))


@dataclass
class Trajectory:
    theta0: ScalarField2D
    dt: float
    states: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def final(self) -> FlowState:
        return self.states[-1]

    def times(self):
        return [s.t for s in self.states]

    def reports(self):
        return [s.report for s in self.states]


def evolve(theta0: ScalarField2D, t_end: float = 1.0, dt: float | None = None,
           *, backend=None, threads: int = 1, record_every: int = 1,
           with_energy: bool = False, max_steps: int = MAX_STEPS) -> Trajectory:
    if dt is None:
        dt = DEFAULT_DT
    if dt <= 0 or t_end < 0:
        raise ValueError("need dt > 0 and t_end >= 0")
    n_steps = max(int(math.ceil(t_end / dt - 1e-12)), 0)
    if n_steps > max_steps:
        raise ValueError(f"{n_steps} steps exceed the guard of {max_steps}")
    theta0.require_decay()
    mod = backend if hasattr(backend, "corrected_eval") else get_backend(backend)

    L, h, gamma = theta0.L, theta0.h, theta0.gamma
    flow = FlowMap.identity(L, h, gamma)
    Y1 = np.zeros_like(flow.Y1)
    Y2 = np.zeros_like(flow.Y2)

    def rhs(a1, a2):
        fm = FlowMap(L, h, a1, a2, gamma)
        return eval_F(fm, theta0, backend=mod, threads=threads,
                      check_membership=False)

    traj = Trajectory(theta0=theta0, dt=dt, config={
        "L": L, "h": h, "gamma": gamma, "dt": dt, "t_end": t_end,
        "scheme": "rk4", "backend": backend_name(mod), "threads": threads,
    })
    e0 = interaction_energy(flow, theta0, backend=mod, threads=threads) \
        if with_energy else None
    traj.states.append(FlowState(0.0, flow, membership(flow), e0))

    t = 0.0
    for step in range(n_steps):
        step_dt = min(dt, t_end - t)
        k11, k12 = rhs(Y1, Y2)
        k21, k22 = rhs(Y1 + 0.5 * step_dt * k11, Y2 + 0.5 * step_dt * k12)
        k31, k32 = rhs(Y1 + 0.5 * step_dt * k21, Y2 + 0.5 * step_dt * k22)
        k41, k42 = rhs(Y1 + step_dt * k31, Y2 + step_dt * k32)
        Y1 = Y1 + (step_dt / 6.0) * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
        Y2 = Y2 + (step_dt / 6.0) * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
        t += step_dt

        flow = FlowMap(L, h, Y1, Y2, gamma)
        report = membership(flow)
        if not report.in_O:
            raise DomainDepartureError(t, traj.states, report)
        last = step == n_steps - 1
        if last or (step + 1) % record_every == 0:
            energy = interaction_energy(flow, theta0, backend=mod,
                                        threads=threads) \
                if (with_energy and last) else None
            traj.states.append(FlowState(t, flow, report, energy))
    return traj


def exp_map(theta0: ScalarField2D,*, dt: float | None = None, backend=None,
            threads: int = 1) -> FlowMap:
    """Time-1 flow of the velocity law: the Riemannian exponential of theta0."""
    return evolve(theta0, 1.0, dt, backend=backend, threads=threads,
                  record_every=10**9).final.flow


# -- smooth-dependence probe ----------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    eps: tuple
    d1_errors: tuple
    d1_slope: float
    d2_errors: tuple
    d2_slope: float
    mixed_defects: tuple
    mixed_decreasing: bool
    params: dict

    def to_dict(self) -> dict:
        return {
            "eps": list(self.eps),
            "d1_errors": list(self.d1_errors),
            "d1_slope": self.d1_slope,
            "d2_errors": list(self.d2_errors),
            "d2_slope": self.d2_slope,
            "mixed_defects": list(self.mixed_defects),
            "mixed_decreasing": self.mixed_decreasing,
            "params": self.params,
        }


def _loglog_slope(xs, ys) -> float:
    lx = np.log(np.asarray(xs))
    ly = np.log(np.asarray(ys))
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    sol, *_ = np.linalg.lstsq(A, ly, rcond=None)
    return float(sol[0])


def fd_smoothness_probe(theta0: ScalarField2D, d1: ScalarField2D,
                        d2: ScalarField2D | None = None,
                        eps_list=(0.4, 0.2, 0.1), *, dt: float | None = None,
                        backend=None, threads: int = 1) -> ProbeReport:
    """Central-difference evidence that the time-1 map depends smoothly on
    the initial data.

    Every evaluation reuses the same grids, source masks, and step count,
    so the discrete exponential is an exact smooth function of the samples
    and the Richardson slopes are clean down to roundoff.  The mixed-
    derivative stencil is run with the two step sizes swapped between the
    directions; both approximate the same mixed derivative, so their
    difference must shrink under refinement.
    """
    if d2 is None:
        d2 = d1
    eps_list = tuple(float(e) for e in eps_list)
    if len(eps_list) < 2 or any(e <= 0 for e in eps_list):
        raise ValueError("need at least two positive eps values")

    cache: dict = {}

    def ex(s1: float, s2: float) -> np.ndarray:
        key = (s1, s2)
        if key not in cache:
            fld = theta0
            if s1:
                fld = fld + s1 * d1
            if s2:
                fld = fld + s2 * d2
            fm = exp_map(fld, dt=dt, backend=backend, threads=threads)
            cache[key] = np.stack([fm.Y1, fm.Y2])
        return cache[key]

    def first(e):
        return (ex(e, 0.0) - ex(-e, 0.0)) / (2.0 * e)

    def second(e):
        return (ex(e, 0.0) - 2.0 * ex(0.0, 0.0) + ex(-e, 0.0)) / (e * e)

    def mixed(e1, e2):
        return (ex(e1, e2) - ex(e1, -e2) - ex(-e1, e2) + ex(-e1, -e2)) \
            / (4.0 * e1 * e2)

    d1_vals = [first(e) for e in eps_list]
    d2_vals = [second(e) for e in eps_list]
    d1_errors = tuple(float(np.max(np.abs(a - b)))
                      for a, b in zip(d1_vals, d1_vals[1:]))
    d2_errors = tuple(float(np.max(np.abs(a - b)))
                      for a, b in zip(d2_vals, d2_vals[1:]))
    d1_slope = _loglog_slope(eps_list[:-1], d1_errors)
    d2_slope = _loglog_slope(eps_list[:-1], d2_errors)

    defects = []
    for e in eps_list[:-1]:
        m_ab = mixed(e, 0.5 * e)
        m_ba = mixed(0.5 * e, e)
        defects.append(float(np.max(np.abs(m_ab - m_ba))))
    decreasing = all(a > b for a, b in zip(defects, defects[1:]))

    return ProbeReport(
        eps=eps_list,
        d1_errors=d1_errors,
        d1_slope=d1_slope,
        d2_errors=d2_errors,
        d2_slope=d2_slope,
        mixed_defects=tuple(defects),
        mixed_decreasing=decreasing,
        params={"L": theta0.L, "h": theta0.h, "gamma": theta0.gamma,
                "dt": dt if dt is not None else DEFAULT_DT},
    )


def eulerian_theta(flow: FlowMap, theta0: ScalarField2D) -> ScalarField2D:
    """Scatter theta0 along the map and interpolate back to the grid.

    Uses a Clough-Tocher interpolant over the displaced support nodes; the
    result approximates theta0 composed with the inverse map.  Nodes outside
    the displaced support hull are filled with zero.
    """
    from scipy.interpolate import CloughTocher2DInterpolator

    reach = (theta0.support_radius or theta0.L) + 0.4
    ax = theta0.axis()
    xx, yy = np.meshgrid(ax, ax, indexing="xy")
    mask = xx * xx + yy * yy <= reach * reach
    x1, x2 = flow.position_arrays()
    pts = np.stack([x1[mask], x2[mask]], axis=1)
    interp = CloughTocher2DInterpolator(pts, np.asarray(theta0.samples)[mask],
                                        fill_value=0.0)
    vals = interp(np.stack([xx.ravel(), yy.ravel()], axis=1))
    return ScalarField2D(theta0.L, theta0.h, vals.reshape(xx.shape),
                         theta0.gamma, None)
