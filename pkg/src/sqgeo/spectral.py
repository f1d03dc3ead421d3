"""Exact mode-level algebra for stream functions on the unit torus.

Fields are finite real trigonometric polynomials

    f(x, y) = sum_p  c_p * cos(p.x)  +  s_p * sin(p.x),
    p = 2*pi*(jx, ky),  jx, ky integers,

stored canonically: each lattice direction appears once, with the first
nonzero integer component positive (cos is even and sin odd under p -> -p,
so this loses nothing).  The zero frequency carries only a cos (constant)
term; it is tracked but excluded from every metric pairing.

Conventions fixed here and used everywhere downstream:

    perp gradient   grad^perp f = (-f_y, f_x)
    Poisson bracket {f, g} = <grad f, grad^perp g> = -f_x g_y + f_y g_x
    wedge           p ^ q  = p1 q2 - p2 q1

On single complex modes {e^{ip.x}, e^{iq.x}} = (p^q) e^{i(p+q).x}, which
expands to the product-to-sum tables used by :func:`poisson_bracket`.

The metric is <<f, g>> = sum_p F(p) c_f(p) c_g(p) / 2 for a positive even
symbol F on the dual lattice; F(p) = |p| is the inertia operator whose
Euler-Arnold equation is the stream-function form of surface
quasi-geostrophic flow.
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Callable, Iterable, Iterator

import numpy as np

__all__ = [
    "LatticeVector",
    "TrigField",
    "MetricSymbol",
    "MetricDegeneracyError",
    "SQRT_LAPLACIAN",
    "sobolev_symbol",
    "poisson_bracket",
    "inner_product",
    "ad",
    "ad_star",
    "euler_arnold_rhs",
]

TWO_PI = 2.0 * math.pi

COS = "cos"
SIN = "sin"


class MetricDegeneracyError(ValueError):
    """Raised when the inverse inertia operator would act on frequency zero."""


@dataclasses.dataclass(frozen=True, order=True)
class LatticeVector:
    """Dual-lattice vector; components are the integer multiples of 2*pi.

    The real frequencies are ``j = 2*pi*jx`` and ``k = 2*pi*ky``.
    """

    jx: int
    ky: int

    def __post_init__(self):
        if self.jx != int(self.jx) or self.ky != int(self.ky):
            raise ValueError("lattice components must be integers")

    @property
    def j(self) -> float:
        return TWO_PI * self.jx

    @property
    def k(self) -> float:
        return TWO_PI * self.ky

    @property
    def norm(self) -> float:
        return TWO_PI * math.hypot(self.jx, self.ky)

    def wedge(self, other: "LatticeVector") -> float:
        """p ^ q = j*m - k*l (antisymmetric)."""
        return TWO_PI * TWO_PI * (self.jx * other.ky - self.ky * other.jx)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(self.jx + other.jx, self.ky + other.ky)

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(self.jx - other.jx, self.ky - other.ky)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(-self.jx, -self.ky)

    def is_zero(self) -> bool:
        return self.jx == 0 and self.ky == 0


def _canonical(jx: int, ky: int, parity: str, coef: float):
    """Map a raw (p, parity, coef) term to canonical direction storage."""
    if jx == 0 and ky == 0:
        if parity == SIN:
            return None  # sin(0) is identically zero
        return (0, 0, COS, coef)
    if jx < 0 or (jx == 0 and ky < 0):
        # cos even, sin odd under p -> -p
        return (-jx, -ky, parity, coef if parity == COS else -coef)
    return (jx, ky, parity, coef)


class TrigField:
    """Finite real trigonometric polynomial in canonical mode storage."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[tuple[int, int, str, float]] = ()):
        acc: dict[tuple[int, int, str], float] = {}
        for jx, ky, parity, coef in terms:
            if parity not in (COS, SIN):
                raise ValueError(f"unknown parity {parity!r}")
            canon = _canonical(int(jx), int(ky), parity, float(coef))
            if canon is None:
                continue
            key = canon[:3]
            acc[key] = acc.get(key, 0.0) + canon[3]
        self._terms = {k: v for k, v in acc.items() if v != 0.0}

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "TrigField":
        return TrigField()

    @staticmethod
    def cosine(p: LatticeVector, coef: float = 1.0) -> "TrigField":
        return TrigField([(p.jx, p.ky, COS, coef)])

    @staticmethod
    def sine(p: LatticeVector, coef: float = 1.0) -> "TrigField":
        return TrigField([(p.jx, p.ky, SIN, coef)])

    @staticmethod
    def constant(c: float) -> "TrigField":
        return TrigField([(0, 0, COS, c)])

    # -- views --------------------------------------------------------

    def terms(self) -> Iterator[tuple[LatticeVector, str, float]]:
        for (jx, ky, parity), coef in sorted(self._terms.items()):
            yield LatticeVector(jx, ky), parity, coef

    def coef(self, p: LatticeVector, parity: str) -> float:
        canon = _canonical(p.jx, p.ky, parity, 1.0)
        if canon is None:
            return 0.0
        jx, ky, par, sign = canon
        return sign * self._terms.get((jx, ky, par), 0.0)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def mean(self) -> float:
        """The integral over the unit torus (the zero-frequency coefficient)."""
        return self._terms.get((0, 0, COS), 0.0)

    def is_mean_zero(self) -> bool:
        return (0, 0, COS) not in self._terms

    def max_abs_coef(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def __eq__(self, other) -> bool:
        return isinstance(other, TrigField) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        parts = [
            f"{coef:+g}*{parity}(2pi*({jx},{ky}).x)"
            for (jx, ky, parity), coef in sorted(self._terms.items())
        ]
        return "TrigField(" + " ".join(parts) + ")" if parts else "TrigField(0)"

    # -- algebra ------------------------------------------------------

    def __add__(self, other: "TrigField") -> "TrigField":
        merged = dict(self._terms)
        for key, coef in other._terms.items():
            merged[key] = merged.get(key, 0.0) + coef
        out = TrigField()
        out._terms = {k: v for k, v in merged.items() if v != 0.0}
        return out

    def __sub__(self, other: "TrigField") -> "TrigField":
        return self + (-1.0) * other

    def __rmul__(self, scalar: float) -> "TrigField":
        scalar = float(scalar)
        out = TrigField()
        if scalar != 0.0:
            out._terms = {k: scalar * v for k, v in self._terms.items()}
        return out

    def __mul__(self, scalar: float) -> "TrigField":
        return self.__rmul__(scalar)

    def __neg__(self) -> "TrigField":
        return (-1.0) * self

    # -- sampling and serialization -----------------------------------

    def sample(self, n: int) -> np.ndarray:
        """Evaluate on the n-by-n uniform grid of the unit torus.

        Returns array indexed [iy, ix] with x = ix/n, y = iy/n.
        """
        x = np.arange(n) / n
        xx, yy = np.meshgrid(x, x)
        out = np.zeros((n, n))
        for (jx, ky, parity), coef in self._terms.items():
            phase = TWO_PI * (jx * xx + ky * yy)
            out += coef * (np.cos(phase) if parity == COS else np.sin(phase))
        return out

    def to_records(self) -> list[dict]:
        return [
            {"jx": jx, "ky": ky, "parity": parity, "coef": coef}
            for (jx, ky, parity), coef in sorted(self._terms.items())
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_records())

    @staticmethod
    def from_records(records: Iterable[dict]) -> "TrigField":
        return TrigField(
            (r["jx"], r["ky"], r["parity"], r["coef"]) for r in records
        )

    @staticmethod
    def from_json(text: str) -> "TrigField":
        return TrigField.from_records(json.loads(text))


@dataclasses.dataclass(frozen=True)
class MetricSymbol:
    """Positive even symbol F on the dual lattice defining the inertia operator.

    F(0) is undefined; requesting it is always an error.
    """

    label: str
    rule: Callable[[LatticeVector], float]

    def __call__(self, p: LatticeVector) -> float:
        if p.is_zero():
            raise MetricDegeneracyError(
                f"symbol {self.label!r} evaluated at the zero frequency"
            )
        value = self.rule(p)
        if not value > 0.0:
            raise ValueError(
                f"symbol {self.label!r} must be positive, got {value} at {p}"
            )
        return value


SQRT_LAPLACIAN = MetricSymbol("sqrt_laplacian", lambda p: p.norm)


def sobolev_symbol(s: float) -> MetricSymbol:
    """F_s(p) = |p|^(2+2s): the degree-s scale of metrics on velocities.

    s = -1/2 coincides with :data:`SQRT_LAPLACIAN`.
    """
    expo = 2.0 + 2.0 * s
    return MetricSymbol(f"sobolev_s={s:g}", lambda p: p.norm**expo)


# -- the product-to-sum tables for the bracket ------------------------
#
# {cos p, cos q} = (p^q)/2 [ cos(p+q) - cos(p-q) ]
# {cos p, sin q} = (p^q)/2 [ sin(p+q) + sin(p-q) ]
# {sin p, cos q} = (p^q)/2 [ sin(p+q) - sin(p-q) ]
# {sin p, sin q} = -(p^q)/2 [ cos(p+q) + cos(p-q) ]
#
# Encoded as (parity of outputs, sign on p+q mode, sign on p-q mode).

_BRACKET_TABLE = {
    (COS, COS): (COS, 1.0, -1.0),
    (COS, SIN): (SIN, 1.0, 1.0),
    (SIN, COS): (SIN, 1.0, -1.0),
    (SIN, SIN): (COS, -1.0, -1.0),
}


def poisson_bracket(f: TrigField, g: TrigField) -> TrigField:
    """{f, g} = -f_x g_y + f_y g_x, expanded exactly into modes."""
    raw: list[tuple[int, int, str, float]] = []
    for (pjx, pky, pf), cf in f._terms.items():
        for (qjx, qky, pg), cg in g._terms.items():
            wedge_int = pjx * qky - pky * qjx
            if wedge_int == 0:
                continue
            half = 0.5 * TWO_PI * TWO_PI * wedge_int * cf * cg
            out_par, sign_sum, sign_diff = _BRACKET_TABLE[(pf, pg)]
            raw.append((pjx + qjx, pky + qky, out_par, sign_sum * half))
            raw.append((pjx - qjx, pky - qky, out_par, sign_diff * half))
    return TrigField(raw)


def inner_product(f: TrigField, g: TrigField, F: MetricSymbol) -> float:
    """<<f, g>> = sum_p F(p) c_f(p) c_g(p) / 2, zero frequency excluded."""
    total = 0.0
    small, large = (f._terms, g._terms)
    if len(large) < len(small):
        small, large = large, small
    for key in sorted(small):
        if key[:2] == (0, 0):
            continue
        other = large.get(key)
        if other is None:
            continue
        total += 0.5 * F(LatticeVector(key[0], key[1])) * small[key] * other
    return total


def ad(psi: TrigField, nu: TrigField) -> TrigField:
    """ad_psi nu = {nu, psi}."""
    return poisson_bracket(nu, psi)


def ad_star(psi: TrigField, phi: TrigField, F: MetricSymbol) -> TrigField:
    """Metric adjoint: ad*_psi phi = Lambda^{-1}( -{Lambda phi, psi} ).

    Satisfies <<ad*_psi phi, nu>> = <<phi, ad_psi nu>> for all nu.
    """
    if not phi.is_mean_zero():
        raise ValueError("ad_star requires a mean-zero argument")
    lam_phi = TrigField(
        (jx, ky, parity, coef * F(LatticeVector(jx, ky)))
        for (jx, ky, parity), coef in phi._terms.items()
    )
    h = poisson_bracket(psi, lam_phi)  # = -{Lambda phi, psi}
    out_terms = []
    for (jx, ky, parity), coef in h._terms.items():
        if jx == 0 and ky == 0:
            # cannot invert the inertia operator on a constant
            raise MetricDegeneracyError(
                "bracket produced a nonzero constant; Lambda^{-1} undefined"
            )
        out_terms.append((jx, ky, parity, coef / F(LatticeVector(jx, ky))))
    return TrigField(out_terms)


def euler_arnold_rhs(psi: TrigField, F: MetricSymbol) -> TrigField:
    """Right side of psi_t = -ad*_psi psi (geodesic flow of the F-metric).

    For F(p) = |p| this is the stream-function form of the SQG equation.
    """
    return -ad_star(psi, psi, F)
