"""Sectional curvature of the F-metric on exact volumorphisms of the torus.

Two routes to the non-normalized curvature K_bar of the plane spanned by
single cosine modes cos(p.x), cos(q.x):

* a closed form in the symbol values F(p), F(q), F(p+q), F(p-q), and
* the four-term formula

      K_bar(u,v) = 1/4 ||ad*_v u + ad*_u v||^2 - <<ad*_u u, ad*_v v>>
                   - 3/4 ||ad_u v||^2 + 1/2 <<ad_u v, ad*_v u - ad*_u v>>

  evaluated by brute force with the mode algebra of :mod:`sqgeo.spectral`.

Each serves as the other's oracle; the normalized curvature divides by
||u||^2 ||v||^2 - <<u,v>>^2.  With F(p) = |p| the two scan families

    negative: p = 2*pi*(n,0), q = 2*pi*(0,n)   ->  K = 2(4-3*sqrt2) pi^3 n^3
    positive: p = 2*pi*(n,0), q = 2*pi*(n,n)   ->  K = +4.3181... n^3

grow without bound in both signs, cubically in the frequency multiplier.
"""

from __future__ import annotations

import dataclasses
import math

from .spectral import (
    LatticeVector,
    MetricSymbol,
    TrigField,
    ad,
    ad_star,
    inner_product,
)

__all__ = [
    "ModePair",
    "CurvatureReport",
    "DegeneratePlaneError",
    "closed_form_curvature",
    "four_term_curvature",
    "normalized_curvature",
    "curvature_scan",
    "SCAN_FAMILIES",
]


class DegeneratePlaneError(ValueError):
    """The two directions span a zero-area plane; curvature is undefined."""


class MetricDegeneracyGuard(ArithmeticError):
    """Defensive guard; cannot trigger for integer lattice vectors."""


@dataclasses.dataclass(frozen=True)
class ModePair:
    """An ordered pair of nonzero lattice directions."""

    p: LatticeVector
    q: LatticeVector

    def __post_init__(self):
        if self.p.is_zero() or self.q.is_zero():
            raise ValueError("mode pair requires nonzero lattice vectors")

    @property
    def nondegenerate(self) -> bool:
        return self.q != self.p and self.q != -self.p


@dataclasses.dataclass(frozen=True)
class CurvatureReport:
    """Evaluated curvature of one mode pair, with its normalization pieces."""

    kbar: float
    k: float | None
    norm_u2: float
    norm_v2: float
    cross: float
    method: str


def closed_form_curvature(pair: ModePair, F: MetricSymbol) -> float:
    """Non-normalized curvature of (cos p.x, cos q.x) in closed form.

    K_bar = |p^q|^2/8 * ( 1/4 (F(p)-F(q))^2 (1/F(p+q) + 1/F(p-q))
                          - 3/4 (F(p+q) + F(p-q)) + F(p) + F(q) ).

    Degenerate pairs (q = +/-p) return 0: the prefactor p^q vanishes and
    no symbol evaluation at frequency zero is needed.
    """
    p, q = pair.p, pair.q
    wedge = p.wedge(q)
    if wedge == 0.0:
        return 0.0
    s, d = p + q, p - q
    if s.is_zero() or d.is_zero():
        # unreachable on the integer lattice: p +/- q = 0 forces wedge = 0
        raise MetricDegeneracyGuard(
            "symbol evaluation at frequency zero with nonzero wedge"
        )
    fp, fq, fs, fd = F(p), F(q), F(s), F(d)
    brace = (
        0.25 * (fp - fq) ** 2 * (1.0 / fs + 1.0 / fd)
        - 0.75 * (fs + fd)
        + fp
        + fq
    )
    return wedge**2 / 8.0 * brace


def four_term_curvature(
    u_stream: TrigField, v_stream: TrigField, F: MetricSymbol
) -> float:
    """Brute-force curvature numerator from ad / ad* on arbitrary fields."""
    u, v = u_stream, v_stream
    ad_uv = ad(u, v)
    astar_uv = ad_star(u, v, F)
    astar_vu = ad_star(v, u, F)
    astar_uu = ad_star(u, u, F)
    astar_vv = ad_star(v, v, F)
    sym = astar_vu + astar_uv
    return (
        0.25 * inner_product(sym, sym, F)
        - inner_product(astar_uu, astar_vv, F)
        - 0.75 * inner_product(ad_uv, ad_uv, F)
        + 0.5 * inner_product(ad_uv, astar_vu - astar_uv, F)
    )


def normalized_curvature(
    pair: ModePair, F: MetricSymbol, method: str = "closed_form"
) -> CurvatureReport:
    """Sectional curvature K = K_bar / (||u||^2 ||v||^2 - <<u,v>>^2).

    The denominator is the Gram determinant of the plane; p = +/-q makes it
    zero and the curvature undefined.
    """
    u = TrigField.cosine(pair.p)
    v = TrigField.cosine(pair.q)
    norm_u2 = inner_product(u, u, F)
    norm_v2 = inner_product(v, v, F)
    cross = inner_product(u, v, F)
    if method == "closed_form":
        kbar = closed_form_curvature(pair, F)
    elif method == "four_term":
        kbar = four_term_curvature(u, v, F)
    else:
        raise ValueError(f"unknown method {method!r}")
    gram = norm_u2 * norm_v2 - cross * cross
    if gram <= 0.0:
        raise DegeneratePlaneError(
            f"plane of {pair} has Gram determinant {gram}; curvature undefined"
        )
    return CurvatureReport(
        kbar=kbar,
        k=kbar / gram,
        norm_u2=norm_u2,
        norm_v2=norm_v2,
        cross=cross,
        method=method,
    )


def mode_pairs(extent: int):
    """All nondegenerate ModePairs with |p|_inf, |q|_inf <= extent.

    Enumeration order is fixed (lexicographic in (p, q)) so scans over the
    truncation are deterministic.
    """
    if extent < 1:
        raise ValueError("extent must be at least 1")
    vecs = [
        LatticeVector(jx, ky)
        for jx in range(-extent, extent + 1)
        for ky in range(-extent, extent + 1)
        if (jx, ky) != (0, 0)
    ]
    for p in vecs:
        for q in vecs:
            pair = ModePair(p, q)
            if pair.nondegenerate:
                yield pair


def _negative_family(n: int) -> ModePair:
    return ModePair(LatticeVector(n, 0), LatticeVector(0, n))


def _positive_family(n: int) -> ModePair:
    return ModePair(LatticeVector(n, 0), LatticeVector(n, n))


SCAN_FAMILIES = {
    "negative": _negative_family,
    "positive": _positive_family,
}


def curvature_scan(
    family: str,
    n_max: int,
    F: MetricSymbol,
    method: str = "closed_form",
) -> list[tuple[int, float, float]]:
    """Rows (n, K, K/n^3) for n = 1..n_max along one scan family.

    For both built-in families and any homogeneous symbol the ratio K/n^3
    is exactly constant in n.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    try:
        make_pair = SCAN_FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unknown family {family!r}; choose from {sorted(SCAN_FAMILIES)}"
        ) from None
    rows = []
    for n in range(1, n_max + 1):
        report = normalized_curvature(make_pair(n), F, method=method)
        rows.append((n, report.k, report.k / n**3))
    return rows
