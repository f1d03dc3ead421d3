"""Mode algebra: frozen expansions, grid oracles, and structural properties.

The expected values here were derived independently of the implementation:
bracket expansions by the complex-exponential identity
{e^{ip.x}, e^{iq.x}} = (p^q) e^{i(p+q).x}, inner products by hand from
int cos^2 = 1/2, and the grid oracle evaluates the defining differential
expression -f_x g_y + f_y g_x with FFT derivatives on sampled data.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sqgeo.spectral import (
    COS,
    SIN,
    SQRT_LAPLACIAN,
    LatticeVector,
    MetricDegeneracyError,
    MetricSymbol,
    TrigField,
    ad,
    ad_star,
    euler_arnold_rhs,
    inner_product,
    poisson_bracket,
    sobolev_symbol,
)

TWO_PI = 2.0 * math.pi

FLAT = MetricSymbol("one", lambda p: 1.0)


def fft_bracket_samples(f: TrigField, g: TrigField, n: int) -> np.ndarray:
    """Evaluate -f_x g_y + f_y g_x on the n-by-n grid via FFT derivatives.

    Exact (to rounding) for band-limited fields with |freq| < n/2.
    """
    freqs = TWO_PI * 1j * np.fft.fftfreq(n, d=1.0 / n)
    kx = freqs[np.newaxis, :]
    ky = freqs[:, np.newaxis]

    def dx(a):
        return np.real(np.fft.ifft2(np.fft.fft2(a) * kx))

    def dy(a):
        return np.real(np.fft.ifft2(np.fft.fft2(a) * ky))

    fs, gs = f.sample(n), g.sample(n)
    return -dx(fs) * dy(gs) + dy(fs) * dx(gs)


# deliberately small integer boxes so triple brackets stay band-limited
coef_st = st.floats(
    min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False
).map(lambda c: round(c, 3))
mode_st = st.tuples(
    st.integers(-3, 3), st.integers(-3, 3), st.sampled_from([COS, SIN]), coef_st
)
field_st = st.lists(mode_st, min_size=1, max_size=4).map(TrigField)


def mean_zero(f: TrigField) -> TrigField:
    return f - TrigField.constant(f.mean)


class TestBracketExpansion:
    def test_same_mode_vanishes(self):
        f = TrigField.cosine(LatticeVector(1, 0))
        assert poisson_bracket(f, f).is_zero()

    def test_constant_annihilates(self):
        f = TrigField.cosine(LatticeVector(2, 1), 0.7) + TrigField.sine(
            LatticeVector(0, 3), -1.2
        )
        assert poisson_bracket(f, TrigField.constant(4.0)).is_zero()
        assert poisson_bracket(TrigField.constant(-1.0), f).is_zero()

    def test_cos_cos_product_to_sum(self):
        # {cos p, cos q} = (p^q)/2 [cos(p+q) - cos(p-q)], p=(2pi,0), q=(0,2pi)
        p, q = LatticeVector(1, 0), LatticeVector(0, 1)
        out = poisson_bracket(TrigField.cosine(p), TrigField.cosine(q))
        wedge = 4.0 * math.pi**2
        assert out.coef(LatticeVector(1, 1), COS) == pytest.approx(wedge / 2)
        assert out.coef(LatticeVector(1, -1), COS) == pytest.approx(-wedge / 2)
        assert len(out) == 2

    def test_sin_sin_product_to_sum(self):
        p, q = LatticeVector(2, 1), LatticeVector(1, -1)
        out = poisson_bracket(TrigField.sine(p), TrigField.sine(q))
        wedge = p.wedge(q)
        assert out.coef(p + q, COS) == pytest.approx(-wedge / 2)
        assert out.coef(p - q, COS) == pytest.approx(-wedge / 2)

    def test_single_modes_supported_on_sum_and_difference(self):
        def canon_dir(r):
            return -r if (r.jx < 0 or (r.jx == 0 and r.ky < 0)) else r

        p, q = LatticeVector(3, 1), LatticeVector(-1, 2)
        out = poisson_bracket(TrigField.cosine(p), TrigField.sine(q))
        support = {lv for lv, _, _ in out.terms()}
        assert support <= {canon_dir(p + q), canon_dir(p - q)}


class TestBracketGridOracle:
    def test_fft_oracle_two_modes(self):
        p, q = LatticeVector(1, 0), LatticeVector(0, 1)
        f, g = TrigField.cosine(p), TrigField.cosine(q)
        ours = poisson_bracket(f, g).sample(64)
        oracle = fft_bracket_samples(f, g, 64)
        assert np.max(np.abs(ours - oracle)) < 1e-10 * max(
            1.0, np.max(np.abs(oracle))
        )

    def test_fft_oracle_dense_fields(self):
        f = TrigField(
            [(1, 2, COS, 0.3), (2, -1, SIN, -1.1), (0, 1, COS, 0.9)]
        )
        g = TrigField(
            [(3, 0, SIN, 0.5), (1, 1, COS, -0.4), (2, 2, SIN, 0.25)]
        )
        ours = poisson_bracket(f, g).sample(64)
        oracle = fft_bracket_samples(f, g, 64)
        assert np.max(np.abs(ours - oracle)) < 1e-9

    def test_centered_difference_converges_to_mode_result(self):
        # second-order FD evaluation of the defining expression approaches
        # the mode expansion under grid refinement at order ~2
        f = TrigField([(1, 1, COS, 1.0), (2, 0, SIN, 0.6)])
        g = TrigField([(0, 2, SIN, -0.8), (1, -1, COS, 0.4)])
        exact = poisson_bracket(f, g)

        def fd_error(n):
            h = 1.0 / n
            fs, gs = f.sample(n), g.sample(n)

            def dx(a):
                return (np.roll(a, -1, axis=1) - np.roll(a, 1, axis=1)) / (2 * h)

            def dy(a):
                return (np.roll(a, -1, axis=0) - np.roll(a, 1, axis=0)) / (2 * h)

            fd = -dx(fs) * dy(gs) + dy(fs) * dx(gs)
            return np.max(np.abs(fd - exact.sample(n)))

        e64, e128 = fd_error(64), fd_error(128)
        order = math.log2(e64 / e128)
        assert order > 1.9, f"FD convergence order {order:.3f} too low"


class TestBracketProperties:
    @given(f=field_st, g=field_st)
    @settings(max_examples=60, deadline=None, derandomize=True)
    def test_antisymmetry(self, f, g):
        residual = poisson_bracket(f, g) + poisson_bracket(g, f)
        assert residual.max_abs_coef() <= 1e-10

    @given(f=field_st, g=field_st, h=field_st, a=coef_st, b=coef_st)
    @settings(max_examples=60, deadline=None, derandomize=True)
    def test_bilinearity(self, f, g, h, a, b):
        lhs = poisson_bracket(a * f + b * g, h)
        rhs = a * poisson_bracket(f, h) + b * poisson_bracket(g, h)
        scale = max(1.0, lhs.max_abs_coef(), rhs.max_abs_coef())
        assert (lhs - rhs).max_abs_coef() <= 1e-12 * scale

    @given(f=field_st, g=field_st, h=field_st)
    @settings(max_examples=60, deadline=None, derandomize=True)
    def test_jacobi_identity(self, f, g, h):
        t1 = poisson_bracket(f, poisson_bracket(g, h))
        t2 = poisson_bracket(g, poisson_bracket(h, f))
        t3 = poisson_bracket(h, poisson_bracket(f, g))
        residual = t1 + t2 + t3
        scale = max(
            1.0, t1.max_abs_coef(), t2.max_abs_coef(), t3.max_abs_coef()
        )
        assert residual.max_abs_coef() <= 1e-12 * scale


class TestInnerProduct:
    def test_single_mode_norm_sqrt_laplacian(self):
        # <<cos(2pi x), cos(2pi x)>> = F(p)/2 = 2pi/2 = pi
        f = TrigField.cosine(LatticeVector(1, 0))
        assert inner_product(f, f, SQRT_LAPLACIAN) == pytest.approx(
            math.pi, rel=1e-15
        )

    def test_distinct_modes_orthogonal(self):
        f = TrigField.cosine(LatticeVector(1, 0))
        g = TrigField.cosine(LatticeVector(0, 1))
        assert inner_product(f, g, SQRT_LAPLACIAN) == 0.0

    def test_flat_symbol_halves(self):
        f = TrigField.cosine(LatticeVector(1, 0))
        assert inner_product(f, f, FLAT) == pytest.approx(0.5, rel=1e-15)

    def test_constants_excluded(self):
        f = TrigField.constant(3.0) + TrigField.cosine(LatticeVector(1, 2), 2.0)
        g = TrigField.constant(-5.0) + TrigField.cosine(LatticeVector(1, 2))
        expected = 0.5 * SQRT_LAPLACIAN(LatticeVector(1, 2)) * 2.0
        assert inner_product(f, g, SQRT_LAPLACIAN) == pytest.approx(expected)

    def test_sobolev_family_recovers_sqrt_laplacian(self):
        f = TrigField.cosine(LatticeVector(2, 1), 0.7)
        g = TrigField.sine(LatticeVector(2, 1), -0.4)
        fam = sobolev_symbol(-0.5)
        for a, b in [(f, f), (f, g), (g, g)]:
            assert inner_product(a, b, fam) == pytest.approx(
                inner_product(a, b, SQRT_LAPLACIAN), rel=1e-14
            )

    @given(f=field_st, g=field_st)
    @settings(max_examples=40, deadline=None, derandomize=True)
    def test_symmetry_and_positivity(self, f, g):
        assert inner_product(f, g, SQRT_LAPLACIAN) == pytest.approx(
            inner_product(g, f, SQRT_LAPLACIAN), abs=1e-12
        )
        fz = mean_zero(f)
        if not fz.is_zero():
            assert inner_product(fz, fz, SQRT_LAPLACIAN) > 0.0


class TestAdAndAdStar:
    def test_ad_self_vanishes(self):
        psi = TrigField.cosine(LatticeVector(2, -1), 1.3)
        assert ad(psi, psi).is_zero()

    @given(f=field_st, g=field_st)
    @settings(max_examples=40, deadline=None, derandomize=True)
    def test_ad_antisymmetric_in_arguments(self, f, g):
        residual = ad(f, g) + ad(g, f)
        assert residual.max_abs_coef() <= 1e-10

    def test_ad_star_constant_stream_vanishes(self):
        phi = TrigField.cosine(LatticeVector(1, 1), 0.5)
        out = ad_star(TrigField.constant(2.0), phi, SQRT_LAPLACIAN)
        assert out.is_zero()

    def test_ad_star_single_mode_steady(self):
        psi = TrigField.cosine(LatticeVector(3, 2))
        assert ad_star(psi, psi, SQRT_LAPLACIAN).is_zero()

    def test_ad_star_requires_mean_zero(self):
        psi = TrigField.cosine(LatticeVector(1, 0))
        phi = TrigField.constant(1.0) + TrigField.cosine(LatticeVector(0, 1))
        with pytest.raises(ValueError):
            ad_star(psi, phi, SQRT_LAPLACIAN)

    @pytest.mark.parametrize("symbol", [SQRT_LAPLACIAN, sobolev_symbol(1.0)])
    def test_adjoint_relation_dense_fields(self, symbol):
        rng = np.random.default_rng(7)
        dirs = [(1, 0), (0, 1), (1, 1), (2, -1), (3, 2), (1, -3), (4, 0)]
        for _ in range(6):
            psi = TrigField(
                (jx, ky, par, rng.uniform(-1, 1))
                for jx, ky in rng.permutation(dirs)[:3]
                for par in (COS, SIN)
            )
            phi = TrigField(
                (jx, ky, par, rng.uniform(-1, 1))
                for jx, ky in rng.permutation(dirs)[:3]
                for par in (COS, SIN)
            )
            lhs_field = ad_star(psi, phi, symbol)
            for jx in range(-4, 5):
                for ky in range(-4, 5):
                    if (jx, ky) == (0, 0):
                        continue
                    for par in (COS, SIN):
                        nu = TrigField([(jx, ky, par, 1.0)])
                        lhs = inner_product(lhs_field, nu, symbol)
                        rhs = inner_product(phi, ad(psi, nu), symbol)
                        assert abs(lhs - rhs) <= 1e-12 * max(
                            1.0, abs(lhs), abs(rhs)
                        )


def complex_modes(field: TrigField) -> dict:
    """Real parity storage -> complex exponential amplitudes (independent
    representation used by the advection oracle)."""
    amps: dict[tuple[int, int], complex] = {}

    def add(key, val):
        amps[key] = amps.get(key, 0.0) + val

    for p, parity, c in field.terms():
        k = (p.jx, p.ky)
        mk = (-p.jx, -p.ky)
        if parity == COS:
            add(k, 0.5 * c)
            add(mk, 0.5 * c)
        else:
            add(k, -0.5j * c)
            add(mk, 0.5j * c)
    return amps


def advection_oracle_rhs(psi: TrigField, F: MetricSymbol) -> TrigField:
    """Independent geodesic right side via complex-exponential advection.

    theta = Lambda psi is transported with velocity -perp(grad psi) under
    the fixed perp/bracket conventions: theta_t = +{theta, psi} =
    sum over mode pairs of (p^q) amp_theta(p) amp_psi(q) e^{i(p+q).x};
    mapping back through Lambda^{-1} gives psi_t.
    """
    psi_c = complex_modes(psi)
    theta_c = {
        k: a * F(LatticeVector(*k)) for k, a in psi_c.items() if k != (0, 0)
    }
    rhs_c: dict[tuple[int, int], complex] = {}
    for (pj, pk), a_t in theta_c.items():
        for (qj, qk), a_p in psi_c.items():
            wedge = TWO_PI * TWO_PI * (pj * qk - pk * qj)
            if wedge == 0.0:
                continue
            key = (pj + qj, pk + qk)
            rhs_c[key] = rhs_c.get(key, 0.0) + wedge * a_t * a_p
    terms = []
    for (jx, ky), amp in rhs_c.items():
        if (jx, ky) == (0, 0):
            continue
        lam = F(LatticeVector(jx, ky))
        terms.append((jx, ky, COS, amp.real / lam))
        terms.append((jx, ky, SIN, -amp.imag / lam))
    return TrigField(terms)


class TestEulerArnoldRhs:
    def test_single_mode_steady(self):
        psi = TrigField.cosine(LatticeVector(2, 1), 0.8)
        assert euler_arnold_rhs(psi, SQRT_LAPLACIAN).is_zero()

    def test_matches_independent_advection(self):
        psi = TrigField.cosine(LatticeVector(1, 0)) + TrigField.cosine(
            LatticeVector(0, 1), 0.6
        )
        ours = euler_arnold_rhs(psi, SQRT_LAPLACIAN)
        oracle = advection_oracle_rhs(psi, SQRT_LAPLACIAN)
        diff = (ours - oracle).max_abs_coef()
        assert diff <= 1e-12 * max(1.0, ours.max_abs_coef())

    def test_matches_advection_dense_field(self):
        psi = TrigField(
            [
                (1, 0, COS, 0.9),
                (0, 1, SIN, -0.5),
                (1, 1, COS, 0.3),
                (2, -1, SIN, 0.7),
            ]
        )
        for symbol in (SQRT_LAPLACIAN, sobolev_symbol(0.5)):
            ours = euler_arnold_rhs(psi, symbol)
            oracle = advection_oracle_rhs(psi, symbol)
            diff = (ours - oracle).max_abs_coef()
            assert diff <= 1e-11 * max(1.0, ours.max_abs_coef())

    @given(f=field_st)
    @settings(max_examples=40, deadline=None, derandomize=True)
    def test_energy_conservation_pairing(self, f):
        psi = mean_zero(f)
        rhs = euler_arnold_rhs(psi, SQRT_LAPLACIAN)
        e = inner_product(rhs, psi, SQRT_LAPLACIAN)
        scale = max(1.0, inner_product(psi, psi, SQRT_LAPLACIAN))
        assert abs(e) <= 1e-10 * scale * max(1.0, psi.max_abs_coef()) ** 2


class TestSerialization:
    def test_json_round_trip(self):
        f = TrigField(
            [(1, -2, COS, 0.125), (0, 3, SIN, -2.5), (0, 0, COS, 1.0)]
        )
        assert TrigField.from_json(f.to_json()) == f

    def test_records_are_canonical(self):
        f = TrigField([(-1, 2, SIN, 0.5)])  # stored as (1,-2) with flip
        (rec,) = f.to_records()
        assert rec == {"jx": 1, "ky": -2, "parity": SIN, "coef": -0.5}

    def test_zero_frequency_guard(self):
        with pytest.raises(MetricDegeneracyError):
            SQRT_LAPLACIAN(LatticeVector(0, 0))
