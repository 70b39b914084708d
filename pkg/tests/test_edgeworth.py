"""Expansion machinery against brute-force enumeration and quadrature oracles."""

import itertools
import math

import numpy as np
import pytest
from scipy.integrate import quad

from levyou import (
    CumulantTable,
    TestFunction,
    cdf,
    charfn_consistency,
    density,
    expansion_coefficients,
    expect,
    hermite,
    hermite_moment,
)
from levyou.edgeworth import negative_density_report


def gaussian_pdf(y, sigma):
    return math.exp(-0.5 * y * y / sigma) / math.sqrt(2.0 * math.pi * sigma)


def fd_stencil(r):
    """Central-difference weights for the r-th derivative, solved from the
    Taylor conditions sum_i w_i o_i^m = r! delta_{m,r} (order >= 4 accuracy)."""
    half = r // 2 + 2
    offsets = np.arange(-half, half + 1)
    rhs = np.zeros(offsets.size)
    rhs[r] = math.factorial(r)
    vandermonde = np.vstack([offsets ** m for m in range(offsets.size)])
    return offsets, np.linalg.solve(vandermonde, rhs)


def brute_force_terms(p, table):
    """Independent composition enumerator via itertools.product filtering."""
    by_degree = {}
    for k in range(1, p - 1):
        for l in range(1, k + 1):
            for comp in itertools.product(range(1, k + 1), repeat=l):
                if sum(comp) != k:
                    continue
                coeff = 1.0 / math.factorial(l)
                for ki in comp:
                    coeff *= table.get(ki + 2) / math.factorial(ki + 2)
                deg = k + 2 * l
                by_degree[deg] = by_degree.get(deg, 0.0) + coeff
    return by_degree


class TestHermite:
    def test_order_zero_is_one(self):
        assert hermite(0, 3.7, 2.0) == 1.0
        assert hermite(0, -11.0, 0.3) == 1.0

    def test_first_order(self):
        assert hermite(1, 2.0, 4.0) == pytest.approx(0.5, abs=1e-15)

    def test_second_order_root(self):
        assert hermite(2, 1.0, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            hermite(2, 0.0, 0.0)
        with pytest.raises(ValueError):
            hermite(2, 0.0, -1.0)

    @pytest.mark.parametrize("sigma", [0.7, 1.0, 2.5])
    @pytest.mark.parametrize("r", [1, 2, 3, 4, 5])
    def test_matches_finite_difference_derivatives(self, r, sigma):
        # h_r = (-1)^r phi^{-1} d^r phi, checked against central differences;
        # evaluation points sit away from the polynomial roots so the
        # relative error stays well defined
        h = 1e-2 * math.sqrt(sigma)
        offsets, weights = fd_stencil(r)
        for x in (0.4, 2.6):
            y = x * math.sqrt(sigma)
            fd = sum(w * gaussian_pdf(y + o * h, sigma)
                     for o, w in zip(offsets, weights)) / h ** r
            oracle = (-1.0) ** r * fd / gaussian_pdf(y, sigma)
            got = hermite(r, y, sigma)
            assert abs(got - oracle) / abs(oracle) < 1e-4


class TestExpansionCoefficients:
    def test_p2_no_terms(self):
        table = CumulantTable(T=4.0, values=(1.3,))
        ec = expansion_coefficients(2, table)
        assert ec.terms == ()
        assert ec.sigma == 1.3

    def test_p3_single_term(self):
        table = CumulantTable(T=4.0, values=(1.3, 0.9))
        ec = expansion_coefficients(3, table)
        assert ec.terms == ((3, 0.9 / 6.0),)

    def test_p4_three_terms(self):
        chi3, chi4 = 0.9, 2.4
        table = CumulantTable(T=4.0, values=(1.3, chi3, chi4))
        ec = expansion_coefficients(4, table)
        terms = dict(ec.terms)
        assert set(terms) == {3, 4, 6}
        assert terms[3] == pytest.approx(chi3 / 6.0, rel=1e-15)
        assert terms[4] == pytest.approx(chi4 / 24.0, rel=1e-15)
        # composition (1,1): chi3^2 / (2! * 3! * 3!) = chi3^2 / 72
        assert terms[6] == pytest.approx(chi3 ** 2 / 72.0, rel=1e-15)

    def test_zero_higher_cumulants_give_plain_normal(self):
        table = CumulantTable(T=4.0, values=(2.0, 0.0, 0.0, 0.0))
        ec = expansion_coefficients(5, table)
        assert all(c == 0.0 for _, c in ec.terms)

    @pytest.mark.parametrize("p", [3, 4, 5, 6, 7, 8])
    def test_matches_brute_force_enumerator(self, p, rng):
        values = tuple(rng.uniform(-2.0, 2.0) for _ in range(p - 1))
        values = (abs(values[0]) + 0.5,) + values[1:]
        table = CumulantTable(T=9.0, values=values)
        got = dict(expansion_coefficients(p, table).terms)
        want = brute_force_terms(p, table)
        assert set(got) == set(want)
        for deg in want:
            assert got[deg] == pytest.approx(want[deg], rel=1e-13, abs=1e-15)

    def test_table_too_short(self):
        table = CumulantTable(T=4.0, values=(1.0, 0.5))
        with pytest.raises(ValueError):
            expansion_coefficients(4, table)


@pytest.fixture()
def skewed_ec():
    table = CumulantTable(T=10.0, values=(1.8, 1.1, 0.7))
    return expansion_coefficients(4, table)


class TestDensity:
    def test_standard_normal_at_origin(self):
        table = CumulantTable(T=1.0, values=(1.0,))
        ec = expansion_coefficients(2, table)
        assert density(0.0, ec) == pytest.approx(0.3989422804014327, abs=1e-15)

    def test_total_mass_one(self, skewed_ec):
        half = 40.0 * math.sqrt(skewed_ec.sigma)
        mass, _ = quad(lambda y: density(y, skewed_ec), -half, half,
                       epsabs=1e-12, epsrel=1e-12, limit=400)
        assert abs(mass - 1.0) < 1e-8

    def test_first_moment_zero_order3(self):
        table = CumulantTable(T=10.0, values=(1.8, 1.1))
        ec = expansion_coefficients(3, table)
        half = 40.0 * math.sqrt(ec.sigma)
        m1, _ = quad(lambda y: y * density(y, ec), -half, half,
                     epsabs=1e-12, epsrel=1e-12, limit=400)
        assert abs(m1) < 1e-8

    def test_negative_region_reported(self):
        table = CumulantTable(T=2.0, values=(1.0, 2.5))
        ec = expansion_coefficients(3, table)
        mn, at = negative_density_report(ec)
        assert mn < 0.0
        assert math.isfinite(at)


class TestCdf:
    def test_symmetric_half_mass(self):
        table = CumulantTable(T=1.0, values=(2.3,))
        ec = expansion_coefficients(2, table)
        assert cdf(0.0, ec) == pytest.approx(0.5, abs=1e-15)

    def test_total_mass_far_right(self, skewed_ec):
        a = 40.0 * math.sqrt(skewed_ec.sigma)
        assert abs(cdf(a, skewed_ec) - 1.0) < 1e-12
        assert cdf(math.inf, skewed_ec) == 1.0
        assert cdf(-math.inf, skewed_ec) == 0.0

    def test_quadrature_oracle(self, rng):
        for _ in range(5):
            sigma = rng.uniform(0.5, 3.0)
            table = CumulantTable(T=8.0, values=(sigma,
                                                 rng.uniform(-1.0, 1.0),
                                                 rng.uniform(-1.0, 1.0)))
            ec = expansion_coefficients(4, table)
            a = rng.uniform(-2.0, 2.0) * math.sqrt(sigma)
            lo = -40.0 * math.sqrt(sigma)
            oracle, _ = quad(lambda y: density(y, ec), lo, a,
                             epsabs=1e-12, epsrel=1e-12, limit=400)
            assert abs(cdf(a, ec) - oracle) < 1e-9


class TestExpect:
    def test_normalization(self, skewed_ec):
        assert expect(TestFunction.polynomial([1.0]), skewed_ec) == pytest.approx(
            1.0, abs=1e-12)

    def test_plain_normal_second_moment(self):
        table = CumulantTable(T=1.0, values=(1.7,))
        ec = expansion_coefficients(2, table)
        f = TestFunction.polynomial([0.0, 0.0, 1.0])
        assert expect(f, ec) == pytest.approx(1.7, rel=1e-14)

    def test_third_moment_equals_third_cumulant(self):
        # the degree-3 coefficient times int y^3 h_3 phi = 3! * chi3/6 = chi3;
        # evaluated at p = 4 where degree 3 respects the growth bound (the
        # chi4 and chi3^2 terms pair with h_4 and h_6, orthogonal to y^3)
        chi3 = 1.1
        table = CumulantTable(T=10.0, values=(1.8, chi3, 0.9))
        ec = expansion_coefficients(4, table)
        f = TestFunction.polynomial([0.0, 0.0, 0.0, 1.0])
        assert expect(f, ec) == pytest.approx(chi3, rel=1e-13)

    def test_growth_bound_enforced(self, skewed_ec):
        # p = 4 allows polynomial degree <= 4
        f = TestFunction.polynomial([0.0] * 5 + [1.0])
        with pytest.raises(ValueError):
            expect(f, skewed_ec)

    def test_indicator_complement_exact(self, skewed_ec):
        for a in (-1.3, 0.0, 2.2):
            below = cdf(a, skewed_ec)
            above = expect(TestFunction.indicator_interval(a, math.inf), skewed_ec)
            assert abs(below + above - 1.0) < 1e-12

    def test_indicator_interval(self, skewed_ec):
        val = expect(TestFunction.indicator_interval(-1.0, 1.0), skewed_ec)
        assert val == pytest.approx(cdf(1.0, skewed_ec) - cdf(-1.0, skewed_ec), abs=1e-15)

    def test_tabulated_triangle_bump(self, skewed_ec):
        # piecewise-linear bump: the interpolant is exact, so independent
        # quadrature of the analytic bump is a true oracle
        ys = [-1.0, 0.0, 1.0]
        vals = [0.0, 1.0, 0.0]
        f = TestFunction.tabulated(ys, vals)
        got = expect(f, skewed_ec)
        oracle = sum(quad(lambda y: (1.0 - abs(y)) * density(y, skewed_ec),
                          a, b, epsabs=1e-12, limit=200)[0]
                     for a, b in ((-1.0, 0.0), (0.0, 1.0)))
        assert got == pytest.approx(oracle, abs=1e-9)

    def test_hermite_moment_values(self):
        assert hermite_moment(2, 0, 1.7) == pytest.approx(1.7, rel=1e-15)
        assert hermite_moment(3, 3, 2.0) == 6.0
        assert hermite_moment(2, 3, 1.0) == 0.0
        assert hermite_moment(5, 2, 1.0) == 0.0  # parity mismatch


class TestCharfnConsistency:
    def test_at_origin(self, skewed_ec):
        table = CumulantTable(T=10.0, values=(1.8, 1.1, 0.7))
        value, residual = charfn_consistency(4, table, 0.0)
        assert value == 1.0 + 0.0j
        assert residual == 0.0

    @pytest.mark.parametrize("p", [3, 4])
    def test_residual_tiny_on_grid(self, p):
        table = CumulantTable(T=12.0, values=(1.4, -0.8, 1.9, -0.5))
        for u in np.linspace(-10.0, 10.0, 101):
            _, residual = charfn_consistency(p, table, float(u))
            assert residual < 1e-12

    def test_window_enforced(self):
        table = CumulantTable(T=12.0, values=(1.4,))
        with pytest.raises(ValueError):
            charfn_consistency(2, table, 100.0)


def test_fourier_identity_of_hermite_terms(rng):
    # int h_k(y; sigma) phi(y; sigma) exp(iuy) dy = (iu)^k exp(-sigma u^2 / 2)
    for _ in range(20):
        k = int(rng.integers(1, 7))
        u = float(rng.uniform(-3.0, 3.0))
        sigma = float(rng.uniform(0.5, 3.0))
        half = 40.0 * math.sqrt(sigma)

        def integrand_re(y):
            return hermite(k, y, sigma) * gaussian_pdf(y, sigma) * math.cos(u * y)

        def integrand_im(y):
            return hermite(k, y, sigma) * gaussian_pdf(y, sigma) * math.sin(u * y)

        re, _ = quad(integrand_re, -half, half, epsabs=1e-11, limit=400)
        im, _ = quad(integrand_im, -half, half, epsabs=1e-11, limit=400)
        want = (1j * u) ** k * math.exp(-0.5 * sigma * u * u)
        assert abs(complex(re, im) - want) < 1e-7
