"""Grid, quadrature, derivative, and series checks against closed forms."""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from susyq.expr import parse
from susyq.numerics import (
    DecayFit,
    Grid,
    GridFunction,
    NonConvergenceError,
    PoleOnGridError,
    RepresentationError,
    ScaledGridFunction,
    cumulative_antiderivative,
    derivative,
    fitted_decay_exponents,
    gamma_average,
    gridfunction_from_csv,
    gridfunction_to_csv,
    inner,
    integrate_halfline,
    max_rel_difference,
    norm,
    relative_residual,
    sample,
    sum_series,
)


def test_grid_spacing_and_endpoints():
    g = Grid(12.0, 4097)
    assert g.x[0] == -12.0
    assert g.x[-1] == 12.0
    assert abs(g.spacing - 24.0 / 4096) < 1e-15
    assert np.allclose(np.diff(g.x), g.spacing)


def test_grid_rejects_bad_parameters():
    with pytest.raises(ValueError):
        Grid(0.0, 101)
    with pytest.raises(ValueError):
        Grid(-3.0, 101)
    with pytest.raises(ValueError):
        Grid(5.0, 15)


@pytest.mark.parametrize("n", [16, 17, 64, 4097])
def test_simpson_weights_integrate_cubics_exactly(n):
    g = Grid(1.0, n)
    w = g.simpson_weights
    assert abs(np.sum(w) - 2.0) < 1e-13
    assert abs(np.dot(w, g.x**2) - 2.0 / 3.0) < 1e-13
    assert abs(np.dot(w, g.x**3)) < 1e-13


def test_gaussian_norm_matches_pi_quarter():
    # ||exp(-x^2/2)||^2 = integral exp(-x^2) = sqrt(pi)
    g = Grid(12.0, 4097)
    f = sample(parse("exp(0 - x^2 / 2)"), g)
    assert abs(norm(f) - math.pi**0.25) < 1e-12


def test_sample_reports_pole_location():
    g = Grid(1.0, 17)  # odd point count puts x = 0 on the grid
    with pytest.raises(PoleOnGridError) as err:
        sample(parse("1 / x"), g)
    assert err.value.x == 0.0
    assert err.value.count == 1
    # even point count straddles the pole and sampling succeeds
    sample(parse("1 / x"), Grid(1.0, 16))


@pytest.mark.parametrize("order,expected", [(1, "4 * x^3"), (2, "12 * x^2")])
def test_derivative_exact_on_quartic_including_edges(order, expected):
    g = Grid(2.0, 33)
    f = sample(parse("x^4"), g)
    want = sample(parse(expected), g)
    got = derivative(f, order)
    assert np.max(np.abs(got.values - want.values)) < 1e-10


def test_derivative_fourth_order_convergence():
    e = parse("sin(2 * x)")
    errs = []
    for n in (129, 257):
        g = Grid(3.0, n)
        d = derivative(sample(e, g), 1)
        want = 2 * np.cos(2 * g.x)
        errs.append(np.max(np.abs(d.values - want)))
    # halving h should shrink the error by about 2^4
    assert errs[1] < errs[0] / 12


def test_scaled_derivative_uses_exact_scale_derivatives():
    g = Grid(12.0, 513)
    ones = np.ones(g.n_points)
    f = ScaledGridFunction(g, ones, g.x**2, dlog=2 * g.x, d2log=2 * ones)
    d1 = derivative(f, 1)
    assert np.allclose(d1.values, 2 * g.x, rtol=1e-12, atol=1e-10)
    d2 = derivative(f, 2)
    assert np.allclose(d2.values, 2 + 4 * g.x**2, rtol=1e-12, atol=1e-9)


def test_inner_is_conjugate_linear_in_first_slot():
    g = Grid(6.0, 129)
    f = sample(parse("exp(0 - x^2) * (1 + 2i)"), g)
    h = sample(parse("exp(0 - x^2) * x"), g)
    assert abs(inner(1j * f, h) - (-1j) * inner(f, h)) < 1e-14
    assert abs(inner(f, 1j * h) - 1j * inner(f, h)) < 1e-14


def test_scaled_pairing_cancels_huge_exponents():
    # exp(+500) carrier against exp(-500) carrier: product is order one
    g = Grid(2.0, 65)
    up = ScaledGridFunction(g, np.ones(g.n_points), np.full(g.n_points, 500.0))
    down = ScaledGridFunction(g, np.ones(g.n_points), np.full(g.n_points, -500.0))
    assert abs(inner(up, down) - 4.0) < 1e-12
    with pytest.raises(RepresentationError):
        inner(up, up)  # combined exponent 1000 overflows even though each half fits
    assert up.representable()
    huge = ScaledGridFunction(g, np.ones(g.n_points), np.full(g.n_points, 800.0))
    assert not huge.representable()
    with pytest.raises(RepresentationError):
        huge.materialize()


def test_scaled_materialize_round_trip():
    g = Grid(3.0, 65)
    f = ScaledGridFunction(g, np.exp(1j * g.x), -0.5 * g.x**2)
    plain = f.materialize()
    assert np.allclose(plain.values, np.exp(1j * g.x - 0.5 * g.x**2), rtol=1e-14)


def test_relative_residual_invariant_under_scale_shift():
    g = Grid(5.0, 257)
    rng = np.random.default_rng(7)
    num_v = rng.normal(size=g.n_points) * 1e-9
    den_v = rng.normal(size=g.n_points) + 2.0
    sigma = -0.3 * g.x**2
    r0 = relative_residual(
        ScaledGridFunction(g, num_v, sigma), ScaledGridFunction(g, den_v, sigma)
    )
    r1 = relative_residual(
        ScaledGridFunction(g, num_v, sigma + 1000.0),
        ScaledGridFunction(g, den_v, sigma + 1000.0),
    )
    assert abs(r0 - r1) < 1e-15 * max(r0, 1.0)
    assert r0 < 1e-8


def test_relative_residual_excludes_marked_singularities():
    g = Grid(5.0, 257)
    num = np.zeros(g.n_points)
    j = np.argmin(np.abs(g.x - 1.0))
    num[j] = 1e6  # spike at the declared singular point
    r = relative_residual(
        GridFunction(g, num), GridFunction(g, np.ones(g.n_points)), exclude=[1.0]
    )
    assert r == 0.0


def test_cumulative_antiderivative_of_cosine():
    g = Grid(12.0, 4097)
    vals = np.cos(g.x)
    w = cumulative_antiderivative(vals, g, dvalues=-np.sin(g.x))
    assert np.max(np.abs(w - np.sin(g.x))) < 1e-10


def test_cumulative_antiderivative_vanishes_near_origin():
    g = Grid(12.0, 4096)  # even count: origin between points
    w = cumulative_antiderivative(np.exp(-g.x), g, dvalues=-np.exp(-g.x))
    j0 = np.argmin(np.abs(g.x))
    assert w[j0] == 0.0


@pytest.mark.parametrize("n", range(6))
def test_halfline_integral_reproduces_factorials(n):
    out = integrate_halfline(lambda t, n=n: t**n * np.exp(-t))
    assert abs(out.value - math.factorial(n)) < 1e-8 * math.factorial(n)
    assert out.panels >= 3


def test_halfline_integral_gaussian():
    out = integrate_halfline(lambda t: np.exp(-(t**2)))
    assert abs(out.value - math.sqrt(math.pi) / 2) < 1e-10


def test_halfline_integral_raises_without_decay():
    with pytest.raises(NonConvergenceError):
        integrate_halfline(lambda t: 1.0 / (1.0 + t), max_doublings=12)


def test_gamma_average_matches_sinc():
    big = 50.0
    for w in (1.0, 2.0, 5.5):
        got = gamma_average(lambda t, w=w: np.exp(1j * w * t), big)
        want = math.sin(w * big) / (w * big)
        assert abs(got - want) < 1e-10
        assert abs(got) <= 2.0 / (big * w)


def test_gamma_average_of_constant_is_constant():
    assert abs(gamma_average(lambda t: np.ones_like(t) * (3 - 4j), 7.0) - (3 - 4j)) < 1e-12


def test_series_sum_reaches_exponential():
    # sum 2^n / n! = e^2, tail after n bounded by next term times 2
    out = sum_series(
        lambda n: 2.0**n / math.factorial(n),
        lambda n: 2.0 * 2.0 ** (n + 1) / math.factorial(n + 1),
        tol=1e-13,
    )
    assert abs(out.value - math.e**2) < 1e-12
    assert out.tail_estimate < 1e-13


def test_series_raises_when_tail_bound_stalls():
    with pytest.raises(NonConvergenceError):
        sum_series(lambda n: 0.0, lambda n: 1.0, tol=1e-12, n_max=50)


def test_csv_round_trip_and_determinism(tmp_path):
    g = Grid(4.0, 33)
    f = sample(parse("exp(0 - x^2) * (1 + 1i * x)"), g)
    buf1, buf2 = io.StringIO(), io.StringIO()
    gridfunction_to_csv(f, buf1)
    gridfunction_to_csv(f, buf2)
    assert buf1.getvalue() == buf2.getvalue()

    p = tmp_path / "f.csv"
    gridfunction_to_csv(f, p)
    back = gridfunction_from_csv(p)
    assert back.grid == g
    assert np.array_equal(back.values, f.values)


def test_csv_keeps_scaled_functions_finite(tmp_path):
    g = Grid(2.0, 17)
    f = ScaledGridFunction(g, np.ones(g.n_points), 900.0 + g.x)
    p = tmp_path / "big.csv"
    gridfunction_to_csv(f, p)
    back = gridfunction_from_csv(p)
    assert isinstance(back, ScaledGridFunction)
    got = back.log_magnitude()
    want = f.log_magnitude()
    # constant offset representation loses the per-point split, not the product
    assert np.max(np.abs(got - want)) < 1e-9


def test_decay_fit_classifies_gaussian_and_growth():
    g = Grid(12.0, 1025)
    gauss = fitted_decay_exponents(sample(parse("exp(0 - x^2 / 2)"), g))
    assert gauss.square_integrable
    assert gauss.left_exponent < -1.0 and gauss.right_exponent < -1.0

    grow = fitted_decay_exponents(sample(parse("exp(x / 2)"), g))
    assert not grow.square_integrable
    assert grow.right_exponent > 0.4
    assert grow.left_exponent < -0.4  # decays toward -infinity


def test_decay_fit_flags_marginal_rates_as_not_decaying():
    # slower than the threshold rate on both sides: not square integrable
    g = Grid(12.0, 1025)
    f = GridFunction(g, np.exp(-0.01 * np.abs(g.x)))
    fit = fitted_decay_exponents(f)
    assert not fit.square_integrable
    assert DecayFit(-0.04, -3.0).square_integrable is False
    assert DecayFit(-0.06, -0.06).square_integrable is True


def test_max_rel_difference_uses_joint_scale():
    a = np.array([0.0, 10.0])
    b = np.array([1.0, 10.0])
    assert abs(max_rel_difference(a, b) - 0.1) < 1e-15
    assert max_rel_difference(a, a) == 0.0


coeffs = st.lists(
    st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False),
    min_size=1,
    max_size=4,
)


@settings(max_examples=40, deadline=None)
@given(coeffs, coeffs)
def test_cauchy_schwarz_for_polynomial_gaussians(cf, cg):
    g = Grid(6.0, 65)
    env = np.exp(-g.x**2)
    f = GridFunction(g, np.polyval(cf, g.x) * env)
    h = GridFunction(g, np.polyval(cg, g.x) * env)
    lhs = abs(inner(f, h))
    rhs = norm(f) * norm(h)
    assert lhs <= rhs * (1 + 1e-10) + 1e-12
