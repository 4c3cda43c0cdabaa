"""Worked-example models against closed-form oracles."""

import math

import numpy as np
import pytest
from numpy.polynomial import hermite as np_hermite

from susyq.expr import evaluate, parse
from susyq.models import (
    ModelError,
    bs_classification,
    bs_numeric_flags,
    get_model,
    hermite,
    hermite_function,
    models_list,
    pb_identities,
    pb_polynomials,
)
from susyq.numerics import Grid, GridFunction, inner, norm, relative_residual, sample
from susyq.susy import (
    apply_A,
    apply_B,
    build_pair,
    factorization_residual,
    potential_identity_residual,
    probe_function,
)


@pytest.fixture(scope="module")
def grid():
    return Grid()


# ---------------------------------------------------------------------------
# hermite oracle

def test_hermite_matches_numpy_hermval():
    xs = np.linspace(-3, 3, 11)
    for n in range(9):
        coeffs = [0.0] * n + [1.0]
        np.testing.assert_allclose(hermite(n, xs), np_hermite.hermval(xs, coeffs), rtol=1e-12)


def test_hermite_known_value_and_scalar_type():
    # H_2(x) = 4x^2 - 2, so H_2(1.5) = 7
    v = hermite(2, 1.5)
    assert isinstance(v, float)
    assert v == pytest.approx(7.0, abs=1e-14)


def test_hermite_complex_argument():
    z = 0.3 + 0.4j
    assert hermite(3, z) == pytest.approx(8 * z**3 - 12 * z, rel=1e-14)


def test_hermite_function_orthonormal(grid):
    f2 = hermite_function(2, grid.x)
    f3 = hermite_function(3, grid.x)
    w = grid.simpson_weights
    assert np.sum(w * f2 * f2) == pytest.approx(1.0, abs=1e-12)
    assert abs(np.sum(w * f2 * f3)) < 1e-12


# ---------------------------------------------------------------------------
# registry

def test_registry_lists_all_builtin_models():
    names = {m["name"] for m in models_list()}
    assert {"harmonic", "swanson", "black-scholes", "pseudo-bosonic"} <= names


def test_registry_rejects_unknown_names_and_params():
    with pytest.raises(ModelError):
        get_model("no-such-model")
    with pytest.raises(ModelError):
        get_model("harmonic", tilt=2.0)


def test_registry_applies_defaults():
    m = get_model("black-scholes")
    assert m.params == {"r": 1.0, "v0": 1.0}


# ---------------------------------------------------------------------------
# harmonic

def test_harmonic_eigen_residuals(grid):
    m = get_model("harmonic")
    for n in range(5):
        f = m.phi1(n, grid)
        h1f = apply_B(m.pair, apply_A(m.pair, f))
        diff = GridFunction(grid, h1f.values - m.energy(n) * f.values)
        assert relative_residual(diff, f) < 1e-6, n


def test_harmonic_partner_alignment(grid):
    m = get_model("harmonic")
    assert m.phi2(0, grid) is None
    # H2 acting on the partner of level 3 must return the sector-1 eigenvalue 6
    f = m.phi2(3, grid)
    h2f = apply_A(m.pair, apply_B(m.pair, f))
    diff = GridFunction(grid, h2f.values - m.energy(3) * f.values)
    assert relative_residual(diff, f) < 1e-6


# ---------------------------------------------------------------------------
# swanson

def test_swanson_rejects_bad_theta():
    for theta in (0.0, math.pi / 4, -math.pi / 4, 1.0):
        with pytest.raises(ModelError):
            get_model("swanson", theta=theta)


def test_swanson_biorthogonal(grid):
    m = get_model("swanson", theta=math.pi / 8)
    phis = [m.phi1(n, grid) for n in range(7)]
    psis = [m.psi1(n, grid) for n in range(7)]
    worst = 0.0
    for a in range(7):
        for b in range(7):
            got = inner(psis[a], phis[b])
            worst = max(worst, abs(got - (1.0 if a == b else 0.0)))
    assert worst < 1e-6


def test_swanson_normalization_constraint():
    theta = math.pi / 8
    m = get_model("swanson", theta=theta)
    want = np.exp(-1j * theta) / math.sqrt(math.pi)
    assert m.constants["n1_bar_times_n2"] == pytest.approx(want, abs=1e-15)
    assert m.constants["pairing_target"] == pytest.approx(want, abs=1e-15)


def test_swanson_hamiltonian_residuals(grid):
    m = get_model("swanson", theta=math.pi / 8)
    apply_h = m.extras["apply_h"]
    for n in range(5):
        f = m.phi1(n, grid)
        hf = apply_h(f)
        diff = GridFunction(grid, hf.values - m.energy(n) * f.values)
        assert relative_residual(diff, f) < 1e-5, n


def test_swanson_dual_hamiltonian_on_dual_family(grid):
    m = get_model("swanson", theta=math.pi / 8)
    f = m.psi1(2, grid)
    hf = m.extras["apply_h_dual"](f)
    diff = GridFunction(grid, hf.values - m.energy(2) * f.values)
    assert relative_residual(diff, f) < 1e-5


def test_swanson_energies_are_real_and_stretched():
    m = get_model("swanson", theta=math.pi / 8)
    assert m.energy(3) == pytest.approx(3.5 / math.cos(math.pi / 4))


# ---------------------------------------------------------------------------
# black-scholes

def _bs_raw_points(m, n_pts=200):
    """Evaluation points covering [-8, 8] that skip the potential pole."""
    x0 = m.extras["x0"]
    pts = np.linspace(-8.0, 8.0, n_pts)
    if x0 is not None:
        pts = pts[np.abs(pts - x0) > 0.1]
    return pts


def test_bs_drift_is_exactly_constant():
    for r in (-3.0, -1.0, -0.5, 0.0, 1.0, 2.0):
        m = get_model("black-scholes", r=r)
        for x in _bs_raw_points(m, 40):
            assert evaluate(m.pair.q1, float(x)) == 1.0 - r


def test_bs_flat_potential_from_raw_superpotentials():
    # w_a * w_b - w_a' computed from the unreduced constituents
    for r in (-3.0, -1.0, -0.5, 0.0, 1.0, 2.0):
        m = get_model("black-scholes", r=r)
        p = m.pair
        for x in _bs_raw_points(m, 60):
            x = float(x)
            got = evaluate(p.w_a, x) * evaluate(p.w_b, x) - evaluate(p.dw_a, x)
            assert abs(got - r) < 1e-9, (r, x)


def test_bs_r_minus_one_partner_potential():
    m = get_model("black-scholes", r=-1.0, v0=1.0)
    p = m.pair
    for x in _bs_raw_points(m, 60):
        x = float(x)
        derived = evaluate(p.w_a, x) * evaluate(p.w_b, x) + evaluate(p.dw_b, x)
        closed = 2.0 / (x - 1.0) ** 2 - 1.0
        assert abs(derived - closed) < 1e-9 * max(1.0, abs(closed)), x


def test_bs_singular_point_location():
    m = get_model("black-scholes", r=1.0, v0=1.0)
    assert m.extras["x0"] == pytest.approx(math.log(2.0) / 2.0)
    assert m.pair.singular_points == (m.extras["x0"],)
    flat = get_model("black-scholes", r=-3.0)
    assert flat.extras["x0"] is None
    assert flat.pair.singular_points == ()


def test_bs_identity_and_composition(grid):
    m = get_model("black-scholes", r=2.0)
    assert potential_identity_residual(m.pair, grid) < 1e-5
    f = probe_function(grid, m.pair.singular_points)
    assert factorization_residual(m.pair, f) < 1e-5
    assert factorization_residual(m.pair, f, sector=2) < 1e-5


def test_bs_vacua_annihilation_is_near_exact(grid):
    m = get_model("black-scholes", r=1.0, v0=1.0)
    v = m.vacua(grid)
    for rec in (v.phi0_1, v.phi0_2, v.psi0_1, v.psi0_2):
        assert rec.annihilation_residual < 1e-10, rec.label


def test_bs_classification_table(grid):
    for r in (2.0, 1.0, 0.5, -0.5, -1.0, -2.0):
        analytic = bs_classification(r)
        numeric = bs_numeric_flags(get_model("black-scholes", r=r), grid)
        assert analytic.flags() == numeric.flags(), r
        assert analytic.flags() == (False, r > 0, False, r > 0)


def test_bs_rejects_nonpositive_v0():
    with pytest.raises(ModelError):
        get_model("black-scholes", v0=0.0)


# ---------------------------------------------------------------------------
# pseudo-bosonic

def test_pb_polynomials_first_levels():
    k = -1.0
    p = pb_polynomials(k, 3)
    xs = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(p[0](xs), np.ones_like(xs))
    np.testing.assert_allclose(p[1](xs), xs + k, rtol=0, atol=1e-14)
    want2 = ((xs + k) ** 2 - 1) / math.sqrt(2.0)
    np.testing.assert_allclose(p[2](xs), want2, rtol=0, atol=1e-13)


def test_pb_polynomial_derivative_is_shift():
    # p_n' = sqrt(n) p_{n-1}
    p = pb_polynomials(0.7, 8)
    xs = np.linspace(-2, 2, 9)
    for n in range(1, 9):
        np.testing.assert_allclose(
            p[n].deriv()(xs), math.sqrt(n) * p[n - 1](xs), rtol=1e-11, atol=1e-11
        )


def test_pb_ladder_action(grid):
    # A phi_n = sqrt(n) phi_{n-1}
    m = get_model("pseudo-bosonic", k=-1.0)
    for n in (1, 3, 6):
        f = m.phi1(n, grid)
        lowered = apply_A(m.pair, f)
        want = m.phi1(n - 1, grid)
        diff = lowered.with_values(lowered.values - math.sqrt(n) * want.values)
        assert relative_residual(diff, want) < 1e-6, n


def test_pb_biorthogonality(grid):
    m = get_model("pseudo-bosonic", k=-1.0)
    worst = 0.0
    for n in range(11):
        for mm in range(11):
            got = inner(m.phi1(n, grid), m.psi1(mm, grid))
            worst = max(worst, abs(got - (1.0 if n == mm else 0.0)))
    assert worst < 1e-7


def test_pb_norms_stay_in_range(grid):
    m = get_model("pseudo-bosonic", k=-1.0)
    for n in (0, 4, 10):
        v = norm(m.phi1(n, grid))
        assert 1e-3 < v < 1e6, (n, v)


def test_pb_partner_shift(grid):
    m = get_model("pseudo-bosonic", k=-1.0)
    assert m.phi2(0, grid) is None
    f = m.phi2(4, grid)
    want = m.phi1(3, grid)
    assert np.max(np.abs(f.values - want.values)) == 0.0


def test_pb_ladder_independent_of_split():
    # raising depends on the superpotentials only through their sum:
    # wA = k + s(x), wB = x - s(x) builds the same polynomial ladder for any s
    k = -1.0
    g = Grid(half_width=6.0, n_points=1025)
    pair_sin = build_pair(parse("k + sin(x)", {"k": k}), parse("x - sin(x)"))
    p = pb_polynomials(k, 3)
    weight = np.exp(-k * g.x + np.cos(g.x))  # e^{-int wA} for the sin split
    phi2 = GridFunction(g, p[2](g.x) * weight)
    phi3 = GridFunction(g, p[3](g.x) * weight)
    raised = apply_B(pair_sin, phi2)
    diff = GridFunction(g, raised.values - math.sqrt(3) * phi3.values)
    assert relative_residual(diff, phi3) < 1e-6


def test_pb_identities_all_pass():
    report = pb_identities(k=-1.0, n_max=12)
    for c in report.checks:
        assert c.passed, c.check
    assert any("2^(-n/2)" in note for note in report.notes)


def test_pb_identities_rejects_overflowing_n():
    with pytest.raises(ModelError):
        pb_identities(n_max=40)
