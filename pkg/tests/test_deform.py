"""Bounded-deformation structure against the oscillator base."""

import math

import numpy as np
import pytest

from susyq.deform import (
    DEFAULT_DEFORMATION_Q,
    DeformationError,
    build_deformation,
    deformed_basis,
    deformed_basis_report,
    deformed_eigencheck,
    deformed_pair,
    sandwich_residual,
)
from susyq.expr import evaluate, parse
from susyq.models import get_model, hermite_function
from susyq.numerics import Grid, GridFunction, inner, norm, relative_residual, sample
from susyq.susy import apply_H1, intertwine_check


@pytest.fixture(scope="module")
def grid():
    return Grid()


@pytest.fixture(scope="module")
def d(grid):
    return build_deformation(DEFAULT_DEFORMATION_Q, grid=grid)


@pytest.fixture(scope="module")
def base(grid):
    return [GridFunction(grid, hermite_function(n, grid.x)) for n in range(9)]


def test_bound_scan(d):
    assert d.m == pytest.approx(0.1, abs=1e-4)
    assert d.M == pytest.approx(1.1, abs=1e-4)
    assert len(d.notes) == 2  # both extrema sit at the window boundary


def test_interior_extrema_leave_no_notes(grid):
    dd = build_deformation("0.5*exp(-x^2) + 0.3", grid=grid)
    # max at x=0 (interior); min 0.3 approached at both edges
    assert dd.M == pytest.approx(0.8)
    assert all("upper" not in n for n in dd.notes)


def test_nonpositive_real_part_rejected(grid):
    with pytest.raises(DeformationError):
        build_deformation("tanh(x)", grid=grid)  # negative on the left half


def test_constant_deformation_recovers_base(grid):
    dd = build_deformation("0.7", grid=grid)
    p = deformed_pair(dd)
    s = p.samples(grid)
    assert np.max(np.abs(s["q1"])) == 0.0
    assert np.max(np.abs(s["w_a"] - grid.x)) == 0.0
    assert np.max(np.abs(s["w_b"] - grid.x)) == 0.0


def test_deformed_potential_closed_form(d, grid):
    # wA = x - q', wB = x + q': V1 = x^2 - 1 - (q')^2 + q''
    p = deformed_pair(d)
    s = p.samples(grid)
    q = parse(DEFAULT_DEFORMATION_Q)
    dq = sample(parse("0.5*(1 - tanh(x)^2) + 0.3i*cos(x)"), grid).values
    ddq = sample(parse("-tanh(x)*(1 - tanh(x)^2) - 0.3i*sin(x)"), grid).values
    want = grid.x**2 - 1.0 - dq**2 + ddq
    assert np.max(np.abs(s["v1"] - want)) < 1e-12
    assert np.max(np.abs(s["q1"] - 2.0 * dq)) < 1e-12


def test_dual_potential_flips_second_derivative_sign(d, grid):
    p = deformed_pair(d)
    s = p.samples(grid)
    dq = sample(parse("0.5*(1 - tanh(x)^2) + 0.3i*cos(x)"), grid).values
    ddq = sample(parse("-tanh(x)*(1 - tanh(x)^2) - 0.3i*sin(x)"), grid).values
    want = np.conjugate(grid.x**2 - 1.0 - dq**2 - ddq)
    assert np.max(np.abs(s["v1_dual"] - want)) < 1e-12


def test_basis_weight_cancels_exactly(d, base, grid):
    phis, psis = deformed_basis(d, base, grid)
    worst = 0.0
    for a in range(9):
        for b in range(9):
            got = inner(psis[a], phis[b])
            worst = max(worst, abs(got - (1.0 if a == b else 0.0)))
    assert worst < 1e-8


def test_basis_rejects_non_orthonormal_input(d, base, grid):
    bad = list(base)
    bad[1] = GridFunction(grid, 1.3 * base[1].values)
    with pytest.raises(DeformationError):
        deformed_basis(d, bad, grid)


def test_norm_bounds(d, base, grid):
    phis, psis = deformed_basis(d, base, grid)
    for phi in phis:
        assert norm(phi) <= math.exp(d.M) * (1 + 1e-12)
    for psi in psis:
        assert norm(psi) <= math.exp(-d.m) * (1 + 1e-12)
    checks = deformed_basis_report(d, phis, psis)
    assert all(c.passed for c in checks)


def test_eigencheck_harmonic_base(d, base):
    pairs = [(2.0 * n, base[n]) for n in range(9)]
    checks, records = deformed_eigencheck(d, pairs, tol=1e-5)
    assert all(c.passed for c in checks), [c.check for c in checks if not c.passed]
    assert len(records) == 9 + 9 + 8 + 8
    vacuum = [r for r in records if r.family == "h1 on phi1" and r.level == 0][0]
    assert vacuum.residual < 1e-6


def test_sandwich_identity(d, grid):
    f = GridFunction(grid, np.exp(-((grid.x - 0.7) ** 2) / 2.0) * (1.0 + 0.2 * grid.x))
    assert sandwich_residual(d, f, grid) < 1e-6


def test_intertwining_coefficients_sqrt_e(d, base, grid):
    phis, _ = deformed_basis(d, base, grid)
    pair = deformed_pair(d)
    eig1 = [(2.0 * n, phis[n]) for n in range(9)]
    eig2 = [None] + [(2.0 * n, phis[n - 1]) for n in range(1, 9)]
    report = intertwine_check(pair, eig1, eig2)
    for rec in report:
        if rec.n == 0:
            continue
        want = math.sqrt(2.0 * rec.n)
        assert rec.alpha == pytest.approx(want, rel=1e-5), rec.n
        assert rec.beta == pytest.approx(want, rel=1e-5), rec.n
        assert abs(rec.alpha * rec.beta - 2.0 * rec.n) < 1e-5


def test_registered_model(grid):
    m = get_model("deformed-harmonic")
    assert m.energy(4) == 8.0
    f = m.phi1(2, grid)
    hf = apply_H1(m.pair, f)
    res = relative_residual(GridFunction(grid, hf.values - 4.0 * f.values), f)
    assert res < 1e-5
    assert m.phi2(0, grid) is None
    assert m.constants["m"] == pytest.approx(0.1, abs=1e-4)
