"""Bicoherent state families labelled by an action value and an angle.

A discrete spectrum with products rho_n = E_1*...*E_n generates, over a
biorthogonal pair of eigenbases, a two-parameter family of states with
coefficients K(J) J^(n/2) exp(-i E_n gamma) / sqrt(rho_n).  This module
builds those states with certified truncation tails, computes the
normalization K(J) and the (J, gamma) region where the series converge,
solves the moment problem for recognized spectra, estimates how well the
family resolves the identity, evolves states in time, and realizes the
gamma-dependent lowering operators under which each state is an
eigenvector with eigenvalue sqrt(J).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    GridFunction,
    ScaledGridFunction,
    _panel_simpson,
    inner,
    integrate_halfline,
    norm,
    relative_residual,
)
from .reporting import CheckResult
from .susy import apply_A, apply_B

__all__ = [
    "GKError",
    "Spectrum",
    "build_spectrum",
    "spectrum_from_formula",
    "GKDomain",
    "gk_domain",
    "GKState",
    "normalization_K",
    "build_state",
    "pair_norm",
    "MomentDensity",
    "moment_density",
    "moment_residuals",
    "ResolutionPoint",
    "ResolutionReport",
    "resolution_estimate",
    "evolve",
    "action_identity",
    "lowering_action",
    "lowering_defect",
    "SpecialMapsReport",
    "pb_special_maps",
]


class GKError(ValueError):
    pass


# ---------------------------------------------------------------------------
# spectra and their product sequence

@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues with their running products and square roots.

    ``sqrt_rho`` uses the accumulated argument of the factors, so each step
    satisfies sqrt_rho[n] = sqrt_rho[n-1] * sqrt(E_n) with the principal
    square root, without branch jumps as the accumulated phase passes pi.
    ``radius`` is the estimated convergence radius of the K series: the
    modulus of the last eigenvalue, promoted to infinity when the tail
    moduli are still growing at full strength.
    """

    energies: np.ndarray
    rho: np.ndarray
    log_abs_rho: np.ndarray
    theta: np.ndarray
    sqrt_rho: np.ndarray
    radius_estimate: float
    radius: float
    radius_trend: str
    min_gap: float
    multiplicity_one: bool
    delta_e_tail: float
    notes: tuple

    def __len__(self) -> int:
        return len(self.energies)


def build_spectrum(energies) -> Spectrum:
    e = np.asarray(list(energies), dtype=np.complex128)
    if e.ndim != 1 or len(e) < 2:
        raise GKError("need at least two eigenvalues")
    if not np.isfinite(e).all():
        raise GKError("eigenvalues must be finite")
    if np.any(np.abs(e[1:]) == 0.0):
        raise GKError(
            "zero eigenvalue above the ground level: the products rho_n vanish "
            "and the coefficient denominators are undefined"
        )

    n = len(e)
    log_abs = np.zeros(n)
    theta = np.zeros(n)
    log_abs[1:] = np.cumsum(np.log(np.abs(e[1:])))
    theta[1:] = np.cumsum(np.angle(e[1:]))
    rho = np.ones(n, dtype=np.complex128)
    rho[1:] = np.cumprod(e[1:])
    sqrt_rho = np.exp(0.5 * log_abs + 0.5j * theta)

    notes = []
    moduli = np.abs(e)
    tail = moduli[-min(10, n):]
    scale = max(1.0, float(tail.max()))
    diffs = np.diff(tail)
    radius_estimate = float(moduli[-1])
    if len(diffs) and np.all(diffs > 1e-9 * scale):
        if diffs[-1] < 0.8 * diffs[0]:
            trend = "stabilizing"
            radius = radius_estimate
            notes.append(
                "radius estimated from a still-rising tail; certified J values "
                "stay conservative"
            )
        else:
            trend = "increasing"
            radius = math.inf
            notes.append(
                "tail moduli grow without stabilizing; treating the radius as "
                "unbounded"
            )
    elif len(diffs) == 0 or np.max(np.abs(diffs)) <= 1e-6 * scale:
        trend = "stable"
        radius = radius_estimate
    else:
        trend = "irregular"
        radius = radius_estimate
        notes.append("tail moduli are not monotone-stable; radius estimate is rough")

    gaps = np.abs(e[:, None] - e[None, :])
    np.fill_diagonal(gaps, np.inf)
    min_gap = float(gaps.min())
    multiplicity_one = min_gap > 1e-9 * scale

    imag_gaps = np.abs(np.diff(e.imag))
    delta_e_tail = float(imag_gaps[-min(5, len(imag_gaps)):].max()) if len(imag_gaps) else 0.0

    return Spectrum(
        energies=e,
        rho=rho,
        log_abs_rho=log_abs,
        theta=theta,
        sqrt_rho=sqrt_rho,
        radius_estimate=radius_estimate,
        radius=radius,
        radius_trend=trend,
        min_gap=min_gap,
        multiplicity_one=multiplicity_one,
        delta_e_tail=delta_e_tail,
        notes=tuple(notes),
    )


def spectrum_from_formula(energy, n_terms: int) -> Spectrum:
    """Spectrum from a level formula, e.g. a model's ``energy`` callable."""
    return build_spectrum([energy(k) for k in range(n_terms)])


# ---------------------------------------------------------------------------
# normalization

def normalization_K(s: Spectrum, j: float) -> float:
    """K(J) = (sum_n J^n / |rho_n|)^(-1/2), positive and decreasing in J."""
    j = float(j)
    if j < 0:
        raise GKError("the action label J must be nonnegative")
    if j == 0.0:
        return 1.0
    if j >= s.radius:
        raise GKError(f"J={j:g} is outside the convergence radius R={s.radius:g}")
    ns = np.arange(len(s))
    log_terms = ns * math.log(j) - s.log_abs_rho
    m = float(log_terms.max())
    parts = np.exp(log_terms - m)
    total = float(parts.sum())
    if parts[-1] / total > 1e-13:
        raise GKError(
            f"spectrum of length {len(s)} is too short for J={j:g}: the last "
            "series term is not negligible"
        )
    return math.exp(-0.5 * m) / math.sqrt(total)


# ---------------------------------------------------------------------------
# convergence domain from norm growth

def _fit_norm_bound(norms, label: str):
    """Dominating bound ||v_n|| <= a * r^n * m_n from measured norms.

    Least squares on the log norms fixes r; a is inflated until the pure
    geometric bound dominates every measured level (m_n identically one).
    Only when the fit misses by more than a decade in log spread does a
    level-dependent correction m_n <= 1 enter, with its tail ratio taken
    conservatively.
    """
    arr = np.asarray(norms, dtype=float)
    top = float(arr.max(initial=0.0))
    if top <= 0:
        raise GKError(f"all {label} norms vanish")
    # empty or numerically-annihilated slots would poison the log fit
    keep = arr > 1e-9 * top
    if keep.sum() < 3:
        raise GKError(f"need at least three positive norms to bound the {label} growth")
    ns = np.flatnonzero(keep).astype(float)
    logs = np.log(arr[keep])
    slope, intercept = np.polyfit(ns, logs, 1)
    r = math.exp(slope)
    resid = logs - (intercept + slope * ns)
    a = math.exp(intercept + resid.max())
    notes = []
    if resid.max() - resid.min() <= 1.0:
        m_seq = None
        m_limit = 1.0
    else:
        m_seq = np.exp(resid - resid.max())
        ratios = m_seq[:-1] / m_seq[1:]
        m_limit = float(ratios[-min(5, len(ratios)):].min())
        notes.append(
            f"{label} norms deviate from a pure geometric envelope; "
            "using a level-dependent correction"
        )
    return a, r, m_seq, m_limit, notes


@dataclass(eq=False)
class GKDomain:
    """Certified J range: J < j_min keeps both coefficient series summable."""

    a_phi: float
    r_phi: float
    m_phi: np.ndarray | None
    m_phi_limit: float
    j_phi: float
    a_psi: float
    r_psi: float
    m_psi: np.ndarray | None
    m_psi_limit: float
    j_psi: float
    radius: float
    j_min: float
    delta_e_value: float
    delta_e_ok: bool
    notes: tuple


def gk_domain(s: Spectrum, phi_norms, psi_norms, delta_e_tol: float = 1e-8) -> GKDomain:
    """Fit growth bounds for both families and intersect their J ranges.

    The imaginary parts of consecutive eigenvalues must settle (their gaps
    fall below ``delta_e_tol`` on the tail); otherwise the angle dependence
    of the series bound is uncontrolled and the whole domain collapses to
    J_min = 0.
    """
    a_phi, r_phi, m_phi, ml_phi, n1 = _fit_norm_bound(phi_norms, "phi")
    a_psi, r_psi, m_psi, ml_psi, n2 = _fit_norm_bound(psi_norms, "psi")

    def side_limit(m_limit, r):
        if math.isinf(s.radius):
            return math.inf
        return m_limit * m_limit * s.radius / r

    j_phi = side_limit(ml_phi, r_phi)
    j_psi = side_limit(ml_psi, r_psi)
    j_min = min(s.radius, j_phi, j_psi)
    notes = list(n1) + list(n2)
    delta_ok = s.delta_e_tail <= delta_e_tol
    if not delta_ok:
        j_min = 0.0
        notes.append(
            f"imaginary-part gaps do not settle (tail value {s.delta_e_tail:.3g} "
            f"> {delta_e_tol:g}); no positive J is certified"
        )
    return GKDomain(
        a_phi=a_phi,
        r_phi=r_phi,
        m_phi=m_phi,
        m_phi_limit=ml_phi,
        j_phi=j_phi,
        a_psi=a_psi,
        r_psi=r_psi,
        m_psi=m_psi,
        m_psi_limit=ml_psi,
        j_psi=j_psi,
        radius=s.radius,
        j_min=j_min,
        delta_e_value=s.delta_e_tail,
        delta_e_ok=delta_ok,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# state construction

@dataclass(eq=False)
class GKState:
    family: str
    sector: int
    j: float
    gamma: float
    n_terms: int
    k: float
    coefficients: np.ndarray
    tail: float
    function: GridFunction | ScaledGridFunction
    spectrum: Spectrum = field(repr=False)
    basis: tuple = field(repr=False)
    domain: GKDomain = field(repr=False)
    build_tol: float = field(repr=False)

    def payload(self) -> dict:
        """JSON-ready summary; the key set is the serialization contract."""
        return {
            "family": self.family,
            "sector": self.sector,
            "J": self.j,
            "gamma": self.gamma,
            "N": self.n_terms,
            "K": self.k,
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
            "tail": self.tail,
        }


def _coefficient_vector(s: Spectrum, family: str, j: float, gamma: float,
                        k: float, n: int) -> np.ndarray:
    """c_n = K J^(n/2) exp(-i E_n gamma) / sqrt(rho_n), phases conjugated
    for the psi family, computed through logs so huge rho_n cannot overflow."""
    e = s.energies[:n]
    sign = 1.0 if family == "phi" else -1.0
    phase = -e.real * gamma - 0.5 * s.theta[:n]
    if j == 0.0:
        out = np.zeros(n, dtype=np.complex128)
        out[0] = k * np.exp(sign * e[0].imag * gamma) * np.exp(1j * phase[0])
        return out
    ns = np.arange(n)
    log_mag = (
        math.log(k)
        + 0.5 * ns * math.log(j)
        - 0.5 * s.log_abs_rho[:n]
        + sign * e.imag * gamma
    )
    return np.exp(log_mag) * np.exp(1j * phase)


def _combine(basis, coefficients):
    """Sum c_n v_n; scaled carriers must share one log_scale array."""
    first = basis[0]
    if all(isinstance(b, GridFunction) for b in basis):
        acc = np.zeros(first.grid.n_points, dtype=np.complex128)
        for c, b in zip(coefficients, basis):
            acc += c * b.values
        return GridFunction(first.grid, acc)
    if not all(isinstance(b, ScaledGridFunction) for b in basis):
        raise GKError("basis mixes plain and scaled carriers; rescale to one form")
    for b in basis[1:]:
        if not np.array_equal(b.log_scale, first.log_scale):
            raise GKError("scaled basis functions must share their log_scale")
    acc = np.zeros(first.grid.n_points, dtype=np.complex128)
    for c, b in zip(coefficients, basis):
        acc += c * b.values
    return first.with_values(acc)


def _tail_bound(s: Spectrum, a: float, r: float, family: str,
                j: float, gamma: float, k: float, n_used: int) -> float:
    """Bound on sum_{n >= n_used} |c_n| ||v_n|| using the fitted envelope.

    Known eigenvalues cover part of the tail exactly; beyond the spectrum
    the term ratio is closed geometrically with the last modulus standing
    in for all later ones.
    """
    if j == 0.0:
        return 0.0
    e = s.energies
    sign = 1.0 if family == "phi" else -1.0
    total = 0.0
    ns = np.arange(n_used, len(s))
    log_t = (
        math.log(k)
        + math.log(a)
        + ns * math.log(r)
        + 0.5 * ns * math.log(j)
        - 0.5 * s.log_abs_rho[n_used:]
        + sign * e[n_used:].imag * gamma
    )
    if len(log_t):
        total += float(np.exp(log_t).sum())
    last = len(s) - 1
    log_last = (
        math.log(k)
        + math.log(a)
        + last * math.log(r)
        + 0.5 * last * math.log(j)
        - 0.5 * s.log_abs_rho[last]
        + sign * e[last].imag * gamma
    )
    q = r * math.sqrt(j / abs(e[last]))
    if q >= 0.99:
        raise GKError(
            f"series terms are still growing at the last available level "
            f"(ratio {q:.3g}); extend the spectrum or reduce J"
        )
    total += math.exp(log_last) * q / (1.0 - q)
    return total


def build_state(basis, s: Spectrum, family: str = "phi", j: float = 0.0,
                gamma: float = 0.0, sector: int = 1, tol: float = 1e-10,
                domain: GKDomain | None = None) -> GKState:
    """Truncate the coefficient series over ``basis`` and sum it on the grid.

    With no explicit domain the certification is one-sided: the growth
    bound is fitted from this basis alone and used for both slots.  A
    sector-2 basis must come with the spectrum that actually labels it;
    nothing here re-derives the shift between partner sectors.
    """
    if family not in ("phi", "psi"):
        raise GKError("family must be 'phi' or 'psi'")
    if sector not in (1, 2):
        raise GKError("sector must be 1 or 2")
    if not basis:
        raise GKError("empty basis")
    grid = basis[0].grid
    for b in basis[1:]:
        if b.grid is not grid and not np.array_equal(b.grid.x, grid.x):
            raise GKError("basis functions live on different grids")
    j = float(j)
    gamma = float(gamma)

    n = min(len(basis), len(s))
    if domain is None:
        norms = [norm(b) for b in basis[:n]]
        domain = gk_domain(s, norms, norms)
    if not j < domain.j_min:
        raise GKError(
            f"J={j:g} is outside the certified domain J_min={domain.j_min:g}"
        )

    k = normalization_K(s, j)
    coeffs = _coefficient_vector(s, family, j, gamma, k, n)
    a, r = (domain.a_phi, domain.r_phi) if family == "phi" else (domain.a_psi, domain.r_psi)
    tail = _tail_bound(s, a, r, family, j, gamma, k, n)
    if tail > tol:
        raise GKError(
            f"basis of length {n} leaves a series tail {tail:.3g} above the "
            f"requested tolerance {tol:g}"
        )
    fn = _combine(list(basis[:n]), coeffs)
    return GKState(
        family=family,
        sector=sector,
        j=j,
        gamma=gamma,
        n_terms=n,
        k=k,
        coefficients=coeffs,
        tail=float(tail),
        function=fn,
        spectrum=s,
        basis=tuple(basis),
        domain=domain,
        build_tol=tol,
    )


# ---------------------------------------------------------------------------
# pairing and the action identity

def _require_partners(phi_state: GKState, psi_state: GKState):
    if phi_state.family != "phi" or psi_state.family != "psi":
        raise GKError("pass the phi-family state first and its psi partner second")
    if phi_state.sector != psi_state.sector:
        raise GKError("states belong to different sectors")
    if phi_state.j != psi_state.j or phi_state.gamma != psi_state.gamma:
        raise GKError("states carry different (J, gamma) labels")
    if not np.array_equal(
        phi_state.spectrum.energies[: phi_state.n_terms],
        psi_state.spectrum.energies[: psi_state.n_terms],
    ):
        raise GKError("states were built over different spectra")


def pair_norm(phi_state: GKState, psi_state: GKState, route: str = "coefficients"):
    """<phi(J,gamma), psi(J,gamma)>, equal to one by the choice of K.

    The coefficient route contracts against exact biorthogonality and is an
    algebraic identity: the phases cancel pairwise even for complex
    eigenvalues, leaving K^2 sum J^n/|rho_n|.  The grid route integrates
    the two summed functions and reports the quadrature's verdict instead.
    """
    _require_partners(phi_state, psi_state)
    n = min(phi_state.n_terms, psi_state.n_terms)
    if route == "coefficients":
        return complex(np.sum(np.conjugate(phi_state.coefficients[:n])
                              * psi_state.coefficients[:n]))
    if route == "grid":
        return inner(phi_state.function, psi_state.function)
    if route == "both":
        return {
            "coefficients": pair_norm(phi_state, psi_state, "coefficients"),
            "grid": pair_norm(phi_state, psi_state, "grid"),
        }
    raise GKError("route must be 'coefficients', 'grid', or 'both'")


def action_identity(phi_state: GKState, psi_state: GKState, h_apply=None,
                    route: str = "coefficients"):
    """<psi(J,gamma), H phi(J,gamma)> = J for ladder-type spectra.

    Requires E_0 = 0 and E_n real positive above it; the coefficient
    contraction then telescopes exactly to J.  A grid route applies the
    supplied operator to the summed state and integrates.
    """
    _require_partners(phi_state, psi_state)
    n = min(phi_state.n_terms, psi_state.n_terms)
    e = phi_state.spectrum.energies[:n]
    scale = max(1.0, float(np.abs(e).max()))
    if np.abs(e.imag).max() > 1e-12 * scale:
        raise GKError("action identity needs a real spectrum")
    if abs(e[0]) > 1e-12 * scale or np.any(e.real[1:] <= 0):
        raise GKError("action identity needs E_0 = 0 and E_n > 0 above it")
    if route == "coefficients":
        val = complex(np.sum(np.conjugate(psi_state.coefficients[:n])
                             * e * phi_state.coefficients[:n]))
        j = phi_state.j
        slack = 1e-8 * max(1.0, j) + 100.0 * (phi_state.tail + psi_state.tail)
        if abs(val - j) > slack:
            raise GKError(
                f"coefficient contraction {val:.6g} drifted from the action "
                f"value J={j:g}; the truncation is inconsistent"
            )
        return val
    if route == "grid":
        if h_apply is None:
            raise GKError("the grid route needs an operator applier")
        return inner(psi_state.function, h_apply(phi_state.function))
    if route == "both":
        return {
            "coefficients": action_identity(phi_state, psi_state, route="coefficients"),
            "grid": action_identity(phi_state, psi_state, h_apply, route="grid"),
        }
    raise GKError("route must be 'coefficients', 'grid', or 'both'")


# ---------------------------------------------------------------------------
# the moment problem

@dataclass(eq=False)
class MomentDensity:
    """Density on [0, J_min) whose moments reproduce |rho_n|."""

    label: str | None
    density: object
    scale: float | None
    solved: bool
    notes: tuple


def moment_density(s: Spectrum, density=None) -> MomentDensity:
    """Match |rho_n| against closed-form families, or adopt a supplied density.

    Recognized: |E_n| = c*n for constant c gives |rho_n| = c^n n! and the
    density exp(-J/c)/c.  Constant-modulus spectra have |rho_n| = 1, whose
    moment sequence no integrable density on a half line reproduces here;
    anything else is reported unsolved rather than guessed.
    """
    if density is not None:
        return MomentDensity("user-supplied", density, None, True, ())
    e = s.energies
    ns = np.arange(1, len(e))
    ratios = np.abs(e[1:]) / ns
    c = float(ratios.mean())
    if np.max(np.abs(ratios - c)) <= 1e-9 * max(1.0, c):
        return MomentDensity(
            f"exponential(scale={c:g})",
            lambda jv, c=c: np.exp(-np.asarray(jv, dtype=float) / c) / c,
            c,
            True,
            (),
        )
    if np.max(np.abs(np.abs(e[1:]) - 1.0)) <= 1e-9:
        return MomentDensity(
            "unit-moments",
            None,
            None,
            False,
            ("moment problem unsolved: all |rho_n| equal one, which no "
             "recognized closed form reproduces",),
        )
    return MomentDensity(
        None,
        None,
        None,
        False,
        ("moment problem unsolved for this spectrum; supply a density to verify",),
    )


def _finite_power_moment(density, power: float, j_upper: float) -> float:
    # substitute J = u^2 so half-integer powers stay smooth at the origin
    b = math.sqrt(j_upper)
    return _panel_simpson(
        lambda u, p=power: 2.0 * u ** (2.0 * p + 1.0) * np.asarray(density(u * u), dtype=float),
        0.0,
        b,
        rel_tol=1e-11,
    )


def moment_residuals(s: Spectrum, md: MomentDensity, n_max: int = 10,
                     rel_tol: float = 1e-8, j_upper: float | None = None):
    """Check integral of J^n times the density against |rho_n| for n <= n_max.

    ``j_upper=None`` integrates the whole half line.  A finite upper limit
    reports whatever mass the truncation loses; a failing top moment there
    is the flag that the closed form solves the infinite-limit problem
    only.
    """
    if not md.solved or md.density is None:
        raise GKError("no solved moment density to verify")
    checks = []
    top = min(n_max, len(s) - 1)
    for n in range(top + 1):
        want = math.exp(s.log_abs_rho[n])
        if j_upper is None:
            got = integrate_halfline(
                lambda jv, p=n: np.asarray(jv, dtype=float) ** p
                * np.asarray(md.density(jv), dtype=float)
            ).value
        else:
            got = _finite_power_moment(md.density, float(n), float(j_upper))
        err = abs(got - want) / abs(want)
        checks.append(CheckResult.from_residual(f"moment n={n}", err, rel_tol))
    return checks


# ---------------------------------------------------------------------------
# resolution of the identity

def _sinc(z: np.ndarray) -> np.ndarray:
    """sin(z)/z continued through zero, valid for complex arguments."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.ones_like(z)
    big = np.abs(z) > 1e-6
    out[big] = np.sin(z[big]) / z[big]
    small = ~big & (np.abs(z) > 0)
    zs = z[small]
    out[small] = 1.0 - zs * zs / 6.0 + zs ** 4 / 120.0
    return out


@dataclass(frozen=True)
class ResolutionPoint:
    gamma_limit: float
    j_max: float
    n_trunc: int
    value: complex
    abs_error: float
    rel_error: float | None


@dataclass(eq=False)
class ResolutionReport:
    target: complex
    estimate: complex
    gamma_trace: tuple
    j_trace: tuple
    n_trace: tuple


def resolution_estimate(f, g, phi_basis, psi_basis, s: Spectrum,
                        md: MomentDensity,
                        gamma_limits=(25.0, 50.0, 100.0, 200.0),
                        j_max: float | None = None,
                        n_trunc: int | None = None) -> ResolutionReport:
    """Estimate <f, g> from the overcompleteness integral of the family.

    The angle average of the cross phases is carried out in closed form
    (sin(Gamma * dE)/(Gamma * dE), which is what the quadrature it replaces
    converges to), the J integral numerically against the moment density;
    K^2 cancels between the coefficients and the measure.  Off-diagonal
    terms die like 1/Gamma, diagonal ones approach the exact moments, so
    the trace converges toward <f, g> in the joint limit and its points
    report the approach rather than assert a fixed tolerance.
    """
    if not md.solved or md.density is None:
        raise GKError("resolution estimate needs a solved moment density")
    if not s.multiplicity_one:
        raise GKError(
            f"spectrum has (near-)coincident eigenvalues (min gap {s.min_gap:.3g}); "
            "the angle average cannot separate them"
        )
    n = n_trunc if n_trunc is not None else min(len(phi_basis), len(psi_basis), len(s))
    if n < 2:
        raise GKError("need at least two levels")
    if n > min(len(phi_basis), len(psi_basis), len(s)):
        raise GKError("truncation exceeds the available basis or spectrum")
    if j_max is None:
        j_max = max(10.0, 40.0 * s.min_gap)
    gammas = sorted(float(gv) for gv in gamma_limits)

    e = s.energies[:n]
    f_coeff = np.array([inner(f, phi_basis[i]) for i in range(n)])
    g_coeff = np.array([inner(psi_basis[i], g) for i in range(n)])
    target = inner(f, g)

    def weight_matrix(big_gamma):
        delta = e[None, :] - e[:, None]
        return _sinc(big_gamma * delta)

    def t_matrix(upper):
        powers = [_finite_power_moment(md.density, 0.5 * p, upper)
                  for p in range(2 * n - 1)]
        t = np.empty((n, n), dtype=np.complex128)
        for a in range(n):
            for b in range(n):
                t[a, b] = powers[a + b] / (s.sqrt_rho[a] * np.conjugate(s.sqrt_rho[b]))
        return t

    def errors(value):
        abs_err = abs(value - target)
        rel = abs_err / abs(target) if abs(target) > 1e-8 else None
        return abs_err, rel

    def estimate(big_gamma, t, levels):
        fa = f_coeff[:levels]
        ga = g_coeff[:levels]
        w = weight_matrix(big_gamma)[:levels, :levels]
        return complex(np.einsum("a,ab,b->", fa, w * t[:levels, :levels], ga))

    t_full = t_matrix(j_max)
    gamma_trace = []
    for gv in gammas:
        val = estimate(gv, t_full, n)
        gamma_trace.append(ResolutionPoint(gv, j_max, n, val, *errors(val)))

    final_gamma = gammas[-1]
    j_trace = []
    for frac in (0.25, 0.5, 1.0):
        upper = j_max * frac
        t = t_full if frac == 1.0 else t_matrix(upper)
        val = estimate(final_gamma, t, n)
        j_trace.append(ResolutionPoint(final_gamma, upper, n, val, *errors(val)))

    n_trace = []
    for levels in sorted({max(2, n // 2), max(2, (3 * n) // 4), n}):
        val = estimate(final_gamma, t_full, levels)
        n_trace.append(ResolutionPoint(final_gamma, j_max, levels, val, *errors(val)))

    return ResolutionReport(
        target=target,
        estimate=gamma_trace[-1].value,
        gamma_trace=tuple(gamma_trace),
        j_trace=tuple(j_trace),
        n_trace=tuple(n_trace),
    )


# ---------------------------------------------------------------------------
# time evolution

def evolve(state: GKState, t: float) -> GKState:
    """Shift the angle label by t; H-evolution acts the same way.

    The returned state is rebuilt at gamma + t and cross-checked against
    the spectral phases applied to the existing coefficients (conjugated
    for the psi family, matching evolution under the adjoint).
    """
    t = float(t)
    fresh = build_state(
        list(state.basis),
        state.spectrum,
        family=state.family,
        j=state.j,
        gamma=state.gamma + t,
        sector=state.sector,
        tol=state.build_tol,
        domain=state.domain,
    )
    e = state.spectrum.energies[: state.n_terms]
    phases = np.exp(-1j * (e if state.family == "phi" else np.conjugate(e)) * t)
    direct = state.coefficients * phases
    drift = np.max(np.abs(direct - fresh.coefficients))
    if drift > 1e-12 * max(1.0, float(np.max(np.abs(direct)))):
        raise GKError(
            f"evolution cross-check failed: phase route and rebuild differ by {drift:.3g}"
        )
    return fresh


# ---------------------------------------------------------------------------
# gamma-dependent lowering operators

def lowering_action(s: Spectrum, gamma: float, family: str = "phi",
                    n_terms: int | None = None) -> np.ndarray:
    """Matrix of the angle-dependent lowering operator on the first N levels.

    Entry (n-1, n) is sqrt(E_n) exp(i (E_n - E_{n-1}) gamma); the psi
    variant conjugates only the eigenvalues in the exponent, keeping
    sqrt(E_n) itself, which is what the shared sqrt(rho_n) denominator of
    the two coefficient families requires.  The ground column is zero and
    the matrix is nilpotent at its own size.
    """
    if family not in ("phi", "psi"):
        raise GKError("family must be 'phi' or 'psi'")
    n = n_terms if n_terms is not None else len(s)
    if n > len(s):
        raise GKError("truncation exceeds the spectrum length")
    e = s.energies[:n]
    ph = e if family == "phi" else np.conjugate(e)
    mat = np.zeros((n, n), dtype=np.complex128)
    idx = np.arange(1, n)
    mat[idx - 1, idx] = np.sqrt(e[idx]) * np.exp(1j * (ph[idx] - ph[idx - 1]) * gamma)
    return mat


def lowering_defect(state: GKState) -> float:
    """max |a(gamma) c - sqrt(J) c| over the truncated coefficient vector.

    Interior entries cancel exactly because each sqrt(rho_n) step is the
    principal sqrt(E_n); what remains is the top entry sqrt(J)|c_{N-1}|,
    the truncation's own footprint.
    """
    mat = lowering_action(state.spectrum, state.gamma, state.family, state.n_terms)
    c = state.coefficients
    return float(np.max(np.abs(mat @ c - math.sqrt(state.j) * c)))


# ---------------------------------------------------------------------------
# ladder-normalized intertwining maps on whole states

@dataclass(eq=False)
class SpecialMapsReport:
    case: str
    checks: tuple
    notes: tuple

    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _difference(a, b):
    if isinstance(a, GridFunction) and isinstance(b, GridFunction):
        return a - b
    if isinstance(a, ScaledGridFunction) and isinstance(b, ScaledGridFunction):
        if not np.array_equal(a.log_scale, b.log_scale):
            raise GKError("cannot compare scaled functions with different scales")
        return a.with_values(a.values - b.values)
    raise GKError("cannot compare a plain function with a scaled one")


def _map_check(name: str, lhs, rhs, tol: float, ref_scale: float, notes: list):
    # a side that is exactly zero in theory still carries the derivative
    # stencil's noise, so the degenerate cutoff sits above that floor
    lhs_mag = float(np.max(np.abs(lhs.values)))
    rhs_mag = float(np.max(np.abs(rhs.values)))
    if max(lhs_mag, rhs_mag) <= 1e-6 * max(ref_scale, 1e-300):
        notes.append(f"{name}: both sides vanish at this label; check degenerate")
        return CheckResult(name, 0.0, tol, True)
    return CheckResult.from_residual(
        name, relative_residual(_difference(lhs, rhs), rhs), tol
    )


def pb_special_maps(phi1_state: GKState, phi2_state: GKState, pair,
                    case: str = "alpha-energy", h: float = 1e-4,
                    map_tol: float = 1e-8, operator_tol: float = 1e-5) -> SpecialMapsReport:
    """Check how A and B act on whole states for ladder-normalized pairs.

    The two sector states must share one spectrum, one K, and slots
    aligned by eigenvalue, with the sector-2 slot at the ground energy
    empty whenever A annihilates the sector-1 vacuum.  Case "alpha-energy"
    (A scaled to carry the eigenvalue, B normalized) sends the sector-1
    state to the angle derivative of the sector-2 state, and B sends the
    sector-2 state back to the sector-1 state; with an empty ground slot
    the B image reproduces it minus its ground term, which is noted, not
    hidden.  Case "alpha-one" swaps the roles.  The angle derivative is
    taken by a fourth-order central difference over the coefficients and
    cross-checked against the -i E_n weighting.
    """
    if case not in ("alpha-energy", "alpha-one"):
        raise GKError("case must be 'alpha-energy' or 'alpha-one'")
    if phi1_state.family != "phi" or phi2_state.family != "phi":
        raise GKError("both states must be phi-family states")
    if phi1_state.sector != 1 or phi2_state.sector != 2:
        raise GKError("pass the sector-1 state first and the sector-2 state second")
    if phi1_state.j != phi2_state.j or phi1_state.gamma != phi2_state.gamma:
        raise GKError("states carry different (J, gamma) labels")
    n = min(phi1_state.n_terms, phi2_state.n_terms)
    e = phi1_state.spectrum.energies[:n]
    if not np.array_equal(e, phi2_state.spectrum.energies[:n]):
        raise GKError(
            "states were built over different spectra; align the sector-2 "
            "slots by eigenvalue before building"
        )
    if n < 2:
        raise GKError("need at least two levels")

    basis1 = list(phi1_state.basis[:n])
    basis2 = list(phi2_state.basis[:n])
    probe = apply_A(pair, basis1[1])
    anchor = basis2[1]
    denom = inner(anchor, anchor)
    if abs(denom) == 0.0:
        raise GKError("sector-2 basis slot 1 is empty")
    alpha_hat = inner(anchor, probe) / denom
    expected = complex(e[1]) if case == "alpha-energy" else 1.0 + 0.0j
    if abs(alpha_hat - expected) > 1e-6 * max(1.0, abs(expected)):
        raise GKError(
            f"measured alpha_1 = {alpha_hat:.6g} does not match the {case} "
            f"case (expected {expected:.6g})"
        )

    notes: list = []
    checks: list = []
    s = phi1_state.spectrum
    j, gamma, k = phi1_state.j, phi1_state.gamma, phi1_state.k
    deriv_state = phi2_state if case == "alpha-energy" else phi1_state

    def c_at(gv):
        return _coefficient_vector(s, "phi", j, gv, k, n)

    dc = (c_at(gamma - 2 * h) - 8 * c_at(gamma - h)
          + 8 * c_at(gamma + h) - c_at(gamma + 2 * h)) / (12 * h)
    analytic = -1j * e * deriv_state.coefficients[:n]
    deriv_scale = max(float(np.max(np.abs(analytic))), 1e-300)
    e_top = float(np.abs(e).max())
    deriv_tol = max(1e-10, e_top ** 5 * h ** 4 / 10.0)
    checks.append(CheckResult.from_residual(
        "angle derivative of the coefficients matches the -iE weighting",
        float(np.max(np.abs(dc - analytic))) / deriv_scale,
        deriv_tol,
    ))

    ref_scale = float(np.max(np.abs(phi1_state.function.values)))
    if case == "alpha-energy":
        lhs_a = apply_A(pair, phi1_state.function)
        rhs_a = _combine(basis2, 1j * dc)
        checks.append(_map_check(
            "A image matches the angle derivative of the sector-2 state",
            lhs_a, rhs_a, map_tol, ref_scale, notes,
        ))
        lhs_b = apply_B(pair, phi2_state.function)
        rhs_b = phi1_state.function
        ground_norm = norm(basis2[0])
        peers = max(norm(b) for b in basis2[1:])
        if ground_norm <= 1e-9 * peers:
            c0 = phi1_state.coefficients[0]
            rhs_b = _difference(rhs_b, _combine([basis1[0]], np.array([c0])))
            notes.append(
                "sector-2 expansion has no slot at the ground energy; the B "
                "image reproduces the sector-1 state minus its ground term"
            )
        checks.append(_map_check(
            "B image matches the sector-1 state",
            lhs_b, rhs_b, operator_tol, ref_scale, notes,
        ))
    else:
        lhs_a = apply_A(pair, phi1_state.function)
        checks.append(_map_check(
            "A image matches the sector-2 state",
            lhs_a, phi2_state.function, map_tol, ref_scale, notes,
        ))
        lhs_b = apply_B(pair, phi2_state.function)
        rhs_b = _combine(basis1, 1j * dc)
        checks.append(_map_check(
            "B image matches the angle derivative of the sector-1 state",
            lhs_b, rhs_b, operator_tol, ref_scale, notes,
        ))

    return SpecialMapsReport(case=case, checks=tuple(checks), notes=tuple(notes))
