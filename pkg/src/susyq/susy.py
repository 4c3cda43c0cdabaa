"""Factorized operator quadruples built from two superpotentials.

Given wA and wB, the first-order factors

    A = d/dx + wA(x),      B = -d/dx + wB(x)

generate H1 = B A and H2 = A B, both of the form
-d^2/dx^2 + q1 d/dx + V with the shared drift q1 = wB - wA and

    V1 = wA wB - wA',      V2 = wA wB + wB'.

With complex superpotentials these operators are manifestly non-selfadjoint;
their adjoints are the same second-order form with (wA, wB) replaced by
(conj wB, conj wA), carrying the dual potentials v1_dual, v2_dual.  This
module builds the symbolic quadruple, applies all eight operators on the
grid, computes the four factor vacua with decay classification, and verifies
the intertwining relations and the 2x2 matrix superalgebra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Expr, EvalDomainError, conjugate, differentiate, evaluate
from .numerics import (
    DecayFit,
    Grid,
    GridFunction,
    RepresentationError,
    ScaledGridFunction,
    cumulative_antiderivative,
    default_grid,
    derivative,
    fitted_decay_exponents,
    inner,
    interior_norm,
    norm,
    relative_residual,
    sample,
)
from .reporting import CheckResult

__all__ = [
    "SuperpotentialPair",
    "Vacua",
    "VacuumRecord",
    "IntertwineRecord",
    "build_pair",
    "apply_A",
    "apply_B",
    "apply_A_dag",
    "apply_B_dag",
    "apply_H1",
    "apply_H2",
    "apply_H1_dag",
    "apply_H2_dag",
    "vacua",
    "finalize_vacua",
    "intertwine_check",
    "superalgebra_check",
    "factorization_residual",
    "commutator_defect_residual",
    "potential_identity_residual",
    "vacuum_duality_residual",
    "probe_function",
]


class SuperpotentialPair:
    """(wA, wB) with every derived symbolic quantity and sampling cache.

    Build through :func:`build_pair`, which also cross-checks the assembled
    potentials against the defining identities at scattered points.
    """

    def __init__(self, w_a: Expr, w_b: Expr, singular_points=()):
        self.w_a = w_a
        self.w_b = w_b
        self.dw_a = differentiate(w_a)
        self.dw_b = differentiate(w_b)
        self.q1 = w_b - w_a
        self.v1 = w_a * w_b - self.dw_a
        self.v2 = w_a * w_b + self.dw_b
        self.v1_dual = conjugate(w_a * w_b - self.dw_b)
        self.v2_dual = conjugate(w_a * w_b + self.dw_a)
        self.singular_points = tuple(float(s) for s in singular_points)
        self._cache = {}

    def samples(self, grid: Grid) -> dict:
        """Potential and superpotential arrays on the grid, cached."""
        if grid not in self._cache:
            self._cache[grid] = {
                name: sample(e, grid).values
                for name, e in [
                    ("w_a", self.w_a),
                    ("w_b", self.w_b),
                    ("dw_a", self.dw_a),
                    ("dw_b", self.dw_b),
                    ("q1", self.q1),
                    ("v1", self.v1),
                    ("v2", self.v2),
                    ("v1_dual", self.v1_dual),
                    ("v2_dual", self.v2_dual),
                ]
            }
        return self._cache[grid]

    def __repr__(self):
        return f"SuperpotentialPair(w_a={self.w_a}, w_b={self.w_b})"


def build_pair(w_a: Expr, w_b: Expr, singular_points=(), simplified=None) -> SuperpotentialPair:
    """Assemble the quadruple and verify its defining identities pointwise.

    Checks, at scattered sample points away from declared singularities:
    V2 - V1 = wA' + wB', and the dual potentials against conj(V_j) - conj(q1').
    These guard the symbolic assembly; they cannot fail for well-formed input.

    ``simplified`` optionally maps field names (q1, v1, v2, v1_dual, v2_dual)
    to algebraically reduced expressions.  Each is verified against the
    derived form at the sample points and then replaces it, so callers that
    know a cancellation in closed form (a constant drift, say) get it exact
    on the grid instead of up to rounding of the uncancelled terms.
    """
    p = SuperpotentialPair(w_a, w_b, singular_points)
    simplified = dict(simplified or {})
    unknown = set(simplified) - {"q1", "v1", "v2", "v1_dual", "v2_dual"}
    if unknown:
        raise ValueError(f"cannot simplify unknown fields {sorted(unknown)}")
    dq1 = differentiate(p.q1)
    rng = np.random.default_rng(20260822)
    pts = rng.uniform(-8.0, 8.0, size=50)
    checked = 0
    for x in pts:
        if any(abs(x - s) < 0.05 for s in p.singular_points):
            continue
        try:
            v1 = evaluate(p.v1, x)
            v2 = evaluate(p.v2, x)
            slope_sum = evaluate(p.dw_a, x) + evaluate(p.dw_b, x)
            d1 = evaluate(p.v1_dual, x)
            d2 = evaluate(p.v2_dual, x)
            dq = evaluate(dq1, x)
            reduced = {name: evaluate(e, x) for name, e in simplified.items()}
        except EvalDomainError:
            continue
        scale = max(abs(v1), abs(v2), abs(slope_sum), 1.0)
        if abs((v2 - v1) - slope_sum) > 1e-9 * scale:
            raise ValueError(f"potential difference identity fails at x={x}")
        if abs(d1 - (np.conjugate(v1) - np.conjugate(dq))) > 1e-9 * scale:
            raise ValueError(f"dual potential v1_dual inconsistent at x={x}")
        if abs(d2 - (np.conjugate(v2) - np.conjugate(dq))) > 1e-9 * scale:
            raise ValueError(f"dual potential v2_dual inconsistent at x={x}")
        for name, got in reduced.items():
            want = {"q1": evaluate(p.q1, x), "v1": v1, "v2": v2, "v1_dual": d1, "v2_dual": d2}[name]
            if abs(got - want) > 1e-9 * max(scale, abs(want)):
                raise ValueError(f"simplified {name} disagrees with the derived form at x={x}")
        checked += 1
    if checked == 0:
        raise ValueError("no pole-free sample points to verify the pair on")
    for name, e in simplified.items():
        setattr(p, name, e)
    return p


# ---------------------------------------------------------------------------
# operator application

def _with_values(f, values):
    if isinstance(f, ScaledGridFunction):
        return f.with_values(values)
    return GridFunction(f.grid, values)


def _first_order(p, f, w_name, deriv_sign, conj_w):
    w = p.samples(f.grid)[w_name]
    if conj_w:
        w = np.conjugate(w)
    d1 = derivative(f, 1)
    return _with_values(f, deriv_sign * d1.values + w * f.values)


def apply_A(p: SuperpotentialPair, f):
    """A f = f' + wA f."""
    return _first_order(p, f, "w_a", +1.0, False)


def apply_B(p: SuperpotentialPair, f):
    """B f = -f' + wB f."""
    return _first_order(p, f, "w_b", -1.0, False)


def apply_A_dag(p: SuperpotentialPair, f):
    """Adjoint of A: -f' + conj(wA) f."""
    return _first_order(p, f, "w_a", -1.0, True)


def apply_B_dag(p: SuperpotentialPair, f):
    """Adjoint of B: f' + conj(wB) f."""
    return _first_order(p, f, "w_b", +1.0, True)


def _second_order(f, drift, potential):
    d1 = derivative(f, 1)
    d2 = derivative(f, 2)
    return _with_values(f, -d2.values + drift * d1.values + potential * f.values)


def apply_H1(p: SuperpotentialPair, f):
    """H1 f through the closed-form potential, not by composing A then B."""
    s = p.samples(f.grid)
    return _second_order(f, s["q1"], s["v1"])


def apply_H2(p: SuperpotentialPair, f):
    s = p.samples(f.grid)
    return _second_order(f, s["q1"], s["v2"])


def apply_H1_dag(p: SuperpotentialPair, f):
    """Adjoint of H1: drift flips to -conj(q1), potential to the dual."""
    s = p.samples(f.grid)
    return _second_order(f, -np.conjugate(s["q1"]), s["v1_dual"])


def apply_H2_dag(p: SuperpotentialPair, f):
    s = p.samples(f.grid)
    return _second_order(f, -np.conjugate(s["q1"]), s["v2_dual"])


# ---------------------------------------------------------------------------
# structural residual helpers

def probe_function(grid: Grid, singular_points=(), width: float = 1.0) -> GridFunction:
    """Unit-height Gaussian placed as far as possible from the singularities.

    Finite-difference stencils cannot resolve a potential's pole, so
    composition and commutator probes must be negligible there; a Gaussian
    six-plus units away contributes below rounding at the exclusion-zone
    edge while keeping an order-one norm.
    """
    candidates = np.linspace(-grid.half_width / 2, grid.half_width / 2, 97)
    if singular_points:
        gaps = [min(abs(c - s) for s in singular_points) for c in candidates]
        center = float(candidates[int(np.argmax(gaps))])
    else:
        center = 0.0
    return GridFunction(grid, np.exp(-((grid.x - center) ** 2) / (2.0 * width**2)))


def factorization_residual(p: SuperpotentialPair, f, sector: int = 1) -> float:
    """Interior residual of the composed factors against the closed form."""
    if sector == 1:
        composed = apply_B(p, apply_A(p, f))
        direct = apply_H1(p, f)
    elif sector == 2:
        composed = apply_A(p, apply_B(p, f))
        direct = apply_H2(p, f)
    else:
        raise ValueError("sector must be 1 or 2")
    diff = _with_values(f, composed.values - direct.values)
    return relative_residual(diff, direct, exclude=list(p.singular_points))


def commutator_defect_residual(p: SuperpotentialPair, f) -> float:
    """[A, B] f should equal (wA' + wB') f; interior relative residual."""
    s = p.samples(f.grid)
    comm = apply_A(p, apply_B(p, f)).values - apply_B(p, apply_A(p, f)).values
    want = (s["dw_a"] + s["dw_b"]) * f.values
    return relative_residual(
        _with_values(f, comm - want), f, exclude=list(p.singular_points)
    )


def potential_identity_residual(p: SuperpotentialPair, grid: Grid) -> float:
    """Pointwise residual of V2 - V1 against wA' + wB' over the interior.

    Measured against the local magnitude of the potentials themselves: the
    difference cancels the product wA*wB, so that product's size is the
    natural backward-error scale where it dominates.
    """
    s = p.samples(grid)
    mask = np.ones(grid.n_points, dtype=bool)
    for x0 in p.singular_points:
        mask &= np.abs(grid.x - x0) > 6 * grid.spacing
    lhs = s["v2"] - s["v1"]
    rhs = s["dw_a"] + s["dw_b"]
    local = np.maximum(np.maximum(np.abs(s["v1"]), np.abs(s["v2"])), np.maximum(np.abs(rhs), 1.0))
    return float(np.max(np.abs(lhs - rhs)[mask] / local[mask]))


# ---------------------------------------------------------------------------
# vacua

@dataclass
class VacuumRecord:
    """One factor vacuum with its decay fit and integrability flags."""

    label: str
    function: ScaledGridFunction
    decay: DecayFit
    in_l2: bool
    in_l1loc_on_grid: bool
    annihilation_residual: float

    def summary(self) -> dict:
        return {
            "label": self.label,
            "left_exponent": self.decay.left_exponent,
            "right_exponent": self.decay.right_exponent,
            "in_l2": self.in_l2,
            "in_l1loc_on_grid": self.in_l1loc_on_grid,
            "annihilation_residual": self.annihilation_residual,
        }


@dataclass
class Vacua:
    """The four factor vacua of a quadruple.

    phi0_1 is annihilated by A, phi0_2 by B, psi0_1 by the adjoint of B,
    psi0_2 by the adjoint of A.  All are carried in scaled form so that
    non-normalizable vacua (the generic case) are still representable.
    """

    phi0_1: VacuumRecord
    phi0_2: VacuumRecord
    psi0_1: VacuumRecord
    psi0_2: VacuumRecord
    normalization: str
    notes: list

    def records(self):
        return [self.phi0_1, self.phi0_2, self.psi0_1, self.psi0_2]


def _exp_vacuum(grid: Grid, w_vals, dw_vals, sign: float) -> ScaledGridFunction:
    """exp(sign * W) with W an antiderivative of w, W = 0 near x = 0."""
    w_anti = cumulative_antiderivative(w_vals, grid, dvalues=dw_vals)
    z = sign * w_anti
    return ScaledGridFunction(
        grid,
        np.exp(1j * z.imag),
        z.real,
        dlog=sign * np.real(w_vals),
        d2log=sign * np.real(dw_vals),
    )


def _normalize_unit(rec: VacuumRecord, notes: list):
    if not rec.in_l2:
        notes.append(f"{rec.label}: not square integrable, left unnormalized")
        return
    try:
        scale = norm(rec.function)
    except RepresentationError:
        notes.append(f"{rec.label}: norm overflows on this grid, left unnormalized")
        return
    if scale > 0:
        rec.function = rec.function.with_values(rec.function.values / scale)


def _normalize_paired(phi: VacuumRecord, psi: VacuumRecord, notes: list):
    try:
        pairing = inner(psi.function, phi.function)
    except RepresentationError:
        notes.append(
            f"{phi.label}/{psi.label}: pairing overflows on this grid, left unnormalized"
        )
        return
    if abs(pairing) < 1e-300:
        notes.append(f"{phi.label}/{psi.label}: pairing vanishes, left unnormalized")
        return
    phi.function = phi.function.with_values(phi.function.values / pairing)


def vacua(p: SuperpotentialPair, grid: Grid | None = None, normalization: str = "raw") -> Vacua:
    """Compute the four factor vacua from superpotential antiderivatives.

    ``normalization``: "raw" keeps the value-1-near-origin convention; "unit"
    rescales square-integrable vacua to unit norm; "paired" rescales each
    phi against its psi partner so their pairing is 1.  Vacua that cannot be
    normalized under the requested policy are left raw, with a note.
    """
    if normalization not in ("raw", "unit", "paired"):
        raise ValueError(f"unknown normalization policy {normalization!r}")
    grid = grid or default_grid()
    s = p.samples(grid)
    exclude = list(p.singular_points)

    specs = [
        ("phi0_1", s["w_a"], s["dw_a"], -1.0, apply_A),
        ("phi0_2", s["w_b"], s["dw_b"], +1.0, apply_B),
        ("psi0_1", np.conjugate(s["w_b"]), np.conjugate(s["dw_b"]), -1.0, apply_B_dag),
        ("psi0_2", np.conjugate(s["w_a"]), np.conjugate(s["dw_a"]), +1.0, apply_A_dag),
    ]
    records = {}
    for label, w_vals, dw_vals, sign, annihilator in specs:
        f = _exp_vacuum(grid, w_vals, dw_vals, sign)
        fit = fitted_decay_exponents(f)
        residual = relative_residual(annihilator(p, f), f, exclude=exclude)
        records[label] = VacuumRecord(
            label=label,
            function=f,
            decay=fit,
            in_l2=fit.square_integrable,
            in_l1loc_on_grid=f.representable(),
            annihilation_residual=residual,
        )

    return finalize_vacua(records, normalization)


def finalize_vacua(records: dict, normalization: str) -> Vacua:
    """Apply a normalization policy to four raw vacuum records.

    Shared by the generic antiderivative route and models that supply their
    vacua in closed form.  Vacua the policy cannot reach (growing norm,
    overflowing pairing) stay raw and are listed in the notes.
    """
    if normalization not in ("raw", "unit", "paired"):
        raise ValueError(f"unknown normalization policy {normalization!r}")
    notes = []
    if normalization == "unit":
        for rec in records.values():
            _normalize_unit(rec, notes)
    elif normalization == "paired":
        _normalize_paired(records["phi0_1"], records["psi0_1"], notes)
        _normalize_paired(records["phi0_2"], records["psi0_2"], notes)
    return Vacua(
        phi0_1=records["phi0_1"],
        phi0_2=records["phi0_2"],
        psi0_1=records["psi0_1"],
        psi0_2=records["psi0_2"],
        normalization=normalization,
        notes=notes,
    )


def vacuum_duality_residual(v: Vacua) -> float:
    """Pointwise constancy defect of psi0_1 * phi0_2 over the interior.

    The combined exponent cancels exactly (both scales come from the same
    antiderivative of wB), so the product never overflows.  Constant for
    real wB; for complex wB the product is a unimodular phase and this
    residual reports its swing.
    """
    a, b = v.psi0_1.function, v.phi0_2.function
    grid = a.grid
    prod = a.values * b.values * np.exp(a.log_scale + b.log_scale)
    lo, hi = 5, grid.n_points - 5
    inner_vals = prod[lo:hi]
    ref = inner_vals[len(inner_vals) // 2]
    if abs(ref) == 0.0:
        return np.inf
    return float(np.max(np.abs(inner_vals - ref)) / abs(ref))


# ---------------------------------------------------------------------------
# intertwining

@dataclass
class IntertwineRecord:
    """Extracted intertwining data for one level.

    alpha is the coefficient carrying sector 1 to sector 2 under A, beta the
    return coefficient under B; their product must reproduce the eigenvalue
    (skipped at a zero ground-state energy, where both maps annihilate).
    """

    n: int
    energy: complex
    alpha: complex | None
    beta: complex | None
    residual_a: float
    residual_b: float
    product_residual: float | None
    passed: bool
    dual_residual_b: float | None = None
    dual_residual_a: float | None = None


def _as_plain(f) -> GridFunction:
    if isinstance(f, ScaledGridFunction):
        return f.materialize()
    return f


def _projection(target, image, tol_floor=1e-13):
    """coefficient c with image ~ c * target, plus the relative defect."""
    den = inner(target, target)
    c = inner(target, image) / den
    residual_num = norm(GridFunction(image.grid, image.values - c * target.values))
    scale = norm(image)
    if scale < tol_floor * np.sqrt(abs(den)):
        return c, 0.0
    return c, float(residual_num / scale)


def intertwine_check(
    p: SuperpotentialPair,
    eigpairs1,
    eigpairs2,
    psi1=None,
    psi2=None,
    tol: float = 1e-6,
):
    """Verify that A and B map the two eigenfamilies onto each other.

    ``eigpairs1`` is a list of (E_n, phi_n) for the first sector;
    ``eigpairs2`` aligns entry n with the *same eigenvalue* in the second
    sector, with None where no partner exists (a zero-mode).  When the
    adjoint families ``psi1``/``psi2`` are supplied, the conjugate mapping
    relations are verified on them as well.
    """
    out = []
    for n, (energy, phi1) in enumerate(eigpairs1):
        phi1 = _as_plain(phi1)
        partner = eigpairs2[n] if n < len(eigpairs2) else None
        a_image = apply_A(p, phi1)
        if partner is None:
            # zero-mode: A must annihilate, no coefficients to extract
            residual_a = relative_residual(a_image, phi1, exclude=list(p.singular_points))
            out.append(
                IntertwineRecord(
                    n=n,
                    energy=complex(energy),
                    alpha=None,
                    beta=None,
                    residual_a=residual_a,
                    residual_b=0.0,
                    product_residual=None,
                    passed=residual_a < tol,
                )
            )
            continue
        phi2 = _as_plain(partner[1])
        alpha, residual_a = _projection(phi2, a_image)
        beta, residual_b = _projection(phi1, apply_B(p, phi2))
        if n == 0 and abs(energy) < 1e-12:
            product_residual = None  # both maps annihilate at zero energy
        else:
            product_residual = abs(alpha * beta - complex(energy))
        passed = residual_a < tol and residual_b < tol
        if product_residual is not None:
            passed = passed and product_residual < tol * max(1.0, abs(energy))
        rec = IntertwineRecord(
            n=n,
            energy=complex(energy),
            alpha=alpha,
            beta=beta,
            residual_a=residual_a,
            residual_b=residual_b,
            product_residual=product_residual,
            passed=passed,
        )
        if psi1 is not None and psi2 is not None and psi2[n] is not None:
            pn1 = _as_plain(psi1[n])
            pn2 = _as_plain(psi2[n])
            # adjoint relations carry the conjugated coefficients
            b_img = apply_B_dag(p, pn1)
            diff_b = GridFunction(b_img.grid, b_img.values - np.conjugate(beta) * pn2.values)
            rec.dual_residual_b = float(norm(diff_b) / max(norm(b_img), 1e-300))
            a_img = apply_A_dag(p, pn2)
            diff_a = GridFunction(a_img.grid, a_img.values - np.conjugate(alpha) * pn1.values)
            rec.dual_residual_a = float(norm(diff_a) / max(norm(a_img), 1e-300))
            rec.passed = rec.passed and rec.dual_residual_b < tol and rec.dual_residual_a < tol
        out.append(rec)
    return out


# ---------------------------------------------------------------------------
# 2x2 superalgebra

def _zero_like(grid: Grid) -> GridFunction:
    return GridFunction(grid, np.zeros(grid.n_points, dtype=np.complex128))


def _q_a(p, v):
    f, _ = v
    return (_zero_like(f.grid), apply_A(p, _as_plain(f)))


def _q_b(p, v):
    _, g = v
    return (apply_B(p, _as_plain(g)), _zero_like(g.grid))


def _h_diag(p, v):
    f, g = v
    return (apply_H1(p, _as_plain(f)), apply_H2(p, _as_plain(g)))


def _vector_norm(p, v) -> float:
    ex = list(p.singular_points)
    return float(np.hypot(interior_norm(v[0], exclude=ex), interior_norm(v[1], exclude=ex)))


def _pair_residual(p, got, want, scale: float) -> float:
    """||got - want|| / scale with the two-component interior norm."""
    diff = tuple(
        GridFunction(g.grid, g.values - w.values) for g, w in zip(got, want)
    )
    return _vector_norm(p, diff) / max(scale, 1e-300)


def superalgebra_check(p: SuperpotentialPair, test_vectors, doublets=None, tol: float = 1e-5):
    """Verify the matrix superalgebra on two-component test vectors.

    Each vector v = (f, g) exercises: nilpotency of both charges (exact by
    block structure), the anticommutator against the diagonal Hamiltonian,
    and both commutators.  ``doublets`` entries (n, E_n, phi1, phi2, alpha,
    beta) additionally verify the mapping relations the charges induce
    between the two sectors.  Returns a list of CheckResult.
    """
    report = []
    for i, v in enumerate(test_vectors):
        v = (_as_plain(v[0]), _as_plain(v[1]))
        tag = f"vector {i}"

        qa_qa = _q_a(p, _q_a(p, v))
        qb_qb = _q_b(p, _q_b(p, v))
        nil = max(
            np.max(np.abs(qa_qa[0].values)) + np.max(np.abs(qa_qa[1].values)),
            np.max(np.abs(qb_qb[0].values)) + np.max(np.abs(qb_qb[1].values)),
        )
        report.append(CheckResult.from_residual(f"nilpotency Q_A^2 = Q_B^2 = 0 ({tag})", nil, 1e-300))

        hv = _h_diag(p, v)
        scale = max(_vector_norm(p, hv), _vector_norm(p, v))
        anti = tuple(
            GridFunction(a.grid, a.values + b.values)
            for a, b in zip(_q_a(p, _q_b(p, v)), _q_b(p, _q_a(p, v)))
        )
        r = _pair_residual(p, anti, hv, scale)
        report.append(CheckResult.from_residual(f"anticommutator {{Q_A,Q_B}} = H ({tag})", r, tol))

        r = _pair_residual(p, _h_diag(p, _q_a(p, v)), _q_a(p, hv), scale)
        report.append(CheckResult.from_residual(f"commutator [H,Q_A] = 0 ({tag})", r, tol))

        r = _pair_residual(p, _h_diag(p, _q_b(p, v)), _q_b(p, hv), scale)
        report.append(CheckResult.from_residual(f"commutator [H,Q_B] = 0 ({tag})", r, tol))

    for n, energy, phi1, phi2, alpha, beta in doublets or []:
        phi1, phi2 = _as_plain(phi1), _as_plain(phi2)
        up = (phi1, _zero_like(phi1.grid))
        down = (_zero_like(phi1.grid), phi2)

        image = _q_a(p, up)[1]
        diff = GridFunction(image.grid, image.values - alpha * phi2.values)
        r = relative_residual(diff, image, exclude=list(p.singular_points)) if norm(image) > 0 else 0.0
        report.append(CheckResult.from_residual(f"charge maps sector 1 -> 2 with alpha (n={n})", r, tol))

        image = _q_b(p, down)[0]
        diff = GridFunction(image.grid, image.values - beta * phi1.values)
        r = relative_residual(diff, image, exclude=list(p.singular_points)) if norm(image) > 0 else 0.0
        report.append(CheckResult.from_residual(f"charge maps sector 2 -> 1 with beta (n={n})", r, tol))

        dead_a = _q_a(p, down)
        dead_b = _q_b(p, up)
        z = max(
            np.max(np.abs(dead_a[0].values)) + np.max(np.abs(dead_a[1].values)),
            np.max(np.abs(dead_b[0].values)) + np.max(np.abs(dead_b[1].values)),
        )
        report.append(CheckResult.from_residual(f"charges annihilate opposite doublets (n={n})", z, 1e-300))
    return report
