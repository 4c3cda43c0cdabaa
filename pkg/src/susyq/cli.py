"""Command-line front end.

Subcommands load a registered model or a user superpotential pair, run the
verification suites, and emit potentials, vacua, state data, and reports
as CSV/JSON files under an output directory.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 pole on a grid node, 4 state-family domain rejection.  Data files are
byte-identical across runs of the same configuration; stdout lists the
files written, stderr carries diagnostics.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import deform as _deform  # noqa: F401  (registers the deformed model)
from .expr import ExprError, parse
from .gk import (
    GKError,
    action_identity,
    build_spectrum,
    build_state,
    gk_domain,
    lowering_defect,
    moment_density,
    normalization_K,
    pair_norm,
    resolution_estimate,
    spectrum_from_formula,
)
from .models import (
    ModelError,
    bs_classification,
    bs_numeric_flags,
    get_model,
    models_list,
)
from .numerics import Grid, PoleOnGridError, RepresentationError, as_scaled, norm
from .suites import verify_model, verify_pair
from .susy import build_pair, vacua as pair_vacua

__all__ = ["main", "RunConfig"]

_EXIT_OK = 0
_EXIT_VERIFY_FAILED = 1
_EXIT_CONFIG = 2
_EXIT_POLE = 3
_EXIT_DOMAIN = 4

_R_VALUES_DEFAULT = (2.0, 1.0, 0.5, -0.5, -1.0, -2.0)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Merged view of flags, an optional JSON config file, and environment.

    Precedence per key: command-line flag, then SUSYQ_GRID_N (grid size
    only), then the config file, then the built-in default.
    """

    command: str
    model: str | None = None
    w_a: str | None = None
    w_b: str | None = None
    bind: dict = field(default_factory=dict)
    grid_l: float = 12.0
    grid_n: int = 4097
    tolerances: dict = field(default_factory=dict)
    out: str = "susyq-out"
    fmt: str = "csv"
    j: float = 1.0
    gamma: float = 0.0
    family: str = "phi"
    n_terms: int = 26
    j_max: float | None = None
    spectrum_file: str | None = None
    normalization: str = "raw"
    perturb_wb: str | None = None
    r_values: tuple = _R_VALUES_DEFAULT
    numeric: bool = False

    def grid(self) -> Grid:
        try:
            return Grid(self.grid_l, self.grid_n)
        except ValueError as e:
            raise ConfigError(str(e)) from e


def _parse_bind_token(token: str):
    if "=" not in token:
        raise ConfigError(f"binding {token!r} is not of the form name=value")
    name, text = token.split("=", 1)
    name = name.strip()
    if not name:
        raise ConfigError(f"binding {token!r} has an empty name")
    try:
        return name, json.loads(text)
    except json.JSONDecodeError:
        return name, text  # expression-valued parameters stay strings


def _merge_config(args) -> RunConfig:
    file_cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file is not valid JSON: {e}") from e
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")

    def pick(flag_name, key, default):
        flag = getattr(args, flag_name, None)
        if flag is not None:
            return flag
        return file_cfg.get(key, default)

    grid_cfg = file_cfg.get("grid", {})
    if not isinstance(grid_cfg, dict):
        raise ConfigError("config key 'grid' must be an object with L and N")
    if getattr(args, "grid_n", None) is not None:
        grid_n = args.grid_n
    elif os.environ.get("SUSYQ_GRID_N"):
        try:
            grid_n = int(os.environ["SUSYQ_GRID_N"])
        except ValueError as e:
            raise ConfigError(f"SUSYQ_GRID_N is not an integer: {e}") from e
    else:
        grid_n = grid_cfg.get("N", 4097)

    bind = dict(file_cfg.get("bind", {}))
    for token in getattr(args, "bind", None) or []:
        name, value = _parse_bind_token(token)
        bind[name] = value

    tolerances = dict(file_cfg.get("tolerances", {}))
    for token in getattr(args, "tol", None) or []:
        name, value = _parse_bind_token(token)
        tolerances[name] = float(value)

    r_values = pick("r_values", "r_values", None)
    if r_values is None:
        r_values = _R_VALUES_DEFAULT
    elif isinstance(r_values, str):
        try:
            r_values = tuple(float(t) for t in r_values.split(",") if t.strip())
        except ValueError as e:
            raise ConfigError(f"bad r-values list: {e}") from e
    else:
        r_values = tuple(float(t) for t in r_values)

    fmt = pick("fmt", "format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format {fmt!r} (csv or json)")
    family = pick("family", "family", "phi")
    if family not in ("phi", "psi"):
        raise ConfigError(f"unknown state family {family!r} (phi or psi)")

    cfg = RunConfig(
        command=args.command,
        model=pick("model", "model", None),
        w_a=pick("wA", "wA", None),
        w_b=pick("wB", "wB", None),
        bind=bind,
        grid_l=float(pick("grid_l", "_ignored_", grid_cfg.get("L", 12.0))),
        grid_n=int(grid_n),
        tolerances=tolerances,
        out=pick("out", "out", "susyq-out"),
        fmt=fmt,
        j=float(pick("j", "J", 1.0)),
        gamma=float(pick("gamma", "gamma", 0.0)),
        family=family,
        n_terms=int(pick("n_terms", "n_terms", 26)),
        j_max=pick("j_max", "j_max", None),
        spectrum_file=pick("spectrum_file", "spectrum_file", None),
        normalization=pick("normalization", "normalization", "raw"),
        perturb_wb=pick("perturb_wb", "perturb_wb", None),
        r_values=r_values,
        numeric=bool(pick("numeric", "numeric", False)),
    )
    if cfg.j_max is not None:
        cfg.j_max = float(cfg.j_max)
    return cfg


def _require_source(cfg: RunConfig):
    """Model name, or both superpotential sources; never a mix or neither."""
    if cfg.model is not None and (cfg.w_a or cfg.w_b):
        raise ConfigError("give either --model or --wA/--wB, not both")
    if cfg.model is None:
        if not (cfg.w_a and cfg.w_b):
            raise ConfigError("need --model, or both --wA and --wB")


def _model_params(cfg: RunConfig) -> dict:
    return dict(cfg.bind)


def _build_user_pair(cfg: RunConfig):
    return build_pair(parse(cfg.w_a, cfg.bind), parse(cfg.w_b, cfg.bind))


# ---------------------------------------------------------------------------
# serialization helpers

def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _jsonable(obj):
    """Structure with only JSON-safe leaves; non-finite floats to strings."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):  # before int: bool is an int subclass
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


def _emit_table(cfg: RunConfig, stem: str, header, rows) -> str:
    """One table as CSV, or as a JSON list of row objects under --format json.

    Rows carry native values; CSV formatting happens here so the JSON view
    keeps numbers as numbers.
    """
    if cfg.fmt == "csv":
        path = os.path.join(cfg.out, f"{stem}.csv")
        _write_csv(path, header, [[_cell(v) for v in row] for row in rows])
    else:
        path = os.path.join(cfg.out, f"{stem}.json")
        _write_json(path, [dict(zip(header, row)) for row in rows])
    return path


def _annotations(grid: Grid, singular_points) -> list:
    ann = [""] * grid.n_points
    for x0 in singular_points:
        idx = int(np.argmin(np.abs(grid.x - x0)))
        tag = f"pole x0={_fmt(x0)}"
        ann[idx] = f"{ann[idx]};{tag}" if ann[idx] else tag
    return ann


# ---------------------------------------------------------------------------
# subcommands

def _cmd_potentials(cfg: RunConfig) -> list:
    _require_source(cfg)
    grid = cfg.grid()
    if cfg.model is not None:
        m = get_model(cfg.model, **_model_params(cfg))
        if m.pair is None:
            raise ConfigError(f"model {cfg.model!r} has no factorized pair")
        pair, meta_model, meta_params = m.pair, m.name, m.params
    else:
        pair = _build_user_pair(cfg)
        meta_model, meta_params = None, dict(cfg.bind)

    s = pair.samples(grid)  # raises PoleOnGridError if a node hits a pole
    columns = [("q1", s["q1"]), ("v1", s["v1"]), ("v2", s["v2"]),
               ("v1_dual", s["v1_dual"]), ("v2_dual", s["v2_dual"])]
    complex_valued = any(np.any(col.imag != 0.0) for _, col in columns)
    ann = _annotations(grid, pair.singular_points)

    header = ["x"]
    for name, _ in columns:
        header.extend([f"{name}_re", f"{name}_im"] if complex_valued else [name])
    header.append("annotation")

    rows = []
    for i in range(grid.n_points):
        row = [float(grid.x[i])]
        for _, col in columns:
            if complex_valued:
                row.extend([float(col[i].real), float(col[i].imag)])
            else:
                row.append(float(col[i].real))
        row.append(ann[i])
        rows.append(row)

    paths = [_emit_table(cfg, "potentials", header, rows)]
    meta = {
        "model": meta_model,
        "params": meta_params,
        "wA": cfg.w_a,
        "wB": cfg.w_b,
        "grid": {"L": grid.half_width, "N": grid.n_points},
        "complex_valued": complex_valued,
        "singular_points": list(pair.singular_points),
        "columns": header,
    }
    meta_path = os.path.join(cfg.out, "potentials-meta.json")
    _write_json(meta_path, meta)
    paths.append(meta_path)
    return paths


def _cmd_vacua(cfg: RunConfig) -> list:
    _require_source(cfg)
    grid = cfg.grid()
    if cfg.normalization not in ("raw", "unit", "paired"):
        raise ConfigError(
            f"unknown normalization {cfg.normalization!r} (raw, unit, or paired)")
    if cfg.model is not None:
        m = get_model(cfg.model, **_model_params(cfg))
        v = m.vacua(grid, cfg.normalization)
        meta_model, meta_params = m.name, m.params
    else:
        pair = _build_user_pair(cfg)
        v = pair_vacua(pair, grid, cfg.normalization)
        meta_model, meta_params = None, dict(cfg.bind)

    header = ["x"]
    series = []
    for rec in v.records():
        f = as_scaled(rec.function)
        series.append((rec.label, f.log_magnitude(), np.angle(f.values)))
        header.extend([f"{rec.label}_logabs", f"{rec.label}_phase"])

    rows = []
    for i in range(grid.n_points):
        row = [float(grid.x[i])]
        for _, logabs, phase in series:
            row.extend([float(logabs[i]), float(phase[i])])
        rows.append(row)

    paths = [_emit_table(cfg, "vacua", header, rows)]
    report = {
        "model": meta_model,
        "params": meta_params,
        "wA": cfg.w_a,
        "wB": cfg.w_b,
        "grid": {"L": grid.half_width, "N": grid.n_points},
        "normalization": v.normalization,
        "records": [rec.summary() for rec in v.records()],
        "notes": list(v.notes),
    }
    report_path = os.path.join(cfg.out, "vacua-report.json")
    _write_json(report_path, report)
    paths.append(report_path)
    return paths


def _cmd_verify(cfg: RunConfig) -> tuple:
    _require_source(cfg)
    grid = cfg.grid()
    if cfg.model is not None:
        try:
            suite = verify_model(cfg.model, grid=grid,
                                 perturb_wb=cfg.perturb_wb, **_model_params(cfg))
        except KeyError as e:
            raise ConfigError(str(e)) from e
    else:
        if cfg.perturb_wb is not None:
            raise ConfigError("--perturb-wb applies to --model runs only")
        suite = verify_pair(cfg.w_a, cfg.w_b, cfg.bind, grid=grid)
    path = os.path.join(cfg.out, "verify.json")
    _write_json(path, suite.payload())
    n_checks = sum(1 for _ in suite.checks())
    n_failed = sum(1 for c in suite.checks() if not c.passed)
    print(f"verify: {n_checks - n_failed}/{n_checks} checks passed", file=sys.stderr)
    return [path], suite.all_pass()


def _spectral_basis(cfg: RunConfig, grid: Grid):
    m = get_model(cfg.model, **_model_params(cfg))
    if m.phi1 is None or m.psi1 is None or m.energy is None:
        raise ConfigError(
            f"model {cfg.model!r} does not provide both eigenfamilies and a spectrum")
    if cfg.n_terms < 2:
        raise ConfigError("need at least two basis terms")
    try:
        phis = [m.phi1(n, grid) for n in range(cfg.n_terms)]
        psis = [m.psi1(n, grid) for n in range(cfg.n_terms)]
    except ModelError as e:
        raise ConfigError(str(e)) from e
    return m, phis, psis


def _load_spectrum_file(path: str) -> list:
    """JSON list of eigenvalues, each a number or an [re, im] pair."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read spectrum file: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"spectrum file is not valid JSON: {e}") from e
    if not isinstance(data, list) or len(data) < 2:
        raise ConfigError("spectrum file must hold a list of two or more eigenvalues")
    energies = []
    for item in data:
        if isinstance(item, (int, float)) and not isinstance(item, bool):
            energies.append(complex(item))
        elif (isinstance(item, list) and len(item) == 2
              and all(isinstance(v, (int, float)) for v in item)):
            energies.append(complex(item[0], item[1]))
        else:
            raise ConfigError(
                f"bad spectrum entry {item!r}: expected a number or [re, im]")
    return energies


def _cmd_gk(cfg: RunConfig) -> list:
    if cfg.model is None:
        raise ConfigError("gk needs --model (a registry entry with eigenfamilies)")
    grid = cfg.grid()
    file_energies = None
    if cfg.spectrum_file is not None:
        # the file fixes both the eigenvalues and the basis truncation
        file_energies = _load_spectrum_file(cfg.spectrum_file)
        cfg.n_terms = len(file_energies)
    m, phis, psis = _spectral_basis(cfg, grid)
    if file_energies is not None:
        s = build_spectrum(file_energies)
    else:
        s = spectrum_from_formula(m.energy, cfg.n_terms)

    try:
        domain = gk_domain(s, [norm(b) for b in phis], [norm(b) for b in psis])
    except RepresentationError as e:
        raise GKError(
            "a family exceeds double range on this grid, so its norm growth "
            f"cannot be certified: {e}") from e

    tol = float(cfg.tolerances.get("state", 1e-8))
    phi_state = build_state(phis, s, "phi", j=cfg.j, gamma=cfg.gamma,
                            tol=tol, domain=domain)
    psi_state = build_state(psis, s, "psi", j=cfg.j, gamma=cfg.gamma,
                            tol=tol, domain=domain)
    state, partner = ((phi_state, psi_state) if cfg.family == "phi"
                      else (psi_state, phi_state))

    norms = pair_norm(phi_state, psi_state, route="both")
    action_value, action_note = None, None
    try:
        action_value = action_identity(phi_state, psi_state)
    except GKError as e:
        action_note = str(e)

    # the curve depends only on the spectrum, so extend it past the basis
    # when a level formula is available; a file spectrum is all there is
    if file_energies is None:
        n_curve = max(cfg.n_terms, 60)
        curve_s = spectrum_from_formula(m.energy, n_curve)
    else:
        n_curve = cfg.n_terms
        curve_s = s
    j_upper = cfg.j_max
    if j_upper is None:
        j_upper = domain.j_min if math.isfinite(domain.j_min) else 10.0
        j_upper = min(j_upper, 10.0)
    curve_rows, curve_note = [], None
    for jv in np.linspace(0.0, j_upper, 101):
        try:
            curve_rows.append([_fmt(jv), _fmt(normalization_K(curve_s, jv))])
        except GKError as e:
            curve_note = f"curve stops at J={jv:.6g}: {e}"
            break
    curve_path = os.path.join(cfg.out, "gk-kcurve.csv")
    _write_csv(curve_path, ["J", "K"], curve_rows)

    md = moment_density(s)
    res_header = ["stage", "gamma_limit", "j_max", "n_trunc",
                  "value_re", "value_im", "abs_error", "rel_error"]
    res_rows, res_note = [], None
    if md.solved:
        rep = resolution_estimate(phis[0], phis[0], phis, psis, s, md)
        for stage, points in (("gamma", rep.gamma_trace), ("j", rep.j_trace),
                              ("n", rep.n_trace)):
            for p in points:
                res_rows.append([
                    stage, _fmt(p.gamma_limit), _fmt(p.j_max), str(p.n_trunc),
                    _fmt(p.value.real), _fmt(p.value.imag), _fmt(p.abs_error),
                    "" if p.rel_error is None else _fmt(p.rel_error),
                ])
    else:
        res_note = ("no closed-form action density for this spectrum; "
                    "the overcompleteness trace is skipped")
    res_path = os.path.join(cfg.out, "gk-resolution.csv")
    _write_csv(res_path, res_header, res_rows)

    report = {
        "model": m.name,
        "params": m.params,
        "grid": {"L": grid.half_width, "N": grid.n_points},
        "state": state.payload(),
        "partner": partner.payload(),
        "domain": {
            "j_min": domain.j_min,
            "radius": domain.radius,
            "j_phi": domain.j_phi,
            "j_psi": domain.j_psi,
            "growth_phi": {"a": domain.a_phi, "r": domain.r_phi,
                           "m_limit": domain.m_phi_limit},
            "growth_psi": {"a": domain.a_psi, "r": domain.r_psi,
                           "m_limit": domain.m_psi_limit},
            "delta_e_value": domain.delta_e_value,
            "delta_e_ok": domain.delta_e_ok,
            "notes": list(domain.notes),
        },
        "values": {
            "pair_norm_coefficients": norms["coefficients"],
            "pair_norm_grid": norms["grid"],
            "action_identity": action_value,
            "action_note": action_note,
            "lowering_defect": lowering_defect(state),
        },
        "spectrum": {
            "source": "file" if file_energies is not None else "formula",
            "file": (None if cfg.spectrum_file is None
                     else os.path.basename(cfg.spectrum_file)),
            "n_terms": cfg.n_terms,
        },
        "k_curve": {"file": os.path.basename(curve_path),
                    "j_max": j_upper, "n_terms": n_curve,
                    "note": curve_note},
        "resolution": {"file": os.path.basename(res_path), "solved": md.solved,
                       "density": md.label, "note": res_note},
        "notes": list(m.notes),
    }
    state_path = os.path.join(cfg.out, "gk-state.json")
    _write_json(state_path, report)
    return [state_path, curve_path, res_path]


def _cmd_bs_classify(cfg: RunConfig) -> list:
    grid = cfg.grid() if cfg.numeric else None
    header = ["r", "phi0_1", "phi0_2", "psi0_1", "psi0_2"]
    if cfg.numeric:
        header.append("numeric_agrees")
    rows = []
    for r in cfg.r_values:
        row_obj = bs_classification(r)
        row = [float(r), *row_obj.flags()]
        if cfg.numeric:
            m = get_model("black-scholes", r=r, v0=float(cfg.bind.get("v0", 1.0)))
            row.append(bs_numeric_flags(m, grid).flags() == row_obj.flags())
        rows.append(row)
    return [_emit_table(cfg, "bs-classification", header, rows)]


def _cmd_models_list(cfg: RunConfig) -> list:
    print(json.dumps(_jsonable(models_list()), indent=2, sort_keys=True))
    return []


# ---------------------------------------------------------------------------
# argument parsing and dispatch

def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON config file; flags win per key")
    shared.add_argument("--model", help="registered model name")
    shared.add_argument("--wA", help="first superpotential expression")
    shared.add_argument("--wB", help="second superpotential expression")
    shared.add_argument("--bind", action="append", metavar="NAME=VALUE",
                        help="parameter binding; repeatable")
    shared.add_argument("--grid-l", type=float, dest="grid_l",
                        help="grid half-width L (default 12)")
    shared.add_argument("--grid-n", type=int, dest="grid_n",
                        help="grid points N (default 4097; env SUSYQ_GRID_N)")
    shared.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="named tolerance override; repeatable")
    shared.add_argument("--out", help="output directory (default susyq-out)")
    shared.add_argument("--format", dest="fmt", choices=("csv", "json"),
                        help="table format (default csv)")

    parser = argparse.ArgumentParser(
        prog="susyq",
        description="superpotential pairs, their verification suites, and "
                    "action-labelled state families",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("potentials", parents=[shared],
                   help="sample the drift and the four potentials")
    p = sub.add_parser("vacua", parents=[shared],
                       help="factor vacua with decay and integrability report")
    p.add_argument("--normalization", choices=("raw", "unit", "paired"),
                   help="vacuum normalization policy (default raw)")
    p = sub.add_parser("verify", parents=[shared],
                       help="run the model's verification suite")
    p.add_argument("--perturb-wb", dest="perturb_wb", metavar="EXPR",
                   help="add EXPR to the second superpotential (negative test)")
    p = sub.add_parser("gk", parents=[shared],
                       help="build a bicoherent state pair and its reports")
    p.add_argument("--j", type=float, help="action label J (default 1)")
    p.add_argument("--gamma", type=float, help="angle label (default 0)")
    p.add_argument("--family", choices=("phi", "psi"),
                   help="which family the state report features (default phi)")
    p.add_argument("--n-terms", type=int, dest="n_terms",
                   help="basis truncation (default 26)")
    p.add_argument("--j-max", type=float, dest="j_max",
                   help="upper end of the K(J) curve (default min(J_min, 10))")
    p.add_argument("--spectrum-file", dest="spectrum_file", metavar="PATH",
                   help="JSON list of eigenvalues replacing the model formula")
    p = sub.add_parser("bs-classify", parents=[shared],
                       help="square-integrability table of the rate family")
    p.add_argument("--r-values", dest="r_values",
                   help="comma-separated rate list")
    p.add_argument("--numeric", action="store_true", default=None,
                   help="re-derive each row from fitted decay exponents")
    sub.add_parser("models-list", parents=[shared],
                   help="print the model registry as JSON")
    return parser


_COMMANDS = {
    "potentials": _cmd_potentials,
    "vacua": _cmd_vacua,
    "gk": _cmd_gk,
    "bs-classify": _cmd_bs_classify,
    "models-list": _cmd_models_list,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args)
        if cfg.command != "models-list":
            os.makedirs(cfg.out, exist_ok=True)
        if cfg.command == "verify":
            paths, passed = _cmd_verify(cfg)
            code = _EXIT_OK if passed else _EXIT_VERIFY_FAILED
        else:
            paths = _COMMANDS[cfg.command](cfg)
            code = _EXIT_OK
        for path in paths:
            print(path)
        return code
    except PoleOnGridError as e:
        print(f"susyq: {e}", file=sys.stderr)
        return _EXIT_POLE
    except GKError as e:
        print(f"susyq: {e}", file=sys.stderr)
        return _EXIT_DOMAIN
    except (ConfigError, ExprError, ModelError) as e:
        print(f"susyq: {e}", file=sys.stderr)
        return _EXIT_CONFIG
    except Exception as e:  # keep exit 1 reserved for verification failures
        print(f"susyq: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return _EXIT_CONFIG
