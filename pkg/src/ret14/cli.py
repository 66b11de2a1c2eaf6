"""Configuration-driven verification suites and coefficient export.

Subcommands:

* ``verify --config cfg.json [--suite name ...] [--out dir]`` runs the
  selected verification suites and writes a deterministic report
  (report.json plus per-suite CSV tables).
* ``export --config cfg.json --out dir`` writes coefficient tables over
  the configured (rho, T) grid.

Exit codes: 0 all selected checks pass, 1 a check failed, 2 configuration
error, 3 runtime/numerical error.  Reports carry the config hash and the
package version but no timestamps, so identical configurations produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .bessel import bessel_ratio_g, bessel_ratio_g_prime
from .classical_limit import (
    classical_coefficients,
    classical_compatibility_residual,
    default_c_sequence,
)
from .closure import (
    GerochLindblomClosure,
    MissingModelError,
    PerturbedClosure,
    ProductionCoefficients,
    TransportCoefficients,
    builtin_closure,
    compatibility_residual,
    heatflux_condition_residuals,
    lmr_symbol_map,
    monatomic_production_closed_form,
    polyatomic_production_closed_form,
    production_coefficients,
)
from .covariant import entropy_production
from .eckart_check import projection_residuals, random_field_points, residual_norms
from .main_field import a_from_b_routes_defect, euler_convexity
from .state_models import (
    JuttnerModel,
    PolyatomicModel,
    ThermalState,
    evaluate,
    model_from_config,
)

ALL_SUITES = ("bessel", "compatibility", "production", "heatflux",
              "projection", "entropy", "main_field", "convexity", "classical")

_DEFAULT_TOLERANCES = {
    "bessel": 1e-10,
    "compatibility": 1e-9,
    "production": 1e-9,
    "heatflux": 1e-9,
    "projection": 1e-8,
    "main_field": 1e-10,
    "convexity": 1e-12,
    "classical": 1e-6,
    "entropy": 1e-12,
}


class ConfigError(Exception):
    """Malformed or inconsistent configuration."""


def _schema():
    with resources.files("ret14").joinpath("config_schema.json").open("rb") as fh:
        return json.load(fh)


def load_config(path) -> dict:
    """Read, schema-validate and default-fill a JSON config."""
    try:
        with open(path, "rb") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(cfg), key=lambda e: e.json_path)
    if errors:
        first = errors[0]
        raise ConfigError(f"config invalid at {first.json_path}: {first.message}")
    return cfg


def _canonical_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


class Problem:
    """Everything the suites need, resolved once from the config."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.model, self.constants = model_from_config(cfg)
        self.model_kind = cfg.get("model", "juttner")

        closure_kind = cfg.get("closure")
        if closure_kind is None:
            closure_kind = {"juttner": "monatomic_juttner"}.get(
                self.model_kind, self.model_kind)
        if closure_kind.startswith("polyatomic") and not isinstance(self.model, PolyatomicModel):
            raise ConfigError(
                f"closure {closure_kind!r} requires a polyatomic model, got {self.model_kind!r}")
        if closure_kind == "monatomic_juttner" and not isinstance(self.model, JuttnerModel):
            raise ConfigError("closure 'monatomic_juttner' requires the juttner model")
        gl = cfg.get("gl_constants", {})
        try:
            self.closure = builtin_closure(
                closure_kind, model=self.model,
                gl_c1=float(gl.get("c1", 0.0)), gl_c2=float(gl.get("c2", 1.0)))
        except MissingModelError as exc:
            raise ConfigError(str(exc)) from exc
        self.closure_kind = closure_kind
        perturb = float(cfg.get("perturb_b", 1.0))
        if perturb != 1.0:
            self.closure = PerturbedClosure(self.closure, perturb)

        tr = cfg.get("transport", {})
        self.transport = TransportCoefficients(
            chi=float(tr.get("chi", 1.0)),
            mu=float(tr.get("mu", 1.0)),
            nu=float(tr.get("nu", 1.0)),
        )

        self.tolerances = dict(_DEFAULT_TOLERANCES)
        self.tolerances.update(cfg.get("tolerances", {}))

        grid = cfg.get("grid", {})
        self.rho_axis = _axis(grid.get("rho", {"min": 1e-3, "max": 1e3, "n": 20}))
        # default T range spans gamma in [0.1, 100] at the configured constants
        t_default = {
            "min": self.constants.m * self.constants.c**2 / (self.constants.k_B * 100.0),
            "max": self.constants.m * self.constants.c**2 / (self.constants.k_B * 0.1),
            "n": 20,
        }
        self.T_axis = _axis(grid.get("T", t_default))

        fp = cfg.get("field_points", {})
        self.fp_count = int(fp.get("count", 100))
        self.fp_seed = int(fp.get("seed", 20210))
        self.fp_amplitude = float(fp.get("amplitude", 0.08))
        self.fp_vmax = float(fp.get("v_max", 0.25))

        cseq = cfg.get("c_sequence", {})
        self.c0 = cseq.get("c0")
        self.c_factors = tuple(cseq.get("factors", (1, 2, 4, 8, 16)))

        self.lmr_symbols = bool(cfg.get("lmr_symbols", False))

    def grid_states(self):
        return [ThermalState(float(r), float(t))
                for r in self.rho_axis for t in self.T_axis]

    def mid_state(self) -> ThermalState:
        return ThermalState(
            float(np.sqrt(self.rho_axis[0] * self.rho_axis[-1])),
            float(np.sqrt(self.T_axis[0] * self.T_axis[-1])),
        )


def _axis(spec: dict) -> np.ndarray:
    lo, hi, n = float(spec["min"]), float(spec["max"]), int(spec["n"])
    if not (lo > 0 and hi > 0 and hi >= lo):
        raise ConfigError(f"axis bounds must be positive with max >= min, got {spec}")
    if spec.get("spacing", "log") == "log":
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def _fd_ratio_derivative(gamma: float) -> float:
    # two Richardson levels on central differences; relative step 1e-3
    h = 1e-3 * gamma
    def central(step):
        return (bessel_ratio_g(gamma + step) - bessel_ratio_g(gamma - step)) / (2.0 * step)
    d1, d2, d4 = central(h), central(h / 2.0), central(h / 4.0)
    r1 = (4.0 * d2 - d1) / 3.0
    r2 = (4.0 * d4 - d2) / 3.0
    return (16.0 * r2 - r1) / 15.0


def _suite_bessel(pb: Problem) -> dict:
    tol = pb.tolerances["bessel"]
    worst = 0.0
    for gamma in np.geomspace(0.1, 1e3, 200):
        g = bessel_ratio_g(float(gamma))
        fd = _fd_ratio_derivative(float(gamma))
        residual = abs(fd + 1.0 + 5.0 * g / gamma - g * g)
        worst = max(worst, residual / (1.0 + abs(fd)))
    return _stat_result(worst <= tol, max_residual=worst, tolerance=tol,
                        points=200)


def _suite_compatibility(pb: Problem) -> dict:
    tol = pb.tolerances["compatibility"]
    rels = []
    for st in pb.grid_states():
        r = compatibility_residual(pb.closure, st, pb.model, pb.constants)
        rels.append(abs(r) / (st.rho * pb.constants.c**2))
    worst = max(rels)
    return _stat_result(worst <= tol, max_residual=worst,
                        median_residual=_median(rels), tolerance=tol,
                        points=len(rels))


def _production_reference(pb: Problem, st: ThermalState) -> ProductionCoefficients | None:
    if pb.closure_kind == "monatomic_juttner":
        return monatomic_production_closed_form(st, pb.transport, pb.constants)
    if pb.closure_kind in ("polyatomic_pr", "polyatomic_acpr"):
        return polyatomic_production_closed_form(pb.closure, st, pb.model,
                                                 pb.transport, pb.constants)
    if pb.closure_kind == "geroch_lindblom":
        gl = pb.closure
        c1, c2 = (gl.c1, gl.c2) if isinstance(gl, GerochLindblomClosure) else (0.0, 1.0)
        chi, mu, nu = pb.transport
        b = c2 * st.T - 4.0 * c1
        return ProductionCoefficients(
            a1=-c2 / chi, a2=-b / mu,
            a3=-(4.0 / (pb.constants.c**2 * nu)) * (c1 + (2.0 / 3.0) * b))
    return None


def _suite_production(pb: Problem) -> dict:
    if isinstance(pb.closure, PerturbedClosure):
        return {"status": "skip", "reason": "no closed form for a perturbed closure"}
    tol = pb.tolerances["production"]
    rels = []
    for st in pb.grid_states():
        generic = production_coefficients(pb.closure, st, pb.model, pb.transport,
                                          pb.constants)
        reference = _production_reference(pb, st)
        if reference is None:
            return {"status": "skip", "reason": "no closed form for this closure"}
        for x, y in ((generic.a1, reference.a1), (generic.a2, reference.a2),
                     (generic.a3, reference.a3)):
            rels.append(abs(x - y) / max(abs(x), abs(y), 1e-300))
    worst = max(rels)
    return _stat_result(worst <= tol, max_residual=worst,
                        median_residual=_median(rels), tolerance=tol,
                        points=len(rels) // 3)


def _suite_heatflux(pb: Problem) -> dict:
    tol = pb.tolerances["heatflux"]
    rels = []
    for st in pb.grid_states():
        r1, r2 = heatflux_condition_residuals(pb.closure, st, pb.model,
                                              pb.transport, pb.constants)
        v = pb.closure.evaluate(st, pb.constants)
        ev = evaluate(pb.model, st, pb.constants)
        chi = pb.transport.chi
        prod = production_coefficients(pb.closure, st, pb.model, pb.transport,
                                       pb.constants)
        scale = max(abs((ev.e + ev.p) * v.b_rho), abs((4 * v.a + v.b) * ev.p_rho),
                    abs(chi * prod.a1 * st.T * ev.p_rho),
                    abs((ev.e + ev.p) * v.b_T), abs((4 * v.a + v.b) * ev.p_T),
                    abs(chi * prod.a1 * (ev.e + ev.p - st.T * ev.p_T)), 1e-300)
        rels.append(max(abs(r1), abs(r2)) / scale)
    worst = max(rels)
    return _stat_result(worst <= tol, max_residual=worst,
                        median_residual=_median(rels), tolerance=tol,
                        points=len(rels))


def _suite_projection(pb: Problem, out_dir: Path | None) -> dict:
    tol = pb.tolerances["projection"]
    points = random_field_points(pb.fp_count, seed=pb.fp_seed,
                                 constants=pb.constants,
                                 amplitude=pb.fp_amplitude, v_max=pb.fp_vmax)
    rows = []
    rels = []
    warned = False
    for t, x, pt in points:
        prod = production_coefficients(pb.closure, pt.state, pb.model,
                                       pb.transport, pb.constants)
        res = projection_residuals(pt, pb.closure, prod, pb.transport,
                                   pb.model, pb.constants)
        nt, nh, ns = residual_norms(res)
        warned = warned or res.compatibility_defect is not None
        rows.append((t, x, nt, nh, ns, res.scale))
        rels.append(max(nt, nh, ns) / res.scale)
    if out_dir is not None:
        _write_csv(out_dir / "projection_residuals.csv",
                   ("t", "x", "r_trace", "r_heat_norm", "r_shear_norm", "scale"),
                   rows)
    worst = max(rels)
    result = _stat_result(worst <= tol, max_residual=worst,
                          median_residual=_median(rels), tolerance=tol,
                          points=len(rels))
    if warned:
        result["compatibility_warning"] = True
    return result


def _suite_entropy(pb: Problem) -> dict:
    tol = pb.tolerances["entropy"]
    points = random_field_points(1000, seed=pb.fp_seed + 1,
                                 constants=pb.constants,
                                 amplitude=pb.fp_amplitude, v_max=pb.fp_vmax)
    ok = True
    min_sigma = math.inf
    for _, _, pt in points:
        sigma, fields, scale = _entropy_sample(pt, pb.transport, pb.constants.c)
        field_norm = max(float(np.max(np.abs(fields.q))) / pb.constants.c,
                         float(np.max(np.abs(fields.t))), abs(fields.pi))
        min_sigma = min(min_sigma, sigma)
        if sigma < -tol * scale:
            ok = False
        # sigma vanishes iff the dissipative fields vanish
        if (sigma <= tol * scale) != (field_norm <= tol * math.sqrt(scale * pt.state.T)):
            ok = False
    return _stat_result(ok, min_sigma=min_sigma, tolerance=tol, points=len(points))


def _entropy_sample(pt, transport, c):
    """(sigma, Eckart fields from the raw gradients, round-off scale)."""
    from .covariant import METRIC, _eckart_fields_from_gradients, lower

    sigma = entropy_production(pt.state.T, pt.U, pt.grad_T, pt.grad_U,
                               transport=tuple(transport), c=c)
    fields = _eckart_fields_from_gradients(pt.state.T, pt.U, pt.grad_T,
                                           pt.grad_U, tuple(transport), c)
    T = pt.state.T
    U_dot = np.asarray(pt.grad_U).T @ pt.U
    w = np.asarray(pt.grad_T) - (T / c**2) * lower(U_dot)
    grad_U_low = np.asarray(pt.grad_U) @ METRIC
    scale = (abs(float(fields.q @ w)) / T**2
             + abs(float(np.einsum("ab,ab->", fields.t, grad_U_low))) / T
             + abs(fields.pi * float(np.trace(pt.grad_U))) / T + 1e-300)
    return sigma, fields, scale


def _suite_main_field(pb: Problem) -> dict:
    tol = pb.tolerances["main_field"]
    rels = []
    for st in pb.grid_states():
        defect = a_from_b_routes_defect(pb.closure, st, pb.model, pb.constants)
        rels.append(defect)
    worst = max(rels)
    return _stat_result(worst <= tol, max_residual=worst,
                        median_residual=_median(rels), tolerance=tol,
                        points=len(rels))


def _suite_convexity(pb: Problem) -> dict:
    verdicts = []
    for st in pb.grid_states():
        rep = euler_convexity(st, pb.model, pb.constants,
                              threshold=pb.tolerances["convexity"])
        verdicts.append(rep.negative_definite)
    ok = all(verdicts)
    return _stat_result(ok, negative_definite_points=sum(verdicts),
                        points=len(verdicts))


def _suite_classical(pb: Problem, out_dir: Path | None) -> dict:
    tol = pb.tolerances["classical"]
    st = pb.mid_state()
    m, k_B = pb.constants.m, pb.constants.k_B
    if pb.c0 is None:
        base = default_c_sequence(st, m=m, k_B=k_B, factors=(1,))[0]
    else:
        base = float(pb.c0)
    c_seq = [base * f for f in pb.c_factors]
    coeffs = classical_coefficients(pb.closure, pb.model, pb.transport, st,
                                    c_seq, m=m, k_B=k_B)
    if out_dir is not None:
        rows = [(r["c"], r["gamma"], r["a_C"], r["b_C"], r["a1_C"], r["a2_C"], r["a3_C"])
                for r in coeffs.diagnostics["rows"]]
        _write_csv(out_dir / "classical_limit.csv",
                   ("c", "gamma", "a_C", "b_C", "a1_C", "a2_C", "a3_C"), rows)
    diag = {
        "converged": coeffs.converged,
        "convergence_rate": _json_float(coeffs.convergence_rate),
        "rates": {k: _json_float(v) for k, v in coeffs.diagnostics["rates"].items()},
        "limits": {"a_C": coeffs.a_C, "b_C": coeffs.b_C, "a1_C": coeffs.a1_C,
                   "a2_C": coeffs.a2_C, "a3_C": coeffs.a3_C},
    }
    if not coeffs.converged:
        return {"status": "skip", "reason": "non-convergent classical limit",
                **diag}
    residual = classical_compatibility_residual(coeffs, pb.closure, pb.model,
                                                st, c_seq, m=m, k_B=k_B)
    p_cl = st.rho * (k_B / m) * st.T
    ok = abs(residual) <= tol * p_cl
    out = _stat_result(ok, residual=residual, tolerance=tol, scale=p_cl)
    out.update(diag)
    return out


def _median(values):
    return float(np.median(np.asarray(values, dtype=float)))


def _json_float(x):
    x = float(x)
    return None if math.isnan(x) else x


def _stat_result(ok: bool, **stats) -> dict:
    out = {"status": "pass" if ok else "fail"}
    for k, v in stats.items():
        if isinstance(v, np.floating):
            v = float(v)
        elif isinstance(v, np.integer):
            v = int(v)
        out[k] = v
    return out


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return v


_SUITE_RUNNERS = {
    "bessel": lambda pb, out: _suite_bessel(pb),
    "compatibility": lambda pb, out: _suite_compatibility(pb),
    "production": lambda pb, out: _suite_production(pb),
    "heatflux": lambda pb, out: _suite_heatflux(pb),
    "projection": _suite_projection,
    "entropy": lambda pb, out: _suite_entropy(pb),
    "main_field": lambda pb, out: _suite_main_field(pb),
    "convexity": lambda pb, out: _suite_convexity(pb),
    "classical": _suite_classical,
}


def run_verify(cfg: dict, out_dir, suites=None):
    """Run the selected suites; returns (report, exit_code)."""
    pb = Problem(cfg)
    selected = list(suites) if suites else list(cfg.get("suites", ALL_SUITES))
    unknown = [s for s in selected if s not in ALL_SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s): {', '.join(unknown)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    n_threads = int(os.environ.get("RET14_THREADS", "1"))
    results = {}
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            futures = {name: pool.submit(_SUITE_RUNNERS[name], pb, out_dir)
                       for name in selected}
            for name in selected:
                results[name] = futures[name].result()
    else:
        for name in selected:
            results[name] = _SUITE_RUNNERS[name](pb, out_dir)

    failed = [n for n, r in results.items() if r["status"] == "fail"]
    report = {
        "config_hash": _canonical_hash(cfg),
        "package_version": __version__,
        "closure": pb.closure.provenance,
        "model": pb.model_kind,
        "field_point_seed": pb.fp_seed,
        "suites": {name: results[name] for name in sorted(results)},
        "failed_suites": sorted(failed),
    }
    with open(out_dir / "report.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report, (1 if failed else 0)


def run_export(cfg: dict, out_dir):
    """Coefficient tables over the configured grid; returns written paths."""
    pb = Problem(cfg)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = ["rho", "T", "a", "b", "a1", "a2", "a3",
              "compatibility_residual", "heatflux_r1", "heatflux_r2"]
    if pb.lmr_symbols:
        header += ["B1_pi", "B3", "B4"]
    rows = []
    for st in pb.grid_states():
        v = pb.closure.evaluate(st, pb.constants)
        prod = production_coefficients(pb.closure, st, pb.model, pb.transport,
                                       pb.constants)
        r = compatibility_residual(pb.closure, st, pb.model, pb.constants)
        r1, r2 = heatflux_condition_residuals(pb.closure, st, pb.model,
                                              pb.transport, pb.constants)
        row = [st.rho, st.T, v.a, v.b, prod.a1, prod.a2, prod.a3, r, r1, r2]
        if pb.lmr_symbols:
            symbols = lmr_symbol_map(prod, pb.constants.c)
            row += [symbols["B1_pi"], symbols["B3"], symbols["B4"]]
        rows.append(row)
    csv_path = out_dir / "coefficients.csv"
    _write_csv(csv_path, header, rows)
    json_path = out_dir / "coefficients.json"
    payload = {
        "config_hash": _canonical_hash(cfg),
        "package_version": __version__,
        "columns": header,
        "rows": [[_fmt(v) for v in row] for row in rows],
    }
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [csv_path, json_path]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ret14",
        description="verify and export 14-field extended-thermodynamics closures")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run verification suites")
    p_verify.add_argument("--config", required=True)
    p_verify.add_argument("--suite", action="append", default=None,
                          help="suite name; may be repeated (default: all)")
    p_verify.add_argument("--out", default=None, help="output directory")

    p_export = sub.add_parser("export", help="export coefficient tables")
    p_export.add_argument("--config", required=True)
    p_export.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        out = args.out or cfg.get("output", {}).get("dir", "ret14_out")
        if args.command == "verify":
            report, code = run_verify(cfg, out, suites=args.suite)
            for name in sorted(report["suites"]):
                status = report["suites"][name]["status"]
                print(f"{name:14s} {status.upper()}")
            print(f"report: {Path(out) / 'report.json'}")
            return code
        paths = run_export(cfg, out)
        for p in paths:
            print(f"wrote {p}")
        return 0
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical/runtime failures
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
