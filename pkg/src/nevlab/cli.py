"""Command-line experiment runner.

``nevlab run --config exp.yaml`` executes the selected audits and writes one
CSV per audit, ``summary.json`` and ``manifest.json`` into the output
directory.  ``nevlab verify`` reruns a manifest and compares output hashes.
``nevlab catalog`` lists maps, surfaces and audits.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import (AUDIT_NAMES, AuditConfig, ExperimentConfig, load_config_file,
                     parse_config)
from .errors import ConfigurationError, InvalidProfileError, NevlabError
from .maps import INF, base_shift, catalog_listing, catalog_map

log = logging.getLogger("nevlab")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
WORKERS_ENV = "NEVLAB_WORKERS"

AUDIT_DOCS = {
    "radial_green_consistency": ("green", "closed-form vs radial-quadrature Green kernel; radii"),
    "atsuji_bound_audit": ("green", "empirical Atsuji constant per ball radius; radii, eta"),
    "exit_time": ("brownian", "Monte Carlo E[tau_r] vs r^2/2 (plane) and the 2r^2 bound; radii"),
    "coarea_audit": ("brownian", "occupation integral vs Green quadrature; radii, phi"),
    "dynkin_audit": ("brownian", "Dynkin residual; radii, u"),
    "exit_distribution_audit": ("brownian", "chi-square of exit angles vs uniform; radii, n_bins"),
    "characteristic_mc": ("nevanlinna", "Monte Carlo vs quadrature characteristic of the map; radii"),
    "fmt_residual": ("nevanlinna", "T - m - N stays in a window without trend; targets"),
    "singular_form_bound": ("nevanlinna", "singular-form characteristic <= T + C_psi"),
    "borel_audit": ("theorems", "Borel growth lemma; function, delta"),
    "calculus_lemma_audit": ("theorems", "Calculus Lemma; function, delta, eta"),
    "ldl_audit": ("theorems", "logarithmic derivative lemma; k, calibration_map, extend"),
    "derivative_growth_audit": ("theorems", "T(psi^(k)) <= 2^k T(psi) + envelope; k"),
    "metric_match_audit": ("theorems", "Poincare vs unit-disc characteristic; r_tilde"),
    "smt_curve_audit": ("theorems", "(q-2) T <= sum N1 + envelope, defects; targets, envelope"),
}
SURFACE_DOCS = {
    "euclidean_plane": "flat plane, g = 1/2, J(r) = r",
    "poincare_disc": "unit disc, g = 2/(1-|z|^2)^2, J(r) = sinh r",
    "radial": "rotationally symmetric surface from a curvature profile (constant value or table)",
}


# -- small helpers ----------------------------------------------------------------
def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(x.real), _jsonable(x.imag)]
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else str(float(x))
    return x


def _table(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _target(t):
    if isinstance(t, str):
        s = t.strip().lower()
        if s in ("inf", "infinity", "oo"):
            return INF
        try:
            return complex(s.replace(" ", ""))
        except ValueError:
            raise ConfigurationError(f"cannot parse target {t!r}", "targets") from None
    return complex(t)


def _map_params(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        try:
            out[k] = complex(v.replace(" ", "")) if isinstance(v, str) else v
        except ValueError:
            raise ConfigurationError(f"cannot parse parameter {v!r}", f"map.params.{k}") from None
    return out


@dataclass
class AuditResult:
    key: str
    name: str
    status: str  # pass | fail | error
    table: str = ""
    summary: dict = field(default_factory=dict)


@dataclass
class Context:
    config: ExperimentConfig
    surface: object
    psi: object
    radii: np.ndarray
    dump_dir: Path | None = None

    @property
    def tol(self):
        return self.config.tolerances

    def sim(self, r: float):
        from .brownian import SimConfig
        s = self.config.sim
        return SimConfig(s.step_factor * r * r, s.paths, int(s.seed), r, s.max_steps)

    def dump(self, key: str, r: float, batch):
        if self.dump_dir is not None:
            self.dump_dir.mkdir(parents=True, exist_ok=True)
            (self.dump_dir / f"{key}_r{r!r}.csv").write_text(batch.records())


def build_surface(cfg: ExperimentConfig):
    from .surface import CurvatureProfile, ModelSurface
    s = cfg.surface
    profile = None
    if s.profile is not None:
        p = s.profile
        try:
            if p.kind == "constant":
                profile = CurvatureProfile.constant(p.value)
            elif p.file is not None:
                profile = CurvatureProfile.from_file(p.file)
            else:
                profile = CurvatureProfile.tabulated(p.radii, p.kappa)
        except (InvalidProfileError, OSError) as exc:
            raise ConfigurationError(str(exc), "surface.profile") from None
    kw = {"r_max": s.r_max} if s.name == "radial" and s.r_max is not None else {}
    return ModelSurface.from_name(s.name, profile, **kw)


# -- audit runners ----------------------------------------------------------------
def _run_radial_green(ctx: Context, a: AuditConfig) -> AuditResult:
    from .green import radial_green_consistency
    radii = a.radii or [1.0, 2.0, 3.0]
    rows = []
    for r in radii:
        grid = r * np.arange(1, 101) / 100
        rows.append((float(r), radial_green_consistency(ctx.surface, r, grid)))
    ok = all(d < ctx.tol.green for _, d in rows)
    return AuditResult(a.key, a.name, "pass" if ok else "fail", _table(["r", "max_deviation"], rows),
                       {"max_deviation": max(d for _, d in rows), "tolerance": ctx.tol.green})


def _run_atsuji(ctx: Context, a: AuditConfig) -> AuditResult:
    from .green import atsuji_envelope
    radii = a.radii or [float(r) for r in ctx.radii if r > a.eta]
    if not radii:
        raise ConfigurationError("no ball radius exceeds eta", f"audits.{a.key}.radii")
    rows = [(float(r), atsuji_envelope(ctx.surface, a.eta, [r])) for r in radii]
    env = min(c for _, c in rows)
    ok = all(math.isfinite(c) and c > 0 for _, c in rows)
    return AuditResult(a.key, a.name, "pass" if ok else "fail", _table(["r", "C_star"], rows),
                       {"envelope": env, "eta": a.eta})


def _run_exit_time(ctx: Context, a: AuditConfig) -> AuditResult:
    from .brownian import simulate_paths
    k = ctx.tol.sigma
    rows, ok = [], True
    for r in a.radii or [1.0]:
        batch = simulate_paths(ctx.surface, ctx.sim(r))
        ctx.dump(a.key, r, batch)
        batch.check_reliable()
        est = batch.estimate(batch.exit_time)
        ref = r * r / 2 if ctx.surface.name == "euclidean_plane" else math.nan
        passed = est.mean - k * est.std_error <= 2 * r * r
        if math.isfinite(ref):
            passed = passed and est.within(ref, k)
        ok &= passed
        rows.append((float(r), est.mean, est.std_error, est.n, batch.censored_fraction, 2.0 * r * r, ref,
                     "pass" if passed else "fail"))
    head = ["r", "mean", "std_error", "n", "censored_fraction", "bound", "reference", "status"]
    return AuditResult(a.key, a.name, "pass" if ok else "fail", _table(head, rows), {"sigma": k})


def _run_coarea(ctx: Context, a: AuditConfig) -> AuditResult:
    from .brownian import RADIAL_TEST_FUNCTIONS, green_integral, simulate_paths
    phis = a.phi or ["one", "r2"]
    rows, ok = [], True
    for r in a.radii or [1.0, 2.0]:
        batch = simulate_paths(ctx.surface, ctx.sim(r), tuple(phis))
        ctx.dump(a.key, r, batch)
        batch.check_reliable()
        for phi in phis:
            est = batch.estimate(batch.accumulator(phi))
            quad = green_integral(ctx.surface, r, RADIAL_TEST_FUNCTIONS[phi])
            passed = est.within(quad, ctx.tol.sigma)
            ok &= passed
            z = (est.mean - quad) / est.std_error if est.std_error > 0 else 0.0
            rows.append((float(r), phi, est.mean, est.std_error, quad, z, "pass" if passed else "fail"))
    head = ["r", "phi", "mc_mean", "std_error", "quadrature", "z", "status"]
    return AuditResult(a.key, a.name, "pass" if ok else "fail", _table(head, rows), {})


def _run_dynkin(ctx: Context, a: AuditConfig) -> AuditResult:
    from .brownian import dynkin_audit, simulate_paths
    us = a.u or ["re_z", "abs2", "constant"]
    rows, ok = [], True
    for r in a.radii or [1.0]:
        cfg = ctx.sim(r)
        batch = simulate_paths(ctx.surface, cfg, ("lap_abs2",))
        ctx.dump(a.key, r, batch)
        for u in us:
            res = dynkin_audit(ctx.surface, cfg, u, batch=batch)
            passed = res.mc.within(0.0, ctx.tol.sigma) if res.mc.std_error > 0 else res.passed
            ok &= passed
            rows.append((float(r), u, res.mc.mean, res.mc.std_error, "pass" if passed else "fail"))
    return AuditResult(a.key, a.name, "pass" if ok else "fail",
                       _table(["r", "u", "residual", "std_error", "status"], rows), {})


def _run_exit_distribution(ctx: Context, a: AuditConfig) -> AuditResult:
    from .brownian import exit_distribution_audit, simulate_paths
    rows, ok = [], True
    for r in a.radii or [1.0]:
        cfg = ctx.sim(r)
        batch = simulate_paths(ctx.surface, cfg)
        ctx.dump(a.key, r, batch)
        res = exit_distribution_audit(ctx.surface, cfg, a.n_bins, ctx.tol.chi_alpha, batch=batch)
        ok &= res.passed
        rows.append((float(r), res.statistic, res.dof, res.p_value, "pass" if res.passed else "fail"))
    return AuditResult(a.key, a.name, "pass" if ok else "fail",
                       _table(["r", "chi2", "dof", "p_value", "status"], rows), {"alpha": ctx.tol.chi_alpha})


def _run_characteristic_mc(ctx: Context, a: AuditConfig) -> AuditResult:
    from .nevanlinna import characteristic_mc, characteristic_T
    rows, ok = [], True
    for r in a.radii or [1.0]:
        est = characteristic_mc(ctx.psi, ctx.surface, ctx.sim(r))
        quad = characteristic_T(ctx.psi, ctx.surface, r)
        passed = est.within(quad, ctx.tol.sigma)
        ok &= passed
        rows.append((float(r), est.mean, est.std_error, quad, "pass" if passed else "fail"))
    return AuditResult(a.key, a.name, "pass" if ok else "fail",
                       _table(["r", "mc_mean", "std_error", "quadrature", "status"], rows),
                       {"map": ctx.psi.name})


def _shifted(psi, targets):
    c = base_shift(psi, targets)
    return psi.shifted(c) if c else psi


def _run_fmt(ctx: Context, a: AuditConfig) -> AuditResult:
    from .nevanlinna import characteristic_curve, fmt_residual
    targets = [_target(t) for t in (a.targets or ["0", "inf"])]
    psi = _shifted(ctx.psi, targets)
    T = characteristic_curve(psi, ctx.surface, ctx.radii)
    rows, info, ok = [], {}, True
    for t in targets:
        res = fmt_residual(psi, t, ctx.surface, ctx.radii, ctx.tol.fmt_window, ctx.tol.fmt_slope, T=T)
        ok &= res.passed
        label = "inf" if t is INF else repr(t)
        info[label] = {"spread": res.spread, "slope": res.slope, "passed": res.passed}
        for i, r in enumerate(ctx.radii):
            rows.append((float(r), label, res.T[i], res.m[i], res.N[i], res.residual[i]))
    return AuditResult(a.key, a.name, "pass" if ok else "fail",
                       _table(["r", "target", "T_hat", "m_hat", "N", "residual"], rows),
                       {"targets": info, "shift": complex(psi.shift)})


def _run_singular(ctx: Context, a: AuditConfig) -> AuditResult:
    from .nevanlinna import characteristic_curve, singular_form_constant, singular_form_T
    from .theorems import AuditOutcome
    psi = _shifted(ctx.psi, [0, INF])
    C = singular_form_constant(psi)
    tphi = singular_form_T(psi, ctx.surface, ctx.radii)
    T = characteristic_curve(psi, ctx.surface, ctx.radii)
    out = AuditOutcome(f"singular_form[{psi.name}]", ctx.radii, tphi, T + C,
                       0.0 if a.budget is None else a.budget, extra={"T_hat": T, "C": C})
    return _from_outcome(a, out, {"shift": complex(psi.shift)})


BOREL_FUNCTIONS = {
    "exp": np.exp,
    "identity": lambda r: np.asarray(r, dtype=float),
    "constant": lambda r: np.full_like(np.asarray(r, dtype=float), math.e),
}


def _run_borel(ctx: Context, a: AuditConfig) -> AuditResult:
    from .nevanlinna import characteristic_curve
    from .theorems import AuditOutcome, borel_audit, doubled_grid
    name = a.function or "characteristic"
    if name == "characteristic":
        sample = lambda grid: characteristic_curve(ctx.psi, ctx.surface, grid)
    elif name in BOREL_FUNCTIONS:
        sample = BOREL_FUNCTIONS[name]
    else:
        raise ConfigurationError(f"Borel audit takes one of {sorted(BOREL_FUNCTIONS) + ['characteristic']}",
                                 f"audits.{a.key}.function")
    out = borel_audit(ctx.radii, sample(ctx.radii), a.delta, math.inf if a.budget is None else a.budget)
    if a.extend is not False:
        ext = doubled_grid(ctx.radii)
        measure = borel_audit(ext, sample(ext), a.delta).exceptional_measure
        out = AuditOutcome(out.name, out.radii, out.lhs, out.rhs, out.budget, measure)
    return _from_outcome(a, out, {"function": name})


def _run_calculus(ctx: Context, a: AuditConfig) -> AuditResult:
    from .theorems import calculus_lemma_audit
    out = calculus_lemma_audit(a.function or "one", ctx.surface, ctx.radii, a.delta, a.eta,
                               budget=math.inf if a.budget is None else a.budget, extend=bool(a.extend))
    return _from_outcome(a, out, {})


def _run_ldl(ctx: Context, a: AuditConfig) -> AuditResult:
    from .theorems import calibrate_ldl, ldl_audit
    calib = catalog_map(a.calibration_map)
    orders = a.k or [1, 2]
    consts = calibrate_ldl(ctx.surface, ctx.radii, orders, calib)
    tables, info, ok = [], {}, True
    for k in orders:
        out = ldl_audit(ctx.psi, ctx.surface, k, ctx.radii, consts,
                        math.inf if a.budget is None else a.budget, a.extend is not False)
        ok &= out.verdict
        info[f"k={k}"] = out.summary()
        tables.append(_prefix_rows(out.to_csv(), "k", k, first=not tables))
    summary = {"constants": {"c1": consts.c1, "c2": consts.c2, "c3": consts.c3, "c4": consts.c4,
                             "calibrated_on": consts.calibrated_on}, "orders": info}
    return AuditResult(a.key, a.name, "pass" if ok else "fail", "".join(tables), summary)


def _run_derivative_growth(ctx: Context, a: AuditConfig) -> AuditResult:
    from .theorems import derivative_growth_audit
    tables, info, ok = [], {}, True
    for k in a.k or [1, 2]:
        out = derivative_growth_audit(ctx.psi, k, ctx.radii, ctx.surface,
                                      budget=math.inf if a.budget is None else a.budget,
                                      extend=bool(a.extend))
        ok &= out.verdict
        info[f"k={k}"] = out.summary()
        tables.append(_prefix_rows(out.to_csv(), "k", k, first=not tables))
    return AuditResult(a.key, a.name, "pass" if ok else "fail", "".join(tables), {"orders": info})


def _run_metric_match(ctx: Context, a: AuditConfig) -> AuditResult:
    from .theorems import metric_match_audit
    res = metric_match_audit(ctx.psi, a.r_tilde or [0.3, 0.6, 0.9], ctx.tol.metric_match)
    rows = list(zip(res.r_tilde, res.hyperbolic_radius, res.T_poincare, res.T_disc, res.relative_deviation))
    return AuditResult(a.key, a.name, "pass" if res.passed else "fail",
                       _table(["r_tilde", "r", "T_poincare", "T_disc", "relative_deviation"], rows),
                       {"max_relative_deviation": res.max_relative_deviation, "tolerance": res.tolerance})


def _run_smt(ctx: Context, a: AuditConfig) -> AuditResult:
    from .theorems import smt_curve_audit
    targets = [_target(t) for t in (a.targets or ["0", "1", "inf"])]
    out = smt_curve_audit(ctx.psi, targets, ctx.surface, ctx.radii, a.envelope, ctx.tol.smt_slack,
                          math.inf if a.budget is None else a.budget, bool(a.extend))
    res = _from_outcome(a, out, {})
    if not out.extra["defect_bound_ok"]:
        res.status = "fail"
    return res


def _prefix_rows(text: str, col: str, value, first: bool) -> str:
    lines = text.splitlines()
    head = [f"{col},{lines[0]}"] if first else []
    return "\n".join(head + [f"{value},{ln}" for ln in lines[1:]]) + "\n"


def _from_outcome(a: AuditConfig, out, extra: dict) -> AuditResult:
    return AuditResult(a.key, a.name, "pass" if out.verdict else "fail", out.to_csv(),
                       {**out.summary(), **extra})


RUNNERS = {
    "radial_green_consistency": _run_radial_green,
    "atsuji_bound_audit": _run_atsuji,
    "exit_time": _run_exit_time,
    "coarea_audit": _run_coarea,
    "dynkin_audit": _run_dynkin,
    "exit_distribution_audit": _run_exit_distribution,
    "characteristic_mc": _run_characteristic_mc,
    "fmt_residual": _run_fmt,
    "singular_form_bound": _run_singular,
    "borel_audit": _run_borel,
    "calculus_lemma_audit": _run_calculus,
    "ldl_audit": _run_ldl,
    "derivative_growth_audit": _run_derivative_growth,
    "metric_match_audit": _run_metric_match,
    "smt_curve_audit": _run_smt,
}
assert set(RUNNERS) == set(AUDIT_NAMES) == set(AUDIT_DOCS)


# -- orchestration -----------------------------------------------------------------
def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def versions() -> dict:
    import numba
    import scipy
    return {"nevlab": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "numba": numba.__version__}


def run_experiment(config: ExperimentConfig, out_dir: Path | None = None,
                   dump_paths: bool = False) -> tuple[int, dict]:
    """Execute every audit of ``config``; returns (exit status, summary)."""
    out = Path(out_dir if out_dir is not None else config.output)
    out.mkdir(parents=True, exist_ok=True)
    surface = build_surface(config)
    psi = catalog_map(config.map.name, **_map_params(config.map.params))
    ctx = Context(config, surface, psi, config.grid.radii(), out / "paths" if dump_paths else None)
    results = []
    for a in config.audits:
        log.info("running %s", a.key)
        try:
            res = RUNNERS[a.name](ctx, a)
        except ConfigurationError:
            raise
        except NevlabError as exc:
            res = AuditResult(a.key, a.name, "error", summary={"error": f"{type(exc).__name__}: {exc}"})
        log.info("%s: %s", a.key, res.status)
        if res.table:
            (out / f"{a.key}.csv").write_text(res.table)
        results.append(res)
    overall = "pass" if all(r.status == "pass" for r in results) else "fail"
    summary = {"overall": overall, "map": psi.name, "surface": surface.name,
               "audits": {r.key: {"audit": r.name, "status": r.status, **r.summary} for r in results}}
    (out / "summary.json").write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    tables = sorted(p.name for p in out.glob("*.csv"))
    manifest = {"config": config.canonical(), "config_sha256": config.digest(), "seed": config.sim.seed,
                "versions": versions(), "outputs": {n: _sha256(out / n) for n in tables + ["summary.json"]}}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return (EXIT_PASS if overall == "pass" else EXIT_FAIL), summary


def _configure(args) -> None:
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    workers = args.workers
    if workers is None and os.environ.get(WORKERS_ENV):
        try:
            workers = int(os.environ[WORKERS_ENV])
        except ValueError:
            raise ConfigurationError(f"not an integer: {os.environ[WORKERS_ENV]!r}", WORKERS_ENV) from None
    if workers is not None:
        from .brownian import set_workers
        set_workers(workers)


def _print_status(summary: dict) -> None:
    for key, rec in summary["audits"].items():
        print(f"{rec['status']:5s} {key}")
    print(f"overall: {summary['overall']}")


def cmd_run(args) -> int:
    _configure(args)
    config = load_config_file(args.config).with_overrides(args.seed, args.out)
    status, summary = run_experiment(config, Path(config.output), args.dump_paths)
    _print_status(summary)
    return status


def cmd_verify(args) -> int:
    _configure(args)
    try:
        manifest = json.loads(Path(args.manifest).read_text())
        config = parse_config(manifest["config"])
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigurationError(f"unreadable manifest: {exc}", "--manifest") from None
    out = Path(args.out) if args.out else Path(args.manifest).parent / "verify"
    run_experiment(config, out)
    fresh = json.loads((out / "manifest.json").read_text())["outputs"]
    bad = sorted(n for n in manifest["outputs"] if fresh.get(n) != manifest["outputs"][n])
    for n in sorted(manifest["outputs"]):
        print(f"{'differs' if n in bad else 'same':7s} {n}")
    return EXIT_FAIL if bad else EXIT_PASS


def list_catalog() -> dict:
    return {"maps": catalog_listing(),
            "surfaces": sorted(SURFACE_DOCS.items()),
            "audits": sorted((k, f"[{m}] {d}") for k, (m, d) in AUDIT_DOCS.items())}


def cmd_catalog(args) -> int:
    for section, items in list_catalog().items():
        print(f"{section}:")
        for name, doc in items:
            print(f"  {name:26s} {doc}")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nevlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"nevlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--workers", type=int, help=f"worker threads (default from ${WORKERS_ENV})")
        sp.add_argument("-v", "--verbose", action="count", default=0)

    run = sub.add_parser("run", help="run the audits of a configuration file")
    run.add_argument("--config", required=True, help="YAML experiment configuration")
    run.add_argument("--out", help="output directory (overrides 'output')")
    run.add_argument("--seed", type=int, help="base seed (overrides sim.seed)")
    run.add_argument("--dump-paths", action="store_true", help="write per-path records of stochastic audits")
    common(run)
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="rerun a manifest and compare output hashes")
    ver.add_argument("--manifest", required=True)
    ver.add_argument("--out", help="directory for the rerun (default <manifest dir>/verify)")
    common(ver)
    ver.set_defaults(func=cmd_verify)

    cat = sub.add_parser("catalog", help="list built-in maps, surfaces and audits")
    cat.set_defaults(func=cmd_catalog)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
