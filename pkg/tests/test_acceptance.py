"""Acceptance criteria, each run at its stated tolerance.

Every test prints one ``criterion N: PASS|FAIL`` line before asserting, so
the pass/fail table is visible in ``pytest -v`` output even without ``-s``.
"""

import json
import math
import time

import numpy as np
import pytest

from nevlab.brownian import RADIAL_TEST_FUNCTIONS, SimConfig, dynkin_audit, green_integral, simulate_paths
from nevlab.cli import main
from nevlab.green import radial_green_consistency
from nevlab.maps import INF, base_shift, catalog_map
from nevlab.nevanlinna import characteristic_curve, fmt_residual, singular_form_constant, singular_form_T
from nevlab.surface import ModelSurface, solve_jacobi
from nevlab.theorems import calibrate_ldl, ldl_audit, metric_match_audit, smt_curve_audit

from conftest import random_profile

PATHS = 100_000
SIGMA = 3.0


@pytest.fixture
def report(capsys):
    def emit(n: int, passed: bool, detail: str):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if passed else 'FAIL'}  {detail}")
    return emit


def _shifted(psi, targets):
    c = base_shift(psi, targets)
    return psi.shifted(c) if c else psi


# -- 1. Green closed forms ------------------------------------------------------------
def test_green_closed_forms(report):
    t0 = time.perf_counter()
    worst = 0.0
    for surface in (ModelSurface.euclidean(), ModelSurface.poincare()):
        for r in (1.0, 2.0, 3.0):
            worst = max(worst, radial_green_consistency(surface, r, np.linspace(r / 100, r, 100)))
    elapsed = time.perf_counter() - t0
    passed = worst < 1e-6 and elapsed < 1.0
    report(1, passed, f"max |closed - radial| = {worst:.2e}, {elapsed:.2f} s")
    assert worst < 1e-6
    assert elapsed < 1.0


# -- 2. Jacobi bounds ------------------------------------------------------------------
def test_jacobi_bounds(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240601)
    worst = -math.inf
    for _ in range(50):
        sol = solve_jacobi(random_profile(rng), 5.0)
        worst = max(worst, *sol.bound_report(abs_slack=1e-6, rel_slack=0.0).values())
    elapsed = time.perf_counter() - t0
    passed = worst <= 0 and elapsed < 10.0
    report(2, passed, f"worst bound excess = {worst:.2e} (<= 0 required), {elapsed:.2f} s")
    assert worst <= 0
    assert elapsed < 10.0


# -- 3-5. shared Monte Carlo batches ------------------------------------------------------
BATCH_PLAN = {
    ("euclidean_plane", 1.0): ("one", "r2", "lap_abs2"),
    ("euclidean_plane", 2.0): ("one", "r2"),
    ("poincare_disc", 1.0): ("one", "r2"),
    ("poincare_disc", 2.0): ("one", "r2"),
    ("poincare_disc", 3.0): ("one",),
}


@pytest.fixture(scope="module")
def batches():
    out, elapsed = {}, 0.0
    for (name, r), funcs in BATCH_PLAN.items():
        surface = ModelSurface.from_name(name)
        cfg = SimConfig.default(r, paths=PATHS, seed=11)
        t0 = time.perf_counter()
        batch = simulate_paths(surface, cfg, funcs)
        elapsed += time.perf_counter() - t0
        batch.check_reliable()
        out[name, r] = (surface, cfg, batch)
    return out, elapsed


def test_exit_time(batches, report):
    data, elapsed = batches
    lines, ok = [], True
    for (name, r), (surface, cfg, batch) in data.items():
        assert batch.censored_fraction == 0.0
        est = batch.estimate(batch.exit_time)
        if name == "euclidean_plane":
            good = est.within(r * r / 2, SIGMA)
            lines.append(f"E r={r:g}: {est.mean:.5f} vs {r * r / 2:g} (se {est.std_error:.1e})")
        else:
            good = est.mean - SIGMA * est.std_error <= 2 * r * r
            lines.append(f"P r={r:g}: {est.mean:.5f} <= {2 * r * r:g}")
        ok &= good
    passed = ok and elapsed < 300
    report(3, passed, "; ".join(lines) + f"; {elapsed:.0f} s")
    assert ok
    assert elapsed < 300


def test_coarea(batches, report):
    data, _ = batches
    lines, ok = [], True
    for name in ("euclidean_plane", "poincare_disc"):
        for r in (1.0, 2.0):
            surface, cfg, batch = data[name, r]
            for phi in ("one", "r2"):
                est = batch.estimate(batch.accumulator(phi))
                quad = green_integral(surface, r, RADIAL_TEST_FUNCTIONS[phi])
                z = (est.mean - quad) / est.std_error
                ok &= abs(z) <= SIGMA
                lines.append(f"{name[0].upper()} r={r:g} {phi}: z={z:+.2f}")
    eighth = green_integral(ModelSurface.euclidean(), 1.0, RADIAL_TEST_FUNCTIONS["r2"])
    ok_eighth = abs(eighth - 0.125) < 1e-4
    report(4, ok and ok_eighth, "; ".join(lines) + f"; quad[r2, r=1] = {eighth:.8f}")
    assert ok
    assert ok_eighth


def test_dynkin(batches, report):
    data, _ = batches
    surface, cfg, batch = data["euclidean_plane", 1.0]
    lines, ok = [], True
    for u in ("re_z", "abs2", "constant"):
        res = dynkin_audit(surface, cfg, u, batch=batch)
        ok &= res.passed
        lines.append(f"{u}: {res.mc.mean:+.2e} (se {res.mc.std_error:.1e})")
    report(5, ok, "; ".join(lines))
    assert ok


# -- 6. first main theorem ------------------------------------------------------------------
FMT_CASES = [("exp", [0, 1]), ("identity", [0, INF]), ("z2m1", [0, INF])]


def test_first_main_theorem(report):
    plane = ModelSurface.euclidean()
    radii = np.geomspace(2, 30, 40)
    lines, ok = [], True
    for name, targets in FMT_CASES:
        psi = _shifted(catalog_map(name), targets)
        T = characteristic_curve(psi, plane, radii)
        for a in targets:
            res = fmt_residual(psi, a, plane, radii, window=0.5, max_slope=0.05, T=T)
            ok &= res.passed
            lines.append(f"{name}/{'inf' if a is INF else a}: spread {res.spread:.1e} "
                         f"slope {res.slope:+.1e}")
    report(6, ok, "; ".join(lines))
    assert ok


# -- 7. metric match ------------------------------------------------------------------------
def test_metric_match(report):
    lines, ok = [], True
    for name in ("identity", "mobius"):
        res = metric_match_audit(catalog_map(name), [0.3, 0.6, 0.9], tolerance=1e-4)
        ok &= res.passed
        lines.append(f"{name}: max rel dev {res.max_relative_deviation:.1e}")
    report(7, ok, "; ".join(lines))
    assert ok


# -- 8. singular-form bound ------------------------------------------------------------------
def test_singular_form_bound(report):
    plane = ModelSurface.euclidean()
    radii = np.linspace(2, 20, 37)
    lines, ok = [], True
    for name in ("identity", "exp"):
        psi = _shifted(catalog_map(name), [0, INF])
        C = singular_form_constant(psi)
        margin = characteristic_curve(psi, plane, radii) + C - singular_form_T(psi, plane, radii)
        ok &= bool(np.all(margin >= 0))
        lines.append(f"{name}: C={C:.4f}, min margin {margin.min():.3e}")
    report(8, ok, "; ".join(lines))
    assert ok


# -- 9. SMT extremality ----------------------------------------------------------------------
def test_smt_extremality(report):
    t0 = time.perf_counter()
    out = smt_curve_audit(catalog_map("exp"), [0, 1, INF], ModelSurface.euclidean(),
                          np.geomspace(2, 30, 40))
    elapsed = time.perf_counter() - t0
    total = out.extra["defect_sum"]
    ratio = out.extra["extremality_ratio"]
    in_range = 1.9 <= total <= 2.0
    small = abs(ratio) < 0.1
    passed = in_range and small and elapsed < 120
    report(9, passed, f"sum delta = {total!r} (need [1.9, 2.0]); margin/T^ = {ratio:+.2e}; "
                      f"{elapsed:.1f} s")
    assert in_range
    assert small
    assert elapsed < 120


# -- 10. logarithmic derivative lemma -----------------------------------------------------------
LDL_GRIDS = {"euclidean_plane": np.linspace(2, 20, 37), "poincare_disc": np.linspace(0.5, 8, 31)}


def test_ldl_shape(report):
    lines, ok = [], True
    for name, radii in LDL_GRIDS.items():
        surface = ModelSurface.from_name(name)
        consts = calibrate_ldl(surface, radii)
        for map_name in ("exp", "rational3"):
            for k in (1, 2):
                out = ldl_audit(catalog_map(map_name), surface, k, radii, consts, extend=True)
                ok &= out.verdict
                lines.append(f"{name[0].upper()} {map_name} k={k}: exc {out.exceptional_measure:.2g}"
                             f"/{out.extended_measure:.2g}")
    report(10, ok, "; ".join(lines))
    assert ok


# -- 11. determinism -------------------------------------------------------------------------
STOCHASTIC_SUITE = """
surface: {name: poincare_disc}
map: {name: identity}
grid: {min: 2, max: 6, count: 5}
sim: {seed: 2024, paths: 20000}
audits:
  - {name: exit_time, radii: [1]}
  - {name: coarea_audit, radii: [1]}
  - {name: dynkin_audit}
  - {name: exit_distribution_audit}
  - {name: characteristic_mc}
"""


def test_determinism(tmp_path, report, capsys):
    cfg = tmp_path / "suite.yaml"
    cfg.write_text(STOCHASTIC_SUITE)
    first = tmp_path / "first"
    main(["run", "--config", str(cfg), "--out", str(first)])
    manifest = first / "manifest.json"
    second = tmp_path / "second"
    status = main(["verify", "--manifest", str(manifest), "--out", str(second)])
    names = sorted(json.loads(manifest.read_text())["outputs"])
    tables = [n for n in names if n.endswith(".csv")]
    same = [(first / n).read_bytes() == (second / n).read_bytes() for n in names]
    passed = status == 0 and all(same) and len(tables) == 5
    report(11, passed, f"{sum(same)}/{len(names)} outputs byte-identical ({len(tables)} tables)")
    assert len(tables) == 5
    assert all(same)
    assert status == 0
