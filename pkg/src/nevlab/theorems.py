"""Numerical audits of growth lemmas and main theorems.

Each audit samples a left side and a right side on a radius grid.  An
inequality "outside a set of finite measure" is checked by recording the grid
cells where it fails and requiring that their total length stops growing
when the grid is extended to twice its largest radius.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .brownian import RADIAL_TEST_FUNCTIONS, green_integral
from .errors import ConfigurationError, DegenerateInputError, DomainError, MonotonicityError
from .green import GreenKernel, atsuji_envelope, harmonic_expectation
from .maps import INF, MeromorphicMap, base_shift, catalog_map, chordal_distance, is_infinite
from .nevanlinna import (characteristic_curve, counting_curve, log_plus_mean, proximity_curve,
                         spherical_density)
from .quadrature import angular_integrals
from .surface import ModelSurface, radius_correspondence

METRIC_MATCH_MAX_RADIUS = 0.999


def log_plus(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > 1, np.log(np.where(x > 1, x, 1.0)), 0.0)[()]


def grid_cells(radii) -> np.ndarray:
    """Midpoint cells ``[(a_i, b_i)]`` owned by each grid radius."""
    r = np.asarray(radii, dtype=float)
    if r.size == 1:
        return np.array([[r[0], r[0]]])
    mid = 0.5 * (r[1:] + r[:-1])
    return np.stack([np.concatenate([[r[0]], mid]), np.concatenate([mid, [r[-1]]])], axis=1)


def doubled_grid(radii) -> np.ndarray:
    """Extend a linear or geometric grid to twice its largest radius, same spacing."""
    r = np.asarray(radii, dtype=float)
    if r.size < 2:
        raise ConfigurationError("need at least two radii to extend a grid", "radii")
    ratios = r[1:] / r[:-1]
    if r[0] > 0 and np.allclose(ratios, ratios[0], rtol=1e-9) and not np.allclose(np.diff(r), r[1] - r[0]):
        n = int(round(math.log(2 * r[-1] / r[0]) / math.log(ratios[0])))
        return r[0] * ratios[0] ** np.arange(n + 1)
    h = r[1] - r[0]
    n = int(round((2 * r[-1] - r[0]) / h))
    return r[0] + h * np.arange(n + 1)


@dataclass(frozen=True, eq=False)
class AuditOutcome:
    name: str
    radii: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    budget: float = math.inf
    extended_measure: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def margin(self) -> np.ndarray:
        return self.rhs - self.lhs

    @property
    def exceptional_intervals(self) -> list[tuple[float, float]]:
        cells = grid_cells(self.radii)
        bad = ~(self.margin >= 0)
        out = []
        for (a, b), flag in zip(cells, bad):
            if not flag:
                continue
            if out and abs(out[-1][1] - a) <= 1e-12 * max(1.0, abs(a)):
                out[-1] = (out[-1][0], b)
            else:
                out.append((a, b))
        return [(float(a), float(b)) for a, b in out]

    @property
    def exceptional_measure(self) -> float:
        return float(sum(b - a for a, b in self.exceptional_intervals))

    @property
    def cell_width(self) -> float:
        return float(np.max(np.diff(self.radii))) if self.radii.size > 1 else 0.0

    @property
    def stable(self) -> bool | None:
        """Whether the exceptional measure stopped growing on the extended grid."""
        if self.extended_measure is None:
            return None
        return self.extended_measure <= self.exceptional_measure + self.cell_width + 1e-12

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.lhs)) and np.all(np.isfinite(self.rhs)))

    @property
    def verdict(self) -> bool:
        return self.finite and self.exceptional_measure <= self.budget and self.stable is not False

    def summary(self) -> dict:
        return {"name": self.name, "verdict": "pass" if self.verdict else "fail",
                "exceptional_measure": self.exceptional_measure,
                "exceptional_intervals": self.exceptional_intervals,
                "extended_measure": self.extended_measure,
                "min_margin": float(np.min(self.margin)) if self.radii.size else math.nan,
                **{k: v for k, v in self.extra.items() if np.isscalar(v) or isinstance(v, (list, dict))}}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        curves = {k: v for k, v in self.extra.items()
                  if isinstance(v, np.ndarray) and v.shape == self.radii.shape}
        w.writerow(["r", "lhs", "rhs", "margin"] + list(curves))
        for i in range(self.radii.size):
            row = [self.radii[i], self.lhs[i], self.rhs[i], self.margin[i]]
            row += [curves[k][i] for k in curves]
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def _with_extension(build, radii, extend: bool) -> AuditOutcome:
    """Run ``build(grid)`` on ``radii`` and, if asked, on the doubled grid."""
    base = build(np.asarray(radii, dtype=float))
    if not extend:
        return base
    ext = build(doubled_grid(radii))
    return AuditOutcome(base.name, base.radii, base.lhs, base.rhs, base.budget,
                        ext.exceptional_measure, {**base.extra, "extended_grid_max": float(ext.radii[-1])})


# -- Borel -------------------------------------------------------------------
def borel_audit(radii, u, delta: float = 1.0, budget: float = math.inf) -> AuditOutcome:
    """``u'(r) <= u(r) (log+ u(r))^(1+delta)`` with ``u'`` by finite differences."""
    r = np.asarray(radii, dtype=float)
    u = np.asarray(u, dtype=float)
    if r.shape != u.shape or r.size < 3:
        raise ConfigurationError("need at least three samples of u on the grid", "u")
    if np.any(np.diff(u) < 0):
        raise MonotonicityError("u must be nondecreasing")
    du = np.gradient(u, r, edge_order=2)
    rhs = u * log_plus(u) ** (1 + delta)
    return AuditOutcome(f"borel[delta={delta}]", r, du, rhs, budget)


# -- Calculus Lemma ------------------------------------------------------------
CALCULUS_TEST_FUNCTIONS = {**RADIAL_TEST_FUNCTIONS, "zero": lambda t: np.zeros_like(t)}


def calculus_factor(k_hat, r, kappa, delta):
    """``F(k^, kappa, delta)`` of the Calculus Lemma."""
    lk = log_plus(k_hat)
    growth = r * math.exp(r * math.sqrt(-kappa))
    return (lk * log_plus(growth * k_hat * lk ** (1 + delta))) ** (1 + delta)


def calculus_lemma_audit(k, surface: ModelSurface, radii, delta: float = 1.0, eta: float = 1.0,
                         C: float | None = None, budget: float = math.inf,
                         extend: bool = False) -> AuditOutcome:
    """``E[k(X_tau)] <= F e^{r sqrt(-kappa)} log r / (2 pi C) E[int k dt]`` on ``r > 1``.

    ``k`` names a radial test function; ``C`` defaults to the Atsuji envelope
    over the grid radii beyond ``eta``.
    """
    if isinstance(k, str):
        if k not in CALCULUS_TEST_FUNCTIONS:
            raise ConfigurationError(f"unknown test function {k!r}", "k")
        name, kf = k, CALCULUS_TEST_FUNCTIONS[k]
    else:
        name, kf = getattr(k, "__name__", "k"), k
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 1):
        raise ConfigurationError("the Calculus Lemma grid must lie in r > 1", "radii")
    if C is None:
        C = atsuji_envelope(surface, eta, radii[radii > eta] if np.any(radii > eta) else radii)

    def build(grid):
        lhs, rhs, occ, ratio = [], [], [], []
        for r in grid:
            rho = float(surface.conformal_radius(r))
            lhs.append(harmonic_expectation(surface, r, lambda th: float(kf(np.asarray(r)))))
            e = green_integral(surface, r, kf)
            kap = float(surface.kappa(r))
            k_hat = math.log(r) / C * e
            F = calculus_factor(k_hat, r, kap, delta)
            rhs.append(F * math.exp(r * math.sqrt(-kap)) * math.log(r) / (2 * math.pi * C) * e)
            occ.append(e)
            denom = log_plus(log_plus(e)) + log_plus(r * math.sqrt(-kap)) + log_plus(math.log(r))
            ratio.append(float(log_plus(F)) / denom if denom > 0 else math.nan)
            del rho
        return AuditOutcome(f"calculus_lemma[{name}]", grid, np.array(lhs), np.array(rhs), budget,
                            extra={"occupation": np.array(occ), "logF_ratio": np.array(ratio),
                                   "C": float(C), "delta": float(delta)})

    return _with_extension(build, radii, extend)


# -- LDL ------------------------------------------------------------------------
@dataclass(frozen=True)
class LDLConstants:
    """Frozen envelope constants ``c1..c4`` of the LDL error term."""
    c1: float
    c2: float
    c3: float
    c4: float
    surface: str = ""
    calibrated_on: str = ""

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3, self.c4])


def _curvature_term(surface: ModelSurface, r):
    r = np.asarray(r, dtype=float)
    if surface.name == "poincare_disc":
        return r
    return -np.asarray(surface.kappa(r), dtype=float) * r * r


def _ldl_features(T, surface, r):
    return np.stack([log_plus(np.log(np.maximum(T, 1e-300))), _curvature_term(surface, r),
                     log_plus(np.log(r)), np.ones_like(r)], axis=1)


def _ldl_sides(psi: MeromorphicMap, surface: ModelSurface, k: int, radii):
    if psi.is_constant:
        raise DegenerateInputError("the LDL needs a nonconstant map")
    radii = np.asarray(radii, dtype=float)
    h = psi.log_derivative_ratio(k)
    lhs = np.array([log_plus_mean(h, surface, r) for r in radii])
    T = characteristic_curve(psi, surface, radii)
    return lhs, T


def calibrate_ldl(surface: ModelSurface, radii, orders=(1, 2), psi: MeromorphicMap | None = None
                  ) -> LDLConstants:
    """Smallest nonnegative ``c1..c4`` keeping the calibration map's margin nonnegative.

    Solves ``min sum_rows c . features`` subject to ``c . features >= lhs - (5k/4) log T``
    over all grid radii and derivative orders (a linear program).
    """
    psi = catalog_map("z2m1") if psi is None else psi
    radii = np.asarray(radii, dtype=float)
    A, b = [], []
    for k in orders:
        lhs, T = _ldl_sides(psi, surface, k, radii)
        feats = _ldl_features(T, surface, radii)
        A.append(feats)
        b.append(lhs - 1.25 * k * np.log(T))
    A, b = np.vstack(A), np.concatenate(b)
    cost = A.sum(axis=0) + 1e-9
    res = optimize.linprog(cost, A_ub=-A, b_ub=-b, bounds=[(0, None)] * 4, method="highs")
    if not res.success:
        raise ConfigurationError(f"LDL calibration failed: {res.message}", "ldl.calibration")
    c = np.maximum(res.x, 0.0)
    return LDLConstants(*map(float, c), surface=surface.name, calibrated_on=psi.name)


def ldl_audit(psi: MeromorphicMap, surface: ModelSurface, k: int, radii, constants: LDLConstants,
              budget: float = math.inf, extend: bool = True) -> AuditOutcome:
    """``m(r, psi^(k)/psi) <= (5k/4) log T + c1 log+ log T + c2 E(r) + c3 log+ log r + c4``.

    ``E(r)`` is ``r`` on the Poincare disc and ``-kappa(r) r^2`` otherwise.
    """
    if k < 1:
        raise ConfigurationError("derivative order must be at least 1", "k")

    def build(grid):
        lhs, T = _ldl_sides(psi, surface, k, grid)
        rhs = 1.25 * k * np.log(T) + _ldl_features(T, surface, grid) @ constants.as_array()
        return AuditOutcome(f"ldl[{psi.name},k={k},{surface.name}]", grid, lhs, rhs, budget,
                            extra={"T": T, **{f"c{i + 1}": float(v)
                                              for i, v in enumerate(constants.as_array())}})

    return _with_extension(build, radii, extend)


# -- derivative growth ---------------------------------------------------------
def derivative_growth_audit(psi: MeromorphicMap, k: int, radii, surface: ModelSurface | None = None,
                            envelope=(1.0, 1.0, 1.0, 1.0), budget: float = math.inf,
                            extend: bool = False) -> AuditOutcome:
    """``T(r, psi^(k)) <= 2^k T(r, psi) + e1 log+ T - e2 kappa r^2 + e3 log+ log r + e4``."""
    surface = ModelSurface.euclidean() if surface is None else surface
    if psi.is_constant:
        raise DegenerateInputError("derivative growth needs a nonconstant map")
    e = np.asarray(envelope, dtype=float)

    def build(grid):
        T = characteristic_curve(psi, surface, grid)
        Tk = characteristic_curve(psi.derivative(k), surface, grid)
        env = (e[0] * log_plus(T) - e[1] * np.asarray(surface.kappa(grid)) * grid ** 2
               + e[2] * log_plus(np.log(grid)) + e[3])
        return AuditOutcome(f"derivative_growth[{psi.name},k={k}]", grid, Tk, 2**k * T + env,
                            budget, extra={"T": T, "T_derivative": Tk})

    return _with_extension(build, np.asarray(radii, dtype=float), extend)


# -- metric match ------------------------------------------------------------------
@dataclass(frozen=True)
class MetricMatchResult:
    r_tilde: np.ndarray
    hyperbolic_radius: np.ndarray
    T_poincare: np.ndarray
    T_disc: np.ndarray
    tolerance: float

    @property
    def deviation(self) -> np.ndarray:
        return np.abs(self.T_poincare - self.T_disc)

    @property
    def relative_deviation(self) -> np.ndarray:
        return self.deviation / np.maximum(1.0, np.abs(self.T_disc))

    @property
    def max_relative_deviation(self) -> float:
        return float(np.max(self.relative_deviation)) if self.r_tilde.size else 0.0

    @property
    def passed(self) -> bool:
        return bool(self.max_relative_deviation < self.tolerance)


def _poincare_route(psi, r):
    """Hyperbolic Green kernel in geodesic polar coordinates, volume ``sinh t dt dtheta``."""
    dens = spherical_density(psi)
    kernel = GreenKernel.for_surface(ModelSurface.poincare(), r)

    def ang(t):
        rho = math.tanh(0.5 * t)
        # density per unit coordinate area -> per unit hyperbolic area (dV = 2g dA)
        per_vol = lambda z: dens(z) * (1 - np.abs(z) ** 2) ** 2 / 4
        return float(angular_integrals(per_vol, [rho])[0])

    f = lambda t: float(kernel.at_radius(t)) * math.sinh(t) * ang(t)
    val, err = integrate.quad(f, 0.0, r, epsabs=1e-12, epsrel=1e-11, limit=400)
    return val


def _euclidean_disc_route(psi, r_tilde):
    """Classical ``int_0^r~ (dt/t) int_{|z|<t} psi^* omega`` by nested quadrature."""
    dens = spherical_density(psi)
    ang = lambda s: float(angular_integrals(dens, [s])[0])
    area = lambda t: integrate.quad(lambda s: s * ang(s), 0.0, t, epsabs=1e-13, epsrel=1e-11,
                                    limit=200)[0] / math.pi
    val, err = integrate.quad(lambda t: area(t) / t, 0.0, r_tilde, epsabs=1e-12, epsrel=1e-10,
                              limit=200)
    return val


def metric_match_audit(psi: MeromorphicMap, r_tilde_grid, tolerance: float = 1e-4) -> MetricMatchResult:
    """Characteristic on the Poincare disc at ``r = log((1+r~)/(1-r~))`` vs the unit-disc one at ``r~``."""
    rt = np.asarray(r_tilde_grid, dtype=float)
    if np.any(rt >= METRIC_MATCH_MAX_RADIUS):
        raise DomainError(f"r~ must stay below {METRIC_MATCH_MAX_RADIUS}")
    r = np.atleast_1d(radius_correspondence(rt))
    tp = np.array([_poincare_route(psi, x) for x in r])
    te = np.array([_euclidean_disc_route(psi, x) for x in rt])
    return MetricMatchResult(rt, r, tp, te, tolerance)


# -- second main theorem ----------------------------------------------------------
def _defects(ratio, radii):
    last = radii >= radii[-1] / 10
    return float(np.clip(np.min(ratio[last]), 0, 1)), float(ratio[-1])


def smt_curve_audit(psi: MeromorphicMap, targets, surface: ModelSurface, radii,
                    envelope: float = 1.0, slack: float = 0.1, budget: float = math.inf,
                    extend: bool = False, shift: bool = True) -> AuditOutcome:
    """``(q-2) T^(r) <= sum N^[1](r, a_j) + envelope`` with defect estimates.

    The envelope is ``envelope * (log+ T + log+ r)`` on the plane and
    ``envelope * (log+ T + r)`` on the Poincare disc.  Defects use the
    normalized proximity ``m^(r,a) - m^(0,a)``: the minimum of its ratio to
    ``T^`` over the last decade of radii (clipped to [0, 1]), and the raw
    ratio at the largest radius.
    """
    targets = list(targets)
    q = len(targets)
    if q < 3:
        raise ConfigurationError("the curve SMT needs at least three targets", "targets")
    if shift:
        c = base_shift(psi, targets)
        psi = psi.shifted(c) if c else psi
    radii = np.asarray(radii, dtype=float)
    v0 = psi(0)
    v0 = INF if np.isinf(v0) else complex(v0)

    def build(grid):
        T = characteristic_curve(psi, surface, grid)
        n1 = {a: counting_curve(psi, a, surface, grid, truncated=True) for a in targets}
        total_n1 = sum(n1.values())
        grow = grid if surface.name == "poincare_disc" else log_plus(grid)
        env = envelope * (log_plus(T) + grow)
        lhs = (q - 2) * T
        extra = {"T_hat": T, "sum_N1": total_n1}
        return AuditOutcome(f"smt[{psi.name},q={q},{surface.name}]", grid, lhs, total_n1 + env,
                            budget, extra=extra), T

    base, T = build(radii)
    deltas, raw, table = [], [], []
    for a in targets:
        m = proximity_curve(psi, a, surface, radii)
        m0 = -math.log(chordal_distance(v0, a))
        ratio = (m - m0) / T
        d_liminf, d_end = _defects(ratio, radii)
        deltas.append(d_liminf)
        raw.append(d_end)
        table.append({"target": "inf" if is_infinite(a) else repr(complex(a)),
                      "delta_liminf": d_liminf, "delta_at_rmax": d_end,
                      "delta_at_rmax_clipped": float(np.clip(d_end, 0, 1))})
    extremality = float((base.extra["sum_N1"][-1] - base.lhs[-1]) / T[-1])
    extra = {**base.extra, "defects": table, "defect_sum": float(sum(deltas)),
             "defect_sum_at_rmax": float(sum(raw)),
             "defect_sum_at_rmax_clipped": float(sum(np.clip(raw, 0, 1))),
             "defect_bound_ok": bool(sum(deltas) <= 2 + slack),
             "extremality_ratio": extremality, "shift": [complex(psi.shift).real, complex(psi.shift).imag]}
    ext_measure = build(doubled_grid(radii))[0].exceptional_measure if extend else None
    return AuditOutcome(base.name, base.radii, base.lhs, base.rhs, budget, ext_measure, extra)
