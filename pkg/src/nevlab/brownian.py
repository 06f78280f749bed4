"""Brownian motion of ``Delta_S / 2`` stopped at the boundary of a geodesic ball.

Paths run in conformal coordinates, where the process is a time-changed planar
Brownian motion: each coordinate moves with variance ``dt / (2 g(z))`` per
step.  Every path draws its noise from a Philox stream keyed on
``(base_seed, path_index)``, so results do not depend on scheduling.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numba
import numpy as np
from numba import njit, prange
from scipy import integrate, stats

from .errors import ConfigurationError, IntegrabilityError, NonExitError, ReliabilityError
from .green import GreenKernel
from .rng import draw
from .surface import ModelSurface

# the default TBB layer warns on the pinned TBB build; the portable one is enough here
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER = "workqueue"

DEFAULT_MAX_STEPS = 10**8
MAX_CENSORED_FRACTION = 1e-3

# occupation functional ids understood by the compiled kernel
ONE, R2, RE_Z, ABS2, LAP_ABS2, FS_DENSITY = range(6)
FUNCTIONALS = {"one": ONE, "r2": R2, "re_z": RE_Z, "abs2": ABS2,
               "lap_abs2": LAP_ABS2, "fs_density": FS_DENSITY}

_EUCLID, _POINCARE, _TABLE = 0, 1, 2


@dataclass(frozen=True)
class SimConfig:
    step_dt: float
    max_paths: int
    base_seed: int
    ball_radius: float
    max_steps: int = DEFAULT_MAX_STEPS
    bridge: bool = True
    drift: complex = 0j  # only used to build biased negative controls

    def __post_init__(self):
        if not self.step_dt > 0:
            raise ConfigurationError("step must be positive", "step_dt")
        if int(self.max_paths) < 1:
            raise ConfigurationError("need at least one path", "max_paths")
        if not self.ball_radius > 0:
            raise ConfigurationError("ball radius must be positive", "ball_radius")
        if not 0 <= int(self.base_seed) < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer", "base_seed")
        if int(self.max_steps) < 1:
            raise ConfigurationError("step cap must be positive", "max_steps")

    @classmethod
    def default(cls, r: float, paths: int = 100_000, seed: int = 0, **kw) -> SimConfig:
        """Step ``1e-4 r^2``, the resolution used by the exit-time checks."""
        return cls(1e-4 * r * r, paths, seed, r, **kw)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    n: int

    def __post_init__(self):
        if self.n < 1 or not self.std_error >= 0:
            raise ValueError("invalid Monte Carlo estimate")

    def within(self, value: float, k: float = 3.0) -> bool:
        return abs(self.mean - value) <= k * self.std_error


_S1, _S2 = 1074, 2148  # binary scales making float sums exact integers


def _scaled(x: float, scale: int) -> int:
    n, d = float(x).as_integer_ratio()
    return n * ((1 << scale) // d)


@dataclass(frozen=True)
class Moments:
    """Exact (count, sum, sum of squares) with an associative, commutative merge."""
    count: int = 0
    total: int = 0
    total_sq: int = 0

    @classmethod
    def of(cls, values) -> Moments:
        vals = [float(v) for v in np.asarray(values, dtype=float).ravel()]
        if not all(map(math.isfinite, vals)):
            raise ValueError("non-finite sample")
        return cls(len(vals), sum(_scaled(v, _S1) for v in vals),
                   sum(_scaled(v, _S1) ** 2 for v in vals))

    def merge(self, other: Moments) -> Moments:
        return Moments(self.count + other.count, self.total + other.total,
                       self.total_sq + other.total_sq)

    __add__ = merge

    def estimate(self) -> MCEstimate:
        if self.count < 1:
            raise ValueError("no samples")
        n = self.count
        mean = Fraction(self.total, n << _S1)
        if n == 1:
            return MCEstimate(float(mean), 0.0, 1)
        var = (Fraction(self.total_sq, 1 << _S2) - n * mean * mean) / (n - 1)
        return MCEstimate(float(mean), math.sqrt(max(float(var), 0.0) / n), n)


@dataclass(frozen=True)
class StoppedPath:
    path_index: int
    exit_point: complex
    exit_time: float
    accumulators: dict = field(default_factory=dict)


# -- compiled kernel -------------------------------------------------------
@njit(cache=True, inline="always")
def _conformal_factor(kind, rho, tab_rho, tab_g):
    if kind == _EUCLID:
        return 0.5
    if kind == _POINCARE:
        s = 1.0 - rho * rho
        return 2.0 / (s * s)
    return np.interp(rho, tab_rho, tab_g)


@njit(cache=True, inline="always")
def _poly(c, w):
    acc = 0j
    for j in range(c.shape[0] - 1, -1, -1):
        acc = acc * w + c[j]
    return acc


@njit(cache=True, inline="always")
def _functional(fid, x, y, g, kind, tab_rho, tab_t, map_kind, alpha, beta, num, den, dnum):
    if fid == ONE:
        return 1.0
    rho2 = x * x + y * y
    if fid == R2:
        rho = math.sqrt(rho2)
        if kind == _EUCLID:
            t = rho
        elif kind == _POINCARE:
            t = 2.0 * np.arctanh(rho)
        else:
            t = np.interp(rho, tab_rho, tab_t)
        return t * t
    if fid == RE_Z:
        return x
    if fid == ABS2:
        return rho2
    if fid == LAP_ABS2:
        return 2.0 / g
    # FS_DENSITY: Delta_S log(|P|^2 + |Q|^2) of the map P(w)/Q(w)
    u = alpha * complex(x, y) + beta
    if map_kind == 1:
        w = np.exp(u)
        dw = alpha * w
    else:
        w = u
        dw = alpha
    p = _poly(num, w)
    q = _poly(den, w)
    m = max(abs(p), abs(q))
    if m == 0.0:
        return 0.0
    d = _poly(dnum, w) * dw / (m * m)
    norm = (abs(p) / m) ** 2 + (abs(q) / m) ** 2
    return (2.0 / g) * (abs(d) / norm) ** 2


@njit(cache=True, parallel=True)
def _run_paths(kind, tab_rho, tab_g, tab_t, rho_exit, dt, seed, path_start, n_paths,
               max_steps, fids, map_kind, alpha, beta, num, den, dnum, drift, bridge,
               out_tau, out_exit, out_acc, out_steps, out_censored):
    nf = fids.shape[0]
    r2_exit = rho_exit * rho_exit
    ddx = drift.real * dt
    ddy = drift.imag * dt
    for i in prange(n_paths):
        path = path_start + i
        x = 0.0
        y = 0.0
        t = 0.0
        step = 0
        acc = np.zeros(nf)
        weight = dt
        done = False
        while step < max_steps:
            q0 = x * x + y * y
            g = _conformal_factor(kind, math.sqrt(q0), tab_rho, tab_g)
            var = dt / (2.0 * g)
            sigma = math.sqrt(var)
            n1, n2, u3 = draw(seed, path, step)
            x1 = x + sigma * n1 + ddx
            y1 = y + sigma * n2 + ddy
            q1 = x1 * x1 + y1 * y1
            if q1 >= r2_exit:
                rho0 = math.sqrt(q0)
                frac = (rho_exit - rho0) / (math.sqrt(q1) - rho0)
                xc = x + frac * (x1 - x)
                yc = y + frac * (y1 - y)
                weight = frac * dt
                done = True
            elif bridge:
                # chance that the continuous path touched the circle within the step
                d0 = rho_exit - math.sqrt(q0)
                d1 = rho_exit - math.sqrt(q1)
                expo = 2.0 * d0 * d1 / var
                if expo < 40.0 and u3 < math.exp(-expo):
                    xc = 0.5 * (x + x1)
                    yc = 0.5 * (y + y1)
                    weight = 0.5 * dt
                    done = True
            for j in range(nf):
                acc[j] += _functional(fids[j], x, y, g, kind, tab_rho, tab_t, map_kind,
                                      alpha, beta, num, den, dnum) * weight
            step += 1
            if done:
                t += weight
                rc = math.sqrt(xc * xc + yc * yc)
                if rc > 0:
                    out_exit[i] = complex(xc, yc) * (rho_exit / rc)
                else:
                    out_exit[i] = complex(rho_exit, 0.0)
                break
            x = x1
            y = y1
            t += dt
        out_steps[i] = step
        out_censored[i] = not done
        out_tau[i] = t if done else np.nan
        if not done:
            out_exit[i] = complex(np.nan, np.nan)
        for j in range(nf):
            out_acc[i, j] = acc[j]


def _surface_tables(surface: ModelSurface, r: float):
    surface.check_radius(r)
    if surface.name == "euclidean_plane":
        kind = _EUCLID
    elif surface.name == "poincare_disc":
        kind = _POINCARE
    else:
        kind = _TABLE
    if kind != _TABLE:
        empty = np.zeros(2)
        return kind, empty, empty, empty
    sol = surface.jacobi
    t = sol.grid
    rho = surface.conformal_radius(t)
    g = np.empty_like(t)
    g[0] = 0.5
    g[1:] = 0.5 * (sol.values[1:] / rho[1:]) ** 2
    return kind, np.ascontiguousarray(rho), np.ascontiguousarray(g), np.ascontiguousarray(t)


def _map_arrays(psi):
    if psi is None:
        z = np.zeros(1, dtype=complex)
        return 0, 1 + 0j, 0j, z, z + 1, z
    num, den = psi.numerator, psi.denominator
    dnum = psi._outer_derivative()[0]
    return (1 if psi.kind == "exp" else 0, complex(psi.alpha), complex(psi.beta),
            np.ascontiguousarray(num, dtype=complex), np.ascontiguousarray(den, dtype=complex),
            np.ascontiguousarray(dnum, dtype=complex))


def set_workers(workers: int | None):
    """Limit the compiled kernels to ``workers`` threads (None keeps the default)."""
    if workers is None:
        return
    if workers < 1:
        raise ConfigurationError("worker count must be positive", "workers")
    numba.set_num_threads(min(int(workers), numba.config.NUMBA_NUM_THREADS))


@dataclass(frozen=True, eq=False)
class PathBatch:
    """Per-path results of one simulation, indexed by path number."""
    path_start: int
    functionals: tuple
    exit_time: np.ndarray
    exit_point: np.ndarray
    accumulators: np.ndarray
    steps: np.ndarray
    censored: np.ndarray

    @property
    def n(self) -> int:
        return self.exit_time.shape[0]

    @property
    def censored_fraction(self) -> float:
        return float(np.mean(self.censored))

    def check_reliable(self, limit: float = MAX_CENSORED_FRACTION):
        if self.censored_fraction > limit:
            raise ReliabilityError(
                f"{int(self.censored.sum())} of {self.n} paths hit the step cap "
                f"(fraction {self.censored_fraction:.3g} > {limit})")

    def accumulator(self, name: str) -> np.ndarray:
        return self.accumulators[:, self.functionals.index(name)]

    def estimate(self, values) -> MCEstimate:
        values = np.asarray(values, dtype=float)[~self.censored]
        return Moments.of(values).estimate()

    def path(self, i: int) -> StoppedPath:
        k = i - self.path_start
        if self.censored[k]:
            raise NonExitError(f"path {i} did not leave the ball within the step cap")
        return StoppedPath(i, complex(self.exit_point[k]), float(self.exit_time[k]),
                           {f: float(self.accumulators[k, j]) for j, f in enumerate(self.functionals)})

    def records(self) -> str:
        """Comma-separated per-path diagnostics with a header row."""
        head = ["path_index", "tau", "exit_angle", "censored"] + list(self.functionals)
        lines = [",".join(head)]
        angles = np.angle(self.exit_point)
        for k in range(self.n):
            row = [str(self.path_start + k), repr(float(self.exit_time[k])),
                   repr(float(angles[k])), str(int(self.censored[k]))]
            row += [repr(float(v)) for v in self.accumulators[k]]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def simulate_paths(surface: ModelSurface, config: SimConfig, functionals=(), psi=None,
                   path_start: int = 0, n_paths: int | None = None) -> PathBatch:
    """Run paths ``path_start .. path_start + n_paths - 1`` (default ``max_paths``)."""
    functionals = tuple(functionals)
    for f in functionals:
        if f not in FUNCTIONALS:
            raise ConfigurationError(f"unknown functional {f!r}", "functionals")
    if "fs_density" in functionals and psi is None:
        raise ConfigurationError("fs_density needs a map", "functionals")
    n = int(config.max_paths if n_paths is None else n_paths)
    r = config.ball_radius
    kind, tab_rho, tab_g, tab_t = _surface_tables(surface, r)
    rho_exit = float(surface.conformal_radius(r))
    fids = np.array([FUNCTIONALS[f] for f in functionals], dtype=np.int64)
    tau = np.empty(n)
    exit_pt = np.empty(n, dtype=complex)
    acc = np.zeros((n, len(functionals)))
    steps = np.empty(n, dtype=np.int64)
    cens = np.empty(n, dtype=np.bool_)
    _run_paths(kind, tab_rho, tab_g, tab_t, rho_exit, float(config.step_dt),
               np.uint64(config.base_seed), np.int64(path_start), n, np.int64(config.max_steps),
               fids, *_map_arrays(psi), complex(config.drift), bool(config.bridge),
               tau, exit_pt, acc, steps, cens)
    return PathBatch(int(path_start), functionals, tau, exit_pt, acc, steps, cens)


def simulate_stopped_path(surface: ModelSurface, config: SimConfig, functionals=(),
                          path_index: int = 0, psi=None) -> StoppedPath:
    batch = simulate_paths(surface, config, functionals, psi, path_start=path_index, n_paths=1)
    return batch.path(path_index)


def estimate_exit_time(surface: ModelSurface, config: SimConfig) -> MCEstimate:
    """Monte Carlo estimate of ``E_o[tau_r]``."""
    batch = simulate_paths(surface, config)
    batch.check_reliable()
    return batch.estimate(batch.exit_time)


# -- audits -----------------------------------------------------------------
@dataclass(frozen=True)
class ComparisonResult:
    name: str
    mc: MCEstimate
    reference: float
    passed: bool

    @property
    def deviation(self) -> float:
        return self.mc.mean - self.reference


RADIAL_TEST_FUNCTIONS = {
    "one": lambda t: np.ones_like(t),
    "r2": lambda t: t * t,
}


def green_integral(surface: ModelSurface, r: float, phi, split: float = 1e-6) -> float:
    """``int_{D(r)} g_r(o,x) phi(r(x)) dV`` for a radial ``phi`` by polar quadrature.

    Below ``split * r`` the kernel is replaced by its logarithmic asymptote
    and integrated in closed form.
    """
    kernel = GreenKernel.for_surface(surface, r)
    eps = split * r
    f = lambda t: float(kernel.at_radius(t) * phi(np.asarray(t)) * 2 * math.pi * surface.J(t))
    with np.errstate(all="ignore"):
        head_c = float(kernel.primitive(r))
    phi0 = float(phi(np.asarray(0.0)))
    head = 2 * phi0 * (head_c * eps**2 / 2 - (eps**2 / 2 * math.log(eps) - eps**2 / 4))
    val, err = integrate.quad(f, eps, r, epsabs=1e-13, epsrel=1e-12, limit=500)
    if not (math.isfinite(val) and err <= 1e-8 * max(1.0, abs(val))):
        raise IntegrabilityError(f"Green quadrature did not converge (error {err})")
    return val + head


def coarea_audit(surface: ModelSurface, config: SimConfig, phi: str = "one",
                 batch: PathBatch | None = None) -> ComparisonResult:
    """Occupation integral of a radial test function against its Green quadrature."""
    if phi not in RADIAL_TEST_FUNCTIONS:
        raise ConfigurationError(f"unknown test function {phi!r}", "phi")
    if batch is None or phi not in batch.functionals:
        batch = simulate_paths(surface, config, (phi,))
    batch.check_reliable()
    mc = batch.estimate(batch.accumulator(phi))
    quad = green_integral(surface, config.ball_radius, RADIAL_TEST_FUNCTIONS[phi])
    return ComparisonResult(f"coarea[{phi}]", mc, quad, mc.within(quad))


DYNKIN_TEST_FUNCTIONS = {
    # name: (u(z), occupation functional for Delta_S u or None when harmonic)
    "re_z": (lambda z: np.real(z), None),
    "abs2": (lambda z: np.abs(z) ** 2, "lap_abs2"),
    "constant": (lambda z: np.ones(np.shape(z)), None),
}


def dynkin_audit(surface: ModelSurface, config: SimConfig, u: str = "abs2",
                 batch: PathBatch | None = None) -> ComparisonResult:
    """Per-path ``u(X_tau) - u(o) - (1/2) int Delta_S u dt``; its mean should vanish."""
    if u not in DYNKIN_TEST_FUNCTIONS:
        raise ConfigurationError(f"unknown test function {u!r}", "u")
    fn, lap = DYNKIN_TEST_FUNCTIONS[u]
    funcs = () if lap is None else (lap,)
    if batch is None or not set(funcs) <= set(batch.functionals):
        batch = simulate_paths(surface, config, funcs)
    batch.check_reliable()
    ok = ~batch.censored
    per_path = fn(batch.exit_point[ok]) - float(fn(np.zeros(1))[0])
    if lap is not None:
        per_path = per_path - 0.5 * batch.accumulator(lap)[ok]
    mc = Moments.of(per_path).estimate()
    # a deterministic zero (e.g. constant u) passes exactly
    passed = mc.within(0.0) if mc.std_error > 0 else abs(mc.mean) <= 1e-12
    return ComparisonResult(f"dynkin[{u}]", mc, 0.0, passed)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    dof: int
    p_value: float
    counts: tuple
    passed: bool


def exit_distribution_audit(surface: ModelSurface, config: SimConfig, n_bins: int = 16,
                            alpha: float = 1e-3, batch: PathBatch | None = None) -> ChiSquareResult:
    """Chi-square test of exit angles against the uniform law on the circle."""
    if n_bins < 2:
        raise ConfigurationError("need at least two bins", "n_bins")
    if config.max_paths < 5 * n_bins:
        raise ConfigurationError(
            f"{config.max_paths} paths give fewer than 5 expected exits per bin", "max_paths")
    if batch is None:
        batch = simulate_paths(surface, config)
    batch.check_reliable()
    angles = np.mod(np.angle(batch.exit_point[~batch.censored]), 2 * math.pi)
    counts = np.bincount(np.minimum((angles / (2 * math.pi) * n_bins).astype(int), n_bins - 1),
                         minlength=n_bins)
    stat, p = stats.chisquare(counts)
    return ChiSquareResult(float(stat), n_bins - 1, float(p), tuple(int(c) for c in counts),
                           bool(p > alpha))
