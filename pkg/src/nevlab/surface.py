"""Model surfaces, curvature profiles and the Jacobi comparison equation.

A model surface is complete, simply connected and rotationally symmetric
about a base point ``o``.  It is described twice:

* in geodesic polar coordinates, ``ds^2 = dr^2 + J(r)^2 dtheta^2``;
* in a global conformal coordinate ``z``, ``ds^2 = 2 g(z) |dz|^2``, with
  ``o`` at ``z = 0``.

For the Euclidean plane ``J(r) = r`` and ``g = 1/2``; for the Poincare disc
``J(r) = sinh r`` and ``g = 2 / (1 - |z|^2)^2``.  Radial surfaces take
``J`` from the Jacobi equation of a curvature profile and rebuild ``g``
from the conformal radius ``rho(t) = t exp(int_0^t (1/J - 1/u) du)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from .errors import ConfigurationError, DomainError, InvalidProfileError

DEFAULT_STEP = 1e-3
BOUND_ABS_SLACK = 1e-6
BOUND_REL_SLACK = 1e-8


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    """Non-positive, non-increasing radial curvature lower bound ``kappa(t)``.

    Use :meth:`constant` or :meth:`tabulated`; tabulated profiles are
    interpolated piecewise-linearly, which preserves monotonicity.
    """

    kind: str
    value: float = 0.0
    radii: np.ndarray | None = None
    kappas: np.ndarray | None = None
    domain_max: float = math.inf

    def __post_init__(self):
        if self.kind == "constant":
            if not np.isfinite(self.value) or self.value > 0:
                raise InvalidProfileError(f"constant curvature must be <= 0, got {self.value}")
        elif self.kind == "tabulated":
            t = np.asarray(self.radii, dtype=float)
            k = np.asarray(self.kappas, dtype=float)
            if t.ndim != 1 or t.shape != k.shape or t.size < 2:
                raise InvalidProfileError("tabulated profile needs two equal-length 1-D arrays (>= 2 rows)")
            if not (np.all(np.isfinite(t)) and np.all(np.isfinite(k))):
                raise InvalidProfileError("tabulated profile contains non-finite values")
            if t[0] != 0.0:
                raise InvalidProfileError("tabulated profile must start at radius 0")
            if np.any(np.diff(t) <= 0):
                raise InvalidProfileError("tabulated radii must be strictly increasing")
            if np.any(k > 0):
                raise InvalidProfileError("curvature profile must be non-positive")
            if np.any(np.diff(k) > 0):
                raise InvalidProfileError("curvature profile must be non-increasing")
            t.setflags(write=False)
            k.setflags(write=False)
            object.__setattr__(self, "radii", t)
            object.__setattr__(self, "kappas", k)
            object.__setattr__(self, "domain_max", float(t[-1]))
        else:
            raise InvalidProfileError(f"unknown profile kind {self.kind!r}")

    @classmethod
    def constant(cls, c: float, domain_max: float = math.inf) -> CurvatureProfile:
        return cls("constant", value=float(c), domain_max=float(domain_max))

    @classmethod
    def tabulated(cls, radii, kappas) -> CurvatureProfile:
        return cls("tabulated", radii=np.asarray(radii, float), kappas=np.asarray(kappas, float))

    @classmethod
    def from_file(cls, path) -> CurvatureProfile:
        """Load a two-column ``radius kappa`` text file (comma or whitespace separated)."""
        text = Path(path).read_text()
        rows = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise InvalidProfileError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                if not rows and lineno == 1:
                    continue  # header row
                raise InvalidProfileError(f"{path}:{lineno}: non-numeric entry") from None
        if not rows:
            raise InvalidProfileError(f"{path}: no data rows")
        data = np.array(rows)
        return cls.tabulated(data[:, 0], data[:, 1])

    def to_text(self) -> str:
        if self.kind == "constant":
            raise InvalidProfileError("only tabulated profiles have a file representation")
        lines = ["radius,kappa"]
        lines += [f"{t!r},{k!r}" for t, k in zip(self.radii.tolist(), self.kappas.tolist())]
        return "\n".join(lines) + "\n"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full(t.shape, self.value)[()]
        return np.interp(t, self.radii, self.kappas)[()]

    def check_domain(self, r_max: float):
        if r_max > self.domain_max * (1 + 1e-12):
            raise InvalidProfileError(
                f"profile is defined on [0, {self.domain_max}] but r_max={r_max} was requested")


@dataclass(frozen=True, eq=False)
class JacobiSolution:
    """Solution of ``G'' + kappa G = 0, G(0) = 0, G'(0) = 1`` on a uniform grid."""

    profile: CurvatureProfile
    grid: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    _log_excess: np.ndarray = field(repr=False)
    _log_excess_spline: CubicSpline = field(repr=False)

    @property
    def r_max(self) -> float:
        return float(self.grid[-1])

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def __call__(self, t):
        """Cubic Hermite interpolant of G (uses the stored derivatives)."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.r_max * (1 + 1e-12)):
            raise DomainError(f"G requested outside [0, {self.r_max}]")
        h = self.step
        i = np.clip((t / h).astype(int), 0, self.grid.size - 2)
        s = (t - self.grid[i]) / h
        y0, y1 = self.values[i], self.values[i + 1]
        d0, d1 = self.derivatives[i] * h, self.derivatives[i + 1] * h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return (h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1)[()]

    def log_excess(self, t):
        """``H(t) = int_0^t (1/G(u) - 1/u) du``; zero for flat profiles, non-increasing."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.r_max * (1 + 1e-12)):
            raise DomainError(f"H requested outside [0, {self.r_max}]")
        return self._log_excess_spline(t)[()]

    def reciprocal_integral(self, a, b):
        """``int_a^b dt / G(t)`` for ``0 < a``; the ``log(b/a)`` part is exact."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if np.any(a <= 0) or np.any(b <= 0):
            raise DomainError("reciprocal integral needs positive limits")
        return (np.log(b / a) + self.log_excess(b) - self.log_excess(a))[()]

    def bound_report(self, abs_slack: float = BOUND_ABS_SLACK, rel_slack: float = BOUND_REL_SLACK) -> dict:
        """Worst violations of ``G >= r``, ``G <= r exp(r sqrt(-kappa(r)))`` and
        ``int_1^r dt/G <= log r`` over the grid (negative = satisfied)."""
        t, G = self.grid, self.values
        kap = self.profile(t)
        upper = t * np.exp(t * np.sqrt(-kap))
        slack_lo = abs_slack + rel_slack * np.abs(t)
        slack_hi = abs_slack + rel_slack * np.abs(upper)
        lower_excess = np.max(t - G - slack_lo)
        upper_excess = np.max(G - upper - slack_hi)
        mask = t >= 1.0
        if np.any(mask):
            lhs = self.reciprocal_integral(1.0, t[mask])
            integral_excess = float(np.max(lhs - np.log(t[mask]) - abs_slack))
        else:
            integral_excess = -math.inf
        return {"lower": float(lower_excess), "upper": float(upper_excess),
                "integral": integral_excess}

    def satisfies_bounds(self, **kw) -> bool:
        return all(v <= 0 for v in self.bound_report(**kw).values())


def solve_jacobi(profile: CurvatureProfile, r_max: float, step: float = DEFAULT_STEP) -> JacobiSolution:
    """Integrate the Jacobi equation with fixed-step classical RK4."""
    if not (r_max > 0 and math.isfinite(r_max)):
        raise ConfigurationError(f"r_max must be positive and finite, got {r_max}", "r_max")
    if not step > 0:
        raise ConfigurationError(f"step must be positive, got {step}", "step")
    if step >= r_max:
        raise ConfigurationError(f"step {step} must be smaller than r_max {r_max}", "step")
    profile.check_domain(r_max)

    n = max(int(math.ceil(r_max / step - 1e-9)), 2)
    h = r_max / n
    grid = np.linspace(0.0, r_max, n + 1)
    k_node = np.asarray(profile(grid), dtype=float) * np.ones(n + 1)
    k_mid = np.asarray(profile(grid[:-1] + 0.5 * h), dtype=float) * np.ones(n)

    G = np.empty(n + 1)
    D = np.empty(n + 1)
    g, d = 0.0, 1.0
    G[0], D[0] = g, d
    half = 0.5 * h
    sixth = h / 6.0
    for i in range(n):
        ka, km, kb = k_node[i], k_mid[i], k_node[i + 1]
        a1, b1 = d, -ka * g
        a2, b2 = d + half * b1, -km * (g + half * a1)
        a3, b3 = d + half * b2, -km * (g + half * a2)
        a4, b4 = d + h * b3, -kb * (g + h * a3)
        g += sixth * (a1 + 2 * a2 + 2 * a3 + a4)
        d += sixth * (b1 + 2 * b2 + 2 * b3 + b4)
        G[i + 1], D[i + 1] = g, d

    integrand = np.empty(n + 1)
    integrand[0] = 0.0
    integrand[1:] = 1.0 / G[1:] - 1.0 / grid[1:]
    H = cumulative_simpson(integrand, x=grid, initial=0.0)
    for arr in (grid, G, D, H):
        arr.setflags(write=False)
    return JacobiSolution(profile, grid, G, D, H, CubicSpline(grid, H))


@dataclass(frozen=True, eq=False)
class ModelSurface:
    """Rotationally symmetric surface of non-positive curvature about ``o``.

    Build with :meth:`euclidean`, :meth:`poincare` or :meth:`radial`.
    """

    name: str
    profile: CurvatureProfile
    jacobi: JacobiSolution | None = None
    _rho_spline: CubicSpline | None = field(default=None, repr=False)

    @classmethod
    def euclidean(cls) -> ModelSurface:
        return cls("euclidean_plane", CurvatureProfile.constant(0.0))

    @classmethod
    def poincare(cls) -> ModelSurface:
        return cls("poincare_disc", CurvatureProfile.constant(-1.0))

    @classmethod
    def radial(cls, profile: CurvatureProfile, r_max: float | None = None,
               step: float = DEFAULT_STEP) -> ModelSurface:
        if r_max is None:
            r_max = profile.domain_max if math.isfinite(profile.domain_max) else 10.0
        sol = solve_jacobi(profile, r_max, step)
        rho = sol.grid * np.exp(sol._log_excess)
        return cls("radial", profile, sol, CubicSpline(sol.grid, rho))

    @classmethod
    def from_name(cls, name: str, profile: CurvatureProfile | None = None, **kw) -> ModelSurface:
        if name in ("euclidean", "euclidean_plane"):
            return cls.euclidean()
        if name in ("poincare", "poincare_disc"):
            return cls.poincare()
        if name == "radial":
            if profile is None:
                raise ConfigurationError("radial surface needs a curvature profile", "surface.profile")
            return cls.radial(profile, **kw)
        raise ConfigurationError(f"unknown surface {name!r}", "surface.name")

    # -- geodesic polar presentation ------------------------------------
    @property
    def r_max(self) -> float:
        """Largest geodesic radius the surface is represented on."""
        return math.inf if self.jacobi is None else self.jacobi.r_max

    def J(self, t):
        t = np.asarray(t, dtype=float)
        if self.name == "euclidean_plane":
            return t[()]
        if self.name == "poincare_disc":
            return np.sinh(t)[()]
        return self.jacobi(t)

    def kappa(self, t):
        return self.profile(t)

    # -- conformal presentation -----------------------------------------
    @property
    def coordinate_radius(self) -> float:
        """Supremum of ``|z|`` over the represented part of the surface."""
        if self.name == "euclidean_plane":
            return math.inf
        if self.name == "poincare_disc":
            return 1.0
        return float(self._rho_spline(self.r_max))

    def conformal_radius(self, t):
        """``|z|`` of the geodesic circle of radius ``t``."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("geodesic radius must be non-negative")
        if self.name == "euclidean_plane":
            return t[()]
        if self.name == "poincare_disc":
            return np.tanh(0.5 * t)[()]
        if np.any(t > self.r_max * (1 + 1e-12)):
            raise DomainError(f"radius beyond the represented range [0, {self.r_max}]")
        return self._rho_spline(t)[()]

    def radius_from_conformal(self, rho):
        """Geodesic radius of the conformal circle ``|z| = rho``."""
        rho = np.asarray(rho, dtype=float)
        limit = self.coordinate_radius
        outside = rho > limit * (1 + 1e-12) if self.name == "radial" else rho >= limit
        if np.any(rho < 0) or np.any(outside):
            raise DomainError(f"|z| must lie in [0, {limit})")
        if self.name == "euclidean_plane":
            return rho[()]
        if self.name == "poincare_disc":
            return (2.0 * np.arctanh(rho))[()]
        sol = self.jacobi
        t = np.interp(rho, self._rho_spline(sol.grid), sol.grid)
        for _ in range(2):  # Newton on rho(t) = target, d rho/dt = rho / J
            r_t = self._rho_spline(t)
            J = sol(t)
            slope = np.divide(r_t, J, out=np.ones_like(r_t), where=J > 0)
            t = np.clip(t - (r_t - rho) / slope, 0.0, sol.r_max)
        return t[()]

    def conformal_factor(self, z):
        """``g(z)`` with ``ds^2 = 2 g |dz|^2``."""
        rho = np.abs(np.asarray(z, dtype=complex))
        if self.name == "euclidean_plane":
            return np.full(rho.shape, 0.5)[()]
        if self.name == "poincare_disc":
            if np.any(rho >= 1):
                raise DomainError("point outside the unit disc")
            return (2.0 / (1.0 - rho * rho) ** 2)[()]
        t = self.radius_from_conformal(rho)
        J = self.J(t)
        safe = rho > 1e-8
        ratio = np.where(safe, J / np.where(safe, rho, 1.0), 1.0)
        return (0.5 * ratio * ratio)[()]

    def curvature_from_conformal(self, rho, h: float = 1e-3):
        """``K = -(1/2) Delta_S log g`` by central differences in ``rho``.

        For radial ``g``: ``K = -(1/(4 g rho)) d/drho (rho d/drho log g)``.
        """
        rho = np.asarray(rho, dtype=float)
        lg = lambda x: np.log(self.conformal_factor(x))
        d_plus = (lg(rho + h) - lg(rho)) / h
        d_minus = (lg(rho) - lg(rho - h)) / h
        lap = ((rho + 0.5 * h) * d_plus - (rho - 0.5 * h) * d_minus) / (h * rho)
        return (-lap / (4.0 * self.conformal_factor(rho)))[()]

    def volume_density(self, t):
        """``dV = volume_density(t) dt dtheta`` in geodesic polar coordinates."""
        return self.J(t)

    def check_radius(self, r: float):
        if not r > 0:
            raise DomainError(f"ball radius must be positive, got {r}")
        if r > self.r_max * (1 + 1e-12):
            raise DomainError(f"ball radius {r} beyond represented range {self.r_max}")


def geodesic_radius(surface: ModelSurface, z) -> float:
    """Distance from ``o`` to the point with conformal coordinate ``z``."""
    rho = np.abs(np.asarray(z, dtype=complex))
    if np.any(rho >= surface.coordinate_radius):
        raise DomainError(f"|z| = {np.max(rho)} outside the coordinate domain of {surface.name}")
    return surface.radius_from_conformal(rho)


def radius_correspondence(r_tilde):
    """Euclidean radius in (0, 1) -> hyperbolic radius ``log((1+r~)/(1-r~))``."""
    r_tilde = np.asarray(r_tilde, dtype=float)
    if np.any(r_tilde <= 0) or np.any(r_tilde >= 1):
        raise DomainError("Euclidean radius must lie in (0, 1)")
    return (2.0 * np.arctanh(r_tilde))[()]


def inverse_radius_correspondence(r):
    """Hyperbolic radius ``r > 0`` -> Euclidean radius ``(e^r - 1)/(e^r + 1)``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or not np.all(np.isfinite(r)):
        raise DomainError("hyperbolic radius must be positive and finite")
    return np.tanh(0.5 * r)[()]
