"""Green functions of ``Delta_S / 2`` on geodesic balls centred at ``o``.

All three kernel forms share the radial representation

    g_r(o, x) = (1/pi) int_{r(x)}^{r} dt / J(t),

which for ``J(t) = t`` gives ``(1/pi) log(r / r(x))`` and for
``J(t) = sinh t`` gives ``(1/pi) log(tanh(r/2) / tanh(r(x)/2))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, DomainError, IntegrabilityError, PoleError
from .surface import (CurvatureProfile, JacobiSolution, ModelSurface, geodesic_radius,
                      solve_jacobi)

_FORMS = ("closed_euclidean", "closed_poincare", "radial_numeric")


@dataclass(frozen=True, eq=False)
class GreenKernel:
    surface: ModelSurface
    radius: float
    form: str
    jacobi: JacobiSolution | None = None

    def __post_init__(self):
        if self.form not in _FORMS:
            raise ConfigurationError(f"unknown kernel form {self.form!r}", "form")
        self.surface.check_radius(self.radius)
        if self.form == "closed_euclidean" and self.surface.name != "euclidean_plane":
            raise ConfigurationError("closed Euclidean kernel needs the Euclidean plane", "form")
        if self.form == "closed_poincare" and self.surface.name != "poincare_disc":
            raise ConfigurationError("closed Poincare kernel needs the Poincare disc", "form")
        if self.form == "radial_numeric":
            if self.jacobi is None:
                raise ConfigurationError("radial kernel needs a Jacobi solution", "jacobi")
            if self.jacobi.r_max < self.radius * (1 - 1e-12):
                raise ConfigurationError("Jacobi solution does not cover the ball", "jacobi")

    @classmethod
    def for_surface(cls, surface: ModelSurface, r: float, form: str | None = None,
                    step: float = 1e-3, jacobi: JacobiSolution | None = None) -> GreenKernel:
        """Closed form where available, otherwise the radial quadrature form."""
        if form is None:
            form = {"euclidean_plane": "closed_euclidean",
                    "poincare_disc": "closed_poincare"}.get(surface.name, "radial_numeric")
        if form == "radial_numeric" and jacobi is None:
            jacobi = surface.jacobi
            if jacobi is None or jacobi.r_max < r:
                jacobi = solve_jacobi(surface.profile, r, step)
        return cls(surface, float(r), form, jacobi)

    def primitive(self, t):
        """``Q(t)`` with ``Q' = 1/J`` so that ``g_r = (Q(r) - Q(r(x))) / pi``."""
        t = np.asarray(t, dtype=float)
        if self.form == "closed_euclidean":
            return np.log(t)[()]
        if self.form == "closed_poincare":
            return np.log(np.tanh(0.5 * t))[()]
        return (np.log(t) + self.jacobi.log_excess(t))[()]

    def at_radius(self, rx):
        """Kernel value at geodesic distance ``rx`` from ``o`` (0 outside the ball)."""
        rx = np.asarray(rx, dtype=float)
        if np.any(rx <= 0):
            raise PoleError("Green kernel evaluated at its pole o")
        r = self.radius
        inside = rx < r
        rr = np.where(inside, rx, r)
        if self.form == "closed_euclidean":
            val = np.log(r / rr) / math.pi
        elif self.form == "closed_poincare":
            num = np.expm1(r) * (np.exp(rr) + 1.0)
            den = (np.exp(r) + 1.0) * np.expm1(rr)
            val = np.log(num / den) / math.pi
        else:
            val = self.jacobi.reciprocal_integral(rr, r) / math.pi
        return np.where(inside, val, 0.0)[()]


def green_value(kernel: GreenKernel, x) -> float:
    """``g_r(o, x)`` at conformal coordinate ``x`` (complex)."""
    x = np.asarray(x, dtype=complex)
    if np.any(x == 0):
        raise PoleError("x coincides with the pole o")
    rx = geodesic_radius(kernel.surface, x)
    if np.any(rx > kernel.radius * (1 + 1e-12)):
        raise DomainError(f"r(x) = {np.max(rx)} exceeds the ball radius {kernel.radius}")
    return kernel.at_radius(np.minimum(rx, kernel.radius))


def radial_green_consistency(surface: ModelSurface, r: float, grid, step: float = 1e-4) -> float:
    """Max deviation between the closed-form kernel and the radial quadrature kernel."""
    if surface.name not in ("euclidean_plane", "poincare_disc"):
        raise ConfigurationError("closed forms exist only for the Euclidean plane and Poincare disc",
                                 "surface")
    grid = np.asarray(grid, dtype=float)
    closed = GreenKernel.for_surface(surface, r)
    numeric = GreenKernel.for_surface(surface, r, form="radial_numeric", step=step)
    return float(np.max(np.abs(closed.at_radius(grid) - numeric.at_radius(grid))))


def atsuji_bound_audit(jacobi: JacobiSolution, kernel: GreenKernel, eta: float, grid) -> float:
    """Empirical constant ``C* = min_x g_r(o,x) int_eta^r dt/G / int_{r(x)}^r dt/G``.

    ``grid`` holds geodesic radii strictly between ``eta`` and the ball radius.
    """
    grid = np.asarray(grid, dtype=float)
    r = kernel.radius
    if grid.size == 0:
        raise ConfigurationError("Atsuji audit needs a non-empty grid", "grid")
    if not 0 < eta < r:
        raise ConfigurationError(f"need 0 < eta < r, got eta={eta}, r={r}", "eta")
    if np.any(grid <= eta) or np.any(grid >= r):
        raise ConfigurationError("grid points must satisfy eta < r(x) < r", "grid")
    whole = jacobi.reciprocal_integral(eta, r)
    part = jacobi.reciprocal_integral(grid, r)
    ratio = kernel.at_radius(grid) * whole / part
    return float(np.min(ratio))


def atsuji_envelope(surface: ModelSurface, eta: float, radii, n_grid: int = 64,
                    step: float = 1e-3) -> float:
    """Lower envelope of :func:`atsuji_bound_audit` over a family of ball radii."""
    radii = np.asarray(radii, dtype=float)
    jac = solve_jacobi(surface.profile, float(np.max(radii)), step)
    best = math.inf
    for r in radii:
        kernel = GreenKernel.for_surface(surface, r, jacobi=jac if surface.name == "radial" else None)
        grid = eta + (r - eta) * (np.arange(1, n_grid + 1) / (n_grid + 1))
        best = min(best, atsuji_bound_audit(jac, kernel, eta, grid))
    return best


def harmonic_expectation(surface: ModelSurface, r: float, psi, singular_angles=(),
                         tol: float = 1e-10, limit: int = 400) -> float:
    """``E_o[psi(X_tau_r)] = int psi(theta) dtheta / 2pi`` on the geodesic circle.

    ``psi`` takes an angle.  Known singular angles become quadrature breakpoints;
    integrable logarithmic singularities are handled by the adaptive rule.
    """
    surface.check_radius(r)
    cuts = sorted({0.0, 2 * math.pi} | {float(a) % (2 * math.pi) for a in singular_angles})
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b - a <= 0:
                continue
            try:
                val, err = integrate.quad(psi, a, b, epsabs=tol, epsrel=tol, limit=limit)
            except integrate.IntegrationWarning as exc:
                raise IntegrabilityError(f"boundary integral did not converge on [{a}, {b}]: {exc}") from None
            if not (math.isfinite(val) and math.isfinite(err)):
                raise IntegrabilityError(f"boundary integral diverged on [{a}, {b}]")
            total += val
    return total / (2 * math.pi)


def kernel_table(kernel: GreenKernel, radii) -> str:
    """Two-column ``r_x,g`` text for plotting."""
    radii = np.asarray(radii, dtype=float)
    vals = kernel.at_radius(radii)
    rows = ["r_x,g"] + [f"{a!r},{b!r}" for a, b in zip(radii.tolist(), np.atleast_1d(vals).tolist())]
    return "\n".join(rows) + "\n"
