"""Deterministic quadrature on conformal discs and circles.

Area integrals use composite Gauss-Legendre in the conformal radius with
nested trapezoid sums in angle; circle means use nested trapezoid sums with
logarithmic singularities of nearby points subtracted and added back exactly.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import IntegrabilityError

_GL_ORDER = 12
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)
THETA_OFFSET = 0.0123  # fixed offset keeps angular nodes off the real axis


def _angles(n: int) -> np.ndarray:
    return THETA_OFFSET + 2 * math.pi * np.arange(n) / n


def angular_integrals(density, radii, n0: int = 64, n_max: int = 1 << 16,
                      rtol: float = 1e-11, chunk: int = 1 << 21) -> np.ndarray:
    """``int_0^{2pi} density(s e^{i theta}) d theta`` for every ``s`` in ``radii``.

    Each radius doubles its angular resolution until two successive nested
    trapezoid sums agree to ``rtol``.
    """
    radii = np.asarray(radii, dtype=float)
    out = np.empty(radii.shape)
    todo = np.arange(radii.size)
    sums = np.zeros(radii.size)
    n = n0
    prev = None
    while todo.size:
        if n > n_max:
            bad = radii[todo]
            raise IntegrabilityError(
                f"angular quadrature unresolved at {todo.size} radii (e.g. s={bad[0]:.6g})")
        th = _angles(n) if prev is None else _angles(n)[1::2]
        step = max(1, chunk // th.size)
        new = np.empty(todo.size)
        for a in range(0, todo.size, step):
            idx = todo[a:a + step]
            z = radii[idx, None] * np.exp(1j * th)[None, :]
            new[a:a + step] = np.sum(density(z), axis=1)
        sums[todo] += new
        cur = sums[todo] * (2 * math.pi / n)
        if prev is not None:
            scale = np.maximum(np.abs(cur), 1e-300)
            ok = np.abs(cur - prev) <= rtol * scale + 1e-15
            out[todo[ok]] = cur[ok]
            keep = ~ok
            todo, prev = todo[keep], cur[keep]
        else:
            prev = cur
        n *= 2
    return out


def radial_panels(s_max: float, breaks=(), h_max: float = 0.25, grading: int = 40) -> np.ndarray:
    """Panel edges on ``[0, s_max]``: given breaks, geometric grading at 0, width cap."""
    pts = {0.0, float(s_max)}
    pts.update(float(b) for b in breaks if 0 < b < s_max)
    pts.update(s_max * 2.0 ** -j for j in range(1, grading + 1))
    edges = np.array(sorted(pts))
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        k = max(1, math.ceil((b - a) / h_max))
        out.extend(a + (b - a) * np.arange(1, k + 1) / k)
    return np.array(out)


def green_area_curve(density, conformal_radii, breaks=(), h_max: float | None = None,
                     rtol: float = 1e-11) -> np.ndarray:
    """``int_{|z|<S} (1/pi) log(S/|z|) density(z) dA`` for every ``S`` given.

    ``(1/pi) log(S/|z|)`` is the Green function of ``Delta_S / 2`` on the
    geodesic ball whose conformal radius is ``S``, on every model surface.
    """
    S = np.asarray(conformal_radii, dtype=float)
    if S.size == 0:
        return np.zeros(0)
    if np.any(S <= 0):
        raise IntegrabilityError("conformal radii must be positive")
    s_max = float(np.max(S))
    if h_max is None:
        h_max = min(0.25, s_max / 16)
    edges = radial_panels(s_max, list(S) + list(breaks), h_max)
    a, b = edges[:-1], edges[1:]
    nodes = (0.5 * (b - a)[:, None] * _GL_X[None, :] + 0.5 * (a + b)[:, None]).ravel()
    weights = (0.5 * (b - a)[:, None] * _GL_W[None, :]).ravel()
    ang = angular_integrals(density, nodes, rtol=rtol)
    mass = weights * ang * nodes
    order = np.argsort(nodes)
    nodes, mass = nodes[order], mass[order]
    cum_b = np.concatenate([[0.0], np.cumsum(mass)])
    cum_c = np.concatenate([[0.0], np.cumsum(mass * np.log(nodes))])
    k = np.searchsorted(nodes, S, side="left")
    return (np.log(S) * cum_b[k] - cum_c[k]) / math.pi


def circle_mean(func, radius: float, singular=(), n0: int = 256, n_max: int = 1 << 20,
                atol: float = 1e-10) -> float:
    """Mean of ``func`` over ``|z| = radius`` (uniform angular measure).

    ``singular`` lists ``(z_j, c_j)`` such that ``func(z) - sum c_j log|z - z_j|``
    is regular on the circle; those terms are integrated exactly.
    """
    pts = np.array([complex(z) for z, _ in singular], dtype=complex)
    cs = np.array([float(c) for _, c in singular])

    def reg(z):
        v = func(z)
        if pts.size:
            v = v - np.sum(cs[:, None] * np.log(np.abs(z[None, :] - pts[:, None])), axis=0)
        return v

    exact = float(np.sum(cs * np.log(np.maximum(radius, np.abs(pts))))) if pts.size else 0.0
    n = n0
    total = float(np.sum(reg(radius * np.exp(1j * _angles(n)))))
    prev = total / n
    while n < n_max:
        total += float(np.sum(reg(radius * np.exp(1j * _angles(2 * n)[1::2]))))
        n *= 2
        cur = total / n
        if not math.isfinite(cur):
            raise IntegrabilityError(f"boundary integrand not finite on |z|={radius}")
        if abs(cur - prev) <= atol * max(1.0, abs(cur)):
            return cur + exact
        prev = cur
    raise IntegrabilityError(f"circle mean on |z|={radius} did not converge")
