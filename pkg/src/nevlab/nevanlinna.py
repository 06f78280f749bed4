"""Nevanlinna functionals of maps into the Riemann sphere on model surfaces.

All quantities are computed in the conformal chart, where the geodesic ball
of radius ``r`` is the disc ``|z| < S`` with ``S = surface.conformal_radius(r)``,
its Green function is ``(1/pi) log(S/|z|)`` and harmonic measure from ``o`` is
uniform on ``|z| = S``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate

from .brownian import MCEstimate, SimConfig, simulate_paths
from .errors import ConfigurationError, DegenerateInputError, IntegrabilityError, PoleError
from .green import GreenKernel
from .maps import INF, MeromorphicMap, chordal_distance, is_infinite
from .quadrature import circle_mean, green_area_curve
from .surface import ModelSurface, geodesic_radius

TRUNCATED_CIRCLE_MARGIN = 2.0  # singularities within this factor of the radius are subtracted


def _radii(r) -> np.ndarray:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0) or not np.all(np.isfinite(r)):
        raise ConfigurationError("radii must be positive and finite", "radii")
    return r


def _conformal(surface: ModelSurface, r) -> np.ndarray:
    for x in np.atleast_1d(r):
        surface.check_radius(float(x))
    return np.atleast_1d(surface.conformal_radius(np.asarray(r, dtype=float)))


def _log_norm(p, q):
    """``log sqrt(|p|^2 + |q|^2)`` without overflow."""
    ap, aq = np.abs(p), np.abs(q)
    m = np.maximum(ap, aq)
    safe = np.where(m > 0, m, 1.0)
    return np.log(safe) + 0.5 * np.log1p((np.minimum(ap, aq) / safe) ** 2)


def _log_abs(x):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(x))


def _critical_breaks(psi: MeromorphicMap, s_max: float) -> list[float]:
    if psi.is_constant:
        return []
    pts = [abs(z) for z, _ in psi.zeros(s_max * 1.5 + 1, validate=False)]
    pts += [abs(z) for z, _ in psi.poles(s_max * 1.5 + 1, validate=False)]
    return sorted(p for p in pts if 0 < p < s_max)


# -- densities ----------------------------------------------------------------
def spherical_density(psi: MeromorphicMap):
    """``|psi'|^2 / (1 + |psi|^2)^2`` per unit coordinate area, in homogeneous form."""
    dnum = psi._outer_derivative()[0]

    def density(z):
        w = psi.inner(z)
        dw = psi.alpha * w if psi.kind == "exp" else psi.alpha
        p = npoly.polyval(w, psi.numerator)
        q = npoly.polyval(w, psi.denominator)
        m = np.maximum(np.abs(p), np.abs(q))
        d = npoly.polyval(w, dnum) * dw / (m * m)
        norm = (np.abs(p) / m) ** 2 + (np.abs(q) / m) ** 2
        return (np.abs(d) / norm) ** 2

    return density


def singular_density(psi: MeromorphicMap):
    """``|psi'|^2 / (|psi|^2 (1 + log^2 |psi|))`` per unit coordinate area."""
    dnum = psi._outer_derivative()[0]

    def density(z):
        w = psi.inner(z)
        dw = psi.alpha * w if psi.kind == "exp" else psi.alpha
        p = npoly.polyval(w, psi.numerator)
        q = npoly.polyval(w, psi.denominator)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = npoly.polyval(w, dnum) * dw / (p * q)
            lg = _log_abs(p) - _log_abs(q)
            return np.abs(ratio) ** 2 / (1 + lg * lg)

    return density


# -- characteristic -----------------------------------------------------------
def characteristic_curve(psi: MeromorphicMap, surface: ModelSurface, radii,
                         rtol: float = 1e-11) -> np.ndarray:
    """Spherical characteristic ``T^(r) = int g_r |psi'|^2/(1+|psi|^2)^2 dA`` at each radius."""
    r = _radii(radii)
    if psi.is_constant:
        return np.zeros(r.size)
    S = _conformal(surface, r)
    return green_area_curve(spherical_density(psi), S, _critical_breaks(psi, S.max()), rtol=rtol)


def characteristic_mc(psi: MeromorphicMap, surface: ModelSurface, config: SimConfig) -> MCEstimate:
    """``T^(r) = (1/4) E_o[int_0^tau Delta_S log(1+|psi|^2)(X_t) dt]`` by simulation."""
    batch = simulate_paths(surface, config, ("fs_density",), psi)
    batch.check_reliable()
    est = batch.estimate(batch.accumulator("fs_density"))
    return MCEstimate(est.mean / 4, est.std_error / 4, est.n)


def characteristic_T(psi: MeromorphicMap, surface: ModelSurface, r: float,
                     method: str = "quadrature", config: SimConfig | None = None):
    """Spherical characteristic at one radius; ``montecarlo`` returns an :class:`MCEstimate`."""
    if method == "quadrature":
        return float(characteristic_curve(psi, surface, [r])[0])
    if method == "montecarlo":
        if config is None:
            raise ConfigurationError("Monte Carlo characteristic needs a SimConfig", "config")
        if abs(config.ball_radius - r) > 1e-12 * r:
            raise ConfigurationError("SimConfig radius differs from r", "config.ball_radius")
        return characteristic_mc(psi, surface, config)
    raise ConfigurationError(f"unknown method {method!r}", "method")


def cartan_characteristic(psi: MeromorphicMap, surface: ModelSurface, radii) -> np.ndarray:
    """``E_o[log max(|P|,|Q|)(X_tau)] - log max(|P|,|Q|)(o)`` from the homogeneous pair.

    This is the characteristic of the Fubini-Study class computed with the
    max-norm; it differs from the spherical one by at most ``log sqrt 2``.
    """
    r = _radii(radii)
    S = _conformal(surface, r)

    def lmax(z):
        p, q = psi.homogeneous(z)
        return np.log(np.maximum(np.abs(p), np.abs(q)))

    base = float(lmax(np.zeros(1))[0])
    return np.array([circle_mean(lmax, s, atol=1e-10) - base for s in S])


# -- proximity ----------------------------------------------------------------
def _chordal_log(psi: MeromorphicMap, a):
    """``z -> log 1/||psi(z), a||`` in homogeneous form."""
    if is_infinite(a):
        def f(z):
            p, q = psi.homogeneous(z)
            return _log_norm(p, q) - _log_abs(q)
    else:
        a = complex(a)
        extra = 0.5 * math.log1p(abs(a) ** 2)

        def f(z):
            p, q = psi.homogeneous(z)
            return _log_norm(p, q) + extra - _log_abs(p - a * q)
    return f


def _near_preimages(psi, a, S):
    pts = psi.preimages(a, TRUNCATED_CIRCLE_MARGIN * S + 1.0, validate=False)
    return [(z, -m) for z, m in pts]


def proximity_m(psi: MeromorphicMap, a, surface: ModelSurface, r: float) -> float:
    """``m^(r, a) = E_o[log 1/||psi(X_tau), a||]`` with the chordal distance."""
    if psi.is_constant:
        v = psi(0)
        v = INF if np.isinf(v) else complex(v)
        d = chordal_distance(v, a)
        if d == 0:
            raise IntegrabilityError("constant map equal to the target")
        return -math.log(d)
    S = float(_conformal(surface, r)[0])
    return circle_mean(_chordal_log(psi, a), S, _near_preimages(psi, a, S))


def proximity_curve(psi, a, surface, radii) -> np.ndarray:
    return np.array([proximity_m(psi, a, surface, x) for x in _radii(radii)])


def log_plus_mean(h: MeromorphicMap, surface: ModelSurface, r: float) -> float:
    """Classical ``m(r, h) = E_o[log+ |h(X_tau)|]``."""
    S = float(_conformal(surface, r)[0])

    def f(z):
        p, q = h.homogeneous(z)
        return np.maximum(_log_abs(p) - _log_abs(q), 0.0)

    sing = [] if h.is_constant else [(z, -m) for z, m in
                                      h.poles(TRUNCATED_CIRCLE_MARGIN * S + 1.0, validate=False)]
    return circle_mean(f, S, sing, atol=1e-9)


# -- counting -----------------------------------------------------------------
def counting_N(psi: MeromorphicMap, a, surface: ModelSurface, r: float,
               truncated: bool = False) -> float:
    """``N(r, a) = pi * sum mult * g_r(o, x)`` over preimages of ``a`` in ``D(r)``."""
    if psi.is_constant:
        return 0.0
    v = psi(0)
    if (is_infinite(a) and np.isinf(v)) or (not is_infinite(a) and not np.isinf(v) and v == complex(a)):
        raise PoleError(f"psi(o) equals the target {a}")
    surface.check_radius(r)
    kernel = GreenKernel.for_surface(surface, r)
    S = float(surface.conformal_radius(r))
    total = 0.0
    for z, m in psi.preimages(a, S):
        rz = float(geodesic_radius(surface, z))
        if rz >= r:
            continue
        total += (1 if truncated else m) * math.pi * float(kernel.at_radius(rz))
    return total


def counting_curve(psi, a, surface, radii, truncated=False) -> np.ndarray:
    return np.array([counting_N(psi, a, surface, x, truncated) for x in _radii(radii)])


# -- first main theorem -------------------------------------------------------
@dataclass(frozen=True)
class FMTResult:
    target: object
    radii: np.ndarray
    T: np.ndarray
    m: np.ndarray
    N: np.ndarray
    residual: np.ndarray
    spread: float
    slope: float
    window: float
    max_slope: float

    @property
    def passed(self) -> bool:
        return bool(np.all(np.isfinite(self.residual)) and self.spread <= self.window
                    and abs(self.slope) < self.max_slope)


def fmt_residual(psi: MeromorphicMap, a, surface: ModelSurface, r_grid, window: float = 0.5,
                 max_slope: float = 0.05, T: np.ndarray | None = None) -> FMTResult:
    """``T^(r) - m^(r,a) - N(r,a)`` over the grid, with spread and log-radius trend."""
    r = _radii(r_grid)
    if T is None:
        T = characteristic_curve(psi, surface, r)
    m = proximity_curve(psi, a, surface, r)
    N = counting_curve(psi, a, surface, r)
    res = T - m - N
    use = r >= 1
    sel = res[use] if np.any(use) else res
    spread = float(np.max(sel) - np.min(sel))
    slope = float(np.polyfit(np.log(r[use]), sel, 1)[0]) if np.sum(use) >= 2 else 0.0
    return FMTResult(a, r, T, m, N, res, spread, slope, window, max_slope)


# -- singular form --------------------------------------------------------------
def _bump(t):
    """Smooth cut-off: 1 for t <= 1/2, 0 for t >= 1."""
    t = np.asarray(t, dtype=float)
    a = np.clip(1.0 - t, 0.0, None)
    b = np.clip(t - 0.5, 0.0, None)
    with np.errstate(divide="ignore", over="ignore"):
        fa = np.where(a > 0, np.exp(-1.0 / np.where(a > 0, a, 1.0)), 0.0)
        fb = np.where(b > 0, np.exp(-1.0 / np.where(b > 0, b, 1.0)), 0.0)
    return fa / (fa + fb)


def singular_form_constant(psi: MeromorphicMap) -> float:
    """``C_psi = int log 1/||psi(o), zeta|| Phi(zeta)``, the additive constant in ``T_Phi <= T^ + C``.

    With ``zeta = e^(u + i phi)`` the form is ``du dphi / (2 pi^2 (1 + u^2))`` and
    the angular mean of ``log |zeta - w0|`` is ``log max(|zeta|, |w0|)``.
    """
    v = psi(0)
    if np.isinf(v) or v == 0:
        raise PoleError("psi(o) lies on the polar set {0, inf} of the singular form")
    a0 = abs(complex(v))
    la = math.log(a0)

    def inner(u):
        return 0.5 * math.log1p(a0 * a0) + 0.5 * np.logaddexp(0.0, 2 * u) - max(u, la)

    pieces = [(-np.inf, la), (la, np.inf)]
    total = 0.0
    for lo, hi in pieces:
        val, err = integrate.quad(lambda u: inner(u) / (1 + u * u), lo, hi, epsabs=1e-13,
                                  epsrel=1e-12, limit=400)
        total += val
    return total / math.pi


def _tail_edge(psi, z0, sigma_min):
    """Mean of ``log|psi|`` on the circle of radius ``sigma_min`` about ``z0``."""
    ring = z0 + sigma_min * np.exp(1j * 2 * math.pi * (np.arange(64) + 0.5) / 64)
    p, q = psi.homogeneous(ring)
    return float(np.mean(_log_abs(p) - _log_abs(q)))


def _local_singular_integrals(psi, dens, z0, mult, eps, sigma_min, n_theta=128):
    """``int chi f dA`` and ``int chi log|z| f dA`` on a small disc about a zero or pole.

    Uses ``z = z0 + e^{-v} e^{i phi}``; the part inside ``sigma_min`` is taken from
    the local model ``psi ~ c (z - z0)^{+-mult}``.
    """
    v0, v1 = -math.log(eps), -math.log(sigma_min)
    edges = np.linspace(v0, v1, max(4, math.ceil((v1 - v0) / 0.5)) + 1)
    x, w = np.polynomial.legendre.leggauss(12)
    vs = (0.5 * (edges[1:] - edges[:-1])[:, None] * x + 0.5 * (edges[1:] + edges[:-1])[:, None]).ravel()
    ws = (0.5 * (edges[1:] - edges[:-1])[:, None] * w).ravel()
    n = n_theta
    prev = None
    while True:
        phi = 2 * math.pi * (np.arange(n) + 0.5) / n
        sig = np.exp(-vs)
        z = z0 + sig[:, None] * np.exp(1j * phi)[None, :]
        f = dens(z) * (sig * sig)[:, None] * _bump(sig / eps)[:, None]
        i0 = float(np.sum(ws * np.mean(f, axis=1))) * 2 * math.pi
        i1 = float(np.sum(ws * np.mean(f * np.log(np.abs(z)), axis=1))) * 2 * math.pi
        if prev is not None and abs(i0 - prev[0]) <= 1e-10 * max(1, abs(i0)) \
                and abs(i1 - prev[1]) <= 1e-10 * max(1, abs(i1)):
            break
        if n > 1 << 14:
            raise IntegrabilityError(f"local singular-form quadrature unresolved near {z0}")
        prev = (i0, i1)
        n *= 2
    # analytic tail: f dA = mult^2 / (1 + u^2) dv dphi with u = log|psi| linear in v
    u_t = _tail_edge(psi, z0, sigma_min)
    if u_t < 0:  # zero: u -> -inf as v -> inf
        tail = 2 * math.pi * mult * (math.atan(u_t) + math.pi / 2)
    else:  # pole: u -> +inf
        tail = 2 * math.pi * mult * (math.pi / 2 - math.atan(u_t))
    return i0 + tail, i1 + tail * math.log(abs(z0))


def _straddling_singular_integral(psi, dens, z0, mult, eps, sigma_min, S, n_arc=32):
    """``int chi f log+(S/|z|) dA`` on the disc about ``z0`` when ``|z| = S`` crosses it.

    In polar coordinates about ``z0`` the part inside ``|z| < S`` is an arc whose
    end points are known, so each arc is integrated by Gauss-Legendre.  Below
    ``sigma_min`` the local model ``psi ~ c (z - z0)^{+-mult}`` and a first-order
    expansion of ``log|z|`` are used.
    """
    r0, th0 = abs(z0), np.angle(z0)
    v0, v1 = -math.log(eps), -math.log(sigma_min)
    cuts = {v0, v1}
    gap = abs(S - r0)
    if sigma_min < gap < eps:
        cuts.add(-math.log(gap))
    cuts = sorted(cuts)
    edges = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        k = max(2, math.ceil((b - a) / 0.5))
        edges.extend(a + (b - a) * np.arange(k) / k)
    edges = np.array(edges + [cuts[-1]])
    x, w = np.polynomial.legendre.leggauss(12)
    vs = (0.5 * np.diff(edges)[:, None] * x + 0.5 * (edges[1:] + edges[:-1])[:, None]).ravel()
    ws = (0.5 * np.diff(edges)[:, None] * w).ravel()
    sig = np.exp(-vs)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (S * S - r0 * r0 - sig * sig) / (2 * sig * r0)
    lo = np.arccos(np.clip(c, -1.0, 1.0))  # inside |z| < S for lo < phi - th0 < 2 pi - lo
    prev = None
    n = n_arc
    while True:
        xa, wa = np.polynomial.legendre.leggauss(n)
        phi = th0 + lo[:, None] + (np.pi - lo)[:, None] * (xa[None, :] + 1.0)
        z = z0 + sig[:, None] * np.exp(1j * phi)
        g = np.maximum(math.log(S) - np.log(np.abs(z)), 0.0)
        f = dens(z) * g * ((np.pi - lo)[:, None] * wa[None, :])
        per_v = np.sum(np.where(np.isfinite(f), f, 0.0), axis=1)
        val = float(np.sum(ws * per_v * sig * sig * _bump(sig / eps)))
        if prev is not None and abs(val - prev) <= 1e-10 * max(1.0, abs(val)):
            break
        if n > 1 << 11:
            raise IntegrabilityError(f"singular-form quadrature unresolved near {z0} on |z|={S}")
        prev = val
        n *= 2
    u_t = _tail_edge(psi, z0, sigma_min)
    d = math.log(S / r0)

    def tail(v):
        a = math.exp(-v) / r0
        if abs(d) >= a:
            mean = max(d, 0.0)
        else:
            t = math.acos(-d / a)
            mean = (d * t + a * math.sin(t)) / math.pi
        u = u_t - mult * (v - v1) if u_t < 0 else u_t + mult * (v - v1)
        return 2 * math.pi * mult * mult * mean / (1 + u * u)

    tv, _ = integrate.quad(tail, v1, np.inf, epsabs=1e-13, limit=200)
    return val + tv


def singular_form_T(psi: MeromorphicMap, surface: ModelSurface, radii) -> np.ndarray:
    """``T_psi(r, Phi) = (1/2 pi) int g_r |psi'|^2 / (|psi|^2 (1 + log^2|psi|)) dA`` per radius.

    Zeros and poles are cut out with a smooth partition of unity; the pieces
    around them are integrated in logarithmic polar coordinates.
    """
    r = _radii(radii)
    if psi.is_constant:
        return np.zeros(r.size)
    S = _conformal(surface, r)
    s_max = float(S.max())
    reach = s_max + 0.5  # local discs have radius <= 0.5
    pts = list(psi.zeros(reach)) + list(psi.poles(reach))
    if any(abs(z) < 1e-12 for z, _ in pts):
        raise PoleError("psi(o) lies on the polar set {0, inf} of the singular form")
    dens = singular_density(psi)
    eps = []
    for j, (z, _) in enumerate(pts):
        others = [abs(z - y) for k, (y, _) in enumerate(pts) if k != j]
        base = min([0.5, 0.3 * abs(z)] + [0.3 * d for d in others])
        # keep the disc clear of circles |z| = S unless one nearly passes through z
        near = [0.45 * abs(s - abs(z)) for s in S if abs(s - abs(z)) > 0.1 * base]
        eps.append(min([base] + near))

    def main_density(z):
        out = dens(z)
        for (z0, _), e in zip(pts, eps):
            out = out * (1.0 - _bump(np.abs(z - z0) / e))
        return np.where(np.isfinite(out), out, 0.0)

    breaks = []
    for (z0, _), e in zip(pts, eps):
        breaks += [abs(z0) - e, abs(z0) - e / 2, abs(z0), abs(z0) + e / 2, abs(z0) + e]
    total = green_area_curve(main_density, S, breaks + _critical_breaks(psi, s_max))
    for (z0, m), e in zip(pts, eps):
        sigma_min = max(1e-7, 1e-14 ** (1.0 / m)) * max(1.0, abs(z0))
        sigma_min = min(sigma_min, e * 1e-3)
        i0, i1 = _local_singular_integrals(psi, dens, z0, m, e, sigma_min)
        inside = S > abs(z0)
        local = np.where(inside, (np.log(S) * i0 - i1) / math.pi, 0.0)
        for i in np.flatnonzero(np.abs(S - abs(z0)) < e):
            local[i] = _straddling_singular_integral(psi, dens, z0, m, e, sigma_min, S[i]) / math.pi
        total = total + local
    return total / (2 * math.pi)


# -- report -------------------------------------------------------------------
def _target_label(a) -> str:
    if is_infinite(a):
        return "inf"
    a = complex(a)
    return repr(a.real) if a.imag == 0 else f"{a.real!r}{a.imag:+}j"


def _parse_target(s: str):
    return INF if s == "inf" else complex(s.replace(" ", ""))


@dataclass(frozen=True, eq=False)
class NevanlinnaReport:
    map_name: str
    surface: str
    radii: np.ndarray
    T: np.ndarray
    T_hat: np.ndarray
    T_phi: np.ndarray
    m: dict
    N: dict
    N1: dict
    method: str = "quadrature"
    std_error: dict = field(default_factory=dict)

    def __post_init__(self):
        for key in self.N:
            if np.any(self.N[key] < -1e-12) or np.any(self.N1[key] < -1e-12):
                raise ValueError("counting functions must be nonnegative")
            if np.any(self.N1[key] > self.N[key] + 1e-9):
                raise ValueError("truncated counting exceeds counting")

    def columns(self) -> list[str]:
        cols = ["r", "T", "T_hat", "T_phi"]
        for a in self.m:
            lab = _target_label(a)
            cols += [f"m[{lab}]", f"N[{lab}]", f"N1[{lab}]"]
        cols += [f"se[{k}]" for k in self.std_error]
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["#map", self.map_name, "surface", self.surface, "method", self.method])
        w.writerow(self.columns())
        for i, r in enumerate(self.radii):
            row = [r, self.T[i], self.T_hat[i], self.T_phi[i]]
            for a in self.m:
                row += [self.m[a][i], self.N[a][i], self.N1[a][i]]
            row += [self.std_error[k][i] for k in self.std_error]
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> NevanlinnaReport:
        rows = list(csv.reader(io.StringIO(text)))
        meta, head, body = rows[0], rows[1], rows[2:]
        data = np.array([[float(x) for x in row] for row in body]).reshape(len(body), len(head))
        col = {h: data[:, i] for i, h in enumerate(head)}
        m, N, N1, se = {}, {}, {}, {}
        for h in head:
            if h.startswith("m["):
                lab = h[2:-1]
                a = _parse_target(lab)
                m[a], N[a], N1[a] = col[h], col[f"N[{lab}]"], col[f"N1[{lab}]"]
            elif h.startswith("se["):
                se[h[3:-1]] = col[h]
        return cls(meta[1], meta[3], col["r"], col["T"], col["T_hat"], col["T_phi"], m, N, N1,
                   meta[5], se)

    def to_json(self) -> str:
        doc = {"map": self.map_name, "surface": self.surface, "method": self.method,
               "radii": self.radii.tolist(), "T": self.T.tolist(), "T_hat": self.T_hat.tolist(),
               "T_phi": self.T_phi.tolist(),
               "targets": {_target_label(a): {"m": self.m[a].tolist(), "N": self.N[a].tolist(),
                                              "N1": self.N1[a].tolist()} for a in self.m},
               "std_error": {k: v.tolist() for k, v in self.std_error.items()}}
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> NevanlinnaReport:
        d = json.loads(text)
        arr = lambda x: np.array(x, dtype=float)
        tg = {_parse_target(k): v for k, v in d["targets"].items()}
        return cls(d["map"], d["surface"], arr(d["radii"]), arr(d["T"]), arr(d["T_hat"]),
                   arr(d["T_phi"]), {a: arr(v["m"]) for a, v in tg.items()},
                   {a: arr(v["N"]) for a, v in tg.items()}, {a: arr(v["N1"]) for a, v in tg.items()},
                   d["method"], {k: arr(v) for k, v in d["std_error"].items()})

    def equals(self, other: NevanlinnaReport) -> bool:
        same = lambda x, y: x.shape == y.shape and np.array_equal(x, y)
        return (self.map_name == other.map_name and self.surface == other.surface
                and self.method == other.method and same(self.radii, other.radii)
                and same(self.T, other.T) and same(self.T_hat, other.T_hat)
                and same(self.T_phi, other.T_phi)
                and [_target_label(a) for a in self.m] == [_target_label(a) for a in other.m]
                and all(same(self.m[a], other.m[b]) and same(self.N[a], other.N[b])
                        and same(self.N1[a], other.N1[b]) for a, b in zip(self.m, other.m))
                and list(self.std_error) == list(other.std_error)
                and all(same(self.std_error[k], other.std_error[k]) for k in self.std_error))


def nevanlinna_report(psi: MeromorphicMap, surface: ModelSurface, radii, targets,
                      singular: bool = True) -> NevanlinnaReport:
    r = _radii(radii)
    T_hat = characteristic_curve(psi, surface, r)
    T = cartan_characteristic(psi, surface, r)
    T_phi = singular_form_T(psi, surface, r) if singular else np.full(r.size, np.nan)
    m = {a: proximity_curve(psi, a, surface, r) for a in targets}
    N = {a: counting_curve(psi, a, surface, r) for a in targets}
    N1 = {a: counting_curve(psi, a, surface, r, truncated=True) for a in targets}
    return NevanlinnaReport(psi.name, surface.name, r, T, T_hat, T_phi, m, N, N1)
