"""Holomorphic maps to the Riemann sphere used as test curves.

A map is ``psi(z) = P(w) / Q(w)`` where ``w = alpha z + beta`` (rational kind)
or ``w = exp(alpha z + beta)`` (exp kind).  ``P`` and ``Q`` are stored as
ascending complex coefficient arrays, so both kinds are closed under
differentiation and under quotients with the same inner map.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ConfigurationError, DegenerateInputError, RootFindingError

INF = math.inf
_KINDS = ("rational", "exp")


def is_infinite(a) -> bool:
    return a is None or cmath.isinf(complex(a))


def _trim(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0:
        return np.zeros(1, dtype=complex)
    keep = np.nonzero(np.abs(c) > 1e-14 * scale)[0]
    return c[: keep[-1] + 1].copy()


def _degree(c) -> int:
    c = _trim(c)
    return len(c) - 1 if np.any(c != 0) else -1


def cluster_roots(roots, tol: float = 1e-4) -> list[tuple[complex, int]]:
    """Group numerically split multiple roots into ``(centre, multiplicity)`` pairs.

    A root of multiplicity m is perturbed by about eps**(1/m), so roots within
    ``tol`` (relative) of a cluster's running mean are merged.
    """
    out = []
    for r in sorted((complex(x) for x in roots), key=lambda x: (x.real, x.imag)):
        for i, (c, m) in enumerate(out):
            if abs(r - c) <= tol * (1 + abs(c)):
                out[i] = ((c * m + r) / (m + 1), m + 1)
                break
        else:
            out.append((r, 1))
    out.sort(key=lambda p: (abs(p[0]), cmath.phase(p[0])))
    return out


def polynomial_roots(c) -> list[tuple[complex, int]]:
    c = _trim(c)
    if _degree(c) <= 0:
        return []
    if c[0] == 0:  # factor out the exact root at the origin first
        lead = int(np.argmax(c != 0))
        rest = polynomial_roots(c[lead:])
        return sorted([(0j, lead)] + rest, key=lambda p: (abs(p[0]), cmath.phase(p[0])))
    return cluster_roots(np.roots(c[::-1]))


def _from_roots(roots: list[tuple[complex, int]], lead: complex) -> np.ndarray:
    flat = [r for r, m in roots for _ in range(m)]
    return lead * (npoly.polyfromroots(flat) if flat else np.ones(1, dtype=complex))


def _cancel_common(num, den):
    """Remove numerically common roots of two coefficient arrays."""
    num, den = _trim(num), _trim(den)
    if _degree(num) <= 0 or _degree(den) <= 0:
        return num, den
    rn, rd = polynomial_roots(num), polynomial_roots(den)
    common = False
    rn, rd = [list(p) for p in rn], [list(p) for p in rd]
    for p in rn:
        for q in rd:
            if p[1] and q[1] and abs(p[0] - q[0]) <= 1e-7 * (1 + abs(p[0])):
                k = min(p[1], q[1])
                p[1] -= k
                q[1] -= k
                common = True
    if not common:
        return num, den
    rn = [(r, m) for r, m in rn if m]
    rd = [(r, m) for r, m in rd if m]
    return _from_roots(rn, num[-1]), _from_roots(rd, den[-1])


@dataclass(frozen=True, eq=False)
class Divisor:
    """Finite set of distinct targets on the sphere with positive multiplicities."""
    points: tuple = ()

    def __post_init__(self):
        seen = []
        for a, m in self.points:
            if int(m) < 1:
                raise ConfigurationError(f"multiplicity of {a} must be positive", "divisor")
            key = "inf" if is_infinite(a) else complex(a)
            if key in seen:
                raise ConfigurationError(f"repeated target {a}", "divisor")
            seen.append(key)

    @classmethod
    def reduced(cls, targets) -> Divisor:
        return cls(tuple((a, 1) for a in targets))

    @property
    def targets(self) -> list:
        return [a for a, _ in self.points]


@dataclass(frozen=True, eq=False)
class MeromorphicMap:
    numerator: np.ndarray
    denominator: np.ndarray
    kind: str = "rational"
    alpha: complex = 1.0
    beta: complex = 0.0
    name: str = ""
    shift: complex = 0.0
    pole_hint: tuple | None = None  # known roots of the denominator, with multiplicities
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(f"unknown map kind {self.kind!r}", "kind")
        num, den = _trim(self.numerator), _trim(self.denominator)
        if not np.any(den != 0):
            raise ConfigurationError("denominator is identically zero", "denominator")
        if self.alpha == 0:
            raise ConfigurationError("alpha must be nonzero", "alpha")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))

    # construction -------------------------------------------------------
    @classmethod
    def rational(cls, numerator, denominator=(1,), name="") -> MeromorphicMap:
        num, den = _cancel_common(numerator, denominator)
        return cls(num, den, "rational", name=name)

    @classmethod
    def exp_composite(cls, numerator=(0, 1), denominator=(1,), alpha=1.0, beta=0.0,
                      name="") -> MeromorphicMap:
        num, den = _cancel_common(numerator, denominator)
        return cls(num, den, "exp", alpha, beta, name=name)

    def shifted(self, c: complex) -> MeromorphicMap:
        """Pre-compose with ``z -> z + c``."""
        c = complex(c)
        return replace(self, beta=self.beta + self.alpha * c, shift=self.shift + c, _cache={})

    # evaluation ---------------------------------------------------------
    @property
    def is_constant(self) -> bool:
        return _degree(self.numerator) <= 0 and _degree(self.denominator) <= 0

    @property
    def degree(self) -> int:
        """Degree of the outer rational function ``P/Q``."""
        return max(_degree(self.numerator), _degree(self.denominator), 0)

    def inner(self, z):
        u = self.alpha * np.asarray(z, dtype=complex) + self.beta
        return np.exp(u) if self.kind == "exp" else u

    def homogeneous(self, z):
        """``(P(w), Q(w))``: a coprime pair of entire functions of ``z``."""
        w = self.inner(z)
        return npoly.polyval(w, self.numerator), npoly.polyval(w, self.denominator)

    def __call__(self, z):
        p, q = self.homogeneous(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(q == 0, complex(INF), p / np.where(q == 0, 1, q))[()]

    def _outer_derivative(self):
        p, q = self.numerator, self.denominator
        num = npoly.polysub(npoly.polymul(npoly.polyder(p) if len(p) > 1 else [0], q),
                            npoly.polymul(p, npoly.polyder(q) if len(q) > 1 else [0]))
        return _trim(num), _trim(npoly.polymul(q, q))

    def _pole_factors(self) -> list[tuple[complex, int]]:
        if self.pole_hint is not None:
            return list(self.pole_hint)
        if "poles" not in self._cache:
            self._cache["poles"] = polynomial_roots(self.denominator)
        return self._cache["poles"]

    def _derivative_numerators(self, order: int) -> list[np.ndarray]:
        """Numerators ``A_k`` with ``psi^(k) = A_k / (Q L^k)``, ``L`` the squarefree pole factor.

        Tracking the pole multiplicities exactly avoids re-finding multiple
        roots, which floating-point root finders split apart.
        """
        nums = self._cache.setdefault("der_num", [self.numerator])
        poles = self._pole_factors()
        L = _from_roots([(q, 1) for q, _ in poles], 1.0)
        partial = [_from_roots([(q, 1) for q, _ in poles if q != qj], 1.0) for qj, _ in poles]
        while len(nums) <= order:
            k = len(nums) - 1
            a = nums[-1]
            da = npoly.polyder(a) if len(a) > 1 else np.zeros(1, dtype=complex)
            nxt = npoly.polymul(da, L)
            for (qj, mj), lj in zip(poles, partial):
                nxt = npoly.polysub(nxt, (mj + k) * npoly.polymul(a, lj))
            nxt = self.alpha * nxt
            if self.kind == "exp":
                nxt = npoly.polymul([0, 1], nxt)
            nums.append(_trim(nxt))
        return nums

    def derivative(self, order: int = 1) -> MeromorphicMap:
        """The ``order``-th derivative in ``z``, as a map of the same kind."""
        if order < 0:
            raise ConfigurationError("derivative order must be nonnegative", "order")
        if order == 0:
            return self
        key = ("der", order)
        if key in self._cache:
            return self._cache[key]
        poles = self._pole_factors()
        num = self._derivative_numerators(order)[order]
        if not np.any(num != 0):
            den, hint = np.ones(1, dtype=complex), ()
        else:
            L = _from_roots([(q, 1) for q, _ in poles], 1.0)
            den = self.denominator
            for _ in range(order):
                den = npoly.polymul(den, L)
            hint = tuple((q, m + order) for q, m in poles)
        out = MeromorphicMap(num, den, self.kind, self.alpha, self.beta,
                             f"{self.name}^({order})", self.shift, hint)
        self._cache[key] = out
        return out

    def quotient(self, other: MeromorphicMap, name: str = "") -> MeromorphicMap:
        """``self / other`` for maps sharing the same inner map."""
        if (other.kind, other.alpha, other.beta) != (self.kind, self.alpha, self.beta):
            raise ConfigurationError("quotient needs a common inner map", "map")
        if not np.any(other.numerator != 0):
            raise DegenerateInputError("division by the zero map")
        num = npoly.polymul(self.numerator, other.denominator)
        den = npoly.polymul(self.denominator, other.numerator)
        num, den = _cancel_common(num, den)
        return MeromorphicMap(num, den, self.kind, self.alpha, self.beta, name, self.shift)

    def log_derivative_ratio(self, order: int) -> MeromorphicMap:
        """``psi^(order) / psi``.

        With ``psi = P/Q`` this is ``A_k / (L^k P)``; a zero of ``P`` of
        multiplicity ``n > k`` is still a zero of ``A_k`` of multiplicity
        ``n - k`` and is divided out of both.
        """
        if self.is_constant:
            raise DegenerateInputError("logarithmic derivative of a constant map")
        name = f"{self.name}^({order})/{self.name}"
        if order == 0:
            return MeromorphicMap(np.ones(1), np.ones(1), self.kind, self.alpha, self.beta, name,
                                  self.shift, ())
        num = self._derivative_numerators(order)[order]
        poles = self._pole_factors()
        zeros = polynomial_roots(self.numerator)
        rest = []
        for p, n in zeros:
            c = max(n - order, 0)
            for _ in range(c):
                num = npoly.polydiv(num, np.array([-p, 1], dtype=complex))[0]
            if n - c:
                rest.append((p, n - c))
        den = _from_roots(rest, _trim(self.numerator)[-1])
        L = _from_roots([(q, 1) for q, _ in poles], 1.0)
        for _ in range(order):
            den = npoly.polymul(den, L)
        hint = tuple(sorted([(q, order) for q, _ in poles] + rest,
                            key=lambda t: (abs(t[0]), cmath.phase(t[0]))))
        if not np.any(_trim(num) != 0):
            den, hint = np.ones(1, dtype=complex), ()
        return MeromorphicMap(_trim(num), den, self.kind, self.alpha, self.beta, name, self.shift, hint)

    # preimages ----------------------------------------------------------
    def _target_polynomial(self, a):
        if is_infinite(a):
            return self.denominator
        return _trim(npoly.polysub(self.numerator, complex(a) * self.denominator))

    def target_function(self, a):
        """Entire function ``h`` whose zeros are the preimages of ``a``, and ``h'``."""
        c = self._target_polynomial(a)
        dc = npoly.polyder(c) if len(c) > 1 else np.zeros(1, dtype=complex)

        def h(z):
            return npoly.polyval(self.inner(z), c)

        def dh(z):
            w = self.inner(z)
            dw = self.alpha * w if self.kind == "exp" else self.alpha
            return npoly.polyval(w, dc) * dw

        return h, dh

    def preimages(self, a, radius: float, validate: bool = True) -> list[tuple[complex, int]]:
        """All ``z`` with ``|z| < radius`` and ``psi(z) = a``, with multiplicities."""
        c = self._target_polynomial(a)
        if not np.any(c != 0):
            raise DegenerateInputError(f"map is identically equal to {a}")
        roots = (self._pole_factors() if is_infinite(a) and self.pole_hint is not None
                 else polynomial_roots(c))
        out = []
        for w, m in roots:
            if self.kind == "rational":
                z = (w - self.beta) / self.alpha
                if abs(z) < radius:
                    out.append((z, m))
            else:
                if w == 0:
                    continue  # exp never vanishes
                out.extend((z, m) for z in self._exp_lattice(w, radius))
        out.sort(key=lambda p: (abs(p[0]), cmath.phase(p[0])))
        if validate:
            try:
                self._validate_count(a, radius, out)
            except RootFindingError:
                h, dh = self.target_function(a)
                out = [(z, m) for z, m in quadtree_zeros(h, dh, 0j, radius) if abs(z) < radius]
                self._validate_count(a, radius, out)
        return out

    def _exp_lattice(self, w: complex, radius: float) -> list[complex]:
        z0 = (cmath.log(w) - self.beta) / self.alpha
        d = 2j * math.pi / self.alpha
        kc = -(z0 * d.conjugate()).real / abs(d) ** 2
        span = radius / abs(d) + 1
        ks = range(math.floor(kc - span), math.ceil(kc + span) + 1)
        return [z0 + k * d for k in ks if abs(z0 + k * d) < radius]

    def _validate_count(self, a, radius, found):
        circle = _safe_circle(radius, [z for z, _ in found])
        if circle is None:
            return
        expected = winding_count(self.target_function(a)[0], circle)
        inside = sum(m for z, m in found if abs(z) < circle)
        if inside != expected:
            raise RootFindingError(
                f"{self.name or 'map'}: located {inside} preimages of {a} inside |z|<{circle:.6g}"
                f" but the winding count is {expected}")

    def poles(self, radius: float, validate: bool = True) -> list[tuple[complex, int]]:
        return self.preimages(INF, radius, validate)

    def zeros(self, radius: float, validate: bool = True) -> list[tuple[complex, int]]:
        return self.preimages(0, radius, validate)

    def describe(self) -> dict:
        return {"name": self.name, "kind": self.kind,
                "numerator": [[c.real, c.imag] for c in self.numerator],
                "denominator": [[c.real, c.imag] for c in self.denominator],
                "alpha": [self.alpha.real, self.alpha.imag],
                "beta": [self.beta.real, self.beta.imag],
                "shift": [complex(self.shift).real, complex(self.shift).imag]}


def _safe_circle(radius: float, points) -> float | None:
    """A radius slightly below ``radius`` that stays clear of ``points``."""
    for frac in (0.999, 0.997, 0.993, 0.987, 0.975, 0.95):
        rho = radius * frac
        if all(abs(abs(z) - rho) > 1e-4 * radius for z in points):
            return rho
    return None


def winding_count(h, radius: float, n0: int = 512, n_max: int = 1 << 20) -> int:
    """Zeros of the entire function ``h`` inside ``|z| < radius`` by the argument principle."""
    n = n0
    while n <= n_max:
        theta = 2 * math.pi * np.arange(n) / n
        vals = h(radius * np.exp(1j * theta))
        if np.any(vals == 0) or not np.all(np.isfinite(vals)):
            raise RootFindingError(f"target function vanishes on the circle |z|={radius}")
        steps = np.angle(np.roll(vals, -1) / vals)
        if np.max(np.abs(steps)) < 0.5:
            return int(round(np.sum(steps) / (2 * math.pi)))
        n *= 2
    raise RootFindingError(f"winding count did not resolve on |z|={radius}")


def _contour_count(h, x0, x1, y0, y1, n=64, n_max=1 << 16):
    """Winding number of ``h`` around the rectangle, or None if a zero sits on it."""
    while n <= n_max:
        t = (np.arange(n) + 0.5) / n
        edges = np.concatenate([x0 + (x1 - x0) * t + 1j * y0, x1 + 1j * (y0 + (y1 - y0) * t),
                                x1 - (x1 - x0) * t + 1j * y1, x0 + 1j * (y1 - (y1 - y0) * t)])
        vals = h(edges)
        if np.any(vals == 0) or not np.all(np.isfinite(vals)):
            return None
        steps = np.angle(np.roll(vals, -1) / vals)
        if np.max(np.abs(steps)) < 0.5:
            return int(round(np.sum(steps) / (2 * math.pi)))
        n *= 4
    return None


def quadtree_zeros(h, dh, centre: complex, half: float, min_half: float = 1e-5,
                   newton_steps: int = 60) -> list[tuple[complex, int]]:
    """Zeros of ``h`` in a square by argument-principle bisection.

    Boxes with nonzero winding are split (slightly off centre, so split lines
    avoid symmetric zeros) until they are smaller than ``min_half``; each
    surviving box is reported once with its winding count as multiplicity,
    after polishing with the multiplicity-aware Newton iteration.
    """
    c = complex(centre)
    stack = [(c.real - half, c.real + half, c.imag - half, c.imag + half)]
    out = []
    while stack:
        x0, x1, y0, y1 = stack.pop()
        k = _contour_count(h, x0, x1, y0, y1)
        if k is None:
            raise RootFindingError(f"a zero lies on the contour of box [{x0},{x1}]x[{y0},{y1}]")
        if k <= 0:
            continue
        if max(x1 - x0, y1 - y0) <= 2 * min_half:
            z = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
            for _ in range(newton_steps):
                d = dh(z)
                if d == 0:
                    break
                step = k * h(z) / d
                if not cmath.isfinite(step) or abs(step) > 4 * min_half:
                    break
                z -= step
                if abs(step) < 1e-15 * (1 + abs(z)):
                    break
            out.append((complex(z), k))
            continue
        xm = x0 + (x1 - x0) * 0.5137
        ym = y0 + (y1 - y0) * 0.4871
        stack.extend([(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)])
    out.sort(key=lambda p: (abs(p[0]), cmath.phase(p[0])))
    return out


# catalog ---------------------------------------------------------------
def _catalog_entries():
    return {
        "exp": ("e^z", lambda: MeromorphicMap.exp_composite(name="exp")),
        "identity": ("z", lambda: MeromorphicMap.rational([0, 1], name="identity")),
        "square": ("z^2", lambda: MeromorphicMap.rational([0, 0, 1], name="square")),
        "z2m1": ("z^2 - 1", lambda: MeromorphicMap.rational([-1, 0, 1], name="z2m1")),
        "rational3": ("(z^3 - 1)/(z^2 + 2), degree 3",
                      lambda: MeromorphicMap.rational([-1, 0, 0, 1], [2, 0, 1], name="rational3")),
        "mobius": ("(z - a)/(1 - conj(a) z), disc automorphism; parameter a (default 0.5)", None),
    }


def mobius(a: complex = 0.5) -> MeromorphicMap:
    a = complex(a)
    if abs(a) >= 1:
        raise ConfigurationError(f"Mobius parameter must lie in the unit disc, got {a}", "a")
    return MeromorphicMap.rational([-a, 1], [1, -a.conjugate()], name="mobius")


def catalog_listing() -> list[tuple[str, str]]:
    return sorted((k, v[0]) for k, v in _catalog_entries().items())


def catalog_map(name: str, **params) -> MeromorphicMap:
    entries = _catalog_entries()
    if name not in entries:
        raise ConfigurationError(f"unknown catalog map {name!r}; choose from {sorted(entries)}", "map")
    if name == "mobius":
        return mobius(params.get("a", 0.5))
    if params:
        raise ConfigurationError(f"map {name!r} takes no parameters", "map")
    return entries[name][1]()


def chordal_distance(w, a) -> float:
    """Chordal distance on the sphere; ``inf`` stands for the point at infinity."""
    if is_infinite(w) and is_infinite(a):
        return 0.0
    if is_infinite(w):
        w, a = a, w
    w = complex(w)
    if is_infinite(a):
        return 1 / math.sqrt(1 + abs(w) ** 2)
    a = complex(a)
    return abs(w - a) / (math.sqrt(1 + abs(w) ** 2) * math.sqrt(1 + abs(a) ** 2))


def base_shift(psi: MeromorphicMap, targets, threshold: float = 1e-2, half_width: float = math.pi,
               n: int = 33) -> complex:
    """Shift ``c`` keeping ``psi(c)`` away from every target.

    Returns 0 when ``psi(0)`` is already at chordal distance ``threshold`` or
    more from all targets; otherwise the grid point of a square maximizing that
    minimum distance (ties broken toward small ``|c|``).
    """
    def score(c):
        v = psi(c)
        v = INF if cmath.isinf(complex(v)) else v
        return min(chordal_distance(v, a) for a in targets)

    if not targets or score(0) >= threshold:
        return 0j
    axis = np.linspace(-half_width, half_width, n)
    best, best_key = 0j, None
    for x in axis:
        for y in axis:
            c = complex(x, y)
            key = (-round(score(c), 12), round(abs(c), 12), round(x, 12), round(y, 12))
            if best_key is None or key < best_key:
                best, best_key = c, key
    return best
