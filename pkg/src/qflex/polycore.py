"""Homogeneous trivariate and univariate complex polynomials.

Coefficients are complex doubles. Tiny coefficients are pruned at
construction against a relative threshold, so arithmetic noise never shows up
as spurious terms.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import BothZero, DegenerateLeading

VARS = ("x", "y", "z")
ZERO_EPS = 1e-10

Exponent = tuple[int, int, int]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by the whole pipeline.

    ``zero_eps`` is relative: a value counts as zero when it is below
    ``zero_eps`` times the natural scale of the quantity it came from.
    """

    zero_eps: float = 1e-10
    cluster_radius: float = 1e-6
    point_eps: float = 1e-6

    def __post_init__(self):
        if not (0 < self.zero_eps < self.cluster_radius <= self.point_eps < 1):
            raise ValueError(
                "tolerances must satisfy 0 < zero_eps < cluster_radius <= point_eps < 1, "
                f"got {self}"
            )


DEFAULT_TOL = Tolerances()

TOLERANCE_PROFILES = {
    "strict": Tolerances(zero_eps=1e-12, cluster_radius=1e-7, point_eps=1e-7),
    "default": DEFAULT_TOL,
    "loose": Tolerances(zero_eps=1e-8, cluster_radius=1e-5, point_eps=1e-4),
}


def _var_index(var: str | int) -> int:
    if isinstance(var, int):
        if var not in (0, 1, 2):
            raise ValueError(f"variable index out of range: {var}")
        return var
    try:
        return VARS.index(var)
    except ValueError:
        raise ValueError(f"unknown variable {var!r}; expected one of x, y, z") from None


# ---------------------------------------------------------------------------
# univariate


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial, coefficients in ascending degree.

    The zero polynomial has an empty coefficient tuple.
    """

    coeffs: tuple[complex, ...]

    def __init__(self, coeffs: Iterable[complex] = (), zero_eps: float = ZERO_EPS):
        c = [complex(v) for v in coeffs]
        scale = max((abs(v) for v in c), default=0.0)
        while c and abs(c[-1]) <= zero_eps * scale:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: complex = 1.0) -> "UniPoly":
        c = np.array([lead], dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> complex:
        return self.coeffs[-1] if self.coeffs else 0j

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def norm(self) -> float:
        return max((abs(v) for v in self.coeffs), default=0.0)

    def __call__(self, x):
        if not self.coeffs:
            return np.zeros_like(np.asarray(x, dtype=complex)) if np.ndim(x) else 0j
        return np.polyval(self.array[::-1], x)

    def derivative(self, k: int = 1) -> "UniPoly":
        c = self.array
        for _ in range(k):
            if len(c) <= 1:
                return UniPoly()
            c = c[1:] * np.arange(1, len(c))
        return UniPoly(c, zero_eps=0.0)

    def taylor(self, at: complex) -> np.ndarray:
        """Coefficients of ``p(at + t)`` in ascending powers of ``t``."""
        n = len(self.coeffs)
        out = np.zeros(n, dtype=complex)
        c = self.array
        for k in range(n):
            out[k] = np.polyval(c[::-1], at) if len(c) else 0
            c = c[1:] * np.arange(1, len(c)) / (k + 1) if len(c) > 1 else np.zeros(0)
        return out

    def __add__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.array, other.array
        n = max(len(a), len(b))
        out = np.zeros(n, dtype=complex)
        out[: len(a)] += a
        out[: len(b)] += b
        return UniPoly(out)

    def __neg__(self) -> "UniPoly":
        return UniPoly(-self.array)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, UniPoly):
            if self.is_zero() or other.is_zero():
                return UniPoly()
            return UniPoly(np.convolve(self.array, other.array))
        return UniPoly(self.array * complex(other))

    __rmul__ = __mul__

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)})"


# ---------------------------------------------------------------------------
# trivariate


@dataclass(frozen=True, eq=False)
class TriPoly:
    """Homogeneous polynomial in x, y, z.

    ``terms`` maps exponent triples (i, j, k) with i + j + k == degree to their
    coefficient. Build through :meth:`from_terms` or the arithmetic operators on
    :meth:`variables`.
    """

    terms: Mapping[Exponent, complex]
    degree: int

    @classmethod
    def from_terms(
        cls, terms: Mapping[Exponent, complex], degree: int | None = None, zero_eps: float = ZERO_EPS
    ) -> "TriPoly":
        clean = {tuple(int(e) for e in k): complex(v) for k, v in terms.items()}
        if degree is None:
            degrees = {sum(k) for k in clean}
            if len(degrees) > 1:
                raise ValueError(f"terms are not homogeneous: degrees {sorted(degrees)}")
            degree = degrees.pop() if degrees else 0
        for k in clean:
            if sum(k) != degree or min(k) < 0:
                raise ValueError(f"exponent {k} does not have degree {degree}")
        scale = max((abs(v) for v in clean.values()), default=0.0)
        kept = {k: v for k, v in sorted(clean.items(), reverse=True) if abs(v) > zero_eps * scale}
        return cls(kept, degree)

    @classmethod
    def zero(cls, degree: int = 0) -> "TriPoly":
        return cls({}, degree)

    @classmethod
    def constant(cls, c: complex) -> "TriPoly":
        return cls.from_terms({(0, 0, 0): c}, 0)

    @classmethod
    def variables(cls) -> tuple["TriPoly", "TriPoly", "TriPoly"]:
        return tuple(cls({e: 1 + 0j}, 1) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    @classmethod
    def linear_form(cls, coeffs: Sequence[complex]) -> "TriPoly":
        return cls.from_terms(
            {(1, 0, 0): coeffs[0], (0, 1, 0): coeffs[1], (0, 0, 1): coeffs[2]}, 1, zero_eps=0.0
        )

    # -- arrays for fast evaluation

    @cached_property
    def _exps(self) -> np.ndarray:
        return np.array(list(self.terms.keys()), dtype=int).reshape(-1, 3)

    @cached_property
    def _coeffs(self) -> np.ndarray:
        return np.array(list(self.terms.values()), dtype=complex)

    def is_zero(self) -> bool:
        return not self.terms

    def norm(self) -> float:
        """Largest coefficient modulus."""
        return max((abs(v) for v in self.terms.values()), default=0.0)

    def __call__(self, pt: Sequence[complex]) -> complex:
        if not self.terms:
            return 0j
        p = np.asarray(pt, dtype=complex)
        mon = np.prod(p[None, :] ** self._exps, axis=1)
        return complex(mon @ self._coeffs)

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=complex).reshape(-1, 3)
        if not self.terms:
            return np.zeros(len(pts), dtype=complex)
        mon = np.prod(pts[:, None, :] ** self._exps[None, :, :], axis=2)
        return mon @ self._coeffs

    # -- arithmetic

    def _combine(self, other: "TriPoly", sign: int) -> "TriPoly":
        if self.is_zero():
            return other if sign > 0 else -other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError(f"cannot add degree {self.degree} and degree {other.degree} forms")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0j) + sign * v
        scale = max(self.norm(), other.norm())
        return TriPoly.from_terms(
            {k: v for k, v in out.items() if abs(v) > ZERO_EPS * scale * 1e-3}, self.degree
        )

    def __add__(self, other: "TriPoly") -> "TriPoly":
        return self._combine(other, 1)

    def __sub__(self, other: "TriPoly") -> "TriPoly":
        return self._combine(other, -1)

    def __neg__(self) -> "TriPoly":
        return TriPoly({k: -v for k, v in self.terms.items()}, self.degree)

    def __mul__(self, other) -> "TriPoly":
        if not isinstance(other, TriPoly):
            c = complex(other)
            if c == 0:
                return TriPoly.zero(self.degree)
            return TriPoly({k: c * v for k, v in self.terms.items()}, self.degree)
        if self.is_zero() or other.is_zero():
            return TriPoly.zero(self.degree + other.degree)
        out: dict[Exponent, complex] = {}
        for (e1, c1), (e2, c2) in product(self.terms.items(), other.terms.items()):
            k = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
            out[k] = out.get(k, 0j) + c1 * c2
        return TriPoly.from_terms(out, self.degree + other.degree)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TriPoly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = TriPoly.constant(1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def transform(self, matrix) -> "TriPoly":
        """Return ``q(v) = p(M v)`` for a 3x3 matrix ``M``."""
        m = np.asarray(matrix, dtype=complex)
        forms = [TriPoly.linear_form(m[i]) for i in range(3)]
        powers = [[TriPoly.constant(1.0)] for _ in range(3)]
        for i in range(3):
            for _ in range(self.degree):
                powers[i].append(powers[i][-1] * forms[i])
        out = TriPoly.zero(self.degree)
        acc: dict[Exponent, complex] = {}
        for (i, j, k), c in self.terms.items():
            term = powers[0][i] * powers[1][j] * powers[2][k]
            for e, v in term.terms.items():
                acc[e] = acc.get(e, 0j) + c * v
        if acc:
            out = TriPoly.from_terms(acc, self.degree)
        return out

    def coefficient_vector(self) -> np.ndarray:
        """Coefficients over all monomials of this degree, in a fixed order."""
        d = self.degree
        keys = [(i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1)]
        return np.array([self.terms.get(k, 0j) for k in keys], dtype=complex)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.terms.items():
            mono = "*".join(f"{v}^{e}" if e > 1 else v for v, e in zip(VARS, exps) if e)
            coef = f"{c.real:g}" if c.imag == 0 else f"({c.real:g}{c.imag:+g}i)"
            parts.append(f"{coef}*{mono}" if mono else coef)
        return " + ".join(parts)


def eval_tri(p: TriPoly, pt: Sequence[complex]) -> complex:
    return p(pt)


def partial(p: TriPoly, var: str | int) -> TriPoly:
    """Formal partial derivative; the degree drops by one."""
    idx = _var_index(var)
    if p.degree == 0:
        return TriPoly.zero(0)
    out = {}
    for e, c in p.terms.items():
        if e[idx]:
            k = list(e)
            k[idx] -= 1
            out[tuple(k)] = c * e[idx]
    return TriPoly(out, p.degree - 1)


def gradient(p: TriPoly) -> tuple[TriPoly, TriPoly, TriPoly]:
    return partial(p, 0), partial(p, 1), partial(p, 2)


def restrict_chart(p: TriPoly, chart: str, free_var: str, value: complex = 0.0) -> UniPoly:
    """Set ``chart`` to 1 and the remaining variable to ``value``.

    >>> x, y, z = TriPoly.variables()
    >>> restrict_chart(x**4 + y**4 + z**4, "z", "x").coeffs
    ((1+0j), 0j, 0j, 0j, (1+0j))
    """
    ci, fi = _var_index(chart), _var_index(free_var)
    if ci == fi:
        raise ValueError("chart variable and free variable must differ")
    oi = 3 - ci - fi
    c = np.zeros(p.degree + 1, dtype=complex)
    for e, v in p.terms.items():
        c[e[fi]] += v * (value ** e[oi] if e[oi] else 1.0)
    return UniPoly(c)


def restrict_diagonal(p: TriPoly) -> UniPoly:
    """``p(x, x, 1)``."""
    c = np.zeros(p.degree + 1, dtype=complex)
    for (i, j, _), v in p.terms.items():
        c[i + j] += v
    return UniPoly(c)


def restrict_line(p: TriPoly, point: Sequence[complex], direction: Sequence[complex]) -> UniPoly:
    """``t -> p(point + t * direction)`` expanded exactly, no pruning."""
    pt = np.asarray(point, dtype=complex)
    v = np.asarray(direction, dtype=complex)
    lin = [np.array([pt[i], v[i]]) for i in range(3)]
    pw = [[np.array([1.0 + 0j])] for _ in range(3)]
    for i in range(3):
        for _ in range(p.degree):
            pw[i].append(np.convolve(pw[i][-1], lin[i]))
    out = np.zeros(p.degree + 1, dtype=complex)
    for (i, j, k), c in p.terms.items():
        out += c * np.convolve(np.convolve(pw[0][i], pw[1][j]), pw[2][k])
    return UniPoly(out, zero_eps=0.0)


def bivariate_view(p: TriPoly, chart: str, eliminate: str) -> list[UniPoly]:
    """Dehomogenize at ``chart`` and group by powers of ``eliminate``.

    Returns the coefficients (ascending in the eliminated variable), each a
    polynomial in the surviving variable.
    """
    ci, ei = _var_index(chart), _var_index(eliminate)
    if ci == ei:
        raise ValueError("chart variable and eliminated variable must differ")
    si = 3 - ci - ei
    rows = np.zeros((p.degree + 1, p.degree + 1), dtype=complex)
    for e, v in p.terms.items():
        rows[e[ei], e[si]] += v
    return [UniPoly(r, zero_eps=0.0) for r in rows]


# ---------------------------------------------------------------------------
# resultants


def _sylvester_matrices(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Batched Sylvester matrices; ``f``, ``g`` have shape (N, m+1), (N, n+1), ascending."""
    m, n = f.shape[1] - 1, g.shape[1] - 1
    size = m + n
    mats = np.zeros((f.shape[0], size, size), dtype=complex)
    fd, gd = f[:, ::-1], g[:, ::-1]
    for r in range(n):
        mats[:, r, r : r + m + 1] = fd
    for r in range(m):
        mats[:, n + r, r : r + n + 1] = gd
    return mats


def sylvester_matrix(f: UniPoly, g: UniPoly) -> np.ndarray:
    return _sylvester_matrices(f.array[None, :], g.array[None, :])[0]


def sylvester_resultant(f: UniPoly, g: UniPoly) -> complex:
    """Res(f, g) as the determinant of the Sylvester matrix.

    Uses the standard normalization Res(f, g) = lc(f)^deg(g) * prod g(alpha_i)
    over the roots of f.
    """
    if f.is_zero() and g.is_zero():
        raise BothZero("resultant of two zero polynomials")
    if f.is_zero() or g.is_zero():
        other = g if f.is_zero() else f
        return other.lc if other.degree == 0 else 0j
    if f.degree == 0:
        return f.lc ** g.degree
    if g.degree == 0:
        return g.lc ** f.degree
    return complex(np.linalg.det(sylvester_matrix(f, g)))


def _degree_bound(F2: Sequence[UniPoly], G2: Sequence[UniPoly]) -> int:
    m, n = len(F2) - 1, len(G2) - 1
    size = m + n
    neg = -(10**6)
    w = np.full((size, size), neg, dtype=float)
    for r in range(n):
        for j, c in enumerate(reversed(F2)):
            if not c.is_zero():
                w[r, r + j] = c.degree
    for r in range(m):
        for j, c in enumerate(reversed(G2)):
            if not c.is_zero():
                w[n + r, r + j] = c.degree
    rows, cols = linear_sum_assignment(w, maximize=True)
    total = w[rows, cols].sum()
    return int(total) if total >= 0 else 0


def resultant_eliminate(
    F2: Sequence[UniPoly], G2: Sequence[UniPoly], radius: float = 1.0
) -> UniPoly:
    """Resultant of two bivariate polynomials with respect to their outer variable.

    ``F2[i]`` is the coefficient of the eliminated variable to the power i, as a
    polynomial in the surviving variable. The Sylvester determinant is sampled
    at roots of unity (scaled by ``radius``) and interpolated by FFT; a degree
    bound from the Sylvester structure discards aliased noise above it.
    """
    if all(c.is_zero() for c in F2) and all(c.is_zero() for c in G2):
        raise BothZero("resultant of two zero polynomials")
    if F2 and F2[-1].is_zero() or G2 and G2[-1].is_zero():
        raise DegenerateLeading("leading coefficient in the eliminated variable is identically zero")
    m, n = len(F2) - 1, len(G2) - 1
    if m == 0 or n == 0:
        const, other_deg = (F2[0], n) if m == 0 else (G2[0], m)
        out = UniPoly([1.0])
        for _ in range(other_deg):
            out = out * const
        return out
    bound = _degree_bound(F2, G2)
    N = bound + 5
    s = radius * np.exp(2j * np.pi * np.arange(N) / N)
    fv = np.stack([c(s) if not c.is_zero() else np.zeros(N, complex) for c in F2], axis=1)
    gv = np.stack([c(s) if not c.is_zero() else np.zeros(N, complex) for c in G2], axis=1)
    vals = np.linalg.det(_sylvester_matrices(fv, gv))
    coeffs = np.fft.fft(vals) / N / radius ** np.arange(N)
    return UniPoly(coeffs[: bound + 1])
