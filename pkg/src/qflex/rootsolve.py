"""Univariate root finding and the projective solver for F = H = 0."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .errors import DegenerateSystem, NoConvergence
from .polycore import (
    DEFAULT_TOL,
    TriPoly,
    Tolerances,
    UniPoly,
    bivariate_view,
    gradient,
    resultant_eliminate,
)

_EPS = np.finfo(float).eps
_TIE = 1e-9


# ---------------------------------------------------------------------------
# projective points


def canonicalize(v: Sequence[complex]) -> np.ndarray:
    """Scale so the first coordinate of (near) maximal modulus equals 1."""
    v = np.asarray(v, dtype=complex)
    mods = np.abs(v)
    top = mods.max()
    if top == 0:
        raise ValueError("the zero vector is not a projective point")
    k = int(np.argmax(mods >= top * (1 - _TIE)))
    return v / v[k]


def chordal_distance(u: Sequence[complex], v: Sequence[complex]) -> float:
    """Sine of the angle between two lines in C^3; zero iff same projective point."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ValueError("the zero vector is not a projective point")
    # |u x v| for unit vectors is the wedge norm; no cancellation near zero
    return float(np.linalg.norm(np.cross(u / nu, v / nv)))


@dataclass(frozen=True)
class ProjPoint:
    """A point of P^2 stored in canonical form (largest coordinate is 1)."""

    coords: tuple[complex, complex, complex]

    def __init__(self, coords: Sequence[complex]):
        c = canonicalize(coords)
        object.__setattr__(self, "coords", tuple(complex(v) for v in c))

    @classmethod
    def of(cls, x: complex, y: complex, z: complex) -> "ProjPoint":
        return cls((x, y, z))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)

    def distance(self, other: "ProjPoint | Sequence[complex]") -> float:
        o = other.coords if isinstance(other, ProjPoint) else other
        return chordal_distance(self.coords, o)

    def close_to(self, other: "ProjPoint | Sequence[complex]", eps: float = DEFAULT_TOL.point_eps) -> bool:
        return self.distance(other) <= eps

    def affine(self, chart: int = 2) -> np.ndarray:
        """Coordinates rescaled so coordinate ``chart`` equals 1."""
        c = self.array
        if abs(c[chart]) < _EPS:
            raise ZeroDivisionError(f"point {self} lies at infinity of chart {chart}")
        return c / c[chart]

    def sort_key(self) -> tuple[float, ...]:
        return tuple(x for c in self.coords for x in (round(c.real, 9), round(c.imag, 9)))

    def __repr__(self):
        return "[" + " : ".join(f"{c.real:.6g}{c.imag:+.6g}i" for c in self.coords) + "]"


def dedup_points(points: Sequence[ProjPoint], eps: float) -> list[ProjPoint]:
    """Merge points within ``eps`` of each other; deterministic order."""
    out: list[ProjPoint] = []
    for p in sorted(points, key=ProjPoint.sort_key):
        if not any(p.close_to(q, eps) for q in out):
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# univariate roots


@dataclass(frozen=True)
class RootSet:
    roots: tuple[tuple[complex, int], ...]

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.roots)

    def values(self) -> list[complex]:
        return [r for r, _ in self.roots]

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _initial_guesses(c: np.ndarray, phase: float) -> np.ndarray:
    """Starting points from the upper convex hull of (i, log|c_i|)."""
    n = len(c) - 1
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(c))
    hull = [0]
    for i in range(1, n + 1):
        if not np.isfinite(logs[i]):
            continue
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            if (logs[b] - logs[a]) * (i - a) <= (logs[i] - logs[a]) * (b - a):
                hull.pop()
            else:
                break
        hull.append(i)
    z = []
    for a, b in zip(hull[:-1], hull[1:]):
        k = b - a
        r = np.exp((logs[a] - logs[b]) / k)
        ang = 2 * np.pi * np.arange(k) / k + 2 * np.pi * a / n + phase
        z.extend(r * np.exp(1j * ang))
    return np.array(z, dtype=complex)


def aberth(c: np.ndarray, max_sweeps: int = 200, phase: float = 0.4) -> np.ndarray:
    """All roots of the polynomial with ascending coefficients ``c``.

    ``c[0]`` and ``c[-1]`` must be nonzero. Each approximation is frozen once
    its residual is within the rounding-error bound of a Horner evaluation.
    """
    n = len(c) - 1
    if n == 0:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([-c[0] / c[1]])
    desc = c[::-1]
    ddesc = np.polyder(desc)
    absdesc = np.abs(desc)
    z = _initial_guesses(c, phase)
    done = np.zeros(n, dtype=bool)
    for _ in range(max_sweeps):
        f = np.polyval(desc, z)
        bound = 4 * n * _EPS * np.polyval(absdesc, np.abs(z))
        done |= np.abs(f) <= bound
        if done.all():
            return z
        df = np.polyval(ddesc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = f / df
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = (1.0 / diff).sum(axis=1)
            step = ratio / (1.0 - ratio * s)
        step[~np.isfinite(step)] = 0.0
        active = ~done
        z[active] -= step[active]
    raise NoConvergence(f"Aberth iteration did not converge in {max_sweeps} sweeps (degree {n})")


def _cluster(z: np.ndarray, radius: float) -> list[list[int]]:
    n = len(z)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= radius * max(1.0, abs(z[i]), abs(z[j])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _polish(f: UniPoly, r: complex, m: int) -> complex:
    """Newton on the (m-1)-th derivative, which has a simple root at an m-fold root."""
    g = f.derivative(m - 1)
    dg = g.derivative()
    best, best_val = r, abs(g(r))
    for _ in range(8):
        d = dg(best)
        if d == 0:
            break
        cand = best - g(best) / d
        val = abs(g(cand))
        if val >= best_val:
            break
        best, best_val = cand, val
    return best


def _taylor_noise(f: UniPoly, r: complex, m: int, rel: float) -> np.ndarray:
    """Rounding-level size of the first m+1 Taylor coefficients of f at r."""
    absc = np.abs(f.array)
    ar = max(abs(r), 1.0)
    return np.array(
        [sum(absc[i] * ar ** (i - k) * comb(i, k) for i in range(k, len(absc))) for k in range(m + 1)]
    ) * rel


def _is_multiple_root(f: UniPoly, r: complex, m: int, spread: float, tol: Tolerances) -> bool:
    """Taylor coefficients below order m are small, the m-th is not."""
    t = f.taylor(r)
    noise = _taylor_noise(f, r, m, max(tol.zero_eps, 1e3 * _EPS))
    if abs(t[m]) <= noise[m]:
        return False
    s = max(spread, tol.cluster_radius * max(abs(r), 1.0))
    return all(abs(t[k]) <= 10 * abs(t[m]) * s ** (m - k) + noise[k] for k in range(m))


def _is_rounded_multiple_root(f: UniPoly, r: complex, m: int) -> bool:
    """After polishing, the Taylor coefficients below order m are pure rounding noise.

    An m-fold root perturbed by rounding splits into a cluster of radius
    about (eps / |t_m|)^(1/m), which exceeds cluster_radius for m >= 3.
    """
    t = f.taylor(r)
    noise = _taylor_noise(f, r, m, 1e3 * _EPS)
    return abs(t[m]) > noise[m] and all(abs(t[k]) <= noise[k] for k in range(m))


_WIDE = 1e-3


def roots_with_multiplicity(
    f: UniPoly, tol: Tolerances = DEFAULT_TOL, max_sweeps: int = 200
) -> RootSet:
    """Roots of ``f`` with multiplicities, merged within ``tol.cluster_radius``.

    Exact zeros are split off first (low-order coefficients below the zero
    threshold) but still take part in clustering, so a tiny nonzero root is
    not reported next to them. Clusters are replaced by their centroid,
    polished by Newton on the derivative of matching order. A wider cluster
    is also accepted when its polished centre is a multiple root to working
    precision, since rounding alone scatters an m-fold root by about
    eps^(1/m). Roots closer than cluster_radius are always merged, so the
    reported roots are pairwise farther apart than that.
    """
    if f.is_zero():
        raise ValueError("the zero polynomial has no finite root set")
    c = f.array
    scale = np.abs(c).max()
    k0 = 0
    while abs(c[k0]) <= tol.zero_eps * scale:
        k0 += 1
    rest = UniPoly(c[k0:])
    z = np.zeros(k0, dtype=complex)
    if rest.degree > 0:
        last = None
        for phase in (0.4, 1.3, 2.1):
            try:
                z = np.concatenate([z, aberth(rest.array, max_sweeps=max_sweeps, phase=phase)])
                break
            except NoConvergence as exc:
                last = exc
        else:
            raise last
    exact = np.arange(len(z)) < k0

    def merged(idx: np.ndarray) -> complex:
        if exact[idx].all():
            return 0j
        return complex(_polish(f, complex(z[idx].mean()), len(idx)))

    def centroid(idx: np.ndarray) -> complex:
        # order-m Newton is only trusted once the Taylor test validates m
        centre = merged(idx)
        spread = float(np.abs(z[idx] - z[idx].mean()).max())
        if _is_multiple_root(f, centre, len(idx), spread, tol):
            return centre
        return 0j if exact[idx].all() else complex(z[idx].mean())

    out: list[tuple[complex, int]] = []
    for wide in _cluster(z, _WIDE):
        wide = np.asarray(wide)
        if len(wide) > 1:
            centre = merged(wide)
            if _is_rounded_multiple_root(f, centre, len(wide)):
                out.append((centre, len(wide)))
                continue
        for sub in _cluster(z[wide], tol.cluster_radius):
            idx = wide[np.asarray(sub)]
            if len(idx) == 1:
                out.append((complex(z[idx[0]]), 1))
            else:
                # within cluster_radius the roots are one root at this tolerance
                out.append((centroid(idx), len(idx)))
    out.sort(key=lambda rm: (round(rm[0].real, 9), round(rm[0].imag, 9)))
    return RootSet(tuple(out))


# ---------------------------------------------------------------------------
# the projective system F = H = 0


class _System:
    """Equations and their gradients, normalized by coefficient size."""

    def __init__(self, polys: Sequence[TriPoly]):
        self.polys = [p for p in polys if not p.is_zero()]
        self.norms = [p.norm() for p in self.polys]
        self.grads = [gradient(p) for p in self.polys]

    def residual(self, v: np.ndarray) -> np.ndarray:
        return np.array([p(v) / n for p, n in zip(self.polys, self.norms)])

    def jacobian(self, v: np.ndarray) -> np.ndarray:
        return np.array([[g(v) / n for g in gs] for gs, n in zip(self.grads, self.norms)])


def _gauss_newton(system: _System, v: np.ndarray, iters: int = 60) -> tuple[np.ndarray, float]:
    """Polish ``v`` in the affine chart of its largest coordinate."""
    v = canonicalize(v)
    res = np.abs(system.residual(v)).max()
    for _ in range(iters):
        k = int(np.argmax(np.abs(v)))
        free = [i for i in range(3) if i != k]
        r = system.residual(v)
        J = system.jacobian(v)[:, free]
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        cand = v.copy()
        cand[free] += step
        cand = canonicalize(cand)
        cres = np.abs(system.residual(cand)).max()
        if not np.isfinite(cres) or (cres > res and np.abs(step).max() > 1e-12):
            break
        v, res = cand, cres
        if np.abs(step).max() <= 4 * _EPS:
            break
    return v, float(res)


def _tangency(F: TriPoly, H: TriPoly, v: np.ndarray) -> float:
    gf = np.array([g(v) for g in gradient(F)])
    gh = np.array([g(v) for g in gradient(H)])
    if np.abs(gh).max() <= 1e-12 * H.norm():
        return 0.0
    return chordal_distance(gf, gh)


class _Refiner:
    """Newton on (F, H); at tangential intersections, Gauss-Newton on the
    deflated system (F, H, grad F x grad H), which is regular there."""

    def __init__(self, F: TriPoly, H: TriPoly):
        self.F, self.H = F, H
        gf, gh = gradient(F), gradient(H)
        cross = [gf[1] * gh[2] - gf[2] * gh[1], gf[2] * gh[0] - gf[0] * gh[2], gf[0] * gh[1] - gf[1] * gh[0]]
        self.plain = _System([F, H])
        self.deflated = _System([F, H, *cross])

    def __call__(self, v: np.ndarray) -> tuple[np.ndarray, float]:
        v, res = _gauss_newton(self.plain, v)
        if _tangency(self.F, self.H, v) < 1e-3:
            w, wres = _gauss_newton(self.deflated, v)
            if wres <= max(res, 1e-12) * 10 and chordal_distance(v, w) < 1e-4:
                v = w
                res = float(np.abs(self.plain.residual(w)).max())
        return v, res


def _generic_frame(seed: int) -> np.ndarray:
    if seed == 0:
        return np.eye(3, dtype=complex)
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _chart_candidates(
    F: TriPoly, H: TriPoly, chart: str, tol: Tolerances
) -> tuple[list[np.ndarray], int] | None:
    others = [v for v in "xyz" if v != chart]
    surviving, eliminate = others
    Fv = bivariate_view(F, chart, eliminate)
    Hv = bivariate_view(H, chart, eliminate)
    while Fv and Fv[-1].is_zero():
        Fv.pop()
    while Hv and Hv[-1].is_zero():
        Hv.pop()
    if not Fv or not Hv:
        return None
    res = resultant_eliminate(Fv, Hv)
    if res.is_zero() or res.degree <= 0:
        return None if res.is_zero() else ([], 0)
    idx = {v: i for i, v in enumerate("xyz")}
    candidates = []
    for x0, m in roots_with_multiplicity(res, tol):
        fy = UniPoly([c(x0) for c in Fv])
        hy = UniPoly([c(x0) for c in Hv])
        if fy.degree < 1 or hy.degree < 1:
            continue
        fr = roots_with_multiplicity(fy, tol).values()
        hr = roots_with_multiplicity(hy, tol).values()
        pairs = sorted(
            (abs(a - b) / max(1.0, abs(a)), a, b) for a in fr for b in hr
        )
        taken = 0
        for d, a, _ in pairs:
            if taken >= m or (taken and d > 1e-2):
                break
            v = np.zeros(3, dtype=complex)
            v[idx[chart]] = 1.0
            v[idx[surviving]] = x0
            v[idx[eliminate]] = a
            candidates.append(v)
            taken += 1
    return candidates, res.degree


def solve_curve_system(
    F: TriPoly,
    H: TriPoly,
    tol: Tolerances = DEFAULT_TOL,
    charts: Sequence[str] = ("z", "y", "x"),
    seed: int = 0,
) -> list[ProjPoint]:
    """All points of P^2 where F and H both vanish, each reported once.

    Works chart by chart: eliminate one variable by a resultant, find the
    roots in the other, back-substitute by matching roots of the two
    specializations, then polish every candidate in the original coordinates.
    ``seed`` > 0 first moves the problem to a random unitary frame so that no
    two solutions share a projection; charts are visited until one of them
    sees the full Bezout count.
    """
    if F.is_zero() or H.is_zero():
        raise DegenerateSystem("one of the equations is identically zero")
    M = _generic_frame(seed)
    Ft, Ht = (F, H) if seed == 0 else (F.transform(M), H.transform(M))
    bezout = F.degree * H.degree
    refine = _Refiner(F, H)
    fn, hn = F.norm(), H.norm()
    found: list[tuple[ProjPoint, float]] = []
    seen_any = False
    for chart in charts:
        got = _chart_candidates(Ft, Ht, chart, tol)
        if got is None:
            continue
        seen_any = True
        candidates, deg = got
        for v in candidates:
            w, _ = refine(M @ v)
            rf, rh = abs(F(w)) / fn, abs(H(w)) / hn
            if rf < 1e-9 and rh < 1e-8:
                found.append((ProjPoint(w), max(rf, rh)))
        if deg >= bezout:
            break
    if not seen_any:
        raise DegenerateSystem("resultant vanishes identically on every chart")
    found.sort(key=lambda pr: pr[1])
    kept: list[ProjPoint] = []
    for p, _ in found:
        if not any(p.close_to(q, tol.point_eps) for q in kept):
            kept.append(p)
    return sorted(kept, key=ProjPoint.sort_key)


def smoothness_probe(F: TriPoly, pts: Sequence[ProjPoint], tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff grad F is nonzero at every point (relative to the coefficient size)."""
    grads = gradient(F)
    scale = F.norm()
    for p in pts:
        v = p.array if isinstance(p, ProjPoint) else canonicalize(p)
        if max(abs(g(v)) for g in grads) <= tol.zero_eps * scale:
            return False
    return True
