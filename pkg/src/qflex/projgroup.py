"""Finite groups of projective transformations acting on plane curves."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, InvarianceViolation, NotInvariant, QFlexError
from .flexlab import FlexRecord
from .polycore import DEFAULT_TOL, TriPoly, Tolerances, UniPoly, restrict_line
from .rootsolve import ProjPoint, canonicalize, dedup_points, roots_with_multiplicity

_MAP_EPS = 1e-9


def _canonical_matrix(m: np.ndarray) -> np.ndarray:
    flat = m.reshape(-1)
    mods = np.abs(flat)
    top = mods.max()
    if top == 0:
        raise ValueError("zero matrix")
    k = int(np.argmax(mods >= top * (1 - 1e-9)))
    return m / flat[k]


@dataclass(frozen=True, eq=False)
class ProjMap:
    """An invertible 3x3 matrix up to a nonzero scalar."""

    matrix: np.ndarray

    def __init__(self, matrix):
        m = np.array(matrix, dtype=complex).reshape(3, 3)
        if abs(np.linalg.det(m)) <= 1e-12 * np.abs(m).max() ** 3:
            raise ValueError("singular matrix does not define a projective map")
        m = _canonical_matrix(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "ProjMap":
        return cls(np.eye(3))

    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        return ProjMap(self.matrix @ other.matrix)

    def inverse(self) -> "ProjMap":
        return ProjMap(np.linalg.inv(self.matrix))

    def equals(self, other: "ProjMap", eps: float = _MAP_EPS) -> bool:
        return float(np.abs(self.matrix - other.matrix).max()) <= eps

    def is_identity(self, eps: float = _MAP_EPS) -> bool:
        return self.equals(ProjMap.identity(), eps)

    def order(self, limit: int = 256) -> int:
        g = self
        for n in range(1, limit + 1):
            if g.is_identity():
                return n
            g = g @ self
        raise CapExceeded(f"element order exceeds {limit}")

    def __call__(self, p: ProjPoint) -> ProjPoint:
        return act(self, p)

    def __repr__(self):
        rows = ["[" + ", ".join(_fmt(c) for c in r) + "]" for r in self.matrix]
        return "ProjMap(" + ", ".join(rows) + ")"


def _fmt(c: complex) -> str:
    if abs(c.imag) < 1e-12:
        return f"{c.real:g}"
    if abs(c.real) < 1e-12:
        return f"{c.imag:g}i"
    return f"{c.real:g}{c.imag:+g}i"


def act(m: ProjMap, p: ProjPoint) -> ProjPoint:
    return ProjPoint(m.matrix @ p.array)


@dataclass(frozen=True)
class ProjGroup:
    elements: tuple[ProjMap, ...]
    generator_indices: tuple[int, ...] = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self, g: ProjMap) -> int:
        for i, h in enumerate(self.elements):
            if h.equals(g):
                return i
        raise KeyError(g)

    def __contains__(self, g: ProjMap) -> bool:
        return any(h.equals(g) for h in self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


def close_group(generators: Sequence[ProjMap], cap: int = 256) -> ProjGroup:
    """Breadth-first closure of ``generators`` under composition."""
    elements = [ProjMap.identity()]
    gen_idx = []
    for g in generators:
        for i, h in enumerate(elements):
            if h.equals(g):
                gen_idx.append(i)
                break
        else:
            elements.append(g)
            gen_idx.append(len(elements) - 1)
    frontier = list(elements)
    while frontier:
        new = []
        for h in frontier:
            for g in generators:
                c = g @ h
                if not any(c.equals(e) for e in elements):
                    elements.append(c)
                    new.append(c)
                    if len(elements) > cap:
                        raise CapExceeded(f"group closure exceeded {cap} elements")
        frontier = new
    # finite closure under products of a set containing the identity is a group,
    # but inverses are checked anyway since the products are floating point
    for e in elements:
        if not any(e.inverse().equals(f) for f in elements):
            raise QFlexError("closure is missing an inverse; generators are not of finite order")
    return ProjGroup(tuple(elements), tuple(gen_idx))


def is_abelian(G: ProjGroup) -> bool:
    return all((g @ h).equals(h @ g) for g in G for h in G)


def element_order_histogram(G: ProjGroup) -> dict[int, int]:
    return dict(sorted(Counter(g.order() for g in G).items()))


def orbit(G: ProjGroup, p: ProjPoint, eps: float = DEFAULT_TOL.point_eps) -> list[ProjPoint]:
    return dedup_points([act(g, p) for g in G], eps)


def stabilizer(G: ProjGroup, p: ProjPoint, eps: float = DEFAULT_TOL.point_eps) -> list[ProjMap]:
    stab = [g for g in G if act(g, p).close_to(p, eps)]
    n_orb = len(orbit(G, p, eps))
    if n_orb * len(stab) != G.order:
        raise QFlexError(
            f"orbit-stabilizer violated at {p}: |orbit| {n_orb} x |stab| {len(stab)} != {G.order}"
        )
    return stab


def _on_curve(F: TriPoly, v: np.ndarray, eps: float = 1e-9) -> bool:
    return abs(F(canonicalize(v))) <= eps * F.norm()


def check_invariant(G: ProjGroup | Iterable[ProjMap], F: TriPoly, eps: float = 1e-9) -> None:
    """Raise NotInvariant unless F o g is proportional to F for every g."""
    f = F.coefficient_vector()
    for g in G:
        h = F.transform(g.matrix).coefficient_vector()
        c = np.vdot(f, h) / np.vdot(f, f)
        if np.abs(h - c * f).max() > eps * np.abs(f).max():
            raise NotInvariant(f"{g} does not preserve the curve")


def _fixed_points_on_curve(g: ProjMap, F: TriPoly, tol: Tolerances) -> list[ProjPoint]:
    M = g.matrix
    w, V = np.linalg.eig(M)
    groups: list[list[int]] = []
    for i in range(3):
        for grp in groups:
            if abs(w[grp[0]] - w[i]) <= 1e-8 * np.abs(w).max():
                grp.append(i)
                break
        else:
            groups.append([i])
    out = []
    for grp in groups:
        lam = w[grp[0]]
        if len(grp) == 1:
            v = V[:, grp[0]]
            if _on_curve(F, v):
                out.append(ProjPoint(v))
        elif len(grp) == 2:
            # a pencil of fixed points: intersect the fixed line with the curve
            _, _, vh = np.linalg.svd(M - lam * np.eye(3))
            u, t_dir = vh[-1].conj(), vh[-2].conj()
            g_line = restrict_line(F, u, t_dir)
            poly = UniPoly(g_line.coeffs, zero_eps=tol.zero_eps)
            if poly.degree < F.degree:
                out.append(ProjPoint(t_dir))
            if poly.degree > 0:
                for t, _ in roots_with_multiplicity(poly, tol):
                    out.append(ProjPoint(u + t * t_dir))
    return out


def fixed_locus(
    G: ProjGroup, F: TriPoly, tol: Tolerances = DEFAULT_TOL
) -> list[tuple[ProjPoint, int]]:
    """Curve points with nontrivial stabilizer, each with its stabilizer order."""
    check_invariant([G.elements[i] for i in G.generator_indices] or G.elements, F)
    cands: list[ProjPoint] = []
    for g in G:
        if g.is_identity():
            continue
        cands.extend(_fixed_points_on_curve(g, F, tol))
    out = []
    for p in dedup_points(cands, tol.point_eps):
        k = len(stabilizer(G, p, tol.point_eps))
        if k > 1:
            out.append((p, k))
    return out


@dataclass(frozen=True)
class OrbitSignature:
    """Orbit decomposition in the ``count_size`` shorthand, split by kind.

    ``entries`` holds (orbit_size, count, kind) triples, sorted.
    """

    entries: tuple[tuple[int, int, str], ...] = field(default=())

    @classmethod
    def from_orbits(cls, orbits: Iterable[tuple[int, str]]) -> "OrbitSignature":
        c = Counter(orbits)
        return cls(tuple(sorted((size, n, kind) for (size, kind), n in c.items())))

    @classmethod
    def parse(cls, text: str) -> "OrbitSignature":
        """Parse e.g. ``"1_4 hyperflex + 2_8 ordinary"``."""
        entries = []
        for part in text.split("+"):
            part = part.strip()
            if not part:
                continue
            shape, kind = part.split()
            count, size = shape.split("_")
            entries.append((int(size), int(count), kind))
        return cls(tuple(sorted(entries)))

    def total_weight(self) -> int:
        return sum(size * n * (2 if kind == "hyperflex" else 1) for size, n, kind in self.entries)

    def count(self, kind: str) -> int:
        return sum(size * n for size, n, k in self.entries if k == kind)

    def __str__(self):
        parts = sorted(self.entries, key=lambda e: (e[2] != "hyperflex", e[0]))
        return " + ".join(f"{n}_{size} {kind}" for size, n, kind in parts) or "none"


def orbit_partition(
    G: ProjGroup, records: Sequence[FlexRecord], tol: Tolerances = DEFAULT_TOL
) -> tuple[OrbitSignature, list[int]]:
    """Split the flex records into G-orbits; returns the signature and labels."""
    labels = [-1] * len(records)
    orbits: list[tuple[int, str]] = []
    for i, rec in enumerate(records):
        if labels[i] >= 0:
            continue
        oid = len(orbits)
        members = orbit(G, rec.point, tol.point_eps)
        for q in members:
            j = next(
                (j for j, r in enumerate(records) if r.point.close_to(q, tol.point_eps)), None
            )
            if j is None:
                raise InvarianceViolation(f"image {q} of flex {rec.point} is not a flex")
            if records[j].kind != rec.kind:
                raise InvarianceViolation(f"kind changes along the orbit of {rec.point}")
            labels[j] = oid
        orbits.append((len(members), rec.kind))
    return OrbitSignature.from_orbits(orbits), labels


def hausdorff(A: Sequence[ProjPoint], B: Sequence[ProjPoint]) -> float:
    """Hausdorff distance in the chordal metric."""
    if not A or not B:
        return 0.0 if not A and not B else float("inf")
    d = np.array([[p.distance(q) for q in B] for p in A])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
