"""Hessian, tangent lines, contact orders and flex classification."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateLine, NoConvergence, SingularPoint, WeightSumMismatch
from .polycore import DEFAULT_TOL, TriPoly, Tolerances, gradient, partial, restrict_line
from .rootsolve import ProjPoint, canonicalize, smoothness_probe, solve_curve_system

ORDINARY = "ordinary"
HYPERFLEX = "hyperflex"

GAP_SEQUENCES = {1: (1, 2, 4), 2: (1, 2, 5)}


@dataclass(frozen=True)
class FlexRecord:
    point: ProjPoint
    tangent: tuple[complex, complex, complex]
    contact_order: int
    weight: int
    kind: str
    orbit: int | None = None

    @property
    def gap_sequence(self) -> tuple[int, ...]:
        return GAP_SEQUENCES[self.weight]


def hessian(F: TriPoly) -> TriPoly:
    """Determinant of the matrix of second partials; degree 3(d - 2)."""
    if F.degree < 2:
        raise ValueError("the Hessian needs degree at least 2")
    first = [partial(F, v) for v in range(3)]
    m = [[partial(first[i], j) for j in range(3)] for i in range(3)]
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def tangent_line(F: TriPoly, p: ProjPoint, tol: Tolerances = DEFAULT_TOL) -> tuple[complex, ...]:
    v = p.array if isinstance(p, ProjPoint) else canonicalize(p)
    g = np.array([d(v) for d in gradient(F)])
    if np.abs(g).max() <= tol.zero_eps * F.norm():
        raise SingularPoint(f"gradient vanishes at {p}")
    return tuple(complex(c) for c in canonicalize(g))


def line_direction(line: Sequence[complex], p: ProjPoint) -> np.ndarray:
    """A direction inside ``line`` independent of ``p``.

    Starts from the basis vector most orthogonal to the line's normal,
    projects it into the line, and falls back to the next basis vector when
    the projection is (nearly) parallel to ``p``.
    """
    L = np.asarray(line, dtype=complex)
    pv = p.array / np.linalg.norm(p.array)
    best, best_score = None, -1.0
    for k in np.argsort(np.abs(L), kind="stable"):
        e = np.zeros(3, dtype=complex)
        e[k] = 1.0
        v = e - np.conj(L) * L[k] / np.vdot(L, L).real
        n = np.linalg.norm(v)
        if n == 0:
            continue
        v /= n
        score = np.sqrt(max(0.0, 1.0 - abs(np.vdot(pv, v)) ** 2))
        if score > 0.5:
            return v
        if score > best_score:
            best, best_score = v, score
    return best


def contact_order(
    F: TriPoly,
    line: Sequence[complex],
    p: ProjPoint,
    tol: Tolerances = DEFAULT_TOL,
    direction: Sequence[complex] | None = None,
) -> int:
    """Multiplicity of t = 0 in F(p + t v) for v a direction along ``line``."""
    pv = p.array / np.linalg.norm(p.array)
    v = line_direction(line, p) if direction is None else np.asarray(direction, dtype=complex)
    v = v / np.linalg.norm(v)
    g = np.array(restrict_line(F, pv, v).coeffs)
    scale = np.abs(g).max() if len(g) else 0.0
    if scale <= tol.zero_eps * F.norm():
        raise DegenerateLine(f"the line {tuple(line)} lies on the curve")
    for k, c in enumerate(g):
        if abs(c) > tol.zero_eps * scale * 1e2:
            return k
    raise DegenerateLine("no nonvanishing Taylor coefficient")


def flex_count_target(degree: int) -> int:
    """Number of flexes counted with weight on a smooth plane curve."""
    return 3 * degree * (degree - 2)


def classify_flexes(
    F: TriPoly, tol: Tolerances = DEFAULT_TOL, seeds: Sequence[int] = (1, 2, 3, 4, 5)
) -> list[FlexRecord]:
    """All flexes of the smooth quartic ``F`` with weights and kinds.

    The solve is retried in fresh random frames until the weights add up to
    the expected total; if none does, WeightSumMismatch is raised.
    """
    H = hessian(F)
    target = flex_count_target(F.degree)
    last = None
    for seed in seeds:
        try:
            pts = solve_curve_system(F, H, tol, seed=seed)
        except NoConvergence as exc:
            last = exc
            continue
        if not smoothness_probe(F, pts, tol):
            raise SingularPoint("curve is singular at a solution of F = H = 0")
        records = []
        for p in pts:
            line = tangent_line(F, p, tol)
            order = contact_order(F, line, p, tol)
            if order > 4:
                raise WeightSumMismatch(f"contact order {order} impossible on a smooth quartic")
            if order < 3:
                continue
            w = order - 2
            records.append(FlexRecord(p, line, order, w, ORDINARY if w == 1 else HYPERFLEX))
        total = sum(r.weight for r in records)
        if total == target:
            return records
        last = WeightSumMismatch(f"flex weights sum to {total}, expected {target} (seed {seed})")
    raise last
