"""The two-parameter Kuribayashi family

    C_{a,b}: x^4 + y^4 + z^4 + a x^2 y^2 + b (x^2 + y^2) z^2 = 0

with its symmetry groups, the P/Q condition polynomials, the predicted
classification tables and the verdict engine comparing them with computed
flexes.
"""
from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import DegenerateParameters, NearBoundaryWarning
from .flexlab import HYPERFLEX, ORDINARY, FlexRecord, classify_flexes, hessian
from .polycore import (
    DEFAULT_TOL,
    Tolerances,
    TriPoly,
    UniPoly,
    restrict_chart,
    restrict_diagonal,
    resultant_eliminate,
    sylvester_resultant,
)
from .projgroup import (
    OrbitSignature,
    ProjGroup,
    ProjMap,
    check_invariant,
    close_group,
    orbit_partition,
)
from .rootsolve import ProjPoint, roots_with_multiplicity

CONFIRMED = "CONFIRMED"
REFUTED = "REFUTED"
DEGENERATE = "DEGENERATE"

NEAR_BOUNDARY_FACTOR = 1e3


@dataclass(frozen=True)
class FamilyParams:
    a: complex
    b: complex
    zero_eps: float = field(default=DEFAULT_TOL.zero_eps, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if not all(np.isfinite([self.a.real, self.a.imag, self.b.real, self.b.imag])):
            raise DegenerateParameters(f"parameters must be finite, got a={self.a}, b={self.b}")
        bad = self.vanishing_factors()
        if bad:
            raise DegenerateParameters(
                f"nondegeneracy fails for a={self.a}, b={self.b}: " + ", ".join(bad) + " = 0"
            )

    def vanishing_factors(self) -> list[str]:
        a, b = self.a, self.b
        factors = {
            "a^2-4": (a * a - 4, abs(a) ** 2 + 4),
            "b^2-4": (b * b - 4, abs(b) ** 2 + 4),
            "a^2-1": (a * a - 1, abs(a) ** 2 + 1),
            "b^2-a-2": (b * b - a - 2, abs(b) ** 2 + abs(a) + 2),
        }
        return [name for name, (v, s) in factors.items() if abs(v) <= self.zero_eps * s]

    @property
    def b_is_zero(self) -> bool:
        return abs(self.b) <= self.zero_eps


def build_curve(params: FamilyParams) -> TriPoly:
    a, b = params.a, params.b
    return TriPoly.from_terms(
        {
            (4, 0, 0): 1,
            (0, 4, 0): 1,
            (0, 0, 4): 1,
            (2, 2, 0): a,
            (2, 0, 2): b,
            (0, 2, 2): b,
        },
        4,
        zero_eps=0.0,
    )


# ---------------------------------------------------------------------------
# condition polynomials


def condition_P(params: FamilyParams) -> complex:
    a, b = params.a, params.b
    return a * a + b * b - a * b * b


def condition_Q(params: FamilyParams) -> complex:
    a, b = params.a, params.b
    return 36 - 12 * a + a * a - 10 * b * b + 3 * a * b * b


def _P_scale(params: FamilyParams) -> float:
    a, b = abs(params.a), abs(params.b)
    return a * a + b * b + a * b * b


def _Q_scale(params: FamilyParams) -> float:
    a, b = abs(params.a), abs(params.b)
    return 36 + 12 * a + a * a + 10 * b * b + 3 * a * b * b


def relative_P(params: FamilyParams) -> float:
    return abs(condition_P(params)) / _P_scale(params)


def relative_Q(params: FamilyParams) -> float:
    return abs(condition_Q(params)) / _Q_scale(params)


def in_gamma(params: FamilyParams, tol: Tolerances = DEFAULT_TOL) -> bool:
    return relative_P(params) <= tol.zero_eps and relative_Q(params) <= tol.zero_eps


def gamma_resultant() -> UniPoly:
    """Res_a(P, Q) as a polynomial in b; its roots are the b-coordinates of Gamma."""
    P = [UniPoly([0, 0, 1]), UniPoly([0, 0, -1]), UniPoly([1])]
    Q = [UniPoly([36, 0, -10]), UniPoly([-12, 0, 3]), UniPoly([1])]
    return resultant_eliminate(P, Q)


def gamma_points(tol: Tolerances = DEFAULT_TOL) -> list[tuple[complex, complex]]:
    """Common zeros (a, b) of P and Q with b != 0 that satisfy nondegeneracy."""
    out: list[tuple[complex, complex]] = []
    for b, _ in roots_with_multiplicity(gamma_resultant(), tol):
        if abs(b) <= tol.cluster_radius:
            continue
        pa = UniPoly([b * b, -b * b, 1])
        qa = UniPoly([36 - 10 * b * b, 3 * b * b - 12, 1])
        qroots = roots_with_multiplicity(qa, tol).values()
        for a, _ in roots_with_multiplicity(pa, tol):
            if min(abs(a - q) for q in qroots) > 1e-6 * max(1.0, abs(a)):
                continue
            try:
                FamilyParams(a, b, zero_eps=tol.zero_eps)
            except DegenerateParameters:
                continue
            if not any(abs(a - a2) + abs(b - b2) <= tol.point_eps for a2, b2 in out):
                out.append((complex(a), complex(b)))
    return sorted(out, key=lambda ab: (round(ab[1].real, 9), round(ab[1].imag, 9), round(ab[0].real, 9)))


# ---------------------------------------------------------------------------
# the predicted tables


@dataclass(frozen=True)
class Outcome:
    ordinary: int
    hyperflex: int
    signature: OrbitSignature

    def __str__(self):
        return f"{self.ordinary} ordinary, {self.hyperflex} hyperflex ({self.signature})"


def _outcome(sig: str) -> Outcome:
    s = OrbitSignature.parse(sig)
    return Outcome(s.count(ORDINARY), s.count(HYPERFLEX), s)


@dataclass(frozen=True)
class PredictedRow:
    """One row of the classification tables; ``alternatives`` lists every
    admissible outcome (rows with a "respectively" clause have two)."""

    alternatives: tuple[Outcome, ...]
    source: str

    @property
    def ordinary_count(self) -> frozenset[int]:
        return frozenset(o.ordinary for o in self.alternatives)

    @property
    def hyperflex_count(self) -> frozenset[int]:
        return frozenset(o.hyperflex for o in self.alternatives)

    @property
    def signatures(self) -> frozenset[OrbitSignature]:
        return frozenset(o.signature for o in self.alternatives)

    def match(self, ordinary: int, hyperflex: int, signature: OrbitSignature) -> int | None:
        for i, o in enumerate(self.alternatives):
            if (o.ordinary, o.hyperflex, o.signature) == (ordinary, hyperflex, signature):
                return i
        return None


ROWS = {
    "b=0, a in {0,6}": ("1_4 hyperflex + 1_8 hyperflex",),
    "b=0, otherwise": ("1_16 ordinary + 1_4 hyperflex",),
    "b!=0, (a,b) in Gamma": ("1_8 ordinary + 2_4 hyperflex",),
    "b!=0, P=0, Q!=0": ("1_4 hyperflex + 1_8 hyperflex", "2_8 ordinary + 1_4 hyperflex"),
    "b!=0, P!=0, Q=0": ("1_4 hyperflex + 1_8 hyperflex", "2_8 ordinary + 1_4 hyperflex"),
    "b!=0, PQ!=0": ("3_8 ordinary", "1_8 ordinary + 1_8 hyperflex"),
}


def table_row(source: str) -> PredictedRow:
    return PredictedRow(tuple(_outcome(s) for s in ROWS[source]), source)


def predicted_classification(params: FamilyParams, tol: Tolerances = DEFAULT_TOL) -> PredictedRow:
    if params.b_is_zero:
        a = params.a
        special = abs(a) <= tol.zero_eps or abs(a - 6) <= 6 * tol.zero_eps
        return table_row("b=0, a in {0,6}" if special else "b=0, otherwise")
    p0 = relative_P(params) <= tol.zero_eps
    q0 = relative_Q(params) <= tol.zero_eps
    if p0 and q0:
        return table_row("b!=0, (a,b) in Gamma")
    if p0:
        return table_row("b!=0, P=0, Q!=0")
    if q0:
        return table_row("b!=0, P!=0, Q=0")
    return table_row("b!=0, PQ!=0")


# ---------------------------------------------------------------------------
# symmetry groups

_I = 1j
SIGMA = ProjMap([[-1, 0, 0], [0, 1, 0], [0, 0, 1]])
TAU = ProjMap([[_I, 0, 0], [0, -_I, 0], [0, 0, 1]])
RHO = ProjMap([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
SIGMA1 = ProjMap([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
TAU1 = ProjMap([[0, 1, 0], [-1, 0, 0], [0, 0, 1]])


def standard_generators(b_is_zero: bool) -> list[ProjMap]:
    """sigma, tau, rho for b = 0 (order 16); sigma1, tau1 otherwise (order 8)."""
    return [SIGMA, TAU, RHO] if b_is_zero else [SIGMA1, TAU1]


def symmetry_group(params: FamilyParams) -> ProjGroup:
    return close_group(standard_generators(params.b_is_zero))


# ---------------------------------------------------------------------------
# closed-form hyperflex conditions


@dataclass(frozen=True)
class HyperflexCondition:
    a: complex
    seed: ProjPoint
    label: str


def hyperflex_condition_roots(b: complex) -> list[HyperflexCondition]:
    """The four values of a for which a fixed point of the order-8 group is a
    flex, each paired with the orbit seed that becomes a hyperflex."""
    b = complex(b)
    if b == 0:
        raise ValueError("hyperflex conditions are stated for b != 0")
    r4 = cmath.sqrt(b * b - 4)
    r32 = cmath.sqrt(9 * b * b - 32)
    beta = cmath.sqrt(2) / cmath.sqrt(-b + r4)
    alpha1 = 0.25 * cmath.sqrt(r32 - 3 * b)
    alpha3 = 0.25j * cmath.sqrt(r32 + 3 * b)
    return [
        HyperflexCondition((b * b - b * r4) / 2, ProjPoint.of(beta, 0, 1), "[beta:0:1]"),
        HyperflexCondition((b * b + b * r4) / 2, ProjPoint.of(1 / beta, 0, 1), "[1/beta:0:1]"),
        HyperflexCondition((12 - 3 * b * b - b * r32) / 2, ProjPoint.of(alpha1, alpha1, 1), "[alpha1:alpha1:1]"),
        HyperflexCondition((12 - 3 * b * b + b * r32) / 2, ProjPoint.of(alpha3, alpha3, 1), "[alpha3:alpha3:1]"),
    ]


def fixed_orbit_seeds(params: FamilyParams) -> dict[str, list[ProjPoint]]:
    """Seeds of the orbits with nontrivial stabilizer, from the defining
    equations of the fixed lines (not from the group)."""
    a, b = params.a, params.b
    if params.b_is_zero:
        beta = roots_with_multiplicity(UniPoly([1, 0, a, 0, 1])).values()
        alpha = roots_with_multiplicity(UniPoly([1, 0, 0, 0, a + 2])).values()
        delta = roots_with_multiplicity(UniPoly([1, 0, 0, 0, 1])).values()
        return {
            "[beta:1:0]": [ProjPoint.of(r, 1, 0) for r in beta],
            "[alpha:alpha:1]": [ProjPoint.of(r, r, 1) for r in alpha],
            "[0:delta:1]": [ProjPoint.of(0, r, 1) for r in delta],
        }
    alpha = roots_with_multiplicity(UniPoly([1, 0, 2 * b, 0, a + 2])).values()
    beta = roots_with_multiplicity(UniPoly([1, 0, b, 0, 1])).values()
    delta = roots_with_multiplicity(UniPoly([1, 0, a, 0, 1])).values()
    return {
        "[alpha:alpha:1]": [ProjPoint.of(r, r, 1) for r in alpha],
        "[beta:0:1]": [ProjPoint.of(r, 0, 1) for r in beta],
        "[delta:1:0]": [ProjPoint.of(r, 1, 0) for r in delta],
    }


# ---------------------------------------------------------------------------
# verdict engine


@dataclass(frozen=True)
class VerdictReport:
    params: FamilyParams
    predicted: PredictedRow
    records: tuple[FlexRecord, ...]
    signature: OrbitSignature
    group_order: int
    verdict: str
    realized: int | None

    @property
    def ordinary(self) -> int:
        return sum(r.kind == ORDINARY for r in self.records)

    @property
    def hyperflex(self) -> int:
        return sum(r.kind == HYPERFLEX for r in self.records)

    @property
    def outcome(self) -> Outcome:
        return Outcome(self.ordinary, self.hyperflex, self.signature)


def classify_instance(
    params: FamilyParams, tol: Tolerances = DEFAULT_TOL, group: ProjGroup | None = None
) -> tuple[list[FlexRecord], OrbitSignature, ProjGroup]:
    """Flexes of C_{a,b} labelled by orbit under the family's symmetry group."""
    F = build_curve(params)
    G = group if group is not None else symmetry_group(params)
    check_invariant(G, F)
    records = classify_flexes(F, tol)
    sig, labels = orbit_partition(G, records, tol)
    records = [replace(r, orbit=k) for r, k in zip(records, labels)]
    return records, sig, G


def verify_family_instance(params: FamilyParams, tol: Tolerances = DEFAULT_TOL) -> VerdictReport:
    """Compute the flexes of C_{a,b} and compare with the predicted table row."""
    predicted = predicted_classification(params, tol)
    near = False
    if not params.b_is_zero:
        for name, rel in (("P", relative_P(params)), ("Q", relative_Q(params))):
            if tol.zero_eps < rel < NEAR_BOUNDARY_FACTOR * tol.zero_eps:
                warnings.warn(
                    f"{name}(a,b) is {rel:.3g} (relative), just outside the zero band",
                    NearBoundaryWarning,
                    stacklevel=2,
                )
                near = True
    records, sig, G = classify_instance(params, tol)
    ordinary = sum(r.kind == ORDINARY for r in records)
    hyper = sum(r.kind == HYPERFLEX for r in records)
    realized = predicted.match(ordinary, hyper, sig)
    if near:
        verdict = DEGENERATE
    else:
        verdict = CONFIRMED if realized is not None else REFUTED
    return VerdictReport(params, predicted, tuple(records), sig, G.order, verdict, realized)


# ---------------------------------------------------------------------------
# slice resultants


SLICES = ("y=0", "z=0", "diagonal")


def slice_restrictions(params: FamilyParams, slice_: str) -> tuple[UniPoly, UniPoly]:
    """(F, H) restricted to [x:0:1], [x:1:0] or [x:x:1], as polynomials in x."""
    F = build_curve(params)
    H = hessian(F)
    if slice_ == "y=0":
        return restrict_chart(F, "z", "x", 0.0), restrict_chart(H, "z", "x", 0.0)
    if slice_ == "z=0":
        return restrict_chart(F, "y", "x", 0.0), restrict_chart(H, "y", "x", 0.0)
    if slice_ == "diagonal":
        return restrict_diagonal(F), restrict_diagonal(H)
    raise ValueError(f"unknown slice {slice_!r}; expected one of {SLICES}")


def slice_resultant(params: FamilyParams, slice_: str) -> complex:
    """Res_x(H|slice, F|slice), computed numerically."""
    f, h = slice_restrictions(params, slice_)
    return sylvester_resultant(h, f)


def _q_typo(params: FamilyParams) -> complex:
    a, b = params.a, params.b
    return 36 - 12 * a + a * a - 10 * b * b + 3 * a * a


DIAGONAL_CANDIDATES = {"3ab^2": condition_Q, "3a^2": _q_typo}


def slice_closed_form(params: FamilyParams, slice_: str, last_factor: str = "3ab^2") -> complex:
    """The factor g(a, b) with Res = const * g^2 on the given slice."""
    a, b = params.a, params.b
    if slice_ == "y=0":
        return (b * b - 4) ** 2 * condition_P(params)
    if slice_ == "z=0":
        return (a - 2) ** 3 * (a + 2) ** 2 * b * b
    if slice_ == "diagonal":
        return (a + 2) * (2 + a - b * b) ** 2 * DIAGONAL_CANDIDATES[last_factor](params)
    raise ValueError(f"unknown slice {slice_!r}; expected one of {SLICES}")


def proportionality_deviation(numeric: Sequence[complex], closed: Sequence[complex]) -> float:
    """Largest relative spread of numeric_i / closed_i^2 around their median ratio."""
    r = np.array([n / c**2 for n, c in zip(numeric, closed)])
    ref = complex(np.median(r.real) + 1j * np.median(r.imag))
    return float(np.abs(r - ref).max() / abs(ref))


def identify_diagonal_factor(samples: Sequence[FamilyParams]) -> tuple[str, dict[str, float]]:
    """Which candidate last factor makes the diagonal resultant a constant times g^2."""
    numeric = [slice_resultant(p, "diagonal") for p in samples]
    devs = {
        name: proportionality_deviation(numeric, [slice_closed_form(p, "diagonal", name) for p in samples])
        for name in DIAGONAL_CANDIDATES
    }
    return min(devs, key=devs.get), devs


def b0_eliminant_factor(a: complex) -> UniPoly:
    """h(x) with Res_y(H(x,y,1), F(x,y,1)) = const * h(x)^2 on C_{a,0}."""
    a = complex(a)
    return UniPoly([4 * a * a, 0, 0, 0, 144 - 48 * a * a + 3 * a**4, 0, 0, 0, 144 - 72 * a * a + 9 * a**4])
