import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from qflex.errors import BothZero, DegenerateLeading
from qflex.polycore import (
    DEFAULT_TOL,
    TOLERANCE_PROFILES,
    Tolerances,
    TriPoly,
    UniPoly,
    bivariate_view,
    gradient,
    partial,
    restrict_chart,
    restrict_diagonal,
    restrict_line,
    resultant_eliminate,
    sylvester_matrix,
    sylvester_resultant,
)

x, y, z = TriPoly.variables()
X, Y, Z = sp.symbols("x y z")

small = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, small, small)


def random_tri(rng, degree):
    terms = {}
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            terms[(i, j, degree - i - j)] = complex(*rng.normal(size=2))
    return TriPoly.from_terms(terms, degree)


def to_sympy(p: TriPoly):
    return sum(
        (sp.nsimplify(c.real) + sp.I * sp.nsimplify(c.imag)) * X**i * Y**j * Z**k
        for (i, j, k), c in p.terms.items()
    )


def test_tolerance_defaults_and_profiles():
    assert DEFAULT_TOL == Tolerances(1e-10, 1e-6, 1e-6)
    for tol in TOLERANCE_PROFILES.values():
        assert 0 < tol.zero_eps < tol.cluster_radius <= tol.point_eps < 1


@pytest.mark.parametrize("args", [(1e-6, 1e-6, 1e-6), (1e-10, 1e-5, 1e-6), (0, 1e-6, 1e-6), (1e-10, 1e-6, 1)])
def test_tolerance_ordering_enforced(args):
    with pytest.raises(ValueError):
        Tolerances(*args)


def test_fermat_quartic_terms():
    F = x**4 + y**4 + z**4
    assert F.degree == 4
    assert F.terms == {(4, 0, 0): 1, (0, 4, 0): 1, (0, 0, 4): 1}
    assert F((1, 2, 3)) == 1 + 16 + 81


def test_inhomogeneous_terms_rejected():
    with pytest.raises(ValueError):
        TriPoly.from_terms({(2, 0, 0): 1, (1, 0, 0): 1})
    with pytest.raises(ValueError):
        x**2 + y


def test_relative_pruning():
    p = TriPoly.from_terms({(2, 0, 0): 1.0, (0, 2, 0): 1e-14})
    assert list(p.terms) == [(2, 0, 0)]


def test_multiplication_matches_sympy(rng):
    p, q = random_tri(rng, 2), random_tri(rng, 3)
    expect = sp.Poly(sp.expand(to_sympy(p) * to_sympy(q)), X, Y, Z)
    got = p * q
    assert got.degree == 5
    for mon, c in expect.terms():
        assert abs(got.terms.get(mon, 0) - complex(c)) < 1e-9


def test_partial_derivatives_match_sympy(rng):
    p = random_tri(rng, 4)
    sp_p = to_sympy(p)
    for idx, var in enumerate((X, Y, Z)):
        expect = sp.Poly(sp.diff(sp_p, var), X, Y, Z)
        got = partial(p, idx)
        for mon, c in expect.terms():
            assert abs(got.terms.get(mon, 0) - complex(c)) < 1e-9
    assert [g.degree for g in gradient(p)] == [3, 3, 3]


@given(st.tuples(cplx, cplx, cplx), cplx)
def test_homogeneity(pt, lam):
    F = x**4 + 3 * x**2 * y**2 - 2 * y * z**3 + z**4
    v = np.array(pt)
    assert abs(F(lam * v) - lam**4 * F(v)) <= 1e-9 * (1 + abs(lam) ** 4) * (1 + np.abs(v).max() ** 4)


@given(st.tuples(cplx, cplx, cplx))
def test_euler_identity(pt):
    F = x**4 + y**4 + z**4 + 2 * x**2 * y**2 - 3 * (x**2 + y**2) * z**2
    v = np.array(pt)
    lhs = sum(v[i] * gradient(F)[i](v) for i in range(3))
    assert abs(lhs - 4 * F(v)) <= 1e-9 * (1 + np.abs(v).max() ** 4)


def test_transform_composes(rng):
    F = random_tri(rng, 4)
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    assert abs(F.transform(A)(v) - F(A @ v)) < 1e-9 * abs(F(A @ v)) + 1e-9


def test_restrictions():
    F = x**4 + y**4 + z**4 + 3 * x**2 * y**2 + 2 * (x**2 + y**2) * z**2
    assert restrict_chart(F, "z", "x").coeffs == (1, 0, 2, 0, 1)
    # F(x, x, 1) = (2 + a) x^4 + 2 b x^2 + 1 with a = 3, b = 2
    assert restrict_diagonal(F).coeffs == (1, 0, 4, 0, 5)
    g = restrict_line(F, (1, 2, 3), (0.5, -1, 2))
    for t in (0.0, 0.3, -1.7 + 0.2j):
        assert abs(g(t) - F((1 + 0.5 * t, 2 - t, 3 + 2 * t))) < 1e-9
    rows = bivariate_view(F, "z", "y")
    assert len(rows) == 5 and rows[4].coeffs == (1,) and rows[2].coeffs == (2, 0, 3)


@given(st.lists(cplx, min_size=1, max_size=5), st.lists(cplx, min_size=1, max_size=5), cplx, cplx)
def test_resultant_matches_root_product(fr, gr, lf, lg):
    lf, lg = lf + 5, lg + 5  # keep leading coefficients away from zero
    f, g = UniPoly.from_roots(fr, lf), UniPoly.from_roots(gr, lg)
    m, n = len(fr), len(gr)
    # Res(f, g) = (-1)^(mn) lc(g)^m prod_j f(beta_j)
    oracle = (-1) ** (m * n) * lg**m * np.prod([f(b) for b in gr])
    got = sylvester_resultant(f, g)
    # determinant rounding error is relative to the Hadamard bound, not to |det|
    hadamard = np.prod(np.linalg.norm(sylvester_matrix(f, g), axis=1))
    assert abs(got - oracle) <= 1e-12 * hadamard
    # Res(f, g) = (-1)^(mn) Res(g, f)
    assert abs(got - (-1) ** (m * n) * sylvester_resultant(g, f)) <= 1e-12 * hadamard


def test_resultant_zero_cases():
    with pytest.raises(BothZero):
        sylvester_resultant(UniPoly(), UniPoly())
    assert sylvester_resultant(UniPoly([3]), UniPoly([1, 2, 1])) == 9
    assert sylvester_resultant(UniPoly.from_roots([1, 2]), UniPoly.from_roots([2, 5])) == 0


def test_resultant_eliminate_matches_sympy(rng):
    F = random_tri(rng, 4)
    G = random_tri(rng, 3)
    got = resultant_eliminate(bivariate_view(F, "z", "y"), bivariate_view(G, "z", "y"))
    f = to_sympy(F).subs(Z, 1)
    g = to_sympy(G).subs(Z, 1)
    expect = sp.Poly(sp.resultant(f, g, Y), X).all_coeffs()[::-1]
    expect = np.array([complex(c) for c in expect])
    assert got.degree == len(expect) - 1 == 12
    assert np.abs(got.array - expect).max() <= 1e-8 * np.abs(expect).max()


def test_resultant_eliminate_degenerate_leading():
    with pytest.raises(DegenerateLeading):
        resultant_eliminate([UniPoly([1]), UniPoly()], [UniPoly([1]), UniPoly([1])])
    with pytest.raises(BothZero):
        resultant_eliminate([UniPoly()], [UniPoly()])


def test_unipoly_arithmetic():
    p = UniPoly([1, 2, 3])
    assert (p * UniPoly([0, 1])).coeffs == (0, 1, 2, 3)
    assert (p - p).is_zero()
    assert p.derivative().coeffs == (2, 6)
    assert p.derivative(3).is_zero()
    assert p(2) == 17
    assert math.isclose(abs(UniPoly.from_roots([1j, -1j])(1j)), 0)
