import cmath
import itertools

import numpy as np
import pytest

from qflex.errors import CapExceeded, InvarianceViolation, NotInvariant
from qflex.flexlab import HYPERFLEX, ORDINARY, FlexRecord, classify_flexes
from qflex.kuribayashi import RHO, SIGMA, SIGMA1, TAU, TAU1, FamilyParams, build_curve
from qflex.polycore import TriPoly, UniPoly, restrict_line
from qflex.projgroup import (
    OrbitSignature,
    ProjMap,
    act,
    check_invariant,
    close_group,
    element_order_histogram,
    fixed_locus,
    hausdorff,
    is_abelian,
    orbit,
    orbit_partition,
    stabilizer,
)
from qflex.rootsolve import ProjPoint, roots_with_multiplicity

x, y, z = TriPoly.variables()
G = close_group([SIGMA, TAU, RHO])
G1 = close_group([SIGMA1, TAU1])


def curve(a, b):
    return build_curve(FamilyParams(a, b))


def random_curve_points(F, rng, n):
    out = []
    while len(out) < n:
        p0 = rng.normal(size=3) + 1j * rng.normal(size=3)
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        for t, _ in roots_with_multiplicity(restrict_line(F, p0, v)):
            out.append(ProjPoint(p0 + t * v))
    return out[:n]


def test_group_orders():
    assert G.order == 16 and not is_abelian(G)
    assert G1.order == 8 and not is_abelian(G1)
    assert close_group([ProjMap.identity()]).order == 1
    assert [g.order() for g in (SIGMA, TAU, RHO)] == [2, 4, 4]
    assert [g.order() for g in (SIGMA1, TAU1)] == [2, 4]


def test_element_order_histograms():
    assert element_order_histogram(G) == {1: 1, 2: 7, 4: 8}
    # dihedral group of order 8
    assert element_order_histogram(G1) == {1: 1, 2: 5, 4: 2}


def test_group_axioms():
    for H in (G, G1):
        ident = [g for g in H if g.is_identity()]
        assert len(ident) == 1
        for g in H:
            assert g.inverse() in H
            for h in H:
                assert g @ h in H
        for f, g, h in itertools.islice(itertools.product(H, repeat=3), 200):
            assert ((f @ g) @ h).equals(f @ (g @ h))


def test_projective_scalar_equality():
    m = ProjMap([[2j, 0, 0], [0, -2j, 0], [0, 0, 2]])
    assert m.equals(TAU)


def test_cap_exceeded():
    rot = ProjMap([[np.cos(1), -np.sin(1), 0], [np.sin(1), np.cos(1), 0], [0, 0, 1]])
    with pytest.raises(CapExceeded):
        close_group([rot], cap=64)


def test_action_examples():
    assert act(SIGMA, ProjPoint.of(1, 1, 1)).close_to(ProjPoint.of(-1, 1, 1), 1e-12)
    g, zeta = 0.3 + 0.1j, -0.7j
    assert act(RHO, ProjPoint.of(g, zeta, 1)).close_to(ProjPoint.of(-zeta, g, 1), 1e-12)
    p = ProjPoint.of(1, 2j, 3)
    assert act(ProjMap.identity(), p).close_to(p, 1e-12)


def test_action_is_compatible(rng):
    pts = [ProjPoint(rng.normal(size=3) + 1j * rng.normal(size=3)) for _ in range(5)]
    for g in G:
        for h in G:
            for p in pts:
                assert act(g @ h, p).close_to(act(g, act(h, p)), 1e-10)


def test_orbit_examples():
    delta = cmath.exp(1j * cmath.pi / 4)
    orb = orbit(G1, ProjPoint.of(delta, 1, 0))
    expect = [ProjPoint.of(s * delta, 1, 0) for s in (1, -1)] + [ProjPoint.of(1, s * delta, 0) for s in (1, -1)]
    assert len(orb) == 4 and hausdorff(orb, expect) < 1e-12
    generic = ProjPoint.of(0.31 + 0.2j, -0.77 + 0.1j, 1)
    assert len(orbit(G, generic)) == 16
    assert len(orbit(G1, generic)) == 8


def test_stabilizer_examples():
    delta = cmath.exp(1j * cmath.pi / 4)
    assert len(stabilizer(G1, ProjPoint.of(delta, 1, 0))) == 2
    generic = ProjPoint.of(0.31 + 0.2j, -0.77 + 0.1j, 1)
    stab = stabilizer(G, generic)
    assert len(stab) == 1 and stab[0].is_identity()
    a = 1.7
    beta = roots_with_multiplicity(UniPoly([1, 0, a, 0, 1])).values()[0]
    p = ProjPoint.of(beta, 1, 0)
    assert len(stabilizer(G, p)) == 4 and len(orbit(G, p)) == 4


@pytest.mark.parametrize("a,b", [(1.7, 0), (-3.2, 0), (4, 4), (1.3 + 0.4j, -0.9 + 0.2j)])
def test_orbit_stabilizer_on_curve_points(a, b, rng):
    F = curve(a, b)
    H = G if b == 0 else G1
    for p in random_curve_points(F, rng, 100):
        assert len(orbit(H, p)) * len(stabilizer(H, p)) == H.order


def test_stabilizers_conjugate_along_orbits():
    a = 1.7
    beta = roots_with_multiplicity(UniPoly([1, 0, a, 0, 1])).values()[0]
    p = ProjPoint.of(beta, 1, 0)
    sp = stabilizer(G, p)
    for g in G:
        q = act(g, p)
        conj = [g @ s @ g.inverse() for s in sp]
        sq = stabilizer(G, q)
        assert len(conj) == len(sq)
        assert all(any(c.equals(t) for t in sq) for c in conj)


def test_check_invariant():
    check_invariant(G, curve(1.7, 0))
    check_invariant(G1, curve(1.7, 2.9))
    with pytest.raises(NotInvariant):
        check_invariant(G, curve(1.7, 2.9))


def test_fixed_locus_order8():
    a, b = 1.7, 2.9
    locus = fixed_locus(G1, curve(a, b))
    assert len(locus) == 20
    assert all(k == 2 for _, k in locus)
    # every point lies on one of the fixed lines x = y, x = -y, y = 0, x = 0, z = 0
    for p, _ in locus:
        x_, y_, z_ = p.coords
        assert min(abs(x_ - y_), abs(x_ + y_), abs(x_), abs(y_), abs(z_)) < 1e-9


def test_fixed_locus_order16():
    # besides the three orbits [beta:1:0], [alpha:alpha:1], [0:delta:1] the
    # antidiagonal element fixes x = i y, giving a fourth orbit of 8 points
    for a in (1.7, 3.0, -0.4 + 0.3j):
        locus = fixed_locus(G, curve(a, 0))
        assert len(locus) == 28
        orders = sorted(k for _, k in locus)
        assert orders == [2] * 24 + [4] * 4
        pts = [p for p, _ in locus]
        sizes = sorted(len(orbit(G, p)) for p in pts)
        assert sizes.count(4) == 4 and sizes.count(8) == 24
    at3 = [p for p, _ in fixed_locus(G, curve(3, 0))]
    assert min(p.distance(ProjPoint.of(1j, 1, 1)) for p in at3) < 1e-9


def test_fixed_locus_trivial_group():
    assert fixed_locus(close_group([ProjMap.identity()]), curve(4, 4)) == []


def test_signature_parse_and_format():
    s = OrbitSignature.parse("2_8 ordinary + 1_4 hyperflex")
    assert str(s) == "1_4 hyperflex + 2_8 ordinary"
    assert s.total_weight() == 24
    assert s.count(ORDINARY) == 16 and s.count(HYPERFLEX) == 4
    assert OrbitSignature.parse(str(s)) == s


@pytest.mark.parametrize(
    "a,b,H,sig",
    [
        (4, 4, G1, "3_8 ordinary"),
        (3, 3, G1, "1_4 hyperflex + 1_8 hyperflex"),
        (-5, 1, G1, "1_8 hyperflex + 1_8 ordinary"),
        (5, 0, G, "1_4 hyperflex + 1_16 ordinary"),
    ],
)
def test_orbit_partition(a, b, H, sig):
    recs = classify_flexes(curve(a, b))
    got, labels = orbit_partition(H, recs)
    assert got == OrbitSignature.parse(sig)
    assert got.total_weight() == 24
    assert sorted(set(labels)) == list(range(sum(n for _, n, _ in got.entries)))
    for g in H:
        imgs = [act(g, r.point) for r in recs]
        assert hausdorff([r.point for r in recs], imgs) < 1e-8
        for r, q in zip(recs, imgs):
            j = min(range(len(recs)), key=lambda k: recs[k].point.distance(q))
            assert recs[j].kind == r.kind


def test_orbit_partition_detects_broken_invariance():
    recs = classify_flexes(curve(4, 4))
    with pytest.raises(InvarianceViolation):
        orbit_partition(G1, recs[:-1])
    bad = list(recs)
    bad[0] = FlexRecord(bad[0].point, bad[0].tangent, 4, 2, HYPERFLEX)
    with pytest.raises(InvarianceViolation):
        orbit_partition(G1, bad)
