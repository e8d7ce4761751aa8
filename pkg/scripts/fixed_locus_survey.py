"""Fixed points of the symmetry groups on sample curves, grouped by orbit.

Also reports which fixed orbits consist of flexes; on C_{a,0} this picks up
the antidiagonal orbit [iy:y:1], which becomes a hyperflex orbit at a = -6.
"""
from dataclasses import dataclass

from qflex.flexlab import classify_flexes
from qflex.kuribayashi import FamilyParams, build_curve, symmetry_group
from qflex.projgroup import fixed_locus, orbit


@dataclass(frozen=True)
class SurveyConfig:
    instances: tuple[tuple[complex, complex], ...] = ((1.7, 0), (3, 0), (-6, 0), (6, 0), (1.7, 2.9), (3, 3))


def main(cfg: SurveyConfig = SurveyConfig()):
    for a, b in cfg.instances:
        p = FamilyParams(a, b)
        F, G = build_curve(p), symmetry_group(p)
        flexes = classify_flexes(F)
        locus = fixed_locus(G, F)
        orbits = []
        for q, k in locus:
            if not any(min(q.distance(o) for o in orb) < 1e-8 for orb, _ in orbits):
                orbits.append((orbit(G, q), k))
        print(f"C({a}, {b}): |G| = {G.order}, {len(locus)} fixed points in {len(orbits)} orbits")
        for orb, k in orbits:
            kinds = {r.kind for r in flexes for q in orb if r.point.close_to(q, 1e-6)}
            label = "/".join(sorted(kinds)) or "not flexes"
            print(f"   size {len(orb):2d}  stabilizer {k}  seed {orb[0]}  {label}")


if __name__ == "__main__":
    main()
