"""Run the reference fixtures and print counts, signatures and coordinate gaps."""
from dataclasses import dataclass

from qflex.cli import FIXTURES, run_fixture
from qflex.polycore import TOLERANCE_PROFILES


@dataclass(frozen=True)
class ReproConfig:
    profile: str = "default"


def main(cfg: ReproConfig = ReproConfig()):
    tol = TOLERANCE_PROFILES[cfg.profile]
    failed = 0
    for fx in FIXTURES:
        r = run_fixture(fx, tol)
        gaps = ", ".join(f"{g:.1e}" for g in r.get("coordinate_gaps", [])) or "-"
        sig = " + ".join(r.get("signature") or [])
        status = "PASS" if r["passed"] else "FAIL"
        failed += not r["passed"]
        print(f"{status}  {fx.name:22s} {r.get('ordinary', '?'):>3}/{r.get('hyperflex', '?'):<3} {sig:36s} gaps [{gaps}]")
        for f in r["failures"]:
            print(f"      {f}")
    print(f"{len(FIXTURES) - failed}/{len(FIXTURES)} fixtures pass")


if __name__ == "__main__":
    main()
