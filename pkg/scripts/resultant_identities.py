"""Compare slice eliminants of (F, Hessian) with their closed-form factorizations.

For each slice the numeric resultant should equal const * g(a, b)^2 with one
constant across all samples; the diagonal slice is checked against both
candidate last factors (36 - 12a + a^2 - 10b^2 + 3ab^2 and the 3a^2 variant).
"""
from dataclasses import dataclass

import numpy as np

from qflex.errors import DegenerateParameters
from qflex.kuribayashi import (
    SLICES,
    FamilyParams,
    identify_diagonal_factor,
    proportionality_deviation,
    slice_closed_form,
    slice_resultant,
)


@dataclass(frozen=True)
class ResultantConfig:
    samples: int = 20
    seed: int = 11
    spread: float = 5.0


def sample(cfg: ResultantConfig) -> list[FamilyParams]:
    rng = np.random.default_rng(cfg.seed)
    out = []
    while len(out) < cfg.samples:
        a, b = rng.uniform(-cfg.spread, cfg.spread, 2) + 1j * rng.uniform(-cfg.spread, cfg.spread, 2) / 2
        try:
            out.append(FamilyParams(a, b))
        except DegenerateParameters:
            pass
    return out


def main(cfg: ResultantConfig = ResultantConfig()):
    params = sample(cfg)
    for sl in SLICES:
        num = [slice_resultant(p, sl) for p in params]
        closed = [slice_closed_form(p, sl) for p in params]
        ratio = num[0] / closed[0] ** 2
        dev = proportionality_deviation(num, closed)
        print(f"{sl:9s} const ~ {ratio.real:.6g}{ratio.imag:+.1e}i   max relative deviation {dev:.2e}")
    best, devs = identify_diagonal_factor(params)
    print("diagonal last factor: " + ", ".join(f"{k}: {v:.2e}" for k, v in devs.items()) + f"  -> {best}")


if __name__ == "__main__":
    main()
