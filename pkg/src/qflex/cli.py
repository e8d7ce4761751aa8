"""Command-line front end.

    qflex flexes  --a 4 --b 4 --format json
    qflex orbits  --a -5 --b 1
    qflex verify  --a 3 --b 3
    qflex scan    --a-range 2.5 4.5 --a-steps 5 --b-range 2.5 4.5 --b-steps 5
    qflex repro

Exit codes: 0 success, 2 bad or degenerate input, 3 numerical failure,
4 refuted classification or failing reproduction fixture.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import QFlexError
from .flexlab import HYPERFLEX, FlexRecord
from .kuribayashi import (
    REFUTED,
    FamilyParams,
    VerdictReport,
    classify_instance,
    verify_family_instance,
)
from .polycore import DEFAULT_TOL, TOLERANCE_PROFILES, Tolerances
from .projgroup import OrbitSignature

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_REFUTED = 4

PROFILE_ENV = "QFLEX_TOLERANCE_PROFILE"
COMMANDS = ("flexes", "orbits", "verify", "scan", "repro")
FORMATS = ("json", "csv", "text")
SIG_DIGITS = 12


class InputError(QFlexError, ValueError):
    exit_code = EXIT_INPUT


def parse_complex(text: str | complex | float) -> complex:
    """Parse ``"1.5+0.5i"``, ``"-i"``, ``"3"`` or ``"2j"`` into a finite complex."""
    if isinstance(text, (int, float, complex)):
        z = complex(text)
    else:
        s = text.strip().replace(" ", "").replace("I", "i").replace("i", "j")
        if s.endswith("j") and (len(s) == 1 or s[-2] in "+-"):
            s = s[:-1] + "1j"
        try:
            z = complex(s)
        except ValueError:
            raise InputError(f"cannot parse {text!r} as a complex number") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"{text!r} is not finite")
    return z


@dataclass(frozen=True)
class RunConfig:
    command: str
    a: complex = 0j
    b: complex = 0j
    tol: Tolerances = DEFAULT_TOL
    fmt: str = "json"
    output: str | None = None
    a_range: tuple[float, float] = (0.0, 0.0)
    b_range: tuple[float, float] = (0.0, 0.0)
    a_steps: int = 1
    b_steps: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.fmt not in FORMATS:
            raise InputError(f"unknown format {self.fmt!r}")
        if self.a_steps < 1 or self.b_steps < 1:
            raise InputError("grid steps must be at least 1")
        if not all(map(math.isfinite, self.a_range + self.b_range)):
            raise InputError("grid ranges must be finite")


# ---------------------------------------------------------------------------
# serialization


def _num(x: float) -> float:
    y = float(f"{x:.{SIG_DIGITS}g}")
    return 0.0 if y == 0 else y


def _cnum(z: complex) -> list[float]:
    return [_num(z.real), _num(z.imag)]


# canonical coordinates have modulus <= 1; parts below this are rounding noise
COORD_FLOOR = 1e-13


def _coord(z: complex) -> list[float]:
    re_ = z.real if abs(z.real) > COORD_FLOOR else 0.0
    im = z.imag if abs(z.imag) > COORD_FLOOR else 0.0
    return _cnum(complex(re_, im))


def record_dict(r: FlexRecord) -> dict:
    return {
        "point": [_coord(c) for c in r.point.coords],
        "contact_order": r.contact_order,
        "weight": r.weight,
        "kind": r.kind,
        "orbit": r.orbit,
    }


def _signature_list(sig: OrbitSignature | None) -> list[str] | None:
    if sig is None:
        return None
    return [s for s in str(sig).split(" + ") if s != "none"]


def report_dict(
    params: FamilyParams,
    records: Sequence[FlexRecord],
    signature: OrbitSignature | None = None,
    verdict: VerdictReport | None = None,
) -> dict:
    out = {
        "params": {"a": _cnum(params.a), "b": _cnum(params.b)},
        "flexes": [record_dict(r) for r in records],
        "signature": _signature_list(signature),
        "verdict": verdict.verdict if verdict else None,
    }
    if verdict is not None:
        out["predicted"] = {
            "row": verdict.predicted.source,
            "alternatives": [_signature_list(o.signature) for o in verdict.predicted.alternatives],
        }
        out["computed"] = {"ordinary": verdict.ordinary, "hyperflex": verdict.hyperflex}
        out["realized_alternative"] = verdict.realized
        out["group_order"] = verdict.group_order
    return out


def dumps(obj) -> str:
    """Compact JSON; ``dumps(json.loads(dumps(x))) == dumps(x)``."""
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


CSV_FIELDS = ("x_re", "x_im", "y_re", "y_im", "z_re", "z_im", "contact_order", "weight", "kind", "orbit")


def records_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in report["flexes"]:
        coords = [repr(v) for pair in r["point"] for v in pair]
        w.writerow(coords + [r["contact_order"], r["weight"], r["kind"], "" if r["orbit"] is None else r["orbit"]])
    return buf.getvalue()


def parse_records_csv(text: str) -> list[dict]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        vals = [float(row[k]) for k in CSV_FIELDS[:6]]
        out.append(
            {
                "point": [vals[0:2], vals[2:4], vals[4:6]],
                "contact_order": int(row["contact_order"]),
                "weight": int(row["weight"]),
                "kind": row["kind"],
                "orbit": int(row["orbit"]) if row["orbit"] != "" else None,
            }
        )
    return out


def _fmt_c(z: Sequence[float]) -> str:
    re_, im = z
    if im == 0:
        return f"{re_:.6g}"
    if re_ == 0:
        return f"{im:.6g}i"
    return f"{re_:.6g}{im:+.6g}i"


def report_text(report: dict) -> str:
    p = report["params"]
    lines = [f"a = {_fmt_c(p['a'])}, b = {_fmt_c(p['b'])}"]
    for r in report["flexes"]:
        pt = ":".join(_fmt_c(c) for c in r["point"])
        orb = "" if r["orbit"] is None else f"  orbit {r['orbit']}"
        lines.append(f"  [{pt}]  I={r['contact_order']} w={r['weight']} {r['kind']}{orb}")
    n_h = sum(r["kind"] == HYPERFLEX for r in report["flexes"])
    lines.append(f"{len(report['flexes']) - n_h} ordinary, {n_h} hyperflex")
    if report["signature"] is not None:
        lines.append("signature: " + (" + ".join(report["signature"]) or "none"))
    if report.get("predicted"):
        alts = " | ".join(" + ".join(s) for s in report["predicted"]["alternatives"])
        lines.append(f"predicted ({report['predicted']['row']}): {alts}")
    if report["verdict"] is not None:
        lines.append(f"verdict: {report['verdict']}")
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report) + "\n"
    if fmt == "csv":
        return records_csv(report)
    return report_text(report)


# ---------------------------------------------------------------------------
# commands


def cmd_flexes(cfg: RunConfig) -> tuple[str, int]:
    from .flexlab import classify_flexes
    from .kuribayashi import build_curve

    params = FamilyParams(cfg.a, cfg.b, zero_eps=cfg.tol.zero_eps)
    records = classify_flexes(build_curve(params), cfg.tol)
    return render(report_dict(params, records), cfg.fmt), EXIT_OK


def cmd_orbits(cfg: RunConfig) -> tuple[str, int]:
    params = FamilyParams(cfg.a, cfg.b, zero_eps=cfg.tol.zero_eps)
    records, sig, _ = classify_instance(params, cfg.tol)
    return render(report_dict(params, records, sig), cfg.fmt), EXIT_OK


def _verify_report(params: FamilyParams, tol: Tolerances) -> dict:
    v = verify_family_instance(params, tol)
    return report_dict(params, v.records, v.signature, v)


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    params = FamilyParams(cfg.a, cfg.b, zero_eps=cfg.tol.zero_eps)
    rep = _verify_report(params, cfg.tol)
    return render(rep, cfg.fmt), EXIT_REFUTED if rep["verdict"] == REFUTED else EXIT_OK


def grid(lo: float, hi: float, steps: int) -> list[float]:
    return [lo] if steps == 1 else [float(v) for v in np.linspace(lo, hi, steps)]


def _scan_point(args: tuple[complex, complex, Tolerances]) -> dict:
    a, b, tol = args
    try:
        params = FamilyParams(a, b, zero_eps=tol.zero_eps)
    except QFlexError as exc:
        return {"params": {"a": _cnum(a), "b": _cnum(b)}, "verdict": "SKIPPED", "reason": str(exc)}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return _verify_report(params, tol)
    except QFlexError as exc:
        return {"params": {"a": _cnum(a), "b": _cnum(b)}, "verdict": "ERROR", "reason": str(exc)}


def scan_rows(cfg: RunConfig) -> list[dict]:
    jobs = [
        (complex(a), complex(b), cfg.tol)
        for a in grid(*cfg.a_range, cfg.a_steps)
        for b in grid(*cfg.b_range, cfg.b_steps)
    ]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            return list(ex.map(_scan_point, jobs, chunksize=1))
    return [_scan_point(j) for j in jobs]


SCAN_FIELDS = ("a_re", "a_im", "b_re", "b_im", "row", "ordinary", "hyperflex", "signature", "verdict")


def _scan_summary(row: dict) -> list:
    a, b = row["params"]["a"], row["params"]["b"]
    if "computed" not in row:
        return [*a, *b, "", "", "", "", row["verdict"]]
    return [
        *a,
        *b,
        row["predicted"]["row"],
        row["computed"]["ordinary"],
        row["computed"]["hyperflex"],
        " + ".join(row["signature"]),
        row["verdict"],
    ]


def cmd_scan(cfg: RunConfig) -> tuple[str, int]:
    rows = scan_rows(cfg)
    if cfg.fmt == "json":
        text = "".join(dumps(r) + "\n" for r in rows)
    else:
        buf = io.StringIO()
        if cfg.fmt == "csv":
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(SCAN_FIELDS)
            w.writerows(_scan_summary(r) for r in rows)
        else:
            for r in rows:
                s = _scan_summary(r)
                buf.write(f"a={_fmt_c(s[0:2])} b={_fmt_c(s[2:4])}  {s[8]}  {s[4]}  {s[5]}/{s[6]}  {s[7]}\n")
        text = buf.getvalue()
    verdicts = {r["verdict"] for r in rows}
    code = EXIT_REFUTED if REFUTED in verdicts else EXIT_NUMERIC if "ERROR" in verdicts else EXIT_OK
    return text, code


# ---------------------------------------------------------------------------
# reproduction fixtures

SQ2, SQ5, SQ6 = math.sqrt(2), math.sqrt(5), math.sqrt(6)


@dataclass(frozen=True)
class Fixture:
    name: str
    a: complex
    b: complex
    ordinary: int
    hyperflex: int
    signature: str | None = None
    # affine (x, y) at z = 1, truncated to the printed decimals
    points: tuple[tuple[complex, complex], ...] = ()
    coord_tol: float = 1e-3


FIXTURES = (
    Fixture(
        "example-1", 6 / 5, 6 / SQ5, 0, 12, "1_4 hyperflex + 1_8 hyperflex",
        ((1.495j, 0), (0.748 * (1 + 1j), 0.748 * (1 - 1j))),
    ),
    Fixture(
        "example-2", 3, 3 / SQ2, 16, 4, "1_4 hyperflex + 2_8 ordinary",
        ((0.841j, 0), (0.089 - 0.454j, 0.188 + 0.947j), (0.089 + 0.454j, 0.188 - 0.947j)),
    ),
    Fixture("example-3", 3, 3, 0, 12, "1_4 hyperflex + 1_8 hyperflex"),
    Fixture(
        "example-4", 0, 3 * math.sqrt(2 / 5), 16, 4, "1_4 hyperflex + 2_8 ordinary",
        ((0.562j, 0.562j), (0.204 - 1.151j, 0.302 - 0.269j), (0.204 + 1.151j, 0.302 + 0.269j)),
    ),
    Fixture("example-5", 4, 4, 24, 0, "3_8 ordinary"),
    Fixture(
        "example-6", -5, 1, 8, 8, "1_8 hyperflex + 1_8 ordinary",
        ((0.44 * (1 + 1j), 0.44 * (1j - 1)),),
    ),
    Fixture("C(a,a) a=0", 0, 0, 0, 12, "1_4 hyperflex + 1_8 hyperflex"),
    Fixture("C(a,a) a=3", 3, 3, 0, 12),
    Fixture("C(a,a) a=4", 4, 4, 24, 0),
    Fixture("C(0,b) b=sqrt6", 0, SQ6, 8, 8, "1_8 hyperflex + 1_8 ordinary"),
    Fixture(
        "C(0,b) b=sqrt5", 0, SQ5, 24, 0, "3_8 ordinary",
        (
            (0.524132 + 0.316563j, -0.417502 + 0.812472j),
            (0.524132 - 0.316563j, 0.417502 + 0.812472j),
            (-0.410813j, -1.37547j),
        ),
    ),
    Fixture("C(0,b) b=3sqrt(2/5)", 0, 3 * math.sqrt(2 / 5), 16, 4, "1_4 hyperflex + 2_8 ordinary"),
)


def affine_gap(records: Sequence[FlexRecord], target: tuple[complex, complex]) -> float:
    """Smallest componentwise max-modulus distance from ``target`` to a flex in the z = 1 chart."""
    best = math.inf
    for r in records:
        x, y, z = r.point.coords
        if abs(z) < 1e-12:
            continue
        best = min(best, max(abs(x / z - target[0]), abs(y / z - target[1])))
    return best


def run_fixture(fx: Fixture, tol: Tolerances = DEFAULT_TOL) -> dict:
    out = {"fixture": fx.name, "a": _cnum(complex(fx.a)), "b": _cnum(complex(fx.b))}
    try:
        v = verify_family_instance(FamilyParams(fx.a, fx.b, zero_eps=tol.zero_eps), tol)
    except QFlexError as exc:
        return {**out, "passed": False, "failures": [f"error: {exc}"]}
    failures = []
    if (v.ordinary, v.hyperflex) != (fx.ordinary, fx.hyperflex):
        failures.append(f"counts {v.ordinary}/{v.hyperflex} != {fx.ordinary}/{fx.hyperflex}")
    if fx.signature is not None and v.signature != OrbitSignature.parse(fx.signature):
        failures.append(f"signature {v.signature} != {OrbitSignature.parse(fx.signature)}")
    gaps = [affine_gap(v.records, t) for t in fx.points]
    for t, g in zip(fx.points, gaps):
        if not g < fx.coord_tol:
            failures.append(f"no flex within {fx.coord_tol:g} of ({_fmt_c(_cnum(t[0]))}, {_fmt_c(_cnum(t[1]))}, 1): gap {g:.3g}")
    if v.verdict != "CONFIRMED":
        failures.append(f"verdict {v.verdict}")
    return {
        **out,
        "ordinary": v.ordinary,
        "hyperflex": v.hyperflex,
        "signature": _signature_list(v.signature),
        "coordinate_gaps": [_num(g) for g in gaps],
        "verdict": v.verdict,
        "passed": not failures,
        "failures": failures,
    }


def cmd_repro(cfg: RunConfig) -> tuple[str, int]:
    rows = [run_fixture(fx, cfg.tol) for fx in FIXTURES]
    if cfg.fmt == "json":
        text = "".join(dumps(r) + "\n" for r in rows)
    else:
        text = "".join(
            f"{'PASS' if r['passed'] else 'FAIL'}  {r['fixture']}"
            + ("" if r["passed"] else "  (" + "; ".join(r["failures"]) + ")")
            + "\n"
            for r in rows
        )
    return text, EXIT_OK if all(r["passed"] for r in rows) else EXIT_REFUTED


HANDLERS = {
    "flexes": cmd_flexes,
    "orbits": cmd_orbits,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "repro": cmd_repro,
}


# ---------------------------------------------------------------------------
# argument handling


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{n}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", help='parameter a, e.g. "1.5+0.5i"')
    common.add_argument("--b", help="parameter b")
    common.add_argument("--zero-eps", type=float)
    common.add_argument("--cluster-radius", type=float)
    common.add_argument("--point-eps", type=float)
    common.add_argument("--format", choices=FORMATS, dest="fmt")
    common.add_argument("--output", "-o")
    common.add_argument("--config", help="key=value file; command-line flags take precedence")

    p = argparse.ArgumentParser(prog="qflex", description="Flexes and hyperflexes of x^4+y^4+z^4+ax^2y^2+b(x^2+y^2)z^2.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("flexes", parents=[common], help="list every flex with weight and kind")
    sub.add_parser("orbits", parents=[common], help="flexes labelled by symmetry orbit")
    sub.add_parser("verify", parents=[common], help="compare with the predicted classification")
    s = sub.add_parser("scan", parents=[common], help="verify over a real parameter grid")
    s.add_argument("--a-range", nargs=2, type=float, metavar=("LO", "HI"))
    s.add_argument("--b-range", nargs=2, type=float, metavar=("LO", "HI"))
    s.add_argument("--a-steps", type=int)
    s.add_argument("--b-steps", type=int)
    s.add_argument("--workers", type=int)
    sub.add_parser("repro", parents=[common], help="run the reference fixtures")
    return p


def resolve_config(ns: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    file_vals = read_config_file(ns.config) if ns.config else {}

    def pick(name, conv=str, default=None):
        v = getattr(ns, name, None)
        if v is not None:
            return v
        if name in file_vals:
            try:
                return conv(file_vals[name])
            except ValueError:
                raise InputError(f"bad value for {name}: {file_vals[name]!r}") from None
        return default

    profile = file_vals.get("profile") or environ.get(PROFILE_ENV) or "default"
    if profile not in TOLERANCE_PROFILES:
        raise InputError(f"unknown tolerance profile {profile!r}; choose from {sorted(TOLERANCE_PROFILES)}")
    base = TOLERANCE_PROFILES[profile]
    try:
        tol = replace(
            base,
            zero_eps=pick("zero_eps", float, base.zero_eps),
            cluster_radius=pick("cluster_radius", float, base.cluster_radius),
            point_eps=pick("point_eps", float, base.point_eps),
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None

    def prange(name):
        v = pick(name, lambda s: tuple(float(t) for t in s.replace(",", " ").split()), None)
        if v is None:
            return (0.0, 0.0)
        if len(v) != 2:
            raise InputError(f"{name} needs two numbers")
        return tuple(v)

    a, b = pick("a"), pick("b")
    if ns.command in ("flexes", "orbits", "verify") and (a is None or b is None):
        raise InputError(f"{ns.command} needs both --a and --b")
    return RunConfig(
        command=ns.command,
        a=parse_complex(a) if a is not None else 0j,
        b=parse_complex(b) if b is not None else 0j,
        tol=tol,
        fmt=pick("fmt", str, file_vals.get("format", "json")),
        output=pick("output"),
        a_range=prange("a_range") if ns.command == "scan" else (0.0, 0.0),
        b_range=prange("b_range") if ns.command == "scan" else (0.0, 0.0),
        a_steps=pick("a_steps", int, 1),
        b_steps=pick("b_steps", int, 1),
        workers=pick("workers", int, 1),
    )


def run(cfg: RunConfig) -> tuple[str, int]:
    return HANDLERS[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(ns)
        text, code = run(cfg)
    except QFlexError as exc:
        print(f"qflex: {exc}", file=sys.stderr)
        return exc.exit_code
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
