"""Batch driver: dimension tables, property suites, sheaf relation fuzzing.

Subcommands:
    tables       Koszul/Lie dimension rows for a list of character pairs,
                 with expected-vs-computed columns; exit 1 on any mismatch.
    checks       the dictionary / twist / extension / base-change property
                 suites; machine-readable PASS/FAIL lines.
    sheaf-fuzz   seeded relation and pairing fuzzing over P^1.
    dump-module  generator matrices of a polynomial-dual module as JSON.

Configuration comes from flags or a JSON config file (the flags win):
    {"p": 5, "precision": 20, "ring": "Qp" | "dual",
     "pairs": [["triv", "triv"], ["x^-1", "triv"]],
     "N": 6, "seed": 0, "suites": ["dictionary", ...]}
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .characters import Character
from .coefficients import INF, CoeffRing


# rows of Prop. "cohomfinal" for M+ (the R^+ table); the finite model is
# expected to deviate at the trivial character, where the Euler
# characteristic of a finite complex forces h1 = 2 (see README).
RPLUS_TABLE = {
    "triv": [1, 1, 1, 0],
    "x^-1": [1, 3, 3, 1],
    "x^-2": [1, 3, 3, 1],
}


def parse_character(ring, spec: str) -> Character:
    """'triv' | 'x^k' | 'chi' | 'unr:a/b' | 'weight:a/b'."""
    if spec in ("triv", "1"):
        return Character.trivial(ring)
    if spec == "chi":
        return Character.cyclotomic(ring)
    if spec.startswith("x^"):
        return Character.x_power(ring, int(spec[2:]))
    if spec.startswith("unr:"):
        return Character.unramified(ring, Fraction(spec[4:]))
    if spec.startswith("weight:"):
        return Character.from_weight(ring, Fraction(spec[7:]))
    raise ValueError(f"cannot parse character spec {spec!r}")


def expected_dims(ring, d1: Character, d2: Character, i_max=12):
    """Finite-model expectation: regular ratio -> 0; x^-i -> (1,3,3,1);
    trivial -> (1,2,1,0) with a note carrying the R^+-table value."""
    ratio = d1 * d2.inverse()
    note = ""
    k = ratio.is_exact_monomial_on_units()
    vp = ratio.value_at_p
    if k is not None and vp.is_exact():
        try:
            v = vp.as_fraction()
        except Exception:
            v = None
        if v is not None and k <= 0 and v == Fraction(ring.p) ** k:
            i = -k
            if i == 0:
                note = ("finite model; R^+ table gives (1,1,1,0), "
                        "unreachable here (Euler characteristic)")
                return [1, 2, 1, 0], note
            return [1, 3, 3, 1], note
    ok, _ = ratio.is_regular(i_max)
    if ok:
        return [0, 0, 0, 0], note
    return None, "no pinned expectation for this ratio"


def cmd_tables(cfg) -> int:
    from .finite_models import PolDualModule
    from .complexes import build_koszul, build_lie, cohomology, dims, \
        lie_group_actions, ptilde_invariants
    ring = _ring_of(cfg)
    rows = []
    status = 0
    for spec1, spec2 in cfg["pairs"]:
        d1, d2 = parse_character(ring, spec1), parse_character(ring, spec2)
        M = PolDualModule(cfg["N"], d1, d2)
        kos = dims(build_koszul(M))
        lie = build_lie(M)
        actions = lie_group_actions(M, lie)
        inv = [ptilde_invariants(h, M, lie, actions=actions).dim
               for h in cohomology(lie)]
        expect, note = expected_dims(ring, d1, d2)
        ok = (expect is None or kos == expect) and kos == inv
        if not ok:
            status = 1
        rows.append({"d1": spec1, "d2": spec2, "module": f"Pol*<= {cfg['N']}",
                     "dims": kos, "lie_invariant_dims": inv,
                     "expected": expect, "match": ok, "note": note})
    _emit(cfg, rows)
    for r in rows:
        print(f"  {r['d1']:8s} {r['d2']:8s} koszul={r['dims']} "
              f"lie-inv={r['lie_invariant_dims']} expected={r['expected']} "
              f"{'ok' if r['match'] else 'MISMATCH'}"
              + (f"  [{r['note']}]" if r["note"] else ""))
    print(f"tables: {'PASS' if status == 0 else 'FAIL'}")
    return status


def cmd_checks(cfg) -> int:
    from . import suites
    ring = _ring_of(cfg)
    results = suites.run_all(ring, seed=cfg["seed"],
                             which=cfg.get("suites"))
    _emit(cfg, results)
    status = 0
    for r in results:
        flag = "PASS" if r["pass"] else "FAIL"
        if not r["pass"]:
            status = 1
        print(f"  [{flag}] {r['suite']}/{r['check']} "
              f"(min defect valuation {r['defect']})")
    print(f"checks: {'PASS' if status == 0 else 'FAIL'}")
    return status


def cmd_sheaf_fuzz(cfg) -> int:
    from . import sheaf as sh
    ring = _ring_of(cfg)
    d1 = parse_character(ring, cfg.get("sheaf_d1", "x^2"))
    d2 = parse_character(ring, cfg.get("sheaf_d2", "triv"))
    space = sh.SheafSpace(d1, d2)
    p = ring.p
    threshold = ring.prec - 4
    relations = [
        ("w^2 = 1", [("w",), ("w",)], [], True),
        ("center commutes: w", [("center", 7), ("w",)],
         [("w",), ("center", 7)], True),
        ("center commutes: diag", [("center", 7), ("diag_unit", 2)],
         [("diag_unit", 2), ("center", 7)], True),
        ("center commutes: diag_p", [("center", 7), ("diag_p",)],
         [("diag_p",), ("center", 7)], False),
        ("center commutes: upper", [("center", 7), ("upper", p)],
         [("upper", p), ("center", 7)], False),
        ("diag multiplicativity", [("diag_unit", 2), ("diag_unit", 3)],
         [("diag_unit", 6)], True),
        ("diag_p diag_unit commute", [("diag_p",), ("diag_unit", 2)],
         [("diag_unit", 2), ("diag_p",)], False),
        ("u_b instance: upper(p)^2 = upper(2p)",
         [("upper", p), ("upper", p)], [("upper", 2 * p)], False),
    ]
    rows = []
    status = 0
    samples = cfg.get("samples", 20)
    for name, lhs, rhs, tails in relations:
        worst = sh.check_relation(space, lhs, rhs, samples=samples,
                                  seed=cfg["seed"], with_tail=tails)
        ok = worst >= threshold
        if not ok:
            status = 1
        rows.append({"relation": name, "samples": samples,
                     "min_defect_valuation": _jsonable(worst), "pass": ok})
        print(f"  [{'PASS' if ok else 'FAIL'}] {name}: min defect "
              f"valuation {worst}")
    for token in [("w",), ("center", 3), ("diag_unit", 2), ("diag_p",),
                  ("upper", p)]:
        worst = sh.pairing_invariance(space, token,
                                      samples=cfg.get("pairing_samples", 10),
                                      seed=cfg["seed"])
        ok = worst >= threshold
        if not ok:
            status = 1
        rows.append({"relation": f"pairing invariance {token[0]}",
                     "min_defect_valuation": _jsonable(worst), "pass": ok})
        print(f"  [{'PASS' if ok else 'FAIL'}] pairing invariance under "
              f"{token[0]}: min defect valuation {worst}")
    _emit(cfg, rows)
    print(f"sheaf-fuzz: {'PASS' if status == 0 else 'FAIL'}")
    return status


def cmd_dump_module(cfg) -> int:
    from .finite_models import PolDualModule
    ring = _ring_of(cfg)
    spec1, spec2 = cfg["pairs"][0]
    d1, d2 = parse_character(ring, spec1), parse_character(ring, spec2)
    M = PolDualModule(cfg["N"], d1, d2)
    payload = M.matrices_json()
    if cfg.get("json_out"):
        with open(cfg["json_out"], "w") as fh:
            json.dump(payload, fh, indent=1)
        print(f"wrote {cfg['json_out']}")
    else:
        json.dump(payload, sys.stdout, indent=1)
        print()
    return 0


def _ring_of(cfg) -> CoeffRing:
    if cfg.get("ring", "Qp") == "dual":
        return CoeffRing(cfg["p"], prec=cfg["precision"], variant="dual", e=2)
    return CoeffRing(cfg["p"], prec=cfg["precision"])


def _jsonable(v):
    return "inf" if v == INF else v


def _emit(cfg, rows):
    if cfg.get("json_out"):
        with open(cfg["json_out"], "w") as fh:
            for row in rows:
                fh.write(json.dumps(row, default=str) + "\n")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="robbalab",
        description="dimension tables and operator-identity suites for "
                    "cyclotomic (phi, Gamma)-modules at finite precision")
    ap.add_argument("command",
                    choices=["tables", "checks", "sheaf-fuzz", "dump-module"])
    ap.add_argument("--config", help="JSON config file")
    ap.add_argument("--p", type=int)
    ap.add_argument("--precision", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--json-out")
    args = ap.parse_args(argv)

    cfg = {
        "p": 5, "precision": 20, "ring": "Qp", "N": 6, "seed": 0,
        "pairs": [["triv", "triv"], ["x^-1", "triv"], ["x^-2", "triv"],
                  ["x^2", "triv"], ["unr:6", "triv"]],
    }
    if args.config:
        try:
            with open(args.config) as fh:
                cfg.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as err:
            print(f"config error: {err}", file=sys.stderr)
            return 2
    for key in ("p", "precision", "seed"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    if args.json_out:
        cfg["json_out"] = args.json_out
    if cfg["p"] % 2 == 0 or cfg["precision"] < 8:
        print("config error: need odd p and precision >= 8", file=sys.stderr)
        return 2
    try:
        handler = {"tables": cmd_tables, "checks": cmd_checks,
                   "sheaf-fuzz": cmd_sheaf_fuzz,
                   "dump-module": cmd_dump_module}[args.command]
        return handler(cfg)
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
