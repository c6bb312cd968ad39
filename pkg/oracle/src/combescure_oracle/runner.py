"""Standalone check runner emitting a JSON report.

Runs every symbolic check and prints one report object:

    {"results": [{"check": ..., "status": "pass"|"fail"|"xfail", "detail": ...,
                  "seconds": ...}, ...],
     "ok": true|false}

Exit status is 0 when every check lands on its expected outcome and 1
otherwise. The truncated degenerate-branch formula is a recorded expected
failure: its entry reports status "xfail" with the nonzero residual, and
the run only fails if that formula unexpectedly starts to pass.
"""

import argparse
import json
import sys
import time

import sympy as sp

from . import checks


def _xfail_truncated_fallback():
    resid = checks.truncated_fallback_residual()
    if sp.simplify(resid) == 0:
        raise checks.CheckFailed(
            "truncated fallback x2=-l1(1+t)/2 solves the closing system; "
            "the recorded expected failure no longer fails")
    return (f"truncated fallback leaves residual {sp.sstr(resid)}, nonzero "
            "for every admissible l1; the corrected branch is "
            "x2=(l1+2-l1(1+t)^2)/(2(1+t)) and is verified in verify_family_i")


# (name, callable, status reported when the callable succeeds)
CHECKS = [
    ("verify_family_i", checks.verify_family_i, "pass"),
    ("verify_family_ii", checks.verify_family_ii, "pass"),
    ("verify_determinant_factorization",
     checks.verify_determinant_factorization, "pass"),
    ("verify_resultant", checks.verify_resultant, "pass"),
    ("verify_proportionality_system",
     checks.verify_proportionality_system, "pass"),
    ("truncated_degenerate_fallback", _xfail_truncated_fallback, "xfail"),
]


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="combescure-oracle",
        description="exact symbolic checks of the closing-system algebra")
    ap.add_argument("--out", help="write the JSON report here instead of stdout")
    ap.add_argument("--check", action="append", metavar="NAME",
                    help="run only the named check (repeatable)")
    args = ap.parse_args(argv)

    known = {name for name, _, _ in CHECKS}
    if args.check:
        bad = [c for c in args.check if c not in known]
        if bad:
            ap.error(f"unknown check(s) {', '.join(bad)}; "
                     f"known: {', '.join(sorted(known))}")

    results = []
    for name, fn, good_status in CHECKS:
        if args.check and name not in args.check:
            continue
        t0 = time.perf_counter()
        try:
            detail = fn()
            status = good_status
        except checks.CheckFailed as exc:
            detail = str(exc)
            status = "fail"
        results.append({
            "check": name,
            "status": status,
            "detail": detail,
            "seconds": round(time.perf_counter() - t0, 2),
        })

    ok = all(r["status"] != "fail" for r in results)
    report = json.dumps({"results": results, "ok": ok}, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report + "\n")
    else:
        print(report)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
