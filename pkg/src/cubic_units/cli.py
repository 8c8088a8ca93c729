"""Command-line front end.

Exit codes: 0 success, 1 a mathematical check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Dict, List, Optional

from . import __version__
from .bounds import REFERENCE_PARAMETER_BOUND, absolute_parameter_bound, bounds_report, upper_bound_derivation
from .cubic_core import CubicParams, UnitRepr
from .errors import CubicUnitsError, DomainError, MismatchAgainstFixture
from .intervals import PRECISION_CAP
from .reduction import sweep, verify_file
from .search import (
    NON_RIGOROUS_CAVEAT,
    SearchConfig,
    classes_to_csv,
    conjecture_scan,
    reproduce_table,
    solve_bounded,
    theorem_n_max,
)
from .solutions import SolutionTriple, canonicalize, is_trivial, orbit

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

log = logging.getLogger("cubic_units")


def _utcnow() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _sha256(path: str) -> Optional[str]:
    if not path or not os.path.exists(path):
        return None
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    argv: List[str]
    version: str = __version__
    started: str = field(default_factory=_utcnow)
    finished: Optional[str] = None
    inputs: Dict[str, Optional[str]] = field(default_factory=dict)
    outputs: Dict[str, Optional[str]] = field(default_factory=dict)

    def finish(self) -> "RunManifest":
        self.finished = _utcnow()
        for path in list(self.outputs):
            self.outputs[path] = _sha256(path)
        return self

    def to_json(self) -> dict:
        return asdict(self)


def _emit(result: dict, manifest: RunManifest) -> None:
    manifest.finish()
    json.dump({"manifest": manifest.to_json(), "result": result}, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _emit_csv(text: str, manifest: RunManifest) -> None:
    manifest.finish()
    sys.stdout.write("# manifest " + json.dumps(manifest.to_json(), sort_keys=True) + "\n")
    sys.stdout.write(text)


def _write_sidecar(path: str, manifest: RunManifest) -> None:
    manifest.finish()
    with open(path + ".manifest.json", "w") as fh:
        json.dump(manifest.to_json(), fh, indent=2)
        fh.write("\n")


def _unit_arg(text: str):
    try:
        s, x, y = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 's,x,y', got {text!r}")
    if s not in (1, -1):
        raise argparse.ArgumentTypeError("sign must be 1 or -1")
    return s, x, y


# --- commands -----------------------------------------------------------------


def cmd_solve(args, parser) -> int:
    if args.a < -1:
        parser.error("--a must be >= -1 (use the equivalent parameter -a-3)")
    params = CubicParams(args.a)
    n_max = args.n_max if args.n_max is not None else theorem_n_max(args.a)
    if n_max < 1 or args.x_max < 1:
        parser.error("--n-max and --x-max must be positive")
    res = solve_bounded(SearchConfig(params, n_max, args.x_max, include_trivial=True))
    manifest = RunManifest("solve", args.argv)
    if args.format == "csv":
        _emit_csv(classes_to_csv(res.sporadic), manifest)
        return EXIT_OK
    out = res.to_json()
    out["trivial_families"] = sorted({c.family for c in res.trivial} | set(res.families))
    out.pop("trivial")
    out["caveat"] = NON_RIGOROUS_CAVEAT
    _emit(out, manifest)
    return EXIT_OK


def cmd_sweep(args, parser) -> int:
    if args.from_ is None or args.to is None:
        parser.error("sweep needs --from and --to")
    if not (100 < args.from_ <= args.to):
        parser.error("sweep range must satisfy 100 < --from <= --to")
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    manifest = RunManifest("sweep", args.argv)
    values = range(args.from_, args.to + 1, 100) if args.quick else None
    summary = sweep(args.from_, args.to, args.jobs, args.out, a_values=values, precision_cap=args.precision_cap)
    if args.out:
        manifest.outputs[args.out] = None
        _write_sidecar(args.out, manifest)
    result = summary.to_json()
    if args.quick:
        result["note"] = "non-exhaustive: every 100th a"
    _emit(result, manifest)
    return EXIT_OK if summary.ok else EXIT_FAILED


def cmd_verify_certs(args, parser) -> int:
    if not os.path.exists(args.path):
        parser.error(f"no such file: {args.path}")
    manifest = RunManifest("verify-certs", args.argv, inputs={args.path: _sha256(args.path)})
    n, bad = verify_file(args.path)
    _emit({"certificates": n, "failed": {str(a): p for a, p in sorted(bad.items())}, "ok": n > 0 and not bad}, manifest)
    return EXIT_OK if n > 0 and not bad else EXIT_FAILED


def cmd_bounds(args, parser) -> int:
    manifest = RunManifest("bounds", args.argv)
    if args.a is None:
        A = absolute_parameter_bound()
        steps = upper_bound_derivation()
        result = {
            "absolute_parameter_bound": A,
            "within_reference_bound": A <= REFERENCE_PARAMETER_BOUND,
            "derivation": [{"step": s.name, "holds": s.holds} for s in steps],
        }
        _emit(result, manifest)
        return EXIT_OK if A <= REFERENCE_PARAMETER_BOUND and all(s.holds for s in steps) else EXIT_FAILED
    if args.a <= 100:
        parser.error("--a must be > 100 for the exponent bounds")
    _emit(bounds_report(CubicParams(args.a)).to_json(), manifest)
    return EXIT_OK


def cmd_orbit(args, parser) -> int:
    if args.a < -1:
        parser.error("--a must be >= -1")
    p = CubicParams(args.a)
    sol = SolutionTriple(UnitRepr(*args.u1, p), UnitRepr(*args.u2, p), args.n)
    if not sol.is_solution():
        parser.error(f"u1 + u2 != n: {sol.e1} + {sol.e2} != {args.n}")
    members = sorted(orbit(sol), key=lambda t: (-t.n, str(t)))
    triv = is_trivial(sol)
    manifest = RunManifest("orbit", args.argv)
    _emit(
        {
            "orbit_size": len(members),
            "canonical": canonicalize(sol).to_json(),
            "trivial": triv.family,
            "orbit": [m.to_json() for m in members],
        },
        manifest,
    )
    return EXIT_OK


def cmd_table(args, parser) -> int:
    manifest = RunManifest("table", args.argv)
    if args.fixture:
        manifest.inputs[args.fixture] = _sha256(args.fixture)
    try:
        report = reproduce_table(x_max=args.x_max, jobs=args.jobs, fixture_path=args.fixture)
    except MismatchAgainstFixture as exc:
        _emit({"ok": False, "stage": "reproduce_table", "error": str(exc), "diff": _jsonable(exc.diff)}, manifest)
        return EXIT_FAILED
    report["ok"] = True
    if args.format == "csv":
        _emit_csv(classes_to_csv(report["classes"]), manifest)
        return EXIT_OK
    _emit(report, manifest)
    return EXIT_OK


def _jsonable(obj):
    return json.loads(json.dumps(obj, default=str))


def cmd_conjecture_scan(args, parser) -> int:
    a_max = args.to if args.to is not None else 400
    a_min = args.from_ if args.from_ is not None else -1
    n_max = args.n_max if args.n_max is not None else 400
    if a_min < -1 or a_max < a_min or n_max < 1 or args.x_max < 1:
        parser.error("need -1 <= --from <= --to, --n-max >= 1, --x-max >= 1")
    manifest = RunManifest("conjecture-scan", args.argv)
    report = conjecture_scan(a_max, n_max, args.x_max, jobs=args.jobs, a_min=a_min)
    if args.format == "csv":
        _emit_csv("# " + NON_RIGOROUS_CAVEAT + "\n" + classes_to_csv(report["classes"]), manifest)
        return EXIT_OK
    _emit(report, manifest)
    return EXIT_OK


def cmd_theorem(args, parser) -> int:
    manifest = RunManifest("theorem", args.argv)
    stages = {}

    def fail(stage: str, detail) -> int:
        stages[stage] = {"ok": False, "detail": detail}
        _emit({"verdict": f"FAILED at {stage}", "stages": stages}, manifest)
        return EXIT_FAILED

    try:
        table = reproduce_table(jobs=args.jobs, fixture_path=args.fixture)
    except MismatchAgainstFixture as exc:
        return fail("reproduce_table", str(exc))
    stages["reproduce_table"] = {
        "ok": True,
        "sporadic_triples": table["sporadic_triples"],
        "sporadic_classes": table["sporadic_classes"],
        "classes": [
            {"a": c["a"], "u1": c["u1"]["c"], "u2": c["u2"]["c"], "n": c["n"]} for c in table["classes"]
        ],
    }

    A = absolute_parameter_bound()
    steps = upper_bound_derivation()
    if A > REFERENCE_PARAMETER_BOUND or not all(s.holds for s in steps):
        return fail("absolute_parameter_bound", {"A": A, "failed_steps": [s.name for s in steps if not s.holds]})
    stages["absolute_parameter_bound"] = {"ok": True, "A": A}

    # sweep to the larger of A and the published range
    a_to = max(A, REFERENCE_PARAMETER_BOUND)
    values = range(101, a_to + 1, 100) if args.quick else None
    summary = sweep(101, a_to, args.jobs, args.out, a_values=values, precision_cap=args.precision_cap)
    if not summary.ok:
        return fail("sweep", summary.to_json())
    stages["sweep"] = {"ok": True, **summary.to_json()}
    if args.out:
        manifest.outputs[args.out] = None
        _write_sidecar(args.out, manifest)

    verdict = "theorem verified at certificate level"
    if args.quick:
        verdict += " (non-exhaustive: sweep subsampled every 100th a)"
    _emit({"verdict": verdict, "stages": stages}, manifest)
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubic-units",
        description="Unit equations u1 + u2 = n over the orders Z[rho] of simplest cubic fields.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, fmt=False, jobs=False):
        if fmt:
            p.add_argument("--format", choices=("json", "csv"), default="json")
        if jobs:
            p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("solve", help="bounded search for one parameter a")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--n-max", type=int)
    p.add_argument("--x-max", type=int, default=30)
    common(p, fmt=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="continued-fraction reduction over a range of a")
    p.add_argument("--from", dest="from_", type=int)
    p.add_argument("--to", type=int)
    p.add_argument("--out")
    p.add_argument("--quick", action="store_true", help="only every 100th a")
    p.add_argument("--precision-cap", type=int, default=PRECISION_CAP)
    common(p, jobs=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify-certs", help="replay a certificate JSONL file")
    p.add_argument("path")
    p.set_defaults(func=cmd_verify_certs)

    p = sub.add_parser("bounds", help="exponent bounds for a, or the absolute bound on a")
    p.add_argument("--a", type=int)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("orbit", help="equivalence orbit of a solution")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--u1", type=_unit_arg, required=True, help="s,x,y")
    p.add_argument("--u2", type=_unit_arg, required=True, help="s,x,y")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("table", help="reproduce the sporadic-solution table for -1 <= a <= 100")
    p.add_argument("--x-max", type=int, default=30)
    p.add_argument("--fixture", help="alternative table fixture (JSON)")
    common(p, fmt=True, jobs=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("conjecture-scan", help="bounded search over a range of a and n")
    p.add_argument("--from", dest="from_", type=int)
    p.add_argument("--to", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--x-max", type=int, default=60)
    common(p, fmt=True, jobs=True)
    p.set_defaults(func=cmd_conjecture_scan)

    p = sub.add_parser("theorem", help="run the whole proof pipeline")
    p.add_argument("--quick", action="store_true", help="subsample the sweep (every 100th a)")
    p.add_argument("--out", help="certificate JSONL file")
    p.add_argument("--fixture", help="alternative table fixture (JSON)")
    p.add_argument("--precision-cap", type=int, default=PRECISION_CAP)
    common(p, jobs=True)
    p.set_defaults(func=cmd_theorem)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if hasattr(args, "jobs") and args.jobs < 1:
        parser.error("--jobs must be positive")
    try:
        return args.func(args, parser)
    except DomainError as exc:
        parser.error(str(exc))
    except CubicUnitsError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_FAILED


def verify_certs_main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    return main(["verify-certs", *argv])


if __name__ == "__main__":
    sys.exit(main())
