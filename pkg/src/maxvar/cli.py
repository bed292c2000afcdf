"""Command-line interface.

Subcommands: ``bound``, ``witness``, ``check``, ``audit``, ``curve``, ``verify``.

Exit codes: 0 ok/feasible, 1 some report infeasible (or invalid in an
audit), 2 usage error, 3 unparseable number or malformed file, 4 mean
outside the bounds, 5 oracle mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .core import (
    InfeasibleInstanceError,
    ProblemSpec,
    bhatia_davis,
    envelope,
    max_variance,
    witness_dataset,
)
from .feasibility import FeasibilityVerdict, ReportedStats, Status, check
from .numbers import MaxVarError, ParseError, format_decimal, format_rational, to_rational
from .oracle import hill_climb_max, vertex_max

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_BAD_INSTANCE = 4
EXIT_MISMATCH = 5

AUDIT_COLUMNS = ("id", "n", "mean", "sd", "min", "max")
CURVE_HEADER = ("n", "sharp_bound", "bhatia_davis", "envelope_lo", "gap")
CSV_OUT_HEADER = ("id", "status", "max_attainable_variance", "max_attainable_variance_decimal",
                  "reported_variance_lo", "reported_variance_hi", "margin", "witness", "reason")


class UsageError(Exception):
    pass


def _num(r) -> dict:
    return {"rational": format_rational(r), "decimal": format_decimal(r)}


def _parse_number(s: str) -> Fraction:
    return to_rational(s)


def _spec_from_args(args) -> ProblemSpec:
    return ProblemSpec.of(args.n, _parse_number(args.mean), _parse_number(args.min),
                          _parse_number(args.max))


def _emit(text: str, out=None):
    (out or sys.stdout).write(text)


# -- bound / witness -------------------------------------------------------

def bound_report(spec: ProblemSpec, sample: bool = False) -> dict:
    m, M, n = spec.bounds.lower, spec.bounds.upper, spec.n
    sharp = max_variance(spec)
    bd = bhatia_davis(spec.mean, m, M)
    width2 = (M - m) ** 2
    lo, hi = envelope(n, spec.unit_mean)
    structure, _ = witness_dataset(spec)
    report = {
        "n": n,
        "mean": _num(spec.mean),
        "min": _num(m),
        "max": _num(M),
        "sharp_max_variance": _num(sharp),
        "bhatia_davis": _num(bd),
        "envelope": {"lo": _num(width2 * lo), "hi": _num(width2 * hi)},
        "diagnostics": {
            "unit_mean": _num(spec.unit_mean),
            "k": structure.count_at_max,
            "a": _num(structure.interior),
        },
    }
    if sample:
        report["sample_max_variance"] = _num(sharp * n / (n - 1)) if n >= 2 else None
    return report


def _fmt(d: dict) -> str:
    return f"{d['rational']} ({d['decimal']})" if d["rational"] != d["decimal"] else d["decimal"]


def cmd_bound(args) -> int:
    spec = _spec_from_args(args)
    if args.sample and spec.n < 2:
        raise UsageError("--sample needs n >= 2")
    report = bound_report(spec, args.sample)
    if args.json:
        _emit(json.dumps(report) + "\n")
        return EXIT_OK
    diag = report["diagnostics"]
    lines = [
        f"sharp max variance: {_fmt(report['sharp_max_variance'])}",
        f"bhatia-davis bound: {_fmt(report['bhatia_davis'])}",
        f"envelope:           [{_fmt(report['envelope']['lo'])}, {_fmt(report['envelope']['hi'])}]",
    ]
    if args.sample:
        lines.append(f"sample max variance: {_fmt(report['sample_max_variance'])}")
    lines.append(f"unit mean {_fmt(diag['unit_mean'])}, k = {diag['k']} at max, "
                 f"a = {_fmt(diag['a'])}")
    _emit("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_witness(args) -> int:
    spec = _spec_from_args(args)
    _, ds = witness_dataset(spec)
    sharp = max_variance(spec)
    var = ds.population_variance
    report = {
        "witness": [format_decimal(v) for v in ds.values],
        "mean": _num(ds.mean),
        "variance": _num(var),
        "matches_bound": var == sharp and ds.mean == spec.mean,
    }
    if args.sample:
        if spec.n < 2:
            raise UsageError("--sample needs n >= 2")
        report["sample_variance"] = _num(ds.sample_variance)
    if args.json:
        _emit(json.dumps(report) + "\n")
        return EXIT_OK
    _emit(" ".join(report["witness"]) + "\n")
    check_line = "ok" if report["matches_bound"] else "MISMATCH"
    _emit(f"mean {_fmt(report['mean'])}, variance {_fmt(report['variance'])} [{check_line}]\n")
    return EXIT_OK if report["matches_bound"] else EXIT_MISMATCH


# -- check / audit ---------------------------------------------------------

def verdict_record(row_id, verdict: FeasibilityVerdict) -> dict:
    """JSON-ready verdict with a fixed key order."""
    rec = {"id": row_id, "status": verdict.status.value}
    rec["max_attainable_variance"] = (
        _num(verdict.max_attainable_variance) if verdict.max_attainable_variance is not None else None
    )
    w = verdict.reported_variance_window
    rec["reported_variance_window"] = {"lo": _num(w.lo), "hi": _num(w.hi)} if w is not None else None
    if verdict.witness is not None:
        rec["witness"] = [format_decimal(v) for v in verdict.witness.values]
    rec["margin"] = _num(verdict.margin) if verdict.margin is not None else None
    if verdict.reason:
        rec["reason"] = verdict.reason
    return rec


def csv_record(rec: dict) -> list[str]:
    mav = rec["max_attainable_variance"]
    w = rec["reported_variance_window"]
    return [
        rec["id"],
        rec["status"],
        mav["rational"] if mav else "",
        mav["decimal"] if mav else "",
        w["lo"]["decimal"] if w else "",
        w["hi"]["decimal"] if w else "",
        rec["margin"]["decimal"] if rec["margin"] else "",
        " ".join(rec.get("witness", [])),
        rec.get("reason", ""),
    ]


def _verdict_text(rec: dict) -> str:
    lines = [f"status: {rec['status']}"]
    if rec["max_attainable_variance"]:
        lines.append(f"max attainable variance: {_fmt(rec['max_attainable_variance'])}")
    if rec["reported_variance_window"]:
        w = rec["reported_variance_window"]
        lines.append(f"reported variance window: [{w['lo']['decimal']}, {w['hi']['decimal']}]")
    if rec["margin"]:
        lines.append(f"margin: {rec['margin']['decimal']}")
    if "witness" in rec:
        lines.append("witness: " + " ".join(rec["witness"]))
    if "reason" in rec:
        lines.append(f"reason: {rec['reason']}")
    return "\n".join(lines) + "\n"


def _status_exit(status: Status) -> int:
    return {Status.FEASIBLE: EXIT_OK, Status.INFEASIBLE: EXIT_INFEASIBLE,
            Status.INVALID_INPUT: EXIT_PARSE}[status]


def cmd_check(args) -> int:
    stats = ReportedStats.of(
        args.n, args.mean, args.sd, _parse_number(args.min), _parse_number(args.max),
        args.convention, args.mode, exact_mean=args.exact_mean, exact_sd=args.exact_sd,
        mean_decimals=args.mean_decimals, sd_decimals=args.sd_decimals,
    )
    verdict = check(stats)
    rec = verdict_record(args.id, verdict)
    _emit(json.dumps(rec) + "\n" if args.json else _verdict_text(rec))
    return _status_exit(verdict.status)


@dataclass(frozen=True)
class AuditRow:
    id: str
    n: str
    mean: str
    sd: str
    min: str
    max: str
    convention: str = ""
    semantics: str = ""
    mean_decimals: str = ""
    sd_decimals: str = ""

    def to_stats(self) -> ReportedStats:
        try:
            n = int(self.n)
        except ValueError:
            raise ParseError(f"n is not an integer: {self.n!r}") from None
        return ReportedStats.of(
            n, self.mean, self.sd, to_rational(self.min), to_rational(self.max),
            self.convention or "population", self.semantics or "bounds",
            mean_decimals=int(self.mean_decimals) if self.mean_decimals else None,
            sd_decimals=int(self.sd_decimals) if self.sd_decimals else None,
        )


def evaluate_row(row: AuditRow) -> dict:
    try:
        verdict = check(row.to_stats())
    except (MaxVarError, ValueError) as e:
        verdict = FeasibilityVerdict(Status.INVALID_INPUT, reason=str(e))
    return verdict_record(row.id, verdict)


def read_audit_rows(path: str) -> list[AuditRow]:
    """Parse an audit CSV; raises ParseError when the file itself is malformed."""
    try:
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            header = reader.fieldnames
            if not header:
                raise ParseError("audit file is empty or has no header row")
            header = [h.strip() for h in header]
            missing = [c for c in AUDIT_COLUMNS if c not in header]
            if missing:
                raise ParseError(f"audit file lacks columns: {', '.join(missing)}")
            reader.fieldnames = header
            raw = list(reader)
    except (OSError, UnicodeDecodeError, csv.Error) as e:
        raise ParseError(f"cannot read audit file: {e}") from None
    fields = AuditRow.__dataclass_fields__
    rows = []
    for r in raw:
        kwargs = {k: (v or "").strip() for k, v in r.items() if k in fields}
        rows.append(AuditRow(**kwargs))
    return rows


def run_audit(rows: list[AuditRow], jobs: int = 1) -> list[dict]:
    """Evaluate rows, in parallel when ``jobs > 1``; output order follows input order."""
    seen = set()
    todo, dupes = [], {}
    for i, row in enumerate(rows):
        if row.id in seen or not row.id:
            dupes[i] = row.id
        else:
            seen.add(row.id)
            todo.append(i)
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(evaluate_row, [rows[i] for i in todo], chunksize=16))
    else:
        done = [evaluate_row(rows[i]) for i in todo]
    results: list[dict] = [None] * len(rows)
    for i, rec in zip(todo, done):
        results[i] = rec
    for i, row_id in dupes.items():
        reason = "duplicate id" if row_id else "missing id"
        results[i] = verdict_record(row_id, FeasibilityVerdict(Status.INVALID_INPUT, reason=reason))
    return results


def format_audit(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return "".join(json.dumps(r) + "\n" for r in records)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_OUT_HEADER)
    for r in records:
        w.writerow(csv_record(r))
    return buf.getvalue()


def cmd_audit(args) -> int:
    rows = read_audit_rows(args.file)
    records = run_audit(rows, args.jobs)
    text = format_audit(records, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        _emit(text)
    counts = {s.value: 0 for s in Status}
    for r in records:
        counts[r["status"]] += 1
    summary = ", ".join(f"{v} {k}" for k, v in counts.items())
    sys.stderr.write(f"audit: {len(records)} rows: {summary}\n")
    if args.no_fail or counts["feasible"] == len(records):
        return EXIT_OK
    return EXIT_INFEASIBLE


# -- curve / verify --------------------------------------------------------

def curve_rows(mean, lower, upper, n_from: int, n_to: int) -> list[tuple]:
    mean, lower, upper = to_rational(mean), to_rational(lower), to_rational(upper)
    bd = bhatia_davis(mean, lower, upper)
    rows = []
    for n in range(n_from, n_to + 1):
        sharp = max_variance(ProblemSpec.of(n, mean, lower, upper))
        env_lo = bd - (upper - lower) ** 2 / (4 * n)
        rows.append((n, sharp, bd, env_lo, bd - sharp))
    return rows


def cmd_curve(args) -> int:
    if args.n_from > args.n_to:
        raise UsageError("--n-from must not exceed --n-to")
    if args.n_from < 1:
        raise UsageError("--n-from must be >= 1")
    rows = curve_rows(_parse_number(args.mean), _parse_number(args.min), _parse_number(args.max),
                      args.n_from, args.n_to)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for n, *vals in rows:
        w.writerow([n, *(format_decimal(v) for v in vals)])
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write(buf.getvalue())
    else:
        _emit(buf.getvalue())
    return EXIT_OK


def sweep(n_max: int, den_max: int):
    """Yield ``(n, p, q)`` for the verification grid on the unit scale."""
    for n in range(1, n_max + 1):
        for q in range(1, den_max + 1):
            for p in range(q + 1):
                yield n, p, q


def cmd_verify(args) -> int:
    count = 0
    for n, p, q in sweep(args.n_max, args.den_max):
        spec = ProblemSpec.of(n, Fraction(p, q))
        closed, oracle = max_variance(spec), vertex_max(spec).best_variance
        count += 1
        if closed != oracle:
            _emit(f"MISMATCH at n={n}, c={p}/{q}: closed form {closed}, vertex oracle {oracle}\n")
            return EXIT_MISMATCH
    _emit(f"all {count:,} instances match exactly\n")
    if args.seed is not None:
        rng = random.Random(args.seed)
        grid = list(sweep(args.n_max, args.den_max))
        worst = 0.0
        for n, p, q in rng.sample(grid, min(args.spot_checks, len(grid))):
            spec = ProblemSpec.of(n, Fraction(p, q))
            approx = hill_climb_max(spec, restarts=20, seed=rng.randrange(2**31)).best_variance
            err = abs(approx - float(max_variance(spec)))
            worst = max(worst, err)
            if err > 1e-6:
                _emit(f"MISMATCH at n={n}, c={p}/{q}: hill climb {approx!r}, closed form "
                      f"{max_variance(spec)}\n")
                return EXIT_MISMATCH
        _emit(f"hill-climb spot checks: {min(args.spot_checks, len(grid))} within 1e-6 "
              f"(worst {worst:.3g})\n")
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def _instance_flags(p):
    p.add_argument("--n", type=int, required=True, help="dataset length")
    p.add_argument("--mean", required=True)
    p.add_argument("--min", required=True)
    p.add_argument("--max", required=True)
    p.add_argument("--sample", action="store_true", help="also report the n/(n-1) sample variance")
    p.add_argument("--json", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxvar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="sharp maximum variance for one instance")
    _instance_flags(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("witness", help="dataset attaining the maximum")
    _instance_flags(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("check", help="feasibility of reported summary statistics")
    p.add_argument("--id", default="")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mean", required=True)
    p.add_argument("--sd", required=True)
    p.add_argument("--min", required=True)
    p.add_argument("--max", required=True)
    p.add_argument("--convention", choices=["population", "sample"], default="population")
    p.add_argument("--mode", choices=["bounds", "attained"], default="bounds")
    p.add_argument("--exact-mean", action="store_true")
    p.add_argument("--exact-sd", action="store_true")
    p.add_argument("--mean-decimals", type=int)
    p.add_argument("--sd-decimals", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("audit", help="check every row of a CSV file")
    p.add_argument("file")
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-fail", action="store_true", help="exit 0 even if rows fail")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("curve", help="sharp bound versus n, as CSV")
    p.add_argument("--mean", required=True)
    p.add_argument("--min", required=True)
    p.add_argument("--max", required=True)
    p.add_argument("--n-from", type=int, required=True)
    p.add_argument("--n-to", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("verify", help="compare the closed form with the vertex oracle")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--den-max", type=int, required=True)
    p.add_argument("--seed", type=int, help="also run hill-climb spot checks")
    p.add_argument("--spot-checks", type=int, default=20)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        parser.error(str(e))
    except InfeasibleInstanceError as e:
        sys.stderr.write(f"maxvar: infeasible instance: {e}\n")
        return EXIT_BAD_INSTANCE
    except MaxVarError as e:
        sys.stderr.write(f"maxvar: {e}\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
