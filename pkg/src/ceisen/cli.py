"""Command-line front end.

Subcommands:
  hseries   dual computation of the weight-3/2 Eisenstein coefficients
            (theta side vs. closed class-number formula), emitted as a table;
  verify    named verification suites (mass, rowsum, trace, hecke, congruence);
  shatable  mod-l divisibility comparison between cusp coefficients m_D and
            class numbers h(-D) over the admissible fundamental family;
  classnum  imaginary quadratic class numbers h(-D), u(-D) for -D a discriminant.

Exit codes: 0 success / all checks pass, 1 a verified identity failed,
2 configuration or precondition error.  All arithmetic is exact; output is
byte-identical across runs and thread counts for the same configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import Discriminant, fundamental_discriminant, is_prime
from .brandt import (
    brandt_matrices_upto,
    expected_row_sum,
    rational_eigensystem,
)
from .order import CacheError, build_class_set, classes_from_json, classes_to_json
from .qform import (
    LevelConfig,
    class_number,
    closed_form_H,
    mass,
    s_ramified,
    unit_factor,
)
from .theta32 import cohen_H, prefill_counts, trace_identity_check
from .verify import (
    CongruencePreconditionError,
    best_coefficient_congruence,
    divisibility_table,
    eigenvalue_congruence,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters shared by the subcommands."""

    ramified: tuple[int, ...]
    M: int
    D_max: int
    m_max: int
    l: int | None
    format: str
    cache_dir: str | None
    out: str | None
    threads: int

    @property
    def level(self) -> LevelConfig:
        return LevelConfig.from_primes(self.ramified, self.M)

    @classmethod
    def from_args(cls, args: argparse.Namespace, need_level: bool = True) -> "RunConfig":
        ramified: tuple[int, ...] = ()
        if need_level:
            if not args.ramified:
                raise ValueError("--ramified is required for this subcommand")
            ramified = tuple(int(tok) for tok in args.ramified.split(",") if tok)
            if not ramified:
                raise ValueError("--ramified must list at least one prime")
        if args.dmax < 0:
            raise ValueError("--dmax must be >= 0")
        if args.mmax < 0:
            raise ValueError("--mmax must be >= 0")
        if args.threads < 1:
            raise ValueError("--threads must be >= 1")
        if args.l is not None and (args.l == 2 or not is_prime(args.l)):
            raise ValueError("--l must be an odd prime")
        cfg = cls(
            ramified=ramified,
            M=args.M,
            D_max=args.dmax,
            m_max=args.mmax,
            l=args.l,
            format=args.format,
            cache_dir=args.cache_dir,
            out=args.out,
            threads=args.threads,
        )
        if need_level:
            cfg.level  # raises ValueError on an invalid level
        return cfg


# ---------------------------------------------------------------------------
# output helpers


def _cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Fraction):
        return str(x)
    return str(x)


def _json_value(x):
    if isinstance(x, Fraction):
        return str(x)
    return x


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _emit(cfg: RunConfig, header: list[str], rows: list[list], json_extra: dict,
          stderr_summary: str | None = None) -> None:
    """Emit one table as CSV (header + rows) or JSON (row objects + extras)."""
    if cfg.format == "csv":
        lines = [",".join(header)]
        lines.extend(",".join(_cell(x) for x in row) for row in rows)
        _write("\n".join(lines) + "\n", cfg.out)
        if stderr_summary is not None:
            print(stderr_summary, file=sys.stderr)
    else:
        obj = dict(json_extra)
        obj["rows"] = [
            {key: _json_value(x) for key, x in zip(header, row)} for row in rows
        ]
        _write(json.dumps(obj, indent=2) + "\n", cfg.out)


def _config_json(cfg: RunConfig) -> dict:
    return {"ramified": list(cfg.ramified), "M": cfg.M}


# ---------------------------------------------------------------------------
# class-set construction with a transparent cache


def _cache_path(cfg: RunConfig) -> str:
    name = "classes_" + "-".join(str(p) for p in cfg.ramified) + f"_M{cfg.M}.json"
    return os.path.join(cfg.cache_dir, name)


def _get_classes(cfg: RunConfig):
    level = cfg.level
    if cfg.cache_dir is None:
        return build_class_set(level)
    os.makedirs(cfg.cache_dir, exist_ok=True)
    path = _cache_path(cfg)
    if os.path.exists(path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
            return classes_from_json(data)
        except (CacheError, ValueError, KeyError, TypeError, OSError,
                json.JSONDecodeError):
            pass  # invalid cache: fall through and rebuild
    classes = build_class_set(level)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(classes_to_json(classes), fh, indent=2)
        fh.write("\n")
    return classes


# ---------------------------------------------------------------------------
# subcommands


def cmd_hseries(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    level = cfg.level
    classes = _get_classes(cfg)
    prefill_counts(classes, max(cfg.D_max, 1), cfg.threads)
    H = cohen_H(classes, cfg.D_max)
    header = ["D", "H_theta", "H_closed", "equal", "fundamental", "s", "h", "u"]
    rows = []
    all_equal = True
    for D in range(cfg.D_max + 1):
        theta = H[D]
        if D == 0:
            closed = mass(level)
            fund, s, h, u = False, 0, 0, 1
        else:
            closed = closed_form_H(D, level)
            fd = fundamental_discriminant(-D)
            fund = fd == -D
            s = s_ramified(D, level)
            h = class_number(fd)
            u = unit_factor(fd)
        equal = theta == closed
        all_equal = all_equal and equal
        rows.append([D, theta, closed, equal, fund, s, h, u])
    _emit(cfg, header, rows, {"config": _config_json(cfg), "all_equal": all_equal})
    return EXIT_OK if all_equal else EXIT_FAIL


def cmd_classnum(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args, need_level=False)
    if cfg.D_max < 3:
        raise ValueError("--dmax must be >= 3 for classnum")
    header = ["D", "fundamental", "h", "u"]
    rows = []
    for D in range(3, cfg.D_max + 1):
        if (-D) % 4 not in (0, 1):
            continue
        disc = Discriminant.of(-D)
        rows.append([D, disc.is_fundamental, class_number(-D), unit_factor(-D)])
    _emit(cfg, header, rows, {"D_max": cfg.D_max})
    return EXIT_OK


def _suite_mass(cfg: RunConfig, classes) -> list[tuple[str, str, bool]]:
    total = classes.total_mass()
    expected = mass(cfg.level)
    return [("mass", f"computed={total};expected={expected}", total == expected)]


def _suite_rowsum(cfg: RunConfig, classes) -> list[tuple[str, str, bool]]:
    mats = brandt_matrices_upto(classes, cfg.m_max)
    checks = []
    for m in range(1, cfg.m_max + 1):
        sums = mats[m].row_sums()
        expected = Fraction(expected_row_sum(m, cfg.level))
        ok = all(s == expected for s in sums)
        observed = sums[0] if len(set(sums)) == 1 else "nonconstant"
        checks.append((f"rowsum:m={m}", f"observed={observed};expected={expected}", ok))
    return checks


def _suite_trace(cfg: RunConfig, classes) -> list[tuple[str, str, bool]]:
    prefill_counts(classes, max(4 * cfg.m_max, 1), cfg.threads)
    return [
        (f"trace:m={row.m}", f"lhs={row.lhs};rhs={row.rhs}", row.ok)
        for row in trace_identity_check(classes, cfg.m_max)
    ]


def _suite_hecke(cfg: RunConfig, classes) -> list[tuple[str, str, bool]]:
    level = cfg.level
    mats = brandt_matrices_upto(classes, cfg.m_max)
    n = classes.n
    checks = []
    identity = all(
        mats[1].entries[i][j] == (1 if i == j else 0)
        for i in range(n) for j in range(n)
    )
    checks.append(("hecke:B1", "B_1 is the identity", identity))
    u_ok = all(
        all(s == expected_row_sum(m, level) for s in mats[m].row_sums())
        for m in range(1, cfg.m_max + 1)
    )
    checks.append(("hecke:u", f"all-ones eigenvector for m<={cfg.m_max}", u_ok))
    for m in range(2, cfg.m_max + 1):
        for mp in range(m + 1, cfg.m_max // m + 1):
            if gcd(m, mp) != 1 or gcd(m * mp, level.N) != 1:
                continue
            ok = (mats[m] @ mats[mp]) == mats[m * mp].entries
            checks.append(
                (f"hecke:mult:{m}x{mp}", f"B_{m}*B_{mp}==B_{m * mp}", ok)
            )
    return checks


def _suite_congruence(cfg: RunConfig, classes) -> list[tuple[str, str, bool]]:
    if cfg.l is None:
        raise CongruencePreconditionError("the congruence suite requires --l")
    level = cfg.level
    eig = rational_eigensystem(classes)
    prefill_counts(classes, max(cfg.D_max, 1), cfg.threads)
    H = cohen_H(classes, cfg.D_max)
    coef, v_used = best_coefficient_congruence(classes, eig, H, cfg.l)
    eigenrep = eigenvalue_congruence(eig, level, cfg.l, max(cfg.m_max, 2), v=v_used)
    checks = [
        (
            "congruence:eigenvalue",
            f"l={cfg.l};p_max={max(cfg.m_max, 2)};failures={len(eigenrep.failures)}",
            eigenrep.passed,
        )
    ]
    for p, lhs, rhs in eigenrep.failures[:10]:
        checks.append((f"congruence:eigenvalue:p={p}", f"a_p={lhs};expected={rhs}", False))
    checks.append(
        (
            "congruence:lambda",
            f"lambda={coef.lam};reason={coef.reason};D_max={coef.checked_max};"
            f"failures={len(coef.failures)};line={list(v_used)}",
            coef.passed,
        )
    )
    for D, lhs, rhs in coef.failures[:10]:
        checks.append((f"congruence:coefficient:D={D}", f"lhs={lhs};rhs={rhs}", False))
    return checks


_SUITES = {
    "mass": _suite_mass,
    "rowsum": _suite_rowsum,
    "trace": _suite_trace,
    "hecke": _suite_hecke,
    "congruence": _suite_congruence,
}


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    if args.suite == "congruence" and cfg.l is None:
        raise ValueError("the congruence suite requires --l")
    classes = _get_classes(cfg)
    checks = _SUITES[args.suite](cfg, classes)
    passed = all(ok for _, _, ok in checks)
    header = ["check", "detail", "passed"]
    rows = [[name, detail, ok] for name, detail, ok in checks]
    _emit(
        cfg, header, rows,
        {"config": _config_json(cfg), "suite": args.suite, "passed": passed},
    )
    return EXIT_OK if passed else EXIT_FAIL


def cmd_shatable(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.l is None:
        raise ValueError("shatable requires --l")
    classes = _get_classes(cfg)
    eig = rational_eigensystem(classes)
    prefill_counts(classes, max(cfg.D_max, 1), cfg.threads)
    H = cohen_H(classes, cfg.D_max)
    coef, v_used = best_coefficient_congruence(classes, eig, H, cfg.l)
    table = divisibility_table(classes, eig, cfg.l, cfg.D_max, v=v_used)
    agree = sum(1 for row in table if row.agree)
    total = len(table)
    rate = Fraction(agree, total) if total else Fraction(1)
    header = ["D", "fundamental", "s", "h", "h_mod_l", "m_D", "m_D_mod_l", "agree"]
    rows = [
        [r.D, r.fundamental, r.s, r.h, r.h_mod_l, r.m_D, r.m_D_mod_l, r.agree]
        for r in table
    ]
    summary = f"lambda={coef.lam};agree={agree}/{total};rate={rate}"
    _emit(
        cfg, header, rows,
        {
            "config": _config_json(cfg),
            "l": cfg.l,
            "lambda": coef.lam,
            "line": list(v_used),
            "agree": agree,
            "total": total,
            "agreement_rate": str(rate),
        },
        stderr_summary=summary,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ceisen",
        description="Exact weight-3/2 Eisenstein coefficients from quaternion "
        "ideal classes, with verification suites.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ramified", default=None,
                        help="comma-separated ramified primes, e.g. 2,3,11")
    common.add_argument("--M", type=int, default=1,
                        help="square-free auxiliary level coprime to the ramified part")
    common.add_argument("--dmax", type=int, default=2000,
                        help="largest coefficient index D (default 2000)")
    common.add_argument("--mmax", type=int, default=30,
                        help="largest Brandt index m; also the prime bound of the "
                        "congruence eigenvalue check (default 30)")
    common.add_argument("--l", type=int, default=None, help="odd prime modulus")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--cache-dir", default=None,
                        help="directory for class-set snapshots (validated on load)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker count; results are byte-identical for any value")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("hseries", parents=[common],
                       help="coefficient table: theta side vs. closed formula")
    p.set_defaults(func=cmd_hseries)
    p = sub.add_parser("verify", parents=[common], help="run one verification suite")
    p.add_argument("--suite", choices=tuple(_SUITES), required=True)
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("shatable", parents=[common],
                       help="mod-l divisibility of m_D vs. h(-D)")
    p.set_defaults(func=cmd_shatable)
    p = sub.add_parser("classnum", parents=[common],
                       help="class numbers h(-D), u(-D) for -D a discriminant")
    p.set_defaults(func=cmd_classnum)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, CongruencePreconditionError) as exc:
        print(f"ceisen: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())
