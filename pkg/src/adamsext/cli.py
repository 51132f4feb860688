"""Command-line interface: ``adamsext validate|resolve|ext|verify-paper``.

Exit codes: 0 success, 1 domain violation (invalid module, failed claim),
2 input/output or parse error, 3 internal cross-check failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import charts
from .charts import OracleDisagreement, build_chart, chart_from_resolution, render
from .claims import ERROR, FAIL, format_report, run_claims
from .modules import FDModule, ModuleParseError, load_fixture, load_module, normalize, validate
from .resolution import DEFAULT_MAX_S, DEFAULT_MAX_T, ResolutionFileError, cached_resolve, save

EXIT_OK, EXIT_VIOLATION, EXIT_IO, EXIT_CROSSCHECK = 0, 1, 2, 3
CACHE_ENV = "ADAMSEXT_CACHE_DIR"


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read_module(path: str) -> FDModule:
    try:
        return load_module(path)
    except ModuleParseError as exc:
        raise _Fail(EXIT_IO, f"{path}: parse error: {exc}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise _Fail(EXIT_IO, f"{path}: {exc}") from None


def _valid_module(path: str) -> FDModule:
    m = _read_module(path)
    violations = validate(m)
    if violations:
        lines = [f"{path}: {len(violations)} Adem violation(s)"]
        lines += [f"  (a={v.a}, b={v.b}, {v.generator}) {v}" for v in violations]
        raise _Fail(EXIT_VIOLATION, "\n".join(lines))
    return m


def _cache_dir(args) -> str | None:
    return args.cache_dir or os.environ.get(CACHE_ENV) or None


def _write(data: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        Path(out).write_bytes(data)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"{out}: {exc}") from None


def _load_aliases(path: str) -> dict:
    try:
        return charts.load_aliases(path)
    except (OSError, ValueError, AttributeError) as exc:
        raise _Fail(EXIT_IO, f"{path}: bad alias table ({exc})") from None


# ------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    m = _valid_module(args.module)
    print(f"{args.module}: module {m.name} ok ({m.dim} cells, degrees {m.bottom}..{m.top})")
    return EXIT_OK


def cmd_resolve(args) -> int:
    m = _valid_module(args.module)
    if not m.basis:
        print(f"module {m.name} is zero; nothing to resolve")
        return EXIT_OK
    r = cached_resolve(normalize(m), args.max_s, args.max_t, _cache_dir(args))
    if args.out:
        try:
            save(r, args.out)
        except OSError as exc:
            raise _Fail(EXIT_IO, f"{args.out}: {exc}") from None
    chart = chart_from_resolution(r, args.max_s, args.max_t - args.max_s, f"Ext({m.name}, F2)", m.bottom)
    print(f"# generators of F_s, columns are stems (shifted by {m.bottom})")
    sys.stdout.write(charts.render_ascii(chart))
    return EXIT_OK


def cmd_ext(args) -> int:
    m = _valid_module(args.module)
    n = _valid_module(args.other) if args.other else load_fixture("sphere")
    if args.max_t < args.max_s:
        raise _Fail(EXIT_IO, "--max-t must be at least --max-s")
    try:
        chart = build_chart(m, n, args.max_s, args.max_t - args.max_s, _cache_dir(args))
    except OracleDisagreement as exc:
        s, t = exc.bidegree
        raise _Fail(EXIT_CROSSCHECK, f"oracle disagreement at stem {t - s}, s {s}: {exc}") from None
    except ResolutionFileError as exc:
        raise _Fail(EXIT_IO, f"cache: {exc}") from None
    if args.aliases:
        try:
            chart = chart.with_aliases(_load_aliases(args.aliases))
        except KeyError as exc:
            raise _Fail(EXIT_IO, f"{args.aliases}: {exc.args[0]}") from None
    _write(render(chart, args.format), args.out)
    return EXIT_OK


def cmd_verify_paper(args) -> int:
    ids = [x.strip() for x in args.only.split(",")] if args.only else None
    results = run_claims(_cache_dir(args), ids)
    sys.stdout.write(format_report(results))
    if any(r.status == ERROR for r in results):
        return EXIT_CROSSCHECK
    if any(r.status == FAIL for r in results):
        return EXIT_VIOLATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adamsext", description="Ext over the mod 2 Steenrod algebra and Adams E2 charts.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="parse a .fdmod file and check the Adem relations")
    v.add_argument("module")
    v.set_defaults(func=cmd_validate)

    cache_help = f"directory of saved resolutions (default: ${CACHE_ENV}, else no caching)"

    r = sub.add_parser("resolve", help="minimal resolution of M; prints Ext(M, F2) generator counts")
    r.add_argument("module")
    r.add_argument("--max-s", type=int, default=DEFAULT_MAX_S)
    r.add_argument("--max-t", type=int, default=DEFAULT_MAX_T)
    r.add_argument("--out", help="save the resolution to this file")
    r.add_argument("--cache-dir", help=cache_help)
    r.set_defaults(func=cmd_resolve)

    e = sub.add_parser(
        "ext",
        help="E2 chart of Ext(M, N) (N defaults to the sphere)",
        description="Chart of Ext_A(M, N) = Ext_A(M (x) DN, F2), the Adams E2 page for maps from "
                    "the space of N to the space of M.  For maps X -> Y run `ext Y.fdmod X.fdmod`.",
    )
    e.add_argument("module", metavar="M")
    e.add_argument("other", metavar="N", nargs="?")
    e.add_argument("--max-s", type=int, default=DEFAULT_MAX_S)
    e.add_argument("--max-t", type=int, default=DEFAULT_MAX_T, help="stems run up to max-t minus max-s")
    e.add_argument("--format", choices=sorted(charts.RENDERERS), default="ascii")
    e.add_argument("--out", help="write here instead of standard output")
    e.add_argument("--aliases", help='JSON file {"stem,s,index": name} renaming classes')
    e.add_argument("--cache-dir", help=cache_help)
    e.set_defaults(func=cmd_ext)

    vp = sub.add_parser("verify-paper", help="run the chart-level claim suite C1-C9")
    vp.add_argument("--cache-dir", help=cache_help)
    vp.add_argument("--only", help="comma-separated claim ids")
    vp.set_defaults(func=cmd_verify_paper)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        _err(str(exc))
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
