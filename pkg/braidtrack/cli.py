"""
Command-line front end.

USAGE:
    braidtrack braid "z^3 - t^2" --format text
    braidtrack braid --example two-branch --render tikz
    braidtrack branch "z^3 - t^2*(1-t)"
    braidtrack arrangement lines.json --plot-loops loops.svg
    braidtrack render "s2 s1 s2 s1" --strands 3 --format tikz
    braidtrack verify report.json
    braidtrack loop --example triangle
    braidtrack restrict "z^3 - u1*u2" --vars u1,u2
    braidtrack examples

Exit codes: 0 success, 2 when every lambda gave an improper crossing,
1 for any other failure (including a report that fails verification).
Reports go to stdout (or --out); diagnostics go to stderr.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
import argparse
import json
import logging
import os
import sys

from tqdm import tqdm

from .braid import format_word, parse_word
from .branchlocus import arrangement_branch_points, branch_points, load_arrangement
from .catalog import example_arrangement, example_loop, get_example, list_examples
from .crossdetect import CrossOptions
from .engine import (
    EngineOptions,
    GroupReport,
    arrangement_braid_generators,
    braid_generators,
    loop_braid,
    restrict_to_line,
    verify_report,
)
from .errors import BraidTrackError, LambdaExhaustedError
from .homotopy import TrackOptions
from .looper import LoopOptions, user_loop
from .poly import BivariatePoly, format_poly, parse_multivariate, parse_poly
from .render import FORMATS, render, render_loops_svg, tikz_picture

logger = logging.getLogger("braidtrack")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_LAMBDA = 2


# =========================================================
# CONFIGURATION
# =========================================================

@dataclass(frozen=True)
class RunConfig:
    engine: EngineOptions
    output_format: str = "json"
    out: Optional[str] = None
    render: Optional[str] = None
    plot_loops: Optional[str] = None


def _seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("BRAIDTRACK_SEED", "0"))


def build_config(args: argparse.Namespace) -> RunConfig:
    seed = _seed(args)
    track = TrackOptions(newton_tol=args.track_tol) if args.track_tol else TrackOptions()
    cross = CrossOptions(
        cross_tol=args.cross_tol,
        proper_tol=args.proper_tol,
        lambda_retries=args.lambda_retries,
        rng_seed=seed,
    )
    loop = LoopOptions(polygon_sides=args.polygon_sides, radius_factor=args.radius_factor)
    engine = EngineOptions(
        seed=seed,
        lambda_override=complex(args.lambda_) if args.lambda_ else None,
        track=track,
        cross=cross,
        loop=loop,
    )
    return RunConfig(engine, args.format, args.out, getattr(args, "render", None),
                     getattr(args, "plot_loops", None))


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(level)


# =========================================================
# INPUT AND OUTPUT
# =========================================================

def format_complex(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return f"{c.real:.6g}"
    return f"{c.real:.6g}{c.imag:+.6g}i"


def _read_text(value: str) -> str:
    path = Path(value)
    if path.suffix and path.is_file():
        return path.read_text().strip()
    return value


def _read_poly(args: argparse.Namespace) -> BivariatePoly:
    if args.example:
        entry = get_example(args.example)
        return parse_poly(entry.source)
    if not args.input:
        raise SystemExit("an input polynomial or --example is required")
    return parse_poly(_read_text(args.input))


def _parse_complex_list(text: str, sep: str = ",") -> List[complex]:
    return [complex(item.replace(" ", "")) for item in text.split(sep) if item.strip()]


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _report_text(report: GroupReport, cfg: RunConfig) -> str:
    lines = [
        f"curve: {report.source.get('text', report.source.get('kind', ''))}",
        f"strands: {report.n}   lambda: {format_complex(report.lam)}",
        f"branch points: {len(report.branch)}",
    ]
    for k, g in enumerate(report.generators):
        bp = format_complex(g.branch_point) if g.branch_point is not None else "-"
        lines.append(f"[{k + 1}] t = {bp}")
        lines.append(f"    word: {format_word(g.word) or '(identity)'}")
        lines.append(f"    core: {format_word(g.core) or '(identity)'}")
        lines.append(f"    perm: {g.perm.to_list()}")
        if cfg.render:
            lines.append(render(g.core, cfg.render).rstrip("\n"))
    order = report.monodromy_order if report.monodromy_order is not None else "?"
    kind = "transitive" if report.monodromy_transitive else "intransitive"
    lines.append(f"monodromy: order {order}, {kind}")
    return "\n".join(lines) + "\n"


def _emit_report(report: GroupReport, cfg: RunConfig) -> None:
    if cfg.plot_loops:
        Path(cfg.plot_loops).write_text(
            render_loops_svg(report.branch, [g.loop for g in report.generators]))
    if cfg.output_format == "text":
        _emit(cfg, _report_text(report, cfg))
        return
    data = report.to_dict()
    if cfg.render:
        for g, entry in zip(report.generators, data["generators"]):
            entry["render"] = render(g.core, cfg.render)
    _emit(cfg, json.dumps(data, indent=2) + "\n")


def _progress(total: int, desc: str) -> tqdm:
    return tqdm(total=total, desc=desc, unit="loop", file=sys.stderr, leave=False,
                disable=not sys.stderr.isatty())


# =========================================================
# SUBCOMMANDS
# =========================================================

def cmd_braid(args: argparse.Namespace, cfg: RunConfig) -> int:
    f = _read_poly(args)
    logger.info("computing generators of %s", format_poly(f))
    branch = branch_points(f, cfg.engine.branch_tol, cfg.engine.seed) if f.degz > 1 else None
    with _progress(len(branch) if branch is not None else 0, "loops") as bar:
        report = braid_generators(f, cfg.engine, branch, progress=bar)
    _emit_report(report, cfg)
    return EXIT_OK


def cmd_branch(args: argparse.Namespace, cfg: RunConfig) -> int:
    f = _read_poly(args)
    branch = branch_points(f, cfg.engine.branch_tol, cfg.engine.seed)
    if cfg.output_format == "text":
        _emit(cfg, "".join(f"{format_complex(p)}\n" for p in branch))
    else:
        _emit(cfg, json.dumps(branch.to_dict(), indent=2) + "\n")
    return EXIT_OK


def cmd_arrangement(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.example:
        arr = example_arrangement(args.example, cfg.engine.seed)
    else:
        if not args.input:
            raise SystemExit("an arrangement file or --example is required")
        arr = load_arrangement(json.loads(Path(args.input).read_text()), cfg.engine.seed)
    branch = arrangement_branch_points(arr, cfg.engine.branch_tol)
    with _progress(len(branch), "loops") as bar:
        report = arrangement_braid_generators(arr, cfg.engine, branch, progress=bar)
    _emit_report(report, cfg)
    return EXIT_OK


def cmd_render(args: argparse.Namespace, cfg: RunConfig) -> int:
    w = parse_word(args.word, args.strands)
    text = tikz_picture(w) if args.format == "tikz" and args.picture else render(w, args.format)
    _emit(cfg, text)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    data = json.loads(Path(args.report).read_text())
    failures = verify_report(data)
    for failure in failures:
        print(f"FAIL {failure}", file=sys.stderr)
    if failures:
        return EXIT_FAILURE
    print("PASS", file=sys.stderr)
    return EXIT_OK


def cmd_loop(args: argparse.Namespace, cfg: RunConfig) -> int:
    f = _read_poly(args)
    if args.vertices:
        loop = user_loop(_parse_complex_list(args.vertices, ";"))
    elif args.example:
        loop = example_loop(args.example)
    else:
        raise SystemExit("--vertices or a loop --example is required")
    report = loop_braid(f, loop, cfg.engine)
    if cfg.output_format == "text":
        lines = [f"word: {format_word(report.word) or '(identity)'}",
                 f"perm: {report.perm.to_list()}"]
        lines += [f"  t = {format_complex(c.t)}  s{c.index}^{c.sign:+d}" for c in report.crossings]
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        data: Dict[str, Any] = {"status": "completed", "lambda": report.diagnostics.get("lambda")}
        data.update(report.to_dict())
        _emit(cfg, json.dumps(data, indent=2) + "\n")
    return EXIT_OK


def cmd_restrict(args: argparse.Namespace, cfg: RunConfig) -> int:
    names = ["z"] + [v.strip() for v in args.vars.split(",") if v.strip()]
    F = parse_multivariate(_read_text(args.input), names)
    u0 = _parse_complex_list(args.u0) if args.u0 else None
    v = _parse_complex_list(args.direction) if args.direction else None
    f = restrict_to_line(F, u0, v, seed=cfg.engine.seed)
    logger.info("restricted curve: %s", format_poly(f))
    report = braid_generators(f, cfg.engine)
    _emit_report(report, cfg)
    return EXIT_OK


def cmd_examples(args: argparse.Namespace, cfg: RunConfig) -> int:
    entries = list_examples()
    if cfg.output_format == "json":
        _emit(cfg, json.dumps(entries, indent=2) + "\n")
    else:
        _emit(cfg, "".join(f"{e['name']:<14} {e['kind']:<12} {e['description']}\n"
                           for e in entries))
    return EXIT_OK


# =========================================================
# PARSER
# =========================================================

def _add_common(p: argparse.ArgumentParser, formats: Sequence[str] = ("json", "text"),
                default_format: str = "json") -> None:
    p.add_argument("--seed", type=int, default=None, help="random seed (default: $BRAIDTRACK_SEED or 0)")
    p.add_argument("--lambda", dest="lambda_", type=str, default=None,
                   help="fixed rotation lambda, e.g. 0.6+0.8j")
    p.add_argument("--polygon-sides", type=int, default=4)
    p.add_argument("--radius-factor", type=float, default=0.2)
    p.add_argument("--track-tol", type=float, default=None, help="Newton tolerance for tracking")
    p.add_argument("--cross-tol", type=float, default=1e-7)
    p.add_argument("--proper-tol", type=float, default=1e-7)
    p.add_argument("--lambda-retries", type=int, default=5)
    p.add_argument("--format", choices=formats, default=default_format)
    p.add_argument("--out", type=str, default=None, help="write the result here instead of stdout")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="braidtrack",
        description="Braid group generators of plane curves and line arrangements",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (("braid", "generators of a curve"), ("branch", "branch points of a curve"),
                           ("loop", "braid of a closed polyline")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("input", nargs="?", help="polynomial text or a file containing it")
        p.add_argument("--example", default=None, help="use a catalog entry")
        _add_common(p)
        if name == "braid":
            p.add_argument("--render", choices=FORMATS, default=None)
            p.add_argument("--plot-loops", default=None, metavar="FILE.svg")
        if name == "loop":
            p.add_argument("--vertices", default=None, help="'re+imj;re+imj;...'")

    p = sub.add_parser("arrangement", help="generators of a line arrangement")
    p.add_argument("input", nargs="?", help="JSON file with 'matrix' or 'lines'")
    p.add_argument("--example", default=None)
    _add_common(p)
    p.add_argument("--render", choices=FORMATS, default=None)
    p.add_argument("--plot-loops", default=None, metavar="FILE.svg")

    p = sub.add_parser("render", help="draw a braid word")
    p.add_argument("word")
    p.add_argument("--strands", "-n", type=int, default=None)
    p.add_argument("--picture", action="store_true", help="wrap TikZ output in tikzpicture")
    _add_common(p, FORMATS, "ascii")

    p = sub.add_parser("verify", help="re-check a JSON report")
    p.add_argument("report")
    _add_common(p)

    p = sub.add_parser("restrict", help="hypersurface restricted to a line")
    p.add_argument("input", help="polynomial in z and the --vars names")
    p.add_argument("--vars", required=True, help="comma-separated u-variable names")
    p.add_argument("--u0", default=None, help="comma-separated point on the line")
    p.add_argument("--direction", default=None, help="comma-separated direction")
    _add_common(p)
    p.add_argument("--render", choices=FORMATS, default=None)
    p.add_argument("--plot-loops", default=None, metavar="FILE.svg")

    p = sub.add_parser("examples", help="list catalog entries")
    _add_common(p, default_format="text")
    return parser


COMMANDS = {
    "braid": cmd_braid,
    "branch": cmd_branch,
    "arrangement": cmd_arrangement,
    "render": cmd_render,
    "verify": cmd_verify,
    "loop": cmd_loop,
    "restrict": cmd_restrict,
    "examples": cmd_examples,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](args, cfg)
    except LambdaExhaustedError as err:
        print(f"error: {err}", file=sys.stderr)
        print(json.dumps({"attempts": err.attempts, "witness": err.witness}), file=sys.stderr)
        return EXIT_LAMBDA
    except BraidTrackError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE
    except (ValueError, KeyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
