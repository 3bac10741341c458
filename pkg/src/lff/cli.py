"""Command-line front end: ``lff <command> [options]``.

Exit codes: 0 success, 1 numeric check failed (failure record on stdout),
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .errors import LFFError
from .field import FieldParams, is_prime
from .frames import (
    AffineSystemSpec,
    FormKind,
    coaffine_decay_table,
    form_value,
    restricted_frame_bounds,
    thread_count,
)
from .funcspace import CoaffineWeights, StepFunction, SystemKind
from .rng import SplitMix64, random_mean_zero
from .suites import SUITES, run_suite
from .wavelets import generator_document, haar_generators, load_generators, save_generators, write_atomic


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: FieldParams | None
    system: SystemKind
    generators: list[StepFunction] | None
    M: int
    N: int
    weights: CoaffineWeights
    seed: int
    out: Path | None


def _parse_modulus(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError:
        raise UsageError(f"--modulus expects comma-separated integers, got {text!r}") from None


def field_params(args, required: bool = True) -> FieldParams | None:
    if args.q is not None:
        if args.p is not None or args.c is not None:
            raise UsageError("give either --q or --p/--c, not both")
        if not is_prime(args.q):
            raise UsageError(f"--q {args.q} is not prime; prime powers need explicit --p and --c")
        p, c = args.q, 1
    elif args.p is not None:
        p, c = args.p, 1 if args.c is None else args.c
    else:
        if required and args.generators in (None, "haar"):
            raise UsageError("field parameters required: --q, or --p and --c")
        return None
    modulus = _parse_modulus(args.modulus) if args.modulus else ()
    try:
        return FieldParams(p, c, modulus)
    except LFFError as exc:
        raise UsageError(str(exc)) from None


def _weights(text: str | None) -> CoaffineWeights:
    if text is None:
        return CoaffineWeights.constant(1.0)
    if text.startswith("const:"):
        try:
            return CoaffineWeights.constant(complex(text[len("const:") :].replace(" ", "")))
        except ValueError:
            raise UsageError(f"bad constant weight {text!r}") from None
    try:
        doc = json.loads(Path(text).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read weight file {text}: {exc}") from None
    # {"default": v | null, "table": [[l, j, re, im], ...]}
    try:
        table = {(int(l), int(j)): complex(re, im) for l, j, re, im in doc.get("table", [])}
        default = doc.get("default")
        if isinstance(default, list):
            default = complex(*default)
        return CoaffineWeights(table, None if default is None else complex(default))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"malformed weight file {text}: {exc}") from None


def _generators(args, params: FieldParams | None) -> tuple[FieldParams, list[StepFunction]]:
    source = getattr(args, "generators", None) or "haar"
    if source == "haar":
        return params, haar_generators(params)
    try:
        gens = load_generators(source)
    except LFFError as exc:
        raise UsageError(f"{source}: {exc}") from None
    if params is not None and gens[0].params != params:
        raise UsageError(f"{source}: generator field {gens[0].params} differs from command-line field {params}")
    return gens[0].params, gens


def build_config(args) -> RunConfig:
    params = field_params(args, required=args.command != "check")
    gens = None
    if args.command in ("bounds", "compare", "coaffine-decay"):
        params, gens = _generators(args, params)
    M = getattr(args, "support", 1)
    N = getattr(args, "resolution", 2)
    if M < 0 or N < 0:
        raise UsageError("--support and --resolution must be nonnegative")
    return RunConfig(
        command=args.command,
        params=params,
        system=SystemKind(getattr(args, "system", "affine")),
        generators=gens,
        M=M,
        N=N,
        weights=_weights(getattr(args, "weights", None)),
        seed=args.seed,
        out=Path(args.out) if args.out else None,
    )


def _spec(cfg: RunConfig, kind: SystemKind | None = None) -> AffineSystemSpec:
    try:
        return AffineSystemSpec(tuple(cfg.generators), kind or cfg.system, cfg.weights)
    except LFFError as exc:
        raise UsageError(str(exc)) from None


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        write_atomic(cfg.out, text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def cmd_bounds(cfg: RunConfig, args) -> int:
    report = restricted_frame_bounds(_spec(cfg), cfg.M, cfg.N)
    _emit(cfg, _json(report.to_json()))
    return 0


def cmd_compare(cfg: RunConfig, args) -> int:
    affine = _spec(cfg, SystemKind.AFFINE)
    quasi = affine.with_kind(SystemKind.QUASI_AFFINE)
    ra = restricted_frame_bounds(affine, cfg.M, cfg.N)
    rq = restricted_frame_bounds(quasi, cfg.M, cfg.N)
    rng = SplitMix64(cfg.seed)
    gap = 0.0
    for _ in range(args.samples):
        f = random_mean_zero(cfg.params, cfg.M, cfg.N, rng)
        g = random_mean_zero(cfg.params, cfg.M, cfg.N, rng)
        k = form_value(FormKind.K, affine, affine, f, g)
        kt = form_value(FormKind.KTILDE, affine, affine, f, g)
        gap = max(gap, abs(k - kt))
    doc = {
        "affine": ra.to_json(),
        "quasiAffine": rq.to_json(),
        "max_form_gap": gap,
        "samples": args.samples,
        "seed": cfg.seed,
    }
    _emit(cfg, _json(doc))
    return 0


def cmd_coaffine_decay(cfg: RunConfig, args) -> int:
    if args.m_max < 1:
        raise UsageError("--m-max must be at least 1")
    rows = coaffine_decay_table(tuple(cfg.generators), cfg.weights, args.m_max)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "avg_time_side", "avg_fourier_side", "predicted"])
    q = cfg.params.q
    L = len(cfg.generators)
    for r in rows:
        # Haar prediction: only scale j = m-1 reaches the shell |xi| = q^m, and
        # each generator carries an equal share 1/L of it.
        c2 = sum(abs(cfg.weights(l, r.m - 1)) ** 2 for l in range(1, L + 1)) / L
        w.writerow([r.m, repr(r.avg_time), repr(r.avg_fourier), repr(c2 * float(q) ** (1 - r.m))])
    _emit(cfg, buf.getvalue())
    return 0


def cmd_check(cfg: RunConfig, args) -> int:
    checks = run_suite(args.suite, None if cfg.params is None else [cfg.params])
    failed = [c for c in checks if not c.passed]
    doc = {
        "suite": args.suite,
        "passed": not failed,
        "check_count": len(checks),
        "failure_count": len(failed),
        "checks": [c.to_json() for c in checks],
    }
    text = _json(doc)
    if cfg.out is not None:
        write_atomic(cfg.out, text)
    if failed or cfg.out is None:
        sys.stdout.write(text if not failed else _json({**doc, "checks": [c.to_json() for c in failed]}))
    return 1 if failed else 0


def cmd_gen(cfg: RunConfig, args) -> int:
    if cfg.params is None:
        raise UsageError("gen needs --q or --p/--c")
    gens = haar_generators(cfg.params)
    if cfg.out is None:
        sys.stdout.write(json.dumps(generator_document(gens), indent=1) + "\n")
    else:
        save_generators(cfg.out, gens)
    return 0


COMMANDS = {
    "bounds": cmd_bounds,
    "compare": cmd_compare,
    "coaffine-decay": cmd_coaffine_decay,
    "check": cmd_check,
    "gen": cmd_gen,
}


def _add_field_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("field")
    g.add_argument("--q", type=int, help="prime field size (shorthand for --p q --c 1)")
    g.add_argument("--p", type=int, help="characteristic")
    g.add_argument("--c", type=int, help="extension degree (q = p^c)")
    g.add_argument("--modulus", help="irreducible modulus coefficients, constant term first, e.g. 1,1,0,1")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0, help="64-bit seed for random test functions")
    p.add_argument("--out", help="output path (written atomically); default stdout")


def _add_system(p: argparse.ArgumentParser, system: bool = True):
    if system:
        p.add_argument("--system", choices=[k.value for k in SystemKind], default="affine")
    p.add_argument("--generators", default="haar", help="'haar' or a .lfgen.json file")
    p.add_argument("--support", type=int, default=1, help="test-space support level M")
    p.add_argument("--resolution", type=int, default=2, help="test-space resolution level N")
    p.add_argument("--weights", help="co-affine weights: const:<value> or a JSON file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lff", description="Affine systems and frame bounds over GF(q)((t)).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("bounds", help="restricted frame bounds as JSON")
    _add_field_flags(p)
    _add_system(p)
    _add_common(p)

    p = sub.add_parser("compare", help="affine vs quasi-affine bounds and the form gap |K - K~|")
    _add_field_flags(p)
    _add_system(p, system=False)
    p.add_argument("--samples", type=int, default=10)
    _add_common(p)

    p = sub.add_parser("coaffine-decay", help="co-affine w_f averages on Fourier shells as CSV")
    _add_field_flags(p)
    p.add_argument("--generators", default="haar")
    p.add_argument("--weights")
    p.add_argument("--m-max", type=int, default=4)
    _add_common(p)

    p = sub.add_parser("check", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=list(SUITES))
    _add_field_flags(p)
    _add_common(p)

    p = sub.add_parser("gen", help="write a generator file")
    p.add_argument("--family", choices=["haar"], default="haar")
    _add_field_flags(p)
    _add_common(p)
    return parser


def run_command(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "generators"):
        args.generators = None
    try:
        thread_count()
        cfg = build_config(args)
        return COMMANDS[args.command](cfg, args)
    except (UsageError, LFFError) as exc:
        parser.print_usage(sys.stderr)
        print(f"lff: error: {exc}", file=sys.stderr)
        return 2


def main(argv: list[str] | None = None) -> None:
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
