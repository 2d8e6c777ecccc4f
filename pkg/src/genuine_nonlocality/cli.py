"""
Command-line front end.

Exit codes: 0 success or Certified, 1 Inconclusive, Refuted or
NeedsExternalSeed, 2 invalid input or plan error.
"""

from __future__ import annotations

import argparse
import sys

from . import constructors as C
from .errors import NeedsExternalSeed, NonlocalityError
from .numerics import DEFAULT_TOL
from .planfile import read_plan, write_plan
from .states import atomic_write_text, dumps_json, read_state_set, write_state_set
from .verifier import DEFAULT_SIDE_CAP, Certificate, certify, certify_set, direct_sweep, render_markdown


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims list {text!r}")
    if len(dims) < 2 or any(d < 2 for d in dims):
        raise argparse.ArgumentTypeError(f"dims must list at least two integers >= 2, got {text!r}")
    return dims


def _positive(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=_positive, default=DEFAULT_TOL)
    p.add_argument("--ufl-floor", type=_positive, default=C.UFL_FLOOR)
    p.add_argument("--side-cap", type=int, default=DEFAULT_SIDE_CAP)
    p.add_argument("--seed", type=int, default=0, help="RNG seed for 'random' unitary sources")
    p.add_argument("--format", choices=["json", "markdown"], default="json", help="certificate format")
    p.add_argument("--report", help="write the certificate here")


def _unitary_flags(p: argparse.ArgumentParser, names: str) -> None:
    p.add_argument("--unitary", default="fourier", help="hadamard | fourier | random | random:<seed>")
    for n in names:
        p.add_argument(f"--u{n}", help=f"unitary source for party {n.upper()} (overrides --unitary)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gnl", description="Build and certify genuinely nonlocal product-state sets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    build = sub.add_parser("build", help="build a bipartite or tripartite set")
    bsub = build.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    t1 = bsub.add_parser("theorem1", aliases=["boundary"], help="bipartite boundary set, 2(x+y)-4 states")
    t1.set_defaults(shape="boundary")
    t1.add_argument("--x", type=int, required=True)
    t1.add_argument("--y", type=int, required=True)
    _unitary_flags(t1, "xy")
    t3 = bsub.add_parser("theorem3", aliases=["tripartite"], help="tripartite set, 2x+4y+2z-8 states")
    t3.set_defaults(shape="tripartite")
    t3.add_argument("--x", type=int, required=True)
    t3.add_argument("--y", type=int, required=True)
    t3.add_argument("--z", type=int, required=True)
    _unitary_flags(t3, "xyz")
    for p in (t1, t3):
        p.add_argument("--out", required=True)
        p.add_argument("--plan-out")
        _common(p)

    comp = sub.add_parser("compose", help="compose seed sets into a multipartite set")
    csub = comp.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for kind in ("star", "chain"):
        p = csub.add_parser(kind)
        p.add_argument("--dims", type=_dims, required=True)
        p.add_argument("--seed-set", action="append", default=[], help="bipartite seed file, one per block")
        _unitary_flags(p, "")
    ts = csub.add_parser("tristar")
    ts.add_argument("--blocks", type=int, required=True, help="number of seed copies (>= 3)")
    group = ts.add_mutually_exclusive_group()
    group.add_argument("--seed-set", help="tripartite seed state-set file")
    group.add_argument("--seed-plan", help="tripartite seed plan file")
    group.add_argument("--seed-dims", type=_dims, default=(3, 4, 3), help="build a tripartite seed (default 3,4,3)")
    ts.add_argument("--external", help="attest the seed as nonlocal, citing this reference")
    _unitary_flags(ts, "")
    gen = csub.add_parser("general")
    gen.add_argument("--plan", required=True)
    for p in (*csub.choices.values(),):
        p.add_argument("--out", required=True)
        if p is not gen:
            p.add_argument("--plan-out")
        _common(p)

    ver = sub.add_parser("verify", help="direct sweep over every bipartition")
    ver.add_argument("--set", required=True)
    _common(ver)

    cer = sub.add_parser("certify", help="certify through a composition plan")
    cer.add_argument("--plan", required=True)
    cer.add_argument("--set", help="state-set file that must match the plan's output")
    _common(cer)

    syn = sub.add_parser("synthesize", help="build and certify a set for the given dims")
    syn.add_argument("--dims", type=_dims, required=True)
    syn.add_argument("--unitary", default="fourier")
    syn.add_argument("--out")
    syn.add_argument("--plan-out")
    _common(syn)
    return parser


def _source(args, party: str, n: int, slot: int) -> C.UflUnitary:
    name = getattr(args, f"u{party}", None) or args.unitary
    return C.resolve_unitary(name, n, args.seed, slot, args.ufl_floor)


def _emit(args, cert: Certificate) -> int:
    if args.report:
        text = render_markdown(cert) if args.format == "markdown" else dumps_json(cert.to_dict())
        atomic_write_text(args.report, text)
    print(f"verdict={cert.verdict.value} certificate={args.report or '-'}")
    return 0 if cert.certified else 1


def _save(args, states) -> None:
    write_state_set(states, args.out)
    if getattr(args, "plan_out", None) and states.plan is not None:
        write_plan(states.plan, args.plan_out)
    print(f"states={len(states)} out={args.out}")


def _cmd_build(args) -> int:
    if args.shape == "boundary":
        x, y = args.x, args.y
        C.require_party_dims((x, y), "boundary set")
        states = C.bipartite_boundary_set(x, y, _source(args, "x", x - 1, 0), _source(args, "y", y - 1, 1))
    else:
        x, y, z = args.x, args.y, args.z
        C.require_party_dims((x, y, z), "tripartite set")
        C.tripartite_bases(y, z)
        X, Y, Z = (_source(args, p, n - 1, k) for k, (p, n) in enumerate(zip("xyz", (x, y, z))))
        states = C.tripartite_set(x, y, z, X, Y, Z)
    _save(args, states)
    return _emit(args, certify_set(states, args.tol, args.side_cap)) if args.report else 0


def _bipartite_seeds(args, pairs) -> list:
    if args.seed_set:
        return [read_state_set(p) for p in args.seed_set]
    return [
        C.bipartite_boundary_set(a, b, _source(args, "", a - 1, 2 * k), _source(args, "", b - 1, 2 * k + 1))
        for k, (a, b) in enumerate(pairs)
    ]


def _cmd_compose(args) -> int:
    if args.kind == "general":
        states = C.compose_general(read_plan(args.plan), args.tol)
    elif args.kind in ("star", "chain"):
        d = args.dims
        if args.kind == "star":
            pairs = [(d[0], e) for e in d[1:]]
            plan = C.star_plan(d, _bipartite_seeds(args, pairs))
        else:
            pairs = list(zip(d[:-1], d[1:]))
            plan = C.chain_plan(d, _bipartite_seeds(args, pairs))
        states = C.compose_general(plan, args.tol)
    else:
        if args.seed_set:
            seed = read_state_set(args.seed_set)
        elif args.seed_plan:
            seed = C.compose_general(read_plan(args.seed_plan), args.tol)
        else:
            x, y, z = args.seed_dims
            X, Y, Z = (_source(args, "", n - 1, k) for k, n in enumerate((x, y, z)))
            seed = C.tripartite_set(x, y, z, X, Y, Z)
        plan = C.tristar_plan(args.blocks, seed)
        if args.external:
            plan = C.CompositionPlan(
                plan.dims, [C.Block(b.parties, b.seed, b.padding, args.external) for b in plan.blocks], plan.label
            )
        states = C.compose_general(plan, args.tol)
    _save(args, states)
    return _emit(args, certify_set(states, args.tol, args.side_cap)) if args.report else 0


def _cmd_verify(args) -> int:
    return _emit(args, direct_sweep(read_state_set(args.set), args.tol, args.side_cap))


def _cmd_certify(args) -> int:
    plan = read_plan(args.plan)
    built = read_state_set(args.set) if args.set else None
    return _emit(args, certify(plan, built, args.tol, args.side_cap))


def _cmd_synthesize(args) -> int:
    try:
        states, plan = C.synthesize(args.dims, args.unitary, args.seed, args.ufl_floor)
    except NeedsExternalSeed as exc:
        print(str(exc))
        return 1
    if args.out:
        _save(args, states)
    return _emit(args, certify_set(states, args.tol, args.side_cap))


COMMANDS = {
    "build": _cmd_build,
    "compose": _cmd_compose,
    "verify": _cmd_verify,
    "certify": _cmd_certify,
    "synthesize": _cmd_synthesize,
}


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"gnl: error: {exc}", file=sys.stderr)
        return 2
    except (NonlocalityError, OSError) as exc:
        print(f"gnl: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
