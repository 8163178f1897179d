"""``mqv`` command line.

Every input is JSON: a file path, ``-`` for stdin, or an inline JSON literal.
Results go to stdout (or ``--out``) as JSON.  Exit codes: 0 when the requested
properties hold, 1 when a property fails, 2 for usage or contract errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import MQVError, StabilityViolation
from .linalg import EXACT, FLOAT
from .quiver import DoubledQuiver
from .scalars import GaussianRational, format_scalar

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# JSON plumbing


def _default(obj):
    if isinstance(obj, GaussianRational):
        return format_scalar(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag] if obj.imag else obj.real
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, default=_default, indent=2, sort_keys=False)


def load(source: str | None, stdin=None):
    """JSON from a path, ``-`` (stdin) or an inline literal."""
    if source is None:
        return None
    text = source.strip()
    if text == "-":
        return json.load(stdin or sys.stdin)
    if text[:1] in "{[" or text in ("true", "false", "null"):
        return json.loads(text)
    path = Path(source)
    if not path.exists():
        raise UsageError(f"no such file: {source}")
    with path.open() as fh:
        return json.load(fh)


def _quiver(data):
    """A doubled quiver from a quiver JSON, or from a representation JSON carrying one."""
    if data is None:
        raise UsageError("a quiver is required")
    if "quiver" in data:
        data = data["quiver"]
    return DoubledQuiver.from_json(data)


def _rep(args):
    from .representation import Representation

    data = load(args.rep, args._stdin)
    if data is None:
        raise UsageError("--rep is required")
    return Representation.from_json(data, args.mode)


# ---------------------------------------------------------------------------
# commands


def cmd_relation(args):
    from .representation import check_relation, mu, phi, psi

    x = _rep(args)
    q = load(args.q, args._stdin)
    vals = psi(x) if x.dq.has_loops() else phi(x)
    out = {"phi": {k: m.to_json() for k, m in vals.items()}}
    if args.mu:
        out["mu"] = {k: m.to_json() for k, m in mu(x).items()}
    if q is None:
        return out, EXIT_OK
    rep = check_relation(x, q, vals)
    if x.mode == EXACT:
        ok = rep.ok
        out["relation"] = rep.to_json()
    else:
        worst = float(rep.max_residual())
        ok = worst <= args.tol
        out["relation"] = {"residuals": {k: float(v) for k, v in rep.residuals.items()}, "max": worst, "tol": args.tol, "ok": ok}
    return out, EXIT_OK if ok else EXIT_FAIL


def cmd_stability(args):
    from .generators import make_rng
    from .representation import FramedRepresentation
    from .stability import check_framed_stability, check_general_stability

    theta = load(args.theta, args._stdin)
    if theta is None:
        raise UsageError("--theta is required")
    data = load(args.rep, args._stdin)
    rng = make_rng(args.seed)
    if args.framed:
        fx = FramedRepresentation.from_json(data, args.mode)
        verdict = check_framed_stability(fx, theta, budget=args.budget, rng=rng)
    else:
        from .representation import Representation

        x = Representation.from_json(data, args.mode)
        verdict = check_general_stability(x, theta, budget=args.budget, rng=rng, q=load(args.q, args._stdin))
    out = verdict.to_json()
    code = EXIT_OK
    if args.expect is not None and verdict.status != args.expect:
        code = EXIT_FAIL
    return out, code


def cmd_convolve(args):
    from .convolution import check_lusztig_conditions, middle_convolve, verify_involution
    from .generators import make_rng

    x = _rep(args)
    q = load(args.q, args._stdin)
    theta = load(args.theta, args._stdin)
    if q is None:
        raise UsageError("--q is required")
    res = middle_convolve(x, args.vertex, q, theta)
    out = res.to_json()
    ok = res.ok
    if args.verify_involution:
        cert = verify_involution(x, args.vertex, q, theta, rng=make_rng(args.seed))
        out["involution"] = cert.to_json()
        ok = ok and cert.ok
    if args.lusztig:
        report = check_lusztig_conditions(x, res.x_prime, args.vertex, q, theta)
        out["conditions"] = report
        ok = ok and all(v is True for k, v in report.items() if not k.startswith("R6"))
    return out, EXIT_OK if ok else EXIT_FAIL


def cmd_reduce(args):
    from .convolution import reduce_dimension_vector

    x = _rep(args)
    q = load(args.q, args._stdin)
    if q is None:
        raise UsageError("--q is required")
    trace = reduce_dimension_vector(x, q, load(args.theta, args._stdin), args.max_steps)
    return trace.to_json(), EXIT_OK


def cmd_star(args):
    from . import star

    if args.action == "to-rep":
        d = star.LocalSystemData.from_json(load(args.tuple, args._stdin))
        x = star.tuple_to_rep(d)
        q, theta = star.params_from_weights(d.ladders, d.beta, x.dims)
        return {"rep": x.to_json(), "q": q, "theta": theta}, EXIT_OK
    if args.action == "to-tuple":
        x = _rep(args)
        ladders = load(args.ladders, args._stdin)
        if ladders is None:
            raise UsageError("--ladders is required")
        report = star.rep_to_tuple(x, ladders, load(args.beta, args._stdin))
        ok = report.product_is_one and report.containments and report.dims_match
        return report.to_json(), EXIT_OK if ok else EXIT_FAIL
    if args.action == "stability":
        d = star.LocalSystemData.from_json(load(args.tuple, args._stdin))
        report = star.beta_stability_report(d)
        return report.to_json(), EXIT_OK if report.passes else EXIT_FAIL
    if args.action == "params":
        ladders = load(args.ladders, args._stdin)
        beta = load(args.beta, args._stdin)
        dims = load(args.dim, args._stdin)
        if ladders is None or dims is None:
            raise UsageError("--ladders and --dim are required")
        if beta is None:
            beta = [list(range(len(l))) for l in ladders]
        q, theta = star.params_from_weights(ladders, beta, dims)
        return {"q": q, "theta": theta}, EXIT_OK
    if args.action == "traces":
        x = _rep(args)
        cycles = load(args.cycles, args._stdin)
        tr = star.trace_coordinates(x, cycles, args.max_len)
        return {"traces": tr}, EXIT_OK
    raise UsageError(f"unknown star action {args.action!r}")


def cmd_roots(args):
    from .roots import bilinear_form, enumerate_Rplus_bounded, reflect_dim, root_datum_from_graph

    dq = _quiver(load(args.quiver, args._stdin))
    out = {}
    dims = load(args.dim, args._stdin)
    if dims is not None:
        out["roots"] = enumerate_Rplus_bounded(dq, dims)
        out["form"] = bilinear_form(dq, dims, dims)
        if args.reflect is not None:
            out["reflected"] = reflect_dim(dq, args.reflect, dims)
    if args.cartan:
        out["root_datum"] = root_datum_from_graph(dq).to_json()
    return out, EXIT_OK


def cmd_generic(args):
    from .roots import is_generic

    if args.mode == FLOAT:
        from .errors import ModeError

        raise ModeError("genericity is decided in exact mode only")
    dq = _quiver(load(args.quiver, args._stdin))
    rep = is_generic(dq, load(args.dim, args._stdin), load(args.q, args._stdin), load(args.theta, args._stdin))
    return rep.to_json(), EXIT_OK if rep.generic else EXIT_FAIL


def cmd_jacobian(args):
    from .jacobian import dimension_check

    x = _rep(args)
    rep = dimension_check(x, args.tol, args.gap)
    return rep.to_json(), EXIT_OK if rep.ok else EXIT_FAIL


def cmd_suite(args):
    from .suites import SUITES, run_suite

    if args.list or args.name is None:
        return {"suites": {k: v[2] for k, v in SUITES.items()}}, EXIT_OK
    report = run_suite(args.name, args.seed, args.count)
    out = report.to_json()
    if not args.verbose:
        out.pop("instances")
        out["failed_instances"] = [inst for inst in report.failures]
    return out, EXIT_OK if report.passed else EXIT_FAIL


def cmd_generate(args):
    from .generators import InstanceRecipe, generate_solution

    data = load(args.recipe, args._stdin) or {}
    if args.seed is not None:
        data["seed"] = args.seed
    data.setdefault("mode", args.mode)
    inst = generate_solution(InstanceRecipe.from_json(data))
    return inst.to_json(), EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--mode", choices=(EXACT, FLOAT), default=EXACT, help="scalar mode for loaded matrices")
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="mqv", description="Multiplicative quiver varieties workbench.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("relation", parents=[common], help="evaluate Phi (or Psi) and compare with q")
    s.add_argument("--rep", required=True)
    s.add_argument("--q")
    s.add_argument("--mu", action="store_true", help="also print the additive moment map")
    s.add_argument("--tol", type=float, default=1e-9, help="float-mode residual tolerance")
    s.set_defaults(func=cmd_relation)

    s = sub.add_parser("stability", parents=[common], help="theta-stability verdict with certificate")
    s.add_argument("--rep", required=True)
    s.add_argument("--theta", required=True)
    s.add_argument("--q", help="optional q for the genericity remark")
    s.add_argument("--framed", action="store_true", help="input is a framed representation")
    s.add_argument("--budget", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--expect", choices=("Stable", "SemistableNotStable", "Unstable", "Unknown"))
    s.set_defaults(func=cmd_stability)

    s = sub.add_parser("convolve", parents=[common], help="middle convolution at a vertex")
    s.add_argument("--rep", required=True)
    s.add_argument("--vertex", required=True)
    s.add_argument("--q", required=True)
    s.add_argument("--theta")
    s.add_argument("--verify-involution", action="store_true")
    s.add_argument("--lusztig", action="store_true", help="also evaluate the correspondence conditions")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_convolve)

    s = sub.add_parser("reduce", parents=[common], help="greedy dimension reduction by convolutions")
    s.add_argument("--rep", required=True)
    s.add_argument("--q", required=True)
    s.add_argument("--theta")
    s.add_argument("--max-steps", type=int, default=50)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("star", parents=[common], help="matrix tuples and star-shaped quivers")
    s.add_argument("action", choices=("to-rep", "to-tuple", "stability", "params", "traces"))
    s.add_argument("--tuple")
    s.add_argument("--rep")
    s.add_argument("--ladders")
    s.add_argument("--beta")
    s.add_argument("--dim")
    s.add_argument("--cycles")
    s.add_argument("--max-len", type=int, default=4)
    s.set_defaults(func=cmd_star)

    s = sub.add_parser("roots", parents=[common], help="bounded positive roots and root data")
    s.add_argument("--quiver", required=True)
    s.add_argument("--dim")
    s.add_argument("--reflect", help="also apply s_i at this vertex")
    s.add_argument("--cartan", action="store_true")
    s.set_defaults(func=cmd_roots)

    s = sub.add_parser("generic", parents=[common], help="genericity of (q, theta) for a dimension vector")
    s.add_argument("--quiver", required=True)
    s.add_argument("--dim", required=True)
    s.add_argument("--q", required=True)
    s.add_argument("--theta", required=True)
    s.set_defaults(func=cmd_generic)

    s = sub.add_parser("jacobian", parents=[common], help="numeric dimension count at a solution")
    s.add_argument("--rep", required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--gap", type=float, default=1e3)
    s.set_defaults(func=cmd_jacobian)

    s = sub.add_parser("suite", parents=[common], help="run a named property suite")
    s.add_argument("name", nargs="?")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int)
    s.add_argument("--list", action="store_true")
    s.set_defaults(func=cmd_suite)

    s = sub.add_parser("generate", parents=[common], help="emit a generated solution from a recipe")
    s.add_argument("--recipe")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_generate)
    return p


def main(argv=None, stdin=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"mqv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args._stdin = stdin
    try:
        result, code = args.func(args)
    except StabilityViolation as exc:
        result, code = {"error": type(exc).__name__, "message": str(exc)}, EXIT_FAIL
    except (UsageError, MQVError, ValueError, KeyError, TypeError) as exc:
        print(dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    text = dumps(result)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text, file=stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
