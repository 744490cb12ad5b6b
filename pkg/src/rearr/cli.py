"""Command-line interface.

Exit codes: 0 success / relation holds, 1 relation false or construction
condition failed, 2 malformed input.  Results go to stdout as JSON.
"""

from __future__ import annotations

import argparse
import glob
import os
import sys
from fractions import Fraction

from . import documents
from .core import DecreasingTailFunction, Domain, PiecewiseAffineFunction, StepFunction
from .criteria import (
    DEFAULT_FLOOR,
    FunctionFamily,
    chong_majorant,
    chong_majorant_infinite,
    construct_n_function,
    dvp_certificate,
    fixture_families,
    tail_decay_check,
    tail_start,
    uniform_integrability_report,
)
from .envelope import marcinkiewicz_norm
from .errors import ConditionViolatedError, DocumentError, RearrError
from .orlicz import OrliczFunction, luxemburg_norm, modular, young_conjugate
from .rearrangement import decreasing_rearrangement, submajorization_witness

fmt = documents.format_rational


class InputError(Exception):
    pass


def _emit(payload):
    sys.stdout.write(documents.dumps(payload))


def _load(path, *kinds):
    obj = documents.load(path)
    if kinds and not isinstance(obj, kinds):
        names = "/".join(k.__name__ for k in kinds)
        raise InputError(f"{path}: expected {names}, got {type(obj).__name__}")
    return obj


def _rational(text):
    try:
        return documents.parse_rational(text)
    except DocumentError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational_list(text):
    return [_rational(part) for part in text.split(",") if part.strip()]


def _expand(patterns):
    paths = []
    for pattern in patterns:
        matches = sorted(glob.glob(pattern))
        if not matches:
            raise InputError(f"no file matches {pattern!r}")
        paths.extend(matches)
    return paths


def _family(patterns):
    members, sources = [], []
    for path in _expand(patterns):
        obj = _load(path, StepFunction, FunctionFamily)
        group = obj.members if isinstance(obj, FunctionFamily) else (obj,)
        for i, m in enumerate(group):
            members.append(m)
            sources.append(path if len(group) == 1 else f"{path}#{i}")
    try:
        return FunctionFamily(tuple(members)), sources
    except RearrError as exc:
        raise InputError(str(exc)) from None


def _write_or_embed(obj, path, payload, key):
    if path:
        documents.save(obj, path)
    payload[key] = documents.to_document(obj)


def cmd_rearrange(args):
    f = _load(args.input, StepFunction)
    result = decreasing_rearrangement(f)
    payload = {"integral": fmt(result.source_total)}
    _write_or_embed(result.mu, args.output, payload, "rearrangement")
    _emit(payload)
    return 0


def cmd_check(args):
    f = _load(args.f, StepFunction, DecreasingTailFunction)
    g = _load(args.g, StepFunction, DecreasingTailFunction)
    if args.relation == "orbit":
        if not isinstance(f, StepFunction):
            raise InputError("orbit membership is checked for step functions")
        if isinstance(g, StepFunction) and (not g.pieces or any(v <= 0 for _, _, v in g.pieces)):
            raise InputError("orbit generator must be positive on its support")
    witness = submajorization_witness(g, f)
    if witness is not None:
        print(f"fails: f is not submajorized by g; violation at t = {fmt(witness)}")
        return 1
    if args.relation == "majorize" and f.integral() != g.integral():
        print(f"fails: integrals differ ({fmt(f.integral())} != {fmt(g.integral())})")
        return 1
    print(f"holds: {args.relation}")
    return 0


def cmd_chong(args):
    K, sources = _family(args.family)
    domain = Domain(args.domain) if args.domain else K.domain
    if domain is not K.domain:
        raise InputError(f"family lives on {K.domain.value}, not {domain.value}")
    payload = {"domain": domain.value}
    if domain is Domain.UNIT:
        g = chong_majorant(K, args.eps if args.eps is not None else DEFAULT_FLOOR)
    else:
        eps = args.eps if args.eps is not None else Fraction(1)
        g = chong_majorant_infinite(K, eps, args.tail_exp)
        payload["tail_start"] = fmt(g.tail.start)
    payload["members"] = [{"source": s, "submajorized": submajorization_witness(g, abs(f)) is None}
                          for s, f in zip(sources, K)]
    _write_or_embed(g, args.output, payload, "majorant")
    _emit(payload)
    return 0 if all(m["submajorized"] for m in payload["members"]) else 1


def cmd_nfun(args):
    f = _load(args.f, StepFunction, DecreasingTailFunction)
    G, bound = construct_n_function(f)
    payload = {"bound": fmt(bound), "modular": fmt(modular(G, f))}
    _write_or_embed(G, args.output, payload, "density")
    _emit(payload)
    return 0


def cmd_modular(args):
    G = _load(args.G, OrliczFunction)
    f = _load(args.f, StepFunction, DecreasingTailFunction)
    _emit({"modular": fmt(modular(G, f))})
    return 0


def cmd_norm(args):
    G = _load(args.G, OrliczFunction)
    f = _load(args.f, StepFunction, DecreasingTailFunction)
    enc = luxemburg_norm(G, f, args.eps)
    _emit({"norm": [fmt(enc.lower), fmt(enc.upper)], "width": fmt(enc.width)})
    return 0


def cmd_conjugate(args):
    G = _load(args.G, OrliczFunction)
    payload = {}
    _write_or_embed(young_conjugate(G), args.output, payload, "conjugate")
    _emit(payload)
    return 0


def cmd_marcinkiewicz(args):
    psi = _load(args.psi, PiecewiseAffineFunction)
    f = _load(args.f, StepFunction)
    _emit({"norm": fmt(marcinkiewicz_norm(psi, f))})
    return 0


def cmd_ui(args):
    K, _ = _family(args.family)
    rows = uniform_integrability_report(K, args.cutoffs)
    _emit({"rows": [{"cutoff": fmt(r.cutoff), "mass_above": fmt(r.mass_above),
                     "level_measure": fmt(r.level_measure)} for r in rows]})
    return 0


def cmd_tail(args):
    K, _ = _family(args.family)
    if K.domain is not Domain.HALFLINE:
        raise InputError("tail decay is reported for half-line families")
    payload = {"rows": [{"N": fmt(N), "tail": fmt(tail_decay_check(K, N))} for N in args.cutoffs]}
    if args.eps is not None:
        try:
            payload["tail_start"] = fmt(tail_start(K, args.eps))
        except ConditionViolatedError:
            payload["tail_start"] = None
            _emit(payload)
            return 1
    _emit(payload)
    return 0


def cmd_certify(args):
    K, sources = _family(args.family)
    cert = dvp_certificate(K, args.eps if args.eps is not None else DEFAULT_FLOOR)
    _emit({
        "bound": fmt(cert.bound),
        "density": documents.to_document(cert.G),
        "majorant": documents.to_document(cert.witness),
        "majorant_modular": fmt(cert.majorant_modular),
        "members": [{"source": s, "modular": fmt(m)} for s, m in zip(sources, cert.member_modulars)],
    })
    return 0


FIXTURE_FILES = ("spreading_blocks", "unit_blocks", "unit_blocks_majorant", "square")


def cmd_fixtures(args):
    fixtures = fixture_families(args.n_max, args.tail_exp)
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        for name in FIXTURE_FILES:
            documents.save(fixtures[name], os.path.join(args.output, f"{name}.json"))
        _emit({"written": [f"{name}.json" for name in FIXTURE_FILES]})
    else:
        _emit({name: documents.to_document(fixtures[name]) for name in FIXTURE_FILES})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rearr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rearrange", help="decreasing rearrangement of a step function")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rearrange)

    p = sub.add_parser("check", help="test f ≺≺ g, f ≺ g or orbit membership")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--relation", choices=("submajorize", "majorize", "orbit"), default="submajorize")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("chong", help="single majorant whose orbit holds a family")
    p.add_argument("family", nargs="+", help="files or glob patterns")
    p.add_argument("--domain", choices=("unit", "halfline"))
    p.add_argument("--eps", type=_rational, help="positivity floor (unit) or additive eps (halfline)")
    p.add_argument("--tail-exp", type=int, default=2)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_chong)

    p = sub.add_parser("nfun", help="N-function with finite modular for f")
    p.add_argument("f")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_nfun)

    p = sub.add_parser("modular", help="∫ G(|f|)")
    p.add_argument("G")
    p.add_argument("f")
    p.set_defaults(func=cmd_modular)

    p = sub.add_parser("norm", help="enclosure of the Luxemburg norm")
    p.add_argument("G")
    p.add_argument("f")
    p.add_argument("--eps", type=_rational, help="enclosure width (default 2^-40 or $REARR_EPS)")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("conjugate", help="Young conjugate of an Orlicz density")
    p.add_argument("G")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_conjugate)

    p = sub.add_parser("marcinkiewicz", help="Marcinkiewicz norm for a concave weight")
    p.add_argument("psi")
    p.add_argument("f")
    p.set_defaults(func=cmd_marcinkiewicz)

    p = sub.add_parser("ui", help="uniform-integrability table")
    p.add_argument("family", nargs="+")
    p.add_argument("--cutoffs", type=_rational_list, required=True)
    p.set_defaults(func=cmd_ui)

    p = sub.add_parser("tail", help="sup of tail masses beyond N")
    p.add_argument("family", nargs="+")
    p.add_argument("--cutoffs", type=_rational_list, required=True)
    p.add_argument("--eps", type=_rational, help="also search the first N = 2^j with tails < eps")
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("certify", help="N-function certificate with a uniform modular bound")
    p.add_argument("family", nargs="+")
    p.add_argument("--eps", type=_rational, help="positivity floor of the majorant")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("fixtures", help="write the translated-block fixture families")
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--tail-exp", type=int, default=2)
    p.add_argument("-o", "--output", help="directory")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConditionViolatedError as exc:
        print(f"condition failed: {exc}", file=sys.stderr)
        return 1
    except (InputError, RearrError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # keep the exit-code contract total
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
