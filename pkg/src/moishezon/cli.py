"""Command-line front end.

Exit codes: 0 on success, 1 when a verification claim fails, 2 for usage
errors (bad flags, malformed rationals, invalid models).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import catalog, intersection as ie, mori, multiplier as mi
from .rational import format_short, parse_rational


@dataclass(frozen=True)
class CommandResult:
    exit_code: int
    stdout_payload: str
    stderr_payload: str = ""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(part) for part in text.split(",") if part.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _keyvals(items: list[str], allowed: dict) -> dict:
    """Parse ``KEY=VALUE`` words; ``allowed`` maps key to a converter."""
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected KEY=VALUE, got {item!r}")
        if key not in allowed:
            raise UsageError(f"unknown key {key!r}; expected one of {', '.join(allowed)}")
        try:
            out[key] = allowed[key](value)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"bad value for {key}: {exc}") from None
    return out


def _q(text: str) -> Fraction:
    return parse_rational(text)


def _need(values: dict, *keys):
    missing = [k for k in keys if k not in values]
    if missing:
        raise UsageError(f"missing {', '.join(k + '=' for k in missing)}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")

    parser = _Parser(prog="moishezon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify-thesis", parents=[common], help="run the construction ledger")
    p.add_argument("--filter", action="append", metavar="NAME",
                   help="keep constructions whose name contains NAME (repeatable)")

    p = sub.add_parser("blowup", parents=[common], help="blow up a rank-one space along a curve")
    p.add_argument("--base", required=True, help="p3, pN, or rank1:n,deg,kappa")
    p.add_argument("--curve", required=True, help="g=..,d=..[,nu=..]")
    p.add_argument("--out", type=Path, help="write the space model to this file")

    p = sub.add_parser("intersect", parents=[common], help="top self-intersection or curve pairing")
    p.add_argument("--space", required=True, type=Path)
    p.add_argument("--class", dest="cls", required=True, type=_rational_list, help="coordinates a,b")
    p.add_argument("--curve", help="pair with this registered curve instead")

    p = sub.add_parser("multiplier", help="multiplier ideals")
    msub = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    q = msub.add_parser("monomial", parents=[common])
    q.add_argument("--alpha", required=True, type=_rational_list)
    q.add_argument("--k", required=True, type=_rational)
    q = msub.add_parser("snc", parents=[common])
    q.add_argument("--coeff", required=True, type=_rational_list)

    p = sub.add_parser("logres", parents=[common], help="binomial log resolution")
    p.add_argument("--alpha", required=True, type=int)

    p = sub.add_parser("oracle", parents=[common], help="Monte Carlo integrability oracle")
    p.add_argument("--alpha", required=True, type=_rational_list)
    p.add_argument("--beta", required=True, type=_int_list)
    p.add_argument("--k", required=True, type=_rational)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("mori", parents=[common], help="contraction inequalities")
    p.add_argument("check", choices=["wisniewski", "divisorial", "small", "chi", "balance"])
    p.add_argument("params", nargs="*", metavar="KEY=VALUE")

    p = sub.add_parser("matrix", parents=[common], help="obstruction determinant")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _emit(args, payload: dict, text: str) -> str:
    if args.json:
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    return text if text.endswith("\n") else text + "\n"


def _parse_base(spec: str) -> ie.SpaceModel:
    if spec.startswith("rank1:"):
        parts = spec[len("rank1:"):].split(",")
        if len(parts) != 3:
            raise UsageError("rank1 base is rank1:n,deg,kappa")
        return ie.rank_one_space(int(parts[0]), parse_rational(parts[1]), int(parts[2]))
    if spec.startswith("p") and spec[1:].isdigit():
        return ie.projective_space(int(spec[1:]))
    raise UsageError(f"unknown base {spec!r}")


def _cmd_verify(args) -> tuple[int, str]:
    reports = catalog.verify_all(args.filter)
    ok = all(r.passed for r in reports)
    out = catalog.ledger_json(reports) if args.json else catalog.ledger_table(reports)
    return (0 if ok else 1), out


def _cmd_blowup(args) -> tuple[int, str]:
    base = _parse_base(args.base)
    vals = _keyvals(args.curve.split(","), {"g": int, "d": _q, "nu": _q})
    _need(vals, "g", "d")
    space = ie.blowup_along_curve(base, ie.CurveCenterData(vals["g"], vals["d"], vals.get("nu")))
    text = ie.dumps_space(space)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    return 0, text


def parse_space_file(path: str | Path) -> ie.SpaceModel:
    """Load a serialized space model; schema problems raise ``SchemaError``."""
    path = Path(path)
    try:
        source = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return ie.loads_space(source)


def _cmd_intersect(args) -> tuple[int, str]:
    space = parse_space_file(args.space)
    z = ie.DivisorClass(tuple(args.cls))
    if args.curve:
        value = ie.pair_curve(space, z, args.curve)
        label = f"({','.join(map(format_short, z))}).{args.curve}"
    else:
        value = ie.power(space, z)
        label = f"({','.join(map(format_short, z))})^{space.dim}"
    return 0, _emit(args, {"space": space.name, "value": format_short(value)}, f"{label} = {format_short(value)}")


def _cmd_multiplier(args) -> tuple[int, str]:
    if args.kind == "monomial":
        w = mi.MonomialWeight(tuple(args.alpha), args.k)
        ideal = mi.monomial_multiplier_generators(w)
        gens = [list(g) for g in ideal.generators]
        text = "generators: " + " ".join("z^" + str(tuple(g)) for g in ideal.generators)
        return 0, _emit(args, {"generators": gens, "colength": mi.colength(w)}, text)
    floors = list(mi.snc_floors(args.coeff))
    return 0, _emit(args, {"floors": floors}, "O(-(" + " + ".join(f"{f} D{j + 1}" for j, f in enumerate(floors)) + "))")


def _cmd_logres(args) -> tuple[int, str]:
    res = mi.binomial_log_resolution(args.alpha)
    payload = {
        "multiplicities": list(res.multiplicities),
        "chart_trace": [{"step": s.step, "exceptional_coeff": s.exceptional_coeff,
                         "remaining_exponent": s.remaining_exponent} for s in res.chart_trace],
    }
    lines = [f"step {s.step}: {s.describe()}" for s in res.chart_trace]
    lines.append("D = " + " + ".join(f"{m} D{j + 1}" for j, m in enumerate(res.multiplicities)))
    return 0, _emit(args, payload, "\n".join(lines))


def _cmd_oracle(args) -> tuple[int, str]:
    w = mi.MonomialWeight(tuple(args.alpha), args.k)
    result = mi.mc_membership_oracle(w, args.beta, samples=args.samples, seed=args.seed)
    exact = mi.integrability_exponent(w, args.beta)
    payload = {"verdict": result.verdict, "decay_rate": round(result.decay_rate, 6),
               "exponent": format_short(exact.e), "exact_converges": exact.converges}
    text = (f"verdict: {result.verdict} (decay rate {result.decay_rate:.4f}); "
            f"exact exponent e = {format_short(exact.e)}")
    return 0, _emit(args, payload, text)


def _cmd_mori(args) -> tuple[int, str]:
    if args.check == "wisniewski":
        v = _keyvals(args.params, {"n": int, "dim_f": int, "dim_a": int, "l": int})
        _need(v, "n", "dim_f", "dim_a", "l")
        holds = mori.wisniewski_holds(mori.ContractionData(v["n"], dim_f=v["dim_f"], dim_a=v["dim_a"],
                                                           length=v["l"]))
        lhs, rhs = v["dim_f"] + v["dim_a"], v["n"] + v["l"] - 1
        return 0, _emit(args, {"holds": holds, "lhs": lhs, "rhs": rhs},
                        f"dim F + dim A(R) = {lhs} {'>=' if holds else '<'} {rhs} = dim X + l(R) - 1")
    if args.check == "divisorial":
        v = _keyvals(args.params, {"n": int, "r": int})
        _need(v, "n", "r")
        b = mori.divisorial_bounds(v["n"], v["r"])
        payload = {"feasible": b.feasible, "min_dim_y": b.min_dim_y, "a_lower": b.a_lower,
                   "codim_fe_max": b.codim_fe_max, "dim_y_bound": format_short(b.dim_y_bound),
                   "dim_fe_range": list(b.dim_fe_range) if b.dim_fe_range else None}
        text = (f"a > {b.a_lower}; a <= codim f(E) - 1; codim f(E) <= {b.codim_fe_max}\n"
                f"feasible={b.feasible} min_dim_y={b.min_dim_y} (dim Y > {format_short(b.dim_y_bound)})")
        return 0, _emit(args, payload, text)
    if args.check == "small":
        v = _keyvals(args.params, {"n": int, "r": int})
        _need(v, "n")
        d = mori.small_contraction_min_dim_y(v["n"], v.get("r", 2))
        return 0, _emit(args, {"min_dim_y": d}, f"min_dim_y={d}")
    if args.check == "chi":
        v = _keyvals(args.params, {"n": int, "g": int, "kc": _q})
        _need(v, "n", "g", "kc")
        res = mori.chi_normal_bundle(v["n"], v["g"], v["kc"])
        return 0, _emit(args, {"chi": format_short(res.chi), "deformation_escape": res.deformation_escape},
                        f"chi(N)={format_short(res.chi)} escape={res.deformation_escape}")
    v = _keyvals(args.params, {"n": int, "kz": _q, "kline": _q})
    _need(v, "n")
    n = v["n"]
    x = mori.ruling_e_degree(n, v.get("kz", Fraction(n - 3)))
    split = mori.contracted_normal_split_degree(n, v.get("kline", Fraction(3 - n)))
    payload = {"ruling_degree": format_short(x), "fujiki_nakano": mori.contracts_to_minus_one(x),
               "split_degree": format_short(split.a), "split_integral": split.integral}
    text = (f"x={format_short(x)} (contractible: {mori.contracts_to_minus_one(x)}) "
            f"a={format_short(split.a)} (integral: {split.integral})")
    return 0, _emit(args, payload, text)


def _cmd_matrix(args) -> tuple[int, str]:
    n = args.n
    structured = catalog.obstruction_matrix(n, catalog.structured_coefficients(n)).det()
    seeded = catalog.obstruction_matrix(n, catalog.random_coefficients(n, args.seed)).det()
    payload = {"n": n, "seed": args.seed, "structured_det": format_short(structured),
               "random_det": format_short(seeded),
               "normal_bundle_check": catalog.generic_normal_bundle_check(n) if n >= 3 else None}
    text = f"structured det = {format_short(structured)}\nrandom det (seed {args.seed}) = {format_short(seeded)}"
    return 0, _emit(args, payload, text)


_COMMANDS = {
    "verify-thesis": _cmd_verify,
    "blowup": _cmd_blowup,
    "intersect": _cmd_intersect,
    "multiplier": _cmd_multiplier,
    "logres": _cmd_logres,
    "oracle": _cmd_oracle,
    "mori": _cmd_mori,
    "matrix": _cmd_matrix,
}


def run(argv: list[str]) -> CommandResult:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code, out = _COMMANDS[args.command](args)
    except UsageError as exc:
        return CommandResult(2, "", f"{exc}\n")
    except (ValueError, KeyError, IndexError, TypeError, ie.UnknownCurveError, mori.ProfileError) as exc:
        return CommandResult(2, "", f"moishezon: error: {exc}\n{parser.format_usage()}")
    return CommandResult(code, out)


def main(argv: list[str] | None = None) -> int:
    result = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(result.stdout_payload)
    sys.stderr.write(result.stderr_payload)
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
