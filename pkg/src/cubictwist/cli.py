"""``cubictwist`` command-line interface.

Exit status: 0 on success, 1 when a verification disagrees, 2 on usage
errors.  Every option may also be given in a TOML file passed with
``--config``; options on the command line take precedence.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import BudgetExceeded, CubicTwistError, Unverified
from .families import (CASES, FAMILIES, applicable_cases, make_family_field, verify_case)
from .field_core import all_conductor_params, field_from_conductor
from .lattice_geom import wr_slack
from .ramified_ideals import RamifiedSpec, all_specs, check_ideal
from .report import field_dict, make_report, rational_str, serialize_report, to_jsonable
from .twist_engine import (DEFAULT_COEFF_BOUND, DEFAULT_ITERATIONS, DEFAULT_SEED, DEFAULT_T_MAX,
                           good_basis_search, orthogonal_twist, principal_link, test_good_basis)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

COMMANDS = ("field", "family", "test-basis", "search", "ideal", "ortho", "verify-family")

DEFAULT_PRECISION = 64
DEFAULT_N_RANGE = "-40..40"

COORDS_HELP = ("basis as three semicolon-separated rows of comma-separated rationals, "
               "each row the coordinates of one element in the power basis (1, rho, rho^2); "
               'e.g. "1,0,0;0,1,0;0,0,1" or "1/3,1/3,1/3;0,1,0;0,1,1"')


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    json: bool = False
    seed: int = DEFAULT_SEED
    precision: int = DEFAULT_PRECISION
    iterations: int = DEFAULT_ITERATIONS
    coeff_bound: int = DEFAULT_COEFF_BOUND
    t_max: int = DEFAULT_T_MAX
    n_range: str = DEFAULT_N_RANGE
    field_conductor: Optional[int] = None
    field_index: int = 0
    case: Optional[str] = None
    family: Optional[str] = None
    n: Optional[int] = None
    good_basis: bool = False
    link: bool = False
    coords: Optional[str] = None
    I: Optional[str] = None
    J: Optional[str] = None
    e0: Optional[int] = None

    def validate(self):
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        for name in ("iterations", "coeff_bound", "t_max", "precision"):
            if getattr(self, name) <= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.precision < 32:
            raise UsageError("--precision must be at least 32 bits")
        if self.family is not None and self.family not in FAMILIES:
            raise UsageError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.field_index < 0:
            raise UsageError("--field-index must be non-negative")


_TYPES = {"int": int, "bool": bool, "str": str}
_OPTION_KEYS = {k for k in RunConfig.__dataclass_fields__ if k != "command"}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--json", action="store_true", default=None, help="emit a JSON report")
    g.add_argument("--seed", type=int, help=f"unsigned 64-bit RNG seed (default {DEFAULT_SEED})")
    g.add_argument("--precision", type=int,
                   help=f"bits for printed real embeddings (default {DEFAULT_PRECISION})")
    g.add_argument("--iterations", type=int,
                   help=f"random unimodular images tried by search (default {DEFAULT_ITERATIONS})")
    g.add_argument("--coeff-bound", type=int,
                   help=f"entry bound of the elementary matrices (default {DEFAULT_COEFF_BOUND})")
    g.add_argument("--t-max", type=int,
                   help=f"largest power of the discriminant tried by the principal link (default {DEFAULT_T_MAX})")
    g.add_argument("--n-range", help=f"inclusive parameter range a..b (default {DEFAULT_N_RANGE}); "
                                     "write --n-range=-9..-3 when a is negative")
    g.add_argument("--field-conductor", type=int, help="conductor m of the field")
    g.add_argument("--field-index", type=int,
                   help="which field of conductor m, in the order of (b, a) (default 0)")
    g.add_argument("--case", help="good-basis case or table row")
    g.add_argument("--config", help="TOML file with option values; command-line flags win")

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--family", dest="family", choices=FAMILIES,
                     help="take the field from a family instead of a conductor")
    fam.add_argument("-n", type=int, help="family parameter")

    p = argparse.ArgumentParser(
        prog="cubictwist",
        description="Well-rounded twists of ideal lattices in real cyclic cubic fields.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    sub.add_parser("field", parents=[common], help="build a field from its conductor and print invariants")

    sp = sub.add_parser("family", parents=[common], help="build a family member, its gates and integral basis")
    sp.add_argument("family", nargs="?", choices=FAMILIES)
    sp.add_argument("-n", type=int, help="family parameter")
    sp.add_argument("--good-basis", action="store_true", default=None,
                    help="also test the published good bases (all applicable cases unless --case)")

    sp = sub.add_parser("test-basis", parents=[common, fam], help="run the good-basis test on a basis",
                        epilog=COORDS_HELP)
    sp.add_argument("--coords", help=COORDS_HELP)
    sp.add_argument("--link", action="store_true", default=None,
                    help="also look for a principal ideal similar to the twist")

    sub.add_parser("search", parents=[common, fam], help="random search for good bases of O_F")

    sp = sub.add_parser("ideal", parents=[common], help="ramified ideal bases and their WR status")
    sp.add_argument("--I", dest="I", help="comma-separated indices of primes squared (1-based)")
    sp.add_argument("--J", dest="J", help="comma-separated indices of primes to the first power")
    sp.add_argument("--e0", type=int, help="exponent of the prime above 3 (0, 1 or 2)")

    sub.add_parser("ortho", parents=[common, fam], help="twist of O_F isometric to Z^3")

    sp = sub.add_parser("verify-family", parents=[common],
                        help="sweep a parameter range and compare with the published Gram matrices")
    sp.add_argument("family", nargs="?", choices=FAMILIES)
    return p


def load_config_file(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read config file {path}: {e.strerror}") from e
    except tomllib.TOMLDecodeError as e:
        raise UsageError(f"config file {path} is not valid TOML: {e}") from e
    out = {}
    for key, value in data.items():
        k = key.replace("-", "_")
        if k not in _OPTION_KEYS:
            raise UsageError(f"unknown key {key!r} in config file {path}")
        out[k] = value
    return out


def resolve_config(args):
    """Merge command line, config file and defaults, in that order of precedence."""
    values = {k: v for k, v in vars(args).items() if k in _OPTION_KEYS and v is not None}
    if getattr(args, "config", None):
        for k, v in load_config_file(args.config).items():
            values.setdefault(k, v)
    try:
        cfg = RunConfig(command=args.command, **values)
    except TypeError as e:
        raise UsageError(str(e)) from e
    for k, f in RunConfig.__dataclass_fields__.items():
        v = getattr(cfg, k)
        want = _TYPES[f.type.replace("Optional[", "").rstrip("]")]
        if v is not None and (type(v) is not want):
            raise UsageError(f"{k} must be of type {want.__name__}, got {v!r}")
    cfg.validate()
    return cfg


# -- argument parsing helpers ------------------------------------------------------

def parse_coords(text):
    rows = [r for r in text.split(";")]
    if len(rows) != 3:
        raise UsageError(f"--coords needs 3 rows separated by ';', got {len(rows)}")
    out = []
    for r in rows:
        parts = r.split(",")
        if len(parts) != 3:
            raise UsageError(f"each --coords row needs 3 comma-separated entries, got {r!r}")
        try:
            out.append(tuple(Fraction(x.strip()) for x in parts))
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"bad rational in --coords row {r!r}") from e
    return out


def parse_n_range(text):
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError as e:
        raise UsageError(f"--n-range must look like a..b, got {text!r}") from e
    if lo > hi:
        raise UsageError(f"--n-range is empty: {text}")
    return lo, hi


def parse_index_set(text):
    if not text:
        return set()
    try:
        return {int(x) for x in text.split(",") if x.strip()}
    except ValueError as e:
        raise UsageError(f"index list must be comma-separated integers, got {text!r}") from e


def field_of(cfg):
    """The field named by ``--field-conductor`` or ``--family/-n``."""
    if cfg.field_conductor is not None:
        if cfg.family is not None:
            raise UsageError("give either --field-conductor or --family/-n, not both")
        params = all_conductor_params(cfg.field_conductor)
        if cfg.field_index >= len(params):
            raise UsageError(f"conductor {cfg.field_conductor} has {len(params)} field(s); "
                             f"--field-index must be below that")
        return field_from_conductor(params[cfg.field_index])
    if cfg.family is not None:
        if cfg.n is None:
            raise UsageError("--family needs -n")
        return make_family_field(cfg.family, cfg.n).field
    raise UsageError("name a field with --field-conductor m or --family NAME -n N")


# -- human-readable output --------------------------------------------------------

def format_gram(G, indent="  "):
    cells = [[rational_str(x) for x in row] for row in G.matrix()]
    width = max(len(c) for row in cells for c in row)
    return "\n".join(indent + "[ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells)


def format_slack(G):
    if not G.has_equal_diagonal():
        return "  (unequal diagonal)"
    items = wr_slack(G).items()
    width = max(len(k) for k, _ in items)
    return "\n".join(f"  {k.ljust(width)} = {rational_str(v)}" for k, v in items)


def format_elem(x):
    return "(" + ", ".join(rational_str(c) for c in x.coords) + ")"


def human_twist(rep, out):
    out.append("basis (power-basis coordinates):")
    out.extend("  " + format_elem(b) for b in rep.basis)
    out.append(f"alpha0 = {format_elem(rep.alpha0)}")
    out.append(f"e1 = {rational_str(rep.e1)}, e2 = {rational_str(rep.e2)}, e3 = {rational_str(rep.e3)}")
    out.append(f"sign_ok = {rep.sign_ok}" + (f", sign = {rep.sign:+d}" if rep.sign_ok else ""))
    if rep.twisted_gram is not None:
        out.append("twisted Gram:")
        out.append(format_gram(rep.twisted_gram))
        out.append("WR slack (all >= 0 iff WR):")
        out.append(format_slack(rep.twisted_gram))
    out.append(f"good = {rep.is_good}")
    link = rep.principal_link
    if link is not None:
        out.append(f"principal link: psi = {format_elem(link.psi)}, k = {link.k}, t = {link.t}, "
                   f"verified = {link.verified}, |u|=|v|=|w| = {link.equal_off_diagonal}")


# -- commands ---------------------------------------------------------------------

def cmd_field(cfg):
    if cfg.field_conductor is None:
        raise UsageError("field needs --field-conductor m")
    F = field_of(cfg)
    info = field_dict(F, cfg.precision)
    lines = [f"field {F.label}", f"  polynomial: {F.poly_str()}",
             f"  field discriminant: {F.discriminant}",
             "  integral basis: " + ", ".join(format_elem(b) for b in F.integral_basis)]
    for i, iv in enumerate(info["embedding_of_rho"]):
        lo, hi = Fraction(iv["lo"]), Fraction(iv["hi"])
        lines.append(f"  embedding {i}: rho ~ {float((lo + hi) / 2):.12g}")
    return EXIT_OK, [info], lines


def cmd_family(cfg):
    if cfg.family is None or cfg.n is None:
        raise UsageError("family needs a family name and -n")
    inst = make_family_field(cfg.family, cfg.n)
    res = {"instance": to_jsonable(inst), "field": field_dict(inst.field)}
    lines = [f"{inst.family} n={inst.n}: {inst.field.poly_str()}",
             f"  integral basis case: {inst.basis_case}"]
    lines.extend(f"  [{v.value:>7}] {k}" for k, v in inst.conditions_met.items())
    if inst.integral_basis is not None:
        lines.append("  integral basis: " + ", ".join(format_elem(b) for b in inst.integral_basis))
        lines.append(f"  field discriminant: {inst.discriminant}")
    status = EXIT_OK
    if cfg.good_basis:
        cases = [cfg.case] if cfg.case else applicable_cases(inst)
        verdicts = []
        for case in cases:
            v = verify_case(inst, case)
            verdicts.append(_verdict_dict(v))
            lines.append(f"case {case}: ok = {v.ok} (unimodular = {v.unimodular}, gram match = {v.gram_match})")
            human_twist(v.report, lines)
            if not v.ok:
                status = EXIT_MISMATCH
        res["good_bases"] = verdicts
    return status, [res], lines


def _verdict_dict(v):
    return {"family": v.family, "n": v.n, "case": v.case, "ok": v.ok,
            "unimodular": v.unimodular, "gram_match": v.gram_match,
            "expected_s_u_v_w": v.expected_gram, "report": to_jsonable(v.report)}


def cmd_test_basis(cfg):
    if cfg.coords is None:
        raise UsageError("test-basis needs --coords")
    F = field_of(cfg)
    rows = parse_coords(cfg.coords)
    rep = test_good_basis(F, *(F(r) for r in rows))
    if cfg.link and rep.is_good:
        principal_link(rep, F, cfg.t_max)
    lines = [f"field {F.label}: {F.poly_str()}"]
    human_twist(rep, lines)
    return EXIT_OK, [rep], lines


def cmd_search(cfg):
    F = field_of(cfg)
    found = good_basis_search(F, iterations=cfg.iterations, coeff_bound=cfg.coeff_bound, seed=cfg.seed)
    lines = [f"field {F.label}: {F.poly_str()}",
             f"{len(found)} good bases with distinct twisted Grams "
             f"({cfg.iterations} images, coeff bound {cfg.coeff_bound}, seed {cfg.seed})"]
    for i, rep in enumerate(found):
        lines.append(f"-- #{i} transform {rep.meta['transform']}")
        human_twist(rep, lines)
    return EXIT_OK, found, lines


def cmd_ideal(cfg):
    if cfg.field_conductor is None:
        raise UsageError("ideal needs --field-conductor m")
    F = field_of(cfg)
    if cfg.I is None and cfg.J is None and cfg.e0 is None:
        specs = list(all_specs(F))
    else:
        specs = [RamifiedSpec(F, parse_index_set(cfg.I), parse_index_set(cfg.J), cfg.e0 or 0)]
    status = EXIT_OK
    checks = []
    lines = [f"field {F.label}"]
    for spec in specs:
        c = check_ideal(spec)
        checks.append(c)
        if not c.agrees:
            status = EXIT_MISMATCH
        lines.append(f"{spec.label():<16} norm {spec.norm:<8} {c.basis.construction:<22} "
                     f"predicted WR {str(c.predicted_wr):<5} ({c.reason}), enumerated {str(c.enumerated_wr):<5} "
                     f"first min {rational_str(c.first_minimum)}, covolume ok {c.covolume_ok}")
    return status, checks, lines


def cmd_ortho(cfg):
    F = field_of(cfg)
    try:
        cert = orthogonal_twist(F)
    except Unverified as e:
        return EXIT_MISMATCH, [{"certified": False, "reason": str(e)}], [f"no certificate: {e}"]
    lines = [f"field {F.label}: {F.poly_str()}", f"delta = {format_elem(cert.delta)}",
             "unimodular Gram:", format_gram(cert.unimodular_gram),
             f"orthonormal frame (integral-basis coordinates): {list(cert.orthonormal_frame)}",
             "frame Gram:", format_gram(cert.frame_gram)]
    return EXIT_OK, [{"certified": True, "certificate": to_jsonable(cert)}], lines


def cmd_verify_family(cfg):
    if cfg.family is None:
        raise UsageError("verify-family needs a family name")
    if cfg.case is not None and cfg.case not in CASES[cfg.family]:
        raise UsageError(f"unknown case {cfg.case!r} for {cfg.family}; choose from {', '.join(CASES[cfg.family])}")
    lo, hi = parse_n_range(cfg.n_range)
    verdicts, skipped, lines = [], [], []
    status = EXIT_OK
    for n in range(lo, hi + 1):
        try:
            inst = make_family_field(cfg.family, n)
        except CubicTwistError as e:
            skipped.append({"n": n, "reason": f"{type(e).__name__}: {e}"})
            continue
        if inst.integral_basis is None:
            skipped.append({"n": n, "reason": "integral basis gate failed"})
            continue
        cases = applicable_cases(inst)
        if cfg.case is not None:
            cases = [c for c in cases if c == cfg.case]
        for case in cases:
            v = verify_case(inst, case)
            verdicts.append(_verdict_dict(v))
            if not v.ok:
                status = EXIT_MISMATCH
            lines.append(f"n={n:>4} case {case:<12} {'match' if v.ok else 'MISMATCH':<8} "
                         f"good={v.report.is_good} unimodular={v.unimodular} gram_match={v.gram_match}")
    bad = sum(not v["ok"] for v in verdicts)
    lines.append(f"{len(verdicts)} checked, {bad} mismatches, {len(skipped)} parameters skipped")
    return status, [{"verdicts": verdicts, "skipped": skipped,
                     "checked": len(verdicts), "mismatches": bad}], lines


HANDLERS = {"field": cmd_field, "family": cmd_family, "test-basis": cmd_test_basis,
            "search": cmd_search, "ideal": cmd_ideal, "ortho": cmd_ortho,
            "verify-family": cmd_verify_family}


def run(cfg, stdout=None):
    """Execute ``cfg`` and write the report; returns the exit status."""
    stdout = stdout or sys.stdout
    status, results, lines = HANDLERS[cfg.command](cfg)
    if cfg.json:
        label = {EXIT_OK: "ok", EXIT_MISMATCH: "mismatch"}[status]
        data = serialize_report(make_report(cfg.command, asdict(cfg), results, label))
        stdout.write(data.decode("ascii"))
    else:
        stdout.write("\n".join(lines) + "\n")
    return status


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        cfg = resolve_config(args)
        return run(cfg)
    except UsageError as e:
        print(f"cubictwist {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (Unverified, BudgetExceeded, ArithmeticError) as e:
        print(f"cubictwist {args.command}: verification failed: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    except (CubicTwistError, ValueError) as e:
        print(f"cubictwist {args.command}: error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
