"""Batch TSV front end.

One subcommand per claim cluster: classno, rep, automorphs, densities, mass,
real-quadratic, lvalue, waldspurger, amplify-demo, survey-error.  Output is
tab-separated with a header row, LF line endings, floats %.12g, exact
rationals "num/den", booleans yes/no.  Re-running a command with the same
configuration produces byte-identical output, parallel or not: workers only
call pure core operations and rows are gathered and sorted before emission.

Exit codes: 0 success, 1 usage/config error, 2 internal consistency error,
3 range/overflow error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import math
import os
import sys
from fractions import Fraction
from math import gcd

import numpy as np

from . import (
    amplification,
    arith,
    class_numbers,
    lfunctions,
    local_densities,
    ternary_forms,
)
from .errors import IntegrityError, RangeError

THREADS_ENV = "TERNARY_MASS_THREADS"

FORMS = {
    "three-squares": ternary_forms.THREE_SQUARES,
    "ramanujan-q": ternary_forms.RAMANUJAN_Q,
    "ramanujan-qprime": ternary_forms.RAMANUJAN_QPRIME,
    "spinor-a": ternary_forms.SPINOR_A,
    "spinor-b": ternary_forms.SPINOR_B,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "yes" if v else "no"
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return f"{v:.12g}"
    if v is None:
        return "flagged"
    return str(v)


def _emit(out, header: list[str], rows: list[tuple]) -> None:
    out.write("\t".join(header) + "\n")
    for row in rows:
        out.write("\t".join(_fmt(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# Option plumbing: CLI flag > config file > default
# ---------------------------------------------------------------------------

_BOOLEANS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _load_config(path: str) -> dict[str, str]:
    conf: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
                key, value = line.split("=", 1)
                conf[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    return conf


def _resolve(args: argparse.Namespace, table: dict[str, tuple[type, object]]) -> None:
    conf = _load_config(args.config) if args.config else {}
    for dest, (typ, default) in table.items():
        if getattr(args, dest, None) is not None:
            continue
        if dest in conf:
            raw = conf[dest]
            try:
                if typ is bool:
                    value = _BOOLEANS[raw.lower()]
                else:
                    value = typ(raw)
            except (KeyError, ValueError) as exc:
                raise UsageError(f"config field {dest}={raw!r} is not a valid {typ.__name__}") from exc
        else:
            value = default
        setattr(args, dest, value)
    unknown = set(conf) - set(table)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        t = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV}={raw!r} is not an integer")
    return max(1, t)


# worker-process state for the L-value commands
_WORKER_SERIES = None


def _init_series(n_coeffs: int) -> None:
    global _WORKER_SERIES
    if _WORKER_SERIES is None or _WORKER_SERIES.N_max < n_coeffs:
        _WORKER_SERIES = lfunctions.newform20(n_coeffs)


def _worker_classno(D: int):
    info = arith.classify_discriminant(D)
    if info.kind == arith.NOT_A_DISCRIMINANT:
        return None
    h = class_numbers.class_number(D)
    w = class_numbers.unit_count(D)
    l1_h = 2.0 * math.pi * h / (w * math.sqrt(-D))
    l1_chi = class_numbers.dirichlet_L1_any(D)
    return (D, h, w, l1_h, l1_chi, abs(l1_h - l1_chi))


def _worker_lvalue(D: int):
    cv = lfunctions.central_value(_WORKER_SERIES, D)
    return (D, cv.value, cv.root_number, cv.est_error, cv.cutoff)


def _worker_waldspurger(n: int):
    row = lfunctions.waldspurger_study(_WORKER_SERIES, [n])[0]
    return (
        row.n,
        row.lhs,
        row.rhs_core,
        row.ratio,
        row.central.root_number,
        row.central.est_error,
    )


def _parallel_map(fn, items, threads, init=None, initargs=()):
    if init is not None:
        init(*initargs)  # parent builds state first; forked workers inherit it
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with concurrent.futures.ProcessPoolExecutor(
        max_workers=threads, initializer=init, initargs=initargs
    ) as ex:
        chunk = max(1, len(items) // (4 * threads))
        return list(ex.map(fn, items, chunksize=chunk))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_classno(args, out) -> None:
    if args.dmin > args.dmax or args.dmax >= 0:
        raise UsageError("need dmin <= dmax < 0")
    ds = [D for D in range(args.dmin, args.dmax + 1) if D % 4 in (0, 1)]
    rows = [r for r in _parallel_map(_worker_classno, ds, args.threads) if r]
    _emit(out, ["D", "h", "w", "L1_classno", "L1_charsum", "diff"], rows)


def cmd_rep(args, out) -> None:
    form = FORMS[args.form]
    if args.nmax < args.nmin or args.nmin < 1:
        raise UsageError("need 1 <= nmin <= nmax")
    call, prim = ternary_forms.rep_counts_upto(form, args.nmax)
    rows = [(n, int(call[n]), int(prim[n])) for n in range(args.nmin, args.nmax + 1)]
    _emit(out, ["n", "count_all", "count_primitive"], rows)


def cmd_automorphs(args, out) -> None:
    rows = []
    for name, form in FORMS.items():
        rows.append((name, str(form.gram), ternary_forms.automorph_count(form)))
    _emit(out, ["form", "gram", "proper_automorphs"], rows)


def cmd_densities(args, out) -> None:
    g = local_densities.genus(args.genus)
    report = local_densities.density_report(
        g, args.n, truncation_prime=args.truncation_prime, p_detail_max=args.pmax
    )
    rows = [(args.n, "inf", report.beta_inf, report.beta_inf, True)]
    for p in sorted(report.beta_p):
        closed = local_densities.beta_p_closed(g, args.n, p)
        counting = report.beta_p[p]
        rows.append((args.n, p, closed, counting, closed == counting))
    _emit(out, ["n", "p", "beta_closed", "beta_counting", "equal"], rows)


def cmd_mass(args, out) -> None:
    if args.nmax < 1:
        raise UsageError("need nmax >= 1")
    sf = arith.squarefree_mask_upto(args.nmax)
    if args.genus == local_densities.RAMANUJAN_LABEL:
        rows = []
        identity = local_densities.exact_mass_identity_rows(args.nmax)
        checks = {}
        if args.product:
            checks = {
                c.n: c
                for c in local_densities.mass_survey(
                    local_densities.genus(args.genus),
                    args.nmax,
                    truncation_prime=args.truncation_prime,
                )
            }
        for n, rq, rqp, lhs, two_h in identity:
            if args.squarefree and not sf[n]:
                continue
            row = [n, rq, rqp, lhs, two_h, lhs == two_h]
            if args.product:
                c = checks[n]
                row += [c.rhs, c.residual, c.tail_bound]
            rows.append(tuple(row))
        header = ["n", "rQ", "rQprime", "lhs", "two_h_minus40n", "equal"]
    else:
        g = local_densities.genus(args.genus)
        call, prim = ternary_forms.rep_counts_upto(ternary_forms.THREE_SQUARES, args.nmax)
        checks = {}
        if args.product:
            checks = {
                c.n: c
                for c in local_densities.mass_survey(
                    g, args.nmax, truncation_prime=args.truncation_prime
                )
            }
        rows = []
        for n in range(1, args.nmax + 1):
            if n % 8 not in (1, 2, 3, 5, 6):
                continue
            if args.squarefree and not sf[n]:
                continue
            D = local_densities.character_discriminant(args.genus, n)
            h = class_numbers.class_number(D)
            w = class_numbers.unit_count(D)
            gauss = (24 // w) * h if n % 8 != 3 else (48 // w) * h
            row = [n, int(prim[n]), h, w, gauss, int(prim[n]) == gauss]
            if args.product and n in checks:
                c = checks[n]
                row += [c.rhs, c.residual, c.tail_bound]
            rows.append(tuple(row))
        header = ["n", "rstar", "h", "w", "gauss_rhs", "equal"]
    if args.product:
        header += ["product_rhs", "residual", "tail_bound"]
    _emit(out, header, rows)


def cmd_real_quadratic(args, out) -> None:
    ring = ternary_forms.RealQuadraticRing(args.m)
    if args.values:
        try:
            ns = sorted({int(v) for v in args.values.split(",")})
        except ValueError as exc:
            raise UsageError(f"bad --values list: {exc}") from exc
    else:
        ns = list(range(args.nmin, args.nmax + 1))
    rows = []
    for n in ns:
        res = ternary_forms.rep_count_real_quadratic(ring, n)
        rows.append((n, res.count_all, res.count_primitive))
    _emit(out, ["n", "count_all", "count_primitive"], rows)


def _fundamental_twists(dmin: int, dmax: int) -> list[int]:
    out = []
    for D in range(dmin, dmax + 1):
        if D >= 0 or D % 4 in (2, 3):
            continue
        if gcd(D, 20) != 1:
            continue
        if arith.is_fundamental_discriminant(D):
            out.append(D)
    return out


def cmd_lvalue(args, out) -> None:
    if args.dmin > args.dmax or args.dmax >= 0:
        raise UsageError("need dmin <= dmax < 0")
    ds = _fundamental_twists(args.dmin, args.dmax)
    coeffs = args.coeffs or int(135 * abs(args.dmin)) + 50
    rows = _parallel_map(_worker_lvalue, ds, args.threads, _init_series, (coeffs,))
    for row in rows:
        if row[3] > args.afe_precision:
            raise RangeError(
                f"est_error {row[3]} exceeds requested afe precision at D={row[0]}"
            )
    _emit(out, ["D", "L_half", "root_number", "est_error", "cutoff"], rows)


def cmd_waldspurger(args, out) -> None:
    if args.nmax < 1:
        raise UsageError("need nmax >= 1")
    sf = arith.squarefree_mask_upto(args.nmax)
    ns = [n for n in range(1, args.nmax + 1) if sf[n] and gcd(n, 10) == 1]
    coeffs = args.coeffs or 765 * args.nmax + 50
    rows = _parallel_map(_worker_waldspurger, ns, args.threads, _init_series, (coeffs,))
    for row in rows:
        if row[5] > args.afe_precision:
            raise RangeError(
                f"est_error {row[5]} exceeds requested afe precision at n={row[0]}"
            )
    _emit(out, ["n", "lhs", "rhs_core", "ratio", "root_number", "est_error"], rows)


def cmd_amplify_demo(args, out) -> None:
    q = args.q
    table = amplification.character_table(q)
    rng = np.random.default_rng(args.seed)
    f = lfunctions.newform20(int(4 * args.x) + 10)
    W = amplification.SmoothWeight(float(args.x))
    rows = []

    for d in range(q - 1):
        value = table.orthogonality_exact(d, 0)
        expected = q - 1 if d == 0 else 0
        if value != expected:
            raise IntegrityError("orthogonality value mismatch")
    rows.append(("orthogonality", f"q={q}", float(q - 1), 0.0, 0.0, True))

    c = {a: complex(rng.standard_normal(), rng.standard_normal()) for a in range(1, q)}
    resid = amplification.plancherel_identity_check(table, c)
    scale = (q - 1) * sum(abs(v) ** 2 for v in c.values())
    rows.append(("plancherel", "random-c", scale, scale, resid, resid <= 1e-10 * scale))

    amp = amplification.amplifier(max(2.0, q / 4), q)
    target = int(rng.integers(0, q - 1))
    S, lower = amplification.amplified_moment(f, table, target, amp, W)
    rows.append(("amplified", f"target={target}", S, lower, max(0.0, lower - S), S >= lower - 1e-10 * S))

    ells = [int(p) for p in arith.primes_upto(50) if p % q != 0][-2:]
    spec_side, arith_side = amplification.shifted_convolution_expand(f, q, tuple(ells), W)
    denom = max(abs(spec_side), abs(arith_side), 1e-30)
    rel = abs(spec_side - arith_side) / denom
    rows.append(("shifted", f"l1={ells[0]},l2={ells[1]}", spec_side, arith_side, rel, rel <= 1e-9))

    _emit(out, ["check", "detail", "value_a", "value_b", "residual", "ok"], rows)


def cmd_survey_error(args, out) -> None:
    if args.genus != local_densities.RAMANUJAN_LABEL:
        raise UsageError("survey-error is defined for --genus ramanujan-ten")
    if args.nmax < 1:
        raise UsageError("need nmax >= 1")
    _, prim = ternary_forms.rep_counts_upto(ternary_forms.RAMANUJAN_Q, args.nmax)
    sf = arith.squarefree_mask_upto(args.nmax)
    const = 4.0 * math.sqrt(10.0) / (3.0 * math.pi)
    rows = []
    for n in range(1, args.nmax + 1):
        if gcd(n, 10) != 1:
            continue
        if args.squarefree and not sf[n]:
            continue
        main = const * math.sqrt(n) * class_numbers.dirichlet_L1_any(-40 * n)
        err = float(prim[n]) - main
        rows.append((n, int(prim[n]), main, err, err / n**0.25))
    _emit(out, ["n", "rstar", "main_term", "error", "error_over_n14"], rows)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_COMMON = {
    "output": (str, None),
    "threads": (int, None),  # resolved against the environment later
    "config": (str, None),
}


def _add_common(sp) -> None:
    sp.add_argument("--output", help="output path (default stdout)")
    sp.add_argument("--threads", type=int, help=f"worker count (default ${THREADS_ENV} or 1)")
    sp.add_argument("--config", help="key=value config file")


_TABLES: dict[str, dict[str, tuple[type, object]]] = {
    "classno": {"dmin": (int, None), "dmax": (int, None)},
    "rep": {"form": (str, "three-squares"), "nmin": (int, 1), "nmax": (int, None)},
    "automorphs": {},
    "densities": {
        "genus": (str, "ramanujan-ten"),
        "n": (int, None),
        "pmax": (int, 50),
        "truncation_prime": (int, 100_000),
    },
    "mass": {
        "genus": (str, "ramanujan-ten"),
        "nmax": (int, None),
        "squarefree": (bool, False),
        "product": (bool, False),
        "truncation_prime": (int, 100_000),
    },
    "real-quadratic": {
        "m": (int, 35),
        "nmin": (int, 1),
        "nmax": (int, 30),
        "values": (str, None),
    },
    "lvalue": {
        "dmin": (int, None),
        "dmax": (int, None),
        "coeffs": (int, None),
        "afe_precision": (float, 1e-6),
    },
    "waldspurger": {
        "nmax": (int, None),
        "coeffs": (int, None),
        "afe_precision": (float, 1e-4),
    },
    "amplify-demo": {"q": (int, 11), "x": (float, None), "seed": (int, 0)},
    "survey-error": {
        "genus": (str, "ramanujan-ten"),
        "nmax": (int, None),
        "squarefree": (bool, False),
    },
}

_REQUIRED = {
    "classno": ("dmin", "dmax"),
    "rep": ("nmax",),
    "densities": ("n",),
    "mass": ("nmax",),
    "lvalue": ("dmin", "dmax"),
    "waldspurger": ("nmax",),
    "survey-error": ("nmax",),
}

_HANDLERS = {
    "classno": cmd_classno,
    "rep": cmd_rep,
    "automorphs": cmd_automorphs,
    "densities": cmd_densities,
    "mass": cmd_mass,
    "real-quadratic": cmd_real_quadratic,
    "lvalue": cmd_lvalue,
    "waldspurger": cmd_waldspurger,
    "amplify-demo": cmd_amplify_demo,
    "survey-error": cmd_survey_error,
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="ternary-mass", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("classno", help="class numbers and L(1) both ways")
    sp.add_argument("--dmin", type=int)
    sp.add_argument("--dmax", type=int)

    sp = subs.add_parser("rep", help="representation counts for a named form")
    sp.add_argument("--form", choices=sorted(FORMS))
    sp.add_argument("--nmin", type=int)
    sp.add_argument("--nmax", type=int)

    subs.add_parser("automorphs", help="proper automorph counts")

    sp = subs.add_parser("densities", help="local densities, closed form vs counting")
    sp.add_argument("--genus", choices=["three-squares", "ramanujan-ten"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--pmax", type=int)
    sp.add_argument("--truncation-prime", type=int, dest="truncation_prime")

    sp = subs.add_parser("mass", help="mass identities over a range of n")
    sp.add_argument("--genus", choices=["three-squares", "ramanujan-ten"])
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--squarefree", action="store_const", const=True)
    sp.add_argument("--product", action="store_const", const=True)
    sp.add_argument("--truncation-prime", type=int, dest="truncation_prime")

    sp = subs.add_parser("real-quadratic", help="three-square counts over Z[sqrt(m)]")
    sp.add_argument("--m", type=int)
    sp.add_argument("--nmin", type=int)
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--values", help="comma-separated list of n values")

    sp = subs.add_parser("lvalue", help="twisted central values over fundamental D")
    sp.add_argument("--dmin", type=int)
    sp.add_argument("--dmax", type=int)
    sp.add_argument("--coeffs", type=int)
    sp.add_argument("--afe-precision", type=float, dest="afe_precision")

    sp = subs.add_parser("waldspurger", help="difference-squared vs central value table")
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--coeffs", type=int)
    sp.add_argument("--afe-precision", type=float, dest="afe_precision")

    sp = subs.add_parser("amplify-demo", help="character-sum identity checks")
    sp.add_argument("--q", type=int)
    sp.add_argument("--x", type=float)
    sp.add_argument("--seed", type=int)

    sp = subs.add_parser("survey-error", help="error-term study for the main term")
    sp.add_argument("--genus", choices=["ramanujan-ten"])
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--squarefree", action="store_const", const=True)

    for name, sub in subs.choices.items():
        _add_common(sub)
    return parser


def main(argv=None) -> int:
    try:
        parser = _build_parser()
        args = parser.parse_args(argv)
        table = dict(_TABLES[args.command])
        table.update(_COMMON)
        _resolve(args, table)
        if args.threads is None:
            args.threads = _default_threads()
        if args.threads < 1:
            raise UsageError("threads must be >= 1")
        for field in _REQUIRED.get(args.command, ()):
            if getattr(args, field) is None:
                raise UsageError(f"--{field.replace('_', '-')} is required")
        if args.command == "amplify-demo" and args.x is None:
            args.x = float(args.q)
        handler = _HANDLERS[args.command]
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="\n") as out:
                handler(args, out)
        else:
            handler(args, sys.stdout)
        return 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return 2
    except (RangeError, OverflowError) as exc:
        print(f"range error: {exc}", file=sys.stderr)
        return 3


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
