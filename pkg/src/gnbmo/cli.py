"""Command-line front end.

Exit codes: 0 success, 1 an inequality with an explicit constant failed,
2 configuration or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import field as fieldmod
from . import reports, verifiers
from .geometry import ConvexDomain, diameter, kappa, kappa_upper_bound, parse_domain
from .quadrature import QuadratureError
from .seminorms import (
    ExponentError,
    Exponents,
    bmo_seminorm,
    gagliardo_p_power,
    gradient_node_magnitudes,
    lp_gradient_norm_q,
    maximal_function,
    sharp_maximal,
)

VERIFY_STATEMENTS = tuple(verifiers.STATEMENTS)

DEFAULTS = {
    "domain": "interval(0,1)",
    "field": "affine",
    "h": 1e-3,
    "tol": 1e-8,
    "format": "csv",
    "seed": 0,
    "p": 2.0,
    "alpha": 1.0,
    "k1": 1,
    "sigma1": 0.5,
    "probes": 1,
    "trials": 100,
    "ratios": "2,10,100",
    "rho": 0.2,
    "kind": "gagliardo",
}


class ConfigError(Exception):
    pass


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file; explicit flags win")
    p.add_argument("--domain", help="e.g. interval(0,1), square, box(0,2,0,1), disk(0,0,1), halfspace(-1,1)")
    p.add_argument("--field", help="corpus label or path to a CSV of samples")
    p.add_argument("--h", type=float, help="lattice resolution")
    p.add_argument("--tol", type=float, help="tolerance for 1-d integrals and equality checks")
    p.add_argument("--out", help="output file (written atomically)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--seed", type=int, help="seed for random probe selection")
    p.add_argument("--timing", action="store_true", help="fill the runtime_ms column")


def _add_exponents(p: argparse.ArgumentParser) -> None:
    for name in ("s", "p", "s1", "p1", "sigma1", "alpha"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--k1", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gnbmo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kappa", help="geometric constant of a domain")
    _add_common(p)

    p = sub.add_parser("seminorm", help="Gagliardo p-power or gradient Lq norm")
    _add_common(p)
    _add_exponents(p)
    p.add_argument("--kind", choices=("gagliardo", "lp-gradient"))
    p.add_argument("--q", type=float, help="exponent for lp-gradient (default s*p)")
    p.add_argument("--refine", action="store_true", help="error estimate from one h/2 rerun")

    p = sub.add_parser("bmo", help="BMO seminorm")
    _add_common(p)

    p = sub.add_parser("maximal", help="maximal function of |Df| and sharp maximal function at x")
    _add_common(p)
    p.add_argument("--x", required=False, help="point, comma-separated coordinates")

    p = sub.add_parser("verify", help="check one statement")
    p.add_argument("statement", choices=VERIFY_STATEMENTS)
    _add_common(p)
    _add_exponents(p)
    p.add_argument("--x", help="probe point; default: --probes seeded random points")
    p.add_argument("--probes", type=int, help="number of seeded random probe points")
    p.add_argument("--r", type=float, help="ball radius for pointwise lemmas (default diam/4)")
    p.add_argument("--ratios", help="r1/r0 values for bmo-log, comma-separated")
    p.add_argument("--trials", type=int, help="random cases for triangle")
    p.add_argument("--rho", type=float, help="mollifier scale")
    p.add_argument("--refine", action="store_true")

    p = sub.add_parser("sweep", help="one report per value of an exponent")
    p.add_argument("statement", choices=("thm21", "thm31", "thm41"))
    _add_common(p)
    _add_exponents(p)
    p.add_argument("--axis", required=True, choices=verifiers.SWEEP_AXES)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--no-blowup", action="store_true", help="leave the blow-up factor out of rhs_product")

    p = sub.add_parser("estimate-c", help="empirical constant over the corpus")
    p.add_argument("statement", choices=("thm21", "thm31", "thm41"))
    _add_common(p)
    p.add_argument("--grid", help="exponent grid, ';'-separated tuples, e.g. '0.6,2;0.75,2'")
    p.add_argument("--no-refine", action="store_true", help="skip the h/2 drift rerun")

    p = sub.add_parser("corpus", help="built-in test functions")
    p.add_argument("action", choices=("list",))
    _add_common(p)
    return parser


def merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Flags > config file > defaults."""
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    for key, value in cfg.items():
        if not hasattr(args, key):
            raise ConfigError(f"unknown config key {key!r} for command {args.command}")
        if getattr(args, key) in (None, False):
            current = getattr(args, key)
            if current is False:
                value = value.lower() in ("1", "true", "yes", "on")
            elif key in ("h", "tol", "s", "p", "s1", "p1", "sigma1", "alpha", "rho", "r", "q"):
                value = float(value)
            elif key in ("seed", "k1", "probes", "trials"):
                value = int(value)
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _point(text: str, domain: ConvexDomain) -> np.ndarray:
    try:
        x = np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise ConfigError(f"bad point {text!r}") from exc
    if x.shape != (domain.dimension,):
        raise ConfigError(f"point {text!r} does not have dimension {domain.dimension}")
    return x


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def _field(args, domain: ConvexDomain):
    label = args.field
    if Path(label).suffix == ".csv":
        return fieldmod.load_samples_csv(label, domain)
    return fieldmod.corpus_field(domain, label, args.h)


def _probes(args, domain: ConvexDomain, margin: float) -> np.ndarray:
    if getattr(args, "x", None):
        return _point(args.x, domain)[None, :]
    return verifiers.probe_points(domain, args.probes, args.seed, margin)


def _emit(args, reps, extra_meta=None) -> None:
    meta = {"command": args.command, "seed": args.seed}
    if getattr(args, "statement", None):
        meta["statement"] = args.statement
    meta.update(extra_meta or {})
    text = reports.emit_report(reps, args.format, args.out, meta, include_runtime=args.timing)
    if args.out is None:
        sys.stdout.write(text)


def _emit_values(args, rows: list[dict]) -> None:
    """Plain quantities (kappa, seminorms, maximal functions)."""
    if args.format == "json":
        text = json.dumps({"command": args.command, "seed": args.seed, "values": rows}, indent=2,
                          ensure_ascii=False) + "\n"
    else:
        keys = list(rows[0])
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(keys)
        writer.writerows([reports.fmt(r[k]) for k in keys] for r in rows)
        text = buf.getvalue()
    if args.out:
        reports.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _exponents_from(args) -> Exponents:
    if args.statement == "thm41":
        return Exponents.higher_order(args.k1, args.sigma1, args.p1 if args.p1 is not None else 2.0)
    return Exponents(args.s, args.p, args.s1, args.p1)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise ConfigError("missing " + ", ".join("--" + n for n in missing))


def cmd_kappa(args) -> int:
    domain = parse_domain(args.domain)
    value = kappa(domain, args.h)
    bound = kappa_upper_bound(domain) if not domain.is_window else None
    _emit_values(args, [{"quantity": "kappa", "domain": domain.label, "h": args.h, "value": value,
                         "upper_bound": bound, "diameter": diameter(domain)}])
    return 0


def cmd_seminorm(args) -> int:
    domain = parse_domain(args.domain)
    f = _field(args, domain)
    if args.kind == "gagliardo":
        _require(args, "s")
        res = gagliardo_p_power(f, domain, args.s, args.p, args.h, refine=args.refine)
        row = {"quantity": "gagliardo-p-power", "s": args.s, "p": args.p}
    else:
        q = args.q if args.q is not None else (args.s * args.p if args.s is not None else None)
        if q is None:
            raise ConfigError("lp-gradient needs --q or --s")
        res = lp_gradient_norm_q(f, domain, q, args.h)
        row = {"quantity": "lp-gradient", "q": q}
    row.update(domain=domain.label, field=f.label, h=res.resolution, value=res.value,
               error_estimate=res.error_estimate if args.kind == "gagliardo" and args.refine else None,
               notes=res.notes)
    _emit_values(args, [row])
    return 0


def cmd_bmo(args) -> int:
    domain = parse_domain(args.domain)
    f = _field(args, domain)
    res = bmo_seminorm(f, domain, args.h)
    _emit_values(args, [{"quantity": "bmo", "domain": domain.label, "field": f.label, "h": res.resolution,
                         "value": res.value, "notes": res.notes}])
    return 0


def cmd_maximal(args) -> int:
    domain = parse_domain(args.domain)
    f = _field(args, domain)
    x = _point(args.x, domain) if args.x else domain.center
    mag = gradient_node_magnitudes(f, domain, args.h)
    rows = [
        {"quantity": "maximal-grad", "domain": domain.label, "field": f.label, "x": args.x or "center",
         "h": args.h, "value": maximal_function(mag, domain, x, args.h)},
        {"quantity": "sharp-maximal", "domain": domain.label, "field": f.label, "x": args.x or "center",
         "h": args.h, "value": sharp_maximal(f, domain, x, args.h)},
    ]
    _emit_values(args, rows)
    return 0


def _verify_reports(args) -> list:
    st = args.statement
    if st == "gamma":
        return [verifiers.check_gamma_identity(args.p, args.alpha, args.tol)]
    domain = parse_domain(args.domain)
    if st == "triangle":
        cases = verifiers.random_triangle_cases(domain, args.trials, args.seed, args.h)
        return [verifiers.check_triangle(f, A, B, C, args.h) for f, A, B, C in cases]
    f = _field(args, domain)
    if st == "thm21":
        _require(args, "s")
        return [verifiers.verify_first_order_interpolation(f, domain, args.s, args.p, args.h, refine=args.refine)]
    if st == "thm31":
        _require(args, "s", "s1", "p1")
        return [verifiers.verify_fractional_interpolation(f, domain, args.s, args.p, args.s1, args.p1, args.h,
                                                          refine=args.refine)]
    if st == "thm41":
        p1 = args.p1 if args.p1 is not None else 2.0
        return [verifiers.verify_higher_order_interpolation(f, domain, args.k1, args.sigma1, p1, args.h)]
    if st == "mollifier":
        pts = _probes(args, domain, args.rho)
        return [verifiers.check_mollifier_identity(f, x[0], args.rho, domain, args.tol * 100) for x in pts]
    radius = args.r if args.r is not None else diameter(domain) / 4
    pts = _probes(args, domain, args.h)
    out = []
    for x in pts:
        if st == "lusin":
            out.append(verifiers.check_lusin(f, domain, x, radius, args.h))
        elif st == "bmo-log":
            r1 = diameter(domain) / 2
            out += [verifiers.check_bmo_log(f, domain, x, r1 / q, r1, args.h) for q in _floats(args.ratios)]
        elif st == "osc-holder":
            _require(args, "s1", "p1")
            out.append(verifiers.check_osc_holder(f, domain, x, radius, args.s1, args.p1, args.h))
        elif st == "local-sharp":
            _require(args, "s")
            out.append(verifiers.check_pointwise_local(f, domain, x, args.s, args.p, args.h))
        elif st == "local-frac":
            _require(args, "s", "s1", "p1")
            out.append(verifiers.check_pointwise_fractional(f, domain, x, args.s, args.p, args.s1, args.p1, args.h))
        elif st == "local-higher":
            p1 = args.p1 if args.p1 is not None else 2.0
            out.append(verifiers.check_pointwise_higher(f, x, args.k1, args.sigma1, p1, domain, args.h))
    return out


def cmd_verify(args) -> int:
    reps = _verify_reports(args)
    _emit(args, reps)
    return 1 if any(r.passed is False for r in reps) else 0


def cmd_sweep(args) -> int:
    domain = parse_domain(args.domain)
    f = _field(args, domain)
    base = verifiers.DEFAULT_GRIDS[args.statement][0]
    kw = {k: getattr(base, k) for k in ("s", "p", "s1", "p1", "k1", "sigma1")}
    used = {"thm21": ("s", "p"), "thm31": ("s", "p", "s1", "p1"), "thm41": ("k1", "sigma1", "p1")}
    for k in used[args.statement]:
        if getattr(args, k, None) is not None:
            kw[k] = getattr(args, k)
    base = Exponents.higher_order(kw["k1"], kw["sigma1"], kw["p1"]) if args.statement == "thm41" else Exponents(**kw)
    reps = verifiers.sweep(args.statement, domain, f, args.axis, _floats(args.values), args.h, base,
                           include_blowup=not args.no_blowup)
    _emit(args, reps)
    return 0


def _parse_grid(statement: str, text: str | None):
    if not text:
        return None
    grid = []
    for part in text.split(";"):
        vals = _floats(part)
        if statement == "thm41":
            k1, sigma1, p1 = vals
            grid.append(Exponents.higher_order(int(k1), sigma1, p1))
        else:
            grid.append(Exponents(*vals))
    return grid


def cmd_estimate(args) -> int:
    domain = parse_domain(args.domain)

    def corpus_at(h):
        return [e for e in fieldmod.builtin_corpus(domain, h)
                if args.statement != "thm41" or e.field.second_derivative_rule is not None]

    est = verifiers.estimate_constant(args.statement, domain, corpus_at(args.h), _parse_grid(args.statement, args.grid),
                                      args.h, refine=not args.no_refine, corpus_at=corpus_at)
    meta = {"c_emp": est.c_emp, "refinement_drift": est.refinement_drift, "corpus_size": est.corpus_size,
            "per_parameter": est.per_parameter, "spread": est.spread}
    _emit(args, list(est.reports) + list(est.refined_reports), meta)
    drift = "" if est.refinement_drift is None else f" drift={est.refinement_drift:.4g}"
    print(f"c_emp={est.c_emp:.6g}{drift} spread={est.spread:.4g} corpus={est.corpus_size}", file=sys.stderr)
    return 0


def cmd_corpus(args) -> int:
    domain = parse_domain(args.domain)
    rows = [{"label": e.label, "smoothness_class": e.smoothness_class, "notes": e.notes}
            for e in fieldmod.builtin_corpus(domain, args.h)]
    _emit_values(args, rows)
    return 0


COMMANDS = {
    "kappa": cmd_kappa, "seminorm": cmd_seminorm, "bmo": cmd_bmo, "maximal": cmd_maximal,
    "verify": cmd_verify, "sweep": cmd_sweep, "estimate-c": cmd_estimate, "corpus": cmd_corpus,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        args = merge_config(args)
        return COMMANDS[args.command](args)
    except (ConfigError, ExponentError, ValueError, KeyError, OSError, QuadratureError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


def main(argv=None) -> None:
    sys.exit(run(argv))
