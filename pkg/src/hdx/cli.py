"""Command line interface: generators, computations, experiments, reports.

Exit codes: 0 success, 1 usage or i/o error, 2 when an asserted inequality
from the verified theory fails to hold (a genuine finding, not a crash).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import cheeger as chg
from . import cochain as ch
from . import complexes as cpx
from . import correction as corr
from . import covering as cov
from . import spectral as sp
from .config import DEFAULT_SEED, TOLERANCES
from .errors import SchemaError, SizeGuardExceeded


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def jsonable(obj):
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (ch.Cochain0, ch.Cochain1)):
        return ch.cochain_to_dict(obj)
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def write_report(path, config: dict, result, extra_tolerances=None) -> None:
    config = {k: v for k, v in config.items() if k != "func"}
    report = {
        "tool": "hdx",
        "version": __version__,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "config": jsonable(config),
        "tolerances": {**TOLERANCES, **(extra_tolerances or {})},
        "result": jsonable(result),
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _violations(result) -> bool:
    """Any 'holds' flag explicitly False anywhere in the result."""
    if isinstance(result, dict):
        if result.get("holds") is False:
            return True
        return any(_violations(v) for v in result.values())
    if isinstance(result, list):
        return any(_violations(v) for v in result)
    return False


def _load_complex(path) -> cpx.Complex:
    return cpx.load_complex(path)


def _load_cochain(cx, path) -> ch.Cochain1:
    with open(path) as fh:
        data = json.load(fh)
    a = ch.cochain_from_dict(cx, data)
    if not isinstance(a, ch.Cochain1):
        raise SchemaError(f"{path}: expected a 1-cochain")
    return a


def _presentation_from_args(gens, relators) -> cpx.Presentation:
    if not gens:
        raise SchemaError("--gens is required for presentation families")
    return cpx.presentation(gens, *(relators or []))


# -- subcommands ----------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.family == "complete":
        cx = cpx.complete_complex(args.d)
    elif args.family == "building":
        cx = cpx.spherical_building(args.q)
    elif args.family == "cyclic-cover":
        cx = cpx.cyclic_cover_complex(args.m)
    elif args.family == "presentation":
        cx = cpx.presentation_complex(_presentation_from_args(args.gens, args.relators))
    elif args.family == "contracted":
        cx = cpx.presentation_complex(cpx.contracted_complete_presentation(args.d))
    elif args.family == "free-product":
        left = _presentation_from_args(args.gens, args.relators)
        if args.contracted_d:
            right = cpx.contracted_complete_presentation(args.contracted_d)
        else:
            right = _presentation_from_args(args.gens2, args.relators2)
        cx = cpx.presentation_complex(cpx.free_product_presentation(left, right))
    else:
        raise SchemaError(f"unknown family {args.family!r}")
    cpx.save_complex(cx, args.out)
    print(f"wrote {args.out}: {cx!r}")
    return 0


def cmd_cheeger(args) -> int:
    rows = []
    results = []
    for path in args.complex:
        cx = _load_complex(path)
        if args.kind == "h0":
            report = chg.h0_f2(cx, "sweep" if args.mode == "sweep" else "exact")
        elif args.kind == "h1" and args.coeff == "f2":
            report = chg.h1_f2_exact(cx)
        elif args.kind == "h1":
            report = chg.h1_sym_truncated(cx, args.nmax, mode=args.mode, seed=args.seed)
        elif args.kind == "hB":
            report = chg.hB_variants(cx, args.nmax, mode=args.mode, seed=args.seed,
                                     coefficient=args.coeff)
        else:
            raise SchemaError(f"unsupported kind/coeff: {args.kind}/{args.coeff}")
        results.append({"complex": str(path), "report": report.to_dict()})
        for entry in report.per_degree or [
            {"degree": 2 if args.coeff == "f2" else None, "value": report.to_dict()["value"]}
        ]:
            rows.append({"complex": str(path), **{k: v for k, v in entry.items() if not isinstance(v, (dict, list))}})
    result = results[0]["report"] if len(results) == 1 else results
    write_report(args.out, vars(args), result)
    if args.csv:
        _write_csv(args.csv, rows)
    return 2 if _violations(result) else 0


def cmd_cosystole(args) -> int:
    cx = _load_complex(args.complex)
    report = chg.cosystole_sym(cx, args.nmax)
    write_report(args.out, vars(args), report)
    return 0


def cmd_spectral(args) -> int:
    cx = _load_complex(args.complex)
    slack = args.slack if args.slack is not None else TOLERANCES["inequality_slack"]
    if args.check == "trickle":
        result = sp.trickling_check(cx, slack=slack)
    elif args.check == "cheeger-lower":
        result = sp.weighted_cheeger_lower(cx, slack=slack)
    elif args.check == "cover-bound":
        degrees = tuple(int(n) for n in (args.degrees or "").split(",") if n)
        result = sp.cover_cosystole_bound(cx, experiment_degrees=degrees)
    else:
        result = sp.spectral_profile(cx)
    write_report(args.out, vars(args), result, {"inequality_slack": slack})
    if args.plot:
        from . import plots

        profile = result if args.check == "profile" else sp.spectral_profile(cx).to_dict()
        if hasattr(profile, "to_dict"):
            profile = profile.to_dict()
        plots.spectrum_figure(jsonable(profile), args.plot)
    return 2 if _violations(jsonable(result)) else 0


def cmd_cover(args) -> int:
    cx = _load_complex(args.complex)
    a = _load_cochain(cx, args.cochain)
    covering = cov.covering_from_cochain(a)
    checks = {
        "connected": covering.is_connected(),
        "is_cocycle": ch.is_cocycle(a),
        "crossing_fraction": covering.crossing_fraction(),
    }
    if ch.is_cocycle(a):
        checks["norm_equals_crossing"] = ch.norm(a) == covering.crossing_fraction()
        back = cov.cochain_from_covering(covering)
        checks["roundtrip_same_orbit"] = ch.same_orbit(a, back)
    data = cov.covering_to_dict(covering, base_name=str(args.complex))
    data["checks"] = jsonable(checks)
    Path(args.out).write_text(json.dumps(jsonable(data), indent=2, sort_keys=True) + "\n")
    failed = [k for k, v in checks.items() if v is False and k != "connected" and k != "is_cocycle"]
    return 2 if failed else 0


def cmd_correct(args) -> int:
    cx = _load_complex(args.complex)
    a = _load_cochain(cx, args.cochain)
    if args.method == "cone":
        cert = corr.correct_cone(a, root=args.root, fill_budget=args.fill_budget)
    elif args.method == "complete":
        cert = corr.correct_complete(a)
    else:
        raise SchemaError(f"unknown method {args.method!r}")
    write_report(args.out, vars(args), cert)
    return 2 if cert.holds is False else 0


def cmd_experiment(args) -> int:
    cx = _load_complex(args.complex)
    coeff = ch.Coefficient.f2() if args.coeff == "f2" else ch.Coefficient.sym(args.degree)
    rows = corr.stability_experiment(
        cx, coeff, args.p, args.trials, args.method,
        seed=args.seed, workers=args.workers,
        root=args.root, fill_budget=args.fill_budget,
    )
    _write_csv(args.out, rows)
    bound = None
    if args.method == "complete":
        bound = float(Fraction(cx.n_vertices - 2, cx.n_vertices))
    elif args.method == "cone":
        bound = float(args.fill_budget)
    if not args.no_plot:
        from . import plots

        figure = str(Path(args.out).with_suffix(".png"))
        plots.experiment_cloud(rows, bound, figure)
        print(f"wrote {figure}")
    summary = {
        "trials": len(rows),
        "max_ratio": max((r["ratio"] for r in rows if r["ratio"] is not None), default=None),
        "bound": bound,
    }
    if args.report:
        write_report(args.report, vars(args), {"summary": summary, "rows": rows})
    exceeded = bound is not None and summary["max_ratio"] is not None and summary["max_ratio"] > bound
    return 2 if exceeded else 0


def _write_csv(path, rows: list[dict]) -> None:
    if not rows:
        Path(path).write_text("")
        return
    fields = list(rows[0])
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {path}")


def build_parser() -> _Parser:
    parser = _Parser(prog="hdx", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hdx {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int,
                       default=int(os.environ.get("HDX_SEED", DEFAULT_SEED)),
                       help="base seed (env HDX_SEED overrides the default)")
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1)

    gen = sub.add_parser("gen", help="generate a complex file")
    gen.add_argument("family", choices=["complete", "building", "presentation",
                                        "contracted", "free-product", "cyclic-cover"])
    gen.add_argument("--d", type=int, default=3)
    gen.add_argument("--q", type=int, default=2)
    gen.add_argument("--m", type=int, default=1)
    gen.add_argument("--gens")
    gen.add_argument("--relators", nargs="*")
    gen.add_argument("--gens2")
    gen.add_argument("--relators2", nargs="*")
    gen.add_argument("--contracted-d", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    che = sub.add_parser("cheeger", help="Cheeger constants")
    che.add_argument("--complex", nargs="+", required=True)
    che.add_argument("--kind", choices=["h0", "h1", "hB"], default="h1")
    che.add_argument("--coeff", choices=["f2", "sym"], default="sym")
    che.add_argument("--nmax", type=int, default=2)
    che.add_argument("--mode", choices=["exact", "sweep", "sampled"], default="exact")
    che.add_argument("--out")
    che.add_argument("--csv", help="per-degree table for family sweeps")
    common(che)
    che.set_defaults(func=cmd_cheeger)

    cos = sub.add_parser("cosystole", help="minimal connected non-coboundary cocycle norm")
    cos.add_argument("--complex", required=True)
    cos.add_argument("--nmax", type=int, default=3)
    cos.add_argument("--out")
    common(cos)
    cos.set_defaults(func=cmd_cosystole)

    spe = sub.add_parser("spectral", help="spectral checks")
    spe.add_argument("--complex", required=True)
    spe.add_argument("--check", choices=["trickle", "cheeger-lower", "cover-bound", "profile"],
                     default="profile")
    spe.add_argument("--degrees", help="cover degrees for --check cover-bound, e.g. 2,3")
    spe.add_argument("--slack", type=float, default=None)
    spe.add_argument("--plot", help="write a spectrum figure to this path")
    spe.add_argument("--out")
    common(spe)
    spe.set_defaults(func=cmd_spectral)

    cvr = sub.add_parser("cover", help="build and export the cover of a cochain")
    cvr.add_argument("--complex", required=True)
    cvr.add_argument("--cochain", required=True)
    cvr.add_argument("--out", required=True)
    common(cvr)
    cvr.set_defaults(func=cmd_cover)

    cor = sub.add_parser("correct", help="run a correction method on a cochain")
    cor.add_argument("--complex", required=True)
    cor.add_argument("--cochain", required=True)
    cor.add_argument("--method", choices=["cone", "complete"], default="cone")
    cor.add_argument("--root", type=int, default=0)
    cor.add_argument("--fill-budget", type=int, default=25)
    cor.add_argument("--out")
    common(cor)
    cor.set_defaults(func=cmd_correct)

    exp = sub.add_parser("experiment", help="corruption experiments (CSV + figure)")
    exp.add_argument("--complex", required=True)
    exp.add_argument("--method", choices=["cone", "complete", "exact"], default="cone")
    exp.add_argument("--coeff", choices=["f2", "sym"], default="sym")
    exp.add_argument("--degree", type=int, default=2)
    exp.add_argument("--p", type=float, default=0.1)
    exp.add_argument("--trials", type=int, default=100)
    exp.add_argument("--root", type=int, default=0)
    exp.add_argument("--fill-budget", type=int, default=25)
    exp.add_argument("--out", required=True, help="CSV path (figure lands next to it)")
    exp.add_argument("--report", help="optional JSON report path")
    exp.add_argument("--no-plot", action="store_true")
    common(exp)
    exp.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, FileNotFoundError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except SizeGuardExceeded as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
