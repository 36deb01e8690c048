"""Batch front-end: build models, run audits and experiments, write traces.

Exit codes: 0 all checks pass, 1 audit failure, 2 tolerance failure,
3 enumeration budget exhausted, 4 configuration error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import random
import sys
from fractions import Fraction

from . import graded, lattice, models
from .filtration import FilteredSpace
from .lattice import BudgetExhausted, NormedLattice, UnverifiedCertificate
from .measure import cdf_distance

EXIT_OK = 0
EXIT_AUDIT = 1
EXIT_TOLERANCE = 2
EXIT_BUDGET = 3
EXIT_CONFIG = 4


class ConfigError(ValueError):
    pass


def _parse_fraction(text: str):
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def _parse_int_list(text: str):
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arithvol",
        description="filtered spaces, normed lattices and graded series: "
        "audits and volume experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--kind", help=f"model kind, one of {', '.join(models.KINDS)}")
        p.add_argument(
            "--param",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="model parameter, repeatable",
        )
        p.add_argument("--budget-nodes", type=int, default=lattice.DEFAULT_NODE_BUDGET)
        p.add_argument("--no-timestamp", action="store_true")

    p = sub.add_parser("measure", help="emit the rescaled filtration measure")
    common(p)
    p.add_argument("--degrees", type=_parse_int_list, default=[100])

    p = sub.add_parser("lattice-audit", help="run the inequality audit")
    common(p)
    p.add_argument("--count", type=int, default=1, help="number of instances")
    p.add_argument("--rank", type=int, default=3)
    p.add_argument("--bound", type=int, default=5)

    p = sub.add_parser("trace", help="per-degree trace of a graded series")
    common(p)
    p.add_argument("--degrees", type=_parse_int_list, default=[50, 100, 200, 400])
    p.add_argument("--tol-cdf", type=float, default=0.02)

    p = sub.add_parser("fujita", help="single-degree subalgebra volumes")
    common(p)
    p.add_argument("--degrees", type=_parse_int_list, default=[400])
    p.add_argument("--p", type=_parse_int_list, default=[2, 4, 8])
    p.add_argument("--tol-vol", type=float, default=0.03)

    p = sub.add_parser("truncation", help="finite-degree rank tail comparison")
    common(p)
    p.add_argument("--degrees", type=_parse_int_list, default=[400])
    p.add_argument("--p", type=_parse_int_list, default=[2])
    p.add_argument(
        "--xs", default="-1/2,0,1/2", help="comma-separated rational levels"
    )

    p = sub.add_parser("metric-compare", help="weight perturbation domination")
    common(p)
    p.add_argument("--degrees", type=_parse_int_list, default=[20, 40, 60])
    p.add_argument("--count", type=int, default=10)
    return parser


def _load_config(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    return cfg


def _model_spec(args, cfg) -> models.ModelSpec:
    if "model" in cfg:
        return models.ModelSpec.from_dict(cfg["model"])
    if not args.kind:
        raise ConfigError("no model given: use --kind or a config file")
    params = {}
    for item in args.param:
        if "=" not in item:
            raise ConfigError(f"bad --param {item!r}, expected KEY=VALUE")
        key, value = item.split("=", 1)
        try:
            params[key] = int(value)
        except ValueError:
            params[key] = _parse_fraction(value)
    if args.kind.startswith("random") and "seed" not in params:
        params["seed"] = args.seed
    return models.ModelSpec(args.kind, **params)


def _write(args, name: str, text: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, name)
    if not args.no_timestamp:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        if name.endswith(".json"):
            text = json.dumps({"generated_at": stamp}) + "\n" + text
        else:
            text = f"# generated_at {stamp}\n" + text
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def cmd_measure(args, cfg) -> int:
    spec = _model_spec(args, cfg)
    obj = models.build(spec)
    if isinstance(obj, FilteredSpace):
        nu = obj.measure_of()
    elif isinstance(obj, NormedLattice):
        nu = lattice.minimum_filtration(obj, args.budget_nodes).measure_of()
    else:
        n = max(args.degrees)
        nu = obj.measure(n)
    _write(args, "measure.json", nu.to_json() + "\n")
    _write(args, "measure.csv", nu.to_csv())
    return EXIT_OK


def cmd_lattice_audit(args, cfg) -> int:
    spec = None
    if "model" in cfg or args.kind:
        spec = _model_spec(args, cfg)
    results = []
    worst = EXIT_OK
    rng = random.Random(args.seed)
    for i in range(args.count):
        if spec is not None and spec.kind == "random_lattice":
            inst = models.build(
                models.ModelSpec("random_lattice", seed=rng.randrange(2**32),
                                 rank=spec.params.get("rank", args.rank),
                                 bound=spec.params.get("bound", args.bound))
            )
        elif spec is not None:
            inst = models.build(spec)
        else:
            inst = models.build(
                models.ModelSpec("random_lattice", seed=rng.randrange(2**32),
                                 rank=args.rank, bound=args.bound)
            )
        report = lattice.audit_inequalities(inst, budget=args.budget_nodes)
        results.append(
            {"instance": i, "entries": [e.to_dict() for e in report]}
        )
        if report.any_unverified:
            worst = max(worst, EXIT_BUDGET)
        elif not report.all_pass:
            worst = max(worst, EXIT_AUDIT)
    _write(args, "lattice_audit.json", json.dumps(results, indent=1) + "\n")
    return worst


def cmd_trace(args, cfg) -> int:
    spec = _model_spec(args, cfg)
    series = models.build(spec)
    reference = None
    try:
        reference = models.oracle(spec).get("reference_measure")
    except ValueError:
        pass
    trace = graded.asymptotic_trace(series, args.degrees, reference)
    _write(args, "trace.csv", trace.to_csv())
    if reference is not None:
        last = trace.records[-1]
        if last["cdf_distance_to_reference"] > args.tol_cdf:
            return EXIT_TOLERANCE
    return EXIT_OK


def cmd_fujita(args, cfg) -> int:
    spec = _model_spec(args, cfg)
    series = models.build(spec)
    result = graded.fujita_experiment(
        series, args.p, max(args.degrees), tol=args.tol_vol
    )
    _write(args, "fujita.json", json.dumps(result, indent=1) + "\n")
    baseline = result["baseline_vol_hat"]
    if abs(result["sup"] - baseline) > args.tol_vol * abs(baseline):
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_truncation(args, cfg) -> int:
    spec = _model_spec(args, cfg)
    series = models.build(spec)
    xs = [_parse_fraction(x) for x in args.xs.split(",")]
    degree = max(args.degrees)
    reports = {}
    worst = EXIT_OK
    for p in args.p:
        sub = series.generated_subalgebra(p)
        rep = graded.truncation_comparison(series, sub, xs, degree)
        reports[f"generated-p{p}"] = [e.to_dict() for e in rep]
        if not rep.all_pass:
            worst = EXIT_AUDIT
    rep = graded.truncation_comparison(
        series, series.effective_subseries(0), xs, degree
    )
    reports["effective"] = [e.to_dict() for e in rep]
    if not rep.all_pass:
        worst = EXIT_AUDIT
    _write(args, "truncation.json", json.dumps(reports, indent=1) + "\n")
    return worst


def cmd_metric_compare(args, cfg) -> int:
    spec = _model_spec(args, cfg)
    series = models.build(spec)
    rng = random.Random(args.seed)
    perturbations = []
    for _ in range(args.count):
        m = rng.choice(args.degrees)
        shift = Fraction(rng.randint(0, 6), rng.randint(1, 3))
        scale = Fraction(rng.randint(0, 2))
        perturbations.append(
            (m, lambda a, shift=shift, scale=scale: shift + scale * a[-1])
        )
    report = graded.metric_comparison_experiment(series, perturbations)
    _write(
        args,
        "metric_compare.json",
        json.dumps([e.to_dict() for e in report], indent=1) + "\n",
    )
    return EXIT_OK if report.all_pass else EXIT_AUDIT


COMMANDS = {
    "measure": cmd_measure,
    "lattice-audit": cmd_lattice_audit,
    "trace": cmd_trace,
    "fujita": cmd_fujita,
    "truncation": cmd_truncation,
    "metric-compare": cmd_metric_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BudgetExhausted, UnverifiedCertificate) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
