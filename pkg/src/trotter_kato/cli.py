"""Command line entry point: ``trotter-kato run|sweep|kato-check|kato-build``.

Exit codes: 0 success, 1 validation failure, 2 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness, kato
from .errors import ConfigParse, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _read_json(path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParse(exc.msg, f"line {exc.lineno}") from exc


def parse_kato_shorthand(text: str) -> dict:
    """``exp``, ``rp2`` / ``resolvent_power:2``, ``single_pair:eta,alpha``,
    ``atomic_exp:s,alpha`` or a literal JSON descriptor."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigParse(exc.msg, "kato descriptor") from exc
    name, _, args = text.partition(":")
    try:
        vals = [float(a) for a in args.split(",") if a]
    except ValueError:
        raise ConfigParse(f"non-numeric parameters in {text!r}", "kato descriptor") from None
    if name == "exp":
        return {"variant": "exp"}
    if name.startswith("rp") and name[2:].isdigit():
        return {"variant": "resolvent_power", "k": int(name[2:])}
    if name == "resolvent_power":
        return {"variant": "resolvent_power", "k": int(vals[0]) if vals else 1}
    if name == "single_pair" and vals:
        return {"variant": "single_pair", "eta": vals[0],
                "alpha": vals[1] if len(vals) > 1 else 0.0}
    if name == "atomic_exp" and vals:
        return {"variant": "atomic_exp", "s": vals[0],
                "alpha": vals[1] if len(vals) > 1 else 0.0}
    raise ConfigParse(f"cannot parse Kato function {text!r}", "kato descriptor")


def _sweep_scenario(args) -> harness.Scenario:
    scheme = {"variant": args.scheme}
    if args.scheme in ("kato_product", "kato_symmetrized", "cachia_average"):
        scheme["f"] = parse_kato_shorthand(args.f)
        scheme["g"] = parse_kato_shorthand(args.g)
    if args.scheme == "lapidus_resolvent":
        scheme["k"] = args.k
    if args.n_max < 1:
        raise ConfigParse("must be >= 1", "--n-max")
    ns = []
    n = 1
    while n <= args.n_max:
        ns.append(n)
        n *= 2
    metric = {"kind": args.metric}
    if args.metric == "measure":
        metric["eta"] = args.eta
    obj = {
        "schema": harness.SCHEMA_VERSION,
        "operator_source": {"kind": "random_psd", "dim": args.dim, "seed": args.seed,
                            "spectral_scale": args.spectral_scale},
        "schemes": [scheme],
        "n_values": ns,
        "T": args.T,
        "h": {"kind": "random", "seed": args.seed},
        "metrics": [metric],
        "output": args.output,
    }
    if args.scheme == "zeno":
        obj["projection"] = {"rank": args.rank or max(1, args.dim // 2), "seed": args.seed}
    return harness.Scenario.from_json(obj)


def _execute(scenario, args, base_dir=None):
    record = harness.run(scenario, base_dir=base_dir, threads=args.threads)
    paths = harness.emit(record, args.output or scenario.output, force=args.force)
    if not args.quiet:
        sys.stdout.write(record.to_csv())
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK


def cmd_run(args):
    path = Path(args.scenario)
    scenario = harness.load_scenario(path)
    return _execute(scenario, args, base_dir=path.parent)


def cmd_sweep(args):
    return _execute(_sweep_scenario(args), args)


def cmd_kato_check(args):
    f = kato.kato_from_json(_read_json(args.function))
    report = kato.check_kato_axioms(f)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        for r in report.results:
            status = "pass" if r.passed else "FAIL"
            print(f"({r.axiom}) {status}  value={r.value!r}  {r.message}")
        print(f"{report.function}: {'all axioms pass' if report.passed else 'rejected'}")
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_kato_build(args):
    obj = _read_json(args.descriptor)
    zeros, measure = kato.canonical_parts_from_json(obj)
    data = kato.build_canonical(zeros, measure)
    print(f"alpha = {data.alpha:.17g}")
    print(f"kappa = {data.kappa:.17g}")
    print(f"beta  = {data.beta:.17g}")
    print(f"sum   = {data.alpha + data.kappa + data.beta:.17g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trotter-kato",
                                description="Trotter and Trotter-Kato product formula experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    def output_flags(sp, default_output):
        sp.add_argument("--output", default=default_output,
                        help="output prefix for <prefix>.report.csv/json")
        sp.add_argument("--force", action="store_true", help="overwrite existing reports")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--quiet", action="store_true", help="do not echo the CSV")

    r = sub.add_parser("run", help="run a scenario JSON file")
    r.add_argument("scenario")
    output_flags(r, None)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="sweep n = 1, 2, 4, ... on a random PSD pair")
    s.add_argument("--dim", type=int, default=8)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--spectral-scale", type=float, default=1.0)
    s.add_argument("--scheme", default="trotter_plain")
    s.add_argument("--f", default="exp", help="Kato function f (shorthand or JSON)")
    s.add_argument("--g", default="exp", help="Kato function g (shorthand or JSON)")
    s.add_argument("--k", type=int, default=1, help="lapidus_resolvent order")
    s.add_argument("--rank", type=int, default=None, help="Zeno projection rank")
    s.add_argument("--n-max", type=int, default=256)
    s.add_argument("--T", type=float, default=1.0)
    s.add_argument("--metric", default="l2")
    s.add_argument("--eta", type=float, default=1e-3)
    output_flags(s, "sweep")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("kato-check", help="check the Kato axioms for a function descriptor")
    c.add_argument("function")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_kato_check)

    b = sub.add_parser("kato-build", help="build the canonical form from zeros and a measure")
    b.add_argument("descriptor")
    b.set_defaults(func=cmd_kato_build)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
