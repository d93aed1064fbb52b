"""Command line: ``spectralgate <group> <command> ...``.

Exit codes: 0 ok, 1 inconsistency (or computation error), 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_INCONSISTENT, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _ladder(text: str):
    from .measure import LadderSpec

    try:
        a0, factor, count = text.split(":")
        return LadderSpec(float(a0), float(factor), int(count))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("ladder must look like a0:factor:count, e.g. 8:2:5") from exc


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spectralgate", description=__doc__.splitlines()[0])
    groups = p.add_subparsers(dest="group", metavar="{criteria,spectrum,lattice,measure,report}",
                              parser_class=_Parser)
    groups.required = True

    crit = groups.add_parser("criteria", help="run proposition scenarios").add_subparsers(
        dest="cmd", parser_class=_Parser)
    crit.required = True
    c = crit.add_parser("check", help="run one or more TOML scenarios")
    c.add_argument("scenarios", nargs="+", type=Path)
    c.add_argument("--out", type=Path, help="output directory (single scenario) or parent (batch)")
    c.add_argument("--workers", type=int, default=1, help="concurrent scenarios")
    c.add_argument("--allow-inconclusive", action="store_true")
    c.add_argument("--quiet", action="store_true")

    spec = groups.add_parser("spectrum", help="eigenvalue counting").add_subparsers(
        dest="cmd", parser_class=_Parser)
    spec.required = True
    s = spec.add_parser("count", help="counting ladder N_L(E)")
    s.add_argument("--potential", required=True)
    s.add_argument("--dim", type=int)
    s.add_argument("--E", type=_floats, required=True, help="energies, comma separated")
    s.add_argument("--Ls", type=_floats, required=True)
    s.add_argument("--h", type=float)
    s.add_argument("--operator", choices=("fd", "symbol"), default="fd")
    s.add_argument("--m", type=float, default=1.0)
    s.add_argument("--out", type=Path)

    latp = groups.add_parser("lattice", help="finite-group probes").add_subparsers(
        dest="cmd", parser_class=_Parser)
    latp.required = True
    v = latp.add_parser("verify", help="regularity / weak-decay sweep, or a lattice scenario")
    v.add_argument("scenario", nargs="?", type=Path)
    v.add_argument("--N", type=_ints, default=[16, 32, 64])
    v.add_argument("--d", type=int, default=1)
    v.add_argument("--potential", default="x0^4")
    v.add_argument("--symbol", default="laplacian")
    v.add_argument("--out", type=Path)

    meas = groups.add_parser("measure", help="sublevel measures").add_subparsers(
        dest="cmd", parser_class=_Parser)
    meas.required = True
    m = meas.add_parser("omega", help="omega_lambda(a) ladder as CSV")
    m.add_argument("--potential", required=True)
    m.add_argument("--dim", type=int)
    m.add_argument("--lambda", dest="lam", type=float, required=True)
    m.add_argument("--ladder", type=_ladder, default=None)
    m.add_argument("--direction", type=_floats)
    m.add_argument("--method", choices=("auto", "grid", "monte_carlo"), default="auto")
    m.add_argument("--samples", type=int, default=100_000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", type=Path)

    rep = groups.add_parser("report", help="re-render reports").add_subparsers(
        dest="cmd", parser_class=_Parser)
    rep.required = True
    r = rep.add_parser("render", help="tables, CSV and SVG from an existing report.json")
    r.add_argument("report", type=Path)
    r.add_argument("--out", type=Path)
    return p


def _write_or_print(text: str, out: Path | None, name: str):
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def cmd_criteria_check(args) -> int:
    from .scenario import ScenarioError, load_scenario, run_scenario

    try:
        scenarios = [load_scenario(p) for p in args.scenarios]
    except ScenarioError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.workers < 1:
        print("config error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    for sc in scenarios:
        sc.allow_inconclusive |= args.allow_inconclusive

    def one(sc):
        out = None
        if args.out is not None:
            out = args.out if len(scenarios) == 1 else args.out / sc.name
        return run_scenario(sc, out)

    if args.workers > 1 and len(scenarios) > 1:
        with ThreadPoolExecutor(args.workers) as ex:
            results = list(ex.map(one, scenarios))
    else:
        results = [one(sc) for sc in scenarios]
    code = EXIT_OK
    for sc, (rc, out, d) in zip(scenarios, results):
        if not args.quiet:
            print(f"{sc.name}: consistent={d['consistent']} exit={rc} -> {out}")
        code = max(code, rc)
    return code


def cmd_spectrum_count(args) -> int:
    from .criteria import SpectralConfig
    from .eigensolve import counting_ladders
    from .potential import resolve

    V = resolve(args.potential, args.dim)
    Ls, h = SpectralConfig(Ls=tuple(args.Ls), h=args.h).resolved(V.dim, args.operator)
    ladders = counting_ladders(V, args.E, Ls, h, args.operator, args.m)
    rows = ["E,L,count,verdict"]
    for lad in ladders:
        rows += [f"{lad.E:g},{L:g},{c},{lad.verdict}" for L, c in zip(lad.Ls, lad.counts)]
    _write_or_print("\n".join(rows) + "\n", args.out, "counting.csv")
    if args.out is not None:
        (args.out / "counting.json").write_text(
            json.dumps({"schema": "counting/1", "ladders": [l.to_dict() for l in ladders]},
                       sort_keys=True, indent=2) + "\n")
    for lad in ladders:
        print(f"E={lad.E:g}: {lad.verdict} (exponent {lad.exponent:.3f})", file=sys.stderr)
    return EXIT_OK


def cmd_lattice_verify(args) -> int:
    if args.scenario is not None:
        args.scenarios, args.workers, args.allow_inconclusive, args.quiet = [args.scenario], 1, False, False
        return cmd_criteria_check(args)
    from .criteria import lattice_probes
    from .lattice import LatticeModel, ProbeReport

    reports = []
    for N in args.N:
        model = LatticeModel(N=N, d=args.d, potential=args.potential, symbol=args.symbol)
        pr = lattice_probes(model)
        reports += [ProbeReport(N, args.d, "modulation", [1], [pr["modulation"]], "dense"),
                    ProbeReport(N, args.d, "translation", [1], [pr["translation"]], "dense"),
                    ProbeReport(N, args.d, "weak_translation", pr["weak_ladder"], pr["weak"], "dense")]
    text = json.dumps({"schema": "probes/1", "probes": [r.to_dict() for r in reports]},
                      sort_keys=True, indent=2) + "\n"
    _write_or_print(text, args.out, "probes.json")
    return EXIT_OK


def cmd_measure_omega(args) -> int:
    from .measure import LadderSpec, QuadConfig, omega_lambda
    from .potential import resolve

    V = resolve(args.potential, args.dim)
    ladder = args.ladder or LadderSpec()
    cfg = QuadConfig(method=args.method, samples=args.samples, seed=args.seed, ladder=ladder)
    d = np.zeros(V.dim)
    if args.direction:
        d = np.asarray(args.direction, float)
        if d.shape != (V.dim,) or not np.linalg.norm(d) > 0:
            print(f"config error: --direction needs {V.dim} components", file=sys.stderr)
            return EXIT_USAGE
        d /= np.linalg.norm(d)
    else:
        d[0] = 1.0
    rows = ["a,value,stderr,method"]
    for a in ladder.radii():
        est = omega_lambda(V, a * d, args.lam, cfg)
        rows.append(f"{a:g},{est.value:.10g},{est.stderr:.3g},{est.method}")
    _write_or_print("\n".join(rows) + "\n", args.out, "omega.csv")
    return EXIT_OK


def cmd_report_render(args) -> int:
    from .report import load_report, render, table

    try:
        d = load_report(args.report)
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    render(d, args.out or args.report.parent)
    sys.stdout.write(table(d))
    return EXIT_OK


COMMANDS = {("criteria", "check"): cmd_criteria_check, ("spectrum", "count"): cmd_spectrum_count,
            ("lattice", "verify"): cmd_lattice_verify, ("measure", "omega"): cmd_measure_omega,
            ("report", "render"): cmd_report_render}


def main(argv=None) -> int:
    from .potential import PotentialError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[(args.group, args.cmd)](args)
    except (PotentialError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
