"""TOML scenarios: validation, dispatch to a pipeline, artifact writing."""

from __future__ import annotations

import json
import os
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from . import __version__
from . import criteria as cr
from .measure import Ball, QuadConfig
from .potential import PotentialError, PotentialSpec, resolve

SCENARIO_SCHEMA = "scenario/1"
SEED_ENV = "SPECTRALGATE_SEED"

# parameters accepted per proposition, with their validators
_POS = ("positive number", lambda v: isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0)
_NUM = ("number", lambda v: isinstance(v, (int, float)) and not isinstance(v, bool))
_INT = ("positive integer", lambda v: isinstance(v, int) and not isinstance(v, bool) and v > 0)
_POSLIST = ("non-empty list of positive numbers",
            lambda v: isinstance(v, list) and v and all(_POS[1](x) for x in v))
_INTLIST = ("non-empty list of integers >= 2",
            lambda v: isinstance(v, list) and v and all(isinstance(x, int) and x >= 2 for x in v))
_STR = ("string", lambda v: isinstance(v, str))
_UNIT = ("number in (0, 1)", lambda v: _NUM[1](v) and 0 < v < 1)

PARAMS = {
    "prop1": {"mu": _UNIT, "nu": _POS, "lambdas": _POSLIST},
    "prop6": {"m": _POS, "symbol": _STR, "lambdas": _POSLIST},
    "eq1_equiv": {"lambdas": _POSLIST},
    "remark2": {"lambda": _POS, "p": _POS, "radii": _POSLIST},
    "lemma3": {"lambdas": _POSLIST, "window_radius": _POS, "trials": _INT, "a_max": _POS},
    "lemma5": {"n": _INT, "trials": _INT, "p": _POS, "step": _POS},
    "theorem2": {"Ns": _INTLIST},
    "prop4": {"Ns": _INTLIST, "phi": _STR},
    "theta_criterion": {"Ns": _INTLIST, "Theta": _STR},
}
NEEDS_POTENTIAL = {"prop1", "prop6", "eq1_equiv", "remark2", "lemma3"}
USES_LATTICE = {"theorem2", "prop4", "theta_criterion"}
LATTICE_KEYS = {"d": _INT, "potential": _STR, "symbol": _STR, "shift": _NUM, "spacing": _POS}
TOP_KEYS = {"schema", "name", "proposition", "potential", "params", "quadrature", "spectral",
            "lattice", "output", "fixture", "run"}


class ScenarioError(ValueError):
    """Invalid scenario; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class Scenario:
    name: str
    proposition: str
    potential: PotentialSpec | None = None
    params: dict = field(default_factory=dict)
    quadrature: QuadConfig = field(default_factory=QuadConfig)
    spectral: cr.SpectralConfig = field(default_factory=cr.SpectralConfig)
    lattice: dict = field(default_factory=dict)
    output_dir: str | None = None
    fixture: dict = field(default_factory=dict)
    allow_inconclusive: bool = False
    source: str | None = None


def _check_keys(table: dict, allowed, path: str):
    for k in table:
        if k not in allowed:
            raise ScenarioError(f"{path}.{k}" if path else k, "unknown field")


def _table(raw, key):
    v = raw.get(key, {})
    if not isinstance(v, dict):
        raise ScenarioError(key, "must be a table")
    return v


def parse_scenario(raw: dict, source: str | None = None) -> Scenario:
    """Validate every field up front; raises :class:`ScenarioError`."""
    _check_keys(raw, TOP_KEYS, "")
    schema = raw.get("schema", SCENARIO_SCHEMA)
    if schema != SCENARIO_SCHEMA:
        raise ScenarioError("schema", f"expected {SCENARIO_SCHEMA!r}, got {schema!r}")
    prop = raw.get("proposition")
    if prop not in cr.PROPOSITIONS:
        raise ScenarioError("proposition", f"must be one of {', '.join(cr.PROPOSITIONS)}")
    name = raw.get("name", Path(source).stem if source else prop)
    if not isinstance(name, str) or not name:
        raise ScenarioError("name", "must be a non-empty string")

    pot = None
    ptab = _table(raw, "potential")
    if prop in NEEDS_POTENTIAL:
        _check_keys(ptab, {"expr", "dim", "clamp_max"}, "potential")
        if "expr" not in ptab or not isinstance(ptab["expr"], str):
            raise ScenarioError("potential.expr", "required string (builtin name or expression)")
        dim = ptab.get("dim")
        if dim is not None and not _INT[1](dim):
            raise ScenarioError("potential.dim", "must be a positive integer")
        try:
            pot = resolve(ptab["expr"], dim)
        except PotentialError as exc:
            raise ScenarioError("potential.expr", str(exc)) from exc
        if "clamp_max" in ptab:
            if not _POS[1](ptab["clamp_max"]):
                raise ScenarioError("potential.clamp_max", "must be a positive number")
            pot = PotentialSpec(pot.expr, float(ptab["clamp_max"]), pot.name, pot.notes)
    elif ptab:
        raise ScenarioError("potential", f"not used by {prop}")

    params = _table(raw, "params")
    for k, v in params.items():
        if k not in PARAMS[prop]:
            raise ScenarioError(f"params.{k}", f"unknown parameter for {prop}")
        what, ok = PARAMS[prop][k]
        if not ok(v):
            raise ScenarioError(f"params.{k}", f"must be a {what}")

    try:
        quad = QuadConfig.from_dict(_table(raw, "quadrature"))
        quad.resolved_method(1)
    except (TypeError, ValueError) as exc:
        raise ScenarioError("quadrature", str(exc)) from exc
    if not (isinstance(quad.samples, int) and quad.samples > 1):
        raise ScenarioError("quadrature.samples", "must be an integer > 1")
    if not isinstance(quad.seed, int):
        raise ScenarioError("quadrature.seed", "must be an integer")
    seed = os.environ.get(SEED_ENV)
    if seed is not None:
        try:
            quad = quad.with_(seed=int(seed))
        except ValueError as exc:
            raise ScenarioError(SEED_ENV, "must be an integer") from exc

    try:
        spec = cr.SpectralConfig.from_dict(_table(raw, "spectral"))
    except (TypeError, ValueError) as exc:
        raise ScenarioError("spectral", str(exc)) from exc
    if spec.h is not None and not _POS[1](spec.h):
        raise ScenarioError("spectral.h", "must be a positive number")
    if spec.Ls is not None and (len(spec.Ls) < 2 or list(spec.Ls) != sorted(set(spec.Ls))):
        raise ScenarioError("spectral.Ls", "must be at least two strictly increasing sizes")

    ltab = _table(raw, "lattice")
    if ltab and prop not in USES_LATTICE:
        raise ScenarioError("lattice", f"not used by {prop}")
    for k, v in ltab.items():
        if k not in LATTICE_KEYS:
            raise ScenarioError(f"lattice.{k}", "unknown field")
        what, ok = LATTICE_KEYS[k]
        if not ok(v):
            raise ScenarioError(f"lattice.{k}", f"must be a {what}")

    out = _table(raw, "output")
    _check_keys(out, {"dir"}, "output")
    fix = _table(raw, "fixture")
    _check_keys(fix, {"force_hypotheses", "force_spectral"}, "fixture")
    run = _table(raw, "run")
    _check_keys(run, {"allow_inconclusive"}, "run")
    if not isinstance(run.get("allow_inconclusive", False), bool):
        raise ScenarioError("run.allow_inconclusive", "must be a boolean")
    return Scenario(name, prop, pot, dict(params), quad, spec, dict(ltab), out.get("dir"),
                    dict(fix), bool(run.get("allow_inconclusive", False)), source)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(str(path), f"TOML parse error: {exc}") from exc
    except OSError as exc:
        raise ScenarioError(str(path), str(exc)) from exc
    return parse_scenario(raw, str(path))


def run_pipeline(sc: Scenario) -> cr.CriterionReport:
    p, q = sc.params, sc.quadrature
    prop = sc.proposition
    if prop == "prop1":
        return cr.check_prop1_pipeline(sc.potential, p.get("mu", 0.5), p.get("nu", 1.0),
                                       p.get("lambdas", cr.DEFAULT_LAMBDAS), sc.spectral, q,
                                       q.workers)
    if prop == "prop6":
        return cr.check_prop6_pipeline(p.get("m", 1.0), sc.potential, p.get("symbol", "power"),
                                       p.get("lambdas", cr.DEFAULT_LAMBDAS), sc.spectral, q,
                                       q.workers)
    if prop == "eq1_equiv":
        return cr.check_eq1_consistency(sc.potential, q, p.get("lambdas", cr.DEFAULT_LAMBDAS))
    if prop == "remark2":
        return cr.check_remark2(sc.potential, p.get("lambda", 1.0), p.get("p", 1.0),
                                p.get("radii", (32, 128, 512, 2048, 4096)), q)
    if prop == "lemma3":
        W = Ball(tuple([0.0] * sc.potential.dim), p.get("window_radius", 1.0))
        return cr.weakly_vanishing_test(sc.potential, p.get("lambdas", (0.1, 0.3)), W, q,
                                        p.get("trials", 20), q.seed, p.get("a_max", 50.0))
    if prop == "lemma5":
        return cr.check_lemma5(p.get("n", 1), p.get("trials", 20), p.get("p", 1.0), q.seed,
                               p.get("step"))
    Ns = tuple(p.get("Ns", (16, 32, 64)))
    if prop == "theorem2":
        return cr.check_theorem2(sc.lattice, Ns)
    if prop == "prop4":
        return cr.check_prop4_pipeline(sc.lattice, p.get("phi", "auto"), Ns)
    if prop == "theta_criterion":
        return cr.check_theta_criterion(sc.lattice, p.get("Theta", "potential"), Ns)
    raise ScenarioError("proposition", f"no pipeline for {prop}")


def _error_report(sc: Scenario, exc: Exception) -> cr.CriterionReport:
    return cr.CriterionReport(sc.proposition, {}, None, {"scenario": sc.name},
                              errors=[f"{type(exc).__name__}: {exc}"])


def exit_code(report: dict, allow_inconclusive: bool = False) -> int:
    """0 when consistent (or inconclusive and allowed), else 1."""
    if report.get("consistent"):
        return 0
    if allow_inconclusive and not report.get("errors"):
        verdicts = [v["verdict"] for v in report.get("hypothesis_verdicts", {}).values()]
        sv = report.get("spectral_verdict") or {}
        verdicts += [v for k, v in sv.items() if isinstance(v, str)] + list(sv.get("verdicts", []))
        if "inconclusive" in verdicts:
            return 0
    return 1


def run_scenario(sc: Scenario, out_dir=None) -> tuple[int, Path, dict]:
    """Compute, write report.json + run_meta.json, render artifacts; returns (exit, dir, report)."""
    from .report import render

    out = Path(out_dir or sc.output_dir or Path("out") / sc.name)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    try:
        rep = run_pipeline(sc)
        if sc.fixture:
            rep = cr.force_verdicts(rep, sc.fixture.get("force_hypotheses"),
                                    sc.fixture.get("force_spectral"))
    except Exception as exc:  # embedded in the report, artifacts still written
        rep = _error_report(sc, exc)
    rep.inputs = {**rep.inputs, "scenario": sc.name}
    d = rep.to_dict()
    (out / "report.json").write_text(json.dumps(d, sort_keys=True, indent=2) + "\n")
    meta = {"schema": "meta/1", "scenario": sc.name, "source": sc.source,
            "started": time.strftime("%Y-%m-%dT%H:%M:%S", time.localtime(t0)),
            "seconds": round(time.time() - t0, 3), "version": __version__,
            "python": platform.python_version(), "seed_override": os.environ.get(SEED_ENV)}
    (out / "run_meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    render(d, out)
    return exit_code(d, sc.allow_inconclusive), out, d
