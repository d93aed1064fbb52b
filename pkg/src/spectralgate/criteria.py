"""End-to-end pipelines binding hypothesis checks and spectral evidence.

Each pipeline returns a :class:`CriterionReport`.  Its ``consistent`` flag is
recomputed from the serialised verdict fields by :func:`derive_consistency`,
so a report read back from JSON can be re-checked without recomputation.

``consistent`` means no implication of the underlying statement is violated
by the evidence.  When the hypotheses fail the statement claims nothing and
the report is consistent; a few pipelines additionally claim a contrapositive
behaviour (growth of the counting function) and test it.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import lattice as lat
from .continuum import BoxGrid, form_bound_check, sample_potential
from .eigensolve import box_operator, counting_ladders, smallest_eigs
from .measure import (Ball, QuadConfig, certified_covering, direction_ladders,
                      directions_for, ladder_verdict, lemma5_check, omega_p_ladder,
                      superlevel_measure, window_integral, wv_sandwich_check)
from .potential import PotentialSpec, resolve

SCHEMA = "cr/1"
PROPOSITIONS = ("prop1", "eq1_equiv", "remark2", "lemma3", "lemma5", "theorem2", "prop4",
                "prop6", "theta_criterion")
DEFAULT_LAMBDAS = (0.5, 1.0, 2.0, 1000.0)


def _spec(V, dim=None) -> PotentialSpec:
    return V if isinstance(V, PotentialSpec) else resolve(V, dim)


def _fanout(jobs, workers):
    if workers <= 1:
        return [j() for j in jobs]
    with ThreadPoolExecutor(workers) as ex:
        return list(ex.map(lambda j: j(), jobs))


# --- report --------------------------------------------------------------------

@dataclass
class CriterionReport:
    proposition: str
    hypothesis_verdicts: dict  # name -> {"verdict": ..., "evidence": ...}
    spectral_verdict: dict | None
    inputs: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def __post_init__(self):
        if self.proposition not in PROPOSITIONS:
            raise ValueError(f"unknown proposition {self.proposition!r}")

    @property
    def consistent(self) -> bool:
        return derive_consistency(self.to_dict(with_flag=False))[0]

    @property
    def rule(self) -> str:
        return derive_consistency(self.to_dict(with_flag=False))[1]

    def verdict(self, name: str) -> str:
        return self.hypothesis_verdicts[name]["verdict"]

    def to_dict(self, with_flag: bool = True) -> dict:
        d = {"schema": SCHEMA, "proposition": self.proposition,
             "hypothesis_verdicts": self.hypothesis_verdicts,
             "spectral_verdict": self.spectral_verdict, "inputs": self.inputs,
             "notes": list(self.notes), "errors": list(self.errors)}
        if with_flag:
            ok, rule = derive_consistency(d)
            d["consistent"], d["rule"] = ok, rule
        return _jsonable(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "CriterionReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(d["proposition"], d["hypothesis_verdicts"], d.get("spectral_verdict"),
                   d.get("inputs", {}), d.get("notes", []), d.get("errors", []))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if hasattr(x, "to_dict"):
        return _jsonable(x.to_dict())
    return x


def _hv(verdict: str, **evidence) -> dict:
    return {"verdict": verdict, "evidence": evidence}


def derive_consistency(d: dict) -> tuple[bool, str]:
    """(consistent, rule) from the verdict fields of a serialised report."""
    prop = d["proposition"]
    hv = {k: v["verdict"] for k, v in d["hypothesis_verdicts"].items()}
    sv = d.get("spectral_verdict") or {}
    all_hold = bool(hv) and all(v == "holds" for v in hv.values())
    if d.get("errors"):
        return False, "computation error"
    if prop in ("prop1", "prop6"):
        verdicts = sv.get("verdicts", [])
        if all_hold:
            ok = bool(verdicts) and all(v == "stabilizes" for v in verdicts)
            return ok, "hypotheses hold => counts stabilize at every E"
        if hv.get("condition_i") == "fails" and sv.get("bounded_nonneg"):
            return "grows" in verdicts, "condition (i) fails for bounded V >= 0 => counts grow at some E"
        return True, "hypotheses not all hold: no claim"
    if prop == "eq1_equiv":
        a, b = hv["condition_i"], hv["eq1"]
        return a == b and a in ("holds", "fails"), "condition (i) <=> weak-vanishing integral decay"
    if prop == "remark2":
        if hv["omega_p_integral"] == "holds":
            return sv.get("verdict") == "holds", "integral converges => condition (i) at the same level"
        return True, "integral does not converge: no claim"
    if prop == "lemma3":
        a, b = hv["window_decay"], hv["superlevel_decay"]
        return (hv["sandwich"] == "holds" and a == b and a in ("holds", "fails"),
                "sandwich bounds hold and window decay <=> superlevel decay")
    if prop == "lemma5":
        return all_hold, "certified covering and zero lower-bound violations"
    if prop == "theorem2":
        if all_hold:
            w, c = sv.get("weak_decay"), sv.get("compactness_proxy")
            ok = w in ("decays", "constant") and c in ("compact", "not_compact") and \
                (w == "decays") == (c == "compact")
            return ok, "regularity holds => (weak decay <=> compactness proxy)"
        return True, "regularity fails: no claim"
    if prop == "prop4":
        if all_hold:
            return sv.get("verdict") == "decays", "hypotheses hold => weak translation decay"
        return True, "hypotheses not all hold: no claim"
    if prop == "theta_criterion":
        if all_hold:
            return sv.get("verdict") == "compact", "H >= Theta(Q), Theta -> inf => compactness proxy"
        return True, "hypotheses not all hold: no claim"
    raise ValueError(f"unknown proposition {prop!r}")


def force_verdicts(report: CriterionReport, hypotheses: str | None = None,
                   spectral: str | None = None) -> CriterionReport:
    """Copy of ``report`` with verdicts overridden; used for contradiction fixtures."""
    hv = {k: dict(v) for k, v in report.hypothesis_verdicts.items()}
    if hypotheses is not None:
        for v in hv.values():
            v["verdict"] = hypotheses
    sv = dict(report.spectral_verdict or {})
    if spectral is not None:
        if "verdicts" in sv:
            sv["verdicts"] = [spectral] * max(1, len(sv["verdicts"]))
        else:
            sv["verdict"] = spectral
    notes = list(report.notes) + [f"verdicts forced: hypotheses={hypotheses}, spectral={spectral}"]
    return replace(report, hypothesis_verdicts=hv, spectral_verdict=sv, notes=notes)


# --- measure-side checks ---------------------------------------------------------

def _combine(verdicts) -> str:
    """holds iff all decaying; fails if any not_decaying; else inconclusive."""
    verdicts = list(verdicts)
    if all(v == "decaying" for v in verdicts):
        return "holds"
    if any(v == "not_decaying" for v in verdicts):
        return "fails"
    return "inconclusive"


def _ladders(V, lams, cfg, weak):
    rows = []
    for d in directions_for(V.dim, cfg):
        om, wk = direction_ladders(V, d, lams, cfg, weak)
        rows.append((d, om, wk))
    return rows


def _condition_i_from(rows, lams):
    ev = {str(lam): [{"direction": d.tolist(), **om[float(lam)].to_dict()} for d, om, _ in rows]
          for lam in lams}
    v = _combine(om[float(lam)].verdict for _, om, _ in rows for lam in lams)
    return _hv(v, ladders=ev)


def _eq1_from(rows):
    ev = [{"direction": d.tolist(), **wk.to_dict()} for d, _, wk in rows]
    return _hv(_combine(wk.verdict for _, _, wk in rows), ladders=ev)


def check_condition_i(V, lambdas=DEFAULT_LAMBDAS, cfg: QuadConfig | None = None) -> dict:
    """Decay of omega_lambda(a) along every sampled direction, for every lambda."""
    V = _spec(V)
    cfg = cfg or QuadConfig()
    lams = [float(x) for x in lambdas]
    if not lams or any(x <= 0 for x in lams):
        raise ValueError("lambdas must be positive")
    return _condition_i_from(_ladders(V, lams, cfg, weak=False), lams)


def check_eq1(V, cfg: QuadConfig | None = None) -> dict:
    V = _spec(V)
    return _eq1_from(_ladders(V, [], cfg or QuadConfig(), weak=True))


def _refined(cfg: QuadConfig, factor: int) -> QuadConfig:
    step = cfg.step / 2 if cfg.step is not None else None
    return cfg.with_(samples=int(cfg.samples * factor), step=step)


def check_eq1_consistency(V, cfg: QuadConfig | None = None,
                          lambdas=DEFAULT_LAMBDAS) -> CriterionReport:
    """Run condition (i) and the 1/(1+V+) decay test; they should agree.

    When either side is inconclusive the pair is rerun once with 4x the
    Monte Carlo samples (half the grid step).
    """
    V = _spec(V)
    cfg = cfg or QuadConfig()
    lams = [float(x) for x in lambdas]
    notes = []
    rows = _ladders(V, lams, cfg, weak=True)
    ci, e1 = _condition_i_from(rows, lams), _eq1_from(rows)
    if "inconclusive" in (ci["verdict"], e1["verdict"]):
        notes.append("inconclusive on first pass; rerun at 4x samples")
        cfg = _refined(cfg, 4)
        rows = _ladders(V, lams, cfg, weak=True)
        ci, e1 = _condition_i_from(rows, lams), _eq1_from(rows)
    inputs = {"potential": V.to_dict(), "lambdas": lams, "quadrature": cfg.to_dict()}
    return CriterionReport("eq1_equiv", {"condition_i": ci, "eq1": e1}, None, inputs, notes)


def check_remark2(V, lam: float = 1.0, p: float = 1.0, radii=(32, 128, 512, 2048, 4096),
                  cfg: QuadConfig | None = None) -> CriterionReport:
    """Convergence of the omega^p integral, then condition (i) at the same level."""
    V = _spec(V)
    if not p > 0:
        raise ValueError("p must be positive")
    cfg = cfg or QuadConfig()
    lad = omega_p_ladder(V, lam, p, radii, cfg)
    hyp = {"converges": "holds", "diverges": "fails"}.get(lad.verdict, "inconclusive")
    ci = check_condition_i(V, [lam], cfg)
    inputs = {"potential": V.to_dict(), "lambda": lam, "p": p, "radii": list(radii),
              "quadrature": cfg.to_dict()}
    return CriterionReport("remark2", {"omega_p_integral": _hv(hyp, ladder=lad.to_dict())},
                           {"kind": "condition_i", **ci}, inputs)


def weakly_vanishing_test(phi, lams=(0.1, 0.3), W: Ball | None = None, cfg: QuadConfig | None = None,
                          trials: int = 20, seed: int = 0, a_max: float = 50.0) -> CriterionReport:
    """Both directions of the window-average / superlevel-measure equivalence.

    ``phi`` is a bounded nonnegative expression; the sandwich bounds are
    checked at ``trials`` random centres with ``|a| <= a_max``.
    """
    phi = _spec(phi)
    W = W or Ball(tuple([0.0] * phi.dim), 1.0)
    cfg = cfg or QuadConfig()
    dirs = directions_for(phi.dim, cfg)
    win = [ladder_verdict(lambda f, a, c: window_integral(f, a, W, c), phi, d, cfg) for d in dirs]
    sup = [ladder_verdict(lambda f, a, c, lam=lam: superlevel_measure(f, a, lam, W, c), phi, d, cfg)
           for lam in lams for d in dirs]
    rng = np.random.default_rng(seed)
    sand = []
    for _ in range(trials):
        u = rng.standard_normal(phi.dim)
        a = u / np.linalg.norm(u) * a_max * rng.random() ** (1 / phi.dim)
        lam = float(rng.choice(lams))
        r = wv_sandwich_check(phi, a, lam, W, cfg)
        sand.append({"a": a.tolist(), "lambda": lam, "ok": r.ok, "lower": r.lower,
                     "middle": r.middle, "upper": r.upper, "tol": r.tol})
    hyps = {
        "window_decay": _hv(_combine(v.verdict for v in win), ladders=[v.to_dict() for v in win]),
        "superlevel_decay": _hv(_combine(v.verdict for v in sup), ladders=[v.to_dict() for v in sup]),
        "sandwich": _hv("holds" if all(s["ok"] for s in sand) else "fails", trials=sand),
    }
    inputs = {"phi": phi.to_dict(), "lambdas": list(lams), "window": [list(W.center), W.radius],
              "quadrature": cfg.to_dict()}
    return CriterionReport("lemma3", hyps, None, inputs)


def random_union_mask(rng, n: int, step: float, half: float, blobs: int) -> np.ndarray:
    """Boolean cell grid on [-half, half]^n: union of random balls."""
    size = int(round(2 * half / step))
    ax = (np.arange(size) - size / 2 + 0.5) * step
    mesh = np.meshgrid(*([ax] * n), indexing="ij")
    mask = np.zeros(mesh[0].shape, bool)
    for _ in range(blobs):
        c = rng.uniform(-0.7 * half, 0.7 * half, n)
        r = rng.uniform(0.05, 1.5)
        mask |= sum((g - ci) ** 2 for g, ci in zip(mesh, c)) <= r * r
    return mask


def check_lemma5(n: int = 1, trials: int = 20, p: float = 1.0, seed: int = 0,
                 step: float | None = None) -> CriterionReport:
    """Certified covering plus the lower bound on randomised discretised sets."""
    try:
        C, nu = certified_covering(n)
        cov = _hv("holds", nu=nu, centers=np.asarray(C).tolist())
    except RuntimeError as exc:
        return CriterionReport("lemma5", {"covering_certified": _hv("fails", error=str(exc))}, None,
                               {"n": n})
    step = step or (1 / 64 if n == 1 else 1 / 16)
    half = 8.0 if n == 1 else 5.0
    rng = np.random.default_rng(seed)
    rows, bad = [], 0
    for _ in range(trials):
        mask = random_union_mask(rng, n, step, half, int(rng.integers(1, 6)))
        u = rng.standard_normal(n)
        a = u / np.linalg.norm(u) * rng.uniform(1.0, half - 1.5)
        chk = lemma5_check(mask, step, a, p, nu)
        bad += not chk.ok
        rows.append({"a": a.tolist(), "omega_a": chk.omega_a, "bound": chk.bound,
                     "integral": chk.integral, "R": chk.R, "ok": chk.ok})
    hyps = {"covering_certified": cov,
            "lower_bound": _hv("holds" if bad == 0 else "fails", violations=bad, trials=rows)}
    return CriterionReport("lemma5", hyps, None, {"n": n, "p": p, "trials": trials, "seed": seed,
                                                  "step": step})


# --- continuum spectral pipelines ---------------------------------------------------

@dataclass(frozen=True)
class SpectralConfig:
    Ls: tuple | None = None
    h: float | None = None
    Es: tuple | None = None
    n_E: int = 5
    m: float = 1.0

    def resolved(self, dim: int, operator: str) -> tuple[tuple, float]:
        if operator == "fd":
            Ls, h = ((5, 10, 20, 40), 0.05) if dim == 1 else ((4, 8, 12, 16), 0.1)
        else:
            Ls, h = ((5, 10, 20, 40), 0.1) if dim == 1 else ((3, 6, 9, 12), 0.5)
        return tuple(float(x) for x in (self.Ls or Ls)), float(self.h or h)

    def to_dict(self) -> dict:
        return {"Ls": None if self.Ls is None else list(self.Ls), "h": self.h,
                "Es": None if self.Es is None else list(self.Es), "n_E": self.n_E, "m": self.m}

    @classmethod
    def from_dict(cls, d: dict | None) -> "SpectralConfig":
        d = dict(d or {})
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown spectral fields: {sorted(unknown)}")
        for k in ("Ls", "Es"):
            if d.get(k) is not None:
                d[k] = tuple(float(x) for x in d[k])
        return cls(**d)


def energy_battery(V: PotentialSpec, L: float, h: float, n_E: int = 5,
                   operator: str = "fd", m: float = 1.0) -> list[float]:
    """n_E energies spread over [l1 + gap/4, l1 + 4 gap] on the smallest box."""
    H = box_operator(V, L, h, operator, m)
    lo = smallest_eigs(H, 2).values
    gap = max(float(lo[1] - lo[0]), 1e-6)
    return np.linspace(lo[0] + gap / 4, lo[0] + 4 * gap, n_E).tolist()


def _boundedness(V, Ls, h, boundary):
    """(V >= 0 and bounded on the ladder, sup estimate) from samples on the two largest boxes."""
    tops, lows = [], []
    for L in Ls[-2:]:
        v = sample_potential(V, BoxGrid(L, h, V.dim, boundary))
        tops.append(float(v.max()))
        lows.append(float(v.min()))
    nonneg = min(lows) >= 0
    bounded = tops[-1] <= tops[0] * (1 + 1e-9) + 1e-12
    return nonneg and bounded, tops[-1]


def _spectral_section(V, Ls, h, cfg: SpectralConfig, operator, include_hi, sup):
    Es = list(cfg.Es) if cfg.Es else energy_battery(V, Ls[0], h, cfg.n_E, operator, cfg.m)
    if include_hi:
        Es.append(1.5 * sup + 1.0)
    ladders = counting_ladders(V, Es, Ls, h, operator, cfg.m)
    return {"kind": "counting", "operator": operator, "Es": Es,
            "verdicts": [c.verdict for c in ladders], "ladders": [c.to_dict() for c in ladders]}


def _form_bound_ladder(V, mu, nu, Ls, h):
    rows = []
    for L in Ls:
        r = form_bound_check(V, mu, nu, BoxGrid(L, h, V.dim))
        rows.append({"L": L, "min_eigenvalue": r.min_eigenvalue, "verdict": r.verdict})
    return _hv("holds" if all(r["verdict"] == "holds" for r in rows) else "fails", ladder=rows,
               mu=mu, nu=nu)


def check_prop1_pipeline(V, mu: float = 0.5, nu: float = 1.0, lambdas=DEFAULT_LAMBDAS,
                         spectral: SpectralConfig | None = None, cfg: QuadConfig | None = None,
                         workers: int = 1) -> CriterionReport:
    """Condition (i), the form bound on V-, and counting ladders of Delta + V."""
    V = _spec(V)
    if not 0 < mu < 1:
        raise ValueError("mu must lie in (0, 1)")
    spectral = spectral or SpectralConfig()
    Ls, h = spectral.resolved(V.dim, "fd")
    ci, fb = _fanout([lambda: check_condition_i(V, lambdas, cfg),
                      lambda: _form_bound_ladder(V, mu, nu, Ls, h)], workers)
    bnn, sup = _boundedness(V, Ls, h, "dirichlet")
    sv = _spectral_section(V, Ls, h, spectral, "fd", ci["verdict"] == "fails" and bnn, sup)
    sv["bounded_nonneg"] = bnn
    inputs = {"potential": V.to_dict(), "mu": mu, "nu": nu, "lambdas": list(lambdas),
              "spectral": {**spectral.to_dict(), "Ls": list(Ls), "h": h},
              "quadrature": (cfg or QuadConfig()).to_dict()}
    return CriterionReport("prop1", {"condition_i": ci, "form_bound": fb}, sv, inputs)


def check_prop6_pipeline(m: float, V, symbol: str = "power", lambdas=DEFAULT_LAMBDAS,
                         spectral: SpectralConfig | None = None, cfg: QuadConfig | None = None,
                         workers: int = 1) -> CriterionReport:
    """Condition (i) on V >= 0 and counting ladders of |P|^{2m} + V on periodic boxes."""
    V = _spec(V)
    if not m > 0:
        raise ValueError("m must be positive")
    if symbol != "power":
        raise ValueError("only the power symbol |p|^{2m} is supported in this pipeline")
    spectral = replace(spectral or SpectralConfig(), m=m)
    Ls, h = spectral.resolved(V.dim, "symbol")
    bnn, sup = _boundedness(V, Ls, h, "periodic")
    vmin = min(float(sample_potential(V, BoxGrid(L, h, V.dim, "periodic")).min()) for L in Ls)
    if vmin < 0:
        raise ValueError("this pipeline needs V >= 0")
    ci = check_condition_i(V, lambdas, cfg)
    ell = _hv("holds", symbol=f"|p|^{2 * m:g}", constants=[1.0, 1.0])
    sv = _spectral_section(V, Ls, h, spectral, "symbol", ci["verdict"] == "fails" and bnn, sup)
    sv["bounded_nonneg"] = bnn
    inputs = {"potential": V.to_dict(), "m": m, "symbol": symbol, "lambdas": list(lambdas),
              "spectral": {**spectral.to_dict(), "Ls": list(Ls), "h": h},
              "quadrature": (cfg or QuadConfig()).to_dict()}
    return CriterionReport("prop6", {"condition_i": ci, "symbol_elliptic": ell}, sv, inputs)


# --- lattice pipelines --------------------------------------------------------------

def _unit(d):
    e = np.zeros(d, dtype=int)
    e[0] = 1
    return e


def monotone_decreasing(values) -> bool:
    v = np.asarray(values, float)
    return bool(np.all(np.diff(v) < 0))


def weak_trend(ladders, drop: float = 10.0) -> str:
    """decays | constant | inconclusive from the weak ladders of an N-sequence.

    ``constant`` when every ladder is flat in a; ``decays`` when the terminal
    values fall monotonically by at least ``drop`` across N.
    """
    if all(np.ptp(w) <= 1e-9 * max(1.0, float(np.max(np.abs(w)))) for w in ladders):
        return "constant"
    t = np.asarray([w[-1] for w in ladders], float)
    if monotone_decreasing(t) and t[-1] * drop <= t[0]:
        return "decays"
    return "inconclusive"


def weak_ladder_points(N: int) -> list[int]:
    return sorted({max(1, (j * N) // 8) for j in (1, 2, 3, 4)})


def lattice_probes(model: lat.LatticeModel) -> dict:
    """Regularity norms at the smallest (k, a), weak ladder and resolvent spectrum."""
    H = model.hamiltonian()
    ev = lat.eigvalsh(H)
    if np.min(np.abs(ev)) < 1e-8:
        raise lat.SpectrumError("H is not invertible (eigenvalue within 1e-8 of 0)")
    R = lat.resolvent(H, 0.0)
    e = _unit(model.d)
    ladder = weak_ladder_points(model.N)
    weak = lat.weak_translation_decay(R, [a * e for a in ladder], model.battery())
    return {"N": model.N, "modulation": lat.modulation_regularity_norm(R, e),
            "translation": lat.translation_regularity_norm(R, e), "weak_ladder": ladder,
            "weak": weak.tolist(), "eigenvalues": ev, "R": R, "H": H}


def resolvent_count(eigenvalues, cutoff: float = 3.0) -> int:
    """#{eigenvalues of H <= 1 + cutoff}: the compactness proxy count."""
    return int(np.sum(np.asarray(eigenvalues) <= 1.0 + cutoff))


def compactness_proxy(counts) -> str:
    c = list(counts)
    if len(set(c[-2:])) == 1:
        return "compact"
    if all(b > a for a, b in zip(c, c[1:])):
        return "not_compact"
    return "inconclusive"


def _model_rows(model_kw: dict, Ns):
    out = []
    for N in Ns:
        model = lat.LatticeModel(N=int(N), **model_kw)
        out.append((model, lattice_probes(model)))
    return out


def _probe_evidence(rows):
    return [{k: v for k, v in p.items() if k not in ("R", "H", "eigenvalues")} for _, p in rows]


def check_theorem2(model_kw: dict | None = None, Ns=(16, 32, 64)) -> CriterionReport:
    """Eq. (2) regularity trends versus weak translation decay and a compactness proxy."""
    model_kw = dict(model_kw or {})
    rows = _model_rows(model_kw, Ns)
    mod = [p["modulation"] for _, p in rows]
    tr = [p["translation"] for _, p in rows]
    hyps = {"eq2_modulation": _hv("holds" if monotone_decreasing(mod) else "fails", values=mod, Ns=list(Ns)),
            "eq2_translation": _hv("holds" if monotone_decreasing(tr) else "fails", values=tr, Ns=list(Ns))}
    counts = [resolvent_count(p["eigenvalues"]) for _, p in rows]
    sv = {"kind": "lattice", "weak_decay": weak_trend([p["weak"] for _, p in rows]),
          "compactness_proxy": compactness_proxy(counts), "proxy_counts": counts,
          "probes": _probe_evidence(rows)}
    return CriterionReport("theorem2", hyps, sv, {"model": model_kw, "Ns": list(Ns)})


def _phi_values(model, phi):
    if phi in (None, "auto"):
        return 1.0 / (1.0 + model.potential_values())
    spec = _spec(phi, model.d)
    return spec.sample(model.positions())


def window_average_terminal(model, phi_vals) -> float:
    """Mean of phi over the unit physical window around the farthest point of the box."""
    x = model.positions()
    far = np.full(model.d, -model.N / 2) * model.dx
    diff = x - far
    L = model.N * model.dx
    diff = np.mod(diff + L / 2, L) - L / 2
    win = np.linalg.norm(diff, axis=1) <= 1.0
    return float(phi_vals[win].mean())


def check_prop4_pipeline(model_kw: dict | None = None, phi="auto", Ns=(16, 32, 64)) -> CriterionReport:
    """Regularity, +-H^{-1} <= phi(Q), weak vanishing of phi, then weak decay of H^{-1}."""
    model_kw = dict(model_kw or {})
    rows = _model_rows(model_kw, Ns)
    mod = [p["modulation"] for _, p in rows]
    tr = [p["translation"] for _, p in rows]
    reg = monotone_decreasing(mod) and monotone_decreasing(tr)
    ineq, win = [], []
    for model, p in rows:
        ph = _phi_values(model, phi)
        if np.any(ph < 0):
            raise ValueError("phi must be nonnegative")
        Phi = lat.position_op(model.group, ph)
        up = lat.operator_inequality_check(p["R"], Phi)
        dn = lat.operator_inequality_check(-p["R"], Phi)
        ineq.append({"N": model.N, "upper": up.min_eigenvalue, "lower": dn.min_eigenvalue,
                     "holds": up.holds and dn.holds})
        win.append(window_average_terminal(model, ph))
    wv = monotone_decreasing(win) and win[-1] < 0.2 * win[0]
    hyps = {"regularity": _hv("holds" if reg else "fails", modulation=mod, translation=tr),
            "inequality": _hv("holds" if all(r["holds"] for r in ineq) else "fails", checks=ineq),
            "phi_weakly_vanishing": _hv("holds" if wv else "fails", window_averages=win)}
    sv = {"kind": "lattice", "verdict": weak_trend([p["weak"] for _, p in rows]),
          "probes": _probe_evidence(rows)}
    return CriterionReport("prop4", hyps, sv, {"model": model_kw, "phi": str(phi), "Ns": list(Ns)})


def local_compactness_count(model: lat.LatticeModel, H: lat.LatticeOperator, level: float = 0.25) -> int:
    """Singular values of 1_{|x|<=1}(Q) (H + 1)^{-1} above ``level``.

    A stable count across N is the finite-size stand-in for compactness of
    phi(Q)(H + i)^{-1}; for a pure multiplication operator it grows like the
    number of lattice points in the unit window.
    """
    cut = (np.linalg.norm(model.positions(), axis=1) <= 1.0).astype(float)
    R = lat.resolvent(H, -1.0).to_dense()
    s = np.linalg.svd(cut[:, None] * R, compute_uv=False)
    return int(np.sum(s > level))


def check_theta_criterion(model_kw: dict | None = None, Theta="potential", Ns=(16, 32, 64)) -> CriterionReport:
    """Local compactness, H >= Theta(Q) with Theta growing, versus the compactness proxy."""
    model_kw = dict(model_kw or {})
    rows, growth, counts, local = [], [], [], []
    for N in Ns:
        model = lat.LatticeModel(N=int(N), **model_kw)
        H = model.hamiltonian()
        local.append(local_compactness_count(model, H))
        th = model.potential_values() if Theta == "potential" else _spec(Theta, model.d).sample(model.positions())
        v = lat.theta_criterion_check(H, th)
        rows.append({"N": model.N, "min_eigenvalue": v.min_eigenvalue, "growth": v.growth,
                     "holds": v.holds})
        growth.append(v.growth)
        counts.append(resolvent_count(lat.eigvalsh(H)))
    grows = all(b > a for a, b in zip(growth, growth[1:])) and growth[-1] >= 2 * max(growth[0], 1e-12)
    hyps = {"locally_compact": _hv("holds" if compactness_proxy(local) == "compact" else "fails",
                                   counts=local),
            "lower_bound": _hv("holds" if all(r["holds"] for r in rows) else "fails", checks=rows),
            "theta_growth": _hv("holds" if grows else "fails", growth=growth)}
    sv = {"kind": "lattice", "verdict": compactness_proxy(counts), "proxy_counts": counts}
    return CriterionReport("theta_criterion", hyps, sv, {"model": model_kw, "Theta": str(Theta),
                                                         "Ns": list(Ns)})
