import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectralgate import lattice as lat
from spectralgate.criteria import (
    PROPOSITIONS,
    CriterionReport,
    SpectralConfig,
    check_condition_i,
    check_eq1_consistency,
    check_lemma5,
    check_prop1_pipeline,
    check_prop4_pipeline,
    check_prop6_pipeline,
    check_remark2,
    check_theorem2,
    check_theta_criterion,
    compactness_proxy,
    derive_consistency,
    force_verdicts,
    monotone_decreasing,
    weak_trend,
    weakly_vanishing_test,
)
from spectralgate.measure import QuadConfig
from spectralgate.potential import builtin, resolve


def test_condition_i_examples():
    assert check_condition_i(builtin("zero", 1))["verdict"] == "fails"
    assert check_condition_i(builtin("harmonic_n"))["verdict"] == "holds"
    res = check_condition_i(builtin("cross_xy"), lambdas=(0.5, 1.0, 2.0))
    assert res["verdict"] == "holds"
    for series in res["evidence"]["ladders"].values():
        assert len(series) == 8 and all(s["verdict"] == "decaying" for s in series)


@pytest.mark.parametrize("name, expect", [("zero", "fails"), ("harmonic_n", "holds"), ("cross_xy", "holds")])
def test_eq1_consistency_examples(name, expect):
    V = builtin(name, 1) if name == "zero" else builtin(name)
    rep = check_eq1_consistency(V)
    assert rep.consistent
    assert rep.verdict("condition_i") == rep.verdict("eq1") == expect


def test_remark2_examples():
    bump = check_remark2(builtin("bump_holes"))
    assert bump.verdict("omega_p_integral") == "holds" and bump.consistent
    vals = bump.hypothesis_verdicts["omega_p_integral"]["evidence"]["ladder"]["values"]
    assert vals[-1] == pytest.approx(sum(4.0 ** (1 - k) for k in range(1, 6)))
    half = check_remark2(builtin("half_space_flat"), radii=(16, 32, 64, 128, 256))
    assert half.verdict("omega_p_integral") == "fails" and half.consistent
    empty = check_remark2(resolve("10", 1), radii=(4, 8, 16, 32))
    assert empty.verdict("omega_p_integral") == "holds"
    assert empty.spectral_verdict["verdict"] == "holds" and empty.consistent


def test_lemma3_report():
    rep = weakly_vanishing_test(resolve("1/(1+x0^2*x1^2)", 2), trials=10)
    assert rep.consistent and rep.verdict("window_decay") == "holds"
    flat = weakly_vanishing_test(resolve("step(0-x0)", 1), trials=10)
    assert flat.consistent and flat.verdict("window_decay") == "fails"


def test_lemma5_line():
    rep = check_lemma5(1, trials=20)
    assert rep.consistent
    assert rep.hypothesis_verdicts["lower_bound"]["evidence"]["violations"] == 0


def test_prop1_examples():
    ho = check_prop1_pipeline(builtin("harmonic_n"))
    assert ho.consistent and ho.verdict("condition_i") == ho.verdict("form_bound") == "holds"
    assert set(ho.spectral_verdict["verdicts"]) == {"stabilizes"}
    free = check_prop1_pipeline(builtin("zero", 1))
    assert free.consistent and free.verdict("condition_i") == "fails"
    assert "grows" in free.spectral_verdict["verdicts"]


@pytest.mark.slow
def test_prop1_cross_flagship():
    rep = check_prop1_pipeline(builtin("cross_xy"))
    assert rep.consistent and set(rep.spectral_verdict["verdicts"]) == {"stabilizes"}


def test_prop1_form_bound_failure_makes_no_claim():
    # a deep well with nu too small: form bound fails, no spectral claim
    rep = check_prop1_pipeline(resolve("x0^2 - 50*max(0, 1-abs(x0))", 1), mu=0.5, nu=10.0)
    assert rep.verdict("form_bound") == "fails" and rep.consistent
    assert rep.rule.endswith("no claim")


def test_prop6_examples():
    sq = check_prop6_pipeline(0.5, builtin("harmonic_n"))
    assert sq.consistent and set(sq.spectral_verdict["verdicts"]) == {"stabilizes"}
    free = check_prop6_pipeline(1.0, builtin("zero", 1))
    assert free.consistent and "grows" in free.spectral_verdict["verdicts"]


def test_prop4_examples():
    conf = check_prop4_pipeline()
    assert conf.consistent and conf.spectral_verdict["verdict"] == "decays"
    assert all(v == "holds" for v in (conf.verdict(k) for k in conf.hypothesis_verdicts))
    free = check_prop4_pipeline({"potential": "zero"})
    assert free.consistent and free.verdict("phi_weakly_vanishing") == "fails"
    assert free.spectral_verdict["verdict"] == "constant"
    diag = check_prop4_pipeline({"symbol": "zero"})
    assert diag.verdict("regularity") == "fails" and diag.consistent


def test_theorem2_examples():
    conf = check_theorem2()
    assert conf.consistent and conf.spectral_verdict["weak_decay"] == "decays"
    free = check_theorem2({"potential": "zero"})
    assert free.consistent and free.spectral_verdict["weak_decay"] == "constant"


def test_theta_examples():
    conf = check_theta_criterion()
    assert conf.consistent and conf.spectral_verdict["verdict"] == "compact"
    flat = check_theta_criterion({"symbol": "zero"})
    assert flat.consistent and flat.verdict("locally_compact") == "fails"


def test_trend_helpers():
    assert monotone_decreasing([3, 2, 1]) and not monotone_decreasing([3, 3, 1])
    assert weak_trend([[1.0, 1.0], [1.0, 1.0 + 1e-12]]) == "constant"
    assert weak_trend([[1.0, 0.1], [1.0, 0.01], [1.0, 0.001]]) == "decays"
    assert weak_trend([[1.0, 0.5], [1.0, 0.4]]) == "inconclusive"
    assert compactness_proxy([3, 5, 5]) == "compact"
    assert compactness_proxy([3, 5, 9]) == "not_compact"


def test_forced_contradiction_is_inconsistent():
    rep = check_prop1_pipeline(builtin("harmonic_n"))
    bad = force_verdicts(rep, hypotheses="holds", spectral="grows")
    assert not bad.consistent
    assert rep.consistent


def test_report_round_trip_and_flag_rederivable():
    rep = check_prop4_pipeline({"potential": "zero"})
    d = json.loads(rep.to_json())
    assert d["schema"] == "cr/1" and d["proposition"] in PROPOSITIONS
    stripped = {k: v for k, v in d.items() if k not in ("consistent", "rule")}
    assert derive_consistency(stripped) == (d["consistent"], d["rule"])
    back = CriterionReport.from_dict(d)
    assert back.to_json() == rep.to_json()


_VERDICTS = st.sampled_from(["holds", "fails", "inconclusive"])


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["prop1", "prop6"]), _VERDICTS, _VERDICTS,
       st.lists(st.sampled_from(["stabilizes", "grows", "inconclusive"]), min_size=1, max_size=5),
       st.booleans())
def test_consistency_is_a_function_of_verdicts(prop, ci, fb, spec, bounded):
    second = "form_bound" if prop == "prop1" else "symbol_elliptic"
    d = {"proposition": prop, "errors": [],
         "hypothesis_verdicts": {"condition_i": {"verdict": ci}, second: {"verdict": fb}},
         "spectral_verdict": {"kind": "counting", "verdicts": spec, "bounded_nonneg": bounded}}
    ok, _ = derive_consistency(d)
    assert ok == derive_consistency(json.loads(json.dumps(d)))[0]
    if ci == fb == "holds":
        assert ok == all(v == "stabilizes" for v in spec)
    if ci == fb == "holds" and "grows" in spec:
        assert not ok


SPEC_1D = SpectralConfig(Ls=(4, 8, 12, 16), h=0.1)


@pytest.mark.parametrize("name", ["zero", "harmonic_n", "bump_holes", "half_space_flat"])
def test_no_builtin_reports_hold_and_grow(name):
    V = builtin(name, 1) if name == "zero" else builtin(name)
    rep = check_prop1_pipeline(V, spectral=SPEC_1D, cfg=QuadConfig())
    hold = all(v["verdict"] == "holds" for v in rep.hypothesis_verdicts.values())
    assert not (hold and "grows" in rep.spectral_verdict["verdicts"])
    assert rep.consistent


def _theta_probes(N, c4, c2):
    m = lat.LatticeModel(N, potential=f"{c4}*x0^4 + {c2}*x0^2")
    H = m.hamiltonian().to_dense()
    g = m.group
    out = []
    for M in (H, H @ H):
        R = lat.LatticeOperator(g, "dense", np.linalg.inv(M + np.eye(g.order)))
        out.append((lat.modulation_regularity_norm(R, 1), lat.translation_regularity_norm(R, 1)))
    return out


@settings(max_examples=8, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.0, 3.0))
def test_theta_of_h_inherits_regularity_trend(c4, c2):
    (h16, t16), (h32, t32) = _theta_probes(16, c4, c2), _theta_probes(32, c4, c2)
    for i in range(2):
        if h32[i] < h16[i]:
            assert t32[i] < t16[i]
