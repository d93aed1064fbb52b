import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectralgate.potential import (
    BUILTIN_NAMES,
    Binary,
    PotentialDomainError,
    PotentialError,
    PotentialSpec,
    PotentialSyntaxError,
    Var,
    builtin,
    eval_point,
    evaluate,
    negative_part,
    parse_potential,
    positive_part,
    resolve,
    to_text,
)


def test_product_of_squares_tree():
    e = parse_potential("x0^2*x1^2", 2)
    assert isinstance(e.root, Binary) and e.root.op == "*"
    assert e.root.left == Binary("^", Var(0), e.root.left.right)
    assert eval_point(e, [2, 3]) == 36.0


def test_simple_evaluations():
    assert eval_point(parse_potential("x0^2", 1), [3]) == 9.0
    bump = parse_potential("max(0, 1-abs(x0-8))", 1)
    assert eval_point(bump, [8]) == 1.0
    assert eval_point(bump, [10]) == 0.0
    assert eval_point(parse_potential("0", 3), [1, 2, 3]) == 0.0


def test_power_is_right_associative():
    assert eval_point(parse_potential("2^3^2", 1), [0]) == 512.0


def test_step_is_strict_indicator():
    e = parse_potential("step(x0)", 1)
    assert evaluate(e, [[-1.0], [0.0], [1e-300]]).tolist() == [0.0, 0.0, 1.0]


@pytest.mark.parametrize("text", ["1/x0", "log(x0)", "sqrt(x0-1)", "(x0-2)^0.5"])
def test_domain_errors_are_located(text):
    with pytest.raises(PotentialDomainError) as info:
        eval_point(parse_potential(text, 1), [0.0])
    assert "x=" in str(info.value)


def test_overflow_is_not_silent():
    with pytest.raises(PotentialError):
        eval_point(parse_potential("exp(x0)", 1), [1000.0])


@pytest.mark.parametrize("text, dim, offset", [("x0^", 1, 3), ("x1", 1, 0), ("foo(x0)", 1, 0),
                                               ("x0 + * 2", 1, 5), ("(x0", 1, 3)])
def test_syntax_errors_carry_offsets(text, dim, offset):
    with pytest.raises(PotentialSyntaxError) as info:
        parse_potential(text, dim)
    assert info.value.offset == offset


def test_sign_split_examples():
    e = parse_potential("x0", 1)
    pos, neg = positive_part(e), negative_part(e)
    assert (eval_point(pos, [2]), eval_point(neg, [2])) == (2.0, 0.0)
    assert (eval_point(pos, [-2]), eval_point(neg, [-2])) == (0.0, 2.0)
    c = parse_potential("-1", 1)
    assert eval_point(positive_part(c), [5]) == 0.0 and eval_point(negative_part(c), [5]) == 1.0
    neg = negative_part(builtin("cross_xy").expr)
    pts = np.random.default_rng(0).normal(size=(1000, 2)) * 10
    assert np.all(evaluate(neg, pts) == 0.0)


def test_builtins():
    assert set(BUILTIN_NAMES) >= {"zero", "harmonic_n", "cross_xy", "bump_holes", "half_space_flat"}
    assert builtin("zero", 3).expr.dim == 3
    assert builtin("cross_xy").expr.dim == 2
    assert resolve("harmonic").expr == builtin("harmonic_n").expr
    with pytest.raises(PotentialError):
        builtin("nonexistent")


def test_bump_holes_profile():
    V = builtin("bump_holes")
    # inside the k-th hole (c_k = 4^k, r_k = 2^-k) V vanishes, elsewhere it is 100
    vals = V.sample([[4.0], [4.49], [4.51], [16.2], [16.3], [64.1], [10.0]])
    assert vals.tolist() == [0.0, 0.0, 100.0, 0.0, 100.0, 0.0, 100.0]


def test_clamp_only_caps_positive_part():
    s = PotentialSpec(parse_potential("x0^3", 1), clamp_max=5.0)
    assert s.sample([[10.0], [-10.0], [1.0]]).tolist() == [5.0, -1000.0, 1.0]
    with pytest.raises(PotentialError):
        PotentialSpec(parse_potential("x0", 1), clamp_max=-1.0)


def test_spec_json_round_trip():
    s = builtin("cross_xy")
    back = PotentialSpec.from_json(s.to_json())
    assert back.expr == s.expr and back.clamp_max == s.clamp_max


CORPUS = [
    "0", "1", "x0", "-x0", "x0^2", "x0^2*x1^2", "1/(1+x0^2)", "abs(x0)", "max(0, 1-abs(x0-8))",
    "min(x0, x1)", "exp(-x0^2)", "log(1+x0^2)", "sqrt(1+x1^2)", "step(x0)", "sin(x0)*cos(x1)",
    "x0^2+x1^2+x2^2", "-(x0-1)^2", "2^x0", "x0^-1^2", "--x0", "x0-x1-x2", "x0/x1/x2", "(x0+x1)*(x0-x1)",
    "x0*x1*x2", "100*(1-step(0.5-abs(x0-4)))", "1e3*x0", "2.5e-2+x1", "max(x0, max(x1, x2))",
    "exp(sin(x0))", "abs(abs(x0)-1)", "x0^2*step(x0)", "min(1, x0^2)", "x0^4-x0^2", "(x0)", "((x1))",
    "3-2-1", "2^3^2", "-2^2", "x0^0.5^2", "sqrt(abs(x0))", "cos(x0)^2+sin(x0)^2", "step(x0)*step(x1)",
    "log(2+cos(x0))", "x2", "1/(1+x0^2*x1^2)", "max(0, x0)-max(0, -x0)", "x0*-x1", "0.5*x0^2",
    "x1^2+x0^2*x1^2", "exp(-abs(x0))*x1", "min(x0, -x1)+max(x2, 0)",
]


def test_round_trip_corpus():
    assert len(CORPUS) >= 50
    for t in CORPUS:
        e = parse_potential(t, 3)
        assert parse_potential(to_text(e.root), 3) == e, t


finite = st.floats(-50, 50, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(CORPUS), st.lists(st.tuples(finite, finite, finite), min_size=1, max_size=200))
def test_parts_split_exactly(text, pts):
    e = parse_potential(text, 3)
    pts = np.array(pts)
    try:
        v = evaluate(e, pts)
    except PotentialError:
        return
    vp, vm = evaluate(positive_part(e), pts), evaluate(negative_part(e), pts)
    assert np.all(vp >= 0) and np.all(vm >= 0)
    assert np.all(np.abs((vp - vm) - v) <= np.spacing(np.abs(v)))


@pytest.mark.parametrize("text", CORPUS[:20])
def test_parts_nonnegative_on_many_points(text):
    rng = np.random.default_rng(1)
    pts = rng.uniform(-20, 20, size=(10_000, 3))
    e = parse_potential(text, 3)
    try:
        evaluate(e, pts)
    except PotentialError:
        pytest.skip("expression has singular points in the sample")
    assert evaluate(positive_part(e), pts).min() >= 0
    assert evaluate(negative_part(e), pts).min() >= 0
