import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectralgate.lattice import (
    CyclicGroup,
    HypothesisError,
    LatticeError,
    LatticeModel,
    LatticeOperator,
    ProbeReport,
    SpectrumError,
    SymbolFn,
    build_hamiltonian,
    compact_tail_bound,
    default_battery,
    eigvalsh,
    fourier_op,
    gaussian_bump,
    identity,
    laplacian_symbol,
    modulation_op,
    modulation_regularity_norm,
    opnorm,
    operator_inequality_check,
    position_op,
    power_symbol,
    resolvent,
    resolvent_identity_check,
    shifted_symbol,
    theta_criterion_check,
    translation_op,
    translation_regularity_norm,
    weak_translation_decay,
)


def dense(op):
    return op.to_dense()


def rand_herm(rng, n):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (A + A.conj().T) / 2


def test_group_basics():
    g = CyclicGroup(4, 2)
    assert g.order == 16 and g.elements().shape == (16, 2)
    chi = g.character([1, 0])
    x = g.elements()
    np.testing.assert_allclose(chi, np.exp(2j * np.pi * x[:, 0] / 4))
    with pytest.raises(LatticeError):
        CyclicGroup(1)


def test_translation_is_cyclic_shift():
    g = CyclicGroup(4)
    f = np.array([10.0, 11.0, 12.0, 13.0])
    assert np.array_equal(translation_op(g, 1).apply(f), [11.0, 12.0, 13.0, 10.0])
    assert np.array_equal(dense(translation_op(g, 0)), np.eye(4))
    assert np.array_equal(dense(modulation_op(g, 0)), np.eye(4))


def test_dense_conversion_of_diagonal_kinds():
    g = CyclicGroup(8)
    psi = np.random.default_rng(0).normal(size=8)
    P = dense(fourier_op(g, psi))
    # a Fourier multiplier is a Hermitian circulant with spectrum psi
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(P)), np.sort(psi), atol=1e-12)
    assert np.allclose(P, np.roll(np.roll(P, 1, 0), 1, 1))


def test_laplacian_symbol_matches_stencil():
    g = CyclicGroup(16)
    H = dense(build_hamiltonian(g, laplacian_symbol(g, 1.0), np.zeros(16)))
    stencil = 2 * np.eye(16) - np.roll(np.eye(16), 1, 1) - np.roll(np.eye(16), -1, 1)
    np.testing.assert_allclose(H, stencil, atol=1e-12)


def test_zero_hamiltonian():
    g = CyclicGroup(8)
    assert np.all(dense(build_hamiltonian(g, np.zeros(8), np.zeros(8))) == 0)
    with pytest.raises(LatticeError):
        build_hamiltonian(g, np.ones(8) * 1j, np.zeros(8))


def test_confining_ground_state_above_min_potential():
    m = LatticeModel(32, potential="x0^2")
    ev = eigvalsh(m.hamiltonian())
    assert ev[0] > (m.potential_values() + m.shift).min()


def test_resolvent_examples():
    g = CyclicGroup(2)
    np.testing.assert_allclose(dense(resolvent(identity(g), 0)), np.eye(2))
    np.testing.assert_allclose(dense(resolvent(position_op(g, [1.0, 2.0]), 0)), np.diag([1, 0.5]))
    rng = np.random.default_rng(1)
    A = rng.normal(size=(32, 32))
    H = LatticeOperator(CyclicGroup(32), "dense", A @ A.T)
    R = dense(resolvent(H, -1))
    np.testing.assert_allclose((A @ A.T + np.eye(32)) @ R, np.eye(32), atol=1e-10)
    with pytest.raises(SpectrumError):
        resolvent(position_op(g, [1.0, 2.0]), 1.0)


def test_modulation_norm_examples():
    g = CyclicGroup(16)
    rng = np.random.default_rng(2)
    phi = rng.normal(size=16)
    assert modulation_regularity_norm(position_op(g, phi), 3) == 0.0
    psi = rng.normal(size=16)
    expect = np.max(np.abs(shifted_symbol(g, psi, 1) - psi))
    assert modulation_regularity_norm(fourier_op(g, psi), 1) == pytest.approx(expect)
    # dense route gives the same number
    assert modulation_regularity_norm(LatticeOperator(g, "dense", dense(fourier_op(g, psi))), 1) == \
        pytest.approx(expect, rel=1e-9)


def test_translation_norm_examples():
    g = CyclicGroup(16)
    psi = np.random.default_rng(3).normal(size=16)
    assert translation_regularity_norm(fourier_op(g, psi), 0) == 0.0
    p = np.arange(16)
    expect = np.max(np.abs(np.exp(2j * np.pi * p * 2 / 16) - 1) * np.abs(psi))
    assert translation_regularity_norm(fourier_op(g, psi), 2) == pytest.approx(expect)


def test_regularity_norms_shrink_with_n():
    mods, trans = [], []
    for N in (16, 32, 64):
        R = resolvent(LatticeModel(N).hamiltonian(), -1)
        mods.append(modulation_regularity_norm(R, 1))
        trans.append(translation_regularity_norm(R, 1))
    assert mods[0] > mods[1] > mods[2] and trans[0] > trans[1] > trans[2]


def test_weak_decay_examples():
    g = CyclicGroup(32)
    bat = default_battery(g, 1.0)
    np.testing.assert_allclose(weak_translation_decay(identity(g), [0, 4, 8, 16], bat), 1.0, atol=1e-12)
    phi = np.zeros(32)
    phi[[0, 1, 31]] = 1.0
    f = np.zeros(32)
    f[0] = 1.0
    vals = weak_translation_decay(position_op(g, phi), [0, 1, 2, 3, 8], [f])
    assert vals[0] == 1.0 and vals[3] == 0.0 and vals[4] == 0.0
    with pytest.raises(LatticeError):
        weak_translation_decay(identity(g), [1], [])


def test_weak_decay_with_confining_potential():
    terms = []
    for N in (16, 32, 64):
        m = LatticeModel(N)
        R = resolvent(m.hamiltonian(), -1)
        lad = weak_translation_decay(R, [N // 8, N // 4, N // 2], m.battery())
        assert lad[-1] < lad[0]
        terms.append(lad[-1])
    assert terms[0] > terms[1] > terms[2]


def test_inequality_examples():
    g = CyclicGroup(4)
    assert operator_inequality_check(identity(g), identity(g).scaled(2)).holds
    fail = operator_inequality_check(identity(g).scaled(2), identity(g))
    assert not fail.holds and fail.witness is not None
    assert np.linalg.norm(fail.witness) == pytest.approx(1.0)


def test_inverse_bound_from_potential():
    m = LatticeModel(32, potential="x0^2")
    H = m.hamiltonian()
    Hinv = resolvent(H, 0)
    V = m.potential_values()
    assert operator_inequality_check(Hinv, position_op(m.group, 1 / (1 + V))).holds


def test_tail_bound_examples():
    g = CyclicGroup(16)
    theta = np.linspace(1, 0.01, 16)
    phi = (np.arange(16) < 8).astype(float)
    tb = compact_tail_bound(position_op(g, theta), theta, phi)
    assert tb.norm == pytest.approx(tb.bound)
    assert tb.bound == pytest.approx(theta[8:].max())
    assert compact_tail_bound(position_op(g, np.zeros(16)), theta, phi).norm == 0.0
    with pytest.raises(HypothesisError):
        compact_tail_bound(position_op(g, 2 * theta), theta, phi)


def test_theta_examples():
    g = CyclicGroup(16)
    Theta = np.arange(16.0)
    assert theta_criterion_check(position_op(g, Theta), Theta).holds
    m = LatticeModel(32, potential="x0^2", shift=0.0)
    V = m.potential_values()
    assert theta_criterion_check(m.hamiltonian(), V).holds
    well = LatticeModel(32, potential="x0^2 - 100*step(0.5-abs(x0))", shift=0.0)
    Hw = well.hamiltonian()
    # Theta = |V| asks for more than H delivers inside the well
    res = theta_criterion_check(Hw, np.abs(well.potential_values()))
    assert not res.holds
    w = np.abs(res.witness) ** 2
    assert w[np.abs(well.positions()[:, 0]) < 1.5].sum() > 0.5


def test_resolvent_identity_examples():
    g = CyclicGroup(32)
    h = laplacian_symbol(g, 0.5)
    V = np.random.default_rng(4).uniform(0, 3, 32)
    assert resolvent_identity_check(g, h, V, 0) == 0.0
    assert resolvent_identity_check(g, h, np.zeros(32), 5) < 1e-12
    with pytest.raises(HypothesisError):
        resolvent_identity_check(g, h, V - 10, 1, shift=0.0)


def test_symbol_ellipticity():
    g = CyclicGroup(32)
    s = power_symbol(g, 1.0, 1.0)
    s.check_elliptic()
    with pytest.raises(LatticeError):  # checked on construction
        SymbolFn(g, np.ones(32), m=1.0, c_lo=0.5, c_hi=2.0, p0=1.0)


def test_probe_report_json():
    import json

    r = ProbeReport(16, 1, "weak_translation", [2, 4], [0.1, 0.01], "dense")
    d = json.loads(r.to_json())
    assert set(d) == {"N", "d", "probe", "ladder", "values", "method"}


def test_gaussian_bump_is_normalized():
    g = CyclicGroup(32, 2)
    assert np.linalg.norm(gaussian_bump(g, 2.0)) == pytest.approx(1.0)
    for v in default_battery(g):
        assert np.linalg.norm(v) == pytest.approx(1.0)


def test_opnorm_randomized_matches_svd():
    A = np.random.default_rng(5).normal(size=(300, 300))
    val = opnorm(A, tol=1e-8)[0]
    assert val == pytest.approx(np.linalg.norm(A, 2), rel=1e-6)


# --- exact algebra as properties ------------------------------------------------

N32 = CyclicGroup(32)
elem = st.integers(0, 31)


@settings(max_examples=25, deadline=None)
@given(elem, elem)
def test_unitarity_and_group_laws(a, b):
    Ua, Ub, Uab = (dense(translation_op(N32, x)) for x in (a, b, (a + b) % 32))
    Va, Vb, Vab = (dense(modulation_op(N32, x)) for x in (a, b, (a + b) % 32))
    eye = np.eye(32)
    assert np.array_equal(Ua.conj().T @ Ua, eye)
    assert np.allclose(Va.conj().T @ Va, eye, atol=1e-14)
    assert np.array_equal(Ua @ Ub, Uab)
    assert np.allclose(Va @ Vb, Vab, atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(elem, st.integers(0, 2 ** 32 - 1))
def test_exchange_relation(k, seed):
    psi = np.random.default_rng(seed).normal(size=32)
    Vk = dense(modulation_op(N32, k))
    lhs = Vk @ dense(fourier_op(N32, psi)) @ Vk.conj().T
    rhs = dense(fourier_op(N32, shifted_symbol(N32, psi, k)))
    assert np.max(np.abs(lhs - rhs)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), elem)
def test_position_multipliers_commute_with_modulations(seed, k):
    phi = np.random.default_rng(seed).normal(size=32)
    assert modulation_regularity_norm(LatticeOperator(N32, "dense", dense(position_op(N32, phi))), k) \
        < 1e-12
    R = LatticeOperator(N32, "dense", rand_herm(np.random.default_rng(seed), 32))
    assert translation_regularity_norm(R, 0) == 0.0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 1.0))
def test_inverse_is_operator_antimonotone(seed, eps):
    rng = np.random.default_rng(seed)
    n = 16
    g = CyclicGroup(n)
    X = rng.normal(size=(n, n))
    Y = rng.normal(size=(n, n))
    B = X @ X.T + eps * np.eye(n)
    A = B + Y @ Y.T
    Ainv = LatticeOperator(g, "dense", np.linalg.inv(A))
    Binv = LatticeOperator(g, "dense", np.linalg.inv(B))
    assert operator_inequality_check(Ainv, Binv, tol=1e-10 * np.linalg.cond(B)).holds


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 31))
def test_resolvent_identity_random(seed, k):
    rng = np.random.default_rng(seed)
    h = rng.uniform(0, 5, 32)
    V = rng.uniform(-2, 2, 32)
    assert resolvent_identity_check(N32, h, V, k) <= 1e-10
