import json

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from spectralgate.continuum import BoxGrid, laplacian_fd, schrodinger
from spectralgate.eigensolve import (
    CountingLadder,
    count_below,
    counting_ladder,
    counting_ladders,
    gershgorin_lower,
    growth_exponent,
    ladder_verdict,
    smallest_eigs,
)
from spectralgate.lattice import LatticeModel
from spectralgate.potential import builtin


def random_sparse(n, seed, density=0.002):
    A = sp.random(n, n, density=density, random_state=seed, format="csr")
    return (A + A.T + sp.diags(np.random.default_rng(seed).normal(size=n))).tocsr()


def test_diag_examples():
    r = smallest_eigs(np.diag([3.0, 1.0, 2.0]), k=2)
    np.testing.assert_allclose(r.values, [1.0, 2.0])
    assert r.method == "dense"
    assert count_below(sp.diags([1.0, 2.0, 3.0]).tocsr(), 2.5) == 2
    assert count_below(np.diag([1.0, 2.0, 3.0]), 2.5) == 2


def test_ties_count_as_below():
    assert count_below(sp.diags([1.0, 2.0, 3.0]).tocsr(), 2.0) == 2
    assert count_below(sp.diags([1.0, 2.0, 3.0]).tocsr(), 2.0 - 5e-10) == 2
    assert count_below(sp.diags([1.0, 2.0, 3.0]).tocsr(), 2.0 - 1e-6) == 1


def test_harmonic_oscillator():
    r = smallest_eigs(schrodinger("harmonic_n", 10.0, 0.01), k=5)
    np.testing.assert_allclose(r.values, [1, 3, 5, 7, 9], atol=1e-3)
    assert np.all(r.residuals <= 1e-10 * (1 + np.abs(r.values)))


def test_lanczos_matches_dense_on_random_sparse():
    A = random_sparse(1500, 11)
    dense = np.linalg.eigvalsh(A.toarray())[:6]
    r = smallest_eigs(A, k=6, method="lanczos")
    assert r.method == "lanczos" and r.converged
    assert np.max(np.abs(r.values - dense)) <= 1e-8


def test_lanczos_handles_degenerate_pairs():
    op = laplacian_fd(BoxGrid(1.0, 0.05, dim=2))
    dense = np.linalg.eigvalsh(op.to_dense())[:6]
    r = smallest_eigs(op, k=6, method="lanczos")
    np.testing.assert_allclose(r.values, dense, atol=1e-8)


def test_residuals_recomputed_independently():
    A = random_sparse(2500, 3)
    r = smallest_eigs(A, k=4, vectors=True)
    assert r.method == "lanczos"
    for lam, x in zip(r.values, r.vectors.T):
        assert np.linalg.norm(A @ x - lam * x) <= 1e-10 * (1 + abs(lam)) * 10
    assert np.all(np.diff(r.values) >= 0)


def test_lattice_operators_are_accepted():
    H = LatticeModel(32).hamiltonian()
    r = smallest_eigs(H, k=3)
    np.testing.assert_allclose(r.values, np.linalg.eigvalsh(H.to_dense())[:3], atol=1e-10)


def test_gershgorin_is_a_lower_bound():
    A = random_sparse(300, 5, density=0.05)
    assert gershgorin_lower(A) <= np.linalg.eigvalsh(A.toarray())[0]


def test_free_laplacian_count():
    # stencil spectrum (4/h^2) sin^2(pi k h / (4L)) on [-10, 10]; continuum count floor(2L sqrt(E)/pi) = 6
    counts = {}
    for h in (0.1, 0.05, 0.02):
        g = BoxGrid(10.0, h)
        k = np.arange(1, g.size + 1)
        stencil = 4 / h ** 2 * np.sin(np.pi * k * h / 40) ** 2
        counts[h] = count_below(laplacian_fd(g), 1.0)
        assert counts[h] == int(np.sum(stencil <= 1.0))
        assert abs(counts[h] - 6) <= 1
    assert counts[0.02] == 6


def test_counting_ladder_examples():
    free = counting_ladder(builtin("zero", 1), 1.0, (5, 10, 20, 40), 0.05)
    assert free.counts == [3, 6, 12, 25]
    assert free.verdict == "grows" and free.exponent == pytest.approx(1.0, abs=0.1)
    ho = counting_ladder(builtin("harmonic_n"), 10.0, (4, 6, 8, 12), 0.05)
    assert ho.counts == [5, 5, 5, 5] and ho.verdict == "stabilizes"


@pytest.mark.slow
def test_cross_ladder_stabilizes_under_refinement():
    V = builtin("cross_xy")
    coarse = counting_ladder(V, 5.0, (4, 8, 12, 16), 0.1)
    fine = counting_ladder(V, 5.0, (4, 8, 12), 0.05)
    assert coarse.verdict == "stabilizes"
    assert fine.counts[-1] == fine.counts[-2]


def test_ladder_verdict_rules():
    assert ladder_verdict([5, 8, 9, 9], 0.3, 1) == "stabilizes"
    assert ladder_verdict([3, 6, 12, 25], 1.0, 1) == "grows"
    assert ladder_verdict([3, 4, 5, 6], 0.3, 1) == "inconclusive"
    assert growth_exponent([1, 2, 4], [1, 4, 16]) == pytest.approx(2.0)


def test_counting_ladder_serialization():
    lad = counting_ladders(builtin("harmonic_n"), [2.0, 4.0], (4, 6, 8), 0.1)
    assert [l.counts for l in lad] == [[1, 1, 1], [2, 2, 2]]
    d = json.loads(lad[0].to_json())
    assert d["counts"] == [1, 1, 1] and d["verdict"] == "stabilizes"
    assert lad[0].to_csv().splitlines()[0] == "L,count"
    assert isinstance(lad[0], CountingLadder)


def test_invalid_ladder_rejected():
    with pytest.raises(ValueError):
        counting_ladder(builtin("harmonic_n"), 1.0, (8, 4), 0.1)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(-3, 3), st.floats(-5, 5))
def test_inertia_agrees_with_eigenvalues_and_shifts(seed, E, c):
    A = random_sparse(400, seed, density=0.01)
    ev = np.linalg.eigvalsh(A.toarray())
    if np.min(np.abs(ev - E)) < 1e-6:
        return
    n = count_below(A, E)
    assert n == int(np.sum(ev <= E))
    shifted = (A + c * sp.identity(400)).tocsr()
    assert count_below(shifted, E + c) == n
    k = min(n + 2, 400)
    r = smallest_eigs(A, k=k)
    assert n == int(np.sum(r.values <= E))


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["zero", "harmonic_n", "bump_holes", "half_space_flat"]), st.floats(0.5, 20))
def test_dirichlet_monotonicity(name, E):
    V = builtin(name, 1) if name == "zero" else builtin(name)
    lad = counting_ladder(V, E, (2, 4, 6, 8), 0.1)
    assert all(a <= b for a, b in zip(lad.counts, lad.counts[1:]))
    assert min(lad.counts) >= 0
    if lad.verdict == "stabilizes":
        k = -(-len(lad.counts) // 3)
        assert len(set(lad.counts[-k:])) == 1
