"""Lowest eigenvalues, inertia counts and counting ladders for truncated boxes."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .continuum import BoxGrid, BoxOperator, laplacian_fd, symbol_operator, form_sum
from .potential import PotentialSpec, resolve

DENSE_LIMIT = 2000
TIE_TOL = 1e-9
PIVOT_TOL = 1e-10


class FactorizationError(ArithmeticError):
    pass


@dataclass
class EigenResult:
    values: np.ndarray
    residuals: np.ndarray
    method: str
    converged: bool = True
    iterations: int = 0
    vectors: np.ndarray | None = field(default=None, repr=False)


def as_matrix(op):
    """Real symmetric or Hermitian matrix behind ``op`` (sparse stays sparse)."""
    if isinstance(op, BoxOperator):
        return op.matrix
    if hasattr(op, "to_dense") and hasattr(op, "group"):  # LatticeOperator
        D = op.to_dense()
        return D.real if np.allclose(D.imag, 0.0, atol=1e-14) else D
    if sp.issparse(op):
        return op.tocsr()
    return np.asarray(op)


def gershgorin_lower(A) -> float:
    if sp.issparse(A):
        A = A.tocsr()
        d = A.diagonal().real
        off = np.asarray(abs(A).sum(axis=1)).ravel() - np.abs(d)
    else:
        d = np.real(np.diag(A))
        off = np.abs(A).sum(axis=1) - np.abs(d)
    return float(np.min(d - off))


def _residuals(A, vals, vecs):
    R = A @ vecs - vecs * vals
    return np.linalg.norm(R, axis=0)


def _dense_eigs(A, k, vectors):
    D = A.toarray() if sp.issparse(A) else A
    w, V = sla.eigh(D, subset_by_index=[0, k - 1])
    return EigenResult(w, _residuals(D, w, V), "dense", True, 0, V if vectors else None)


def smallest_eigs(op, k: int = 1, tol: float = 1e-10, seed: int = 0, max_iter: int = 2000,
                  vectors: bool = False, method: str = "auto") -> EigenResult:
    """k smallest eigenvalues, ascending, with explicit residuals |Hx - lx|.

    Large sparse operators use shift-invert Lanczos with full reorthogonalisation
    and locking; an inertia count below the largest returned value guards
    against missed copies of degenerate eigenvalues.  ``method`` forces
    ``"dense"`` or ``"lanczos"``.
    """
    A = as_matrix(op)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    if method not in ("auto", "dense", "lanczos"):
        raise ValueError(f"unknown method {method!r}")
    if method == "dense" or (method == "auto" and n < DENSE_LIMIT):
        return _dense_eigs(A, k, vectors)
    A = sp.csc_matrix(A)
    sigma = gershgorin_lower(A) - 1.0
    lu = splu((A - sigma * sp.identity(n, format="csc")).tocsc())
    rng = np.random.default_rng(seed)
    found_vals = np.empty(0)
    found_vecs = np.empty((n, 0))
    used, converged, want = 0, True, k
    while True:
        vals, vecs, its, ok = _lanczos_round(A, lu, sigma, found_vecs, want - found_vals.size,
                                             rng, tol, max_iter - used)
        used += its
        converged &= ok
        found_vals = np.concatenate([found_vals, vals])
        found_vecs = np.hstack([found_vecs, vecs])
        order = np.argsort(found_vals)
        found_vals, found_vecs = found_vals[order], found_vecs[:, order]
        if not ok or used >= max_iter:
            converged = False
            break
        top = found_vals[k - 1] + 1e-7 * (1 + abs(found_vals[k - 1]))
        c = count_below(A, top)
        have = int(np.sum(found_vals <= top + TIE_TOL))
        if c <= have:
            break
        want = found_vals.size + (c - have)
    vals, vecs = found_vals[:k], found_vecs[:, :k]
    res = _residuals(A, vals, vecs)
    return EigenResult(vals, res, "lanczos", converged, used, vecs if vectors else None)


def _lanczos_round(A, lu, sigma, locked, nwant, rng, tol, budget):
    n = A.shape[0]

    def deflate(x):
        if locked.shape[1]:
            x = x - locked @ (locked.T @ x)
        return x

    q = deflate(rng.standard_normal(n))
    q /= np.linalg.norm(q)
    Q = [q]
    alpha, beta = [], []
    steps = 0
    max_steps = min(n - locked.shape[1], max(4 * nwant + 40, 80))
    while steps < budget:
        w = deflate(lu.solve(Q[-1]))
        a = float(Q[-1] @ w)
        w -= a * Q[-1]
        if beta:
            w -= beta[-1] * Q[-2]
        Qm = np.array(Q).T
        for _ in range(2):
            w -= Qm @ (Qm.T @ w)
            w = deflate(w)
        b = float(np.linalg.norm(w))
        alpha.append(a)
        steps += 1
        m = len(alpha)
        check = m >= nwant and (m % 5 == 0 or b < 1e-12 or m >= max_steps)
        if check:
            theta, S = sla.eigh_tridiagonal(np.array(alpha), np.array(beta)) if m > 1 else (
                np.array(alpha), np.ones((1, 1)))
            idx = np.argsort(theta)[::-1][:nwant]
            th = theta[idx]
            if np.all(th > 0):
                X = Qm @ S[:, idx]
                X /= np.linalg.norm(X, axis=0)
                lam = sigma + 1.0 / th
                r = _residuals(A, lam, X)
                if np.all(r <= tol * (1 + np.abs(lam))):
                    return lam, X, steps, True
            if b < 1e-12 or m >= max_steps:
                # restart from the best current Ritz vector combination
                q = deflate(Qm @ S[:, idx].sum(axis=1))
                q /= np.linalg.norm(q)
                Q, alpha, beta = [q], [], []
                continue
        beta.append(b)
        Q.append(w / b)
    theta, S = sla.eigh_tridiagonal(np.array(alpha), np.array(beta[: len(alpha) - 1])) if len(alpha) > 1 \
        else (np.array(alpha), np.ones((1, 1)))
    idx = np.argsort(theta)[::-1][:nwant]
    X = np.array(Q[: len(alpha)]).T @ S[:, idx]
    X /= np.linalg.norm(X, axis=0)
    return sigma + 1.0 / theta[idx], X, steps, False


# --- inertia counting --------------------------------------------------------

def _dense_inertia(B) -> tuple[int, float]:
    _, D, _ = sla.ldl(B, hermitian=True)
    neg, small = 0, np.inf
    i, n = 0, D.shape[0]
    while i < n:
        if i + 1 < n and D[i + 1, i] != 0:
            ev = np.linalg.eigvalsh(D[i:i + 2, i:i + 2])
            i += 2
        else:
            ev = np.array([D[i, i].real])
            i += 1
        neg += int(np.sum(ev < 0))
        small = min(small, float(np.min(np.abs(ev))))
    return neg, small


def _sparse_inertia(B) -> tuple[int, float]:
    lu = splu(B.tocsc(), permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
              options=dict(SymmetricMode=True))
    if not np.array_equal(lu.perm_r, lu.perm_c):
        raise FactorizationError("factorisation did not keep a symmetric permutation")
    d = lu.U.diagonal()
    b = np.random.default_rng(0).standard_normal(B.shape[0])
    y = lu.solve(b)
    # backward error, which stays small for a stable factorisation however ill-conditioned B is
    scale = abs(B).sum(axis=0).max() * np.linalg.norm(y) + np.linalg.norm(b)
    if np.linalg.norm(B @ y - b) > 1e-8 * scale:
        raise FactorizationError("unstable factorisation")
    return int(np.sum(d < 0)), float(np.min(np.abs(d)))


def count_below(op, E: float) -> int:
    """Number of eigenvalues <= E (values within 1e-9 of E count), via Sylvester inertia."""
    A = as_matrix(op)
    n = A.shape[0]
    scale = max(1.0, abs(E))
    shift = E + TIE_TOL * scale / 2
    for attempt in range(4):
        try:
            if sp.issparse(A):
                B = (A - shift * sp.identity(n, format="csr")).tocsc()
                neg, small = _sparse_inertia(B)
            else:
                neg, small = _dense_inertia(A - shift * np.eye(n))
        except (FactorizationError, RuntimeError):
            small = 0.0
        if small > PIVOT_TOL:
            return neg
        # nudge the shift up, staying within the tie window
        shift = E + TIE_TOL * scale * (0.5 + 0.1 * (attempt + 1))
    raise FactorizationError(f"no stable factorisation near E={E}")


# --- counting ladders -------------------------------------------------------

@dataclass
class CountingLadder:
    E: float
    Ls: list
    counts: list
    verdict: str
    exponent: float
    dim: int
    h: float
    operator: str = "fd"

    def to_dict(self) -> dict:
        return {"E": self.E, "Ls": list(self.Ls), "counts": list(self.counts), "verdict": self.verdict,
                "exponent": self.exponent, "dim": self.dim, "h": self.h, "operator": self.operator}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["L", "count"])
        w.writerows(zip(self.Ls, self.counts))
        return buf.getvalue()


def growth_exponent(Ls, counts) -> float:
    """Least-squares slope of log N(L) against log L over the positive counts."""
    L = np.asarray(Ls, float)
    c = np.asarray(counts, float)
    keep = c > 0
    if keep.sum() < 2:
        return 0.0
    return float(np.polyfit(np.log(L[keep]), np.log(c[keep]), 1)[0])


def ladder_verdict(counts, exponent, dim) -> str:
    tail = math.ceil(len(counts) / 3)
    if len(set(counts[-tail:])) == 1:
        return "stabilizes"
    if exponent > dim / 2:
        return "grows"
    return "inconclusive"


def box_operator(V: PotentialSpec, L: float, h: float, operator: str = "fd", m: float = 1.0) -> BoxOperator:
    if operator == "fd":
        return form_sum(laplacian_fd(BoxGrid(L, h, V.dim, "dirichlet")), V)
    if operator == "symbol":
        return form_sum(symbol_operator(BoxGrid(L, h, V.dim, "periodic"), m), V)
    raise ValueError(f"unknown operator {operator!r}")


def counting_ladders(V, Es, Ls, h, operator: str = "fd", m: float = 1.0) -> list[CountingLadder]:
    """One ladder per energy; each box operator is assembled once."""
    V = resolve(V) if isinstance(V, str) else V
    Es = [float(e) for e in Es]
    Ls = [float(L) for L in Ls]
    if len(Ls) < 2 or any(b <= a for a, b in zip(Ls, Ls[1:])):
        raise ValueError(f"box sizes must be strictly ascending, got {Ls}")
    table = np.zeros((len(Es), len(Ls)), dtype=int)
    for j, L in enumerate(Ls):
        H = box_operator(V, L, h, operator, m)
        for i, E in enumerate(Es):
            table[i, j] = count_below(H, E)
    out = []
    for i, E in enumerate(Es):
        counts = [int(c) for c in table[i]]
        p = growth_exponent(Ls, counts)
        out.append(CountingLadder(E, [float(x) for x in Ls], counts, ladder_verdict(counts, p, V.dim),
                                  p, V.dim, float(h), operator))
    return out


def counting_ladder(V, E, Ls, h, operator: str = "fd", m: float = 1.0) -> CountingLadder:
    return counting_ladders(V, [E], Ls, h, operator, m)[0]
