"""Truncated-box discretisations of Delta + V, h(P) + V and div-form operators.

Dirichlet boxes carry the interior nodes ``-L + i*h, i = 1..M-1`` per axis
(``M = 2L/h``); periodic boxes carry ``-L + i*h, i = 0..M-1``.  Operators act on
nodal values and are assembled exactly symmetric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.io
import scipy.sparse as sp

from .potential import PotentialSpec, resolve

UNKNOWNS_CAP = 400_000


class GridError(ValueError):
    pass


class EllipticityError(ValueError):
    def __init__(self, message, point=None):
        self.point = point
        super().__init__(message if point is None else f"{message} at x={list(point)}")


class CoercivityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BoxGrid:
    L: float
    h: float
    dim: int = 1
    boundary: str = "dirichlet"
    cap: int = UNKNOWNS_CAP

    def __post_init__(self):
        if self.boundary not in ("dirichlet", "periodic"):
            raise GridError(f"unknown boundary {self.boundary!r}")
        if not (self.L > 0 and self.h > 0):
            raise GridError("L and h must be positive")
        ratio = 2 * self.L / self.h
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise GridError(f"2L/h = {ratio} is not an integer")
        if round(ratio) < 8:
            raise GridError("2L/h must be at least 8")
        if self.size > self.cap:
            raise GridError(f"{self.size} unknowns exceed the cap {self.cap}")

    @property
    def M(self) -> int:
        return int(round(2 * self.L / self.h))

    @property
    def per_axis(self) -> int:
        return self.M - 1 if self.boundary == "dirichlet" else self.M

    @property
    def size(self) -> int:
        return self.per_axis ** self.dim

    def axis(self) -> np.ndarray:
        i = np.arange(1, self.M) if self.boundary == "dirichlet" else np.arange(self.M)
        return -self.L + self.h * i

    def points(self) -> np.ndarray:
        ax = self.axis()
        mesh = np.meshgrid(*([ax] * self.dim), indexing="ij")
        return np.stack([g.ravel() for g in mesh], -1)

    def to_dict(self) -> dict:
        return {"L": self.L, "h": self.h, "dim": self.dim, "boundary": self.boundary}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "BoxGrid":
        return cls(float(d["L"]), float(d["h"]), int(d.get("dim", 1)), d.get("boundary", "dirichlet"))


@dataclass
class BoxOperator:
    grid: BoxGrid
    matrix: object  # scipy.sparse matrix, or dense ndarray for symbol operators
    kind: str
    symbol_values: np.ndarray | None = field(default=None, repr=False)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def is_dense(self) -> bool:
        return isinstance(self.matrix, np.ndarray)

    def to_dense(self) -> np.ndarray:
        return self.matrix if self.is_dense else self.matrix.toarray()

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "symbol" and self.symbol_values is not None:
            shp = (self.grid.per_axis,) * self.grid.dim
            s = self.symbol_values.reshape(shp)
            ax = tuple(range(self.grid.dim))
            f = np.asarray(x).reshape(shp + np.shape(x)[1:])
            s = s.reshape(shp + (1,) * (f.ndim - self.grid.dim))
            return np.real(np.fft.ifftn(s * np.fft.fftn(f, axes=ax), axes=ax)).reshape(np.shape(x))
        return self.matrix @ x

    def asymmetry(self) -> float:
        M = self.matrix
        D = M - M.T
        if self.is_dense:
            return float(np.max(np.abs(D), initial=0.0))
        return float(abs(D).max()) if D.nnz else 0.0

    def __add__(self, other: "BoxOperator") -> "BoxOperator":
        if other.grid != self.grid:
            raise GridError("operators live on different grids")
        if self.is_dense or other.is_dense:
            return BoxOperator(self.grid, self.to_dense() + other.to_dense(), "sum")
        return BoxOperator(self.grid, (self.matrix + other.matrix).tocsr(), "sum")


def _tridiag(M, h):
    n = M - 1
    return sp.diags([2.0 * np.ones(n), -np.ones(n - 1), -np.ones(n - 1)], [0, 1, -1]) / h ** 2


def _kron_sum(T, dim):
    n = T.shape[0]
    eye = sp.identity(n, format="csr")
    out = None
    for i in range(dim):
        term = None
        for j in range(dim):
            f = T if i == j else eye
            term = f if term is None else sp.kron(term, f, format="csr")
        out = term if out is None else out + term
    return out.tocsr()


def laplacian_fd(grid: BoxGrid) -> BoxOperator:
    """Dirichlet (2n+1)-point Laplacian: 2n/h^2 on the diagonal, -1/h^2 to neighbours."""
    if grid.boundary != "dirichlet":
        raise GridError("laplacian_fd needs a dirichlet grid")
    if grid.M - 1 < 8:
        raise GridError("grid too coarse: fewer than 8 interior points per axis")
    return BoxOperator(grid, _kron_sum(_tridiag(grid.M, grid.h), grid.dim), "laplacian")


def frequencies(grid: BoxGrid) -> np.ndarray:
    """Momenta 2*pi*k/(2L) of the periodic box in FFT order, shape (size, dim)."""
    k = 2 * np.pi * np.fft.fftfreq(grid.M, d=grid.h)
    mesh = np.meshgrid(*([k] * grid.dim), indexing="ij")
    return np.stack([g.ravel() for g in mesh], -1)


def symbol_operator(grid: BoxGrid, m: float = 1.0, symbol="power") -> BoxOperator:
    """Fourier multiplier on a periodic box, entries symbol(2*pi*k/(2L)).

    ``symbol`` is ``"power"`` for |p|^{2m} or a table of ``grid.size`` values in
    FFT order, which must be even under p -> -p so the operator is real.
    """
    if grid.boundary != "periodic":
        raise GridError("symbol_operator needs a periodic grid")
    shp = (grid.M,) * grid.dim
    if isinstance(symbol, str):
        if symbol != "power":
            raise ValueError(f"unknown symbol {symbol!r}")
        if not m > 0:
            raise ValueError("m must be positive")
        vals = np.linalg.norm(frequencies(grid), axis=1) ** (2 * m)
    else:
        vals = np.asarray(symbol, float).ravel()
        if vals.size != grid.size:
            raise ValueError(f"symbol table has {vals.size} entries, grid has {grid.size}")
        t = vals.reshape(shp)
        flipped = np.roll(np.flip(t), 1, axis=tuple(range(grid.dim)))
        if not np.allclose(t, flipped, rtol=1e-12, atol=1e-12):
            raise ValueError("symbol table must be even under p -> -p")
    kernel = np.real(np.fft.ifftn(vals.reshape(shp)))
    kernel = (kernel + np.roll(np.flip(kernel), 1, axis=tuple(range(grid.dim)))) / 2
    idx = np.stack(np.meshgrid(*([np.arange(grid.M)] * grid.dim), indexing="ij"), -1).reshape(-1, grid.dim)
    diff = np.mod(idx[:, None, :] - idx[None, :, :], grid.M)
    dense = kernel[tuple(diff[..., i] for i in range(grid.dim))]
    return BoxOperator(grid, dense, "symbol", symbol_values=vals)


def sample_potential(V: PotentialSpec, grid: BoxGrid) -> np.ndarray:
    if V.dim != grid.dim:
        raise GridError(f"potential has dim {V.dim}, grid has dim {grid.dim}")
    return V.sample(grid.points())


def multiplication(V: PotentialSpec, grid: BoxGrid) -> BoxOperator:
    return BoxOperator(grid, sp.diags(sample_potential(V, grid)).tocsr(), "multiplication")


def form_sum(H0: BoxOperator, V: PotentialSpec) -> BoxOperator:
    """H0 + diag(V at the nodes), V+ clamped at ``V.clamp_max``."""
    v = sample_potential(V, H0.grid)
    if H0.is_dense:
        return BoxOperator(H0.grid, H0.matrix + np.diag(v), "sum")
    return BoxOperator(H0.grid, (H0.matrix + sp.diags(v)).tocsr(), "sum")


def schrodinger(V: PotentialSpec | str, L: float, h: float, boundary: str = "dirichlet",
                m: float = 1.0) -> BoxOperator:
    """Delta + V on a Dirichlet box, or |P|^{2m} + V on a periodic one."""
    V = resolve(V) if isinstance(V, str) else V
    grid = BoxGrid(L, h, V.dim, boundary)
    H0 = laplacian_fd(grid) if boundary == "dirichlet" else symbol_operator(grid, m)
    return form_sum(H0, V)


@dataclass
class FormBoundVerdict:
    holds: bool
    min_eigenvalue: float
    vector: np.ndarray | None = field(default=None, repr=False)

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "fails"


def _negative_part_diag(V, grid):
    return np.maximum(-sample_potential(V, grid), 0.0)


def form_bound_check(V: PotentialSpec, mu: float, nu: float, grid: BoxGrid) -> FormBoundVerdict:
    """Discrete surrogate of V_- <= mu*Delta + nu: bottom of mu*Delta + nu - V_- >= -1e-8."""
    from .eigensolve import smallest_eigs

    if not 0 < mu < 1:
        raise ValueError("mu must lie in (0, 1)")
    vm = _negative_part_diag(V, grid)
    if not np.any(vm > 0):
        return FormBoundVerdict(True, float(nu), None)
    A = (mu * laplacian_fd(grid).matrix + sp.diags(nu - vm)).tocsr()
    res = smallest_eigs(A, 1, vectors=True)
    lo = float(res.values[0])
    return FormBoundVerdict(lo >= -1e-8, lo, res.vectors[:, 0])


def form_bound_threshold(V: PotentialSpec, mu: float, grid: BoxGrid) -> float:
    """Smallest nu for which the discrete form bound holds at this mu."""
    from .eigensolve import smallest_eigs

    vm = _negative_part_diag(V, grid)
    if not np.any(vm > 0):
        return 0.0
    A = (mu * laplacian_fd(grid).matrix - sp.diags(vm)).tocsr()
    return max(0.0, -float(smallest_eigs(A, 1).values[0]))


# --- divergence form -----------------------------------------------------------

def _extended_axis(grid):
    return -grid.L + grid.h * np.arange(grid.M + 1)


def _diff_1d(M):
    """Faces j = 0..M-1 between extended nodes j, j+1; interior unknowns 1..M-1."""
    n = M - 1
    return sp.diags([-np.ones(n), np.ones(n)], [0, -1], shape=(M, n)).tocsr()


def _avg_1d(M):
    n = M - 1
    return (sp.diags([np.ones(n), np.ones(n)], [0, -1], shape=(M, n)) / 2).tocsr()


def _kron_list(mats):
    out = mats[0]
    for m_ in mats[1:]:
        out = sp.kron(out, m_, format="csr")
    return out


def _eval_on(spec, axes):
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], -1)
    return spec.sample(pts), pts


def divergence_form_operator(grid: BoxGrid, a_matrix, mu: float, nu: float,
                             battery: int = 16, seed: int = 0) -> BoxOperator:
    """-sum_ij d_i a_ij(x) d_j on a Dirichlet box.

    Diagonal coefficients sit on cell faces as harmonic means of the two
    adjacent nodal values; off-diagonal ones couple cell-centred gradients.
    Uniform ellipticity is checked at every node (boundary included), and the
    coercivity bound <f, Lf> >= mu*|grad_h f|^2 - nu*|f|^2 on a random battery.
    """
    if grid.boundary != "dirichlet":
        raise GridError("divergence_form_operator needs a dirichlet grid")
    n, M, h = grid.dim, grid.M, grid.h
    a = [[resolve(e, n) if isinstance(e, str) else e for e in row] for row in a_matrix]
    if len(a) != n or any(len(r) != n for r in a):
        raise ValueError(f"coefficient matrix must be {n}x{n}")
    ext = _extended_axis(grid)
    inner = grid.axis()
    # ellipticity on all nodes
    A_nodes = np.empty(((M + 1) ** n, n, n))
    for i in range(n):
        for j in range(i, n):
            vals, pts = _eval_on(a[i][j], [ext] * n)
            if j != i:
                other, _ = _eval_on(a[j][i], [ext] * n)
                if not np.allclose(vals, other, rtol=1e-12, atol=1e-14):
                    raise ValueError(f"coefficient matrix is not symmetric (entry {i},{j})")
            A_nodes[:, i, j] = A_nodes[:, j, i] = vals
    ev = np.linalg.eigvalsh(A_nodes)
    bad = ev[:, 0] <= 0
    if bad.any():
        raise EllipticityError("coefficient matrix not positive definite", pts[np.argmax(bad)])
    D, Av, I = _diff_1d(M), _avg_1d(M), sp.identity(M - 1, format="csr")
    Lmat = None
    for i in range(n):
        G = _kron_list([D if k == i else I for k in range(n)])
        nodes = _eval_on(a[i][i], [ext if k == i else inner for k in range(n)])[0]
        nodes = nodes.reshape([M + 1 if k == i else M - 1 for k in range(n)])
        lo = np.take(nodes, np.arange(M), axis=i)
        hi = np.take(nodes, np.arange(1, M + 1), axis=i)
        face = 2.0 / (1.0 / lo + 1.0 / hi)
        term = G.T @ sp.diags(face.ravel()) @ G
        Lmat = term if Lmat is None else Lmat + term
    centers = (ext[:-1] + ext[1:]) / 2
    for i in range(n):
        for j in range(i + 1, n):
            w = _eval_on(a[i][j], [centers] * n)[0]
            if not np.any(w):
                continue
            Gi = _kron_list([D if k == i else Av for k in range(n)])
            Gj = _kron_list([D if k == j else Av for k in range(n)])
            cross = Gi.T @ sp.diags(w) @ Gj
            Lmat = Lmat + cross + cross.T
    Lmat = (Lmat / h ** 2).tocsr()
    Lmat = ((Lmat + Lmat.T) / 2).tocsr()
    op = BoxOperator(grid, Lmat, "divergence_form")
    _check_coercive(op, mu, nu, battery, seed)
    return op


def _check_coercive(op, mu, nu, battery, seed):
    lap = laplacian_fd(op.grid).matrix
    rng = np.random.default_rng(seed)
    n = op.shape[0]
    X = rng.standard_normal((n, battery))
    X[:, : battery // 2] = np.cumsum(X[:, : battery // 2], axis=0)  # smoother half
    lhs = np.einsum("ij,ij->j", X, op.matrix @ X)
    rhs = mu * np.einsum("ij,ij->j", X, lap @ X) - nu * np.einsum("ij,ij->j", X, X)
    worst = np.min(lhs - rhs)
    if worst < -1e-9 * np.max(np.abs(lhs)):
        raise CoercivityError(f"coercivity bound fails on the test battery (margin {worst:.3e})")


def export_mtx(op: BoxOperator, path) -> None:
    """Matrix Market, coordinate symmetric real."""
    M = sp.coo_matrix(op.to_dense()) if op.is_dense else op.matrix.tocoo()
    scipy.io.mmwrite(str(path), M, symmetry="symmetric")
