"""Exact finite model on the group Z_N^d.

Characters are ``k(x) = exp(2*pi*i*<k,x>/N)``.  The Fourier transform is taken
with the matching sign, ``(F f)(p) = N^{-d/2} sum_x k_p(x) f(x)``, so that
``V_k psi(P) V_k^* = psi(P+k)`` holds exactly as an identity of symbols.

Operators are stored in one of four representations:

* ``position``: multiplication by a vector (``phi(Q)``);
* ``fourier``: Fourier multiplier (``psi(P)``);
* ``shift``: the translation ``(U_a f)(x) = f(x+a)``, kept as the integer ``a``;
* ``dense``: an ``N^d x N^d`` complex matrix.

Norms are exact largest singular values up to ``DENSE_CAP`` rows and
randomised power iteration beyond that.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .potential import PotentialSpec, builtin, resolve

DENSE_CAP = 4096
HERMITIAN_TOL = 1e-12


class LatticeError(ValueError):
    pass


class SpectrumError(LatticeError):
    """z too close to the spectrum, or an operator not invertible."""


class HypothesisError(LatticeError):
    """A stated precondition of a probe does not hold."""


@dataclass(frozen=True)
class CyclicGroup:
    N: int
    d: int = 1

    def __post_init__(self):
        if self.N < 2 or self.d < 1:
            raise LatticeError("need N >= 2 and d >= 1")

    @property
    def order(self) -> int:
        return self.N ** self.d

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.d

    def elements(self) -> np.ndarray:
        """All elements as integer rows, in row-major (flat index) order."""
        grids = np.meshgrid(*([np.arange(self.N)] * self.d), indexing="ij")
        return np.stack([g.ravel() for g in grids], -1)

    def centered(self) -> np.ndarray:
        """Representatives in [-N/2, N/2)."""
        e = self.elements()
        return np.where(e < (self.N + 1) // 2, e, e - self.N)

    def dual_norm(self) -> np.ndarray:
        """|p| measured through the centred representative of each dual point."""
        return np.linalg.norm(self.centered(), axis=1)

    def element(self, a) -> np.ndarray:
        a = np.atleast_1d(np.asarray(a, dtype=int))
        if a.shape != (self.d,):
            raise LatticeError(f"element must have {self.d} coordinates")
        return np.mod(a, self.N)

    def character(self, k) -> np.ndarray:
        k = self.element(k)
        phase = np.mod(self.elements() @ k, self.N)
        return np.exp(2j * np.pi * phase / self.N)


def fourier(group: CyclicGroup, f: np.ndarray) -> np.ndarray:
    """F along the first d axes of ``f`` reshaped to the group shape."""
    shp = f.shape
    g = f.reshape(group.shape + shp[1:])
    return np.fft.ifftn(g, axes=tuple(range(group.d)), norm="ortho").reshape(shp)


def inverse_fourier(group: CyclicGroup, f: np.ndarray) -> np.ndarray:
    shp = f.shape
    g = f.reshape(group.shape + shp[1:])
    return np.fft.fftn(g, axes=tuple(range(group.d)), norm="ortho").reshape(shp)


def _roll(group, M, a):
    """Leading axis of M rolled so that out[x] = M[x + a]."""
    shp = M.shape
    g = M.reshape(group.shape + shp[1:])
    out = np.roll(g, tuple(-int(s) for s in a), axis=tuple(range(group.d)))
    return out.reshape(shp)


class LatticeOperator:
    """Linear operator on l^2(Z_N^d); immutable after construction."""

    KINDS = ("dense", "position", "fourier", "shift")

    def __init__(self, group: CyclicGroup, kind: str, data):
        if kind not in self.KINDS:
            raise LatticeError(f"unknown kind {kind!r}")
        self.group = group
        self.kind = kind
        if kind == "shift":
            data = group.element(data)
        else:
            data = np.array(data, dtype=complex)
            want = (group.order, group.order) if kind == "dense" else (group.order,)
            if data.shape != want:
                raise LatticeError(f"{kind} data must have shape {want}, got {data.shape}")
        data.setflags(write=False)
        self.data = data
        self.hermitian = self._hermitian()

    def _hermitian(self) -> bool:
        if self.kind in ("position", "fourier"):
            return bool(np.all(np.abs(self.data.imag) <= HERMITIAN_TOL))
        if self.kind == "shift":
            return not np.any(self.data) or bool(np.all(np.mod(2 * self.data, self.group.N) == 0))
        return bool(np.max(np.abs(self.data - self.data.conj().T), initial=0.0) <= HERMITIAN_TOL)

    @property
    def dim(self) -> int:
        return self.group.order

    @property
    def shape(self) -> tuple:
        return (self.dim, self.dim)

    def to_dense(self) -> np.ndarray:
        n = self.dim
        if self.kind == "dense":
            return np.array(self.data)
        if self.kind == "position":
            return np.diag(self.data)
        if self.kind == "shift":
            return _roll(self.group, np.eye(n, dtype=complex), self.data)
        eye = np.eye(n, dtype=complex)
        return inverse_fourier(self.group, self.data[:, None] * fourier(self.group, eye))

    def to_real_symmetric(self) -> np.ndarray:
        """Dense real part, exactly symmetrised; for real symmetric models."""
        M = self.to_dense().real
        return (M + M.T) / 2

    def apply(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=complex)
        if self.kind == "dense":
            return self.data @ f
        if self.kind == "position":
            return self.data.reshape((-1,) + (1,) * (f.ndim - 1)) * f
        if self.kind == "shift":
            return _roll(self.group, f, self.data)
        sym = self.data.reshape((-1,) + (1,) * (f.ndim - 1))
        return inverse_fourier(self.group, sym * fourier(self.group, f))

    def adjoint(self) -> "LatticeOperator":
        if self.kind == "dense":
            return LatticeOperator(self.group, "dense", self.data.conj().T)
        if self.kind == "shift":
            return LatticeOperator(self.group, "shift", -self.data)
        return LatticeOperator(self.group, self.kind, self.data.conj())

    @property
    def H(self) -> "LatticeOperator":
        return self.adjoint()

    def _same_group(self, other):
        if other.group != self.group:
            raise LatticeError("dimension mismatch: operators live on different groups")

    def __matmul__(self, other: "LatticeOperator") -> "LatticeOperator":
        self._same_group(other)
        if self.kind == other.kind and self.kind in ("position", "fourier"):
            return LatticeOperator(self.group, self.kind, self.data * other.data)
        if self.kind == other.kind == "shift":
            return LatticeOperator(self.group, "shift", self.data + other.data)
        return LatticeOperator(self.group, "dense", self.apply(other.to_dense()))

    def _combine(self, other, sign):
        if np.isscalar(other):
            return self._combine(identity(self.group).scaled(other), sign)
        self._same_group(other)
        if self.kind == other.kind and self.kind in ("position", "fourier"):
            return LatticeOperator(self.group, self.kind, self.data + sign * other.data)
        return LatticeOperator(self.group, "dense", self.to_dense() + sign * other.to_dense())

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scaled(self, c) -> "LatticeOperator":
        if self.kind == "shift":
            return LatticeOperator(self.group, "dense", c * self.to_dense())
        return LatticeOperator(self.group, self.kind, c * self.data)

    def __neg__(self):
        return self.scaled(-1.0)

    def __repr__(self):
        return f"LatticeOperator(N={self.group.N}, d={self.group.d}, kind={self.kind!r})"


def identity(group: CyclicGroup) -> LatticeOperator:
    return LatticeOperator(group, "position", np.ones(group.order))


def position_op(group: CyclicGroup, phi) -> LatticeOperator:
    return LatticeOperator(group, "position", np.asarray(phi))


def fourier_op(group: CyclicGroup, psi) -> LatticeOperator:
    return LatticeOperator(group, "fourier", np.asarray(psi))


def translation_op(group: CyclicGroup, a) -> LatticeOperator:
    """U_a, acting as (U_a f)(x) = f(x + a)."""
    return LatticeOperator(group, "shift", a)


def modulation_op(group: CyclicGroup, k) -> LatticeOperator:
    """V_k, multiplication by the character k."""
    return LatticeOperator(group, "position", group.character(k))


def translation_symbol(group: CyclicGroup, a) -> np.ndarray:
    """Fourier multiplier of U_a."""
    return np.conj(group.character(a))


def shifted_symbol(group: CyclicGroup, psi, k) -> np.ndarray:
    """p -> psi(p + k) as a flat array."""
    g = np.asarray(psi).reshape(group.shape)
    k = group.element(k)
    return np.roll(g, tuple(-int(s) for s in k), axis=tuple(range(group.d))).ravel()


def conjugate_by_modulation(R: LatticeOperator, k) -> LatticeOperator:
    """V_k R V_k^*."""
    g = R.group
    if R.kind == "position":
        return R
    if R.kind == "fourier":
        return fourier_op(g, shifted_symbol(g, R.data, k))
    chi = g.character(k)
    M = R.to_dense()
    return LatticeOperator(g, "dense", chi[:, None] * M * chi.conj()[None, :])


def conjugate_by_translation(R: LatticeOperator, a) -> LatticeOperator:
    """U_a R U_a^*, whose kernel is (x, y) -> R[x + a, y + a]."""
    g = R.group
    if R.kind in ("fourier", "shift"):
        return R
    if R.kind == "position":
        return position_op(g, _roll(g, R.data, g.element(a)))
    a = g.element(a)
    M = _roll(g, R.data, a)
    M = _roll(g, M.T, a).T
    return LatticeOperator(g, "dense", M)


# --- symbols ----------------------------------------------------------------

@dataclass(frozen=True)
class SymbolFn:
    """Real symbol on the dual group, optionally tagged elliptic of order 2m."""

    group: CyclicGroup
    values: np.ndarray = field(repr=False)
    m: float | None = None
    c_lo: float | None = None
    c_hi: float | None = None
    p0: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.group.order,):
            raise LatticeError("symbol table length mismatch")
        if np.iscomplexobj(v) and np.any(np.abs(v.imag) > HERMITIAN_TOL):
            raise LatticeError("symbol must be real")
        v = np.array(v.real, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.m is not None:
            self.check_elliptic()

    def check_elliptic(self):
        """Exhaustive check of c_lo |p|^2m <= h(p) <= c_hi |p|^2m for |p| >= p0."""
        p = self.group.dual_norm()
        sel = p >= self.p0
        w = p[sel] ** (2 * self.m)
        h = self.values[sel]
        if self.c_lo is not None and np.any(h < self.c_lo * w - 1e-12 * w):
            raise LatticeError("symbol violates its lower ellipticity bound")
        if self.c_hi is not None and np.any(h > self.c_hi * w + 1e-12 * w):
            raise LatticeError("symbol violates its upper ellipticity bound")

    def op(self) -> LatticeOperator:
        return fourier_op(self.group, self.values)


def elliptic_constants(group: CyclicGroup, values, m: float, p0: float = 1.0):
    """Tightest (c_lo, c_hi) with c_lo|p|^2m <= h(p) <= c_hi|p|^2m on |p| >= p0."""
    p = group.dual_norm()
    sel = p >= p0
    ratio = np.asarray(values)[sel] / p[sel] ** (2 * m)
    return float(ratio.min()), float(ratio.max())


def laplacian_symbol(group: CyclicGroup, spacing: float = 1.0) -> SymbolFn:
    """Symbol of the nearest-neighbour Laplacian: (4/s^2) sum_i sin^2(pi p_i / N)."""
    e = group.elements()
    vals = (4.0 / spacing ** 2) * np.sum(np.sin(np.pi * e / group.N) ** 2, axis=1)
    lo, hi = elliptic_constants(group, vals, 1.0)
    return SymbolFn(group, vals, m=1.0, c_lo=lo, c_hi=hi)


def power_symbol(group: CyclicGroup, m: float, spacing: float = 1.0) -> SymbolFn:
    """|p|^{2m} with physical momentum p = 2*pi*p_centered / (N*spacing)."""
    k = 2 * np.pi * group.centered() / (group.N * spacing)
    vals = np.linalg.norm(k, axis=1) ** (2 * m)
    lo, hi = elliptic_constants(group, vals, m)
    return SymbolFn(group, vals, m=m, c_lo=lo, c_hi=hi)


# --- Hamiltonians, resolvents ---------------------------------------------------

def build_hamiltonian(group: CyclicGroup, h, V) -> LatticeOperator:
    """Dense Hermitian h(P) + V(Q)."""
    hv = h.values if isinstance(h, SymbolFn) else np.asarray(h)
    V = np.asarray(V)
    if np.iscomplexobj(hv) and np.any(np.abs(np.imag(hv)) > 0):
        raise LatticeError("symbol must be real")
    if np.iscomplexobj(V) and np.any(np.abs(np.imag(V)) > 0):
        raise LatticeError("potential must be real")
    if hv.shape != (group.order,) or V.shape != (group.order,):
        raise LatticeError("symbol and potential must have one value per group element")
    M = fourier_op(group, np.real(hv)).to_dense()
    M = (M + M.conj().T) / 2 + np.diag(np.real(V).astype(complex))
    return LatticeOperator(group, "dense", M)


def eigvalsh(A: LatticeOperator) -> np.ndarray:
    if A.kind in ("position", "fourier"):
        return np.sort(A.data.real)
    return np.linalg.eigvalsh(A.to_dense())


def resolvent(H: LatticeOperator, z: complex) -> LatticeOperator:
    """(H - z)^{-1}, with a residual check ``max|(H-z)R - I| <= 1e-10``."""
    if H.hermitian:
        ev = eigvalsh(H)
        dist = np.min(np.abs(ev - z))
        if dist < 1e-8:
            raise SpectrumError(f"z = {z} lies within {dist:.2e} of the spectrum")
    if H.kind in ("position", "fourier"):
        return LatticeOperator(H.group, H.kind, 1.0 / (H.data - z))
    A = H.to_dense() - z * np.eye(H.dim)
    R = np.linalg.solve(A, np.eye(H.dim, dtype=complex))
    resid = np.max(np.abs(A @ R - np.eye(H.dim)))
    if resid > 1e-10:
        raise SpectrumError(f"resolvent residual {resid:.2e} exceeds 1e-10")
    return LatticeOperator(H.group, "dense", R)


# --- norms -------------------------------------------------------------------

def opnorm(M: np.ndarray, tol: float = 1e-6, seed: int = 0, max_iter: int = 2000):
    """(largest singular value, method)."""
    if M.shape[0] <= DENSE_CAP:
        return float(np.linalg.norm(M, 2)), "dense_svd"
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(M.shape[1]) + 1j * rng.standard_normal(M.shape[1])
    x /= np.linalg.norm(x)
    prev = 0.0
    for _ in range(max_iter):
        y = M.conj().T @ (M @ x)
        s = np.linalg.norm(y)
        if s == 0:
            return 0.0, "power_iteration"
        x = y / s
        est = math.sqrt(s)
        if abs(est - prev) <= tol * est:
            break
        prev = est
    return est, "power_iteration"


def modulation_regularity_norm(R: LatticeOperator, k) -> float:
    """||V_k R V_k^* - R||."""
    g = R.group
    if R.kind == "position":
        return 0.0
    if R.kind == "fourier":
        return float(np.max(np.abs(shifted_symbol(g, R.data, k) - R.data)))
    D = conjugate_by_modulation(R, k).to_dense() - R.to_dense()
    return opnorm(D)[0]


def translation_regularity_norm(R: LatticeOperator, a) -> float:
    """||(U_a - 1) R||."""
    g = R.group
    a = g.element(a)
    if not np.any(a):
        return 0.0
    if R.kind == "fourier":
        return float(np.max(np.abs(translation_symbol(g, a) - 1) * np.abs(R.data)))
    M = R.to_dense()
    return opnorm(_roll(g, M, a) - M)[0]


def gaussian_bump(group: CyclicGroup, width: float, center=None) -> np.ndarray:
    """Normalised Gaussian of the given width (in lattice cells), on the torus."""
    c = np.zeros(group.d) if center is None else np.asarray(center, float)
    diff = group.elements() - c
    diff = np.mod(diff + group.N / 2, group.N) - group.N / 2
    f = np.exp(-np.sum(diff ** 2, axis=1) / (2 * width ** 2)).astype(complex)
    return f / np.linalg.norm(f)


def default_battery(group: CyclicGroup, width: float = 1.0, modes=(1, 2)) -> list[np.ndarray]:
    """Localised bumps at the origin, plain and modulated by low-frequency characters.

    Plane waves are left out: |<e_p, U_a R U_a^* e_p>| does not depend on a.
    """
    f = gaussian_bump(group, width)
    out = [f]
    for k in modes:
        kk = np.zeros(group.d, dtype=int)
        kk[0] = k
        out.append(group.character(kk) * f)
    return out


def weak_translation_decay(R: LatticeOperator, a_ladder, test_vectors) -> np.ndarray:
    """max over (f, g) of |<f, U_a R U_a^* g>| for each a in the ladder."""
    if not test_vectors:
        raise LatticeError("empty test-vector battery")
    g = R.group
    F = np.column_stack([np.asarray(v, complex) for v in test_vectors])
    out = []
    base = None
    for a in a_ladder:
        a = g.element(np.atleast_1d(a))
        if R.kind in ("fourier", "shift"):
            # U_a commutes with Fourier multipliers
            if base is None:
                base = float(np.max(np.abs(F.conj().T @ R.apply(F))))
            out.append(base)
            continue
        Fa = _roll(g, F, -a)  # (U_a^* f)(x) = f(x - a)
        out.append(float(np.max(np.abs(Fa.conj().T @ R.apply(Fa)))))
    return np.array(out)


# --- inequalities ----------------------------------------------------------------

@dataclass
class InequalityVerdict:
    holds: bool
    min_eigenvalue: float
    witness: np.ndarray | None = field(default=None, repr=False)

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "fails"


def operator_inequality_check(A: LatticeOperator, B: LatticeOperator,
                              tol: float = 1e-10) -> InequalityVerdict:
    """A <= B iff the smallest eigenvalue of B - A is >= -tol."""
    if A.group != B.group:
        raise LatticeError("dimension mismatch")
    if not (A.hermitian and B.hermitian):
        raise LatticeError("operator_inequality_check needs Hermitian operators")
    D = B - A
    if D.kind in ("position", "fourier"):
        vals = D.data.real
        i = int(np.argmin(vals))
        w = np.zeros(D.dim, complex)
        w[i] = 1
        if D.kind == "fourier":
            w = inverse_fourier(A.group, w)
        lo = float(vals[i])
    else:
        M = D.to_dense()
        M = (M + M.conj().T) / 2
        ev, vec = np.linalg.eigh(M)
        lo, w = float(ev[0]), vec[:, 0]
    holds = lo >= -tol
    return InequalityVerdict(holds, lo, None if holds else w)


@dataclass
class TailBound:
    norm: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.norm <= self.bound + 1e-10


def compact_tail_bound(R: LatticeOperator, theta, phi) -> TailBound:
    """||phi_perp R phi_perp|| against max(theta * phi_perp^2), phi_perp = 1 - phi.

    Requires ``-theta(Q) <= R <= theta(Q)``; raises :class:`HypothesisError` otherwise.
    """
    g = R.group
    theta = np.asarray(theta, float)
    phi = np.asarray(phi, float)
    if np.any(theta < 0):
        raise HypothesisError("theta must be nonnegative")
    if np.any(phi < 0) or np.any(phi > 1):
        raise HypothesisError("cutoff must satisfy 0 <= phi <= 1")
    T = position_op(g, theta)
    if not (operator_inequality_check(R, T).holds and operator_inequality_check(-R, T).holds):
        raise HypothesisError("±R <= theta(Q) fails")
    perp = position_op(g, 1.0 - phi)
    tail = (perp @ R) @ perp
    norm = opnorm(tail.to_dense())[0] if tail.kind == "dense" else float(np.max(np.abs(tail.data)))
    return TailBound(norm, float(np.max(theta * (1.0 - phi) ** 2)))


@dataclass
class ThetaVerdict:
    holds: bool
    min_eigenvalue: float
    growth: float
    witness: np.ndarray | None = field(default=None, repr=False)

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "fails"


def theta_criterion_check(H: LatticeOperator, Theta, window: float | None = None) -> ThetaVerdict:
    """H - Theta(Q) >= 0, plus min of Theta outside the central window.

    ``window`` is a radius in lattice cells (default N/4); the growth surrogate is
    the smallest value of Theta at centred positions farther out.
    """
    g = H.group
    Theta = np.asarray(Theta, float)
    iv = operator_inequality_check(position_op(g, Theta), H)
    r = np.linalg.norm(g.centered(), axis=1)
    w = g.N / 4 if window is None else window
    outside = r > w
    growth = float(Theta[outside].min()) if outside.any() else float("nan")
    return ThetaVerdict(iv.holds, iv.min_eigenvalue, growth, iv.witness)


def resolvent_identity_check(group: CyclicGroup, h, V, k, shift: float | None = None) -> float:
    """||(R_k - R) - R_k (h(P) - h(P+k)) R|| for R = (H + c)^{-1}, R_k = (H_k + c)^{-1}.

    ``H_k = V_k H V_k^* = h(P+k) + V(Q)`` is assembled independently of R.
    """
    hv = h.values if isinstance(h, SymbolFn) else np.asarray(h, float)
    V = np.asarray(V, float)
    H = build_hamiltonian(group, hv, V)
    lo = float(eigvalsh(H)[0])
    c = 1.0 - lo if shift is None else float(shift)
    if lo + c < 1.0 - 1e-12:
        raise HypothesisError(f"shift too small: H + c has bottom {lo + c:.3g} < 1")
    hk = shifted_symbol(group, hv, k)
    Hk = build_hamiltonian(group, hk, V)
    n = group.order
    R = np.linalg.inv(H.to_dense() + c * np.eye(n))
    Rk = np.linalg.inv(Hk.to_dense() + c * np.eye(n))
    diff = fourier_op(group, hv - hk).to_dense()
    return opnorm((Rk - R) - Rk @ diff @ R)[0]


# --- physical model ------------------------------------------------------------

@dataclass(frozen=True)
class LatticeModel:
    """Discretised ``h(P) + V(Q) + shift`` on Z_N^d.

    Lattice spacing defaults to the self-dual value sqrt(2*pi/N), for which the
    physical position step and the dual momentum step coincide; both shrink as N
    grows while the physical box sqrt(2*pi*N) grows.
    """

    N: int
    d: int = 1
    potential: str = "x0^4"
    symbol: str = "laplacian"
    shift: float = 1.0
    spacing: float | None = None

    @property
    def group(self) -> CyclicGroup:
        return CyclicGroup(self.N, self.d)

    @property
    def dx(self) -> float:
        return self.spacing if self.spacing is not None else math.sqrt(2 * math.pi / self.N)

    def positions(self) -> np.ndarray:
        return self.group.centered() * self.dx

    def potential_spec(self) -> PotentialSpec | None:
        if self.potential in ("", "none"):
            return None
        return resolve(self.potential, self.d) if self.potential != "zero" else builtin("zero", self.d)

    def potential_values(self) -> np.ndarray:
        spec = self.potential_spec()
        if spec is None:
            return np.zeros(self.group.order)
        return spec.sample(self.positions())

    def symbol_fn(self) -> SymbolFn:
        g = self.group
        if self.symbol == "laplacian":
            return laplacian_symbol(g, self.dx)
        if self.symbol in ("none", "zero"):
            return SymbolFn(g, np.zeros(g.order))
        if self.symbol.startswith("power:"):
            return power_symbol(g, float(self.symbol.split(":", 1)[1]), self.dx)
        raise LatticeError(f"unknown symbol {self.symbol!r}")

    def hamiltonian(self) -> LatticeOperator:
        g = self.group
        V = self.potential_values() + self.shift
        return build_hamiltonian(g, self.symbol_fn(), V)

    def battery(self) -> list[np.ndarray]:
        return default_battery(self.group, width=1.0 / self.dx)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ProbeReport:
    N: int
    d: int
    probe: str
    ladder: list
    values: list
    method: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def to_dict(self) -> dict:
        return asdict(self)
