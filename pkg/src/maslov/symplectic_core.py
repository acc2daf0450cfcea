"""Linear symplectic algebra on (R^2n, omega).

Vectors are ordered (x_1..x_n, xi_1..xi_n) and the form is fixed once,
centrally, as

    omega((x, xi), (x', xi')) = sum_j xi_j x'_j - xi'_j x_j,

so its Gram matrix on the standard basis is ``[[0, -I], [I, 0]]``.  The
compatible complex structure J, (x, xi) |-> (-xi, x), has the same matrix;
``complex_structure`` and ``omega_matrix`` are kept as separate names
because they play different roles.

Frames are orthonormalized on construction; every operation on subspaces is
invariant under the right GL(n) action on frame columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    DegenerateFormError,
    DimensionMismatchError,
    InternalNumericsError,
    InvalidInputError,
    TransversalityError,
)

TOL_RANK = 1e-9  # relative singular-value cutoff for rank decisions
TOL_LAG = 1e-9   # max |omega(c_i, c_j)| allowed on a validated frame
TOL_EIG = 1e-9   # relative eigenvalue zero-threshold for signatures


def set_rank_tolerance(value: float) -> None:
    """Adjust the global relative rank cutoff (CLI --tol-rank)."""
    global TOL_RANK
    if value <= 0 or value >= 1:
        raise InvalidInputError(f"rank tolerance must be in (0, 1), got {value}")
    TOL_RANK = float(value)


def _rank_tol(rtol: float | None) -> float:
    return TOL_RANK if rtol is None else rtol


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@lru_cache(maxsize=None)
def omega_matrix(n: int) -> np.ndarray:
    """Gram matrix of omega on the standard basis of R^2n."""
    eye = np.eye(n)
    top = np.hstack([np.zeros((n, n)), -eye])
    bot = np.hstack([eye, np.zeros((n, n))])
    return _readonly(np.vstack([top, bot]))


@lru_cache(maxsize=None)
def complex_structure(n: int) -> np.ndarray:
    """Matrix of J: (x, xi) |-> (-xi, x); J^2 = -1 and omega(Ju, v) = <u, v>."""
    return omega_matrix(n)


@dataclass(frozen=True)
class SymplecticSpace:
    """R^2n with the standard symplectic form."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError(f"half-dimension must be >= 1, got {self.n}")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def omega_mat(self) -> np.ndarray:
        return omega_matrix(self.n)

    def omega(self, u, v) -> float:
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        if u.shape != (self.dim,) or v.shape != (self.dim,):
            raise DimensionMismatchError(
                f"expected vectors of length {self.dim}"
            )
        n = self.n
        return float(u[n:] @ v[:n] - v[n:] @ u[:n])


def _orthonormalize(cols: np.ndarray) -> np.ndarray:
    # QR with the R-diagonal forced positive: deterministic, and canonical
    # frames (coordinate planes, graphs) keep their natural representatives.
    q, r = np.linalg.qr(cols)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


class LagrangianFrame:
    """An n-dimensional Lagrangian subspace of (R^2n, omega).

    Stored as an orthonormalized 2n x n matrix of column generators.  Two
    frames denote the same subspace iff they differ by a right GL(n)
    factor; all derived quantities only depend on the span.
    """

    __slots__ = ("space", "columns", "_det2")

    def __init__(self, space: SymplecticSpace, columns, *, check: bool = True):
        cols = np.asarray(columns, dtype=float)
        if cols.ndim != 2 or cols.shape != (space.dim, space.n):
            raise DimensionMismatchError(
                f"frame must be {space.dim}x{space.n}, got {cols.shape}"
            )
        if check:
            svals = np.linalg.svd(cols, compute_uv=False)
            if svals[-1] <= TOL_RANK * svals[0]:
                raise InvalidInputError(
                    "frame columns are rank deficient "
                    f"(smallest/largest singular value = {svals[-1] / svals[0]:.2e})"
                )
        cols = _orthonormalize(cols)
        if check:
            gram = cols.T @ space.omega_mat @ cols
            worst = float(np.max(np.abs(gram)))
            if worst > TOL_LAG:
                raise InvalidInputError(
                    f"columns do not span a Lagrangian subspace "
                    f"(max |omega(c_i, c_j)| = {worst:.2e})"
                )
        self.space = space
        self.columns = _readonly(cols)
        self._det2 = None

    # -- canonical frames ------------------------------------------------
    @classmethod
    def horizontal(cls, space: SymplecticSpace) -> "LagrangianFrame":
        """The plane {xi = 0}."""
        cols = np.vstack([np.eye(space.n), np.zeros((space.n, space.n))])
        return cls(space, cols, check=False)

    @classmethod
    def vertical(cls, space: SymplecticSpace) -> "LagrangianFrame":
        """The plane {x = 0}."""
        cols = np.vstack([np.zeros((space.n, space.n)), np.eye(space.n)])
        return cls(space, cols, check=False)

    @classmethod
    def from_symmetric(cls, space: SymplecticSpace, sym) -> "LagrangianFrame":
        """The graph {(x, Sx)} of a symmetric matrix S."""
        s = np.asarray(sym, dtype=float)
        if s.shape != (space.n, space.n):
            raise DimensionMismatchError(
                f"symmetric block must be {space.n}x{space.n}, got {s.shape}"
            )
        if not np.allclose(s, s.T, atol=1e-10):
            raise InvalidInputError("graph matrix must be symmetric")
        s = 0.5 * (s + s.T)
        return cls(space, np.vstack([np.eye(space.n), s]), check=False)

    # ---------------------------------------------------------------------
    def __repr__(self):
        return f"LagrangianFrame(n={self.space.n})"


class IsotropicSubspace:
    """An m-dimensional subspace of R^2N on which omega vanishes."""

    __slots__ = ("space", "columns")

    def __init__(self, space: SymplecticSpace, columns):
        cols = np.asarray(columns, dtype=float)
        if cols.ndim != 2 or cols.shape[0] != space.dim:
            raise DimensionMismatchError(
                f"columns must have {space.dim} rows, got {cols.shape}"
            )
        m = cols.shape[1]
        if not 1 <= m <= space.n:
            raise InvalidInputError(
                f"isotropic dimension must be in [1, {space.n}], got {m}"
            )
        svals = np.linalg.svd(cols, compute_uv=False)
        if svals[-1] <= TOL_RANK * svals[0]:
            raise InvalidInputError("isotropic columns are rank deficient")
        cols = _orthonormalize(cols)
        gram = cols.T @ space.omega_mat @ cols
        if np.max(np.abs(gram)) > TOL_LAG:
            raise InvalidInputError("columns do not span an isotropic subspace")
        self.space = space
        self.columns = _readonly(cols)

    @property
    def dim(self) -> int:
        return self.columns.shape[1]


@dataclass(frozen=True, eq=False)
class SymQuadForm:
    """A real symmetric form with an eigenvalue zero-threshold policy.

    Eigenvalues within ``tol * spectral radius`` of zero count as zero; the
    matrix is symmetrized on construction.
    """

    matrix: np.ndarray
    tol: float = TOL_EIG
    _eigs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputError(f"form matrix must be square, got {m.shape}")
        if self.tol <= 0:
            raise InvalidInputError("tolerance must be positive")
        sym = _readonly(0.5 * (m + m.T))
        object.__setattr__(self, "matrix", sym)
        eigs = np.linalg.eigvalsh(sym) if m.shape[0] else np.zeros(0)
        object.__setattr__(self, "_eigs", _readonly(eigs))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def _zero_cut(self) -> float:
        radius = float(np.max(np.abs(self._eigs))) if self.dim else 0.0
        return self.tol * radius

    @property
    def kernel_dim(self) -> int:
        return int(np.sum(np.abs(self._eigs) <= self._zero_cut()))

    @property
    def nondegenerate(self) -> bool:
        return self.dim > 0 and self.kernel_dim == 0 or self.dim == 0


def signature(q: SymQuadForm) -> int:
    """#positive - #negative eigenvalues, with the form's zero-threshold."""
    if q.dim == 0:
        return 0
    cut = q._zero_cut()
    return int(np.sum(q._eigs > cut)) - int(np.sum(q._eigs < -cut))


def _null_space(a: np.ndarray, rtol: float | None = None) -> np.ndarray:
    """Orthonormal basis of ker(a), columns; shape (a.shape[1], nullity)."""
    rtol = _rank_tol(rtol)
    a = np.atleast_2d(np.asarray(a, float))
    if a.size == 0:
        return np.eye(a.shape[1])
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    cut = rtol * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > cut))
    return vh[rank:].T.copy()


def _range_space(a: np.ndarray, rtol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the column span, rank revealed by SVD."""
    rtol = _rank_tol(rtol)
    a = np.asarray(a, float)
    if a.shape[1] == 0:
        return a.copy()
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    cut = rtol * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > cut))
    return u[:, :rank].copy()


def _check_same_space(*frames) -> SymplecticSpace:
    space = frames[0].space
    for f in frames[1:]:
        if f.space != space:
            raise DimensionMismatchError(
                f"operands live over different spaces: n={space.n} vs n={f.space.n}"
            )
    return space


def intersection_dim(a: LagrangianFrame, b: LagrangianFrame,
                     rtol: float | None = None) -> int:
    """dim(a ^ b) = 2n - rank([a | b])."""
    rtol = _rank_tol(rtol)
    space = _check_same_space(a, b)
    stacked = np.hstack([a.columns, b.columns])
    svals = np.linalg.svd(stacked, compute_uv=False)
    rank = int(np.sum(svals > rtol * svals[0]))
    return space.dim - rank


def same_subspace(a: LagrangianFrame, b: LagrangianFrame) -> bool:
    return intersection_dim(a, b) == a.space.n


def j_frame(a: LagrangianFrame) -> LagrangianFrame:
    """J applied columnwise: a Lagrangian complement, always transversal to a."""
    cols = complex_structure(a.space.n) @ a.columns
    return LagrangianFrame(a.space, cols, check=False)


def rotate_frame(a: LagrangianFrame, theta: float) -> LagrangianFrame:
    """Apply exp(theta J) = cos(theta) I + sin(theta) J (symplectic, orthogonal)."""
    n = a.space.n
    rot = np.cos(theta) * np.eye(2 * n) + np.sin(theta) * complex_structure(n)
    return LagrangianFrame(a.space, rot @ a.columns, check=False)


def det_squared_phase(a: LagrangianFrame) -> complex:
    """det(X + i Xi)^2 / |det|^2: the squared-determinant phase of the span.

    Invariant under the right GL(n) action because det(G)^2 is real positive.
    """
    if a._det2 is not None:
        return a._det2
    n = a.space.n
    z = a.columns[:n] + 1j * a.columns[n:]
    det = np.linalg.det(z)
    mag = abs(det)
    # orthonormal Lagrangian frames give |det| = 1 exactly up to roundoff
    if mag < 1e-6:
        raise InternalNumericsError(
            f"|det(X + i Xi)| = {mag:.2e}; frame is not a valid Lagrangian frame"
        )
    val = det / mag
    a._det2 = val * val
    return a._det2


def graph_frame(base: LagrangianFrame, sym) -> LagrangianFrame:
    """Graph of the map base -> J(base) given by a symmetric matrix.

    The resulting subspace is Lagrangian for every symmetric input and
    transversal to J(base); sym = 0 returns (the span of) base itself.
    """
    s = np.asarray(sym, dtype=float)
    n = base.space.n
    if s.shape != (n, n):
        raise DimensionMismatchError(f"expected {n}x{n} symmetric matrix")
    s = 0.5 * (s + s.T)
    jb = complex_structure(n) @ base.columns
    return LagrangianFrame(base.space, base.columns + jb @ s, check=False)


def graph_coords(lam: LagrangianFrame, base: LagrangianFrame,
                 rtol: float | None = None) -> np.ndarray:
    """Inverse of ``graph_frame``: the symmetric matrix M with
    graph_frame(base, M) spanning lam.  Requires lam transversal to J(base)."""
    rtol = _rank_tol(rtol)
    _check_same_space(lam, base)
    n = base.space.n
    jb = complex_structure(n) @ base.columns
    # [base | J base] is orthogonal, so the decomposition is a transpose
    u = base.columns.T @ lam.columns
    w = jb.T @ lam.columns
    svals = np.linalg.svd(u, compute_uv=False)
    if svals[-1] <= rtol * max(svals[0], 1.0):
        raise TransversalityError("lam", "J(base)",
                                  "no graph coordinates in this chart")
    m = np.linalg.solve(u.T, w.T).T
    asym = float(np.max(np.abs(m - m.T)))
    if asym > 1e-7 * max(1.0, float(np.max(np.abs(m)))):
        raise InternalNumericsError(
            f"graph coordinates came out non-symmetric (|M - M^T| = {asym:.2e})"
        )
    return 0.5 * (m + m.T)


def graph_form(alpha: LagrangianFrame, beta: LagrangianFrame,
               gamma: LagrangianFrame, tol: float = TOL_EIG) -> SymQuadForm:
    """The symmetric form omega(C., .) on alpha, where gamma is the graph of
    C: alpha -> beta.

    Needs beta transversal to alpha and gamma transversal to beta; the
    kernel of the result is alpha ^ gamma.
    """
    space = _check_same_space(alpha, beta, gamma)
    if intersection_dim(alpha, beta) != 0:
        raise TransversalityError("beta", "alpha")
    ab = np.hstack([alpha.columns, beta.columns])
    sol = np.linalg.solve(ab, gamma.columns)
    u, w = sol[: space.n], sol[space.n:]
    svals = np.linalg.svd(u, compute_uv=False)
    if svals[-1] <= TOL_RANK * max(svals[0], 1.0):
        raise TransversalityError("gamma", "beta",
                                  "gamma is not a graph over alpha along beta")
    m = np.linalg.solve(u.T, w.T).T  # C in the frame bases
    pairing = beta.columns.T @ space.omega_mat @ alpha.columns
    q = m.T @ pairing
    return SymQuadForm(q, tol)


def signature_split(q: SymQuadForm, v_basis,
                    rtol: float | None = None) -> tuple[int, int]:
    """(sgn Q|V, sgn Q|V^Q) for nondegenerate Q; the two always sum to sgn Q.

    V^Q is the Q-orthogonal {w : Q(w, V) = 0}, computed as the null space of
    the pairing matrix V^T Q.
    """
    rtol = _rank_tol(rtol)
    if q.dim == 0 or not q.nondegenerate:
        raise DegenerateFormError(
            "signature_split needs a nondegenerate form "
            f"(kernel dimension {q.kernel_dim})"
        )
    v = np.asarray(v_basis, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape[0] != q.dim:
        raise DimensionMismatchError(
            f"subspace basis must have {q.dim} rows, got {v.shape}"
        )
    v = _range_space(v, rtol)
    w = _null_space(v.T @ q.matrix, rtol)
    sign_v = signature(SymQuadForm(v.T @ q.matrix @ v, q.tol))
    sign_w = signature(SymQuadForm(w.T @ q.matrix @ w, q.tol))
    return sign_v, sign_w


def _symplectic_pairs(space: SymplecticSpace,
                      w_basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic symplectic basis (e_1..e_n, f_1..f_n) of a symplectic
    subspace W, grown from the projections of the standard basis.

    Normalization follows the coordinate convention: omega(f_i, e_j) = delta_ij,
    so e's play the x role and f's the xi role.
    """
    omega = space.omega_mat
    proj = w_basis @ w_basis.T
    pool: list[np.ndarray] = []
    # seed with the standard basis projected into W, dropping dependents
    for k in range(space.dim):
        cand = proj[:, k].copy()
        for b in pool:
            cand -= (b @ cand) * b
        norm = np.linalg.norm(cand)
        if norm > 1e-10:
            pool.append(cand / norm)
    if len(pool) != w_basis.shape[1]:
        raise InternalNumericsError("could not seed a basis of the symplectic subspace")
    es, fs = [], []
    while pool:
        e = pool.pop(0)
        if not pool:
            raise InternalNumericsError("odd leftover while pairing symplectic basis")
        vals = [abs(v @ omega @ e) for v in pool]
        j = int(np.argmax(vals))
        if vals[j] <= 1e-10:
            raise InternalNumericsError("omega degenerated while pairing basis")
        f = pool.pop(j)
        f = f / float(f @ omega @ e)  # omega(f, e) = 1
        rest = []
        for v in pool:
            v = v + (v @ omega @ f) * e - (v @ omega @ e) * f
            rest.append(v)
        if rest:
            q, _ = np.linalg.qr(np.column_stack(rest))
            rest = [q[:, k] for k in range(q.shape[1])]
        pool = rest
        es.append(e)
        fs.append(f)
    return np.column_stack(es), np.column_stack(fs)


def reduce(lam: LagrangianFrame, delta: IsotropicSubspace,
           rtol: float | None = None) -> LagrangianFrame:
    """Symplectic reduction: the Lagrangian (lam ^ delta^omega)/(lam ^ delta)
    of the quotient space delta^omega/delta, expressed in a deterministic
    symplectic basis grown from the standard one.
    """
    rtol = _rank_tol(rtol)
    space = lam.space
    if delta.space != space:
        raise DimensionMismatchError("frame and isotropic subspace spaces differ")
    m = delta.dim
    n_red = space.n - m
    if n_red < 1:
        raise InvalidInputError("reduction would leave an empty space")
    omega = space.omega_mat
    d = delta.columns
    # W = delta^omega ^ delta-perp, a symplectic complement of delta in delta^omega
    w_basis = _null_space(np.vstack([d.T @ omega, d.T]), rtol)
    es, fs = _symplectic_pairs(space, w_basis)
    # lam ^ delta^omega via the joint null space of [lam | basis(delta^omega)]
    domega = _null_space(d.T @ omega, rtol)
    joint = _null_space(np.hstack([lam.columns, domega]), rtol)
    inter = lam.columns @ joint[: space.n]
    inter = _range_space(inter, rtol)
    if inter.shape[1] < n_red:
        raise InternalNumericsError("lam ^ delta^omega came out too small")
    # quotient coordinates: v = [es fs] c + delta d  ->  c
    full = np.hstack([es, fs, d])
    coords = np.linalg.lstsq(full, inter, rcond=None)[0][: 2 * n_red]
    reduced_cols = _range_space(coords, rtol)
    if reduced_cols.shape[1] != n_red:
        raise InternalNumericsError(
            f"reduced image has rank {reduced_cols.shape[1]}, expected {n_red}"
        )
    return LagrangianFrame(SymplecticSpace(n_red), reduced_cols)
