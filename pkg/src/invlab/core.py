"""Dense binary64 linear algebra kernels.

Square matrices in row-major numpy storage. The factorizations (GEPP-LU,
Householder QR, one-sided Jacobi SVD) and the triangular solves are written
out longhand, column by column, so the arithmetic order is fixed and every
run reproduces bit for bit; the dense product is the one place we hand off
to the BLAS. All functions are pure: inputs are never mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NonConvergenceError, SingularMatrixError
from .rng import Rng

EPS = 2.0 ** -53  # binary64 unit roundoff

NORM_SVD_CUTOFF = 64     # norm2 uses the Jacobi SVD up to this order
POWER_TOL = 1e-6         # relative change stop for power iteration
POWER_MAX_ITERS = 200
JACOBI_MAX_SWEEPS = 30

_POWER_SEED = 0x6E6F726D32  # fixed start-vector stream for power iteration


def _as_array(data, ndim, what):
    arr = np.array(data, dtype=np.float64, order="C", copy=True)
    if arr.ndim != ndim or 0 in arr.shape:
        raise DimensionMismatchError(f"{what} must be {ndim}-d and non-empty")
    if not np.isfinite(arr).all():
        raise ValueError(f"{what} entries must be finite")
    arr.flags.writeable = False
    return arr


class Matrix:
    """Immutable dense real matrix."""

    __slots__ = ("data",)

    def __init__(self, data):
        self.data = _as_array(data, 2, "matrix")

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols})"


class Vector:
    """Immutable dense real vector."""

    __slots__ = ("data",)

    def __init__(self, data):
        self.data = _as_array(data, 1, "vector")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def __repr__(self):
        return f"Vector({self.n})"


def identity(n: int) -> Matrix:
    return Matrix(np.eye(n))


def _require_square(a: Matrix, what: str) -> int:
    if a.rows != a.cols:
        raise DimensionMismatchError(f"{what} requires a square matrix, got {a.rows}x{a.cols}")
    return a.rows


@dataclass(frozen=True)
class LuFactors:
    """Packed GEPP factorization P A = L U.

    ``lu`` holds U on and above the diagonal and the unit-lower multipliers
    below it; ``perm[i]`` is the source row of A that became row i of P A.
    """

    lu: np.ndarray
    perm: np.ndarray

    @property
    def n(self) -> int:
        return self.lu.shape[0]


@dataclass(frozen=True)
class QrFactors:
    """Packed Householder factorization A = Q R.

    ``qr`` holds R on and above the diagonal and the reflector tails below
    it (leading reflector entry normalized to 1 and implicit); ``tau[k]`` is
    the scale of reflector k, zero meaning the identity reflector.
    """

    qr: np.ndarray
    tau: np.ndarray

    @property
    def n(self) -> int:
        return self.qr.shape[0]


@dataclass(frozen=True)
class SvdFactors:
    """Factors a = l @ diag(sigma) @ r.T with orthonormal l, r columns."""

    l: Matrix
    sigma: np.ndarray
    r: Matrix

    def __post_init__(self):
        sig = np.asarray(self.sigma, dtype=np.float64)
        if sig.ndim != 1:
            raise DimensionMismatchError("sigma must be 1-d")
        if np.any(sig < 0.0) or np.any(sig[:-1] < sig[1:]):
            raise ValueError("singular values must be nonnegative and nonincreasing")
        object.__setattr__(self, "sigma", sig)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Dense product (BLAS gemm on the raw arrays)."""
    if a.cols != b.rows:
        raise DimensionMismatchError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    return Matrix(a.data @ b.data)


def matvec(a: Matrix, x: Vector) -> Vector:
    if a.cols != x.n:
        raise DimensionMismatchError(f"cannot apply {a.rows}x{a.cols} to length-{x.n} vector")
    return Vector(a.data @ x.data)


def lu_gepp(a: Matrix) -> LuFactors:
    """LU with partial pivoting; pivot = first maximal |entry| down the column."""
    n = _require_square(a, "lu_gepp")
    scale = norm2(a)
    tol = n * EPS * scale
    lu = a.data.copy()
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))  # argmax ties -> lowest row
        if abs(lu[p, k]) <= tol:
            raise SingularMatrixError(
                f"singular pivot {lu[p, k]!r} at elimination step {k}", detail=k
            )
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    lu.flags.writeable = False
    perm.flags.writeable = False
    return LuFactors(lu, perm)


def solve_lu(f: LuFactors, b: Vector) -> Vector:
    """Solve A x = b through the packed factors of A."""
    n = f.n
    if b.n != n:
        raise DimensionMismatchError(f"factors are {n}x{n}, rhs has length {b.n}")
    lu = f.lu
    y = b.data[f.perm].copy()
    for i in range(1, n):  # unit lower forward substitution
        y[i] -= lu[i, :i] @ y[:i]
    x = np.empty(n)
    for i in range(n - 1, -1, -1):  # upper back substitution
        x[i] = (y[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return Vector(x)


def solve_lu_transposed(f: LuFactors, b: Vector) -> Vector:
    """Solve A^T y = b through factors of A (no second factorization).

    With P A = L U this is U^T L^T P y = b: one forward substitution with
    U^T, one back substitution with L^T, then the inverse row permutation.
    """
    n = f.n
    if b.n != n:
        raise DimensionMismatchError(f"factors are {n}x{n}, rhs has length {b.n}")
    lu = f.lu
    z = np.empty(n)
    for i in range(n):  # U^T is lower triangular, non-unit diagonal
        z[i] = (b.data[i] - lu[:i, i] @ z[:i]) / lu[i, i]
    w = np.empty(n)
    for i in range(n - 1, -1, -1):  # L^T is unit upper triangular
        w[i] = z[i] - lu[i + 1:, i] @ w[i + 1:]
    y = np.empty(n)
    y[f.perm] = w
    return Vector(y)


def qr_householder(a: Matrix) -> QrFactors:
    """Householder QR; reflector sign follows the leading entry (no cancellation)."""
    n = _require_square(a, "qr_householder")
    qr = a.data.copy()
    tau = np.zeros(n)
    for k in range(n):
        x = qr[k:, k]
        normx = math.sqrt(float(x @ x))
        if normx == 0.0:
            continue  # zero column: identity reflector, tau stays 0
        alpha = -normx if x[0] >= 0.0 else normx
        v = x.copy()
        v[0] -= alpha
        v /= v[0]  # normalize so the stored reflector has leading 1
        tau[k] = 2.0 / float(v @ v)
        w = tau[k] * (v @ qr[k:, k + 1:])
        qr[k:, k + 1:] -= np.outer(v, w)
        qr[k, k] = alpha
        qr[k + 1:, k] = v[1:]
    qr.flags.writeable = False
    tau.flags.writeable = False
    return QrFactors(qr, tau)


def _apply_q_transpose(f: QrFactors, vec: np.ndarray) -> None:
    """vec <- Q^T vec in place (reflectors applied first to last)."""
    qr, tau = f.qr, f.tau
    n = f.n
    for k in range(n):
        if tau[k] == 0.0:
            continue
        tail = qr[k + 1:, k]
        s = tau[k] * (vec[k] + tail @ vec[k + 1:])
        vec[k] -= s
        vec[k + 1:] -= s * tail


def qr_explicit_q(f: QrFactors) -> Matrix:
    """Accumulate the orthogonal factor as a dense matrix."""
    n = f.n
    q = np.eye(n)
    for k in range(n - 1, -1, -1):
        if f.tau[k] == 0.0:
            continue
        v = np.empty(n - k)
        v[0] = 1.0
        v[1:] = f.qr[k + 1:, k]
        q[k:, :] -= np.outer(f.tau[k] * v, v @ q[k:, :])
    return Matrix(q)


def qr_r(f: QrFactors) -> Matrix:
    return Matrix(np.triu(f.qr))


def solve_qr(f: QrFactors, b: Vector) -> Vector:
    """Solve A x = b through the packed QR factors."""
    n = f.n
    if b.n != n:
        raise DimensionMismatchError(f"factors are {n}x{n}, rhs has length {b.n}")
    # max |R| entry stands in for the matrix scale in the rank decision
    scale = float(np.abs(np.triu(f.qr)).max())
    tol = n * EPS * scale
    y = b.data.copy()
    _apply_q_transpose(f, y)
    x = np.empty(n)
    qr = f.qr
    for i in range(n - 1, -1, -1):
        if abs(qr[i, i]) <= tol:
            raise SingularMatrixError(
                f"R diagonal {qr[i, i]!r} at column {i} is below tolerance", detail=i
            )
        x[i] = (y[i] - qr[i, i + 1:] @ x[i + 1:]) / qr[i, i]
    return Vector(x)


def _complete_zero_columns(w: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Left vectors from rotated columns; zero columns get an orthonormal fill.

    Rank deficiency (or deflation of collapsed columns) leaves working
    columns with no usable direction. Each is filled from the canonical
    basis vector farthest from the span of the columns placed so far; that
    projection residual is at least sqrt((n-k)/n), so the pick never
    degenerates no matter how many columns need filling. Two
    re-orthogonalization passes keep the factor orthonormal.
    """
    n = w.shape[0]
    l = np.zeros_like(w)
    filled = [j for j in range(w.shape[1]) if sigma[j] > 0.0]
    for j in filled:
        l[:, j] = w[:, j] / sigma[j]
    for j in range(w.shape[1]):
        if sigma[j] > 0.0:
            continue
        placed = l[:, filled]
        resid = np.eye(n) - placed @ placed.T
        norms = np.sqrt((resid * resid).sum(axis=0))
        cand = resid[:, int(np.argmax(norms))].copy()
        for _ in range(2):  # twice-is-enough re-orthogonalization
            cand -= placed @ (placed.T @ cand)
        nrm = math.sqrt(float(cand @ cand))
        if nrm == 0.0:  # unreachable: the complement has positive dimension
            raise AssertionError("orthonormal completion failed")
        l[:, j] = cand / nrm
        filled.append(j)
    return l


def svd_jacobi(a: Matrix, jacobi_tol: float | None = None,
               max_sweeps: int = JACOBI_MAX_SWEEPS) -> SvdFactors:
    """One-sided Jacobi SVD, cyclic by rows over column pairs.

    Columns p, q are rotated while the Gram entry is large relative to the
    column norms, |w_p . w_q| > jacobi_tol * ||w_p|| ||w_q||. The default
    tolerance is 2 sqrt(n) eps, just above the rounding floor of the dot
    products themselves; an absolute threshold would either stall (matrices
    scaled far above 1) or under-rotate (far below). Raises after
    ``max_sweeps`` sweeps, reporting the largest relative off-diagonal
    Gram measure still standing.

    A column whose norm falls below n * eps * (largest initial column norm)
    is rounding debris of the rotations, not a direction: relative to other
    such columns it can stay correlated forever, so it is deflated; pairs
    touching it are skipped and its singular value is reported as exact
    zero, with the left factor column supplied by orthonormal completion.
    Genuinely small singular values are far above this floor for any
    condition number below 1/(n eps).
    """
    n = _require_square(a, "svd_jacobi")
    w = a.data.copy()
    r = np.eye(n)
    if jacobi_tol is None:
        jacobi_tol = 2.0 * math.sqrt(n) * EPS
    colsq = (w * w).sum(axis=0)
    tiny_sq = (n * EPS) ** 2 * float(colsq.max())  # deflation floor, squared
    off = math.inf
    converged = False
    for _ in range(max_sweeps):
        colsq = (w * w).sum(axis=0)  # refreshed per sweep, updated per rotation
        off = 0.0
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                app, aqq = colsq[p], colsq[q]
                if app <= tiny_sq or aqq <= tiny_sq:
                    continue
                apq = float(w[:, p] @ w[:, q])
                bound = math.sqrt(app * aqq)
                rel = abs(apq) / bound if bound > 0.0 else 0.0
                if rel > off:
                    off = rel
                if rel <= jacobi_tol:
                    continue
                rotated = True
                zeta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                wp = w[:, p].copy()
                w[:, p] = c * wp - s * w[:, q]
                w[:, q] = s * wp + c * w[:, q]
                rp = r[:, p].copy()
                r[:, p] = c * rp - s * r[:, q]
                r[:, q] = s * rp + c * r[:, q]
                colsq[p] = app - t * apq
                colsq[q] = aqq + t * apq
        if not rotated:
            converged = True
            break
    if not converged:
        raise NonConvergenceError(
            f"Jacobi sweeps exhausted ({max_sweeps}); largest relative "
            f"off-diagonal Gram measure {off!r}", measure=off,
        )
    colsq = (w * w).sum(axis=0)
    colsq[colsq <= tiny_sq] = 0.0  # deflated columns report exact zeros
    sigma = np.sqrt(colsq)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    w = w[:, order]
    r = r[:, order]
    l = _complete_zero_columns(w, sigma)
    return SvdFactors(Matrix(l), sigma, Matrix(r))


def norm2(a: Matrix) -> float:
    """Spectral norm: leading singular value, by SVD for small orders,
    by power iteration on A^T A above the cutoff."""
    if a.rows == a.cols and a.rows <= NORM_SVD_CUTOFF:
        return float(svd_jacobi(a).sigma[0])
    d = a.data
    rng = Rng(_POWER_SEED)  # fixed stream: deterministic start vector
    q = rng.normals(a.cols)
    q /= math.sqrt(float(q @ q))
    s_prev = 0.0
    s = 0.0
    for _ in range(POWER_MAX_ITERS):
        y = d @ q
        s = math.sqrt(float(y @ y))
        if s == 0.0:
            return 0.0
        z = d.T @ y
        q = z / math.sqrt(float(z @ z))
        if abs(s - s_prev) <= POWER_TOL * s:
            break
        s_prev = s
    return s


def cond2(s: SvdFactors) -> float:
    """Spectral condition number from computed singular values."""
    smallest = float(s.sigma[-1])
    if smallest == 0.0:
        raise SingularMatrixError("zero smallest singular value", detail=len(s.sigma) - 1)
    return float(s.sigma[0]) / smallest
