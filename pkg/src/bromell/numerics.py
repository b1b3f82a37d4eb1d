"""Dense complex linear-algebra kernels.

Everything downstream (pseudospectral grids, contour selection, quadrature)
is built on the four operations here: shifted solves (zI - A)x = b, smallest
singular values, dense eigenvalues, and a matrix-exponential reference
evolution used as validation oracle.

All functions are pure and deterministic; inputs are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    DimensionLimitError,
    EigenSolverError,
    SingularSystemError,
    UnsupportedSourceError,
)

# Operators above this size are rejected by the dense pipeline.
DENSE_DIM_LIMIT = 3000
# Full SVD is used for sigma_min up to this size, inverse iteration above.
SVD_DENSE_LIMIT = 500
# The matrix-exponential reference is trusted only up to this size.
REFERENCE_DIM_LIMIT = 500


@dataclass(frozen=True, eq=False)
class Operator:
    """Square, dense, complex-capable matrix with a provenance tag."""

    entries: np.ndarray
    source_tag: str = ""

    def __post_init__(self):
        M = np.asarray(self.entries)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"operator must be square, got shape {M.shape}")
        if M.shape[0] < 1:
            raise ValueError("operator must have dimension >= 1")
        dtype = np.complex128 if np.iscomplexobj(M) else np.float64
        M = np.ascontiguousarray(M, dtype=dtype)
        if not np.all(np.isfinite(M)):
            raise ValueError("operator entries must be finite")
        M.setflags(write=False)
        object.__setattr__(self, "entries", M)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.entries)


def as_operator(A) -> Operator:
    """Coerce a matrix-like into an Operator (no copy if already one)."""
    if isinstance(A, Operator):
        return A
    return Operator(np.asarray(A))


def _as_matrix(M) -> np.ndarray:
    return M.entries if isinstance(M, Operator) else np.asarray(M)


class ShiftedSystem:
    """Pivoted LU factorization of (zI - A), reusable for many right-hand sides.

    Caching these is what makes node reuse across quadrature refinements and
    time windows cheap: the factorization does not depend on the evolution
    time, only on the shift z.
    """

    def __init__(self, A, z: complex):
        M = _as_matrix(A)
        self.z = complex(z)
        self.dim = M.shape[0]
        shifted = self.z * np.eye(self.dim) - M
        self._anorm = np.linalg.norm(shifted, 1)
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # zero-pivot warning handled below
            self._lu, self._piv = sla.lu_factor(shifted)
        diag = np.abs(np.diag(self._lu))
        if not np.all(np.isfinite(self._lu)) or np.min(diag) == 0.0:
            raise SingularSystemError(
                f"(zI - A) is numerically singular at z = {self.z}"
            )

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        x = sla.lu_solve((self._lu, self._piv), np.asarray(rhs))
        if not np.all(np.isfinite(x)):
            raise SingularSystemError(
                f"solve with (zI - A) overflowed at z = {self.z}"
            )
        return x

    def solve_adjoint(self, rhs: np.ndarray) -> np.ndarray:
        return sla.lu_solve((self._lu, self._piv), np.asarray(rhs), trans=2)

    def cond_estimate(self) -> float:
        """1-norm condition-number estimate of (zI - A) from the LU factors."""
        if self._anorm == 0.0:
            return np.inf
        gecon = sla.get_lapack_funcs("gecon", (self._lu,))
        rcond, info = gecon(self._lu, self._anorm)
        if info < 0 or rcond == 0.0:
            return np.inf
        return 1.0 / rcond


def resolvent_solve(A, z: complex, rhs: np.ndarray) -> np.ndarray:
    """Solve (zI - A) x = rhs by pivoted dense LU.

    Raises SingularSystemError when z is (numerically) an eigenvalue of A.
    For repeated right-hand sides at the same z build a ShiftedSystem instead.
    """
    return ShiftedSystem(A, z).solve(rhs)


def resolvent_cond(A, z: complex) -> float:
    """Condition-number estimate of (zI - A); feeds the feasibility check."""
    try:
        return ShiftedSystem(A, z).cond_estimate()
    except SingularSystemError:
        return np.inf


def smallest_singular_value(M) -> float:
    """sigma_min of a square matrix to >= 6 significant digits.

    Full SVD up to SVD_DENSE_LIMIT; above that, inverse iteration on the LU
    factors of M (power iteration on (M^H M)^-1 with a terminal ||M v||
    Rayleigh refinement). Returns 0.0 for an exactly singular M.
    """
    M = _as_matrix(M)
    n = M.shape[0]
    if n <= SVD_DENSE_LIMIT:
        return float(np.linalg.svd(M, compute_uv=False)[-1])

    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, piv = sla.lu_factor(M)
    if not np.all(np.isfinite(lu)) or np.min(np.abs(np.diag(lu))) == 0.0:
        return 0.0
    # Deterministic start vector; no seeding of global RNG state.
    v = np.ones(n, dtype=complex)
    v[1::2] += 0.5j
    v /= np.linalg.norm(v)
    sigma_prev = np.inf
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(200):
            y = sla.lu_solve((lu, piv), v, trans=2)
            w = sla.lu_solve((lu, piv), y)
            nw = np.linalg.norm(w)
            if not np.isfinite(nw) or nw == 0.0:
                return 0.0
            sigma = 1.0 / np.sqrt(nw)
            v = w / nw
            if abs(sigma - sigma_prev) <= 1e-10 * sigma:
                break
            sigma_prev = sigma
    return float(np.linalg.norm(M @ v))


def eigenvalues(A) -> np.ndarray:
    """All eigenvalues of A (unordered), via the dense QR algorithm."""
    M = _as_matrix(A)
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue iteration failed: {exc}") from exc


def reference_solution(problem, t: float) -> np.ndarray:
    """Evolve u' = Au + b(t), u(0) = u0 up to time t by one matrix exponential.

    The operator, the source-term vectors and their scalar decay modes are
    embedded into a single augmented matrix; the first block of
    expm(M t) @ [u0; 1...1] is exactly u(t) = e^{At} u0 + int_0^t e^{A(t-s)} b(s) ds.
    Supported sources: sums of v * exp(-r s) terms (r = 0 gives a constant).
    """
    A = problem.operator.entries
    n = A.shape[0]
    if n > REFERENCE_DIM_LIMIT:
        raise DimensionLimitError(
            f"reference evolution is certified only up to dim {REFERENCE_DIM_LIMIT}, "
            f"got {n}"
        )
    if getattr(problem, "extra_bhat", None) is not None:
        raise UnsupportedSourceError(
            "reference evolution supports only closed-form exponential sources"
        )
    terms = list(problem.source_terms)
    m = len(terms)
    dtype = complex if (np.iscomplexobj(A) or any(np.iscomplexobj(v.vector) for v in terms)
                        or np.iscomplexobj(problem.u0)) else float
    M = np.zeros((n + m, n + m), dtype=dtype)
    M[:n, :n] = A
    for k, term in enumerate(terms):
        M[:n, n + k] = term.vector
        M[n + k, n + k] = -term.rate
    w = np.concatenate([np.asarray(problem.u0, dtype=dtype), np.ones(m, dtype=dtype)])
    return (sla.expm(M * float(t)) @ w)[:n]
